#include <algorithm>
#include <numeric>

#include "spreadlab/errors.hpp"
#include "spreadlab/spreadcore.hpp"

namespace spreadlab {

namespace {

using Idx = std::uint32_t;

// Orbits of H on its own elements under conjugation; returns (rep, size) pairs.
std::vector<std::pair<Idx, u64>> h_classes(const ElementTable& T, const SubgroupRecord& H) {
  std::vector<Idx> hg;
  for (const auto& g : H.gens) hg.push_back(T.index_of(g));
  ElemSet seen(T.size());
  std::vector<std::pair<Idx, u64>> out;
  for (Idx h : H.element_list) {
    if (seen.test(h)) continue;
    std::vector<Idx> orb{h};
    seen.set(h);
    for (std::size_t k = 0; k < orb.size(); ++k)
      for (Idx g : hg) {
        Idx y = T.conj(orb[k], g);
        if (!seen.test(y)) {
          seen.set(y);
          orb.push_back(y);
        }
      }
    out.emplace_back(h, orb.size());
  }
  return out;
}

}  // namespace

std::string rat_str(const Rational& r) {
  auto n = boost::multiprecision::numerator(r);
  auto d = boost::multiprecision::denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

FprValue fpr(const Group& G, const SubgroupRecord& H, const Perm& x) {
  FprValue out;
  if (G.tabulated()) {
    const auto& T = G.table();
    Idx xi = T.index_of(x);
    out.x_class = G.class_index_of(xi);
    out.class_size = G.classes()[out.x_class].size;
    SubgroupRecord Hs = H.elements ? H : G.subgroup(H.gens);
    // Sum the sizes of the H-classes that fuse into x^G.
    for (auto [rep, size] : h_classes(T, Hs))
      if (G.class_index_of(rep) == out.x_class) out.hits += size;
    out.value = Rational(out.hits, out.class_size);
    return out;
  }
  // Above the cap: H tabulated on its own, fusion certified by conj_test.
  auto Hg = Group::from_perms(G.degree(), H.gens);
  if (!Hg->tabulated()) throw TooLarge("subgroup too large for class fusion");
  u64 cent = G.centralizer(x).order;
  out.class_size = G.order() / cent;
  out.x_class = 0;
  for (const auto& c : Hg->classes()) {
    if (c.order != x.order()) continue;
    auto r = G.conj_test(x, c.rep);
    if (r.verdict == ConjVerdict::Inconclusive) throw InconclusiveFusion("cannot certify fusion of " + c.rep.cycles());
    if (r.verdict == ConjVerdict::Conjugate) out.hits += c.size;
  }
  out.value = Rational(out.hits, out.class_size);
  return out;
}

FprValue fpr_via_action(const Group& G, const SubgroupRecord& H, const Perm& x) {
  u64 index = G.order() / H.order;
  if (index > 1000000) throw IndexTooLarge("index " + std::to_string(index) + " above 10^6");
  const auto& T = G.table();
  SubgroupRecord Hs = H.elements ? H : G.subgroup(H.gens);
  const ElemSet& in = *Hs.elements;
  Idx xi = T.index_of(x);
  // Right cosets Hg, labelled by their least element.
  ElemSet done(T.size());
  u64 fixed = 0, cosets = 0;
  for (Idx g = 0; g < T.size(); ++g) {
    if (done.test(g)) continue;
    ++cosets;
    for (Idx h : Hs.element_list) done.set(T.mul(h, g));
    // Hg x = Hg iff g x g^-1 in H
    if (in.test(T.mul(T.mul(g, xi), T.inv(g)))) ++fixed;
  }
  FprValue out;
  out.x_class = G.class_index_of(xi);
  out.class_size = G.classes()[out.x_class].size;
  out.value = Rational(fixed, cosets);
  Rational h = out.value * out.class_size;
  out.hits = static_cast<u64>(boost::multiprecision::numerator(h));
  return out;
}

namespace {

// Some g with A^g = B, by exhaustive search.
bool subgroups_conjugate(const Group& G, const SubgroupRecord& A, const SubgroupRecord& B) {
  if (A.order != B.order || A.fp.order_stats != B.fp.order_stats) return false;
  const auto& T = G.table();
  std::vector<Idx> ag;
  for (const auto& p : A.gens) ag.push_back(T.index_of(p));
  for (Idx g = 0; g < T.size(); ++g) {
    bool ok = true;
    for (Idx a : ag)
      if (!B.elements->test(T.conj(a, g))) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

}  // namespace

MaxOvergroups max_overgroups(const Group& G, const Perm& s, std::size_t max_groups) {
  auto po = G.overgroups(s, max_groups);
  MaxOvergroups out;
  std::vector<std::size_t> reps;
  std::vector<u64> counts;
  for (auto i : po.maximal) {
    const auto& M = po.groups[i];
    bool placed = false;
    for (std::size_t r = 0; r < reps.size() && !placed; ++r)
      if (subgroups_conjugate(G, po.groups[reps[r]], M)) {
        ++counts[r];
        placed = true;
      }
    if (!placed) {
      reps.push_back(i);
      counts.push_back(1);
    }
  }
  for (std::size_t r = 0; r < reps.size(); ++r) {
    MaxOvergroup mo;
    mo.H = po.groups[reps[r]];
    mo.counted = counts[r];
    mo.normalizer_index = G.order() / G.normalizer(mo.H).order;
    mo.fpr_s = fpr(G, mo.H, s).value;
    Rational m = mo.fpr_s * mo.normalizer_index;
    if (boost::multiprecision::denominator(m) != 1) throw HypothesisViolation("non-integral conjugate count");
    mo.multiplicity = static_cast<u64>(boost::multiprecision::numerator(m));
    if (mo.multiplicity != mo.counted)
      throw HypothesisViolation("conjugate count " + std::to_string(mo.counted) + " disagrees with fpr formula " +
                                std::to_string(mo.multiplicity));
    out.classes.push_back(std::move(mo));
  }
  return out;
}

MaxOvergroups max_overgroups_trusted(const Group& G, const Perm& s, const std::vector<SubgroupRecord>& maximals) {
  if (s.is_identity()) throw IdentityElement("overgroups of the identity are not supported");
  MaxOvergroups out;
  out.assumed_maximals = true;
  for (const auto& H : maximals) {
    MaxOvergroup mo;
    mo.H = H;
    mo.fpr_s = fpr(G, H, s).value;
    if (mo.fpr_s == 0) continue;
    mo.normalizer_index = G.order() / H.order;
    Rational m = mo.fpr_s * mo.normalizer_index;
    mo.multiplicity = static_cast<u64>(boost::multiprecision::numerator(m) / boost::multiprecision::denominator(m));
    out.classes.push_back(std::move(mo));
  }
  return out;
}

Rational prob_bound(const Group& G, const MaxOvergroups& M, const Perm& x) {
  Rational sum = 0;
  for (const auto& mo : M.classes) sum += fpr(G, mo.H, x).value * mo.multiplicity;
  return sum;
}

Rational prob_exact(const Group& G, const Perm& s, const Perm& x) {
  const auto& T = G.table();
  const auto& members = G.class_members(G.class_index(s));
  u64 bad = 0;
  for (Idx z : members)
    if (!StabChain::has_order(G.degree(), {x, T.perm(z)}, G.order())) ++bad;
  return Rational(bad, members.size());
}

}  // namespace spreadlab
