#include <algorithm>
#include <random>
#include <sstream>

#include "spreadlab/errors.hpp"
#include "spreadlab/numtheory.hpp"
#include "spreadlab/spreadcore.hpp"

namespace spreadlab {

namespace {

using Idx = std::uint32_t;

// A subgroup of a tabulated group as an element list with generators.
struct Stab {
  bool whole = false;
  std::vector<Idx> elems;
  std::vector<Idx> gens;
};

Stab whole_group(const Group& G) {
  Stab s;
  s.whole = true;
  for (const auto& g : G.generators()) s.gens.push_back(G.table().index_of(g));
  return s;
}

// Orbit representatives (least index) of S acting by conjugation on class c.
std::vector<Idx> orbit_reps(const Group& G, const Stab& S, std::size_t c) {
  if (S.whole) return {G.classes()[c].rep_index};
  const auto& members = G.class_members(c);
  if (S.gens.empty()) return members;
  const auto& T = G.table();
  ElemSet seen(T.size());
  std::vector<Idx> reps, orb;
  for (Idx y : members) {
    if (seen.test(y)) continue;
    reps.push_back(y);
    orb.assign(1, y);
    seen.set(y);
    for (std::size_t i = 0; i < orb.size(); ++i)
      for (Idx g : S.gens) {
        Idx w = T.conj(orb[i], g);
        if (!seen.test(w)) {
          seen.set(w);
          orb.push_back(w);
        }
      }
  }
  return reps;
}

Stab stabilizer(const Group& G, const Stab& S, Idx y) {
  const auto& T = G.table();
  Stab out;
  if (S.whole) {
    for (Idx g = 0; g < T.size(); ++g)
      if (T.mul(y, g) == T.mul(g, y)) out.elems.push_back(g);
  } else {
    for (Idx g : S.elems)
      if (T.mul(y, g) == T.mul(g, y)) out.elems.push_back(g);
  }
  if (out.elems.size() > 1)
    for (const auto& p : G.subgroup_from_elements(out.elems).gens) out.gens.push_back(T.index_of(p));
  return out;
}

void class_rep_rec(const Group& G, const std::vector<std::size_t>& cls, std::size_t d, const Stab& S,
                   std::vector<Idx>& cur, std::vector<std::vector<Idx>>& out) {
  if (d == cls.size()) {
    out.push_back(cur);
    return;
  }
  for (Idx y : orbit_reps(G, S, cls[d])) {
    cur.push_back(y);
    if (d + 1 == cls.size())
      out.push_back(cur);
    else
      class_rep_rec(G, cls, d + 1, stabilizer(G, S, y), cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<Idx>> rep_tuple_indices(const Group& G, const std::vector<std::size_t>& cls) {
  std::vector<std::vector<Idx>> out;
  std::vector<Idx> cur;
  if (cls.empty()) return {{}};
  class_rep_rec(G, cls, 0, whole_group(G), cur, out);
  return out;
}

u64 splitmix(u64 x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

bool gen_all(const Group& G, const std::vector<Perm>& tuple, const Perm& z) {
  for (const auto& x : tuple)
    if (!StabChain::has_order(G.degree(), {x, z}, G.order())) return false;
  return true;
}

std::vector<std::size_t> prime_classes(const Group& G) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < G.classes().size(); ++c)
    if (is_prime(G.classes()[c].order)) out.push_back(c);
  return out;
}

std::string join_classes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

std::vector<std::vector<Perm>> class_rep_tuples(const Group& G, const std::vector<Perm>& elts) {
  const auto& T = G.table();
  std::vector<std::size_t> cls;
  for (const auto& x : elts) cls.push_back(G.class_index(x));
  std::vector<std::vector<Perm>> out;
  if (elts.empty()) return out;
  // The first coordinate is the given element itself.
  Idx x0 = T.index_of(elts[0]);
  std::vector<Idx> cur{x0};
  std::vector<std::vector<Idx>> idx;
  std::vector<std::size_t> rest(cls.begin() + 1, cls.end());
  if (rest.empty())
    idx.push_back(cur);
  else
    class_rep_rec(G, rest, 0, stabilizer(G, whole_group(G), x0), cur, idx);
  for (const auto& t : idx) {
    std::vector<Perm> p;
    for (Idx i : t) p.push_back(T.perm(i));
    out.push_back(std::move(p));
  }
  return out;
}

bool random_check(const Group& G, const Perm& s, const std::vector<std::size_t>& tuple_classes, u64 N, u64 seed) {
  if (N == 0) return false;
  const auto& T = G.table();
  std::mt19937_64 rng(seed);
  for (const auto& t : rep_tuple_indices(G, tuple_classes)) {
    std::vector<Perm> tuple;
    for (Idx i : t) tuple.push_back(T.perm(i));
    bool ok = false;
    for (u64 a = 0; a < N && !ok; ++a) {
      Perm h = T.perm(static_cast<Idx>(rng() % T.size()));
      ok = gen_all(G, tuple, conjugate(s, h));
    }
    if (!ok) return false;
  }
  return true;
}

std::string status_name(CertStatus s) {
  switch (s) {
    case CertStatus::Verified: return "verified";
    case CertStatus::Refuted: return "refuted";
    default: return "inconclusive";
  }
}

std::string SpreadCertificate::to_text() const {
  std::ostringstream os;
  os << "mode " << mode << "\n";
  os << "k " << k << "\n";
  os << "status " << status_name(status) << "\n";
  os << "witness_class " << (witness_class ? std::to_string(*witness_class) : "-") << "\n";
  os << "assumed_maximals " << (assumed_maximals ? "yes" : "no") << "\n";
  os << "seed " << seed << "\n";
  for (const auto& e : ledger) os << "ledger " << e.x_class << " " << rat_str(e.value) << "\n";
  for (const auto& t : random_checked) os << "random_checked " << join_classes(t) << "\n";
  for (const auto& t : exhaustive_checked) os << "exhaustive_checked " << join_classes(t) << "\n";
  if (!failed_classes.empty()) os << "failed_classes " << join_classes(failed_classes) << "\n";
  if (!refutation.empty()) {
    os << "refutation";
    for (const auto& p : refutation) os << " " << p.cycles();
    os << "\n";
  }
  for (auto [c, v] : class_values) os << "class_value " << c << " " << v << "\n";
  os << "exact " << (exact_value ? std::to_string(*exact_value) : "-") << "\n";
  os << "bracket " << lo << " " << (hi < 0 ? std::string("inf") : std::to_string(hi)) << "\n";
  os << "nodes " << nodes << "\n";
  return os.str();
}

SpreadCertificate probabilistic_method(const Group& G, const Perm& s, int k, u64 N, u64 seed,
                                       const MaxOvergroups* trusted) {
  if (k < 1) throw HypothesisViolation("k must be positive");
  SpreadCertificate cert;
  cert.mode = "uniform";
  cert.k = k;
  cert.seed = seed;
  cert.witness_class = G.class_index(s);
  MaxOvergroups M = trusted ? *trusted : max_overgroups(G, s);
  cert.assumed_maximals = M.assumed_maximals;
  auto P = prime_classes(G);
  std::vector<Rational> led;
  for (auto c : P) {
    led.push_back(prob_bound(G, M, G.classes()[c].rep));
    cert.ledger.push_back({c, led.back()});
  }
  const auto& T = G.table();
  const auto& sclass = G.class_members(*cert.witness_class);
  // Nondecreasing k-multisets of prime-order classes.
  std::vector<std::size_t> pos(static_cast<std::size_t>(k), 0);
  u64 counter = 0;
  while (!P.empty()) {
    Rational sum = 0;
    for (auto i : pos) sum += led[i];
    if (sum >= 1) {
      std::vector<std::size_t> tc;
      for (auto i : pos) tc.push_back(P[i]);
      if (random_check(G, s, tc, N, splitmix(seed ^ splitmix(counter++)))) {
        cert.random_checked.push_back(tc);
      } else {
        // Settle the tuple exhaustively over s^G.
        for (const auto& t : rep_tuple_indices(G, tc)) {
          std::vector<Perm> tuple;
          for (Idx i : t) tuple.push_back(T.perm(i));
          bool found = false;
          for (Idx z : sclass)
            if (gen_all(G, tuple, T.perm(z))) {
              found = true;
              break;
            }
          if (!found) {
            cert.status = CertStatus::Refuted;
            cert.failed_classes = tc;
            cert.refutation = tuple;
            return cert;
          }
        }
        cert.exhaustive_checked.push_back(tc);
      }
    }
    // next multiset
    int j = k - 1;
    while (j >= 0 && pos[static_cast<std::size_t>(j)] + 1 == P.size()) --j;
    if (j < 0) break;
    auto v = pos[static_cast<std::size_t>(j)] + 1;
    for (auto t = static_cast<std::size_t>(j); t < pos.size(); ++t) pos[t] = v;
  }
  cert.status = CertStatus::Verified;
  cert.lo = k;
  return cert;
}

bool verify_refutation(const Group& G, const std::vector<Perm>& tuple, const std::vector<std::uint32_t>* candidates) {
  const auto& T = G.table();
  if (candidates) {
    for (Idx z : *candidates)
      if (z != 0 && gen_all(G, tuple, T.perm(z))) return false;
    return true;
  }
  for (Idx z = 1; z < T.size(); ++z)
    if (gen_all(G, tuple, T.perm(z))) return false;
  return true;
}

namespace {

// Best-first search for a k-tuple of prime-order elements with no common mate in `target`.
class TupleSearch {
 public:
  TupleSearch(const MateTable& mt, const std::vector<std::size_t>& P, const ElemSet& target, u64 budget)
      : mt_(mt), G_(mt.group()), P_(P), target_(target), budget_(budget) {
    // Largest number of target elements a single element of class P[i] or later fails to generate with.
    kill_.assign(P.size() + 1, 0);
    for (std::size_t i = P.size(); i-- > 0;) {
      u64 miss = target.count() - (mt.of_class(P[i]) & target).count();
      kill_[i] = std::max(kill_[i + 1], miss);
    }
  }

  enum class Result { Found, None, Budget };

  Result run(int k) {
    k_ = k;
    tuple_.clear();
    try {
      return dfs(0, 0, whole_group(G_), target_) ? Result::Found : Result::None;
    } catch (const BudgetExceeded&) {
      return Result::Budget;
    }
  }
  const std::vector<Idx>& tuple() const { return tuple_; }
  u64 nodes() const { return nodes_; }

 private:
  const MateTable& mt_;
  const Group& G_;
  const std::vector<std::size_t>& P_;
  const ElemSet& target_;
  u64 budget_, nodes_ = 0;
  int k_ = 0;
  std::vector<u64> kill_;
  std::vector<Idx> tuple_;

  void tick() {
    if (++nodes_ > budget_) throw BudgetExceeded("tuple search budget exhausted");
  }

  bool dfs(int depth, std::size_t ci, const Stab& S, const ElemSet& M) {
    u64 left = static_cast<u64>(k_ - depth);
    if (M.count() > left * kill_[ci]) return false;
    if (depth == k_ - 1) {
      for (std::size_t cp = ci; cp < P_.size(); ++cp) {
        if (M.count() > kill_[cp]) break;
        for (Idx y : orbit_reps(G_, S, P_[cp])) {
          tick();
          if (!M.intersects(*mt_.of(y))) {
            tuple_.push_back(y);
            return true;
          }
        }
      }
      return false;
    }
    struct Child {
      std::size_t left;
      std::size_t cp;
      Idx y;
    };
    std::vector<Child> kids;
    for (std::size_t cp = ci; cp < P_.size(); ++cp)
      for (Idx y : orbit_reps(G_, S, P_[cp])) {
        tick();
        std::size_t n = (M & *mt_.of(y)).count();
        if (n == 0) {
          tuple_.push_back(y);
          return true;
        }
        kids.push_back({n, cp, y});
      }
    std::stable_sort(kids.begin(), kids.end(), [](const Child& a, const Child& b) { return a.left < b.left; });
    for (const auto& ch : kids) {
      if (ch.left > (left - 1) * kill_[ch.cp]) continue;
      tuple_.push_back(ch.y);
      if (dfs(depth + 1, ch.cp, stabilizer(G_, S, ch.y), M & *mt_.of(ch.y))) return true;
      tuple_.pop_back();
    }
    return false;
  }
};

std::vector<Perm> to_perms(const Group& G, const std::vector<Idx>& t) {
  std::vector<Perm> out;
  for (Idx i : t) out.push_back(G.table().perm(i));
  return out;
}

}  // namespace

SpreadCertificate spread_exact(const MateTable& mates, const ExactOptions& opt) {
  const Group& G = mates.group();
  SpreadCertificate cert;
  cert.mode = "spread";
  auto P = prime_classes(G);
  mates.prepare(P);
  ElemSet target(G.table().size());
  target.set();
  target.reset(0);
  TupleSearch ts(mates, P, target, opt.budget);
  cert.lo = 0;
  for (int k = 1; k <= opt.k_max; ++k) {
    auto r = ts.run(k);
    cert.nodes = ts.nodes();
    if (r == TupleSearch::Result::Budget) {
      cert.status = CertStatus::Inconclusive;
      cert.k = cert.lo;
      return cert;
    }
    if (r == TupleSearch::Result::Found) {
      cert.refutation = to_perms(G, ts.tuple());
      if (!verify_refutation(G, cert.refutation)) throw std::logic_error("refutation failed direct verification");
      cert.status = CertStatus::Verified;
      cert.exact_value = k - 1;
      cert.k = k - 1;
      cert.hi = k - 1;
      return cert;
    }
    cert.lo = k;
  }
  cert.status = CertStatus::Verified;
  cert.k = cert.lo;
  return cert;
}

SpreadCertificate uspread_exact(const MateTable& mates, const ExactOptions& opt) {
  const Group& G = mates.group();
  const auto& T = G.table();
  SpreadCertificate cert;
  cert.mode = "exact-uniform";
  auto P = prime_classes(G);
  mates.prepare(P);
  int best = -1;
  bool open = false;  // some class value is only bounded below
  for (std::size_t c = 0; c < G.classes().size(); ++c) {
    if (G.classes()[c].rep_index == 0) continue;
    const auto& members = G.class_members(c);
    ElemSet target(T.size());
    for (Idx z : members) target.set(z);
    // Union bound: k * max_x P(x, C) < 1 certifies k.
    Rational worst = 0;
    for (auto p : P) {
      Rational pr(static_cast<u64>(members.size() - (mates.of_class(p) & target).count()), members.size());
      worst = std::max(worst, pr);
    }
    int start = opt.k_max;
    if (worst > 0) {
      Rational inv = 1 / worst;
      auto fl = boost::multiprecision::numerator(inv) / boost::multiprecision::denominator(inv);
      int kb = static_cast<int>(fl);
      if (Rational(kb) == inv) --kb;
      start = std::min(opt.k_max, kb);
    }
    int value = start;
    bool exact = false;
    std::vector<Idx> refut;
    TupleSearch ts(mates, P, target, opt.budget);
    bool budget = false;
    for (int k = start + 1; k <= opt.k_max; ++k) {
      auto r = ts.run(k);
      cert.nodes += ts.nodes();
      if (r == TupleSearch::Result::Budget) {
        budget = true;
        break;
      }
      if (r == TupleSearch::Result::Found) {
        exact = true;
        refut = ts.tuple();
        break;
      }
      value = k;
    }
    if (exact) {
      auto tuple = to_perms(G, refut);
      if (!verify_refutation(G, tuple, &members)) throw std::logic_error("refutation failed direct verification");
      if (value > best) {
        best = value;
        cert.witness_class = c;
        cert.refutation = tuple;
      }
    } else {
      open = true;
      if (value > best) {
        best = value;
        cert.witness_class = c;
        cert.refutation.clear();
      }
    }
    (void)budget;
    cert.class_values.emplace_back(c, value);
    if (!exact && value >= opt.k_max && !opt.all_classes) break;
  }
  cert.k = std::max(best, 0);
  cert.lo = cert.k;
  if (!open) {
    cert.status = CertStatus::Verified;
    cert.exact_value = cert.k;
    cert.hi = cert.k;
  } else {
    cert.status = cert.k >= opt.k_max ? CertStatus::Verified : CertStatus::Inconclusive;
  }
  return cert;
}

}  // namespace spreadlab
