#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include "spreadlab/errors.hpp"
#include "spreadlab/grpengine.hpp"

namespace spreadlab {

namespace {

using Idx = std::uint32_t;

std::uint64_t fnv(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

struct PermHash {
  std::size_t operator()(const Perm& p) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (Point x : p.images()) h = fnv(h, x);
    return h;
  }
};

// Point index of a vector over a field of size Q (base-Q digits, coordinate 0 lowest).
u64 vec_code(const Vec& v, u64 Q) {
  u64 c = 0;
  for (std::size_t i = v.size(); i-- > 0;) c = c * Q + v[i].v;
  return c;
}

Vec normalize(const FieldCtx& F, Vec v) {
  for (auto& x : v)
    if (x.v) {
      Fq s = F.inv(x);
      for (auto& y : v) y = F.mul(y, s);
      break;
    }
  return v;
}

}  // namespace

std::string action_name(MatAction a) { return a == MatAction::Vectors ? "vectors" : "proj_points"; }

MatAction parse_action(const std::string& s) {
  if (s == "vectors" || s == "vec") return MatAction::Vectors;
  if (s == "proj_points" || s == "proj" || s == "points") return MatAction::ProjPoints;
  throw ParseError("unknown matrix action '" + s + "'");
}

std::string Fingerprint::to_string() const {
  std::ostringstream os;
  os << order << "|";
  for (auto [o, c] : order_stats) os << o << ":" << c << ",";
  os << "|";
  for (auto l : orbit_lengths) os << l << ",";
  return os.str();
}

// ---- construction ----

GroupPtr Group::from_perms(std::size_t degree, std::vector<Perm> gens) {
  if (degree == 0) throw NotBijection("degree must be positive");
  auto G = std::make_shared<Group>();
  for (auto& g : gens)
    if (g.degree() != degree) throw NotBijection("generator degree differs from the group degree");
  G->degree_ = degree;
  G->gens_ = std::move(gens);
  return G;
}

GroupPtr Group::from_matrices(const FormedSpace& sp, std::vector<Mat> gens, MatAction action) {
  const FieldCtx& F = *sp.field;
  for (const auto& g : gens) {
    if (g.rows() != sp.n || !g.square() || g.field() != sp.field)
      throw IncompatibleDegree("generator does not act on the space");
    if (g.det().v == 0) throw NotBijection("singular matrix generator");
    if (sp.kind != FormKind::Zero && !similarity_factor(g, sp)) throw FormNotPreserved("generator is not a similarity of the form");
  }
  u64 Q = F.q();
  auto total = checked_pow(Q, static_cast<unsigned>(sp.n));
  if (!total || *total > (u64{1} << 22)) throw TooLarge("too many points for a matrix action");
  MatrixOrigin org{sp, gens, action, {}};
  std::vector<std::int64_t> index(*total, -1);
  for (u64 c = 1; c < *total; ++c) {
    Vec v(sp.n);
    u64 t = c;
    for (int i = 0; i < sp.n; ++i) {
      v[i] = Fq{static_cast<std::uint32_t>(t % Q)};
      t /= Q;
    }
    if (action == MatAction::ProjPoints && normalize(F, v) != v) continue;
    index[c] = static_cast<std::int64_t>(org.points.size());
    org.points.push_back(std::move(v));
  }
  std::vector<Perm> perms;
  for (const auto& g : gens) {
    std::vector<Point> img(org.points.size());
    for (std::size_t i = 0; i < org.points.size(); ++i) {
      Vec w = vec_mul(org.points[i], g);
      if (action == MatAction::ProjPoints) w = normalize(F, w);
      img[i] = static_cast<Point>(index[vec_code(w, Q)]);
    }
    perms.emplace_back(std::move(img));
  }
  auto G = std::make_shared<Group>();
  G->degree_ = org.points.size();
  G->gens_ = std::move(perms);
  G->origin_ = std::move(org);
  return G;
}

Mat Group::to_matrix(const Perm& g) const {
  if (!origin_) throw IncompatibleKind("group has no matrix origin");
  const auto& org = *origin_;
  const auto& F = org.space.field;
  int n = org.space.n;
  u64 Q = F->q();
  std::unordered_map<u64, Point> where;
  auto find_point = [&](const Vec& v) -> Point {
    if (where.empty())
      for (std::size_t i = 0; i < org.points.size(); ++i) where.emplace(vec_code(org.points[i], Q), static_cast<Point>(i));
    return where.at(vec_code(v, Q));
  };
  std::vector<Vec> rows;
  for (int i = 0; i < n; ++i) {
    Vec e(n, Fq{0});
    e[i] = F->one();
    rows.push_back(org.points[g[find_point(e)]]);
  }
  Mat V = Mat::from_rows(F, rows);
  if (org.action == MatAction::Vectors) return V;
  // Projective: scale row i by c_i where sum c_i v_i spans the image of e_1 + ... + e_n.
  Vec all(n, F->one());
  Vec w = org.points[g[find_point(normalize(*F, all))]];
  // Solve c V = w.
  Mat c = Mat::from_rows(F, {w}) * V.inverse();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) V.at(i, j) = F->mul(V.at(i, j), c.at(0, i));
  return V;
}

const StabChain& Group::chain() const {
  std::call_once(chain_once_, [&] { chain_ = std::make_unique<StabChain>(degree_, gens_); });
  return *chain_;
}

const ElementTable& Group::table() const {
  if (!tabulated()) throw TooLarge("group order " + std::to_string(order()) + " above the exhaustive cap");
  std::call_once(table_once_, [&] { table_ = std::make_unique<ElementTable>(chain()); });
  return *table_;
}

Perm Group::random_elt(u64 seed) const {
  if (gens_.empty()) return Perm::identity(degree_);
  std::mt19937_64 rng(seed);
  std::vector<Perm> st;
  std::size_t r = std::max<std::size_t>(10, gens_.size() + 1);
  for (std::size_t i = 0; i < r; ++i) st.push_back(gens_[i % gens_.size()]);
  Perm acc = Perm::identity(degree_);
  auto step = [&] {
    std::size_t i = rng() % r, j = rng() % (r - 1);
    if (j >= i) ++j;
    if (rng() & 1)
      st[i] = st[i] * (rng() & 1 ? st[j] : st[j].inverse());
    else
      st[i] = (rng() & 1 ? st[j] : st[j].inverse()) * st[i];
    acc = acc * st[i];
  };
  for (int k = 0; k < 60; ++k) step();
  step();
  return acc;
}

bool Group::generated_by(const std::vector<Perm>& gens) const {
  for (const auto& g : gens)
    if (!member(g)) return false;
  return StabChain::has_order(degree_, gens, order());
}

std::string Group::digest() const {
  std::uint64_t h = fnv(0xcbf29ce484222325ull, degree_);
  for (const auto& g : gens_)
    for (Point x : g.images()) h = fnv(h, x);
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---- classes ----

const std::vector<ClassRecord>& Group::classes() const {
  std::call_once(classes_once_, [&] {
    const auto& T = table();
    std::vector<Idx> gi;
    for (const auto& g : gens_) gi.push_back(T.index_of(g));
    const Idx none = 0xffffffffu;
    std::vector<Idx> raw(T.size(), none);
    std::vector<std::vector<Idx>> members;
    for (Idx x = 0; x < T.size(); ++x) {
      if (raw[x] != none) continue;
      Idx c = static_cast<Idx>(members.size());
      members.emplace_back();
      auto& orb = members.back();
      orb.push_back(x);
      raw[x] = c;
      for (std::size_t k = 0; k < orb.size(); ++k)
        for (Idx g : gi) {
          Idx y = T.conj(orb[k], g);
          if (raw[y] == none) {
            raw[y] = c;
            orb.push_back(y);
          }
        }
      std::sort(orb.begin(), orb.end());
    }
    std::vector<std::size_t> perm(members.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      auto ka = std::make_tuple(T.order(members[a][0]), members[a].size(), members[a][0]);
      auto kb = std::make_tuple(T.order(members[b][0]), members[b].size(), members[b][0]);
      return ka < kb;
    });
    std::vector<Idx> relabel(members.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      relabel[perm[i]] = static_cast<Idx>(i);
      const auto& m = members[perm[i]];
      ClassRecord r;
      r.rep_index = m[0];
      r.rep = T.perm(m[0]);
      r.size = m.size();
      r.order = T.order(m[0]);
      r.centralizer_order = T.size() / m.size();
      classes_.push_back(std::move(r));
      class_members_.push_back(m);
    }
    class_of_.resize(T.size());
    for (Idx x = 0; x < T.size(); ++x) class_of_[x] = relabel[raw[x]];
  });
  return classes_;
}

std::size_t Group::class_index_of(std::uint32_t idx) const {
  classes();
  return class_of_.at(idx);
}

std::size_t Group::class_index(const Perm& g) const { return class_index_of(table().index_of(g)); }

const std::vector<std::uint32_t>& Group::class_members(std::size_t c) const {
  classes();
  return class_members_.at(c);
}

// ---- subgroups ----

Fingerprint Group::fingerprint_of(const std::vector<std::uint32_t>& elems, const std::vector<Perm>& gens) const {
  const auto& T = table();
  Fingerprint fp;
  fp.order = elems.size();
  std::map<u64, u64> st;
  for (Idx e : elems) ++st[T.order(e)];
  fp.order_stats.assign(st.begin(), st.end());
  fp.orbit_lengths = orbit_lengths(degree_, gens);
  return fp;
}

std::vector<std::uint32_t> Group::dimino(const std::vector<std::uint32_t>& base_list,
                                         const std::vector<std::uint32_t>& base_gens, std::uint32_t g,
                                         ElemSet& in) const {
  const auto& T = table();
  std::vector<Idx> elems = base_list;
  if (in.test(g)) return elems;
  std::vector<Idx> gens = base_gens;
  gens.push_back(g);
  std::size_t h = base_list.size();
  // Right cosets H r; the current set is always a union of them.
  std::vector<Idx> reps{0};
  auto add_coset = [&](Idx t) {
    for (std::size_t i = 0; i < h; ++i) {
      Idx e = T.mul(base_list[i], t);
      in.set(e);
      elems.push_back(e);
    }
    reps.push_back(t);
  };
  add_coset(g);
  for (std::size_t r = 0; r < reps.size(); ++r)
    for (Idx s : gens) {
      Idx t = T.mul(reps[r], s);
      if (!in.test(t)) add_coset(t);
    }
  return elems;
}

namespace {

SubgroupRecord make_record(const Group& G, std::vector<Perm> gens, std::vector<Idx> elems, ElemSet set) {
  SubgroupRecord r;
  std::sort(elems.begin(), elems.end());
  r.fp = G.fingerprint_of(elems, gens);
  r.order = elems.size();
  r.gens = std::move(gens);
  r.element_list = std::move(elems);
  r.elements = std::make_shared<const ElemSet>(std::move(set));
  return r;
}

// Greedy generators for a known element set that is a subgroup.
SubgroupRecord record_from_elements(const Group& G, const std::vector<Idx>& elems) {
  const auto& T = G.table();
  ElemSet in(T.size());
  in.set(0);
  std::vector<Idx> cur{0}, gi;
  // Prefer high-order elements so few generators are needed.
  std::vector<Idx> order = elems;
  std::stable_sort(order.begin(), order.end(), [&](Idx a, Idx b) { return T.order(a) > T.order(b); });
  for (Idx e : order) {
    if (cur.size() == elems.size()) break;
    if (in.test(e)) continue;
    cur = G.dimino(cur, gi, e, in);
    gi.push_back(e);
  }
  std::vector<Perm> gens;
  for (Idx e : gi) gens.push_back(T.perm(e));
  return make_record(G, std::move(gens), std::move(cur), std::move(in));
}

}  // namespace

SubgroupRecord Group::whole() const {
  if (!tabulated()) {
    SubgroupRecord r;
    r.gens = gens_;
    r.order = order();
    r.fp.order = r.order;
    r.fp.orbit_lengths = orbit_lengths(degree_, gens_);
    return r;
  }
  const auto& T = table();
  std::vector<Idx> all(T.size());
  std::iota(all.begin(), all.end(), Idx{0});
  ElemSet in(T.size());
  in.set();
  return make_record(*this, gens_, std::move(all), std::move(in));
}

SubgroupRecord Group::subgroup(const std::vector<Perm>& gens) const {
  if (!tabulated()) {
    for (const auto& g : gens)
      if (!member(g)) throw NotBijection("subgroup generator outside the group");
    SubgroupRecord r;
    r.gens = gens;
    r.order = StabChain(degree_, gens).order();
    r.fp.order = r.order;
    r.fp.orbit_lengths = orbit_lengths(degree_, gens);
    return r;
  }
  std::vector<Idx> gi;
  for (const auto& g : gens) gi.push_back(table().index_of(g));
  return subgroup_from_indices(gi);
}

SubgroupRecord Group::subgroup_from_indices(const std::vector<std::uint32_t>& gi) const {
  const auto& T = table();
  ElemSet in(T.size());
  in.set(0);
  std::vector<Idx> cur{0}, used;
  for (Idx g : gi) {
    if (in.test(g)) continue;
    cur = dimino(cur, used, g, in);
    used.push_back(g);
  }
  std::vector<Perm> gens;
  for (Idx g : gi) gens.push_back(T.perm(g));
  return make_record(*this, std::move(gens), std::move(cur), std::move(in));
}

SubgroupRecord Group::subgroup_from_elements(const std::vector<std::uint32_t>& elems) const {
  return record_from_elements(*this, elems);
}

ElemSet Group::elements_of(const SubgroupRecord& H) const {
  if (H.elements) return *H.elements;
  return *subgroup(H.gens).elements;
}

SubgroupRecord Group::closure(const SubgroupRecord& H, const Perm& g) const {
  if (!tabulated()) {
    auto gens = H.gens;
    gens.push_back(g);
    return subgroup(gens);
  }
  const auto& T = table();
  Idx gi = T.index_of(g);
  ElemSet in = elements_of(H);
  if (in.test(gi)) return H;
  std::vector<Idx> list = H.element_list;
  if (list.empty())
    for (auto i = in.find_first(); i != ElemSet::npos; i = in.find_next(i)) list.push_back(static_cast<Idx>(i));
  std::vector<Idx> hg;
  for (const auto& p : H.gens) hg.push_back(T.index_of(p));
  auto elems = dimino(list, hg, gi, in);
  auto gens = H.gens;
  gens.push_back(g);
  return make_record(*this, std::move(gens), std::move(elems), std::move(in));
}

SubgroupRecord Group::centralizer(const Perm& x) const {
  if (tabulated()) {
    const auto& T = table();
    Idx xi = T.index_of(x);
    std::vector<Idx> c;
    for (Idx g = 0; g < T.size(); ++g)
      if (T.mul(xi, g) == T.mul(g, xi)) c.push_back(g);
    return record_from_elements(*this, c);
  }
  // Orbit-stabilizer on the conjugation action with random Schreier generators.
  if (!member(x)) throw NotBijection("element outside the group");
  std::unordered_map<Perm, std::uint32_t, PermHash> pos;
  std::vector<Perm> orb{x};
  std::vector<std::pair<std::uint32_t, std::uint32_t>> parent{{0, 0}};
  pos.emplace(x, 0);
  for (std::size_t k = 0; k < orb.size(); ++k) {
    for (std::uint32_t s = 0; s < gens_.size(); ++s) {
      Perm y = conjugate(orb[k], gens_[s]);
      if (pos.count(y)) continue;
      if (orb.size() >= 1000000) throw TooLarge("conjugacy class too large for the centralizer search");
      pos.emplace(y, static_cast<std::uint32_t>(orb.size()));
      orb.push_back(std::move(y));
      parent.emplace_back(static_cast<std::uint32_t>(k), s);
    }
  }
  auto word = [&](std::uint32_t i) {
    Perm t = Perm::identity(degree_);
    while (i != 0) {
      t = gens_[parent[i].second] * t;
      i = parent[i].first;
    }
    return t;
  };
  u64 target = order() / orb.size();
  std::vector<Perm> cg;
  std::mt19937_64 rng(0x5eed);
  for (u64 tries = 0; StabChain(degree_, cg).order() != target; ++tries) {
    if (tries > 4096) throw NotFoundWithinCap("centralizer generators not found");
    std::uint32_t i = static_cast<std::uint32_t>(rng() % orb.size());
    std::uint32_t s = static_cast<std::uint32_t>(rng() % gens_.size());
    Perm h = word(i) * gens_[s];
    Perm j = word(pos.at(conjugate(orb[i], gens_[s])));
    Perm z = h * j.inverse();
    if (!z.is_identity()) cg.push_back(z);
  }
  SubgroupRecord r;
  r.gens = cg;
  r.order = target;
  r.fp.order = target;
  r.fp.orbit_lengths = orbit_lengths(degree_, cg);
  return r;
}

SubgroupRecord Group::normalizer(const SubgroupRecord& H) const {
  const auto& T = table();
  ElemSet in = elements_of(H);
  std::vector<Idx> hg;
  for (const auto& p : H.gens) hg.push_back(T.index_of(p));
  std::vector<Idx> n;
  for (Idx g = 0; g < T.size(); ++g) {
    bool ok = true;
    for (Idx h : hg)
      if (!in.test(T.conj(h, g))) {
        ok = false;
        break;
      }
    if (ok) n.push_back(g);
  }
  return record_from_elements(*this, n);
}

// ---- conjugacy ----

ConjResult Group::conj_test(const Perm& x, const Perm& y, u64 budget) const {
  ConjResult res;
  if (x.cycle_type() != y.cycle_type()) {
    res.verdict = ConjVerdict::NotConjugate;
    return res;
  }
  if (origin_ && origin_->action == MatAction::Vectors && charpoly(to_matrix(x)) != charpoly(to_matrix(y))) {
    res.verdict = ConjVerdict::NotConjugate;
    return res;
  }
  auto rebuild = [&](auto&& parent_of, auto key) {
    Perm w = Perm::identity(degree_);
    while (true) {
      auto [prev, s] = parent_of(key);
      if (s < 0) break;
      w = gens_[static_cast<std::size_t>(s)] * w;
      key = prev;
    }
    return w;
  };
  if (tabulated()) {
    const auto& T = table();
    auto xi = T.find(x), yi = T.find(y);
    if (!xi || !yi) {
      res.verdict = ConjVerdict::NotConjugate;
      return res;
    }
    if (class_index_of(*xi) != class_index_of(*yi)) {
      res.verdict = ConjVerdict::NotConjugate;
      return res;
    }
    std::vector<Idx> gi;
    for (const auto& g : gens_) gi.push_back(T.index_of(g));
    std::unordered_map<Idx, std::pair<Idx, int>> par;
    par.emplace(*xi, std::make_pair(*xi, -1));
    std::deque<Idx> qu{*xi};
    while (!qu.empty() && !par.count(*yi)) {
      Idx c = qu.front();
      qu.pop_front();
      for (std::size_t s = 0; s < gi.size(); ++s) {
        Idx d = T.conj(c, gi[s]);
        if (par.emplace(d, std::make_pair(c, static_cast<int>(s))).second) qu.push_back(d);
      }
    }
    res.verdict = ConjVerdict::Conjugate;
    res.witness = rebuild([&](Idx k) { return par.at(k); }, *yi);
    return res;
  }
  if (x.order() != y.order()) {
    res.verdict = ConjVerdict::NotConjugate;
    return res;
  }
  std::unordered_map<Perm, std::pair<Perm, int>, PermHash> par;
  par.emplace(x, std::make_pair(x, -1));
  std::deque<Perm> qu{x};
  bool found = x == y;
  while (!qu.empty() && !found) {
    if (par.size() > budget) {
      res.verdict = ConjVerdict::Inconclusive;
      return res;
    }
    Perm c = qu.front();
    qu.pop_front();
    for (std::size_t s = 0; s < gens_.size() && !found; ++s) {
      Perm d = conjugate(c, gens_[s]);
      if (par.emplace(d, std::make_pair(c, static_cast<int>(s))).second) {
        found = d == y;
        qu.push_back(std::move(d));
      }
    }
  }
  if (!found) {
    res.verdict = ConjVerdict::NotConjugate;
    return res;
  }
  res.verdict = ConjVerdict::Conjugate;
  res.witness = rebuild([&](const Perm& k) { return par.at(k); }, y);
  return res;
}

// ---- overgroups ----

OvergroupPoset Group::overgroups(const Perm& s, std::size_t max_groups) const {
  if (s.is_identity()) throw IdentityElement("overgroups of the identity are not supported");
  const auto& T = table();
  Idx si = T.index_of(s);
  std::vector<Idx> cand;
  for (Idx g = 1; g < T.size(); ++g) {
    auto f = factorize(T.order(g));
    if (f.size() == 1) cand.push_back(g);
  }
  OvergroupPoset out;
  std::map<std::pair<u64, Fingerprint>, std::vector<std::size_t>> seen;
  auto intern = [&](SubgroupRecord&& r) -> bool {
    auto key = std::make_pair(r.order, r.fp);
    auto& bucket = seen[key];
    for (std::size_t i : bucket)
      if (*out.groups[i].elements == *r.elements) return false;
    bucket.push_back(out.groups.size());
    out.groups.push_back(std::move(r));
    if (out.groups.size() > max_groups) throw BudgetExceeded("more than " + std::to_string(max_groups) + " overgroups");
    return true;
  };
  intern(subgroup_from_indices({si}));
  ElemSet done(T.size());
  for (std::size_t at = 0; at < out.groups.size(); ++at) {
    if (out.groups[at].order == T.size()) continue;
    const SubgroupRecord H = out.groups[at];
    std::vector<Idx> hg;
    for (const auto& p : H.gens) hg.push_back(T.index_of(p));
    done = *H.elements;
    // <H,g> = <H,hgh'> = <H,g^k> for h,h' in H and k prime to |g|.
    for (Idx g : cand) {
      if (done.test(g)) continue;
      std::vector<Idx> stack;
      auto mark = [&](Idx e) {
        if (!done.test(e)) {
          done.set(e);
          stack.push_back(e);
        }
      };
      Idx o = T.order(g);
      for (Idx k = 1; k < o; ++k)
        if (std::gcd(k, o) == 1) mark(T.pow(g, k));
      while (!stack.empty()) {
        Idx e = stack.back();
        stack.pop_back();
        for (Idx h : hg) {
          mark(T.mul(h, e));
          mark(T.mul(e, h));
        }
      }
      intern(closure(H, T.perm(g)));
    }
  }
  std::vector<std::size_t> idx(out.groups.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& A = out.groups[a];
    const auto& B = out.groups[b];
    if (A.order != B.order) return A.order < B.order;
    if (A.fp != B.fp) return A.fp < B.fp;
    return A.element_list < B.element_list;
  });
  std::vector<SubgroupRecord> sorted;
  for (auto i : idx) sorted.push_back(std::move(out.groups[i]));
  out.groups = std::move(sorted);
  for (std::size_t i = 0; i < out.groups.size(); ++i) {
    const auto& M = out.groups[i];
    if (M.order == T.size()) {
      out.groups[i].is_maximal = false;
      continue;
    }
    bool maximal = true;
    for (std::size_t j = i + 1; j < out.groups.size() && maximal; ++j) {
      const auto& K = out.groups[j];
      if (K.order == T.size() || K.order == M.order || K.order % M.order) continue;
      if (M.elements->is_subset_of(*K.elements)) maximal = false;
    }
    out.groups[i].is_maximal = maximal;
    if (maximal) out.maximal.push_back(i);
  }
  return out;
}

std::vector<Perm> Group::double_coset_reps(const SubgroupRecord& A, const SubgroupRecord& B) const {
  const auto& T = table();
  std::vector<Idx> ag, bg;
  for (const auto& p : A.gens) ag.push_back(T.index_of(p));
  for (const auto& p : B.gens) bg.push_back(T.index_of(p));
  ElemSet done(T.size());
  std::vector<Perm> reps;
  std::vector<Idx> stack;
  for (Idx x = 0; x < T.size(); ++x) {
    if (done.test(x)) continue;
    reps.push_back(T.perm(x));
    done.set(x);
    stack.push_back(x);
    while (!stack.empty()) {
      Idx e = stack.back();
      stack.pop_back();
      for (Idx a : ag) {
        Idx f = T.mul(a, e);
        if (!done.test(f)) {
          done.set(f);
          stack.push_back(f);
        }
      }
      for (Idx b : bg) {
        Idx f = T.mul(e, b);
        if (!done.test(f)) {
          done.set(f);
          stack.push_back(f);
        }
      }
    }
  }
  return reps;
}

}  // namespace spreadlab
