#include "spreadlab/shintani.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "spreadlab/errors.hpp"
#include "spreadlab/formspace.hpp"
#include "spreadlab/numtheory.hpp"

namespace spreadlab {

namespace {

using Raw = std::array<Fq, 9>;
constexpr u64 kCandidateCap = u64{1} << 25;

struct Arith {
  const FieldCtx& K;
  int n;

  Raw decode(std::uint64_t c) const {
    Raw r{};
    for (int i = 0; i < n * n; ++i) {
      r[static_cast<std::size_t>(i)] = Fq{static_cast<std::uint32_t>(c % K.q())};
      c /= K.q();
    }
    return r;
  }
  std::uint64_t encode(const Raw& r) const {
    std::uint64_t c = 0;
    for (int i = n * n; i-- > 0;) c = c * K.q() + r[static_cast<std::size_t>(i)].v;
    return c;
  }
  Raw mul(const Raw& a, const Raw& b) const {
    Raw r{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Fq s{0};
        for (int t = 0; t < n; ++t) s = K.add(s, K.mul(a[i * n + t], b[t * n + j]));
        r[i * n + j] = s;
      }
    return r;
  }
  Raw transpose(const Raw& a) const {
    Raw r{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r[i * n + j] = a[j * n + i];
    return r;
  }
  Raw frob(const Raw& a, unsigned t) const {
    Raw r{};
    for (int i = 0; i < n * n; ++i) r[i] = K.frob(a[i], t);
    return r;
  }
  Fq det(const Raw& a) const {
    switch (n) {
      case 1: return a[0];
      case 2: return K.sub(K.mul(a[0], a[3]), K.mul(a[1], a[2]));
      default: {
        auto m = [&](int i, int j) { return a[i * 3 + j]; };
        Fq d = K.mul(m(0, 0), K.sub(K.mul(m(1, 1), m(2, 2)), K.mul(m(1, 2), m(2, 1))));
        d = K.sub(d, K.mul(m(0, 1), K.sub(K.mul(m(1, 0), m(2, 2)), K.mul(m(1, 2), m(2, 0)))));
        return K.add(d, K.mul(m(0, 2), K.sub(K.mul(m(1, 0), m(2, 1)), K.mul(m(1, 1), m(2, 0)))));
      }
    }
  }
  Raw inverse(const Raw& a) const {
    Fq di = K.inv(det(a));
    Raw r{};
    if (n == 1) {
      r[0] = di;
      return r;
    }
    if (n == 2) {
      r[0] = K.mul(a[3], di);
      r[1] = K.neg(K.mul(a[1], di));
      r[2] = K.neg(K.mul(a[2], di));
      r[3] = K.mul(a[0], di);
      return r;
    }
    // adjugate
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        Fq cof = K.sub(K.mul(a[r0 * 3 + c0], a[r1 * 3 + c1]), K.mul(a[r0 * 3 + c1], a[r1 * 3 + c0]));
        r[i * 3 + j] = K.mul(cof, di);
      }
    return r;
  }
  bool is_identity(const Raw& a) const {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (a[i * n + j].v != (i == j ? 1u : 0u)) return false;
    return true;
  }
};

Raw raw_of(const Mat& m) {
  Raw r{};
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(i * m.cols() + j)] = m.at(i, j);
  return r;
}

Mat mat_of(const FieldPtr& K, int n, const Raw& r) {
  Mat m(K, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = r[static_cast<std::size_t>(i * n + j)];
  return m;
}

// Frobenius/graph data for sigma on a given ambient field.
struct Sigma {
  Arith A;
  unsigned f;      // q0 = p^f
  unsigned ratio;  // [K : F_q0]
  bool graph;
  Raw J{}, Jinv{};

  Sigma(const FieldPtr& K, int n, unsigned f_, bool graph_) : A{*K, n}, f(f_), ratio(K->k() / f_), graph(graph_) {
    if (graph) {
      Mat j = antidiag_J(K, n);
      J = raw_of(j);
      Jinv = raw_of(j.inverse());
    }
  }
  Raw gamma(const Raw& a) const { return A.mul(A.mul(Jinv, A.transpose(A.inverse(a))), J); }
  Raw apply(const Raw& a, long t) const {
    long r = static_cast<long>(ratio);
    long fp = ((t % r) + r) % r;
    Raw out = A.frob(a, static_cast<unsigned>(fp) * f);
    if (graph && (t % 2 != 0)) out = gamma(out);
    return out;
  }
};

u64 checked_count(u64 q, int n) {
  u64 c = 1;
  for (int i = 0; i < n * n; ++i) {
    c *= q;
    if (c > kCandidateCap) throw TooLarge("matrix enumeration above 2^25 candidates");
  }
  return c;
}

unsigned ambient_degree(unsigned f, int e, Twist t) {
  if (t == Twist::GraphField && e % 2 == 1) return 2 * f * static_cast<unsigned>(e);
  return f * static_cast<unsigned>(e);
}

}  // namespace

std::string twist_name(Twist t) { return t == Twist::None ? "none" : "graph_field"; }

Twist parse_twist(const std::string& s) {
  if (s == "none") return Twist::None;
  if (s == "graph_field" || s == "gu") return Twist::GraphField;
  throw ParseError("unknown twist '" + s + "'");
}

Mat ShintaniInstance::to_mat(std::uint64_t c) const {
  Arith A{*field, n};
  return mat_of(field, n, A.decode(c));
}

std::uint64_t ShintaniInstance::code(const Mat& m) const { return Arith{*field, n}.encode(raw_of(m)); }

std::uint64_t ShintaniInstance::mul(std::uint64_t a, std::uint64_t b) const {
  Arith A{*field, n};
  return A.encode(A.mul(A.decode(a), A.decode(b)));
}

std::uint64_t ShintaniInstance::inv(std::uint64_t a) const {
  Arith A{*field, n};
  return A.encode(A.inverse(A.decode(a)));
}

std::uint64_t ShintaniInstance::sigma(std::uint64_t a, int times) const {
  Sigma S(field, n, f_, twist == Twist::GraphField);
  return S.A.encode(S.apply(S.A.decode(a), times));
}

std::optional<std::size_t> ShintaniInstance::big_index(std::uint64_t c) const {
  auto it = big_pos_.find(c);
  if (it == big_pos_.end()) return std::nullopt;
  return it->second;
}

std::size_t ShintaniInstance::coset_class_of(std::uint64_t g) const {
  auto i = big_index(g);
  if (!i) throw NotBijection("matrix outside X_{sigma^e}");
  return coset_of_[*i];
}

std::size_t ShintaniInstance::small_class_of(std::uint64_t x) const {
  auto it = small_pos_.find(x);
  if (it == small_pos_.end()) throw NotBijection("matrix outside X_sigma");
  return small_of_[it->second];
}

ShintaniPtr build_instance(int n, u64 q0, int e, Twist twist) {
  if (n < 1 || n > 3) throw IncompatibleKind("instances have dimension 1..3");
  if (e < 1) throw HypothesisViolation("e must be positive");
  auto fac = factorize(q0);
  if (fac.size() != 1) throw HypothesisViolation("q0 must be a prime power");
  auto [p, f] = *fac.begin();
  auto inst = std::make_shared<ShintaniInstance>();
  inst->n = n;
  inst->q0 = q0;
  inst->e = e;
  inst->twist = twist;
  inst->f_ = static_cast<unsigned>(f);
  inst->field = FieldCtx::make(static_cast<std::uint32_t>(p), ambient_degree(inst->f_, e, twist));
  const FieldCtx& K = *inst->field;
  Sigma S(inst->field, n, inst->f_, twist == Twist::GraphField);
  const Arith& A = S.A;
  u64 total = checked_count(K.q(), n);

  // X_{sigma^e}: invertible matrices fixed by sigma^e. For the graph twist with e odd,
  // sigma^e(g) = g reads phi(g)^T J g = J with phi = x -> x^(q0^e).
  bool unitary_big = twist == Twist::GraphField && e % 2 == 1;
  unsigned fe = inst->f_ * static_cast<unsigned>(e);
  for (u64 c = 0; c < total; ++c) {
    Raw r = A.decode(c);
    if (A.det(r).v == 0) continue;
    if (unitary_big && A.mul(A.mul(A.transpose(A.frob(r, fe)), S.J), r) != S.J) continue;
    if (inst->big.size() >= ShintaniInstance::kOrderCap) throw TooLarge("|X_{sigma^e}| above 5*10^5");
    inst->big.push_back(c);
  }
  std::size_t N = inst->big.size();
  std::vector<Raw> el(N), einv(N), esinv(N);
  for (std::size_t i = 0; i < N; ++i) {
    inst->big_pos_.emplace(inst->big[i], static_cast<std::uint32_t>(i));
    el[i] = A.decode(inst->big[i]);
  }
  for (std::size_t i = 0; i < N; ++i) {
    einv[i] = A.inverse(el[i]);
    esinv[i] = S.apply(el[i], -1);
    if (S.apply(el[i], e) != el[i]) throw std::logic_error("sigma^e does not fix X_{sigma^e}");
  }
  // sigma~ has order exactly e on X_{sigma^e}.
  for (int d = 1; d < e; ++d) {
    if (e % d) continue;
    bool moved = false;
    for (std::size_t i = 0; i < N && !moved; ++i) moved = S.apply(el[i], d) != el[i];
    if (!moved) throw std::logic_error("sigma~ has order below e");
  }
  for (std::size_t i = 0; i < N; ++i)
    if (S.apply(el[i], 1) == el[i]) inst->small.push_back(inst->big[i]);
  for (std::size_t i = 0; i < inst->small.size(); ++i) inst->small_pos_.emplace(inst->small[i], static_cast<std::uint32_t>(i));

  // Coset classes: orbits of g -> h^-1 g sigma^-1(h).
  const std::uint32_t none = ~0u;
  inst->coset_of_.assign(N, none);
  for (std::size_t gi = 0; gi < N; ++gi) {
    if (inst->coset_of_[gi] != none) continue;
    auto cls = static_cast<std::uint32_t>(inst->coset_classes.size());
    u64 size = 0;
    for (std::size_t h = 0; h < N; ++h) {
      auto y = inst->big_pos_.at(A.encode(A.mul(A.mul(einv[h], el[gi]), esinv[h])));
      if (inst->coset_of_[y] == none) {
        inst->coset_of_[y] = cls;
        ++size;
      }
    }
    inst->coset_classes.push_back({inst->big[gi], size, N / size});
  }
  // Classes of X_sigma under ordinary conjugation.
  std::size_t M = inst->small.size();
  std::vector<Raw> sl(M), sinv(M);
  for (std::size_t i = 0; i < M; ++i) {
    sl[i] = A.decode(inst->small[i]);
    sinv[i] = A.inverse(sl[i]);
  }
  inst->small_of_.assign(M, none);
  for (std::size_t xi = 0; xi < M; ++xi) {
    if (inst->small_of_[xi] != none) continue;
    auto cls = static_cast<std::uint32_t>(inst->small_classes.size());
    u64 size = 0;
    for (std::size_t h = 0; h < M; ++h) {
      auto y = inst->small_pos_.at(A.encode(A.mul(A.mul(sinv[h], sl[xi]), sl[h])));
      if (inst->small_of_[y] == none) {
        inst->small_of_[y] = cls;
        ++size;
      }
    }
    inst->small_classes.push_back({inst->small[xi], size, M / size});
  }
  return inst;
}

std::uint64_t twisted_norm(const ShintaniInstance& inst, std::uint64_t g) {
  std::uint64_t acc = g;
  for (int i = 1; i < inst.e; ++i) acc = inst.mul(acc, inst.sigma(g, -i));
  return acc;
}

std::string similarity_signature(const Mat& a) {
  std::ostringstream os;
  int n = a.rows();
  for (const auto& [f, m] : poly_factor(charpoly(a))) {
    // f(A) by Horner
    Mat fa(a.field(), n, n);
    for (int i = f.degree(); i >= 0; --i)
      fa = fa * a + Mat::identity(a.field(), n).scaled(f.coeff(static_cast<unsigned>(i)));
    os << "[" << f.to_string() << ":";
    Mat pw = fa;
    for (int j = 1; j <= m; ++j) {
      os << (j > 1 ? "," : "") << pw.rank();
      pw = pw * fa;
    }
    os << "]";
  }
  return os.str();
}

ShintaniMatch shintani_map(const ShintaniInstance& inst, std::size_t coset_class) {
  const auto& cc = inst.coset_classes.at(coset_class);
  Mat N = inst.to_mat(twisted_norm(inst, cc.rep));
  std::string sig = similarity_signature(N);
  std::vector<std::size_t> hit;
  for (std::size_t c = 0; c < inst.small_classes.size(); ++c)
    if (similarity_signature(inst.to_mat(inst.small_classes[c].rep)) == sig) hit.push_back(c);
  if (hit.size() == 1) return {hit[0], "invariant-factors"};
  // Fallback: characteristic polynomial with centralizer order.
  Poly cp = charpoly(N);
  std::vector<std::size_t> pair;
  for (std::size_t c = 0; c < inst.small_classes.size(); ++c)
    if (inst.small_classes[c].centralizer == cc.centralizer && charpoly(inst.to_mat(inst.small_classes[c].rep)) == cp)
      pair.push_back(c);
  if (pair.size() == 1) return {pair[0], "charpoly+centralizer"};
  throw AmbiguousMatch("coset class " + std::to_string(coset_class) + " matches " + std::to_string(pair.size()) +
                       " small classes by (charpoly, centralizer)");
}

DescentReport verify_descent(const ShintaniInstance& inst) {
  DescentReport rep;
  Arith A{*inst.field, inst.n};
  Sigma S(inst.field, inst.n, inst.field_f(), inst.twist == Twist::GraphField);
  std::size_t N = inst.big.size();
  std::vector<Raw> el(N), sinv(N);
  for (std::size_t i = 0; i < N; ++i) {
    el[i] = A.decode(inst.big[i]);
    sinv[i] = S.apply(el[i], -1);
  }
  if (inst.coset_classes.size() != inst.small_classes.size())
    rep.violations.push_back("class counts differ: " + std::to_string(inst.coset_classes.size()) + " coset classes, " +
                             std::to_string(inst.small_classes.size()) + " small classes");
  std::set<std::size_t> image;
  u64 index = inst.big.size() / inst.small.size();
  for (std::size_t c = 0; c < inst.coset_classes.size(); ++c) {
    const auto& cc = inst.coset_classes[c];
    DescentRow row;
    row.coset_class = c;
    row.big_centralizer = cc.centralizer;
    Mat Nm = inst.to_mat(twisted_norm(inst, cc.rep));
    row.charpoly = charpoly(Nm).pretty();
    row.charpoly.erase(std::remove(row.charpoly.begin(), row.charpoly.end(), ' '), row.charpoly.end());
    // Centralizer of g sigma~ in the extension: (h sigma~^i) commutes iff h sigma^-i(g) = g sigma^-1(h).
    Raw g = A.decode(cc.rep);
    u64 ext = 0;
    for (int i = 0; i < inst.e; ++i) {
      Raw gi = S.apply(g, -i);
      for (std::size_t h = 0; h < N; ++h)
        if (A.mul(el[h], gi) == A.mul(g, sinv[h])) ++ext;
    }
    row.ext_centralizer = ext;
    bool ok = true;
    try {
      auto m = shintani_map(inst, c);
      row.small_class = m.small_class;
      row.method = m.method;
      const auto& sc = inst.small_classes[m.small_class];
      row.small_centralizer = sc.centralizer;
      if (!image.insert(m.small_class).second) {
        rep.violations.push_back("class " + std::to_string(c) + ": small class " + std::to_string(m.small_class) + " hit twice");
        ok = false;
      }
      if (sc.centralizer != cc.centralizer) {
        rep.violations.push_back("class " + std::to_string(c) + ": centralizer " + std::to_string(cc.centralizer) +
                                 " vs " + std::to_string(sc.centralizer));
        ok = false;
      }
      if (cc.size != sc.size * index) {
        rep.violations.push_back("class " + std::to_string(c) + ": class size " + std::to_string(cc.size) + " vs " +
                                 std::to_string(sc.size) + " * " + std::to_string(index));
        ok = false;
      }
    } catch (const AmbiguousMatch& ex) {
      rep.violations.push_back(ex.what());
      ok = false;
    }
    if (ext != static_cast<u64>(inst.e) * cc.centralizer) {
      rep.violations.push_back("class " + std::to_string(c) + ": extension centralizer " + std::to_string(ext) +
                               " is not e * " + std::to_string(cc.centralizer));
      ok = false;
    }
    row.passed = ok;
    rep.rows.push_back(std::move(row));
  }
  if (image.size() != inst.small_classes.size() && rep.violations.empty())
    rep.violations.push_back("correspondence is not onto");
  return rep;
}

std::string DescentReport::to_text() const {
  std::ostringstream os;
  os << "coset_class charpoly(N) |C_big| matched_small_class |C_small| checks_passed\n";
  for (const auto& r : rows)
    os << r.coset_class << " " << r.charpoly << " " << r.big_centralizer << " "
       << (r.small_class ? std::to_string(*r.small_class) : "-") << " " << r.small_centralizer << " "
       << (r.passed ? "yes" : "no") << "\n";
  for (const auto& v : violations) os << "violation: " << v << "\n";
  return os.str();
}

PowersReport verify_powers(const ShintaniInstance& inst, int d) {
  if (d <= 1) throw HypothesisViolation("d must exceed 1");
  PowersReport rep;
  Twist td = (inst.twist == Twist::GraphField && d % 2 == 1) ? Twist::GraphField : Twist::None;
  u64 qd = 1;
  for (int i = 0; i < d; ++i) qd *= inst.q0;
  // (g sigma~)^d = y sigma~^d
  auto power_part = [&](std::uint64_t g) {
    std::uint64_t acc = g;
    for (int i = 1; i < d; ++i) acc = inst.mul(acc, inst.sigma(g, -i));
    return acc;
  };
  std::vector<std::size_t> F(inst.coset_classes.size());
  for (std::size_t c = 0; c < F.size(); ++c) F[c] = shintani_map(inst, c).small_class;

  if (d < inst.e && inst.e % d == 0) {
    auto B = build_instance(inst.n, qd, inst.e / d, td);
    if (B->field != inst.field) throw std::logic_error("restriction instance uses a different ambient field");
    for (std::size_t c = 0; c < F.size(); ++c) {
      std::uint64_t y = power_part(inst.coset_classes[c].rep);
      std::size_t got = shintani_map(*B, B->coset_class_of(y)).small_class;
      std::size_t want = B->small_class_of(inst.small_classes[F[c]].rep);
      if (got != want)
        rep.violations.push_back("restriction: class " + std::to_string(c) + " maps to " + std::to_string(got) +
                                 " instead of " + std::to_string(want));
    }
    rep.checked_restriction = true;
  }
  try {
    auto C = build_instance(inst.n, qd, inst.e, td);
    Embedding emb(inst.field, C->field);
    auto up = [&](std::uint64_t code) { return C->code(map_entries(inst.to_mat(code), emb)); };
    for (std::size_t c = 0; c < F.size(); ++c) {
      std::uint64_t y = up(power_part(inst.coset_classes[c].rep));
      std::size_t got = shintani_map(*C, C->coset_class_of(y)).small_class;
      std::uint64_t x = inst.small_classes[F[c]].rep;
      std::uint64_t xd = x;
      for (int i = 1; i < d; ++i) xd = inst.mul(xd, x);
      std::size_t want = C->small_class_of(up(xd));
      if (got != want)
        rep.violations.push_back("power map: class " + std::to_string(c) + " maps to " + std::to_string(got) +
                                 " instead of " + std::to_string(want));
    }
    rep.checked_power_map = true;
  } catch (const TooLarge& ex) {
    if (!rep.checked_restriction) throw;
    rep.notes.push_back(std::string("power map instance skipped: ") + ex.what());
  }
  return rep;
}

FixReport verify_fix_counts(const ShintaniInstance& inst, int k) {
  if (inst.twist != Twist::None) throw IncompatibleKind("fixed k-space counts are implemented for untwisted instances");
  if (k < 0 || k > inst.n) throw HypothesisViolation("k must lie in 0..n");
  FixReport rep;
  rep.k = k;
  auto fac = factorize(inst.q0);
  auto small_field = FieldCtx::make(static_cast<std::uint32_t>(fac.begin()->first), static_cast<unsigned>(fac.begin()->second));
  Embedding emb(small_field, inst.field);
  auto bigU = all_subspaces(inst.field, inst.n, k);
  auto smallU = all_subspaces(small_field, inst.n, k);
  for (std::size_t c = 0; c < inst.coset_classes.size(); ++c) {
    FixRow row;
    row.coset_class = c;
    // (Y h)(g sigma~) = Y sigma(h) sigma(g): U -> sigma(U) sigma(g)
    Mat sg = inst.to_mat(inst.sigma(inst.coset_classes[c].rep, 1));
    for (const auto& U : bigU)
      if (k == 0 || span_rref(U.frob(inst.field_f()) * sg) == U) ++row.big_fix;
    Mat x = map_entries_down(inst.to_mat(inst.small_classes[shintani_map(inst, c).small_class].rep), emb);
    for (const auto& U : smallU)
      if (subspace_invariant(U, x)) ++row.small_fix;
    if (row.big_fix != row.small_fix)
      rep.violations.push_back("class " + std::to_string(c) + ": " + std::to_string(row.big_fix) + " fixed " +
                               std::to_string(k) + "-spaces vs " + std::to_string(row.small_fix));
    rep.rows.push_back(row);
  }
  return rep;
}

LangWitness solve_lang(const ShintaniInstance& inst, std::uint64_t g, int cap) {
  if (!inst.big_index(g)) throw NotBijection("g is not in X_{sigma^e}");
  const FieldCtx& K0 = *inst.field;
  Mat gm = inst.to_mat(g);
  std::uint64_t Nc = twisted_norm(inst, g);
  for (int c = 1; c <= cap; ++c) {
    auto K = FieldCtx::make(K0.p(), K0.k() * static_cast<unsigned>(c));
    Embedding emb(inst.field, K);
    Sigma S(K, inst.n, inst.field_f(), inst.twist == Twist::GraphField);
    const Arith& A = S.A;
    u64 total;
    try {
      total = checked_count(K->q(), inst.n);
    } catch (const TooLarge&) {
      break;
    }
    Raw target = raw_of(map_entries(gm, emb));
    Raw Nbig = raw_of(map_entries(inst.to_mat(Nc), emb));
    // identity first, then ascending codes
    Raw id{};
    for (int i = 0; i < inst.n; ++i) id[static_cast<std::size_t>(i * inst.n + i)] = K->one();
    u64 idc = A.encode(id);
    for (u64 t = 0; t <= total; ++t) {
      u64 code = t == 0 ? idc : t - 1;
      if (t > 0 && code == idc) continue;
      if (code >= total) break;
      Raw a = A.decode(code);
      if (A.det(a).v == 0) continue;
      if (A.mul(a, A.inverse(S.apply(a, -1))) != target) continue;
      Raw x = A.mul(A.mul(A.inverse(a), Nbig), a);
      // x must lie in X_sigma, hence over the ambient field of the instance
      if (S.apply(x, 1) != x) throw std::logic_error("descended element is not sigma-fixed");
      Mat xm = map_entries_down(mat_of(K, inst.n, x), emb);
      LangWitness w;
      w.a = mat_of(K, inst.n, a);
      w.c = c;
      w.descended = xm;
      w.small_class = inst.small_class_of(inst.code(xm));
      if (w.small_class != shintani_map(inst, inst.coset_class_of(g)).small_class)
        throw std::logic_error("descended element disagrees with the correspondence");
      return w;
    }
  }
  throw NotFoundWithinCap("no solution of a sigma^-1(a)^-1 = g found up to extension degree " + std::to_string(cap));
}

SemidirectGroup semidirect_group(const ShintaniInstance& inst) {
  std::size_t N = inst.big.size();
  u64 deg = N * static_cast<u64>(inst.e);
  if (deg > 65536) throw TooLarge("regular representation above 65536 points");
  SemidirectGroup out;
  out.inst = &inst;
  std::vector<Perm> gens{out.element(inst.big[0], 1 % inst.e)};
  // Keep elements of X_{sigma^e}, in code order, that enlarge the group.
  StabChain ch(deg, gens);
  for (std::size_t i = 1; i < N && ch.order() < deg; ++i) {
    Perm g = out.element(inst.big[i], 0);
    if (ch.contains(g)) continue;
    gens.push_back(std::move(g));
    ch = StabChain(deg, gens);
  }
  out.group = Group::from_perms(deg, gens);
  return out;
}

Perm SemidirectGroup::element(std::uint64_t g, int i) const {
  // (h sigma~^j)(g sigma~^i) = h sigma^-j(g) sigma~^(i+j)
  const auto& I = *inst;
  std::size_t N = I.big.size();
  int e = I.e;
  std::vector<std::uint64_t> gj(static_cast<std::size_t>(e));
  for (int j = 0; j < e; ++j) gj[static_cast<std::size_t>(j)] = I.sigma(g, -j);
  std::vector<Point> img(N * static_cast<std::size_t>(e));
  for (std::size_t h = 0; h < N; ++h)
    for (int j = 0; j < e; ++j) {
      auto prod = *I.big_index(I.mul(I.big[h], gj[static_cast<std::size_t>(j)]));
      img[h * static_cast<std::size_t>(e) + static_cast<std::size_t>(j)] =
          static_cast<Point>(prod * static_cast<std::size_t>(e) + static_cast<std::size_t>((i + j) % e));
    }
  return Perm(std::move(img));
}

}  // namespace spreadlab
