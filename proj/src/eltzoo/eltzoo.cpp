#include "spreadlab/eltzoo.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "spreadlab/errors.hpp"

namespace spreadlab {

namespace {

u64 upow(u64 a, unsigned b) {
  auto r = checked_pow(a, b);
  if (!r) throw TooLarge("integer power overflows");
  return *r;
}

bool is_minus_tag(EltTag t) {
  return t == EltTag::MinusType || t == EltTag::DeltaMinus || t == EltTag::SigmaMinus ||
         t == EltTag::DeltaElemMinus;
}

// g acting as x on <e_i> and y on <f_i> in the interleaved basis (e1,f1,...).
Mat plus_block(const Mat& x, const Mat& y) {
  int m = x.rows();
  Mat g(x.field(), 2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      g.at(2 * i, 2 * j) = x.at(i, j);
      g.at(2 * i + 1, 2 * j + 1) = y.at(i, j);
    }
  return g;
}

Mat poly_at(const Poly& f, const Mat& g) {
  const auto& F = g.field();
  int n = g.rows();
  Mat acc(F, n, n);
  for (int i = f.degree(); i >= 0; --i) acc = acc * g + Mat::identity(F, n).scaled(f.coeff(static_cast<unsigned>(i)));
  return acc;
}

// Least odd r in ppd(q, m).
std::optional<u64> least_odd_ppd(u64 q, unsigned m) {
  for (u64 r : ppd_set(q, m))
    if (r % 2) return r;
  return std::nullopt;
}

// Quadratic (minus type) or symplectic form on F_{q^{2m}} over F_q, invariant
// (up to norms to F_{q^m}) under multiplication.
FormedSpace trace_space(const ExtField& E, FormKind kind, int m) {
  const auto& K = E.base();
  int n = static_cast<int>(E.degree());
  u64 qm = upow(K->q(), static_cast<unsigned>(m));
  std::vector<Poly> basis;
  Poly b = E.one();
  for (int i = 0; i < n; ++i) {
    basis.push_back(b);
    b = E.mul(b, E.gen());
  }
  Mat G(K, n, n);
  if (kind == FormKind::Symplectic) {
    Poly x = E.gen();
    Poly c = x - E.pow(x, qm);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        G.at(i, j) = E.to_base(E.trace(E.mul(c, E.mul(basis[i], E.pow(basis[j], qm)))));
    return custom_space(kind, K, G);
  }
  // Q(y) = Tr_{F_{q^m}/F_q}(y^{q^m+1})
  auto Qf = [&](const Poly& y) {
    Poly z = E.pow(y, qm + 1);
    Poly acc(K), cur = z;
    for (int i = 0; i < m; ++i) {
      acc = acc + cur;
      cur = E.frob(cur);
    }
    return E.to_base(acc);
  };
  std::vector<Fq> qd;
  for (int i = 0; i < n; ++i) qd.push_back(Qf(basis[i]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        G.at(i, i) = K->add(qd[i], qd[i]);
        continue;
      }
      G.at(i, j) = K->sub(K->sub(Qf(E.reduce(basis[i] + basis[j])), qd[i]), qd[j]);
    }
  return custom_space(kind, K, G, qd);
}

Mat to_standard(const FormedSpace& sp, const Mat& g) {
  Mat B = standard_basis_in(sp);
  return B * g * B.inverse();
}

// Element of 2-power order N in E with norm to F_{q^m} equal to target.
Poly two_element_with_norm(const ExtField& E, u64 N, u64 qm, Fq target) {
  Poly nu0 = E.element_of_order(N);
  for (u64 j = 1; j < N; j += 2) {
    Poly nu = E.pow(nu0, j);
    Poly nn = E.pow(nu, qm + 1);
    if (nn.degree() <= 0 && nn.coeff(0) == target) return nu;
  }
  throw NoSuchType("no 2-element with the required norm");
}

std::string eps_str(int eps) { return eps > 0 ? "+" : "-"; }

bool totally_singular(const Mat& rows, const FormedSpace& sp) {
  for (int a = 0; a < rows.rows(); ++a) {
    if (sp.quadratic() && sp.Q(rows.row(a)).v) return false;
    for (int b = 0; b < rows.rows(); ++b)
      if (sp.form(rows.row(a), rows.row(b)).v) return false;
  }
  return true;
}

// Checks for type (2m)^eps_q on an isometry h.
void check_core(const Mat& h, const FormedSpace& sp, int eps, int m, TypeReport& rep, const std::string& who) {
  u64 q = sp.q();
  u64 ord = h.order();
  auto fac = poly_factor(charpoly(h));
  if (eps > 0) {
    if (m % 2 == 0) rep.fail(who + ": plus type needs m odd");
    auto pp = ppd_set(q, static_cast<unsigned>(m));
    if (!pp.count(ord)) rep.fail(who + ": order " + std::to_string(ord) + " not in ppd(q,m)");
    if (fac.size() != 2 || fac[0].second != 1 || fac[1].second != 1 || fac[0].first.degree() != m ||
        fac[1].first.degree() != m) {
      rep.fail(who + ": characteristic polynomial is not a product of two distinct irreducibles of degree m");
      return;
    }
    for (auto& [f, mult] : fac) {
      (void)mult;
      Mat U = poly_at(f, h).left_kernel();
      if (U.rows() != m) rep.fail(who + ": summand has the wrong dimension");
      if (!totally_singular(U, sp)) rep.fail(who + ": summand is not totally singular");
    }
    return;
  }
  if (fac.size() != 1 || fac[0].second != 1 || fac[0].first.degree() != 2 * m)
    rep.fail(who + ": not irreducible on V");
  auto pp = ppd_set(q, static_cast<unsigned>(2 * m));
  bool ok = pp.count(ord) > 0;
  if (!ok && is_mersenne(q) && m == 1 && ord == q + 1) ok = true;
  if (!ok && q == 2 && m == 3 && ord == 9) ok = true;
  if (!ok) rep.fail(who + ": order " + std::to_string(ord) + " not in ppd(q,2m) and not exceptional");
}

}  // namespace

bool is_mersenne(u64 q) { return q >= 3 && is_power_of_two(q + 1) && is_prime(q); }

std::string tag_name(EltTag t) {
  switch (t) {
    case EltTag::PlusType: return "(2m)+";
    case EltTag::MinusType: return "(2m)-";
    case EltTag::DeltaPlus: return "D(2m)+";
    case EltTag::DeltaMinus: return "D(2m)-";
    case EltTag::SigmaPlus: return "S(2m)+";
    case EltTag::SigmaMinus: return "S(2m)-";
    case EltTag::UnitaryMinus: return "[n]-";
    case EltTag::UnitaryPlus: return "[n]+";
    case EltTag::Refl: return "refl";
    case EltTag::DeltaRefl: return "Drefl";
    case EltTag::DeltaElemPlus: return "delta+";
    case EltTag::DeltaElemMinus: return "delta-";
    case EltTag::DeltaElemU: return "deltaU";
  }
  return "?";
}

EltTag parse_tag(const std::string& raw) {
  std::string s;
  for (size_t i = 0; i < raw.size();) {
    // Δ = CE 94, Σ = CE A3, − = E2 88 92
    if (raw.compare(i, 2, "\xCE\x94") == 0) {
      s += 'D';
      i += 2;
    } else if (raw.compare(i, 2, "\xCE\xA3") == 0) {
      s += 'S';
      i += 2;
    } else if (raw.compare(i, 3, "\xE2\x88\x92") == 0) {
      s += '-';
      i += 3;
    } else {
      s += raw[i++];
    }
  }
  static const std::map<std::string, EltTag> names = {
      {"(2m)+", EltTag::PlusType},       {"(2m)-", EltTag::MinusType},      {"D(2m)+", EltTag::DeltaPlus},
      {"D(2m)-", EltTag::DeltaMinus},    {"S(2m)+", EltTag::SigmaPlus},     {"S(2m)-", EltTag::SigmaMinus},
      {"[n]-", EltTag::UnitaryMinus},    {"[n]+", EltTag::UnitaryPlus},     {"refl", EltTag::Refl},
      {"Drefl", EltTag::DeltaRefl},      {"delta+", EltTag::DeltaElemPlus}, {"delta-", EltTag::DeltaElemMinus},
      {"deltaU", EltTag::DeltaElemU},
  };
  auto it = names.find(s);
  if (it == names.end()) throw ParseError("unknown element type '" + raw + "'");
  return it->second;
}

std::string group_name(GroupKind g) {
  switch (g) {
    case GroupKind::Sp: return "Sp";
    case GroupKind::SOPlus: return "SO+";
    case GroupKind::SOMinus: return "SO-";
    case GroupKind::GSp: return "GSp";
    case GroupKind::DOPlus: return "DO+";
    case GroupKind::DOMinus: return "DO-";
    case GroupKind::GU: return "GU";
    case GroupKind::OPlus: return "O+";
    case GroupKind::OMinus: return "O-";
    case GroupKind::GOPlus: return "GO+";
    case GroupKind::GOMinus: return "GO-";
  }
  return "?";
}

GroupKind parse_group(const std::string& s) {
  for (auto g : {GroupKind::Sp, GroupKind::SOPlus, GroupKind::SOMinus, GroupKind::GSp, GroupKind::DOPlus,
                 GroupKind::DOMinus, GroupKind::GU, GroupKind::OPlus, GroupKind::OMinus, GroupKind::GOPlus,
                 GroupKind::GOMinus})
    if (group_name(g) == s) return g;
  throw ParseError("unknown group kind '" + s + "'");
}

GroupKind default_group(EltTag t) {
  switch (t) {
    case EltTag::PlusType:
    case EltTag::SigmaPlus: return GroupKind::SOPlus;
    case EltTag::MinusType:
    case EltTag::SigmaMinus: return GroupKind::SOMinus;
    case EltTag::DeltaPlus:
    case EltTag::DeltaElemPlus: return GroupKind::DOPlus;
    case EltTag::DeltaMinus:
    case EltTag::DeltaElemMinus: return GroupKind::DOMinus;
    case EltTag::UnitaryMinus:
    case EltTag::UnitaryPlus:
    case EltTag::DeltaElemU: return GroupKind::GU;
    case EltTag::Refl: return GroupKind::OPlus;
    case EltTag::DeltaRefl: return GroupKind::GOPlus;
  }
  return GroupKind::SOPlus;
}

std::string EltType::to_string() const {
  std::string t = tag_name(tag);
  std::string par = std::to_string(tag == EltTag::UnitaryMinus || tag == EltTag::UnitaryPlus ||
                                           tag == EltTag::DeltaElemU
                                       ? m
                                       : 2 * m);
  auto pos = t.find("2m");
  if (pos != std::string::npos) t.replace(pos, 2, par);
  pos = t.find('n');
  if (t[0] == '[' && pos != std::string::npos) t.replace(pos, 1, par);
  if (tag == EltTag::DeltaElemPlus || tag == EltTag::DeltaElemMinus || tag == EltTag::DeltaElemU) t += "(" + par + ")";
  return t + "_" + std::to_string(ctx->q()) + " in " + group_name(group);
}

EltType elt_type(EltTag tag, int m, const FieldPtr& ctx) { return elt_type(tag, m, ctx, default_group(tag)); }

EltType elt_type(EltTag tag, int m, const FieldPtr& ctx, GroupKind group) {
  using G = GroupKind;
  std::vector<G> ok;
  switch (tag) {
    case EltTag::PlusType: ok = {G::Sp, G::SOPlus}; break;
    case EltTag::MinusType: ok = {G::Sp, G::SOMinus}; break;
    case EltTag::DeltaPlus: ok = {G::GSp, G::DOPlus}; break;
    case EltTag::DeltaMinus: ok = {G::GSp, G::DOMinus}; break;
    case EltTag::SigmaPlus: ok = {G::SOPlus}; break;
    case EltTag::SigmaMinus: ok = {G::SOMinus}; break;
    case EltTag::UnitaryMinus:
    case EltTag::UnitaryPlus:
    case EltTag::DeltaElemU: ok = {G::GU}; break;
    case EltTag::Refl: ok = {G::OPlus, G::OMinus}; break;
    case EltTag::DeltaRefl: ok = {G::GOPlus, G::GOMinus}; break;
    case EltTag::DeltaElemPlus: ok = {G::DOPlus, G::GSp}; break;
    case EltTag::DeltaElemMinus: ok = {G::DOMinus}; break;
  }
  if (std::find(ok.begin(), ok.end(), group) == ok.end())
    throw IncompatibleKind("type " + tag_name(tag) + " does not live in " + group_name(group));
  if (m < 1) throw IncompatibleKind("block parameter must be positive");
  EltType t;
  t.tag = tag;
  t.m = (tag == EltTag::Refl || tag == EltTag::DeltaRefl) ? 1 : m;
  t.ctx = ctx;
  t.group = group;
  return t;
}

FormedSpace type_space(const EltType& t) {
  using G = GroupKind;
  int n = 2 * t.m;
  switch (t.group) {
    case G::Sp:
    case G::GSp: return standard_space(FormKind::Symplectic, n, t.ctx);
    case G::SOPlus:
    case G::DOPlus:
    case G::OPlus:
    case G::GOPlus: return standard_space(FormKind::QuadPlus, n, t.ctx);
    case G::SOMinus:
    case G::DOMinus:
    case G::OMinus:
    case G::GOMinus: return standard_space(FormKind::QuadMinus, n, t.ctx);
    case G::GU:
      if (t.tag == EltTag::DeltaElemU) return unitary_hyperbolic_space(t.m, t.ctx);
      return standard_space(FormKind::Unitary, t.m, t.ctx);
  }
  throw IncompatibleKind("unknown group kind");
}

EltWitness make_element(const EltType& t) {
  const auto& F = t.ctx;
  u64 q = F->q();
  int m = t.m;
  auto sp = type_space(t);
  bool symp = sp.kind == FormKind::Symplectic;
  EltWitness w;
  w.claimed = t;
  w.space = sp;
  auto need_odd = [&]() {
    if (!F->odd()) throw NoSuchType(tag_name(t.tag) + " needs odd q");
  };
  Mat g;
  switch (t.tag) {
    case EltTag::PlusType:
    case EltTag::DeltaPlus: {
      if (t.tag == EltTag::DeltaPlus) need_odd();
      if (m % 2 == 0) throw NoSuchType("plus types need m odd");
      auto r = least_odd_ppd(q, static_cast<unsigned>(m));
      if (!r) throw NoSuchType("ppd(q,m) has no odd member, so the summands would be isomorphic");
      ExtField E(F, static_cast<unsigned>(m));
      Poly lam = E.element_of_order(*r);
      Mat x = E.mult_matrix(lam);
      Mat y = x.inverse().transpose();
      if (t.tag == EltTag::DeltaPlus) x = x.scaled(F->beta());
      g = plus_block(x, y);
      break;
    }
    case EltTag::SigmaPlus: {
      need_odd();
      if (m % 2 == 0 || m == 1) throw NoSuchType("S(2m)+ needs m > 1 odd");
      auto r = least_odd_ppd(q, static_cast<unsigned>(m));
      if (!r) throw NoSuchType("empty ppd(q,m)");
      u64 qm1 = upow(q, m) - 1;
      u64 ord = *r * two_part(qm1);
      ExtField E(F, static_cast<unsigned>(m));
      Mat x = E.mult_matrix(E.element_of_order(ord));
      g = plus_block(x, x.inverse().transpose());
      break;
    }
    case EltTag::MinusType:
    case EltTag::DeltaMinus:
    case EltTag::SigmaMinus: {
      bool delta = t.tag == EltTag::DeltaMinus, sigma = t.tag == EltTag::SigmaMinus;
      if (delta || sigma) need_odd();
      if (sigma && m == 1) throw NoSuchType("S(2m)- needs m > 1");
      u64 qm = upow(q, m), q2m = upow(q, 2 * m);
      u64 r;
      if (is_mersenne(q) && m == 1) {
        r = (delta || sigma) ? 1 : q + 1;
      } else if (q == 2 && m == 3) {
        r = 9;
      } else {
        auto pp = ppd_set(q, static_cast<unsigned>(2 * m));
        if (pp.empty()) throw NoSuchType("empty ppd(q,2m)");
        r = *pp.begin();
      }
      ExtField E(F, static_cast<unsigned>(2 * m));
      Poly mu;
      if (delta) {
        u64 N = two_part(qm + 1) * two_part(q - 1);
        Poly lam = r == 1 ? E.one() : E.element_of_order(r);
        mu = E.mul(lam, two_element_with_norm(E, N, qm, F->beta()));
      } else if (sigma) {
        u64 ord = r * two_part(qm + 1);
        mu = E.element_of_order(ord);
      } else {
        mu = E.element_of_order(r);
      }
      auto ts = trace_space(E, symp ? FormKind::Symplectic : FormKind::QuadMinus, m);
      g = to_standard(ts, E.mult_matrix(mu));
      if (delta && is_mersenne(q) && m == 1) w.notes.push_back("boundary branch: exponent k = (q-1)_2");
      break;
    }
    case EltTag::UnitaryMinus: {
      int n = m;
      if (n < 3 || n % 2 == 0) throw NoSuchType("[n]- needs n >= 3 odd");
      auto qe = quad_ext(F);
      const auto& K = qe->ext;
      Fq alpha = unitary_alpha(*qe);
      u64 qn = upow(q, n);
      ExtField E(K, static_cast<unsigned>(n));
      Poly lam0 = E.element_of_order(qn + 1);
      Fq N0 = E.to_base(E.norm(lam0));
      std::optional<Poly> lam;
      for (u64 j = 1; j <= qn + 1 && !lam; ++j) {
        if (std::gcd(j, qn + 1) != 1) continue;
        if (K->pow(N0, j) == alpha) lam = E.pow(lam0, j);
      }
      if (!lam) throw NoSuchType("no generator with norm alpha");
      // h(x, y) = Tr(x y^{q^n}); y^{q^n} = frob^{(n-1)/2}(y^q)
      auto qpow = [&](const Poly& y) { return E.frob(E.pow(y, q), static_cast<unsigned>((n - 1) / 2)); };
      std::vector<Poly> basis;
      Poly b = E.one();
      for (int i = 0; i < n; ++i) {
        basis.push_back(b);
        b = E.mul(b, E.gen());
      }
      Mat G(K, n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G.at(i, j) = E.to_base(E.trace(E.mul(basis[i], qpow(basis[j]))));
      auto us = custom_space(FormKind::Unitary, F, G);
      g = to_standard(us, E.mult_matrix(*lam));
      break;
    }
    case EltTag::UnitaryPlus: {
      int n = m;
      if (n < 4 || n % 2) throw NoSuchType("[n]+ needs n >= 4 even");
      int half = n / 2;
      auto qe = quad_ext(F);
      const auto& K = qe->ext;
      Fq alpha = unitary_alpha(*qe);
      u64 qn1 = upow(q, n) - 1;
      ExtField E(K, static_cast<unsigned>(half));
      Poly lam0 = E.element_of_order(qn1);
      Fq N0 = E.to_base(E.norm(lam0));
      std::optional<Poly> lam;
      for (u64 j = 1; j <= qn1 && !lam; ++j) {
        if (std::gcd(j, qn1) != 1) continue;
        // mu^{1-q} = mu^{q^2-q}
        if (K->pow(K->pow(N0, j), q * q - q) == alpha) lam = E.pow(lam0, j);
      }
      if (!lam) throw NoSuchType("no primitive element with the required norm");
      Mat A = E.mult_matrix(*lam);
      Mat Bm = A.entry_pow(q).inverse().transpose();
      Mat g0(K, n, n), J(K, n, n);
      for (int i = 0; i < half; ++i) {
        J.at(i, half + i) = K->one();
        J.at(half + i, i) = K->one();
        for (int j = 0; j < half; ++j) {
          g0.at(i, j) = A.at(i, j);
          g0.at(half + i, half + j) = Bm.at(i, j);
        }
      }
      auto us = custom_space(FormKind::Unitary, F, J);
      g = to_standard(us, g0);
      break;
    }
    case EltTag::Refl: g = standard_reflection(sp); break;
    case EltTag::DeltaRefl:
      need_odd();
      g = delta_reflection(sp);
      break;
    case EltTag::DeltaElemPlus:
    case EltTag::DeltaElemMinus:
      need_odd();
      g = delta_element(sp);
      break;
    case EltTag::DeltaElemU: {
      // Antidiagonal isometry of the hyperbolic form with determinant alpha.
      // The plain antidiagonal (+-alpha, 1, ..., 1) is not an isometry, so the
      // entries below the antidiagonal midpoint are solved for.
      int n = m;
      auto qe = quad_ext(F);
      const auto& K = qe->ext;
      Fq alpha = unitary_alpha(*qe);
      const Mat& G = sp.gram;
      std::vector<Fq> d(n, K->one());
      auto solve_partner = [&](int i) {
        // d_i s_{n-1-i} bar(d_{n-1-i}) = s_i
        Fq s_i = G.at(i, n - 1 - i), s_j = G.at(n - 1 - i, i);
        d[n - 1 - i] = qe->bar(K->div(s_i, K->mul(d[i], s_j)));
      };
      auto build = [&]() {
        Mat h(K, n, n);
        for (int i = 0; i < n; ++i) h.at(i, n - 1 - i) = d[i];
        return h;
      };
      for (int i = 0; i < n / 2; ++i) solve_partner(i);
      Fq det0 = build().det();
      Fq want = K->div(alpha, det0);
      if (n % 2) {
        d[n / 2] = K->mul(d[n / 2], want);
      } else {
        // scaling d_0 by c multiplies the determinant by c^(1-q)
        std::optional<Fq> c;
        for (std::uint32_t v = 1; v < K->q() && !c; ++v)
          if (K->pow(Fq{v}, K->q() - q) == want) c = Fq{v};
        if (!c) throw NoSuchType("no antidiagonal isometry with determinant alpha");
        d[0] = K->mul(d[0], *c);
        solve_partner(0);
      }
      g = build();
      break;
    }
  }
  w.matrix = g;
  w.order = g.order();
  w.eigen_data = poly_factor(charpoly(g));
  return w;
}

TypeReport verify_type(const EltWitness& w) {
  auto rep = verify_type(w.matrix, w.claimed, w.space);
  for (auto& n : w.notes) rep.notes.push_back(n);
  return rep;
}

TypeReport verify_type(const Mat& g, const EltType& t, const FormedSpace& sp) {
  TypeReport rep;
  using G = GroupKind;
  auto expect = type_space(t);
  if (expect.kind != sp.kind || expect.n != sp.n || expect.base != sp.base) {
    rep.fail("space does not match the group of the claimed type");
    return rep;
  }
  if (g.rows() != sp.n || g.field() != sp.field) {
    rep.fail("matrix does not act on the space");
    return rep;
  }
  if (g.det().v == 0) {
    rep.fail("matrix is singular");
    return rep;
  }
  const auto& F = *sp.field;
  u64 q = sp.q();
  int m = t.m;
  auto mb = membership(g, sp);
  switch (t.group) {
    case G::Sp:
    case G::GU:
    case G::OPlus:
    case G::OMinus:
      if (!mb.is_isometry) rep.fail("not an isometry");
      break;
    case G::SOPlus:
    case G::SOMinus:
      if (!mb.is_isometry || mb.det != F.one()) rep.fail("not in SO");
      break;
    case G::GSp:
    case G::GOPlus:
    case G::GOMinus:
      if (!mb.is_similarity) rep.fail("not a similarity");
      break;
    case G::DOPlus:
    case G::DOMinus:
      if (!mb.is_similarity || !mb.in_DO.value_or(false)) rep.fail("not in DO");
      break;
  }
  if (!rep.ok) return rep;
  int eps = is_minus_tag(t.tag) ? -1 : 1;
  if (t.group == G::OMinus || t.group == G::GOMinus) eps = -1;
  switch (t.tag) {
    case EltTag::PlusType:
    case EltTag::MinusType: check_core(g, sp, eps, m, rep, tag_name(t.tag)); break;
    case EltTag::DeltaPlus:
    case EltTag::DeltaMinus: {
      if (!F.odd()) {
        rep.fail("needs odd q");
        break;
      }
      if (*mb.tau != F.beta()) rep.fail("tau is not beta");
      u64 k = two_part(q - 1);
      bool boundary = eps < 0 && m == 1 && is_mersenne(q);
      if (eps < 0 && !boundary) k *= two_part(upow(q, m) + 1);
      if (boundary) rep.notes.push_back("boundary branch: exponent k = (q-1)_2");
      check_core(g.pow(static_cast<std::int64_t>(k)), sp, eps, m, rep, "g^k");
      break;
    }
    case EltTag::SigmaPlus:
    case EltTag::SigmaMinus: {
      if (!F.odd()) {
        rep.fail("needs odd q");
        break;
      }
      if (mb.in_omega) rep.fail("element lies in Omega");
      u64 qm = upow(q, m);
      u64 k = two_part(eps > 0 ? qm - 1 : qm + 1);
      check_core(g.pow(static_cast<std::int64_t>(k)), sp, eps, m, rep, "g^k");
      break;
    }
    case EltTag::UnitaryMinus:
    case EltTag::UnitaryPlus: {
      int n = m;
      Fq alpha = unitary_alpha(*sp.qe);
      u64 qn = upow(q, n);
      u64 ord = g.order();
      auto fac = poly_factor(charpoly(g));
      if (g.det() != alpha) rep.fail("determinant is not alpha");
      if (t.tag == EltTag::UnitaryMinus) {
        if (n < 3 || n % 2 == 0) rep.fail("[n]- needs n >= 3 odd");
        if (ord != qn + 1) rep.fail("order is not q^n+1");
        if (fac.size() != 1 || fac[0].second != 1) rep.fail("not irreducible on V");
        break;
      }
      if (n < 4 || n % 2) rep.fail("[n]+ needs n >= 4 even");
      if (ord != qn - 1) rep.fail("order is not q^n-1");
      int half = n / 2;
      if (fac.size() != 2 || fac[0].second != 1 || fac[1].second != 1 || fac[0].first.degree() != half ||
          fac[1].first.degree() != half) {
        rep.fail("does not centralise a decomposition into two irreducible halves");
        break;
      }
      for (auto& [f, mult] : fac) {
        (void)mult;
        Mat U = poly_at(f, g).left_kernel();
        if (!totally_singular(U, sp)) rep.fail("invariant half is not totally singular");
      }
      for (u64 i = 1; i <= q + 1; ++i) {
        if ((q + 1) % i) continue;
        for (auto& [f, mult] : poly_factor(charpoly(g.pow(static_cast<std::int64_t>(i)))))
          if (f.degree() != half) {
            (void)mult;
            rep.fail("g^" + std::to_string(i) + " is reducible on a half");
            break;
          }
      }
      break;
    }
    case EltTag::Refl: {
      Mat d = g - Mat::identity(sp.field, sp.n);
      if (!(g * g).is_identity() || d.rank() != 1) rep.fail("not a reflection");
      break;
    }
    case EltTag::DeltaRefl:
      if (!F.odd()) {
        rep.fail("needs odd q");
        break;
      }
      if (*mb.tau != F.beta()) rep.fail("tau is not beta");
      if (mb.det != F.neg(F.beta())) rep.fail("determinant is not -beta");
      break;
    case EltTag::DeltaElemPlus:
    case EltTag::DeltaElemMinus:
      if (!F.odd()) {
        rep.fail("needs odd q");
        break;
      }
      if (*mb.tau != F.beta()) rep.fail("tau is not beta");
      if (mb.det != F.pow(F.beta(), static_cast<u64>(m))) rep.fail("determinant is not beta^m");
      break;
    case EltTag::DeltaElemU:
      if (g.det() != unitary_alpha(*sp.qe)) rep.fail("determinant is not alpha");
      break;
  }
  return rep;
}

Mat embed_ext(const Mat& x, unsigned d, const FormedSpace& sp) {
  if (d == 0 || sp.n % static_cast<int>(d)) throw IncompatibleDegree("degree does not divide the dimension");
  int k = sp.n / static_cast<int>(d);
  if (x.rows() != k || x.cols() != k) throw IncompatibleDegree("matrix has the wrong size");
  const auto& f = sp.field;
  if (x.field()->p() != f->p() || x.field()->k() != f->k() * d)
    throw IncompatibleDegree("matrix is not over the degree-d extension");
  return restrict_scalars(x, *embedding(f, x.field()));
}

int nu(const Mat& x) {
  if (x.det().v == 0) throw ZeroElement("nu of a singular matrix");
  int n = x.rows(), best = 0;
  for (auto& [f, mult] : poly_factor(charpoly(x))) {
    (void)mult;
    int k = n - poly_at(f, x).rank();
    best = std::max(best, k / f.degree());
  }
  return n - best;
}

std::string isotropy_name(Isotropy i) {
  switch (i) {
    case Isotropy::Zero: return "zero";
    case Isotropy::TotallySingular: return "totally-singular";
    case Isotropy::Nondegenerate: return "nondegenerate";
    case Isotropy::Degenerate: return "degenerate";
  }
  return "?";
}

std::vector<LabeledSubspace> invariant_subspaces(const Mat& x, const FormedSpace& sp) {
  const auto& F = x.field();
  int n = x.rows();
  auto total = checked_pow(F->q(), static_cast<unsigned>(n));
  if (!total || *total > (1u << 20)) throw TooLarge("too many vectors for subspace enumeration");
  // Every submodule is a sum of cyclic ones: close {0} under U -> U + <v>_x.
  auto closure = [&](std::vector<Vec> rows) {
    Mat cur = span_rref(Mat::from_rows(F, rows));
    while (true) {
      std::vector<Vec> more;
      for (int i = 0; i < cur.rows(); ++i) {
        more.push_back(cur.row(i));
        more.push_back(vec_mul(cur.row(i), x));
      }
      Mat nx = span_rref(Mat::from_rows(F, more));
      if (nx.rows() == cur.rows()) return cur;
      cur = nx;
    }
  };
  std::map<std::vector<std::uint32_t>, Mat> found;
  auto key = [&](const Mat& m) {
    std::vector<std::uint32_t> k{static_cast<std::uint32_t>(m.rows())};
    for (auto e : m.data()) k.push_back(e.v);
    return k;
  };
  Mat zero(F, 0, n);
  found.emplace(key(zero), zero);
  std::vector<Mat> queue{zero};
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    Mat U = queue[qi];
    Vec v(n, Fq{0});
    u64 qq = F->q();
    while (true) {
      int i = 0;
      while (i < n && ++v[i].v == qq) v[i++].v = 0;
      if (i == n) break;
      std::vector<Vec> rows;
      for (int r = 0; r < U.rows(); ++r) rows.push_back(U.row(r));
      rows.push_back(v);
      if (Mat::from_rows(F, rows).rank() == U.rows()) continue;
      Mat W = closure(rows);
      auto k = key(W);
      if (found.count(k)) continue;
      found.emplace(k, W);
      queue.push_back(W);
      if (found.size() > 200000) throw TooLarge("too many invariant subspaces");
    }
  }
  std::vector<LabeledSubspace> out;
  for (auto& [k, U] : found) {
    (void)k;
    LabeledSubspace ls{U, Isotropy::Zero};
    if (U.rows() > 0) {
      if (sp.kind == FormKind::Zero || totally_singular(U, sp)) {
        ls.label = Isotropy::TotallySingular;
      } else {
        Mat G = U * sp.gram * sp.bar(U).transpose();
        ls.label = G.det().v ? Isotropy::Nondegenerate : Isotropy::Degenerate;
      }
    }
    out.push_back(ls);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const LabeledSubspace& a, const LabeledSubspace& b) { return a.basis.rows() < b.basis.rows(); });
  return out;
}

SplitPrediction split_over_subfield(const EltWitness& w, unsigned e) {
  const auto& t = w.claimed;
  if (t.tag != EltTag::PlusType && t.tag != EltTag::MinusType)
    throw HypothesisViolation("splitting applies to (2m)+ and (2m)- witnesses");
  int m = t.m;
  int eta = t.tag == EltTag::PlusType ? 1 : -1;
  u64 q0 = t.ctx->q();
  if (e == 0) throw HypothesisViolation("degree must be positive");
  if (w.order % 2 == 0) throw HypothesisViolation("witness has even order");
  SplitPrediction sp;
  if (e == 1) {
    sp.blocks.push_back(t);
    sp.eps = eta;
  } else {
    if (m <= 1) throw HypothesisViolation("needs m > 1");
    if (eta > 0 && m % 2 == 0) throw HypothesisViolation("plus type needs m odd");
    if (eta < 0 && q0 == 2 && (m == 6 || m == 3)) throw HypothesisViolation("excluded exceptional case");
    sp.t = std::gcd(m, static_cast<int>(e));
    int ratio = static_cast<int>(e) / sp.t;
    sp.eps = (eta < 0 && ratio % 2) ? -1 : 1;
  }
  auto L = FieldCtx::make(t.ctx->p(), t.ctx->k() * e);
  int bm = m / sp.t;
  if (e > 1) {
    EltTag bt = sp.eps > 0 ? EltTag::PlusType : EltTag::MinusType;
    GroupKind bg = t.group == GroupKind::Sp ? GroupKind::Sp : (sp.eps > 0 ? GroupKind::SOPlus : GroupKind::SOMinus);
    for (int i = 0; i < sp.t; ++i) sp.blocks.push_back(elt_type(bt, bm, L, bg));
  }
  Mat gl = e == 1 ? w.matrix : map_entries(w.matrix, *embedding(t.ctx, L));
  bool ok = true;
  for (auto& [f, mult] : poly_factor(charpoly(gl))) {
    sp.factor_degrees.push_back(f.degree());
    if (mult != 1) ok = false;
  }
  std::sort(sp.factor_degrees.begin(), sp.factor_degrees.end());
  std::vector<int> want = sp.eps > 0 ? std::vector<int>(2 * sp.t, bm) : std::vector<int>(sp.t, 2 * bm);
  if (sp.factor_degrees != want) ok = false;
  // Each block must itself carry a primitive prime divisor order over F_q.
  u64 q = L->q();
  auto pp = ppd_set(q, static_cast<unsigned>(sp.eps > 0 ? bm : 2 * bm));
  bool exceptional = sp.eps < 0 && ((bm == 1 && is_mersenne(q) && w.order == q + 1) || (q == 2 && bm == 3 && w.order == 9));
  if (!pp.count(w.order) && !exceptional) ok = false;
  sp.verified = ok;
  return sp;
}

}  // namespace spreadlab
