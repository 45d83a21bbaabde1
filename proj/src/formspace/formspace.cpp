#include "spreadlab/formspace.hpp"

#include <functional>

#include "spreadlab/errors.hpp"

namespace spreadlab {

namespace {

// Calls fn on every vector of F^n in counter order (first coordinate fastest)
// until it returns true. Returns whether fn stopped the iteration.
bool for_each_vector(const FieldPtr& f, int n, const std::function<bool(const Vec&)>& fn) {
  Vec v(n, Fq{0});
  u64 q = f->q();
  while (true) {
    if (fn(v)) return true;
    int i = 0;
    while (i < n && ++v[i].v == q) v[i++].v = 0;
    if (i == n) return false;
  }
}

bool is_zero_vec(const Vec& v) {
  for (auto x : v)
    if (x.v) return false;
  return true;
}

Vec unit(int n, int i) {
  Vec v(n, Fq{0});
  v[i] = Fq{1};
  return v;
}

// Least element of order (q^2-1)_2 in F_{q^2} whose norm to F_q is beta.
Fq beta2(const QuadExt& qe) {
  const auto& E = *qe.ext;
  u64 Q = E.q() - 1;
  u64 t = two_part(Q);
  Fq b = qe.base->beta();
  Fq g = E.pow(E.alpha(), Q / t);
  for (u64 j = 1; j < t; j += 2) {
    Fq c = E.pow(g, j);
    if (qe.emb->down_checked(E.pow(c, qe.base->q() + 1)) == b) return c;
  }
  throw HypothesisViolation("no element of 2-power order with norm beta");
}

}  // namespace

std::string kind_name(FormKind k) {
  switch (k) {
    case FormKind::Zero: return "zero";
    case FormKind::Symplectic: return "symplectic";
    case FormKind::QuadPlus: return "plus";
    case FormKind::QuadMinus: return "minus";
    case FormKind::QuadOdd: return "odd";
    case FormKind::Unitary: return "unitary";
  }
  return "?";
}

FormKind parse_kind(const std::string& s) {
  if (s == "zero" || s == "linear") return FormKind::Zero;
  if (s == "symplectic" || s == "sp") return FormKind::Symplectic;
  if (s == "plus" || s == "quadratic+") return FormKind::QuadPlus;
  if (s == "minus" || s == "quadratic-") return FormKind::QuadMinus;
  if (s == "odd" || s == "circ" || s == "quadratic0") return FormKind::QuadOdd;
  if (s == "unitary" || s == "gu") return FormKind::Unitary;
  throw ParseError("unknown form kind '" + s + "'");
}

Fq FormedSpace::bar(Fq x) const { return unitary() ? field->pow(x, base->q()) : x; }

Mat FormedSpace::bar(const Mat& m) const { return unitary() ? m.entry_pow(base->q()) : m; }

Fq FormedSpace::form(const Vec& u, const Vec& v) const {
  const auto& F = *field;
  Fq acc{0};
  for (int i = 0; i < n; ++i) {
    if (u[i].v == 0) continue;
    Fq row{0};
    for (int j = 0; j < n; ++j) {
      Fq g = gram.at(i, j);
      if (g.v && v[j].v) row = F.add(row, F.mul(g, bar(v[j])));
    }
    acc = F.add(acc, F.mul(u[i], row));
  }
  return acc;
}

Fq FormedSpace::Q(const Vec& v) const {
  if (!quadratic()) throw IncompatibleKind("Q is defined only for quadratic kinds");
  const auto& F = *field;
  Fq acc{0};
  for (int i = 0; i < n; ++i) {
    if (v[i].v == 0) continue;
    acc = F.add(acc, F.mul(qdiag[i], F.mul(v[i], v[i])));
    for (int j = i + 1; j < n; ++j)
      if (v[j].v) acc = F.add(acc, F.mul(gram.at(i, j), F.mul(v[i], v[j])));
  }
  return acc;
}

std::string FormedSpace::header() const {
  return "form " + kind_name(kind) + " " + std::to_string(n) + " " + std::to_string(base->p()) + " " +
         std::to_string(base->k());
}

FormedSpace standard_space(FormKind kind, int n, const FieldPtr& fq) {
  if (n < 1) throw IncompatibleKind("dimension must be positive");
  FormedSpace sp;
  sp.kind = kind;
  sp.n = n;
  sp.base = fq;
  sp.field = fq;
  const auto& F = *fq;
  auto pairs = [&](int m, bool alternating) {
    for (int i = 0; i < m; ++i) {
      sp.gram.at(2 * i, 2 * i + 1) = F.one();
      sp.gram.at(2 * i + 1, 2 * i) = alternating ? F.neg(F.one()) : F.one();
      sp.labels.push_back("e" + std::to_string(i + 1));
      sp.labels.push_back("f" + std::to_string(i + 1));
    }
  };
  switch (kind) {
    case FormKind::Zero:
      sp.gram = Mat(fq, n, n);
      for (int i = 0; i < n; ++i) sp.labels.push_back("v" + std::to_string(i + 1));
      break;
    case FormKind::Symplectic:
      if (n % 2) throw IncompatibleKind("symplectic spaces have even dimension");
      sp.gram = Mat(fq, n, n);
      pairs(n / 2, true);
      break;
    case FormKind::QuadPlus:
    case FormKind::QuadMinus: {
      if (n % 2) throw IncompatibleKind("plus/minus quadratic spaces have even dimension");
      sp.gram = Mat(fq, n, n);
      sp.qdiag.assign(n, Fq{0});
      int m = n / 2;
      if (kind == FormKind::QuadPlus) {
        pairs(m, false);
        break;
      }
      pairs(m - 1, false);
      sp.qe = quad_ext(fq);
      const auto& E = *sp.qe->ext;
      Fq xi = sp.qe->xi;
      Fq nq = sp.qe->emb->down_checked(E.pow(xi, F.q() + 1));
      Fq xi2 = E.mul(xi, xi);
      Fq t = sp.qe->emb->down_checked(E.add(xi2, E.inv(xi2)));
      int u = n - 2, v = n - 1;
      sp.qdiag[u] = nq;
      sp.qdiag[v] = nq;
      sp.gram.at(u, u) = F.add(nq, nq);
      sp.gram.at(v, v) = F.add(nq, nq);
      sp.gram.at(u, v) = t;
      sp.gram.at(v, u) = t;
      sp.labels.push_back("u" + std::to_string(m));
      sp.labels.push_back("v" + std::to_string(m));
      break;
    }
    case FormKind::QuadOdd: {
      if (n % 2 == 0) throw IncompatibleKind("odd-dimensional quadratic kind needs odd n");
      if (!F.odd()) throw IncompatibleKind("odd-dimensional quadratic forms need odd characteristic");
      sp.gram = Mat(fq, n, n);
      sp.qdiag.assign(n, Fq{0});
      pairs(n / 2, false);
      sp.qdiag[n - 1] = F.one();
      sp.gram.at(n - 1, n - 1) = F.add(F.one(), F.one());
      sp.labels.push_back("x");
      break;
    }
    case FormKind::Unitary:
      sp.qe = quad_ext(fq);
      sp.field = sp.qe->ext;
      sp.gram = Mat::identity(sp.field, n);
      for (int i = 0; i < n; ++i) sp.labels.push_back("u" + std::to_string(i + 1));
      break;
  }
  return sp;
}

FormedSpace custom_space(FormKind kind, const FieldPtr& fq, const Mat& gram, std::vector<Fq> qdiag) {
  FormedSpace sp;
  sp.kind = kind;
  sp.n = gram.rows();
  sp.base = fq;
  sp.field = fq;
  if (kind == FormKind::Unitary || kind == FormKind::QuadMinus) sp.qe = quad_ext(fq);
  if (kind == FormKind::Unitary) sp.field = sp.qe->ext;
  if (gram.field() != sp.field) throw IncompatibleKind("Gram matrix over the wrong field");
  sp.gram = gram;
  if (sp.quadratic()) {
    if (qdiag.empty()) {
      if (!fq->odd()) throw IncompatibleKind("quadratic form in characteristic 2 needs Q on the basis");
      Fq half = fq->inv(fq->from_int(2));
      for (int i = 0; i < sp.n; ++i) qdiag.push_back(fq->mul(half, gram.at(i, i)));
    }
    sp.qdiag = std::move(qdiag);
  }
  for (int i = 0; i < sp.n; ++i) sp.labels.push_back("b" + std::to_string(i + 1));
  return sp;
}

Mat antidiag_J(const FieldPtr& f, int n) {
  Mat J(f, n, n);
  for (int i = 0; i < n; ++i) J.at(i, n - 1 - i) = i % 2 ? f->neg(f->one()) : f->one();
  return J;
}

Mat gamma_map(const Mat& x) {
  Mat J = antidiag_J(x.field(), x.rows());
  return J.inverse() * x.inverse().transpose() * J;
}

UnitaryHyperbolic unitary_hyperbolic_basis(const FormedSpace& sp) {
  if (!sp.unitary() || sp.gram != Mat::identity(sp.field, sp.n))
    throw IncompatibleKind("hyperbolic basis is built from the orthonormal unitary basis");
  const auto& E = *sp.field;
  u64 q = sp.q();
  int n = sp.n, m = n / 2;
  Fq minus1 = E.neg(E.one());
  UnitaryHyperbolic out;
  // Hyperbolic pair in <u_1, u_2> coordinates.
  Vec e2, f2;
  FormedSpace plane = standard_space(FormKind::Unitary, 2, sp.base);
  auto hyperbolic = [&](const Vec& e, const Vec& f) {
    return plane.form(e, e).v == 0 && plane.form(f, f).v == 0 && plane.form(e, f) == E.one();
  };
  if (m > 0) {
    Poly z(sp.field, {minus1, minus1, E.one()});
    auto roots = poly_roots(z);
    if (!roots.empty()) {
      Fq zeta = roots.front();
      Vec e{E.one(), zeta}, f{zeta, E.one()};
      if (hyperbolic(e, f)) {
        e2 = e;
        f2 = f;
        out.used_zeta = true;
      }
    }
    if (!out.used_zeta) {
      Fq c{0};
      for (std::uint32_t v = 1; v < E.q(); ++v)
        if (E.pow(Fq{v}, q + 1) == minus1) {
          c = Fq{v};
          break;
        }
      Vec e{E.one(), c};
      bool found = for_each_vector(sp.field, 2, [&](const Vec& f) {
        if (!hyperbolic(e, f)) return false;
        f2 = f;
        return true;
      });
      if (!found) throw DegenerateForm("no hyperbolic pair in a unitary plane");
      e2 = e;
    }
  }
  auto embed = [&](const Vec& v2, int i) {
    Vec v(n, Fq{0});
    v[2 * i] = v2[0];
    v[2 * i + 1] = v2[1];
    return v;
  };
  Fq a = E.one(), b = E.one();
  if (E.odd()) {
    bool fa = false, fb = false;
    Fq sgn = m % 2 ? minus1 : E.one();
    for (std::uint32_t v = 1; v < E.q() && !(fa && fb); ++v) {
      if (!fa && E.pow(Fq{v}, q - 1) == minus1) {
        a = Fq{v};
        fa = true;
      }
      if (!fb && E.pow(Fq{v}, q + 1) == sgn) {
        b = Fq{v};
        fb = true;
      }
    }
  }
  std::vector<Vec> rows;
  for (int i = 0; i < m; ++i) {
    Fq s = i % 2 ? minus1 : E.one();
    if (n % 2 == 0) s = E.mul(s, a);
    rows.push_back(vec_scale(sp.field, embed(e2, i), s));
  }
  if (n % 2) rows.push_back(vec_scale(sp.field, unit(n, n - 1), b));
  for (int i = m - 1; i >= 0; --i) rows.push_back(embed(f2, i));
  out.basis = Mat::from_rows(sp.field, rows);
  out.gram = Mat(sp.field, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.gram.at(i, j) = sp.form(rows[i], rows[j]);
  Mat want = antidiag_J(sp.field, n);
  if (n % 2 == 0) want = want.scaled(a);
  if (out.gram != want) throw DegenerateForm("hyperbolic unitary basis failed validation");
  return out;
}

FormedSpace unitary_hyperbolic_space(int n, const FieldPtr& fq) {
  auto hb = unitary_hyperbolic_basis(standard_space(FormKind::Unitary, n, fq));
  auto sp = custom_space(FormKind::Unitary, fq, hb.gram);
  sp.labels.clear();
  int m = n / 2;
  for (int i = 0; i < m; ++i) sp.labels.push_back("e" + std::to_string(i + 1));
  if (n % 2) sp.labels.push_back("u" + std::to_string(n));
  for (int i = m; i >= 1; --i) sp.labels.push_back("f" + std::to_string(i));
  return sp;
}

std::optional<Fq> similarity_factor(const Mat& g, const FormedSpace& sp) {
  if (g.rows() != sp.n || !g.square() || g.field() != sp.field) throw IncompatibleDegree("matrix does not act on the space");
  if (g.det().v == 0) return std::nullopt;
  const auto& F = *sp.field;
  if (sp.kind == FormKind::Zero) return F.one();
  Mat img = g * sp.gram * sp.bar(g).transpose();
  std::optional<Fq> tau;
  for (int i = 0; i < sp.n && !tau; ++i)
    for (int j = 0; j < sp.n; ++j)
      if (sp.gram.at(i, j).v) {
        tau = F.div(img.at(i, j), sp.gram.at(i, j));
        break;
      }
  if (!tau) return std::nullopt;
  if (img != sp.gram.scaled(*tau)) return std::nullopt;
  if (sp.quadratic())
    for (int i = 0; i < sp.n; ++i)
      if (sp.Q(g.row(i)) != F.mul(*tau, sp.qdiag[i])) return std::nullopt;
  return tau;
}

bool is_isometry(const Mat& g, const FormedSpace& sp) {
  auto t = similarity_factor(g, sp);
  return t && *t == sp.field->one();
}

Mat reflection(const Vec& v, const FormedSpace& sp) {
  if (!sp.quadratic()) throw IncompatibleKind("reflections need a quadratic form");
  const auto& F = *sp.field;
  Fq qv = sp.Q(v);
  if (qv.v == 0) throw SingularVector("reflection in a singular vector");
  Fq iq = F.inv(qv);
  Mat r = Mat::identity(sp.field, sp.n);
  for (int i = 0; i < sp.n; ++i) {
    Fq c = F.mul(sp.form(unit(sp.n, i), v), iq);
    if (c.v == 0) continue;
    for (int j = 0; j < sp.n; ++j) r.at(i, j) = F.sub(r.at(i, j), F.mul(c, v[j]));
  }
  return r;
}

std::vector<Vec> reflection_factorization(const Mat& g, const FormedSpace& sp) {
  if (!sp.quadratic()) throw IncompatibleKind("reflection factorization needs a quadratic form");
  if (!is_isometry(g, sp)) throw NotIsometry("element does not preserve Q");
  const auto& F = sp.field;
  int n = sp.n;
  std::vector<Vec> out;
  Mat h = g;
  const std::size_t cap = static_cast<std::size_t>(4 * n + 4);
  bool exhaustive_ok = checked_pow(F->q(), static_cast<unsigned>(n)).value_or(UINT64_MAX) <= (1u << 16);
  auto try_x = [&](const Vec& x) -> std::optional<Vec> {
    Vec w = vec_add(F, x, vec_scale(F, vec_mul(x, h), F->neg(F->one())));
    if (is_zero_vec(w) || sp.Q(w).v == 0) return std::nullopt;
    return w;
  };
  while (!h.is_identity()) {
    if (out.size() > cap) throw BudgetExceeded("reflection factorization did not terminate");
    std::optional<Vec> w;
    for (int i = 0; i < n && !w; ++i) w = try_x(unit(n, i));
    for (int i = 0; i < n && !w; ++i)
      for (int j = i + 1; j < n && !w; ++j) w = try_x(vec_add(F, unit(n, i), unit(n, j)));
    if (!w && exhaustive_ok) for_each_vector(F, n, [&](const Vec& x) { return (w = try_x(x)).has_value(); });
    if (w) {
      out.push_back(*w);
      h = h * reflection(*w, sp);
      continue;
    }
    // Every moved vector has singular displacement: find an auxiliary
    // reflection after which one more reflection enlarges the fixed space.
    int fix0 = n - (h - Mat::identity(F, n)).rank();
    std::vector<Vec> cands;
    for (int i = 0; i < n; ++i) cands.push_back(unit(n, i));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) cands.push_back(vec_add(F, unit(n, i), unit(n, j)));
    if (exhaustive_ok)
      for_each_vector(F, n, [&](const Vec& x) {
        cands.push_back(x);
        return false;
      });
    auto fixdim = [&](const Mat& m) { return n - (m - Mat::identity(F, n)).rank(); };
    auto displacement = [&](const Mat& m, const Vec& x) -> std::optional<Vec> {
      Vec d = vec_add(F, x, vec_scale(F, vec_mul(x, m), F->neg(F->one())));
      if (is_zero_vec(d) || sp.Q(d).v == 0) return std::nullopt;
      return d;
    };
    // Depth-limited search for up to three reflections gaining a fixed dimension.
    std::function<bool(const Mat&, int, std::vector<Vec>&)> extend = [&](const Mat& cur, int depth,
                                                                         std::vector<Vec>& path) {
      if (!path.empty() && fixdim(cur) > fix0) {
        h = cur;
        return true;
      }
      if (depth == 0) return false;
      for (auto& x : cands) {
        std::optional<Vec> d;
        if (path.empty()) {
          if (!is_zero_vec(x) && sp.Q(x).v != 0) d = x;
        } else {
          d = displacement(cur, x);
        }
        if (!d) continue;
        path.push_back(*d);
        if (extend(cur * reflection(*d, sp), depth - 1, path)) return true;
        path.pop_back();
      }
      return false;
    };
    std::vector<Vec> path;
    bool progressed = extend(h, 3, path);
    for (auto& v : path) out.push_back(v);
    if (!progressed) throw BudgetExceeded("element is not a product of reflections found by search");
  }
  return out;
}

Fq wall_determinant(const Mat& g, const FormedSpace& sp) {
  if (!sp.quadratic()) throw IncompatibleKind("spinor norm needs a quadratic form");
  if (!is_isometry(g, sp)) throw NotIsometry("element does not preserve Q");
  const auto& F = sp.field;
  int n = sp.n;
  Mat d = Mat::identity(F, n) - g;
  // Rows w_j = e_{i_j}(1 - g) spanning the image, with preimages e_{i_j}.
  std::vector<int> idx;
  std::vector<Vec> rows;
  for (int i = 0; i < n; ++i) {
    rows.push_back(d.row(i));
    if (Mat::from_rows(F, rows).rank() == static_cast<int>(rows.size())) {
      idx.push_back(i);
    } else {
      rows.pop_back();
    }
  }
  int k = static_cast<int>(idx.size());
  if (k == 0) return F->one();
  Mat chi(F, k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) chi.at(a, b) = sp.form(rows[a], unit(n, idx[b]));
  return chi.det();
}

SquareClass spinor_norm(const Mat& g, const FormedSpace& sp) {
  if (!sp.field->odd()) throw UnsupportedCharacteristic("spinor norm in characteristic 2; use the Dickson invariant");
  return sp.field->is_square(wall_determinant(g, sp)) ? SquareClass::Square : SquareClass::Nonsquare;
}

int dickson_invariant(const Mat& g, const FormedSpace& sp) {
  if (sp.field->odd()) throw UnsupportedCharacteristic("Dickson invariant is for characteristic 2");
  if (!sp.quadratic()) throw IncompatibleKind("Dickson invariant needs a quadratic form");
  if (!is_isometry(g, sp)) throw NotIsometry("element does not preserve Q");
  return (g + Mat::identity(sp.field, sp.n)).rank() % 2;
}

Membership membership(const Mat& g, const FormedSpace& sp) {
  Membership m;
  const auto& F = *sp.field;
  m.det = g.det();
  if (m.det.v == 0) return m;
  m.tau = similarity_factor(g, sp);
  m.is_similarity = m.tau.has_value();
  m.is_isometry = m.is_similarity && *m.tau == F.one();
  m.in_special = m.is_isometry && m.det == F.one();
  if (sp.quadratic()) {
    if (m.is_isometry) {
      if (F.odd()) {
        // prod (v_i,v_i) = 2^t prod Q(v_i) with t odd exactly when det = -1.
        Fq theta = wall_determinant(g, sp);
        Fq prod = m.det == F.one() ? theta : F.mul(theta, F.from_int(2));
        m.reflection_norm = F.is_square(prod) ? SquareClass::Square : SquareClass::Nonsquare;
        m.in_omega = m.in_special && F.is_square(theta);
      } else {
        m.dickson = dickson_invariant(g, sp);
        m.in_omega = *m.dickson == 0;
      }
    }
    if (sp.n % 2 == 0) {
      if (!m.is_similarity) {
        m.in_DO = false;
      } else if (F.odd()) {
        m.in_DO = m.det == F.pow(*m.tau, static_cast<u64>(sp.n / 2));
      } else {
        Fq lam = *F.sqrt(*m.tau);
        Mat h = g.scaled(F.inv(lam));
        m.in_DO = dickson_invariant(h, sp) == 0;
      }
    }
  } else if (sp.kind == FormKind::Symplectic) {
    m.in_omega = m.is_isometry;
  } else {
    m.in_omega = m.in_special;
  }
  return m;
}

WittBasis witt_basis(const FormedSpace& sp) {
  if (sp.kind == FormKind::Zero) throw IncompatibleKind("no form");
  const auto& F = sp.field;
  int n = sp.n;
  auto isotropic = [&](const Vec& v) {
    if (is_zero_vec(v)) return false;
    if (sp.quadratic()) return sp.Q(v).v == 0;
    return sp.form(v, v).v == 0;
  };
  std::vector<Vec> W;
  for (int i = 0; i < n; ++i) W.push_back(unit(n, i));
  std::vector<Vec> out;
  WittBasis wb;
  while (W.size() >= 2) {
    int d = static_cast<int>(W.size());
    int use = std::min(d, sp.unitary() ? 2 : 3);
    std::optional<Vec> u;
    for_each_vector(F, use, [&](const Vec& c) {
      Vec v(n, Fq{0});
      for (int i = 0; i < use; ++i)
        if (c[i].v) v = vec_add(F, v, vec_scale(F, W[i], c[i]));
      if (!isotropic(v)) return false;
      u = v;
      return true;
    });
    if (!u) break;
    std::optional<Vec> w;
    for (auto& x : W)
      if (sp.form(*u, x).v) {
        w = x;
        break;
      }
    if (!w) throw DegenerateForm("isotropic vector in the radical");
    // Scale so that (u, w) = 1.
    Fq c = sp.bar(F->inv(sp.form(*u, *w)));
    *w = vec_scale(F, *w, c);
    Vec f = *w;
    if (sp.quadratic()) {
      f = vec_add(F, *w, vec_scale(F, *u, F->neg(sp.Q(*w))));
    } else if (sp.unitary()) {
      // f = w + a u with a + a^q = -(w,w)
      Fq target = F->neg(sp.form(*w, *w));
      std::optional<Fq> a;
      for (std::uint32_t v = 0; v < F->q() && !a; ++v)
        if (F->add(Fq{v}, sp.bar(Fq{v})) == target) a = Fq{v};
      if (!a) throw DegenerateForm("trace equation has no solution");
      f = vec_add(F, *w, vec_scale(F, *u, *a));
    }
    out.push_back(*u);
    out.push_back(f);
    ++wb.witt_index;
    Fq uf = sp.form(*u, f), fu = sp.form(f, *u);
    std::vector<Vec> proj;
    for (auto& x : W) {
      Fq a = F->div(sp.form(x, f), uf);
      Fq b = F->div(sp.form(x, *u), fu);
      Vec y = vec_add(F, x, vec_scale(F, *u, F->neg(a)));
      y = vec_add(F, y, vec_scale(F, f, F->neg(b)));
      proj.push_back(y);
    }
    Mat r = span_rref(Mat::from_rows(F, proj));
    if (r.rows() != d - 2) throw DegenerateForm("degenerate form in Witt decomposition");
    W.clear();
    for (int i = 0; i < r.rows(); ++i) W.push_back(r.row(i));
  }
  for (auto& x : W) out.push_back(x);
  wb.basis = Mat::from_rows(F, out);
  if (wb.basis.rank() != n) throw DegenerateForm("degenerate form");
  return wb;
}

DiscSign disc_and_sign(const FormedSpace& sp) {
  if (!sp.quadratic() || sp.n % 2) throw IncompatibleKind("discriminant and sign need an even-dimensional quadratic space");
  Fq d = sp.gram.det();
  if (d.v == 0) throw DegenerateForm("polar form is degenerate");
  DiscSign ds;
  ds.disc = sp.field->is_square(d) ? SquareClass::Square : SquareClass::Nonsquare;
  ds.witt_index = witt_basis(sp).witt_index;
  ds.sign = ds.witt_index == sp.n / 2 ? 1 : -1;
  return ds;
}

Mat minus_transport(const FormedSpace& sp) {
  auto qe = sp.qe ? sp.qe : quad_ext(sp.base);
  const auto& E = *qe->ext;
  Fq xi = qe->xi, xq = E.pow(qe->xi, sp.q());
  return Mat::from_rows(qe->ext, {{xi, xq}, {xq, xi}});
}

namespace {

// Transport a 2x2 matrix over F_{q^2} in plus coordinates (e, f) to the
// minus-type pair (u, v) and bring it down to F_q.
Mat transport_down(const FormedSpace& sp, const Mat& r) {
  Mat T = minus_transport(sp);
  return map_entries_down(T * r * T.inverse(), *sp.qe->emb);
}

Mat with_last_block(const FormedSpace& sp, const Mat& base, const Mat& blk) {
  Mat g = base;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g.at(sp.n - 2 + i, sp.n - 2 + j) = blk.at(i, j);
  return g;
}

}  // namespace

Mat standard_reflection(const FormedSpace& sp) {
  if (sp.kind != FormKind::QuadPlus && sp.kind != FormKind::QuadMinus)
    throw IncompatibleKind("standard reflection needs plus or minus type");
  const auto& F = sp.field;
  Mat blk = Mat::from_rows(F, {{Fq{0}, F->one()}, {F->one(), Fq{0}}});
  return with_last_block(sp, Mat::identity(F, sp.n), blk);
}

Mat delta_reflection(const FormedSpace& sp) {
  if (!sp.base->odd()) throw UnsupportedCharacteristic("needs odd q");
  if (sp.n != 2) throw IncompatibleKind("delta reflection lives on a 2-dimensional space");
  const auto& F = sp.field;
  Mat blk;
  if (sp.kind == FormKind::QuadPlus) {
    blk = Mat::from_rows(F, {{Fq{0}, F->beta()}, {F->one(), Fq{0}}});
  } else if (sp.kind == FormKind::QuadMinus) {
    const auto& E = *sp.qe->ext;
    Fq b2 = beta2(*sp.qe);
    Mat R = Mat::from_rows(sp.qe->ext, {{Fq{0}, b2}, {E.pow(b2, sp.q()), Fq{0}}});
    blk = transport_down(sp, R);
  } else {
    throw IncompatibleKind("needs plus or minus type");
  }
  return with_last_block(sp, Mat::identity(F, sp.n), blk);
}

Mat delta_element(const FormedSpace& sp) {
  if (!sp.base->odd()) throw UnsupportedCharacteristic("needs odd q");
  const auto& F = sp.field;
  Fq b = F->beta();
  std::vector<Fq> d;
  for (int i = 0; i < sp.n / 2; ++i) {
    d.push_back(b);
    d.push_back(F->one());
  }
  Mat g = Mat::diag(F, d);
  if (sp.kind == FormKind::QuadPlus || sp.kind == FormKind::Symplectic) return g;
  if (sp.kind != FormKind::QuadMinus) throw IncompatibleKind("needs plus, minus or symplectic type");
  const auto& E = *sp.qe->ext;
  Fq b2 = beta2(*sp.qe);
  Mat D = Mat::diag(sp.qe->ext, {b2, E.pow(b2, sp.q())});
  return with_last_block(sp, g, transport_down(sp, D));
}

std::vector<Mat> enumerate_similarities(const FormedSpace& sp, Fq tau, std::size_t cap) {
  if (sp.kind == FormKind::Zero) throw IncompatibleKind("no form to preserve");
  const auto& F = sp.field;
  int n = sp.n;
  auto total = checked_pow(F->q(), static_cast<unsigned>(n));
  if (!total || *total > (1u << 16)) throw TooLarge("too many vectors to enumerate");
  std::vector<Vec> all;
  for_each_vector(F, n, [&](const Vec& v) {
    if (!is_zero_vec(v)) all.push_back(v);
    return false;
  });
  auto self = [&](const Vec& v) { return sp.quadratic() ? sp.Q(v) : sp.form(v, v); };
  std::vector<std::vector<int>> cand(n);
  for (int i = 0; i < n; ++i) {
    Fq want = F->mul(tau, sp.quadratic() ? sp.qdiag[i] : sp.gram.at(i, i));
    for (size_t k = 0; k < all.size(); ++k)
      if (self(all[k]) == want) cand[i].push_back(static_cast<int>(k));
  }
  std::vector<Mat> out;
  std::vector<int> pick(n);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      std::vector<Vec> rows;
      for (int k : pick) rows.push_back(all[k]);
      Mat g = Mat::from_rows(F, rows);
      if (g.det().v == 0) return;
      if (out.size() >= cap) throw TooLarge("similarity enumeration exceeded its cap");
      out.push_back(g);
      return;
    }
    for (int k : cand[i]) {
      const Vec& v = all[k];
      bool ok = true;
      for (int j = 0; j < i && ok; ++j) {
        const Vec& w = all[pick[j]];
        if (sp.form(w, v) != F->mul(tau, sp.gram.at(j, i))) ok = false;
        if (ok && sp.form(v, w) != F->mul(tau, sp.gram.at(i, j))) ok = false;
      }
      if (!ok) continue;
      pick[i] = k;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

Mat standard_basis_in(const FormedSpace& sp) {
  const auto& F = sp.field;
  int n = sp.n;
  auto target = standard_space(sp.kind, n, sp.base);
  if (sp.kind == FormKind::Zero) return Mat::identity(F, n);
  if (sp.gram.det().v == 0 && !(sp.quadratic() && !F->odd() && n % 2)) throw DegenerateForm("singular form");
  Mat B;
  if (sp.unitary()) {
    // Orthonormal basis by Gram-Schmidt.
    u64 q = sp.q();
    std::vector<Vec> W, out;
    for (int i = 0; i < n; ++i) W.push_back(unit(n, i));
    while (!W.empty()) {
      std::optional<Vec> v;
      for (auto& x : W)
        if (sp.form(x, x).v) {
          v = x;
          break;
        }
      for (size_t i = 0; i < W.size() && !v; ++i)
        for (size_t j = i + 1; j < W.size() && !v; ++j)
          for (std::uint32_t c = 1; c < F->q() && !v; ++c) {
            Vec x = vec_add(F, W[i], vec_scale(F, W[j], Fq{c}));
            if (sp.form(x, x).v) v = x;
          }
      if (!v) throw DegenerateForm("no anisotropic vector in a nonzero unitary space");
      Fq nv = sp.form(*v, *v), want = F->inv(nv);
      std::optional<Fq> s;
      for (std::uint32_t c = 1; c < F->q() && !s; ++c)
        if (F->pow(Fq{c}, q + 1) == want) s = Fq{c};
      Vec u = vec_scale(F, *v, *s);
      out.push_back(u);
      std::vector<Vec> proj;
      for (auto& x : W) proj.push_back(vec_add(F, x, vec_scale(F, u, F->neg(sp.form(x, u)))));
      Mat r = span_rref(Mat::from_rows(F, proj));
      W.clear();
      for (int i = 0; i < r.rows(); ++i) W.push_back(r.row(i));
    }
    B = Mat::from_rows(F, out);
  } else {
    auto wb = witt_basis(sp);
    auto tw = witt_basis(target).witt_index;
    if (wb.witt_index != tw) throw IncompatibleKind("form has the wrong Witt index");
    std::vector<Vec> rows;
    for (int i = 0; i < 2 * wb.witt_index; ++i) rows.push_back(wb.basis.row(i));
    int rest = n - 2 * wb.witt_index;
    if (rest == 1) {
      Vec x = wb.basis.row(n - 1);
      Fq want = target.qdiag[n - 1];
      std::optional<Fq> c;
      for (std::uint32_t a = 1; a < F->q() && !c; ++a)
        if (F->mul(F->mul(Fq{a}, Fq{a}), sp.Q(x)) == want) c = Fq{a};
      if (!c) throw IncompatibleKind("anisotropic line has the wrong discriminant");
      rows.push_back(vec_scale(F, x, *c));
    } else if (rest == 2) {
      Vec a = wb.basis.row(n - 2), b = wb.basis.row(n - 1);
      Fq qu = target.qdiag[n - 2], t = target.gram.at(n - 2, n - 1);
      std::vector<Vec> plane;
      for_each_vector(F, 2, [&](const Vec& c) {
        plane.push_back(vec_add(F, vec_scale(F, a, c[0]), vec_scale(F, b, c[1])));
        return false;
      });
      bool found = false;
      for (auto& x : plane) {
        if (sp.Q(x) != qu) continue;
        for (auto& y : plane)
          if (sp.Q(y) == qu && sp.form(x, y) == t) {
            rows.push_back(x);
            rows.push_back(y);
            found = true;
            break;
          }
        if (found) break;
      }
      if (!found) throw IncompatibleKind("anisotropic plane does not match the standard one");
    }
    B = Mat::from_rows(F, rows);
  }
  // Final check against the standard Gram data.
  Mat G = B * sp.gram * sp.bar(B).transpose();
  if (G != target.gram) throw IncompatibleKind("basis change failed to reach the standard form");
  if (sp.quadratic())
    for (int i = 0; i < n; ++i)
      if (sp.Q(B.row(i)) != target.qdiag[i]) throw IncompatibleKind("basis change failed to match Q");
  return B;
}

Fq unitary_alpha(const QuadExt& qe) { return qe.ext->pow(qe.ext->alpha(), qe.base->q() - 1); }

}  // namespace spreadlab
