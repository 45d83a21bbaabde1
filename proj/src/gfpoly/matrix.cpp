#include "spreadlab/matrix.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "spreadlab/errors.hpp"

namespace spreadlab {

Mat::Mat(FieldPtr f, int rows, int cols)
    : f_(std::move(f)), r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols, Fq{0}) {}

Mat Mat::identity(FieldPtr f, int n) {
  Mat m(std::move(f), n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Fq{1};
  return m;
}

Mat Mat::from_rows(FieldPtr f, const std::vector<Vec>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows[0].size()) : 0;
  Mat m(std::move(f), r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw ParseError("ragged matrix rows");
    for (int j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

Mat Mat::diag(FieldPtr f, const std::vector<Fq>& d) {
  Mat m(std::move(f), static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

Vec Mat::row(int i) const { return Vec(a_.begin() + static_cast<long>(i) * c_, a_.begin() + static_cast<long>(i + 1) * c_); }

Mat Mat::operator*(const Mat& o) const {
  if (c_ != o.r_) throw IncompatibleDegree("matrix shape mismatch");
  Mat m(f_, r_, o.c_);
  const auto& F = *f_;
  for (int i = 0; i < r_; ++i)
    for (int k = 0; k < c_; ++k) {
      Fq x = at(i, k);
      if (x.v == 0) continue;
      for (int j = 0; j < o.c_; ++j) m.at(i, j) = F.add(m.at(i, j), F.mul(x, o.at(k, j)));
    }
  return m;
}

Mat Mat::operator+(const Mat& o) const {
  Mat m(f_, r_, c_);
  for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = f_->add(a_[i], o.a_[i]);
  return m;
}

Mat Mat::operator-(const Mat& o) const {
  Mat m(f_, r_, c_);
  for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = f_->sub(a_[i], o.a_[i]);
  return m;
}

Mat Mat::scaled(Fq s) const {
  Mat m = *this;
  for (auto& x : m.a_) x = f_->mul(x, s);
  return m;
}

bool Mat::operator<(const Mat& o) const {
  if (r_ != o.r_) return r_ < o.r_;
  if (c_ != o.c_) return c_ < o.c_;
  for (size_t i = 0; i < a_.size(); ++i)
    if (a_[i].v != o.a_[i].v) return a_[i].v < o.a_[i].v;
  return false;
}

Mat Mat::transpose() const {
  Mat m(f_, c_, r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) m.at(j, i) = at(i, j);
  return m;
}

Mat Mat::inverse() const {
  if (!square()) throw IncompatibleDegree("inverse of non-square matrix");
  int n = r_;
  const auto& F = *f_;
  Mat a = *this, b = identity(f_, n);
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (a.at(r, c).v) {
        piv = r;
        break;
      }
    if (piv < 0) throw ZeroElement("singular matrix");
    if (piv != c)
      for (int j = 0; j < n; ++j) {
        std::swap(a.at(piv, j), a.at(c, j));
        std::swap(b.at(piv, j), b.at(c, j));
      }
    Fq iv = F.inv(a.at(c, c));
    for (int j = 0; j < n; ++j) {
      a.at(c, j) = F.mul(a.at(c, j), iv);
      b.at(c, j) = F.mul(b.at(c, j), iv);
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || a.at(r, c).v == 0) continue;
      Fq t = a.at(r, c);
      for (int j = 0; j < n; ++j) {
        a.at(r, j) = F.sub(a.at(r, j), F.mul(t, a.at(c, j)));
        b.at(r, j) = F.sub(b.at(r, j), F.mul(t, b.at(c, j)));
      }
    }
  }
  return b;
}

Mat Mat::pow(std::int64_t e) const {
  Mat base = e < 0 ? inverse() : *this;
  u64 k = static_cast<u64>(e < 0 ? -e : e);
  Mat r = identity(f_, r_);
  while (k) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

Mat Mat::frob(unsigned i) const {
  Mat m = *this;
  for (auto& x : m.a_) x = f_->frob(x, i);
  return m;
}

Mat Mat::entry_pow(u64 e) const {
  Mat m = *this;
  for (auto& x : m.a_) x = f_->pow(x, e);
  return m;
}

Fq Mat::det() const {
  if (!square()) throw IncompatibleDegree("det of non-square matrix");
  int n = r_;
  const auto& F = *f_;
  Mat a = *this;
  Fq d{1};
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (a.at(r, c).v) {
        piv = r;
        break;
      }
    if (piv < 0) return Fq{0};
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a.at(piv, j), a.at(c, j));
      d = F.neg(d);
    }
    d = F.mul(d, a.at(c, c));
    Fq iv = F.inv(a.at(c, c));
    for (int r = c + 1; r < n; ++r) {
      if (a.at(r, c).v == 0) continue;
      Fq t = F.mul(a.at(r, c), iv);
      for (int j = c; j < n; ++j) a.at(r, j) = F.sub(a.at(r, j), F.mul(t, a.at(c, j)));
    }
  }
  return d;
}

Mat Mat::rref(std::vector<int>* pivots) const {
  const auto& F = *f_;
  Mat a = *this;
  int row = 0;
  std::vector<int> piv;
  for (int c = 0; c < c_ && row < r_; ++c) {
    int p = -1;
    for (int r = row; r < r_; ++r)
      if (a.at(r, c).v) {
        p = r;
        break;
      }
    if (p < 0) continue;
    if (p != row)
      for (int j = 0; j < c_; ++j) std::swap(a.at(p, j), a.at(row, j));
    Fq iv = F.inv(a.at(row, c));
    for (int j = 0; j < c_; ++j) a.at(row, j) = F.mul(a.at(row, j), iv);
    for (int r = 0; r < r_; ++r) {
      if (r == row || a.at(r, c).v == 0) continue;
      Fq t = a.at(r, c);
      for (int j = 0; j < c_; ++j) a.at(r, j) = F.sub(a.at(r, j), F.mul(t, a.at(row, j)));
    }
    piv.push_back(c);
    ++row;
  }
  if (pivots) *pivots = piv;
  return a;
}

int Mat::rank() const {
  std::vector<int> piv;
  rref(&piv);
  return static_cast<int>(piv.size());
}

Mat Mat::left_kernel() const {
  // v * M = 0  <=>  M^T v^T = 0
  Mat t = transpose();
  std::vector<int> piv;
  Mat r = t.rref(&piv);
  int n = t.cols();
  std::vector<bool> is_piv(n, false);
  for (int p : piv) is_piv[p] = true;
  std::vector<Vec> basis;
  for (int fcol = 0; fcol < n; ++fcol) {
    if (is_piv[fcol]) continue;
    Vec v(n, Fq{0});
    v[fcol] = Fq{1};
    for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = f_->neg(r.at(static_cast<int>(i), fcol));
    basis.push_back(v);
  }
  if (basis.empty()) return Mat(f_, 0, n);
  return from_rows(f_, basis);
}

Mat Mat::block_diag(const Mat& o) const {
  Mat m(f_, r_ + o.r_, c_ + o.c_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) m.at(i, j) = at(i, j);
  for (int i = 0; i < o.r_; ++i)
    for (int j = 0; j < o.c_; ++j) m.at(r_ + i, c_ + j) = o.at(i, j);
  return m;
}

Mat Mat::submatrix(int r0, int c0, int nr, int nc) const {
  Mat m(f_, nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) m.at(i, j) = at(r0 + i, c0 + j);
  return m;
}

bool Mat::is_identity() const { return square() && *this == identity(f_, r_); }

bool Mat::is_scalar() const {
  if (!square()) return false;
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) {
      if (i != j && at(i, j).v) return false;
      if (i == j && at(i, j) != at(0, 0)) return false;
    }
  return true;
}

u64 Mat::order() const {
  if (det().v == 0) throw ZeroElement("order of singular matrix");
  // The order divides lcm(q^d - 1 over irreducible factor degrees d) * p^t.
  unsigned __int128 n = 1;
  u64 q = f_->q();
  int maxmult = 1;
  for (auto& [g, m] : poly_factor(charpoly(*this))) {
    maxmult = std::max(maxmult, m);
    auto qd = checked_pow(q, static_cast<unsigned>(g.degree()));
    if (!qd) throw TooLarge("matrix order bound overflows");
    u64 a = *qd - 1;
    u64 cur = static_cast<u64>(n);
    u64 gg = std::gcd(cur, a);
    n = static_cast<unsigned __int128>(cur / gg) * a;
    if (n > UINT64_MAX) throw TooLarge("matrix order bound overflows");
  }
  u64 pt = 1;
  while (pt < static_cast<u64>(maxmult)) pt *= f_->p();
  n *= pt;
  if (n > UINT64_MAX) throw TooLarge("matrix order bound overflows");
  u64 ord = static_cast<u64>(n);
  for (auto [r, e] : factorize(ord)) {
    (void)e;
    while (ord % r == 0 && pow(static_cast<std::int64_t>(ord / r)).is_identity()) ord /= r;
  }
  return ord;
}

std::string Mat::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < r_; ++i) {
    if (i) os << ';';
    for (int j = 0; j < c_; ++j) {
      if (j) os << ' ';
      os << f_->to_string(at(i, j));
    }
  }
  return os.str();
}

Mat Mat::parse(FieldPtr f, const std::string& s) {
  std::vector<Vec> rows;
  std::stringstream ss(s);
  std::string rowtxt;
  while (std::getline(ss, rowtxt, ';')) {
    std::istringstream rs(rowtxt);
    std::string tok;
    Vec r;
    while (rs >> tok) r.push_back(f->parse(tok));
    if (r.empty()) throw ParseError("empty matrix row");
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError("empty matrix");
  return from_rows(std::move(f), rows);
}

Vec vec_mul(const Vec& v, const Mat& m) {
  const auto& F = *m.field();
  Vec r(m.cols(), Fq{0});
  for (int i = 0; i < m.rows(); ++i) {
    if (v[i].v == 0) continue;
    for (int j = 0; j < m.cols(); ++j) r[j] = F.add(r[j], F.mul(v[i], m.at(i, j)));
  }
  return r;
}

Vec vec_add(const FieldPtr& f, const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = f->add(a[i], b[i]);
  return r;
}

Vec vec_scale(const FieldPtr& f, const Vec& a, Fq s) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = f->mul(a[i], s);
  return r;
}

Fq dot(const FieldPtr& f, const Vec& a, const Vec& b) {
  Fq acc{0};
  for (size_t i = 0; i < a.size(); ++i) acc = f->add(acc, f->mul(a[i], b[i]));
  return acc;
}

Mat companion(const Poly& f) {
  const auto& F = f.field();
  int n = f.degree();
  Poly g = f.monic();
  Mat m(F, n, n);
  // Row i is x * x^i reduced: x^i -> x^(i+1); last row -> -(c_0, ..., c_{n-1}).
  for (int i = 0; i + 1 < n; ++i) m.at(i, i + 1) = Fq{1};
  for (int j = 0; j < n; ++j) m.at(n - 1, j) = F->neg(g.coeff(j));
  return m;
}

Poly charpoly(const Mat& m0) {
  const auto& F = *m0.field();
  int n = m0.rows();
  Mat h = m0;
  // Reduce to upper Hessenberg form by similarity.
  for (int c = 0; c < n - 2; ++c) {
    int piv = -1;
    for (int r = c + 1; r < n; ++r)
      if (h.at(r, c).v) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != c + 1) {
      for (int j = 0; j < n; ++j) std::swap(h.at(piv, j), h.at(c + 1, j));
      for (int i = 0; i < n; ++i) std::swap(h.at(i, piv), h.at(i, c + 1));
    }
    Fq iv = F.inv(h.at(c + 1, c));
    for (int r = c + 2; r < n; ++r) {
      Fq t = F.mul(h.at(r, c), iv);
      if (t.v == 0) continue;
      for (int j = 0; j < n; ++j) h.at(r, j) = F.sub(h.at(r, j), F.mul(t, h.at(c + 1, j)));
      for (int i = 0; i < n; ++i) h.at(i, c + 1) = F.add(h.at(i, c + 1), F.mul(t, h.at(i, r)));
    }
  }
  const auto& fp = m0.field();
  std::vector<Poly> p(n + 1, Poly(fp));
  p[0] = Poly::constant(fp, Fq{1});
  Poly x = Poly::x(fp);
  for (int k = 1; k <= n; ++k) {
    p[k] = (x - Poly::constant(fp, h.at(k - 1, k - 1))) * p[k - 1];
    Fq prod{1};
    for (int i = k - 1; i >= 1; --i) {
      prod = F.mul(prod, h.at(i, i - 1));
      Fq coef = F.mul(prod, h.at(i - 1, k - 1));
      if (coef.v) p[k] = p[k] - p[i - 1].scaled(coef);
    }
  }
  return p[n];
}

std::vector<Poly> invariant_factors(const Mat& m) {
  const auto& fp = m.field();
  int n = m.rows();
  std::vector<std::vector<Poly>> a(n, std::vector<Poly>(n, Poly(fp)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Poly e = Poly::constant(fp, fp->neg(m.at(i, j)));
      if (i == j) e = e + Poly::x(fp);
      a[i][j] = e;
    }
  for (int k = 0; k < n; ++k) {
    while (true) {
      // Smallest-degree nonzero entry in the trailing block goes to (k,k).
      int bi = -1, bj = -1, bd = 1 << 30;
      for (int i = k; i < n; ++i)
        for (int j = k; j < n; ++j)
          if (!a[i][j].is_zero() && a[i][j].degree() < bd) {
            bd = a[i][j].degree();
            bi = i;
            bj = j;
          }
      if (bi < 0) break;
      std::swap(a[k], a[bi]);
      for (int i = 0; i < n; ++i) std::swap(a[i][k], a[i][bj]);
      bool clean = true;
      for (int i = k + 1; i < n; ++i) {
        if (a[i][k].is_zero()) continue;
        Poly qt = a[i][k] / a[k][k];
        for (int j = k; j < n; ++j) a[i][j] = a[i][j] - qt * a[k][j];
        if (!a[i][k].is_zero()) clean = false;
      }
      for (int j = k + 1; j < n; ++j) {
        if (a[k][j].is_zero()) continue;
        Poly qt = a[k][j] / a[k][k];
        for (int i = k; i < n; ++i) a[i][j] = a[i][j] - a[i][k] * qt;
        if (!a[k][j].is_zero()) clean = false;
      }
      if (!clean) continue;
      // Divisibility of the remaining block by the pivot.
      bool divides = true;
      for (int i = k + 1; i < n && divides; ++i)
        for (int j = k + 1; j < n; ++j)
          if (!(a[i][j] % a[k][k]).is_zero()) {
            for (int jj = k; jj < n; ++jj) a[k][jj] = a[k][jj] + a[i][jj];
            divides = false;
            break;
          }
      if (divides) break;
    }
  }
  std::vector<Poly> out;
  for (int k = 0; k < n; ++k) {
    Poly d = a[k][k].monic();
    if (d.degree() > 0) out.push_back(d);
  }
  std::sort(out.begin(), out.end(), [](const Poly& x, const Poly& y) { return x.degree() < y.degree(); });
  return out;
}

Poly min_poly(const Mat& m) {
  auto inv = invariant_factors(m);
  if (inv.empty()) return Poly::constant(m.field(), Fq{1});
  return inv.back();
}

Mat map_entries(const Mat& m, const Embedding& emb) {
  Mat r(emb.big(), m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r.at(i, j) = emb.up(m.at(i, j));
  return r;
}

Mat map_entries_down(const Mat& m, const Embedding& emb) {
  Mat r(emb.small(), m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r.at(i, j) = emb.down_checked(m.at(i, j));
  return r;
}

namespace {

struct CoordSolver {
  Mat inv;  // over the prime field
  unsigned ks = 0, d = 0;
};

const CoordSolver& coord_solver(const Embedding& emb) {
  static std::mutex mu;
  static std::map<const Embedding*, CoordSolver> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(&emb);
  if (it != cache.end()) return it->second;
  const auto& B = *emb.big();
  const auto& S = *emb.small();
  auto fp = FieldCtx::make(B.p(), 1);
  unsigned K = B.k(), ks = S.k(), d = K / ks;
  Mat a(fp, static_cast<int>(K), static_cast<int>(K));
  Fq t{1};
  for (unsigned j = 0; j < d; ++j) {
    for (unsigned s = 0; s < ks; ++s) {
      // s-th digit basis element of the small field, times t^j
      std::vector<std::uint32_t> dg(ks, 0);
      dg[s] = 1;
      Fq small_basis = S.from_digits(dg);
      Fq val = B.mul(emb.up(small_basis), t);
      auto digs = B.digits(val);
      for (unsigned c = 0; c < K; ++c) a.at(static_cast<int>(j * ks + s), static_cast<int>(c)) = Fq{digs[c]};
    }
    t = B.mul(t, B.alpha());
  }
  CoordSolver cs{a.inverse(), ks, d};
  auto [ins, ok] = cache.emplace(&emb, cs);
  return ins->second;
}

}  // namespace

std::vector<Fq> subfield_coords(const Embedding& emb, Fq x) {
  const auto& cs = coord_solver(emb);
  const auto& B = *emb.big();
  auto fp = cs.inv.field();
  auto digs = B.digits(x);
  Vec v(digs.size());
  for (size_t i = 0; i < digs.size(); ++i) v[i] = Fq{digs[i]};
  Vec c = vec_mul(v, cs.inv);
  std::vector<Fq> out(cs.d);
  for (unsigned j = 0; j < cs.d; ++j) {
    std::vector<std::uint32_t> dg(cs.ks);
    for (unsigned s = 0; s < cs.ks; ++s) dg[s] = c[j * cs.ks + s].v;
    out[j] = emb.small()->from_digits(dg);
  }
  return out;
}

Mat restrict_scalars(const Mat& m, const Embedding& emb) {
  const auto& B = *emb.big();
  int n = m.rows();
  int d = static_cast<int>(emb.degree());
  Mat r(emb.small(), n * d, m.cols() * d);
  Fq t = B.alpha();
  for (int i = 0; i < n; ++i) {
    Fq tj{1};
    for (int j = 0; j < d; ++j) {
      for (int c = 0; c < m.cols(); ++c) {
        auto co = subfield_coords(emb, B.mul(tj, m.at(i, c)));
        for (int s = 0; s < d; ++s) r.at(i * d + j, c * d + s) = co[s];
      }
      tj = B.mul(tj, t);
    }
  }
  return r;
}

std::vector<Mat> all_subspaces(const FieldPtr& f, int n, int k) {
  std::vector<Mat> out;
  if (k == 0) {
    out.push_back(Mat(f, 0, n));
    return out;
  }
  std::vector<int> piv(k);
  for (int i = 0; i < k; ++i) piv[i] = i;
  u64 q = f->q();
  while (true) {
    // Free positions: (row i, column j) with j > piv[i] and j not a pivot.
    std::vector<std::pair<int, int>> freepos;
    std::vector<bool> isp(n, false);
    for (int p : piv) isp[p] = true;
    for (int i = 0; i < k; ++i)
      for (int j = piv[i] + 1; j < n; ++j)
        if (!isp[j]) freepos.push_back({i, j});
    std::vector<std::uint32_t> odo(freepos.size(), 0);
    while (true) {
      Mat m(f, k, n);
      for (int i = 0; i < k; ++i) m.at(i, piv[i]) = Fq{1};
      for (size_t t = 0; t < freepos.size(); ++t) m.at(freepos[t].first, freepos[t].second) = Fq{odo[t]};
      out.push_back(m);
      size_t t = 0;
      while (t < odo.size() && ++odo[t] == q) odo[t++] = 0;
      if (t == odo.size()) break;
    }
    int i = k - 1;
    while (i >= 0 && piv[i] == n - k + i) --i;
    if (i < 0) break;
    ++piv[i];
    for (int j = i + 1; j < k; ++j) piv[j] = piv[j - 1] + 1;
  }
  return out;
}

Mat span_rref(const Mat& rows) {
  std::vector<int> piv;
  Mat r = rows.rref(&piv);
  return r.submatrix(0, 0, static_cast<int>(piv.size()), rows.cols());
}

bool subspace_invariant(const Mat& basis_rref, const Mat& g) {
  int k = basis_rref.rows();
  if (k == 0) return true;
  Mat img = basis_rref * g;
  std::vector<Vec> rows;
  for (int i = 0; i < k; ++i) rows.push_back(basis_rref.row(i));
  for (int i = 0; i < k; ++i) rows.push_back(img.row(i));
  return Mat::from_rows(basis_rref.field(), rows).rank() == k;
}

}  // namespace spreadlab
