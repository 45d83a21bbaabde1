#include "spreadlab/eltzoo.hpp"
#include "spreadlab/errors.hpp"
#include "spreadlab/numtheory.hpp"

namespace spreadlab {

namespace {

std::vector<Fq> digits_base(u64 n, u64 b, unsigned len) {
  std::vector<Fq> out(len, Fq{0});
  for (unsigned i = 0; i < len && n; ++i) {
    out[i] = Fq{static_cast<std::uint32_t>(n % b)};
    n /= b;
  }
  return out;
}

}  // namespace

ExtField::ExtField(FieldPtr base, unsigned d) : k_(std::move(base)), d_(d) {
  if (d == 0) throw IncompatibleDegree("extension degree must be positive");
  u64 Q = k_->q();
  for (u64 n = 1;; ++n) {
    auto c = digits_base(n, Q, d);
    if (c[0].v == 0) continue;
    c.push_back(k_->one());
    Poly f(k_, c);
    if (is_irreducible(f)) {
      f_ = f;
      return;
    }
  }
}

Poly ExtField::gen() const { return reduce(Poly::x(k_)); }

Poly ExtField::pow(const Poly& a, u64 e) const { return powmod(reduce(a), e, f_); }

Poly ExtField::frob(const Poly& a, unsigned i) const {
  Poly r = reduce(a);
  for (unsigned j = 0; j < i; ++j) r = pow(r, k_->q());
  return r;
}

Poly ExtField::inv(const Poly& a) const {
  // Extended Euclid: s a + t f = 1.
  Poly r0 = f_, r1 = reduce(a);
  if (r1.is_zero()) throw ZeroElement("inverse of zero");
  Poly s0(k_), s1 = one();
  while (!r1.is_zero()) {
    auto [qq, rr] = r0.divmod(r1);
    Poly s2 = s0 - qq * s1;
    r0 = r1;
    r1 = rr;
    s0 = s1;
    s1 = s2;
  }
  // r0 is a nonzero constant.
  return reduce(s0.scaled(k_->inv(r0.lead())));
}

bool ExtField::is_one(const Poly& a) const { return reduce(a) == one(); }

bool ExtField::has_order(const Poly& a, u64 n) const {
  if (!is_one(pow(a, n))) return false;
  for (auto [r, e] : factorize(n)) {
    (void)e;
    if (is_one(pow(a, n / r))) return false;
  }
  return true;
}

Poly ExtField::trace(const Poly& a, unsigned j) const {
  if (j == 0 || d_ % j) throw IncompatibleDegree("trace to a non-subfield");
  Poly acc(k_), cur = reduce(a);
  for (unsigned i = 0; i < d_ / j; ++i) {
    acc = acc + cur;
    cur = frob(cur, j);
  }
  return reduce(acc);
}

Poly ExtField::norm(const Poly& a, unsigned j) const {
  if (j == 0 || d_ % j) throw IncompatibleDegree("norm to a non-subfield");
  Poly acc = one(), cur = reduce(a);
  for (unsigned i = 0; i < d_ / j; ++i) {
    acc = mul(acc, cur);
    cur = frob(cur, j);
  }
  return acc;
}

Fq ExtField::to_base(const Poly& a) const {
  Poly r = reduce(a);
  if (r.degree() > 0) throw IncompatibleDegree("element is not in the base field");
  return r.coeff(0);
}

Vec ExtField::coords(const Poly& a) const {
  Poly r = reduce(a);
  Vec v(d_, Fq{0});
  for (unsigned i = 0; i < d_; ++i) v[i] = r.coeff(i);
  return v;
}

Poly ExtField::from_coords(const Vec& v) const { return reduce(Poly(k_, v)); }

Mat ExtField::mult_matrix(const Poly& a) const {
  std::vector<Vec> rows;
  Poly b = one(), x = gen(), ra = reduce(a);
  for (unsigned i = 0; i < d_; ++i) {
    rows.push_back(coords(mul(b, ra)));
    b = mul(b, x);
  }
  return Mat::from_rows(k_, rows);
}

u64 ExtField::order() const {
  auto r = checked_pow(k_->q(), d_);
  if (!r) throw TooLarge("extension field too large");
  return *r;
}

const Poly& ExtField::primitive() const {
  if (prim_) return *prim_;
  u64 Q = k_->q(), N = order() - 1;
  for (u64 i = 1;; ++i) {
    Poly y = from_coords(digits_base(i, Q, d_));
    if (has_order(y, N)) {
      prim_ = y;
      return *prim_;
    }
    if (i > 1000000) throw NotFoundWithinCap("no primitive element found");
  }
}

Poly ExtField::element_of_order(u64 n) const {
  u64 N = order() - 1;
  if (n == 0 || N % n) throw IncompatibleDegree("order does not divide the multiplicative group order");
  return pow(primitive(), N / n);
}

}  // namespace spreadlab
