#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spreadlab/numtheory.hpp"

namespace spreadlab {

// A field element: its base-p digits packed as an integer in [0, q).
// Digit i is the coefficient of alpha^i in the defining-polynomial basis.
struct Fq {
  std::uint32_t v = 0;
  friend bool operator==(Fq a, Fq b) { return a.v == b.v; }
  friend bool operator!=(Fq a, Fq b) { return a.v != b.v; }
  friend bool operator<(Fq a, Fq b) { return a.v < b.v; }
};

class FieldCtx;
using FieldPtr = std::shared_ptr<const FieldCtx>;

class FieldCtx {
 public:
  // Cached factory. Without an explicit polynomial the lexicographically least
  // monic primitive polynomial (low degree compared first) is used.
  static FieldPtr make(std::uint32_t p, unsigned k,
                       const std::optional<std::vector<std::uint32_t>>& poly = std::nullopt);

  std::uint32_t p() const { return p_; }
  unsigned k() const { return k_; }
  std::uint32_t q() const { return q_; }
  const std::vector<std::uint32_t>& defining_poly() const { return poly_; }
  bool poly_is_primitive() const { return primitive_; }

  Fq zero() const { return {0}; }
  Fq one() const { return {1}; }
  Fq from_int(std::int64_t n) const;
  Fq alpha() const { return alpha_; }
  // Element of order (q-1)_2; odd q only.
  Fq beta() const;
  bool odd() const { return p_ != 2; }

  Fq add(Fq a, Fq b) const;
  Fq sub(Fq a, Fq b) const;
  Fq neg(Fq a) const;
  Fq mul(Fq a, Fq b) const;
  Fq inv(Fq a) const;
  Fq div(Fq a, Fq b) const { return mul(a, inv(b)); }
  Fq pow(Fq a, u64 e) const;
  // x -> x^(p^i)
  Fq frob(Fq a, unsigned i = 1) const;

  u64 order(Fq a) const;
  bool is_square(Fq a) const;
  // Some square root, if a is a square.
  std::optional<Fq> sqrt(Fq a) const;

  std::vector<std::uint32_t> digits(Fq a) const;
  Fq from_digits(const std::vector<std::uint32_t>& d) const;
  std::string to_string(Fq a) const;
  Fq parse(const std::string& s) const;

  // Factorization of q - 1, cached.
  const std::map<u64, int>& unit_group_factors() const { return qm1_factors_; }

 private:
  FieldCtx() = default;
  void build(std::uint32_t p, unsigned k, std::vector<std::uint32_t> poly);
  Fq mul_poly(Fq a, Fq b) const;

  std::uint32_t p_ = 0;
  unsigned k_ = 0;
  std::uint32_t q_ = 0;
  std::vector<std::uint32_t> poly_;
  bool primitive_ = false;
  Fq alpha_{};
  std::vector<std::uint32_t> pw_;  // p^i
  std::vector<std::uint32_t> log_, exp_;
  std::vector<std::uint32_t> addtab_;
  std::map<u64, int> qm1_factors_;
};

// An embedding of a subfield small -> big, sending small's alpha to the least
// root (by packed value) of small's defining polynomial in big.
class Embedding {
 public:
  Embedding(FieldPtr small, FieldPtr big);
  const FieldPtr& small() const { return small_; }
  const FieldPtr& big() const { return big_; }
  unsigned degree() const { return big_->k() / small_->k(); }
  Fq up(Fq a) const;
  std::optional<Fq> down(Fq b) const;
  Fq down_checked(Fq b) const;
  bool in_image(Fq b) const { return down(b).has_value(); }

 private:
  FieldPtr small_, big_;
  std::vector<Fq> image_;
  std::unordered_map<std::uint32_t, std::uint32_t> preimage_;
};

// Quadratic extension of F_q with the distinguished xi of order q+1 (8 if q=3).
struct QuadExt {
  FieldPtr base;
  FieldPtr ext;
  std::shared_ptr<const Embedding> emb;
  Fq xi;
  // x -> x^q on the extension
  Fq bar(Fq a) const { return ext->pow(a, base->q()); }
};
std::shared_ptr<const QuadExt> quad_ext(const FieldPtr& f);
std::shared_ptr<const Embedding> embedding(const FieldPtr& small, const FieldPtr& big);

// x^((Q^d - 1)/(Q - 1)) for x in the big field of emb, Q = |small|, returned in small.
Fq norm_map(const Embedding& emb, Fq x);
Fq trace_map(const Embedding& emb, Fq x);

// Univariate polynomial over a FieldCtx; coefficients low degree first.
class Poly {
 public:
  Poly() = default;
  explicit Poly(FieldPtr f) : f_(std::move(f)) {}
  Poly(FieldPtr f, std::vector<Fq> c);
  static Poly constant(FieldPtr f, Fq c);
  static Poly x(FieldPtr f);
  static Poly monomial(FieldPtr f, unsigned d, Fq c);

  const FieldPtr& field() const { return f_; }
  const std::vector<Fq>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  Fq lead() const;
  Fq coeff(unsigned i) const { return i < c_.size() ? c_[i] : Fq{0}; }
  Fq eval(Fq x) const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly scaled(Fq c) const;
  Poly monic() const;
  Poly derivative() const;
  std::pair<Poly, Poly> divmod(const Poly& d) const;
  Poly operator%(const Poly& d) const { return divmod(d).second; }
  Poly operator/(const Poly& d) const { return divmod(d).first; }
  bool operator==(const Poly& o) const { return c_ == o.c_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }
  bool operator<(const Poly& o) const;

  std::string to_string() const;
  static Poly parse(FieldPtr f, const std::string& s);
  // Human-readable form, e.g. x^2+x+a2 style; used in reports.
  std::string pretty() const;

 private:
  void trim();
  FieldPtr f_;
  std::vector<Fq> c_;
};

Poly gcd(Poly a, Poly b);
Poly powmod(const Poly& base, u64 e, const Poly& m);
Poly powmod_big(const Poly& base, const std::vector<u64>& e_le, const Poly& m);

// Irreducible factors with multiplicity, monic, sorted; the leading unit is dropped.
std::vector<std::pair<Poly, int>> poly_factor(const Poly& f);
bool is_irreducible(const Poly& f);
bool is_squarefree(const Poly& f);
// Roots in the coefficient field, sorted by packed value.
std::vector<Fq> poly_roots(const Poly& f);
// Map coefficients through an embedding.
Poly poly_up(const Poly& f, const Embedding& emb);
// Minimal polynomial over emb.small() of an element of emb.big().
Poly min_poly(const Embedding& emb, Fq x);

}  // namespace spreadlab
