#include <algorithm>
#include <random>
#include <sstream>

#include "spreadlab/errors.hpp"
#include "spreadlab/gfpoly.hpp"

namespace spreadlab {

Poly::Poly(FieldPtr f, std::vector<Fq> c) : f_(std::move(f)), c_(std::move(c)) { trim(); }

Poly Poly::constant(FieldPtr f, Fq c) { return Poly(std::move(f), {c}); }
Poly Poly::x(FieldPtr f) { return Poly(std::move(f), {Fq{0}, Fq{1}}); }
Poly Poly::monomial(FieldPtr f, unsigned d, Fq c) {
  std::vector<Fq> v(d + 1, Fq{0});
  v[d] = c;
  return Poly(std::move(f), std::move(v));
}

void Poly::trim() {
  while (!c_.empty() && c_.back().v == 0) c_.pop_back();
}

Fq Poly::lead() const {
  if (c_.empty()) throw ZeroPolynomial("leading coefficient of zero polynomial");
  return c_.back();
}

Fq Poly::eval(Fq x) const {
  Fq acc{0};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = f_->add(f_->mul(acc, x), *it);
  return acc;
}

Poly Poly::operator+(const Poly& o) const {
  const auto& F = f_ ? f_ : o.f_;
  std::vector<Fq> r(std::max(c_.size(), o.c_.size()), Fq{0});
  for (size_t i = 0; i < r.size(); ++i) r[i] = F->add(coeff(i), o.coeff(i));
  return Poly(F, r);
}

Poly Poly::operator-(const Poly& o) const {
  const auto& F = f_ ? f_ : o.f_;
  std::vector<Fq> r(std::max(c_.size(), o.c_.size()), Fq{0});
  for (size_t i = 0; i < r.size(); ++i) r[i] = F->sub(coeff(i), o.coeff(i));
  return Poly(F, r);
}

Poly Poly::operator*(const Poly& o) const {
  const auto& F = f_ ? f_ : o.f_;
  if (c_.empty() || o.c_.empty()) return Poly(F);
  std::vector<Fq> r(c_.size() + o.c_.size() - 1, Fq{0});
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].v == 0) continue;
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] = F->add(r[i + j], F->mul(c_[i], o.c_[j]));
  }
  return Poly(F, r);
}

Poly Poly::scaled(Fq c) const {
  std::vector<Fq> r = c_;
  for (auto& x : r) x = f_->mul(x, c);
  return Poly(f_, r);
}

Poly Poly::monic() const {
  if (c_.empty()) return *this;
  return scaled(f_->inv(lead()));
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly(f_);
  std::vector<Fq> r(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = f_->mul(c_[i], f_->from_int(static_cast<std::int64_t>(i)));
  return Poly(f_, r);
}

std::pair<Poly, Poly> Poly::divmod(const Poly& d) const {
  if (d.is_zero()) throw ZeroPolynomial("division by zero polynomial");
  const auto& F = d.f_;
  std::vector<Fq> r = c_;
  int dd = d.degree();
  if (degree() < dd) return {Poly(F), *this};
  std::vector<Fq> qv(degree() - dd + 1, Fq{0});
  Fq il = F->inv(d.lead());
  for (int i = degree(); i >= dd; --i) {
    Fq c = F->mul(r[i], il);
    qv[i - dd] = c;
    if (c.v == 0) continue;
    for (int j = 0; j <= dd; ++j) r[i - dd + j] = F->sub(r[i - dd + j], F->mul(c, d.c_[j]));
  }
  r.resize(dd);
  return {Poly(F, qv), Poly(F, r)};
}

bool Poly::operator<(const Poly& o) const {
  if (degree() != o.degree()) return degree() < o.degree();
  for (int i = degree(); i >= 0; --i) {
    if (c_[i].v != o.c_[i].v) return c_[i].v < o.c_[i].v;
  }
  return false;
}

std::string Poly::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (i) os << ' ';
    os << f_->to_string(c_[i]);
  }
  return os.str();
}

Poly Poly::parse(FieldPtr f, const std::string& s) {
  std::istringstream is(s);
  std::string tok;
  std::vector<Fq> c;
  while (is >> tok) c.push_back(f->parse(tok));
  return Poly(std::move(f), c);
}

std::string Poly::pretty() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    if (c_[i].v == 0) continue;
    if (!first) os << " + ";
    first = false;
    std::string cs = f_->to_string(c_[i]);
    bool unit = c_[i].v == 1;
    if (f_->k() > 1) cs = "[" + cs + "]";
    if (i == 0) {
      os << cs;
    } else {
      if (!unit) os << cs << "*";
      os << "x";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

Poly powmod(const Poly& base, u64 e, const Poly& m) {
  Poly result = Poly::constant(m.field(), Fq{1}) % m;
  Poly b = base % m;
  while (e) {
    if (e & 1) result = (result * b) % m;
    b = (b * b) % m;
    e >>= 1;
  }
  return result;
}

Poly powmod_big(const Poly& base, const std::vector<u64>& e_le, const Poly& m) {
  Poly result = Poly::constant(m.field(), Fq{1}) % m;
  Poly b = base % m;
  for (u64 w : e_le) {
    for (int bit = 0; bit < 64; ++bit) {
      if (w & 1) result = (result * b) % m;
      b = (b * b) % m;
      w >>= 1;
    }
  }
  return result;
}

namespace {

// p-th root of a polynomial whose derivative vanishes.
Poly pth_root(const Poly& f) {
  const auto& F = f.field();
  unsigned p = F->p();
  std::vector<Fq> r;
  for (int i = 0; i <= f.degree(); i += static_cast<int>(p)) {
    // a^(q/p) is the inverse of the Frobenius a -> a^p.
    r.push_back(F->frob(f.coeff(i), F->k() - 1));
  }
  return Poly(F, r);
}

void squarefree(const Poly& f, int mult, std::vector<std::pair<Poly, int>>& out) {
  const auto& F = f.field();
  Poly one = Poly::constant(F, Fq{1});
  Poly c = gcd(f, f.derivative());
  Poly w = f / c;
  int i = 1;
  while (w.degree() > 0) {
    Poly y = gcd(w, c);
    Poly fac = w / y;
    if (fac.degree() > 0) out.push_back({fac.monic(), i * mult});
    w = y;
    c = c / y;
    ++i;
  }
  if (c.degree() > 0) squarefree(pth_root(c.monic()), mult * static_cast<int>(F->p()), out);
}

// Distinct-degree factorization of a squarefree monic polynomial.
std::vector<std::pair<Poly, int>> ddf(Poly f) {
  const auto& F = f.field();
  std::vector<std::pair<Poly, int>> out;
  Poly x = Poly::x(F);
  Poly h = x % f;
  for (int d = 1; 2 * d <= f.degree(); ++d) {
    h = powmod(h, F->q(), f);
    Poly g = gcd(f, h - x);
    if (g.degree() > 0) {
      out.push_back({g, d});
      f = f / g;
      h = h % f;
    }
  }
  if (f.degree() > 0) out.push_back({f.monic(), f.degree()});
  return out;
}

void edf(const Poly& f, int d, std::mt19937_64& rng, std::vector<Poly>& out) {
  if (f.degree() == d) {
    out.push_back(f.monic());
    return;
  }
  const auto& F = f.field();
  while (true) {
    std::vector<Fq> rc(f.degree());
    for (auto& c : rc) c = Fq{static_cast<std::uint32_t>(rng() % F->q())};
    Poly a(F, rc);
    if (a.degree() < 1) continue;
    Poly b(F);
    if (F->odd()) {
      // a^((q^d - 1)/2) = N(a)^((q-1)/2) with N(a) = prod a^(q^i)
      Poly n = Poly::constant(F, Fq{1});
      Poly ai = a % f;
      for (int i = 0; i < d; ++i) {
        n = (n * ai) % f;
        ai = powmod(ai, F->q(), f);
      }
      b = powmod(n, (F->q() - 1) / 2, f) - Poly::constant(F, Fq{1});
    } else {
      // Absolute trace to GF(2): sum of a^(2^i), i < k*d.
      Poly t(F);
      Poly ai = a % f;
      for (unsigned i = 0; i < F->k() * static_cast<unsigned>(d); ++i) {
        t = t + ai;
        ai = (ai * ai) % f;
      }
      b = t;
    }
    Poly g = gcd(f, b);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      edf(g, d, rng, out);
      edf(f / g, d, rng, out);
      return;
    }
  }
}

}  // namespace

std::vector<std::pair<Poly, int>> poly_factor(const Poly& f) {
  if (f.is_zero()) throw ZeroPolynomial("cannot factor the zero polynomial");
  std::vector<std::pair<Poly, int>> out;
  if (f.degree() == 0) return out;
  std::vector<std::pair<Poly, int>> sqf;
  squarefree(f.monic(), 1, sqf);
  std::mt19937_64 rng(0x5eedf00dULL);
  for (auto& [g, m] : sqf) {
    for (auto& [h, d] : ddf(g)) {
      std::vector<Poly> pieces;
      edf(h, d, rng, pieces);
      for (auto& pc : pieces) out.push_back({pc, m});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  // Merge equal factors coming from different squarefree layers.
  std::vector<std::pair<Poly, int>> merged;
  for (auto& pr : out) {
    if (!merged.empty() && merged.back().first == pr.first)
      merged.back().second += pr.second;
    else
      merged.push_back(pr);
  }
  return merged;
}

bool is_irreducible(const Poly& f) {
  if (f.degree() < 1) return false;
  auto fac = poly_factor(f);
  return fac.size() == 1 && fac[0].second == 1;
}

bool is_squarefree(const Poly& f) {
  if (f.is_zero()) return false;
  return gcd(f, f.derivative()).degree() == 0;
}

std::vector<Fq> poly_roots(const Poly& f) {
  std::vector<Fq> r;
  for (auto& [g, m] : poly_factor(f)) {
    (void)m;
    if (g.degree() == 1) r.push_back(g.field()->neg(g.coeff(0)));
  }
  std::sort(r.begin(), r.end());
  return r;
}

Poly poly_up(const Poly& f, const Embedding& emb) {
  std::vector<Fq> c;
  for (auto x : f.coeffs()) c.push_back(emb.up(x));
  return Poly(emb.big(), c);
}

Poly min_poly(const Embedding& emb, Fq x) {
  const auto& B = emb.big();
  std::vector<Fq> conj{x};
  Fq y = B->pow(x, emb.small()->q());
  while (y != x) {
    conj.push_back(y);
    y = B->pow(y, emb.small()->q());
  }
  Poly m = Poly::constant(B, Fq{1});
  for (auto c : conj) m = m * Poly(B, {B->neg(c), Fq{1}});
  std::vector<Fq> down;
  for (auto c : m.coeffs()) down.push_back(emb.down_checked(c));
  return Poly(emb.small(), down);
}

}  // namespace spreadlab
