#include <algorithm>
#include <mutex>
#include <sstream>

#include "spreadlab/errors.hpp"
#include "spreadlab/gfpoly.hpp"

namespace spreadlab {

namespace {

using Coeffs = std::vector<std::uint32_t>;

// Minimal arithmetic on polynomials over GF(p) with integer coefficients, used
// only to select the defining polynomial before a context exists.
struct PrimePoly {
  std::uint32_t p;
  void trim(Coeffs& a) const {
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  Coeffs mulmod(const Coeffs& a, const Coeffs& b, const Coeffs& f) const {
    if (a.empty() || b.empty()) return {};
    Coeffs r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return reduce(r, f);
  }
  Coeffs reduce(Coeffs r, const Coeffs& f) const {
    trim(r);
    size_t df = f.size() - 1;
    std::uint32_t inv_lead = static_cast<std::uint32_t>(powmod(f.back(), p - 2, p));
    while (r.size() > df) {
      std::uint32_t c = (r.back() * inv_lead) % p;
      size_t shift = r.size() - 1 - df;
      for (size_t i = 0; i <= df; ++i) r[shift + i] = (r[shift + i] + p - (c * f[i]) % p) % p;
      trim(r);
    }
    return r;
  }
  Coeffs powmod_x(u64 e, const Coeffs& f) const {
    Coeffs result{1}, base{0, 1};
    base = reduce(base, f);
    while (e) {
      if (e & 1) result = mulmod(result, base, f);
      base = mulmod(base, base, f);
      e >>= 1;
    }
    return result;
  }
  Coeffs sub(Coeffs a, const Coeffs& b) const {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
    trim(a);
    return a;
  }
  Coeffs gcd(Coeffs a, Coeffs b) const {
    trim(a);
    trim(b);
    while (!b.empty()) {
      Coeffs r = reduce(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    return a;
  }
  // Rabin's irreducibility test for monic f of degree k.
  bool irreducible(const Coeffs& f) const {
    unsigned k = static_cast<unsigned>(f.size() - 1);
    if (k == 1) return true;
    Coeffs x{0, 1};
    // x^(p^k) = x mod f
    Coeffs h = reduce(x, f);
    std::vector<Coeffs> powers;  // x^(p^i)
    for (unsigned i = 1; i <= k; ++i) {
      Coeffs nh{1};
      // h^p
      Coeffs b = h;
      u64 e = p;
      nh = Coeffs{1};
      while (e) {
        if (e & 1) nh = mulmod(nh, b, f);
        b = mulmod(b, b, f);
        e >>= 1;
      }
      h = nh;
      powers.push_back(h);
    }
    if (sub(powers[k - 1], reduce(x, f)).size() != 0) return false;
    for (auto [r, e] : factorize(k)) {
      (void)e;
      Coeffs g = gcd(f, sub(powers[k / r - 1], reduce(x, f)));
      if (g.size() != 1) return false;
    }
    return true;
  }
  bool primitive(const Coeffs& f, u64 qm1, const std::map<u64, int>& fac) const {
    if (!irreducible(f)) return false;
    Coeffs one{1};
    if (powmod_x(qm1, f) != one) return false;
    for (auto [r, e] : fac) {
      (void)e;
      if (powmod_x(qm1 / r, f) == one) return false;
    }
    return true;
  }
};

struct Registry {
  std::mutex mu;
  std::map<std::vector<std::uint32_t>, FieldPtr> fields;
  std::map<const FieldCtx*, std::shared_ptr<const QuadExt>> quads;
  std::map<std::pair<const FieldCtx*, const FieldCtx*>, std::shared_ptr<const Embedding>> embs;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

FieldPtr FieldCtx::make(std::uint32_t p, unsigned k,
                        const std::optional<std::vector<std::uint32_t>>& poly) {
  if (!is_prime(p)) throw NotPrime(std::to_string(p) + " is not prime");
  if (k < 1) throw IncompatibleDegree("extension degree must be >= 1");
  auto qq = checked_pow(p, k);
  if (!qq || *qq > (1u << 24)) throw TooLarge("field order too large");
  std::vector<std::uint32_t> key{p, k};
  if (poly) {
    key.push_back(1);
    key.insert(key.end(), poly->begin(), poly->end());
  }
  auto& reg = registry();
  {
    std::lock_guard<std::mutex> lock(reg.mu);
    auto it = reg.fields.find(key);
    if (it != reg.fields.end()) return it->second;
  }
  PrimePoly pp{p};
  u64 q = *qq;
  auto fac = factorize(q - 1 == 0 ? 1 : q - 1);
  Coeffs chosen;
  if (poly) {
    Coeffs f = *poly;
    if (f.size() != k + 1 || f.back() != 1) throw PolyReducible("polynomial must be monic of degree k");
    for (auto& c : f) c %= p;
    if (!pp.irreducible(f)) throw PolyReducible("supplied polynomial is reducible");
    chosen = f;
  } else {
    // Enumerate (c0, c1, ..., c_{k-1}) lexicographically with c0 most significant.
    Coeffs f(k + 1, 0);
    f[k] = 1;
    u64 total = q;
    bool found = false;
    for (u64 idx = 0; idx < total && !found; ++idx) {
      u64 t = idx;
      for (int i = static_cast<int>(k) - 1; i >= 0; --i) {
        f[i] = static_cast<std::uint32_t>(t % p);
        t /= p;
      }
      if (k > 1 && f[0] == 0) continue;
      bool prim;
      if (k == 1) {
        std::uint32_t a = (p - f[0]) % p;
        prim = a != 0 && (q == 2 || mult_order(a, p) == p - 1);
      } else {
        prim = pp.primitive(f, q - 1, fac);
      }
      if (prim) {
        chosen = f;
        found = true;
      }
    }
    if (!found) throw PolyReducible("no primitive polynomial found");
  }
  auto ctx = std::shared_ptr<FieldCtx>(new FieldCtx());
  ctx->qm1_factors_ = fac;
  ctx->build(p, k, chosen);
  std::lock_guard<std::mutex> lock(reg.mu);
  auto [it, inserted] = reg.fields.emplace(key, ctx);
  return it->second;
}

void FieldCtx::build(std::uint32_t p, unsigned k, std::vector<std::uint32_t> poly) {
  p_ = p;
  k_ = k;
  poly_ = std::move(poly);
  pw_.assign(k + 1, 1);
  for (unsigned i = 1; i <= k; ++i) pw_[i] = pw_[i - 1] * p;
  q_ = pw_[k];
  if (p != 2 && q_ <= 256) {
    addtab_.resize(static_cast<size_t>(q_) * q_);
    for (std::uint32_t a = 0; a < q_; ++a)
      for (std::uint32_t b = 0; b < q_; ++b) {
        std::uint32_t r = 0;
        for (unsigned i = 0; i < k; ++i) {
          std::uint32_t d = ((a / pw_[i]) % p + (b / pw_[i]) % p) % p;
          r += d * pw_[i];
        }
        addtab_[a * q_ + b] = r;
      }
  }
  // Root of the defining polynomial.
  Fq root{k == 1 ? (p - poly_[0]) % p : p};
  if (q_ == 2) root = Fq{1};
  // Order via repeated multiplication without tables.
  auto slow_pow = [&](Fq a, u64 e) {
    Fq r{1};
    while (e) {
      if (e & 1) r = mul_poly(r, a);
      a = mul_poly(a, a);
      e >>= 1;
    }
    return r;
  };
  auto slow_order = [&](Fq a) {
    u64 o = q_ - 1;
    for (auto [r, e] : qm1_factors_) {
      (void)e;
      while (o % r == 0 && slow_pow(a, o / r) == Fq{1}) o /= r;
    }
    return o;
  };
  primitive_ = (q_ == 2) || slow_order(root) == q_ - 1;
  alpha_ = root;
  if (!primitive_) {
    for (std::uint32_t v = 2; v < q_; ++v) {
      if (slow_order(Fq{v}) == q_ - 1) {
        alpha_ = Fq{v};
        break;
      }
    }
  }
  if (q_ <= (1u << 16)) {
    exp_.assign(2 * static_cast<size_t>(q_), 0);
    log_.assign(q_, 0);
    Fq x{1};
    for (std::uint32_t i = 0; i + 1 < q_; ++i) {
      exp_[i] = x.v;
      log_[x.v] = i;
      x = mul_poly(x, alpha_);
    }
    for (std::uint32_t i = q_ - 1; i < 2 * q_; ++i) exp_[i] = exp_[i - (q_ - 1)];
  }
}

Fq FieldCtx::mul_poly(Fq a, Fq b) const {
  if (a.v == 0 || b.v == 0) return {0};
  std::vector<std::uint32_t> da(k_), db(k_);
  for (unsigned i = 0; i < k_; ++i) {
    da[i] = (a.v / pw_[i]) % p_;
    db[i] = (b.v / pw_[i]) % p_;
  }
  std::vector<u64> r(2 * k_ - 1, 0);
  for (unsigned i = 0; i < k_; ++i)
    for (unsigned j = 0; j < k_; ++j) r[i + j] += static_cast<u64>(da[i]) * db[j];
  for (auto& c : r) c %= p_;
  for (int d = static_cast<int>(2 * k_) - 2; d >= static_cast<int>(k_); --d) {
    u64 c = r[d];
    if (!c) continue;
    r[d] = 0;
    for (unsigned i = 0; i < k_; ++i)
      r[d - k_ + i] = (r[d - k_ + i] + (p_ - poly_[i]) % p_ * c) % p_;
  }
  std::uint32_t out = 0;
  for (unsigned i = 0; i < k_; ++i) out += static_cast<std::uint32_t>(r[i]) * pw_[i];
  return {out};
}

Fq FieldCtx::from_int(std::int64_t n) const {
  std::int64_t r = n % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return {static_cast<std::uint32_t>(r)};
}

Fq FieldCtx::beta() const {
  if (!odd()) throw UnsupportedCharacteristic("beta is undefined for even q");
  return pow(alpha_, (q_ - 1) / two_part(q_ - 1));
}

Fq FieldCtx::add(Fq a, Fq b) const {
  if (p_ == 2) return {a.v ^ b.v};
  if (!addtab_.empty()) return {addtab_[a.v * q_ + b.v]};
  std::uint32_t r = 0;
  for (unsigned i = 0; i < k_; ++i) {
    std::uint32_t d = ((a.v / pw_[i]) % p_ + (b.v / pw_[i]) % p_) % p_;
    r += d * pw_[i];
  }
  return {r};
}

Fq FieldCtx::neg(Fq a) const {
  if (p_ == 2) return a;
  std::uint32_t r = 0;
  for (unsigned i = 0; i < k_; ++i) {
    std::uint32_t d = (a.v / pw_[i]) % p_;
    r += ((p_ - d) % p_) * pw_[i];
  }
  return {r};
}

Fq FieldCtx::sub(Fq a, Fq b) const { return add(a, neg(b)); }

Fq FieldCtx::mul(Fq a, Fq b) const {
  if (a.v == 0 || b.v == 0) return {0};
  if (!log_.empty()) return {exp_[log_[a.v] + log_[b.v]]};
  return mul_poly(a, b);
}

Fq FieldCtx::inv(Fq a) const {
  if (a.v == 0) throw ZeroElement("inverse of zero");
  if (!log_.empty()) return {exp_[(q_ - 1 - log_[a.v]) % (q_ - 1)]};
  return pow(a, q_ - 2);
}

Fq FieldCtx::pow(Fq a, u64 e) const {
  if (a.v == 0) return e == 0 ? Fq{1} : Fq{0};
  if (!log_.empty()) {
    u64 l = (static_cast<u64>(log_[a.v]) * (e % (q_ - 1))) % (q_ - 1);
    return {exp_[l]};
  }
  Fq r{1};
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

Fq FieldCtx::frob(Fq a, unsigned i) const {
  i %= k_;
  if (i == 0) return a;
  return pow(a, pw_[i]);
}

u64 FieldCtx::order(Fq a) const {
  if (a.v == 0) throw ZeroElement("order of zero");
  u64 o = q_ - 1;
  for (auto [r, e] : qm1_factors_) {
    (void)e;
    while (o % r == 0 && pow(a, o / r) == one()) o /= r;
  }
  return o;
}

bool FieldCtx::is_square(Fq a) const {
  if (a.v == 0 || !odd()) return true;
  return pow(a, (q_ - 1) / 2) == one();
}

std::optional<Fq> FieldCtx::sqrt(Fq a) const {
  if (a.v == 0) return Fq{0};
  if (!odd()) return pow(a, q_ / 2);
  if (!is_square(a)) return std::nullopt;
  if (!log_.empty()) return Fq{exp_[log_[a.v] / 2]};
  for (std::uint32_t v = 1; v < q_; ++v)
    if (mul(Fq{v}, Fq{v}) == a) return Fq{v};
  return std::nullopt;
}

std::vector<std::uint32_t> FieldCtx::digits(Fq a) const {
  std::vector<std::uint32_t> d(k_);
  for (unsigned i = 0; i < k_; ++i) d[i] = (a.v / pw_[i]) % p_;
  return d;
}

Fq FieldCtx::from_digits(const std::vector<std::uint32_t>& d) const {
  std::uint32_t r = 0;
  for (unsigned i = 0; i < k_ && i < d.size(); ++i) r += (d[i] % p_) * pw_[i];
  return {r};
}

std::string FieldCtx::to_string(Fq a) const {
  auto d = digits(a);
  // Trailing zero digits are omitted; zero prints as "0".
  while (d.size() > 1 && d.back() == 0) d.pop_back();
  std::ostringstream os;
  for (size_t i = 0; i < d.size(); ++i) {
    if (i) os << ',';
    os << d[i];
  }
  return os.str();
}

Fq FieldCtx::parse(const std::string& s) const {
  std::vector<std::uint32_t> d;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw ParseError("empty digit in field element '" + s + "'");
    size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
      throw ParseError("bad digit '" + tok + "'");
    }
    if (pos != tok.size() || v < 0 || v >= static_cast<long long>(p_))
      throw ParseError("digit out of range in '" + s + "'");
    d.push_back(static_cast<std::uint32_t>(v));
  }
  if (d.empty() || d.size() > k_) throw ParseError("bad field element '" + s + "'");
  return from_digits(d);
}

Embedding::Embedding(FieldPtr small, FieldPtr big) : small_(std::move(small)), big_(std::move(big)) {
  if (small_->p() != big_->p() || big_->k() % small_->k() != 0)
    throw IncompatibleDegree("not a subfield");
  const auto& sp = small_->defining_poly();
  std::vector<Fq> c;
  for (auto v : sp) c.push_back(big_->from_int(v));
  Poly f(big_, c);
  auto roots = poly_roots(f);
  if (roots.empty()) throw IncompatibleDegree("defining polynomial has no root in the big field");
  Fq r = roots.front();
  image_.resize(small_->q());
  for (std::uint32_t v = 0; v < small_->q(); ++v) {
    auto d = small_->digits(Fq{v});
    Fq acc{0}, pw{1};
    for (auto di : d) {
      acc = big_->add(acc, big_->mul(big_->from_int(di), pw));
      pw = big_->mul(pw, r);
    }
    image_[v] = acc;
    preimage_[acc.v] = v;
  }
}

Fq Embedding::up(Fq a) const { return image_.at(a.v); }

std::optional<Fq> Embedding::down(Fq b) const {
  auto it = preimage_.find(b.v);
  if (it == preimage_.end()) return std::nullopt;
  return Fq{it->second};
}

Fq Embedding::down_checked(Fq b) const {
  auto r = down(b);
  if (!r) throw IncompatibleDegree("element not in subfield");
  return *r;
}

std::shared_ptr<const Embedding> embedding(const FieldPtr& small, const FieldPtr& big) {
  auto& reg = registry();
  auto key = std::make_pair(small.get(), big.get());
  {
    std::lock_guard<std::mutex> lock(reg.mu);
    auto it = reg.embs.find(key);
    if (it != reg.embs.end()) return it->second;
  }
  auto e = std::make_shared<const Embedding>(small, big);
  std::lock_guard<std::mutex> lock(reg.mu);
  auto [it, ins] = reg.embs.emplace(key, e);
  return it->second;
}

std::shared_ptr<const QuadExt> quad_ext(const FieldPtr& f) {
  auto& reg = registry();
  {
    std::lock_guard<std::mutex> lock(reg.mu);
    auto it = reg.quads.find(f.get());
    if (it != reg.quads.end()) return it->second;
  }
  auto qe = std::make_shared<QuadExt>();
  qe->base = f;
  qe->ext = FieldCtx::make(f->p(), 2 * f->k());
  qe->emb = embedding(f, qe->ext);
  u64 q = f->q();
  u64 want = q == 3 ? 8 : q + 1;
  Fq a = qe->ext->alpha();
  for (u64 j = 1; j < qe->ext->q(); ++j) {
    Fq c = qe->ext->pow(a, j);
    if (qe->ext->order(c) == want) {
      qe->xi = c;
      break;
    }
  }
  std::lock_guard<std::mutex> lock(reg.mu);
  auto [it, ins] = reg.quads.emplace(f.get(), qe);
  return it->second;
}

Fq norm_map(const Embedding& emb, Fq x) {
  const auto& B = *emb.big();
  u64 e = (B.q() - 1) / (emb.small()->q() - 1);
  return emb.down_checked(B.pow(x, e));
}

Fq trace_map(const Embedding& emb, Fq x) {
  const auto& B = *emb.big();
  Fq acc{0}, y = x;
  for (unsigned i = 0; i < emb.degree(); ++i) {
    acc = B.add(acc, y);
    y = B.pow(y, emb.small()->q());
  }
  return emb.down_checked(acc);
}

}  // namespace spreadlab
