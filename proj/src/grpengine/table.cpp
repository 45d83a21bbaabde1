#include <numeric>

#include "spreadlab/errors.hpp"
#include "spreadlab/grpengine.hpp"

namespace spreadlab {

namespace {

constexpr std::uint32_t kEmpty = 0xffffffffu;
// Keep the flat image store below ~1.5 GB.
constexpr std::size_t kMaxCells = std::size_t{768} << 20;

}  // namespace

ElementTable::ElementTable(const StabChain& chain) : deg_(chain.degree()), base_(chain.base()) {
  u64 n = chain.order();
  if (deg_ > 65536) throw TooLarge("degree too large for an element table");
  if (n > 0xfffffff0u || n * deg_ > kMaxCells) throw TooLarge("element table would be too large");
  n_ = static_cast<std::uint32_t>(n);

  // Level by level: S_l[k + |O_l| j] = S_{l+1}[j] * u_l[k].
  std::vector<std::uint16_t> cur(deg_);
  std::iota(cur.begin(), cur.end(), std::uint16_t{0});
  std::size_t cnt = 1;
  for (std::size_t l = chain.depth(); l-- > 0;) {
    std::size_t m = chain.orbit(l).size();
    std::vector<std::uint16_t> nxt(cnt * m * deg_);
    for (std::size_t j = 0; j < cnt; ++j) {
      const std::uint16_t* s = &cur[j * deg_];
      for (std::size_t k = 0; k < m; ++k) {
        const Perm& u = chain.transversal(l, k);
        std::uint16_t* d = &nxt[(k + m * j) * deg_];
        for (std::size_t x = 0; x < deg_; ++x) d[x] = static_cast<std::uint16_t>(u[s[x]]);
      }
    }
    cur = std::move(nxt);
    cnt *= m;
  }
  data_ = std::move(cur);

  std::size_t cap = 1;
  while (cap < 2 * static_cast<std::size_t>(n_)) cap <<= 1;
  slots_.assign(cap, kEmpty);
  mask_ = cap - 1;
  std::vector<Point> imgs(base_.size());
  for (std::uint32_t i = 0; i < n_; ++i) {
    for (std::size_t b = 0; b < base_.size(); ++b) imgs[b] = data_[static_cast<std::size_t>(i) * deg_ + base_[b]];
    std::uint64_t h = hash_images(imgs.data()) & mask_;
    while (slots_[h] != kEmpty) h = (h + 1) & mask_;
    slots_[h] = i;
  }

  inv_.resize(n_);
  ord_.resize(n_);
  std::vector<Point> tmp(deg_);
  std::vector<bool> seen(deg_);
  for (std::uint32_t i = 0; i < n_; ++i) {
    const std::uint16_t* d = &data_[static_cast<std::size_t>(i) * deg_];
    for (std::size_t b = 0; b < base_.size(); ++b) {
      // a^-1(beta): position of beta among the images
      Point beta = base_[b];
      for (std::size_t x = 0; x < deg_; ++x)
        if (d[x] == beta) {
          imgs[b] = static_cast<Point>(x);
          break;
        }
    }
    inv_[i] = lookup(imgs.data());
    std::fill(seen.begin(), seen.end(), false);
    u64 o = 1;
    for (std::size_t x = 0; x < deg_; ++x) {
      if (seen[x]) continue;
      u64 len = 0;
      for (std::size_t y = x; !seen[y]; y = d[y]) {
        seen[y] = true;
        ++len;
      }
      o = std::lcm(o, len);
    }
    ord_[i] = static_cast<std::uint32_t>(o);
  }
}

std::uint64_t ElementTable::hash_images(const Point* imgs) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (std::size_t b = 0; b < base_.size(); ++b) {
    h ^= imgs[b] + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
  }
  return h ^ (h >> 29);
}

std::uint32_t ElementTable::lookup(const Point* imgs) const {
  std::uint64_t h = hash_images(imgs) & mask_;
  while (true) {
    std::uint32_t i = slots_[h];
    if (i == kEmpty) return kEmpty;
    bool eq = true;
    for (std::size_t b = 0; b < base_.size() && eq; ++b) eq = data_[static_cast<std::size_t>(i) * deg_ + base_[b]] == imgs[b];
    if (eq) return i;
    h = (h + 1) & mask_;
  }
}

std::optional<std::uint32_t> ElementTable::find(const Perm& g) const {
  if (g.degree() != deg_) return std::nullopt;
  std::vector<Point> imgs(base_.size());
  for (std::size_t b = 0; b < base_.size(); ++b) imgs[b] = g[base_[b]];
  std::uint32_t i = lookup(imgs.data());
  if (i == kEmpty) return std::nullopt;
  const std::uint16_t* d = &data_[static_cast<std::size_t>(i) * deg_];
  for (std::size_t x = 0; x < deg_; ++x)
    if (d[x] != g[static_cast<Point>(x)]) return std::nullopt;
  return i;
}

std::uint32_t ElementTable::index_of(const Perm& g) const {
  auto i = find(g);
  if (!i) throw NotBijection("permutation is not in the group");
  return *i;
}

Perm ElementTable::perm(std::uint32_t i) const {
  const std::uint16_t* d = &data_[static_cast<std::size_t>(i) * deg_];
  return Perm(std::vector<Point>(d, d + deg_));
}

std::uint32_t ElementTable::mul(std::uint32_t a, std::uint32_t b) const {
  Point imgs[64];
  std::vector<Point> big;
  Point* p = imgs;
  if (base_.size() > 64) {
    big.resize(base_.size());
    p = big.data();
  }
  const std::uint16_t* da = &data_[static_cast<std::size_t>(a) * deg_];
  const std::uint16_t* db = &data_[static_cast<std::size_t>(b) * deg_];
  for (std::size_t k = 0; k < base_.size(); ++k) p[k] = db[da[base_[k]]];
  return lookup(p);
}

std::uint32_t ElementTable::conj(std::uint32_t x, std::uint32_t g) const { return mul(mul(inv_[g], x), g); }

std::uint32_t ElementTable::pow(std::uint32_t a, u64 e) const {
  std::uint32_t acc = 0, b = a;
  e %= ord_[a];
  while (e) {
    if (e & 1) acc = mul(acc, b);
    b = mul(b, b);
    e >>= 1;
  }
  return acc;
}

}  // namespace spreadlab
