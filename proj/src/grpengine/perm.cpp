#include <algorithm>
#include <numeric>
#include <sstream>

#include "spreadlab/errors.hpp"
#include "spreadlab/grpengine.hpp"
#include "spreadlab/numtheory.hpp"

namespace spreadlab {

Perm::Perm(std::vector<Point> images) : img_(std::move(images)) {
  std::vector<bool> seen(img_.size(), false);
  for (Point p : img_) {
    if (p >= img_.size() || seen[p]) throw NotBijection("not a permutation of the point set");
    seen[p] = true;
  }
}

Perm Perm::identity(std::size_t n) {
  Perm p;
  p.img_.resize(n);
  std::iota(p.img_.begin(), p.img_.end(), Point{0});
  return p;
}

Perm Perm::from_cycles(std::size_t n, const std::string& s) {
  std::vector<Point> img(n);
  std::iota(img.begin(), img.end(), Point{0});
  std::vector<bool> used(n, false);
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  skip_ws();
  while (i < s.size()) {
    if (s[i] != '(') throw ParseError("expected '(' in cycle notation: " + s);
    ++i;
    std::vector<Point> cyc;
    while (true) {
      skip_ws();
      if (i < s.size() && s[i] == ')') {
        ++i;
        break;
      }
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j == i) throw ParseError("expected a point in cycle notation: " + s);
      unsigned long v = std::stoul(s.substr(i, j - i));
      if (v < 1 || v > n) throw NotBijection("point " + std::to_string(v) + " outside 1.." + std::to_string(n));
      cyc.push_back(static_cast<Point>(v - 1));
      i = j;
      skip_ws();
      if (i < s.size() && s[i] == ',') ++i;
    }
    for (std::size_t k = 0; k < cyc.size(); ++k) {
      if (used[cyc[k]]) throw NotBijection("point repeated in cycle notation: " + s);
      used[cyc[k]] = true;
      img[cyc[k]] = cyc[(k + 1) % cyc.size()];
    }
    skip_ws();
  }
  return Perm(std::move(img));
}

Perm Perm::operator*(const Perm& o) const {
  Perm r;
  r.img_.resize(img_.size());
  for (std::size_t i = 0; i < img_.size(); ++i) r.img_[i] = o.img_[img_[i]];
  return r;
}

Perm Perm::inverse() const {
  Perm r;
  r.img_.resize(img_.size());
  for (std::size_t i = 0; i < img_.size(); ++i) r.img_[img_[i]] = static_cast<Point>(i);
  return r;
}

Perm Perm::pow(std::int64_t e) const {
  Perm base = e < 0 ? inverse() : *this;
  u64 k = e < 0 ? static_cast<u64>(-e) : static_cast<u64>(e);
  Perm acc = identity(img_.size());
  while (k) {
    if (k & 1) acc = acc * base;
    base = base * base;
    k >>= 1;
  }
  return acc;
}

bool Perm::is_identity() const {
  for (std::size_t i = 0; i < img_.size(); ++i)
    if (img_[i] != i) return false;
  return true;
}

u64 Perm::order() const {
  u64 r = 1;
  for (auto c : cycle_type()) r = std::lcm(r, static_cast<u64>(c));
  return r;
}

std::size_t Perm::fixed_points() const {
  std::size_t f = 0;
  for (std::size_t i = 0; i < img_.size(); ++i) f += img_[i] == i;
  return f;
}

std::vector<std::size_t> Perm::cycle_type() const {
  std::vector<bool> seen(img_.size(), false);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < img_.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (Point j = static_cast<Point>(i); !seen[j]; j = img_[j]) {
      seen[j] = true;
      ++len;
    }
    if (len > 1) out.push_back(len);
  }
  std::sort(out.rbegin(), out.rend());
  return out;
}

std::string Perm::cycles() const {
  std::ostringstream os;
  std::vector<bool> seen(img_.size(), false);
  for (std::size_t i = 0; i < img_.size(); ++i) {
    if (seen[i] || img_[i] == i) continue;
    os << '(';
    bool first = true;
    for (Point j = static_cast<Point>(i); !seen[j]; j = img_[j]) {
      seen[j] = true;
      if (!first) os << ',';
      os << j + 1;
      first = false;
    }
    os << ')';
  }
  std::string s = os.str();
  return s.empty() ? "()" : s;
}

Perm conjugate(const Perm& x, const Perm& g) { return g.inverse() * x * g; }

std::vector<std::size_t> orbit_lengths(std::size_t degree, const std::vector<Perm>& gens) {
  std::vector<std::size_t> parent(degree);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& g : gens)
    for (std::size_t i = 0; i < degree; ++i) {
      auto a = find(i), b = find(g[static_cast<Point>(i)]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::size_t> cnt(degree, 0);
  for (std::size_t i = 0; i < degree; ++i) ++cnt[find(i)];
  std::vector<std::size_t> out;
  for (auto c : cnt)
    if (c) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

// ---- stabilizer chain ----

StabChain::StabChain(std::size_t degree, const std::vector<Perm>& gens) : degree_(degree) {
  build(gens, std::nullopt, nullptr);
}

bool StabChain::has_order(std::size_t degree, const std::vector<Perm>& gens, u64 target) {
  StabChain c;
  c.degree_ = degree;
  bool hit = false;
  c.build(gens, target, &hit);
  return hit || c.order() == target;
}

void StabChain::orbit_of(Level& L) const {
  L.orbit.assign(1, L.b);
  L.pos.assign(degree_, -1);
  L.pos[L.b] = 0;
  L.u.assign(1, Perm::identity(degree_));
  for (std::size_t k = 0; k < L.orbit.size(); ++k) {
    Point p = L.orbit[k];
    for (const auto& s : L.gens) {
      Point c = s[p];
      if (L.pos[c] >= 0) continue;
      L.pos[c] = static_cast<std::int32_t>(L.orbit.size());
      L.orbit.push_back(c);
      L.u.push_back(L.u[k] * s);
    }
  }
  L.uinv.clear();
  L.uinv.reserve(L.u.size());
  for (const auto& u : L.u) L.uinv.push_back(u.inverse());
}

std::pair<Perm, std::size_t> StabChain::sift(Perm g, std::size_t from) const {
  for (std::size_t j = from; j < levels_.size(); ++j) {
    const auto& L = levels_[j];
    Point beta = g[L.b];
    if (L.pos[beta] < 0) return {g, j};
    g = g * L.uinv[static_cast<std::size_t>(L.pos[beta])];
  }
  return {g, levels_.size()};
}

u64 StabChain::partial_order() const {
  u64 r = 1;
  for (const auto& L : levels_) {
    auto m = checked_mul(r, L.orbit.size());
    if (!m) throw TooLarge("group order overflows 64 bits");
    r = *m;
  }
  return r;
}

void StabChain::build(const std::vector<Perm>& gens_in, std::optional<u64> target, bool* hit) {
  std::vector<Perm> gens;
  for (const auto& g : gens_in) {
    if (g.degree() != degree_) throw NotBijection("generator has the wrong degree");
    if (!g.is_identity()) gens.push_back(g);
  }
  levels_.clear();
  base_.clear();
  if (gens.empty()) return;
  auto first_moved = [&](const Perm& g) {
    for (Point i = 0; i < degree_; ++i)
      if (g[i] != i) return i;
    return Point{0};
  };
  // Initial base: every generator moves some base point.
  for (const auto& g : gens) {
    bool moves = false;
    for (const auto& L : levels_) moves |= g[L.b] != L.b;
    if (!moves) {
      Level L;
      L.b = first_moved(g);
      levels_.push_back(std::move(L));
    }
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    for (const auto& g : gens) {
      bool fixes = true;
      for (std::size_t j = 0; j < i; ++j) fixes &= g[levels_[j].b] == levels_[j].b;
      if (fixes) levels_[i].gens.push_back(g);
    }
    orbit_of(levels_[i]);
  }
  if (target && partial_order() == *target) {
    if (hit) *hit = true;
    for (auto& L : levels_) base_.push_back(L.b);
    return;
  }
  std::size_t i = levels_.size();
  while (i > 0) {
    std::size_t lv = i - 1;
    bool jumped = false;
    auto& L = levels_[lv];
    for (std::size_t k = 0; k < L.orbit.size() && !jumped; ++k) {
      for (std::size_t si = 0; si < L.gens.size() && !jumped; ++si) {
        const Perm& s = L.gens[si];
        Point img = s[L.orbit[k]];
        Perm h = L.u[k] * s * L.uinv[static_cast<std::size_t>(L.pos[img])];
        if (h.is_identity()) continue;
        auto [res, j] = sift(std::move(h), lv + 1);
        if (j == levels_.size() && res.is_identity()) continue;
        if (j == levels_.size()) {
          Level nl;
          nl.b = first_moved(res);
          levels_.push_back(std::move(nl));
        }
        for (std::size_t l = lv + 1; l <= j; ++l) {
          levels_[l].gens.push_back(res);
          orbit_of(levels_[l]);
        }
        if (target && partial_order() == *target) {
          if (hit) *hit = true;
          for (auto& LL : levels_) base_.push_back(LL.b);
          return;
        }
        i = j + 1;
        jumped = true;
      }
    }
    if (!jumped) --i;
  }
  for (auto& L : levels_) base_.push_back(L.b);
}

u64 StabChain::order() const { return partial_order(); }

std::vector<std::size_t> StabChain::orbit_lengths() const {
  std::vector<std::size_t> out;
  for (const auto& L : levels_) out.push_back(L.orbit.size());
  return out;
}

std::vector<Perm> StabChain::strong_generators() const {
  std::vector<Perm> out;
  for (const auto& L : levels_)
    for (const auto& g : L.gens)
      if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
  return out;
}

bool StabChain::contains(const Perm& g) const {
  if (g.degree() != degree_) return false;
  auto [res, j] = sift(g, 0);
  return j == levels_.size() && res.is_identity();
}

Perm StabChain::element(u64 i) const {
  Perm acc = Perm::identity(degree_);
  // g = u_{L-1} ... u_1 u_0
  std::vector<std::size_t> digits;
  for (const auto& L : levels_) {
    digits.push_back(static_cast<std::size_t>(i % L.orbit.size()));
    i /= L.orbit.size();
  }
  for (std::size_t l = levels_.size(); l-- > 0;) acc = acc * levels_[l].u[digits[l]];
  return acc;
}

}  // namespace spreadlab
