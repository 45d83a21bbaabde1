#include "spreadlab/numtheory.hpp"

#include <numeric>
#include <random>

#include "spreadlab/errors.hpp"

namespace spreadlab {

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic witness set for 64-bit inputs.
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  std::mt19937_64 rng(n);
  while (true) {
    u64 c = rng() % (n - 1) + 1;
    u64 x = rng() % n, y = x, d = 1;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void factor_into(u64 n, std::map<u64, int>& out) {
  if (n == 1) return;
  for (u64 p : {2, 3, 5, 7, 11, 13}) {
    while (n % p == 0) {
      ++out[p];
      n /= p;
    }
  }
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  u64 d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::map<u64, int> factorize(u64 n) {
  std::map<u64, int> out;
  if (n == 0) throw ZeroElement("cannot factor 0");
  factor_into(n, out);
  return out;
}

std::optional<u64> checked_pow(u64 a, unsigned b) {
  unsigned __int128 r = 1;
  for (unsigned i = 0; i < b; ++i) {
    r *= a;
    if (r > UINT64_MAX) return std::nullopt;
  }
  return static_cast<u64>(r);
}

std::optional<u64> checked_mul(u64 a, u64 b) {
  unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
  if (r > UINT64_MAX) return std::nullopt;
  return static_cast<u64>(r);
}

u64 two_part(u64 n) { return n & (~n + 1); }

bool is_power_of_two(u64 n) { return n != 0 && (n & (n - 1)) == 0; }

u64 mult_order(u64 a, u64 r) {
  if (r == 1) return 1;
  // phi(r) via factorization, then strip prime factors.
  auto fr = factorize(r);
  u64 phi = 1;
  for (auto [p, e] : fr) {
    u64 pe = 1;
    for (int i = 0; i < e - 1; ++i) pe *= p;
    phi *= pe * (p - 1);
  }
  u64 ord = phi;
  for (auto [p, e] : factorize(phi)) {
    (void)e;
    while (ord % p == 0 && powmod(a, ord / p, r) == 1) ord /= p;
  }
  return ord;
}

std::set<u64> ppd_set(u64 a, unsigned b) {
  std::set<u64> out;
  if (a < 2 || b < 1) return out;
  auto n = checked_pow(a, b);
  if (!n) throw TooLarge("a^b exceeds 64 bits");
  if (*n - 1 == 0) return out;
  for (auto [r, e] : factorize(*n - 1)) {
    (void)e;
    if (a % r == 0) continue;
    if (mult_order(a % r, r) == b) out.insert(r);
  }
  return out;
}

bool ppd_expected(u64 a, unsigned b) {
  if (a < 2 || b < 2) return a >= 3 && b == 1;
  if (a == 2 && b == 6) return false;
  if (b == 2 && is_power_of_two(a + 1)) return false;
  return true;
}

}  // namespace spreadlab
