#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace spreadlab {

using u64 = std::uint64_t;

bool is_prime(u64 n);

// Prime factorization as prime -> exponent.
std::map<u64, int> factorize(u64 n);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);

// a^b, or nullopt on 64-bit overflow.
std::optional<u64> checked_pow(u64 a, unsigned b);
std::optional<u64> checked_mul(u64 a, u64 b);

// The 2-part (n)_2 of n > 0.
u64 two_part(u64 n);

// Least d >= 1 with a^d = 1 mod r; requires gcd(a, r) = 1.
u64 mult_order(u64 a, u64 r);

// Primes r dividing a^b - 1 but no a^k - 1 with k < b.
std::set<u64> ppd_set(u64 a, unsigned b);

// Whether the existence hypotheses for a primitive prime divisor of a^b - 1 hold.
bool ppd_expected(u64 a, unsigned b);

bool is_power_of_two(u64 n);

}  // namespace spreadlab
