#include <cmath>
#include <functional>

#include "spreadlab/errors.hpp"
#include "spreadlab/numtheory.hpp"
#include "spreadlab/spreadcore.hpp"

namespace spreadlab {

namespace {

struct Args {
  const std::string& id;
  const BoundParams& p;

  bool has(const std::string& k) const { return p.count(k) > 0; }
  std::string str(const std::string& k) const {
    auto it = p.find(k);
    if (it == p.end()) throw HypothesisViolation(id + ": missing parameter " + k);
    return it->second;
  }
  double num(const std::string& k) const {
    auto s = str(k);
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw HypothesisViolation(id + ": parameter " + k + " is not a number: " + s);
    }
  }
  long integer(const std::string& k) const {
    double v = num(k);
    if (v != std::floor(v)) throw HypothesisViolation(id + ": parameter " + k + " must be an integer");
    return static_cast<long>(v);
  }
  double q() const {
    long v = integer("q");
    if (v < 2 || factorize(static_cast<u64>(v)).size() != 1) throw HypothesisViolation(id + ": q must be a prime power");
    return static_cast<double>(v);
  }
  int sign(const std::string& k) const {
    auto s = str(k);
    if (s == "+" || s == "1" || s == "+1" || s == "plus") return 1;
    if (s == "-" || s == "-1" || s == "minus") return -1;
    throw HypothesisViolation(id + ": parameter " + k + " must be + or -");
  }
  void require(bool ok, const std::string& what) const {
    if (!ok) throw HypothesisViolation(id + ": " + what);
  }
};

// a, b, c and |F| for the subspace bounds of the classical families.
struct SubspaceRow {
  double a, b, c, F, d;
  long m;
};

SubspaceRow subspace_row(const Args& A) {
  std::string fam = A.str("family");
  long n = A.integer("n");
  double q = A.q();
  A.require(n >= 6, "needs n >= 6");
  SubspaceRow r{0, 0, 0, q, 1, n / 2};
  if (fam == "symplectic") {
    A.require(n % 2 == 0, "symplectic needs even n");
    bool even = static_cast<long>(q) % 2 == 0;
    r.a = even ? 2 : 1;
    r.c = 1;
  } else if (fam == "orthogonal-odd") {
    A.require(n % 2 == 1, "orthogonal-odd needs odd n");
    r.a = 1;
    r.c = 1;
  } else if (fam == "orthogonal-plus") {
    A.require(n % 2 == 0, "orthogonal-plus needs even n");
    r.a = 2;
    r.b = 1;
    r.c = 2;
  } else if (fam == "orthogonal-minus") {
    A.require(n % 2 == 0, "orthogonal-minus needs even n");
    r.a = 2;
    r.c = 1;
  } else if (fam == "unitary") {
    r.F = q * q;
    r.d = 2;
    if (n % 2 == 0) {
      r.a = 2;
      r.b = 0.5;
      r.c = 1;
    } else {
      r.a = 1;
      r.b = -0.5;
      r.c = 0;
    }
  } else {
    throw HypothesisViolation(A.id + ": family must be symplectic, orthogonal-odd, orthogonal-plus, orthogonal-minus or unitary");
  }
  return r;
}

using Eval = std::function<double(const Args&)>;

const std::vector<std::pair<std::string, Eval>>& table() {
  static const std::vector<std::pair<std::string, Eval>> t = {
      {"lie-type-universal",
       [](const Args& A) {
         double q = A.q();
         if (A.has("socle")) {
           auto s = A.str("socle");
           A.require(s.rfind("PSL2", 0) != 0 && s != "PSL4(2)" && s != "PSp4(3)",
                     "socle " + s + " is excluded");
         }
         return 4.0 / (3.0 * q);
       }},
      {"subspace-linear",
       [](const Args& A) {
         long n = A.integer("n"), k = A.integer("k");
         double q = A.q();
         A.require(n >= 6, "needs n >= 6");
         A.require(0 < k && k < n, "needs 0 < k < n");
         return 2.0 * std::pow(q, -static_cast<double>(std::min(k, n - k)));
       }},
      {"subspace-nondegenerate",
       [](const Args& A) {
         auto r = subspace_row(A);
         long n = A.integer("n"), k = A.integer("k"), l = A.integer("l");
         A.require(0 < k && k < n, "needs 0 < k < n");
         A.require(l >= 0 && 2 * l <= k, "Witt index must satisfy 0 <= 2l <= k");
         double m = static_cast<double>(r.m);
         return 2 * std::pow(r.F, -m + r.a) + std::pow(r.F, -m + r.b) + std::pow(r.F, -static_cast<double>(l)) +
                std::pow(r.F, -static_cast<double>(n - k));
       }},
      {"subspace-totally-singular",
       [](const Args& A) {
         auto r = subspace_row(A);
         long k = A.integer("k");
         A.require(0 < k && k <= r.m, "needs 0 < k <= n/2");
         double m = static_cast<double>(r.m);
         return 2 * std::pow(r.F, -m + r.c) + std::pow(r.F, -m / r.d + r.b / r.d) + std::pow(r.F, -static_cast<double>(k));
       }},
      {"orthogonal-nonsingular-1space",
       [](const Args& A) {
         long m = A.integer("m"), s = A.integer("s");
         double q = A.q();
         int e = A.sign("eps");
         A.require(m >= 4, "needs m >= 4");
         A.require(1 <= s && s <= 2 * m, "needs 1 <= s <= 2m");
         return std::pow(q, -static_cast<double>(s)) + std::pow(q, -static_cast<double>(2 * m - s)) +
                2.0 / (std::pow(q, static_cast<double>(m)) - e);
       }},
      {"orthogonal-nondegenerate-2space",
       [](const Args& A) {
         long m = A.integer("m"), s = A.integer("s");
         double q = A.q();
         A.require(m >= 4, "needs m >= 4");
         A.require(1 <= s && s <= 2 * m, "needs 1 <= s <= 2m");
         return std::pow(q, -2.0 * s) + 1.0 / (std::pow(q, static_cast<double>(m - 1)) - 1) +
                4.0 / std::pow(q, static_cast<double>(2 * m - 3)) + std::pow(q, -static_cast<double>(2 * m - 2 * s));
       }},
      {"nonsubspace-class-size",
       [](const Args& A) {
         double size = A.num("class_size");
         long n = A.integer("n");
         double iota = A.has("iota") ? A.num("iota") : 0.0;
         A.require(size > 1, "class size must exceed 1");
         A.require(n >= 2, "needs n >= 2");
         A.require(iota >= 0, "iota must be nonnegative");
         if (A.has("order")) A.require(is_prime(static_cast<u64>(A.integer("order"))), "x must have prime order");
         return std::pow(size, -0.5 + 1.0 / static_cast<double>(n) + iota);
       }},
      {"orthogonal-nonsubspace",
       [](const Args& A) {
         long m = A.integer("m");
         double q = A.q();
         A.require(m >= 4, "needs m >= 4");
         double md = static_cast<double>(m);
         return 2.0 * std::pow(q, -(md - 2 + 2 / (md + 1)));
       }},
      {"orthogonal-nonsubspace-field",
       [](const Args& A) {
         long m = A.integer("m");
         double q = A.q();
         A.require(m >= 4, "needs m >= 4");
         auto f = factorize(static_cast<u64>(q));
         A.require(f.begin()->second >= 2, "needs q = p^f with f >= 2");
         bool outer = A.has("outer") && A.str("outer") == "1";
         A.require(outer || A.integer("nu") >= 2, "needs nu(x) >= 2 or x outside the orthogonal group");
         long ell = A.has("ell") ? A.integer("ell") : 0;
         A.require(ell == 0 || ell == 2, "ell is 0 or 2");
         double md = static_cast<double>(m);
         return 3.0 * std::pow(q, -(2 * md - 5 + 3 / md - static_cast<double>(ell)));
       }},
      {"orthogonal8-nonsubspace",
       [](const Args& A) { return 2.0 * std::pow(A.q(), -4.5); }},
      {"unitary-nonsubspace",
       [](const Args& A) {
         long n = A.integer("n");
         double q = A.q();
         A.require(n >= 7, "needs n >= 7");
         double nd = static_cast<double>(n);
         return 2.0 / std::pow(q, nd - 3 + 2 / nd);
       }},
      {"unitary-nonsubspace-5-6",
       [](const Args& A) {
         long n = A.integer("n");
         double q = A.q();
         A.require(n == 5 || n == 6, "needs n in {5,6}");
         return 1.0 / (q * q * q * q - q * q * q + q * q - q + 1);
       }},
      {"unitary-nonsubspace-3-4",
       [](const Args& A) {
         long n = A.has("n") ? A.integer("n") : 3;
         double q = A.q();
         A.require(n == 3 || n == 4, "needs n in {3,4}");
         A.require(q >= 11, "needs q >= 11");
         A.require(!A.has("type") || A.str("type") != "Sp4", "subgroups of type Sp4 use unitary-nonsubspace-sp4");
         return 1.0 / (q * q - q + 1);
       }},
      {"unitary-nonsubspace-sp4",
       [](const Args& A) {
         long n = A.has("n") ? A.integer("n") : 4;
         double q = A.q();
         A.require(n == 4, "needs n = 4");
         A.require(q >= 11, "needs q >= 11");
         double g = static_cast<long>(q) % 2 ? 2.0 : 1.0;
         return g * (q * q * q * q + 1) / (std::pow(q, 5) + q * q);
       }},
  };
  return t;
}

}  // namespace

double eval_paper_bound(const std::string& bound_id, const BoundParams& params) {
  for (const auto& [id, f] : table())
    if (id == bound_id) return f(Args{id, params});
  throw UnknownName("unknown bound id '" + bound_id + "'");
}

std::vector<std::string> bound_ids() {
  std::vector<std::string> out;
  for (const auto& e : table()) out.push_back(e.first);
  return out;
}

}  // namespace spreadlab
