#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "spreadlab/grpengine.hpp"
#include "spreadlab/matrix.hpp"

namespace spreadlab {

// sigma = x -> x^(q0) entrywise, composed with gamma(x) = J^-1 x^-T J for the graph-field twist.
enum class Twist { None, GraphField };
std::string twist_name(Twist t);
Twist parse_twist(const std::string& s);  // none | graph_field | gu

struct CosetClass {
  std::uint64_t rep = 0;  // matrix code of g; the class is (g sigma~)^X
  u64 size = 0;
  u64 centralizer = 0;    // |C_{X_{sigma^e}}(g sigma~)|
};

struct SmallClass {
  std::uint64_t rep = 0;
  u64 size = 0;
  u64 centralizer = 0;
};

// Finite extension X_{sigma^e}:<sigma~> with X = GL_n over the algebraic closure.
// X_{sigma^e} is GL_n(q0^e) or GU_n(q0^e) (e odd), and X_sigma is GL_n(q0) or GU_n(q0).
// Matrices are packed as codes: row-major entries, base |K| with entry 0 lowest.
// In the extension, sigma~ g = sigma^-1(g) sigma~.
class ShintaniInstance {
 public:
  static constexpr u64 kOrderCap = 500000;

  int n = 0;
  u64 q0 = 0;
  int e = 0;
  Twist twist = Twist::None;
  FieldPtr field;  // ambient field containing both groups

  std::vector<std::uint64_t> big;    // X_{sigma^e}, ascending codes
  std::vector<std::uint64_t> small;  // X_sigma, ascending codes
  std::vector<CosetClass> coset_classes;
  std::vector<SmallClass> small_classes;

  Mat to_mat(std::uint64_t code) const;
  std::uint64_t code(const Mat& m) const;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t inv(std::uint64_t a) const;
  std::uint64_t sigma(std::uint64_t a, int times = 1) const;  // times may be negative on X_{sigma^e}
  std::optional<std::size_t> big_index(std::uint64_t c) const;
  std::size_t coset_class_of(std::uint64_t g) const;  // class of g sigma~
  std::size_t small_class_of(std::uint64_t x) const;
  unsigned field_f() const { return f_; }

 private:
  friend std::shared_ptr<const ShintaniInstance> build_instance(int, u64, int, Twist);
  unsigned f_ = 0;  // q0 = p^f
  std::vector<Fq> J_, Jinv_;
  std::unordered_map<std::uint64_t, std::uint32_t> big_pos_, small_pos_;
  std::vector<std::uint32_t> coset_of_, small_of_;
};
using ShintaniPtr = std::shared_ptr<const ShintaniInstance>;

// Throws TooLarge when |X_{sigma^e}| exceeds the enumeration cap, IncompatibleKind for n > 3.
ShintaniPtr build_instance(int n, u64 q0, int e, Twist twist);

// g sigma^-1(g) ... sigma^-(e-1)(g) = (g sigma~)^e
std::uint64_t twisted_norm(const ShintaniInstance& inst, std::uint64_t g);

// Complete conjugacy invariant over the ambient field: for each irreducible factor f of the
// characteristic polynomial with multiplicity m, the ranks of f(A)^j for j = 1..m.
std::string similarity_signature(const Mat& a);

struct ShintaniMatch {
  std::size_t small_class = 0;
  std::string method;  // invariant-factors | charpoly+centralizer
};
// Throws AmbiguousMatch when the invariants do not single out one class.
ShintaniMatch shintani_map(const ShintaniInstance& inst, std::size_t coset_class);

struct DescentRow {
  std::size_t coset_class = 0;
  std::string charpoly;
  u64 big_centralizer = 0;
  u64 ext_centralizer = 0;  // in X_{sigma^e}:<sigma~>
  std::optional<std::size_t> small_class;
  u64 small_centralizer = 0;
  std::string method;
  bool passed = false;
};
struct DescentReport {
  std::vector<DescentRow> rows;
  std::vector<std::string> violations;
  std::string to_text() const;
};
DescentReport verify_descent(const ShintaniInstance& inst);

struct PowersReport {
  bool checked_power_map = false;    // (g sigma~)^d against x^d in the (sigma^d, e) instance
  bool checked_restriction = false;  // (g sigma~)^d against x in the (sigma^d, e/d) instance
  std::vector<std::string> violations;
  std::vector<std::string> notes;
};
PowersReport verify_powers(const ShintaniInstance& inst, int d);

struct FixRow {
  std::size_t coset_class = 0;
  u64 big_fix = 0;
  u64 small_fix = 0;
};
struct FixReport {
  int k = 0;
  std::vector<FixRow> rows;
  std::vector<std::string> violations;
};
// k-subspaces fixed by g sigma~ versus by F(g sigma~). Untwisted instances only.
FixReport verify_fix_counts(const ShintaniInstance& inst, int k);

// Some a in GL_n(q0^(e c)) (c <= cap) with a sigma^-1(a)^-1 = g; throws NotFoundWithinCap.
struct LangWitness {
  Mat a;
  int c = 0;
  Mat descended;  // a^-1 (g sigma~)^e a, an element of X_sigma
  std::size_t small_class = 0;
};
LangWitness solve_lang(const ShintaniInstance& inst, std::uint64_t g, int cap);

// X_{sigma^e}:<sigma~> acting on itself by right multiplication (tiny instances only).
struct SemidirectGroup {
  GroupPtr group;
  const ShintaniInstance* inst = nullptr;
  Perm element(std::uint64_t g, int i) const;  // g sigma~^i
};
SemidirectGroup semidirect_group(const ShintaniInstance& inst);

}  // namespace spreadlab
