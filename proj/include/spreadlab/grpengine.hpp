#pragma once

#include <boost/dynamic_bitset.hpp>
#include <compare>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "spreadlab/formspace.hpp"
#include "spreadlab/matrix.hpp"

namespace spreadlab {

using Point = std::uint32_t;

// Permutation of {0, ..., n-1}; composition acts on the right: i^(xy) = (i^x)^y.
// Text form uses 1-based cycle notation "(1,2,3)(4,5)".
class Perm {
 public:
  Perm() = default;
  // Throws NotBijection.
  explicit Perm(std::vector<Point> images);
  static Perm identity(std::size_t n);
  // Throws ParseError or NotBijection.
  static Perm from_cycles(std::size_t n, const std::string& s);

  std::size_t degree() const { return img_.size(); }
  Point operator[](Point i) const { return img_[i]; }
  const std::vector<Point>& images() const { return img_; }

  Perm operator*(const Perm& o) const;
  Perm inverse() const;
  Perm pow(std::int64_t e) const;
  bool is_identity() const;
  u64 order() const;
  std::size_t fixed_points() const;
  // Cycle lengths > 1, descending.
  std::vector<std::size_t> cycle_type() const;
  std::string cycles() const;

  auto operator<=>(const Perm&) const = default;

 private:
  std::vector<Point> img_;
};

// x^g = g^-1 x g
Perm conjugate(const Perm& x, const Perm& g);

// Stabilizer chain from deterministic Schreier-Sims with explicit transversals.
class StabChain {
 public:
  StabChain() = default;
  StabChain(std::size_t degree, const std::vector<Perm>& gens);

  std::size_t degree() const { return degree_; }
  u64 order() const;
  const std::vector<Point>& base() const { return base_; }
  std::vector<std::size_t> orbit_lengths() const;
  std::vector<Perm> strong_generators() const;
  bool contains(const Perm& g) const;
  // Element number i in the mixed-radix order of transversal positions
  // (level 0 fastest); element 0 is the identity.
  Perm element(u64 i) const;
  // Transversal element taking base point of `level` to orbit point number k.
  const Perm& transversal(std::size_t level, std::size_t k) const { return levels_[level].u[k]; }
  const std::vector<Point>& orbit(std::size_t level) const { return levels_[level].orbit; }
  std::size_t depth() const { return levels_.size(); }

  // Whether <gens> has exactly `target` elements; stops as soon as the partial
  // chain certifies the target.
  static bool has_order(std::size_t degree, const std::vector<Perm>& gens, u64 target);

 private:
  struct Level {
    Point b = 0;
    std::vector<Perm> gens;
    std::vector<Point> orbit;
    std::vector<std::int32_t> pos;
    std::vector<Perm> u;
    std::vector<Perm> uinv;
  };
  std::size_t degree_ = 0;
  std::vector<Point> base_;
  std::vector<Level> levels_;

  void build(const std::vector<Perm>& gens, std::optional<u64> target, bool* hit);
  void orbit_of(Level& L) const;
  std::pair<Perm, std::size_t> sift(Perm g, std::size_t from) const;
  u64 partial_order() const;
};

using ElemSet = boost::dynamic_bitset<std::uint64_t>;

// All elements of a group, indexed; products and conjugates in O(base length).
class ElementTable {
 public:
  explicit ElementTable(const StabChain& chain);
  std::uint32_t size() const { return n_; }
  std::size_t degree() const { return deg_; }
  std::optional<std::uint32_t> find(const Perm& g) const;
  std::uint32_t index_of(const Perm& g) const;  // throws if absent
  Perm perm(std::uint32_t i) const;
  Point image(std::uint32_t i, Point x) const { return data_[static_cast<std::size_t>(i) * deg_ + x]; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t inv(std::uint32_t a) const { return inv_[a]; }
  // g^-1 x g
  std::uint32_t conj(std::uint32_t x, std::uint32_t g) const;
  std::uint32_t pow(std::uint32_t a, u64 e) const;
  std::uint32_t order(std::uint32_t a) const { return ord_[a]; }

 private:
  std::uint32_t n_ = 0;
  std::size_t deg_ = 0;
  std::vector<Point> base_;
  std::vector<std::uint16_t> data_;
  std::vector<std::uint32_t> slots_;
  std::uint64_t mask_ = 0;
  std::vector<std::uint32_t> inv_, ord_;

  std::uint64_t hash_images(const Point* imgs) const;
  std::uint32_t lookup(const Point* imgs) const;
};

struct Fingerprint {
  u64 order = 0;
  std::vector<std::pair<u64, u64>> order_stats;  // (element order, count)
  std::vector<std::size_t> orbit_lengths;        // sorted
  auto operator<=>(const Fingerprint&) const = default;
  std::string to_string() const;
};

struct SubgroupRecord {
  std::vector<Perm> gens;
  u64 order = 0;
  Fingerprint fp;
  std::optional<bool> is_maximal;
  std::shared_ptr<const ElemSet> elements;  // indices into the parent's table
  std::vector<std::uint32_t> element_list;  // same, ascending
};

struct ClassRecord {
  Perm rep;
  std::uint32_t rep_index = 0;
  u64 size = 0;
  u64 order = 0;
  u64 centralizer_order = 0;
};

enum class MatAction { Vectors, ProjPoints };
std::string action_name(MatAction a);
MatAction parse_action(const std::string& s);

struct MatrixOrigin {
  FormedSpace space;
  std::vector<Mat> gens;
  MatAction action = MatAction::Vectors;
  std::vector<Vec> points;  // point i as a vector (normalized for projective points)
};

enum class ConjVerdict { Conjugate, NotConjugate, Inconclusive };
struct ConjResult {
  ConjVerdict verdict = ConjVerdict::Inconclusive;
  std::optional<Perm> witness;  // x^witness = y
};

struct OvergroupPoset {
  std::vector<SubgroupRecord> groups;  // all subgroups containing s, by order then fingerprint
  std::vector<std::size_t> maximal;    // indices of maximal proper members
};

class Group;
using GroupPtr = std::shared_ptr<const Group>;

class Group {
 public:
  // Groups up to this order get an element table (exhaustive regime).
  static constexpr u64 kTableCap = 2000000;

  static GroupPtr from_perms(std::size_t degree, std::vector<Perm> gens);
  // Throws FormNotPreserved when a generator is not a similarity of sp.
  static GroupPtr from_matrices(const FormedSpace& sp, std::vector<Mat> gens, MatAction action);

  std::size_t degree() const { return degree_; }
  const std::vector<Perm>& generators() const { return gens_; }
  const std::optional<MatrixOrigin>& origin() const { return origin_; }
  // Matrix of an element (up to scalars for projective actions).
  Mat to_matrix(const Perm& g) const;

  const StabChain& chain() const;
  u64 order() const { return chain().order(); }
  bool member(const Perm& g) const { return chain().contains(g); }
  bool tabulated() const { return order() <= kTableCap; }
  const ElementTable& table() const;  // throws TooLarge outside the exhaustive regime
  // Product replacement, deterministic for a given seed.
  Perm random_elt(u64 seed) const;
  bool generated_by(const std::vector<Perm>& gens) const;
  std::string digest() const;  // stable hash of degree and generators

  // Exhaustive classes, sorted by element order, then size, then representative index.
  const std::vector<ClassRecord>& classes() const;
  std::size_t class_index(const Perm& g) const;
  std::size_t class_index_of(std::uint32_t idx) const;
  const std::vector<std::uint32_t>& class_members(std::size_t c) const;

  SubgroupRecord whole() const;
  SubgroupRecord subgroup(const std::vector<Perm>& gens) const;
  SubgroupRecord subgroup_from_indices(const std::vector<std::uint32_t>& gens) const;
  // Record for an element list known to be a subgroup; generators chosen greedily.
  SubgroupRecord subgroup_from_elements(const std::vector<std::uint32_t>& elems) const;
  SubgroupRecord closure(const SubgroupRecord& H, const Perm& g) const;
  SubgroupRecord centralizer(const Perm& x) const;
  SubgroupRecord normalizer(const SubgroupRecord& H) const;
  ConjResult conj_test(const Perm& x, const Perm& y, u64 budget = 1000000) const;
  // Throws IdentityElement for s = 1 and BudgetExceeded above max_groups subgroups.
  OvergroupPoset overgroups(const Perm& s, std::size_t max_groups = 200000) const;
  std::vector<Perm> double_coset_reps(const SubgroupRecord& A, const SubgroupRecord& B) const;

  // Helpers in the exhaustive regime.
  ElemSet elements_of(const SubgroupRecord& H) const;
  std::vector<std::uint32_t> dimino(const std::vector<std::uint32_t>& base_list, const std::vector<std::uint32_t>& base_gens,
                                    std::uint32_t g, ElemSet& in) const;
  Fingerprint fingerprint_of(const std::vector<std::uint32_t>& elems, const std::vector<Perm>& gens) const;

 private:
  std::size_t degree_ = 0;
  std::vector<Perm> gens_;
  std::optional<MatrixOrigin> origin_;

  mutable std::once_flag chain_once_, table_once_, classes_once_;
  mutable std::unique_ptr<StabChain> chain_;
  mutable std::unique_ptr<ElementTable> table_;
  mutable std::vector<ClassRecord> classes_;
  mutable std::vector<std::uint32_t> class_of_;
  mutable std::vector<std::vector<std::uint32_t>> class_members_;
};

// Orbit lengths of a permutation set on {0..n-1}, sorted.
std::vector<std::size_t> orbit_lengths(std::size_t degree, const std::vector<Perm>& gens);

// .grp text: "perm <degree>" then cycle-notation lines, or
// "mat <kind> <n> <p> <k> <action>" then one matrix per line.
GroupPtr parse_grp(const std::string& text);
std::string format_grp(const Group& G);

// Generators of SL_n (kind zero), Sp_n or SU_n from transvections, added
// greedily in a fixed order until every transvection is in the group.
std::vector<Mat> transvection_generators(const FormedSpace& sp);

// Built-in corpus: Sn, An (n <= 12), D8, M11, PSL2(q), SL2(q), PSL3(q), Sp4(q), PSp4(q), SU3(q), PSU3(q).
std::vector<std::string> corpus_names();
std::string corpus_grp(const std::string& name);  // throws UnknownName

}  // namespace spreadlab
