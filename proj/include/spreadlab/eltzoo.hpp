#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spreadlab/formspace.hpp"
#include "spreadlab/gfpoly.hpp"
#include "spreadlab/matrix.hpp"

namespace spreadlab {

// F_{Q^d} as K[x]/(f) for the least monic irreducible f of degree d over K,
// with f found by counting through coefficient vectors (constant term fastest).
// Usable when |K|^d is far beyond table-based FieldCtx sizes.
class ExtField {
 public:
  ExtField(FieldPtr base, unsigned d);
  const FieldPtr& base() const { return k_; }
  unsigned degree() const { return d_; }
  const Poly& modulus() const { return f_; }
  u64 base_order() const { return k_->q(); }
  u64 order() const;  // |K|^d

  Poly one() const { return Poly::constant(k_, k_->one()); }
  Poly gen() const;
  Poly reduce(const Poly& a) const { return a % f_; }
  Poly mul(const Poly& a, const Poly& b) const { return (a * b) % f_; }
  Poly pow(const Poly& a, u64 e) const;
  // a^(|K|^i)
  Poly frob(const Poly& a, unsigned i = 1) const;
  Poly inv(const Poly& a) const;
  bool is_one(const Poly& a) const;
  // Whether a has multiplicative order exactly n (n given with its factorization).
  bool has_order(const Poly& a, u64 n) const;
  // Sum of the conjugates a^(|K|^(j i)), i < d/j: the trace to F_{|K|^j}.
  Poly trace(const Poly& a, unsigned j = 1) const;
  // Product of the same conjugates: the norm to F_{|K|^j}.
  Poly norm(const Poly& a, unsigned j = 1) const;
  // Value in K of an element lying in K; throws otherwise.
  Fq to_base(const Poly& a) const;
  // Coordinates over the basis 1, x, ..., x^(d-1).
  Vec coords(const Poly& a) const;
  Poly from_coords(const Vec& v) const;
  // Matrix of y -> y a on the basis 1, x, ..., x^(d-1) (rows are images).
  Mat mult_matrix(const Poly& a) const;
  // The first primitive element in counting order.
  const Poly& primitive() const;
  // omega^((|K|^d - 1)/n) for the primitive element omega: the least power of
  // omega with order n. Throws IncompatibleDegree unless n divides |K|^d - 1.
  Poly element_of_order(u64 n) const;

 private:
  FieldPtr k_;
  unsigned d_;
  Poly f_;
  mutable std::optional<Poly> prim_;
};

enum class EltTag {
  PlusType,    // (2m)+
  MinusType,   // (2m)-
  DeltaPlus,   // Δ(2m)+
  DeltaMinus,  // Δ(2m)-
  SigmaPlus,   // Σ(2m)+
  SigmaMinus,  // Σ(2m)-
  UnitaryMinus,  // [n]-
  UnitaryPlus,   // [n]+
  Refl,
  DeltaRefl,
  DeltaElemPlus,
  DeltaElemMinus,
  DeltaElemU,
};

enum class GroupKind { Sp, SOPlus, SOMinus, GSp, DOPlus, DOMinus, GU, OPlus, OMinus, GOPlus, GOMinus };

std::string tag_name(EltTag t);
// Accepts the ASCII forms "(2m)+", "D(2m)-", "S(2m)+", "[n]-", "refl", "Drefl",
// "delta+", "delta-", "deltaU" and the Δ/Σ/− spellings.
EltTag parse_tag(const std::string& s);
std::string group_name(GroupKind g);
GroupKind parse_group(const std::string& s);
GroupKind default_group(EltTag t);

struct EltType {
  EltTag tag = EltTag::PlusType;
  int m = 1;  // block parameter m, or n for [n] and deltaU; refl types ignore it
  FieldPtr ctx;
  GroupKind group = GroupKind::SOPlus;
  std::string to_string() const;  // e.g. "(6)+_2 in SO+"
};

EltType elt_type(EltTag tag, int m, const FieldPtr& ctx);
EltType elt_type(EltTag tag, int m, const FieldPtr& ctx, GroupKind group);

struct EltWitness {
  Mat matrix;
  EltType claimed;
  FormedSpace space;
  u64 order = 0;
  std::vector<std::pair<Poly, int>> eigen_data;  // charpoly factorization
  std::vector<std::string> notes;
};

struct TypeReport {
  bool ok = true;
  std::vector<std::string> reasons;  // failures
  std::vector<std::string> notes;    // informational flags
  void fail(std::string r) {
    ok = false;
    reasons.push_back(std::move(r));
  }
};

// The space a witness of type t lives in.
FormedSpace type_space(const EltType& t);
// Throws NoSuchType when the existence hypotheses fail.
EltWitness make_element(const EltType& t);
TypeReport verify_type(const EltWitness& w);
TypeReport verify_type(const Mat& g, const EltType& t, const FormedSpace& sp);
// Whether q is a Mersenne prime 2^k - 1.
bool is_mersenne(u64 q);

// Block realization over F_q of an F_{q^d}-matrix (restriction of scalars).
// Throws IncompatibleDegree unless d divides sp.n and x is (n/d) x (n/d)
// over the degree-d extension of sp's field.
Mat embed_ext(const Mat& x, unsigned d, const FormedSpace& sp);

// n minus the largest eigenspace dimension over the algebraic closure.
int nu(const Mat& x);

enum class Isotropy { Zero, TotallySingular, Nondegenerate, Degenerate };
std::string isotropy_name(Isotropy i);
struct LabeledSubspace {
  Mat basis;  // RREF rows; 0 x n for the zero subspace
  Isotropy label;
};
// All x-invariant subspaces, by exhaustive enumeration. Throws TooLarge when
// |field|^n > 2^20.
std::vector<LabeledSubspace> invariant_subspaces(const Mat& x, const FormedSpace& sp);

struct SplitPrediction {
  std::vector<EltType> blocks;
  int t = 1;
  int eps = 1;
  // Degrees of the irreducible factors of the characteristic polynomial over
  // F_{q0^e}, recomputed, and whether they match the prediction.
  std::vector<int> factor_degrees;
  bool verified = false;
};
// Predicted decomposition of a (2m)^eta_{q0} witness over F_{q0^e}.
// Throws HypothesisViolation when the hypotheses fail.
SplitPrediction split_over_subfield(const EltWitness& w, unsigned e);

}  // namespace spreadlab
