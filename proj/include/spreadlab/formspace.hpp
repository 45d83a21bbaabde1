#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spreadlab/gfpoly.hpp"
#include "spreadlab/matrix.hpp"

namespace spreadlab {

enum class FormKind { Zero, Symplectic, QuadPlus, QuadMinus, QuadOdd, Unitary };

std::string kind_name(FormKind k);
FormKind parse_kind(const std::string& s);

// A vector space with a classical form, written in a fixed basis.
// For quadratic kinds `gram` is the polar form (u,v) = Q(u+v) - Q(u) - Q(v)
// and `qdiag` holds Q on the basis; for unitary kinds the field is F_{q^2}
// and (u,v) = sum u_i G_ij v_j^q.
struct FormedSpace {
  FormKind kind = FormKind::Zero;
  int n = 0;
  FieldPtr base;   // F_q
  FieldPtr field;  // F_q, or F_{q^2} when unitary
  Mat gram;
  std::vector<Fq> qdiag;
  std::vector<std::string> labels;
  std::shared_ptr<const QuadExt> qe;  // set for unitary and minus kinds

  bool quadratic() const {
    return kind == FormKind::QuadPlus || kind == FormKind::QuadMinus || kind == FormKind::QuadOdd;
  }
  bool unitary() const { return kind == FormKind::Unitary; }
  u64 q() const { return base->q(); }

  Fq form(const Vec& u, const Vec& v) const;
  Fq Q(const Vec& v) const;  // quadratic kinds only
  // Conjugation x -> x^q on the field of a unitary space, identity otherwise.
  Fq bar(Fq x) const;
  Mat bar(const Mat& m) const;

  std::string header() const;  // "form <kind> <n> <p> <k>"
};

// The standard bases: (e_1,f_1,...,e_m,f_m[,x]) for symplectic and quadratic
// kinds, the last pair replaced by (u_m,v_m) for minus type, and the
// orthonormal basis (u_1,...,u_n) for unitary kinds.
FormedSpace standard_space(FormKind kind, int n, const FieldPtr& fq);
// A space with an explicit Gram matrix (and Q values on the basis for quadratic kinds).
FormedSpace custom_space(FormKind kind, const FieldPtr& fq, const Mat& gram, std::vector<Fq> qdiag = {});

// Rows: the hyperbolic unitary basis (a e_1, -a e_2, ..., f_m, ..., f_1), or
// (e_1, ..., b u_n, f_m, ..., f_1) for odd n, written in orthonormal coordinates.
// The e_i, f_i come from zeta^2 - zeta - 1 = 0 when that yields a hyperbolic
// pair, otherwise from a deterministic isotropic-vector search.
struct UnitaryHyperbolic {
  Mat basis;
  Mat gram;             // J for odd n, a*J for even n
  bool used_zeta = false;
};
UnitaryHyperbolic unitary_hyperbolic_basis(const FormedSpace& sp);
// The unitary space whose Gram matrix is that of the hyperbolic basis.
FormedSpace unitary_hyperbolic_space(int n, const FieldPtr& fq);

// Antidiagonal J with entries 1, -1, 1, ... from top-right to bottom-left.
Mat antidiag_J(const FieldPtr& f, int n);
// x -> J^{-1} x^{-T} J
Mat gamma_map(const Mat& x);

// Square-class flag: true = square.
enum class SquareClass { Square, Nonsquare };

struct Membership {
  bool is_isometry = false;
  bool is_similarity = false;
  std::optional<Fq> tau;  // in the space's field
  Fq det{};
  bool in_special = false;  // isometry of determinant 1
  bool in_omega = false;
  std::optional<bool> in_DO;  // even-dimensional quadratic kinds
  // Odd characteristic quadratic isometries: square class of the product of
  // (v_i,v_i) over a reflection factorization. Equals the spinor norm on SO.
  std::optional<SquareClass> reflection_norm;
  // Characteristic 2 quadratic isometries.
  std::optional<int> dickson;
};

std::optional<Fq> similarity_factor(const Mat& g, const FormedSpace& sp);
bool is_isometry(const Mat& g, const FormedSpace& sp);
Membership membership(const Mat& g, const FormedSpace& sp);

// x -> x - ((x,v)/Q(v)) v
Mat reflection(const Vec& v, const FormedSpace& sp);
// Vectors v_1, ..., v_t with g = r_{v_t} ... r_{v_1} (product order is irrelevant
// to the invariants derived from it).
std::vector<Vec> reflection_factorization(const Mat& g, const FormedSpace& sp);
// Determinant of Wall's form chi(x(1-g), y(1-g)) = (x(1-g), y) on the image
// of 1 - g. Its square class is that of prod Q(v_i) over any reflection
// factorization of g. Throws NotIsometry.
Fq wall_determinant(const Mat& g, const FormedSpace& sp);
// Square class of prod Q(v_i) (odd q), computed from Wall's form. Throws NotIsometry.
SquareClass spinor_norm(const Mat& g, const FormedSpace& sp);
// rank(g + I) mod 2 (characteristic 2). Throws NotIsometry.
int dickson_invariant(const Mat& g, const FormedSpace& sp);

// Discriminant square class (det of the polar Gram matrix) and sign from the Witt index.
struct DiscSign {
  SquareClass disc;
  int sign;  // +1 or -1
  int witt_index;
};
DiscSign disc_and_sign(const FormedSpace& sp);

// Witt decomposition of a nondegenerate quadratic, symplectic or unitary space:
// rows e_1, f_1, ..., e_w, f_w followed by a basis of the anisotropic part.
struct WittBasis {
  Mat basis;
  int witt_index = 0;
};
WittBasis witt_basis(const FormedSpace& sp);

// r^e on the last hyperbolic (or u_m, v_m) pair, identity elsewhere.
Mat standard_reflection(const FormedSpace& sp);
// The similarity (0 b; 1 0) of a 2-dimensional plus space, and its
// minus-type analogue transported from (0 b2; b2^q 0) over F_{q^2}.
Mat delta_reflection(const FormedSpace& sp);
// b I_m + I_m on <e_i> + <f_i> (plus type), and its minus-type analogue.
Mat delta_element(const FormedSpace& sp);
// Similarities with multiplier tau by backtracking over basis images.
// Throws TooLarge if q^n > 2^16 or more than cap elements are produced.
std::vector<Mat> enumerate_similarities(const FormedSpace& sp, Fq tau, std::size_t cap = 2000000);
// Change of basis taking the standard plus pair (e,f) to (u,v) over F_{q^2}:
// rows (xi, xi^q), (xi^q, xi).
Mat minus_transport(const FormedSpace& sp);

// Rows: a basis of sp (in sp's coordinates) whose Gram data equals that of
// standard_space(sp.kind, sp.n, sp.base). Throws IncompatibleKind when the
// form is not isometric to the standard one, DegenerateForm when singular.
Mat standard_basis_in(const FormedSpace& sp);

// Element of F_{q^2} of order q+1 used as the unitary determinant value.
Fq unitary_alpha(const QuadExt& qe);

}  // namespace spreadlab
