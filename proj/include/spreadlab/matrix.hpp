#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spreadlab/gfpoly.hpp"

namespace spreadlab {

using Vec = std::vector<Fq>;

// Dense matrix over a finite field; vectors are rows and act on the right.
class Mat {
 public:
  Mat() = default;
  Mat(FieldPtr f, int rows, int cols);
  static Mat identity(FieldPtr f, int n);
  static Mat from_rows(FieldPtr f, const std::vector<Vec>& rows);
  static Mat diag(FieldPtr f, const std::vector<Fq>& d);

  const FieldPtr& field() const { return f_; }
  int rows() const { return r_; }
  int cols() const { return c_; }
  bool square() const { return r_ == c_; }
  Fq& at(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
  Fq at(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }
  Vec row(int i) const;
  const std::vector<Fq>& data() const { return a_; }

  Mat operator*(const Mat& o) const;
  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat scaled(Fq s) const;
  bool operator==(const Mat& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }
  bool operator!=(const Mat& o) const { return !(*this == o); }
  bool operator<(const Mat& o) const;

  Mat transpose() const;
  Mat inverse() const;
  Mat pow(std::int64_t e) const;
  // Entrywise x -> x^(p^i).
  Mat frob(unsigned i) const;
  // Entrywise x -> x^e.
  Mat entry_pow(u64 e) const;
  Fq det() const;
  int rank() const;
  bool is_identity() const;
  bool is_scalar() const;
  u64 order() const;  // multiplicative order; matrix must be invertible

  // Row-reduced echelon form and pivot columns.
  Mat rref(std::vector<int>* pivots = nullptr) const;
  // Basis (as rows) of {v : v * M = 0}.
  Mat left_kernel() const;
  Mat block_diag(const Mat& o) const;
  Mat submatrix(int r0, int c0, int nr, int nc) const;

  std::string to_string() const;
  static Mat parse(FieldPtr f, const std::string& s);

 private:
  FieldPtr f_;
  int r_ = 0, c_ = 0;
  std::vector<Fq> a_;
};

Vec vec_mul(const Vec& v, const Mat& m);
Vec vec_add(const FieldPtr& f, const Vec& a, const Vec& b);
Vec vec_scale(const FieldPtr& f, const Vec& a, Fq s);
Fq dot(const FieldPtr& f, const Vec& a, const Vec& b);

// Companion matrix of a monic polynomial (acts as multiplication by x on F[x]/(f)).
Mat companion(const Poly& f);
Poly charpoly(const Mat& m);
// Invariant factors d_1 | d_2 | ... (monic, nontrivial ones only).
std::vector<Poly> invariant_factors(const Mat& m);
Poly min_poly(const Mat& m);
Mat map_entries(const Mat& m, const Embedding& emb);
// Inverse of map_entries; throws if some entry is outside the subfield.
Mat map_entries_down(const Mat& m, const Embedding& emb);

// Regular representation: an F_{q^d}-matrix as an F_q-matrix using the basis
// 1, t, ..., t^(d-1) of the big field over the small one, t = big alpha.
Mat restrict_scalars(const Mat& m, const Embedding& emb);
// Coordinates of a big-field element over the basis 1, t, ..., t^(d-1).
std::vector<Fq> subfield_coords(const Embedding& emb, Fq x);

// Enumerate all subspaces of dimension k (as RREF row bases) of F^n.
std::vector<Mat> all_subspaces(const FieldPtr& f, int n, int k);
// Canonical RREF of a row span.
Mat span_rref(const Mat& rows);
// Whether U * g spans U.
bool subspace_invariant(const Mat& basis_rref, const Mat& g);

}  // namespace spreadlab
