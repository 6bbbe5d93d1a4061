#pragma once

#include "hyperreflex/linalg.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace hyperreflex {

/// A linear subspace of B(C^d_in, C^d_out) held as an HS-orthonormal basis.
class MatrixSubspace {
 public:
  MatrixSubspace() = default;
  /// The zero subspace of the given ambient shape.
  MatrixSubspace(Eigen::Index d_out, Eigen::Index d_in);

  /// Orthonormalizes `spanning`; rank decided at relative tolerance `tol`.
  static MatrixSubspace from_spanning_set(const std::vector<ComplexMatrix>& spanning,
                                          Eigen::Index d_out, Eigen::Index d_in,
                                          double tol = kRankTol);
  /// Shape taken from the first matrix; the list must be nonempty.
  static MatrixSubspace from_spanning_set(const std::vector<ComplexMatrix>& spanning,
                                          double tol = kRankTol);
  /// Column j of `columns` is vec() of a spanning element.
  static MatrixSubspace from_vec_columns(const ComplexMatrix& columns, Eigen::Index d_out,
                                         Eigen::Index d_in, double tol = kRankTol);
  static MatrixSubspace full(Eigen::Index d_out, Eigen::Index d_in);

  Eigen::Index d_out() const { return d_out_; }
  Eigen::Index d_in() const { return d_in_; }
  Eigen::Index ambient_dim() const { return d_out_ * d_in_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_.size()); }
  bool is_zero() const { return basis_.empty(); }
  bool is_full() const { return dim() == ambient_dim(); }

  const std::vector<ComplexMatrix>& basis() const { return basis_; }
  const ComplexMatrix& basis_element(Eigen::Index i) const { return basis_[static_cast<std::size_t>(i)]; }
  /// (d_out*d_in) x dim, orthonormal columns.
  const ComplexMatrix& vec_basis() const { return vec_basis_; }

  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels) { labels_ = std::move(labels); }

  /// Element sum_i c_i S_i.
  ComplexMatrix combine(const ComplexVector& coeffs) const;
  /// Coefficients of the HS projection of t.
  ComplexVector coefficients(const ComplexMatrix& t) const;

 private:
  Eigen::Index d_out_ = 0;
  Eigen::Index d_in_ = 0;
  std::vector<ComplexMatrix> basis_;
  ComplexMatrix vec_basis_;
  std::vector<std::string> labels_;
};

/// A trace-class functional acting by T -> tr(matrix^dagger T).
class Functional {
 public:
  Functional() = default;
  explicit Functional(ComplexMatrix matrix);
  const ComplexMatrix& matrix() const { return matrix_; }
  double trace_norm() const { return trace_norm_; }
  cplx operator()(const ComplexMatrix& t) const { return hs_inner(matrix_, t); }

 private:
  ComplexMatrix matrix_;
  double trace_norm_ = 0.0;
};

void require_shape(const MatrixSubspace& s, const ComplexMatrix& t, const std::string& op);
void require_same_ambient(const MatrixSubspace& a, const MatrixSubspace& b, const std::string& op);

ComplexMatrix project_hs(const MatrixSubspace& s, const ComplexMatrix& t);
bool contains(const MatrixSubspace& s, const ComplexMatrix& t, double tol = 1e-8);
MatrixSubspace annihilator(const MatrixSubspace& s);

/// Orthonormal columns spanning S x.
ComplexMatrix action(const MatrixSubspace& s, const ComplexVector& x, double rank_tol = kRankTol);
/// The d_out x dim matrix [S_1 x, ..., S_d x].
ComplexMatrix action_matrix(const MatrixSubspace& s, const ComplexVector& x);
ComplexMatrix range_projection(const MatrixSubspace& s, const ComplexVector& x,
                               double rank_tol = kRankTol);

/// Q S P restricted to Ran P -> Ran Q, expressed in orthonormal bases of the ranges.
struct Compression {
  MatrixSubspace space;
  ComplexMatrix domain_basis;    // d_in x rank P
  ComplexMatrix codomain_basis;  // d_out x rank Q
};
Compression compress(const MatrixSubspace& s, const ComplexMatrix& p, const ComplexMatrix& q);
MatrixSubspace compression(const MatrixSubspace& s, const ComplexMatrix& p, const ComplexMatrix& q);
/// Compression onto given orthonormal bases (columns) of domain and codomain subspaces.
MatrixSubspace compress_to_bases(const MatrixSubspace& s, const ComplexMatrix& domain_basis,
                                 const ComplexMatrix& codomain_basis);

MatrixSubspace adjoint_space(const MatrixSubspace& s);
/// S (x) M_k with S acting on the first tensor factor.
MatrixSubspace tensor_with_full(const MatrixSubspace& s, Eigen::Index k);
/// U S V.
MatrixSubspace conjugate(const MatrixSubspace& s, const ComplexMatrix& u, const ComplexMatrix& v);
/// S X for a square X on the domain side.
MatrixSubspace right_multiply(const MatrixSubspace& s, const ComplexMatrix& x);

MatrixSubspace subspace_sum(const MatrixSubspace& a, const MatrixSubspace& b);
MatrixSubspace subspace_intersection(const MatrixSubspace& a, const MatrixSubspace& b);
bool subspace_contains(const MatrixSubspace& outer, const MatrixSubspace& inner, double tol = 1e-8);
bool subspace_equal(const MatrixSubspace& a, const MatrixSubspace& b, double tol = 1e-8);

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& where = "matrix");
nlohmann::json subspace_to_json(const MatrixSubspace& s);
MatrixSubspace subspace_from_json(const nlohmann::json& j);

}  // namespace hyperreflex
