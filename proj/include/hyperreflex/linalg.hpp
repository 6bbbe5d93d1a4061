#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperreflex {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Malformed input: bad shapes, non-finite entries, invalid specs.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Relative rank tolerance used by every rank decision in the library.
inline constexpr double kRankTol = 1e-8;
/// Singular values below this are zero regardless of scale.
inline constexpr double kAbsRankFloor = 1e-13;

struct SvdResult {
  ComplexMatrix left;   // rows x rows, unitary
  RealVector values;    // min(rows, cols), descending
  ComplexMatrix right;  // cols x cols, unitary
};

void require_finite(const ComplexMatrix& m, const std::string& what = "matrix");

SvdResult svd(const ComplexMatrix& m);
RealVector singular_values(const ComplexMatrix& m);

double operator_norm(const ComplexMatrix& m);
double trace_norm(const ComplexMatrix& m);
double hs_norm(const ComplexMatrix& m);
/// tr(a^dagger b); equals conj(a) . b entrywise.
cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Number of singular values above rank_tol * sigma_max (and above the absolute floor).
int numerical_rank(const RealVector& descending_values, double rank_tol = kRankTol);
int numerical_rank(const ComplexMatrix& m, double rank_tol = kRankTol);

/// Orthonormal columns spanning the numerical column space of `columns`.
ComplexMatrix orthonormal_columns(const ComplexMatrix& columns, double rank_tol = kRankTol);
/// Orthonormal columns spanning the numerical kernel of `m`.
ComplexMatrix null_space(const ComplexMatrix& m, double rank_tol = kRankTol);
/// Orthonormal columns spanning the orthogonal complement of span(columns) in C^n.
ComplexMatrix orthogonal_complement(const ComplexMatrix& columns, Eigen::Index n,
                                    double rank_tol = kRankTol);

ComplexMatrix projection_onto_span(const std::vector<ComplexVector>& vectors,
                                   double rank_tol = kRankTol);
ComplexMatrix projection_onto_columns(const ComplexMatrix& columns, double rank_tol = kRankTol);
bool is_projection(const ComplexMatrix& p, double tol = 1e-8);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-major vectorization and its inverse.
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols);

ComplexMatrix matrix_unit(Eigen::Index rows, Eigen::Index cols, Eigen::Index r, Eigen::Index c);

// Random generation. Every caller supplies its own engine.
ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);
ComplexVector random_vector(Eigen::Index n, Rng& rng);
ComplexVector random_unit_vector(Eigen::Index n, Rng& rng);
ComplexMatrix random_unitary(Eigen::Index n, Rng& rng);
double uniform01(Rng& rng);

/// Hermitian eigen-decomposition with ascending eigenvalues.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;
};
HermitianEigen hermitian_eigen(const ComplexMatrix& h);

}  // namespace hyperreflex
