#include "hyperreflex/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace hyperreflex {

void require_finite(const ComplexMatrix& m, const std::string& what) {
  if (!m.allFinite()) throw InputError(what + " has non-finite entries");
}

SvdResult svd(const ComplexMatrix& m) {
  if (m.size() == 0) throw InputError("svd of an empty matrix");
  require_finite(m);
  Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

RealVector singular_values(const ComplexMatrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::JacobiSVD<ComplexMatrix> solver(m);
  return solver.singularValues();
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m).sum();
}

double hs_norm(const ComplexMatrix& m) { return m.norm(); }

cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InputError("hs_inner: shape mismatch");
  return (a.conjugate().cwiseProduct(b)).sum();
}

int numerical_rank(const RealVector& s, double rank_tol) {
  if (s.size() == 0 || s(0) <= kAbsRankFloor) return 0;
  const double cut = std::max(rank_tol * s(0), kAbsRankFloor);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

int numerical_rank(const ComplexMatrix& m, double rank_tol) {
  if (m.size() == 0) return 0;
  return numerical_rank(singular_values(m), rank_tol);
}

ComplexMatrix orthonormal_columns(const ComplexMatrix& columns, double rank_tol) {
  if (columns.cols() == 0 || columns.rows() == 0) return ComplexMatrix(columns.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> solver(columns, Eigen::ComputeThinU);
  const int r = numerical_rank(solver.singularValues(), rank_tol);
  return solver.matrixU().leftCols(r);
}

ComplexMatrix null_space(const ComplexMatrix& m, double rank_tol) {
  if (m.rows() == 0) return ComplexMatrix::Identity(m.cols(), m.cols());
  if (m.cols() == 0) return ComplexMatrix(0, 0);
  Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullV);
  const int r = numerical_rank(solver.singularValues(), rank_tol);
  return solver.matrixV().rightCols(m.cols() - r);
}

ComplexMatrix orthogonal_complement(const ComplexMatrix& columns, Eigen::Index n,
                                    double rank_tol) {
  if (columns.cols() == 0) return ComplexMatrix::Identity(n, n);
  return null_space(columns.adjoint(), rank_tol);
}

ComplexMatrix projection_onto_columns(const ComplexMatrix& columns, double rank_tol) {
  const ComplexMatrix q = orthonormal_columns(columns, rank_tol);
  ComplexMatrix p = q * q.adjoint();
  return 0.5 * (p + p.adjoint());
}

ComplexMatrix projection_onto_span(const std::vector<ComplexVector>& vectors, double rank_tol) {
  if (vectors.empty()) return ComplexMatrix(0, 0);
  const Eigen::Index n = vectors.front().size();
  ComplexMatrix cols(n, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != n) throw InputError("projection_onto_span: length mismatch");
    cols.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return projection_onto_columns(cols, rank_tol);
}

bool is_projection(const ComplexMatrix& p, double tol) {
  if (p.rows() != p.cols()) return false;
  const double scale = std::max(1.0, p.norm());
  return (p - p.adjoint()).norm() <= tol * scale && (p * p - p).norm() <= tol * scale;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw InputError("unvec: length mismatch");
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix matrix_unit(Eigen::Index rows, Eigen::Index cols, Eigen::Index r, Eigen::Index c) {
  ComplexMatrix e = ComplexMatrix::Zero(rows, cols);
  e(r, c) = 1.0;
  return e;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

ComplexVector random_vector(Eigen::Index n, Rng& rng) { return random_matrix(n, 1, rng).col(0); }

ComplexVector random_unit_vector(Eigen::Index n, Rng& rng) {
  ComplexVector v = random_vector(n, rng);
  return v / v.norm();
}

ComplexMatrix random_unitary(Eigen::Index n, Rng& rng) {
  const ComplexMatrix g = random_matrix(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (h + h.adjoint()));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace hyperreflex
