#include "hyperreflex/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace hyperreflex;

TEST(Linalg, SvdReconstructsAndIsUnitary) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix m = random_matrix(2 + trial % 4, 1 + trial % 5, rng);
    const SvdResult d = svd(m);
    ComplexMatrix sigma = ComplexMatrix::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < d.values.size(); ++i) sigma(i, i) = d.values(i);
    EXPECT_LT((d.left * sigma * d.right.adjoint() - m).norm(), 1e-10);
    EXPECT_LT((d.left.adjoint() * d.left - ComplexMatrix::Identity(m.rows(), m.rows())).norm(), 1e-10);
    EXPECT_LT((d.right.adjoint() * d.right - ComplexMatrix::Identity(m.cols(), m.cols())).norm(), 1e-10);
    for (Eigen::Index i = 1; i < d.values.size(); ++i) EXPECT_GE(d.values(i - 1), d.values(i));
  }
}

TEST(Linalg, NormOrdering) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix m = random_matrix(3, 4, rng);
    const double op = operator_norm(m), hs = hs_norm(m), tr = trace_norm(m);
    EXPECT_LE(op, hs + 1e-12);
    EXPECT_LE(hs, tr + 1e-12);
    EXPECT_LE(tr, std::sqrt(3.0) * hs + 1e-12);
  }
  EXPECT_DOUBLE_EQ(operator_norm(ComplexMatrix::Identity(3, 3)), 1.0);
  EXPECT_DOUBLE_EQ(trace_norm(ComplexMatrix::Identity(3, 3)), 3.0);
}

TEST(Linalg, HsInnerConjugatesFirstArgument) {
  ComplexMatrix a = ComplexMatrix::Zero(1, 1), b = ComplexMatrix::Zero(1, 1);
  a(0, 0) = cplx(0, 1);
  b(0, 0) = 1.0;
  EXPECT_NEAR(std::abs(hs_inner(a, b) - cplx(0, -1)), 0.0, 1e-15);
}

TEST(Linalg, VecIsColumnMajor) {
  ComplexMatrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const ComplexVector v = vec(m);
  // entry (a, b) sits at b * rows + a
  EXPECT_EQ(v(1 * 2 + 0), cplx(2));
  EXPECT_EQ(v(2 * 2 + 1), cplx(6));
  EXPECT_EQ(unvec(v, 2, 3), m);
}

TEST(Linalg, KronAndVecIdentity) {
  Rng rng(3);
  const ComplexMatrix a = random_matrix(2, 3, rng), x = random_matrix(3, 4, rng), b = random_matrix(4, 2, rng);
  // vec(A X B) = (B^T (x) A) vec(X)
  EXPECT_LT((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).norm(), 1e-10);
  const ComplexMatrix ds = direct_sum(a, b);
  EXPECT_EQ(ds.rows(), 6);
  EXPECT_EQ(ds.cols(), 5);
  EXPECT_EQ(ds.block(2, 3, 4, 2), b);
}

TEST(Linalg, RanksKernelsAndProjections) {
  Rng rng(4);
  const ComplexMatrix u = random_matrix(5, 2, rng), w = random_matrix(2, 4, rng);
  const ComplexMatrix m = u * w;  // rank 2
  EXPECT_EQ(numerical_rank(m), 2);
  const ComplexMatrix k = null_space(m);
  EXPECT_EQ(k.cols(), 2);
  EXPECT_LT((m * k).norm(), 1e-10);
  const ComplexMatrix q = orthonormal_columns(u);
  EXPECT_EQ(q.cols(), 2);
  const ComplexMatrix c = orthogonal_complement(u, 5);
  EXPECT_EQ(c.cols(), 3);
  EXPECT_LT((q.adjoint() * c).norm(), 1e-10);
  const ComplexMatrix p = projection_onto_columns(u);
  EXPECT_TRUE(is_projection(p));
  EXPECT_LT((p * u - u).norm(), 1e-10);
  EXPECT_EQ(numerical_rank(ComplexMatrix(ComplexMatrix::Zero(3, 3))), 0);
}

TEST(Linalg, RandomUnitaryAndEigen) {
  Rng rng(5);
  const ComplexMatrix u = random_unitary(4, rng);
  EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(4, 4)).norm(), 1e-10);
  const ComplexMatrix a = random_matrix(4, 4, rng);
  const ComplexMatrix h = a + a.adjoint();
  const HermitianEigen e = hermitian_eigen(h);
  for (Eigen::Index i = 1; i < 4; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  EXPECT_LT((h * e.vectors - e.vectors * e.values.cast<cplx>().asDiagonal()).norm(), 1e-9);
  EXPECT_NEAR(random_unit_vector(5, rng).norm(), 1.0, 1e-12);
}

TEST(Linalg, RejectsNonFinite) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(require_finite(m), InputError);
  EXPECT_THROW(svd(m), InputError);
}
