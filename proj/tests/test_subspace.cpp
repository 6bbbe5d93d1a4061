#include "hyperreflex/catalog.hpp"
#include "hyperreflex/subspace.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace hyperreflex;
using namespace hyperreflex::testing;

TEST(Subspace, BasisIsOrthonormalAndRankRevealing) {
  Rng rng(10);
  const ComplexMatrix a = random_matrix(2, 3, rng), b = random_matrix(2, 3, rng);
  const MatrixSubspace s = MatrixSubspace::from_spanning_set({a, b, a + 2.0 * b, ComplexMatrix::Zero(2, 3)}, 2, 3);
  EXPECT_EQ(s.dim(), 2);
  const ComplexMatrix g = s.vec_basis().adjoint() * s.vec_basis();
  EXPECT_LT((g - ComplexMatrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_TRUE(contains(s, 3.0 * a - b));
  EXPECT_FALSE(contains(s, random_matrix(2, 3, rng)));
  EXPECT_LT((s.combine(s.coefficients(a)) - a).norm(), 1e-12);
}

TEST(Subspace, ZeroAndFull) {
  const MatrixSubspace z(2, 3);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.ambient_dim(), 6);
  EXPECT_TRUE(MatrixSubspace::full(2, 3).is_full());
  EXPECT_THROW(MatrixSubspace::from_spanning_set(std::vector<ComplexMatrix>{}), InputError);
}

TEST(Subspace, AnnihilatorPairsToZero) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = uniform_int(rng, 1, 4), n = uniform_int(rng, 1, 4);
    const MatrixSubspace s = random_subspace(rng, m, n, uniform_int(rng, 0, m * n));
    const MatrixSubspace ann = annihilator(s);
    EXPECT_EQ(s.dim() + ann.dim(), m * n);
    for (const auto& phi : ann.basis())
      for (const auto& x : s.basis()) EXPECT_LT(std::abs(Functional(phi)(x)), 1e-10);
  }
}

TEST(Subspace, ActionAndRangeProjection) {
  const MatrixSubspace d = diagonal_masa(3);
  ComplexVector x = ComplexVector::Zero(3);
  x(0) = 1.0;
  x(2) = 2.0;
  EXPECT_EQ(action(d, x).cols(), 2);
  const ComplexMatrix p = range_projection(d, x);
  EXPECT_NEAR(p(0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(p(1, 1).real(), 0.0, 1e-12);
  EXPECT_EQ(action_matrix(d, x).cols(), 3);
}

TEST(Subspace, TensorWithFullPlacesBlocks) {
  ComplexMatrix t = ComplexMatrix::Zero(3, 3);
  t(0, 0) = 1.0;
  t(1, 1) = 0.5;
  const MatrixSubspace s = tensor_with_full(one_dimensional(t), 2);
  EXPECT_EQ(s.dim(), 4);
  Rng rng(12);
  const ComplexMatrix x = random_matrix(2, 2, rng);
  ComplexMatrix el = ComplexMatrix::Zero(6, 6);
  el.block(0, 0, 2, 2) = x;
  el.block(2, 2, 2, 2) = 0.5 * x;
  EXPECT_TRUE(contains(s, el));
  EXPECT_TRUE(contains(s, kron(t, x)));
}

TEST(Subspace, CompressionAndAdjoint) {
  const MatrixSubspace u = upper_triangular(3);
  ComplexMatrix p = ComplexMatrix::Zero(3, 3), q = ComplexMatrix::Zero(3, 3);
  p(0, 0) = p(1, 1) = 1.0;
  q(1, 1) = q(2, 2) = 1.0;
  const Compression c = compress(u, p, q);
  EXPECT_EQ(c.space.d_in(), 2);
  EXPECT_EQ(c.space.d_out(), 2);
  EXPECT_EQ(c.space.dim(), 1);  // only the (1,1) entry survives
  EXPECT_EQ(adjoint_space(u).dim(), 6);
  EXPECT_TRUE(subspace_equal(adjoint_space(adjoint_space(u)), u));
}

TEST(Subspace, LatticeOperations) {
  Rng rng(13);
  const MatrixSubspace a = random_subspace(rng, 3, 3, 4), b = random_subspace(rng, 3, 3, 7);
  EXPECT_EQ(subspace_sum(a, b).dim(), 9);
  EXPECT_EQ(subspace_intersection(a, b).dim(), 2);
  EXPECT_TRUE(subspace_contains(subspace_sum(a, b), a));
  EXPECT_TRUE(subspace_contains(a, subspace_intersection(a, b)));
  const ComplexMatrix u = random_unitary(3, rng), v = random_unitary(3, rng);
  EXPECT_TRUE(subspace_equal(conjugate(conjugate(a, u, v), u.adjoint(), v.adjoint()), a));
  EXPECT_THROW(subspace_sum(a, MatrixSubspace(2, 3)), InputError);
}

TEST(Subspace, JsonRoundTrip) {
  Rng rng(14);
  const MatrixSubspace s = random_subspace(rng, 2, 3, 3);
  const MatrixSubspace back = subspace_from_json(nlohmann::json::parse(subspace_to_json(s).dump()));
  EXPECT_TRUE(subspace_equal(s, back, 1e-12));
  const ComplexMatrix m = random_matrix(2, 2, rng);
  EXPECT_LT((matrix_from_json(matrix_to_json(m)) - m).norm(), 1e-15);
}

TEST(Subspace, JsonErrorsNameTheField) {
  nlohmann::json j = {{"d_out", 2}, {"d_in", 2}};
  try {
    subspace_from_json(j);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("basis"), std::string::npos);
  }
  j["basis"] = nlohmann::json::array({{{"re", {{1, 0}, {0}}}}});
  EXPECT_THROW(subspace_from_json(j), InputError);
  j["basis"] = nlohmann::json::array({{{"re", {{1, 0, 0}, {0, 1, 0}}}}});
  EXPECT_THROW(subspace_from_json(j), InputError);  // shape mismatch
}
