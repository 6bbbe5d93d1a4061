#include "hyperreflex/catalog.hpp"
#include "hyperreflex/expectations.hpp"
#include "hyperreflex/metrics.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace hyperreflex;
using namespace hyperreflex::testing;

namespace {

OptimizerOptions quick() {
  OptimizerOptions o;
  o.restarts = 6;
  o.certified_upper_mode = UpperMode::off;
  return o;
}

}  // namespace

TEST(Partition, ValidationAndDiagonalSpace) {
  const PartitionPair pp = block_pair(3, 2);
  EXPECT_TRUE(pp.covering());
  EXPECT_EQ(pp.size(), 3u);
  EXPECT_EQ(pp.diagonal_space().dim(), 12);
  PartitionPair bad = pp;
  bad.domain_blocks[1].push_back(0);  // overlaps block 0
  EXPECT_THROW(bad.validate(), InputError);
  EXPECT_EQ(singleton_pair(2, 3).size(), 2u);
  EXPECT_FALSE(singleton_pair(2, 3).covering());
}

TEST(SignExpectation, MatchesBlockDiagonalPart) {
  Rng rng(40);
  const PartitionPair pp = block_pair(3, 2);
  const ComplexMatrix t = random_matrix(6, 6, rng);
  ComplexMatrix diag = ComplexMatrix::Zero(6, 6);
  for (int i = 0; i < 3; ++i) diag.block(2 * i, 2 * i, 2, 2) = t.block(2 * i, 2 * i, 2, 2);
  EXPECT_LT((sign_expectation(t, pp) - diag).norm(), 1e-12);
  EXPECT_LT((exhaustive_sign_average(t, pp) - diag).norm(), 1e-12);
}

TEST(GroupExpectation, ClosedFormMatchesGroupAverage) {
  Rng rng(41);
  EXPECT_EQ(sign_flip_group(1).size(), 8u);
  EXPECT_EQ(sign_flip_group(2).size(), 64u);
  for (int n = 1; n <= 2; ++n)
    for (int k = 1; k <= 2; ++k) {
      const int d = (1 << n) * k;
      const ComplexMatrix t = random_matrix(d, d, rng);
      EXPECT_LT((group_expectation(t, n, k) - exhaustive_group_average(t, n, k)).norm(), 1e-10);
    }
}

TEST(GroupExpectation, LatticeProjectionsAreProper) {
  for (const auto& p : group_lattice_projections(1, 2)) {
    EXPECT_TRUE(is_projection(p));
    EXPECT_GT(p.norm(), 1e-9);
    EXPECT_GT((ComplexMatrix::Identity(p.rows(), p.cols()) - p).norm(), 1e-9);
  }
}

TEST(AveragingBound, OffDiagonalPartIsTwiceBeta) {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const PartitionPair pp = block_pair(2 + trial % 2, 1 + trial % 3);
    const ComplexMatrix t = random_matrix(pp.d_out, pp.d_in, rng);
    EXPECT_TRUE(averaging_bound_check(t, pp).pass);
    const BoundReport e = averaging_bound_check(t, pp, true);
    EXPECT_TRUE(e.pass) << e.lhs << " " << e.rhs;
  }
  // Economy factor for three blocks.
  EXPECT_NEAR(averaging_bound_check(random_matrix(3, 3, rng), block_pair(3, 1), true).factor, 1.5, 1e-15);
}

TEST(AveragingBound, ConstantThreeIdentity) {
  // T = (1/3) 1 1^*: ||T - Phi(T)|| = 2/3 = (2 - 2/3) dist(T, C I).
  const ComplexMatrix t = ComplexMatrix::Constant(3, 3, 1.0 / 3.0);
  const ComplexMatrix phi = sign_expectation(t, singleton_pair(3, 3));
  OptimizerOptions tight;
  tight.tol = 1e-8;  // the identity is asserted within 1e-8
  const double d = distance(t, scalars(3), tight).estimate;
  EXPECT_NEAR(d, 0.5, 1e-8);
  EXPECT_NEAR(operator_norm(t - phi), (2.0 - 2.0 / 3.0) * d, 1e-8);
}

TEST(ScalarTensor, Bounds) {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    EXPECT_TRUE(scalartensor_bound_check(random_matrix(2, 2, rng), 1, 1, quick()).pass);
    EXPECT_TRUE(scalartensor_bound_check(random_matrix(4, 4, rng), 1, 2, quick()).pass);
    EXPECT_TRUE(scalartensor_bound_check(random_matrix(4, 4, rng), 2, 1, quick()).pass);
  }
  EXPECT_NEAR(scalartensor_bound_check(random_matrix(2, 2, rng), 1, 1, quick()).factor, 1.5, 0);
  EXPECT_NEAR(scalartensor_bound_check(random_matrix(4, 4, rng), 2, 1, quick()).factor, 2.0, 0);
}

TEST(Contraction, BetaDoesNotGrowUnderExpectation) {
  Rng rng(44);
  const DiagonalTensorModel model{{1.0, 0.5, 0.0}, 1};
  for (int trial = 0; trial < 10; ++trial) {
    const ContractionReport c =
        expectation_beta_contraction_check(random_matrix(3, 3, rng), model.space(), model.blocks(), quick());
    EXPECT_TRUE(c.pass) << c.beta_phi << " " << c.beta_t;
  }
}

TEST(DiagonalTensorModel, ShapesAndForm) {
  const DiagonalTensorModel m{{1.0, 0.3, 0.0}, 2};
  EXPECT_EQ(m.space().dim(), 4);
  EXPECT_EQ(m.space().d_in(), 6);
  EXPECT_TRUE(m.rank_two_form());
  EXPECT_FALSE((DiagonalTensorModel{{1.0, 0.3, 0.2}, 2}.rank_two_form()));
  EXPECT_THROW((DiagonalTensorModel{{}, 2}.validate()), InputError);
  EXPECT_THROW(four_bound_chain(ComplexMatrix::Zero(9, 9), DiagonalTensorModel{{1.0, 0.5, 0.2}, 3}, true), InputError);
}

TEST(FourBound, ChainHolds) {
  Rng rng(45);
  const DiagonalTensorModel model{{1.0, 0.5, 0.0}, 1};
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix x = random_matrix(3, 3, rng);
    const ChainReport g = four_bound_chain(x, model, false, quick());
    EXPECT_TRUE(g.pass);
    EXPECT_LE(g.dist, 4.0 * g.beta_s + 1e-6);
    const ChainReport r = four_bound_chain(x, model, true, quick());
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.dist, 2.5 * r.beta_s + 1e-6);
  }
}
