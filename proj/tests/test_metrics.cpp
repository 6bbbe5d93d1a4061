#include "hyperreflex/bounds.hpp"
#include "hyperreflex/catalog.hpp"
#include "hyperreflex/metrics.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hyperreflex;
using namespace hyperreflex::testing;

namespace {

OptimizerOptions quick() {
  OptimizerOptions o;
  o.restarts = 8;
  o.certified_upper_mode = UpperMode::off;
  return o;
}

}  // namespace

TEST(Distance, TrivialCases) {
  Rng rng(30);
  const ComplexMatrix t = random_matrix(3, 3, rng);
  EXPECT_NEAR(distance(t, MatrixSubspace(3, 3)).estimate, operator_norm(t), 1e-9);
  EXPECT_NEAR(distance(t, MatrixSubspace::full(3, 3)).upper, 0.0, 1e-9);
  const MatrixSubspace s = random_subspace(rng, 3, 3, 4);
  EXPECT_NEAR(distance(s.basis()[0] + 2.0 * s.basis()[1], s).upper, 0.0, 1e-8);
  EXPECT_THROW(distance(random_matrix(2, 3, rng), s), InputError);
}

TEST(Distance, DualCertificateBracketsTheValue) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = uniform_int(rng, 1, 4), n = uniform_int(rng, 1, 4);
    const MatrixSubspace s = random_subspace(rng, m, n, uniform_int(rng, 0, m * n - 1));
    const ComplexMatrix t = random_matrix(m, n, rng);
    const CertifiedValue d = distance(t, s);
    EXPECT_LE(d.lower, d.upper + 1e-12);
    EXPECT_LE(d.gap(), 1e-5);
    ASSERT_TRUE(d.dual.has_value());
    EXPECT_NEAR(dual_value(t, s, d.dual->matrix()), d.lower, 1e-8);
  }
}

TEST(Distance, ScalarsHaveClosedForm) {
  // dist(T, C I) for Hermitian T is half the spread of its spectrum.
  ComplexMatrix t = ComplexMatrix::Zero(3, 3);
  t(0, 0) = 3.0;
  t(1, 1) = -1.0;
  t(2, 2) = 0.5;
  EXPECT_NEAR(distance(t, scalars(3)).estimate, 2.0, 1e-8);
}

TEST(Beta, ZeroOperatorAndZeroSpace) {
  Rng rng(32);
  const MatrixSubspace s = random_subspace(rng, 3, 3, 3);
  EXPECT_NEAR(beta(ComplexMatrix::Zero(3, 3), s).estimate, 0.0, 1e-12);
  const ComplexMatrix t = random_matrix(2, 3, rng);
  EXPECT_NEAR(beta(t, MatrixSubspace(2, 3)).estimate, operator_norm(t), 1e-6);
  EXPECT_NEAR(beta_via_rank_one(t, MatrixSubspace(2, 3)).estimate, operator_norm(t), 1e-6);
}

TEST(Beta, PatternFormulaMatchesSearch) {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mask = random_mask(rng, 3, 3, 0.5);
    const MatrixSubspace s = pattern_space(mask);
    std::vector<std::vector<bool>> support;
    ASSERT_TRUE(is_pattern_space(s, &support));
    EXPECT_EQ(support, mask);
    const ComplexMatrix t = random_matrix(3, 3, rng);
    const double exact = pattern_beta(t, support).estimate;
    EXPECT_NEAR(beta_via_rank_one(t, s, quick()).estimate, exact, 1e-5);
    EXPECT_LE(beta(t, s, quick()).estimate, exact + 1e-8);
  }
}

TEST(Beta, NeverExceedsDistance) {
  Rng rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = uniform_int(rng, 1, 3), n = uniform_int(rng, 1, 3);
    const MatrixSubspace s = random_subspace(rng, m, n, uniform_int(rng, 0, m * n));
    const ComplexMatrix t = random_matrix(m, n, rng);
    EXPECT_LE(beta(t, s, quick()).estimate, distance(t, s).upper + 2e-6);
  }
}

TEST(Beta, GridUpperIsCertified) {
  Rng rng(35);
  const MatrixSubspace s = random_subspace(rng, 3, 2, 2);
  const ComplexMatrix t = random_matrix(3, 2, rng);
  OptimizerOptions o;
  o.certified_upper_mode = UpperMode::grid;
  const CertifiedValue b = beta(t, s, o);
  EXPECT_LE(b.estimate, b.upper + 1e-12);
  EXPECT_LE(b.upper - b.estimate, 1e-4);
  // Any point value is below the certified upper bound.
  for (int i = 0; i < 100; ++i) EXPECT_LE(beta_objective(t, s, random_unit_vector(2, rng)), b.upper + 1e-12);
}

TEST(Beta, PropTwoWitness) {
  const PropTwoScene p = prop_two_scene();
  EXPECT_NEAR(beta_objective(p.test, p.space, p.witness_vector()), 1.5, 1e-12);
}

TEST(Kappa, DiagonalMasaOfOrderTwoIsOne) {
  KappaOptions ko;
  ko.restarts = 3;
  const KappaResult k = kappa_lower(diagonal_masa(2), ko);
  EXPECT_NEAR(k.value.estimate, 1.0, 1e-3);
  EXPECT_GE(k.value.lower, 1.0);
}

TEST(Kappa, FullSpaceIsDegenerate) {
  const KappaResult k = kappa_lower(MatrixSubspace::full(2, 2));
  EXPECT_TRUE(k.degenerate);
}

TEST(Kappa, RatioEvaluationIsConsistent) {
  const PropTwoScene p = prop_two_scene();
  BetaHints h;
  h.pieces = p.pieces(p.test);
  const RatioEvaluation r = evaluate_ratio(p.test, p.space, OptimizerOptions{}, h);
  EXPECT_NEAR(r.estimate, 2.0 / std::sqrt(3.0), 1e-6);
  EXPECT_LE(r.certified, r.estimate + 1e-9);
  EXPECT_GE(r.certified, 2.0 / std::sqrt(3.0) - 1e-6);
}

TEST(Bounds, BranchAndBoundFindsMaximum) {
  // max of -(x - 0.3)^2 - (y + 0.2)^2 with Lipschitz bound on each cell.
  auto f = [](const RealVector& p) { return -(p(0) - 0.3) * (p(0) - 0.3) - (p(1) + 0.2) * (p(1) + 0.2); };
  RealVector lo(2), hi(2);
  lo << -1, -1;
  hi << 1, 1;
  const auto r = branch_and_bound(
      lo, hi,
      [&](const RealVector& c, const RealVector& h) {
        // f is concave with Hessian -2 I: f <= f(c) + |grad f(c)| |h| + |h|^2 on the box.
        const double gn = 2.0 * std::hypot(c(0) - 0.3, c(1) + 0.2);
        return BoxBound{f(c) + gn * h.norm() + h.squaredNorm(), f(c), c};
      },
      1e-6, 1000000);
  EXPECT_TRUE(r.complete);
  EXPECT_NEAR(r.lower, 0.0, 1e-6);
  EXPECT_GE(r.upper, 0.0);
}

TEST(Bounds, ProjectivePointsAreUnit) {
  RealVector lo, hi;
  projective_box(3, lo, hi);
  Rng rng(36);
  for (int i = 0; i < 20; ++i) {
    RealVector p(lo.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = lo(k) + uniform01(rng) * (hi(k) - lo(k));
    EXPECT_NEAR(projective_point(p, 3).norm(), 1.0, 1e-12);
  }
}
