#include "hyperreflex/structure.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace hyperreflex;
using namespace hyperreflex::testing;

namespace {

MatrixSubspace tied_diagonal() {
  // {[[a, b], [0, a]]}: not reflexive, its closure is the upper triangular algebra.
  ComplexMatrix i = ComplexMatrix::Identity(2, 2);
  return MatrixSubspace::from_spanning_set({i, matrix_unit(2, 2, 0, 1)}, 2, 2);
}

}  // namespace

TEST(Reflexive, ClosureOfKnownSpaces) {
  EXPECT_TRUE(is_reflexive(diagonal_masa(3)));
  EXPECT_TRUE(is_reflexive(upper_triangular(3)));
  EXPECT_TRUE(is_reflexive(scalars(2)));
  const MatrixSubspace t = tied_diagonal();
  EXPECT_FALSE(is_reflexive(t));
  EXPECT_TRUE(subspace_equal(reflexive_closure(t), upper_triangular(2), 1e-6));
}

TEST(Reflexive, ClosureOperatorLaws) {
  Rng rng(54);
  for (int trial = 0; trial < 5; ++trial) {
    const MatrixSubspace small = random_subspace(rng, 3, 3, 2);
    const MatrixSubspace big = subspace_sum(small, random_subspace(rng, 3, 3, 1));
    const MatrixSubspace cs = reflexive_closure(small), cb = reflexive_closure(big);
    EXPECT_TRUE(subspace_contains(cs, small, 1e-6));  // extensive
    EXPECT_TRUE(subspace_contains(cb, cs, 1e-6));     // monotone
    EXPECT_TRUE(subspace_equal(reflexive_closure(cs), cs, 1e-6));  // idempotent
  }
}

TEST(Reflexive, ClosureMatchesGridOracle) {
  Rng rng(50);
  for (int trial = 0; trial < 6; ++trial) {
    const auto mask = random_mask(rng, 3, 3, 0.4);
    std::vector<ComplexMatrix> gens;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (mask[a][b]) gens.push_back(matrix_unit(3, 3, a, b));
    gens.push_back(matrix_unit(3, 3, 0, 0) + matrix_unit(3, 3, 1, 2));
    const MatrixSubspace s = MatrixSubspace::from_spanning_set(gens, 3, 3);
    EXPECT_TRUE(subspace_equal(reflexive_closure(s), grid_reflexive_closure(s), 1e-6));
  }
}

TEST(TotalOrder, NestBimodules) {
  const TotalOrderResult u = total_order_check(upper_triangular(3));
  EXPECT_TRUE(u.is_nest_bimodule);
  ASSERT_TRUE(u.spec.has_value());
  EXPECT_TRUE(subspace_equal(build_nest_bimodule(*u.spec), upper_triangular(3)));
  EXPECT_FALSE(total_order_check(diagonal_masa(2)).is_nest_bimodule);
  // A nest in a rotated basis is recognized without a coordinate presentation.
  Rng rng(51);
  const ComplexMatrix w = random_unitary(3, rng);
  const TotalOrderResult r = total_order_check(conjugate(upper_triangular(3), w, w.adjoint()));
  EXPECT_TRUE(r.is_nest_bimodule);
  EXPECT_FALSE(total_order_check(conjugate(family_22(1, 1), random_unitary(2, rng), random_unitary(2, rng)))
                   .is_nest_bimodule);
}

TEST(Classify22, Cases) {
  EXPECT_EQ(classify_22(MatrixSubspace(2, 2)).label, "case 1");
  EXPECT_EQ(classify_22(MatrixSubspace::full(2, 2)).label, "case 1");
  EXPECT_EQ(classify_22(upper_triangular(2)).label, "case 2");
  EXPECT_EQ(classify_22(family_22(0, 0)).label, "case 3c");
  const MatrixSubspace row = MatrixSubspace::from_spanning_set({matrix_unit(2, 2, 0, 0), matrix_unit(2, 2, 0, 1)}, 2, 2);
  EXPECT_EQ(classify_22(row).label, "case 3a");
  EXPECT_EQ(classify_22(adjoint_space(row)).label, "case 3b");
  const Classify22Result c = classify_22(family_22(1, 1));
  EXPECT_FALSE(c.one_hyperreflexive);
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_NEAR(c.witness->certified_ratio, 1.39978, 1e-4);
  EXPECT_TRUE(recheck_witness(*c.witness, 1e-3));
  const Classify22Result t = classify_22(tied_diagonal());
  EXPECT_FALSE(t.one_hyperreflexive);
  ASSERT_TRUE(t.witness.has_value());
  EXPECT_EQ(t.witness->kind, "not_reflexive");
}

TEST(Classify22, InvariantUnderUnitaries) {
  Rng rng(52);
  for (double r : {0.0, 0.5})
    for (double s : {0.0, 1.0}) {
      const MatrixSubspace f = conjugate(family_22(r, s), random_unitary(2, rng), random_unitary(2, rng));
      EXPECT_EQ(classify_22(f).one_hyperreflexive, r == 0.0 && s == 0.0);
    }
}

TEST(Classify23, NormalForms) {
  EXPECT_EQ(classify_23(pattern_space({{true, false, true}, {false, true, true}})).label, "case 3");
  EXPECT_EQ(classify_23(pattern_space({{true, false, false}, {false, true, true}})).label, "case 4");
  EXPECT_EQ(classify_23(pattern_space({{true, true, true}, {false, true, true}})).label, "nest bimodule");
  const Classify23Result m = classify_23(catalog_lookup("masa23").space);
  EXPECT_FALSE(m.one_hyperreflexive);
  ASSERT_TRUE(m.witness.has_value());
  EXPECT_GT(m.witness->certified_ratio, 1.001);
  const Classify23Result t = classify_23(catalog_lookup("masa32").space);
  EXPECT_TRUE(t.transposed);
  EXPECT_FALSE(t.one_hyperreflexive);
  EXPECT_THROW(classify_23(diagonal_masa(2)), InputError);
}

TEST(Detect, RoundTripOfRandomPresentations) {
  Rng rng(53);
  for (int trial = 0; trial < 8; ++trial) {
    const DiagConstSpec d = random_diag_const_spec(rng, uniform_int(rng, 1, 4), uniform_int(rng, 1, 4));
    const MatrixSubspace s = build_diag_const(d);
    const StructureReport r = detect_structure(s);
    if (r.verdict == GlobalVerdict::one_hyperreflexive_consistent) {
      ASSERT_TRUE(r.presentation.has_value());
      EXPECT_TRUE(subspace_equal(build_diag_const(*r.presentation), s, 1e-7));
      EXPECT_TRUE(r.diagnostics_consistent);
    }
    EXPECT_FALSE(structure_report_to_json(s, r).dump().empty());
  }
}

TEST(Detect, MasaObstruction) {
  const StructureReport r = detect_structure(diagonal_masa(3));
  EXPECT_EQ(r.verdict, GlobalVerdict::not_one_hyperreflexive);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_GT(r.witness->certified_ratio, 1.001);
}

TEST(Commutation, DiagonalPairDiagnostics) {
  const MatrixSubspace d = prop_two_scene().space;
  ComplexVector x = ComplexVector::Zero(3), y = ComplexVector::Ones(3);
  x(1) = 1.0;
  const NoncommutingPair p = pair_diagnostics(d, x, y);
  EXPECT_GE(p.q_rank, 0);
  EXPECT_GE(q_commutation_report(upper_triangular(3)).samples, 1);
  EXPECT_TRUE(q_commutation_report(upper_triangular(3)).all_commute);
}

TEST(UnitalAlgebra, Classification) {
  EXPECT_EQ(unital_algebra_classify(upper_triangular(3)).label, "case 1");
  DiagConstSpec off;
  off.d_out = off.d_in = 4;
  off.codomain_partition = off.domain_partition = {{0, 1}, {2, 3}};
  off.blocks = {ZeroBlock{}, ZeroBlock{}};
  // B(C^2) (+) B(C^2) is the annihilator of the off-diagonal blocks.
  const AlgebraClassification c = unital_algebra_classify(annihilator(build_diag_const(off)));
  EXPECT_EQ(c.label, "case 2");
  ASSERT_TRUE(c.projection.has_value());
  EXPECT_TRUE(is_projection(*c.projection));
  const AlgebraClassification d = unital_algebra_classify(prop_two_scene().space);
  EXPECT_EQ(d.verdict, AlgebraCase::not_one_hyperreflexive);
  EXPECT_TRUE(d.witness.has_value());
  EXPECT_EQ(unital_algebra_classify(tied_diagonal()).verdict, AlgebraCase::not_one_hyperreflexive);
  EXPECT_THROW(unital_algebra_classify(family_22(1, 1)), InputError);  // lacks I
  const MatrixSubspace swap_algebra =
      MatrixSubspace::from_spanning_set({ComplexMatrix::Identity(2, 2), matrix_unit(2, 2, 0, 1) + matrix_unit(2, 2, 1, 0)}, 2, 2);
  EXPECT_NO_THROW(unital_algebra_classify(swap_algebra));  // span{I, X} with X^2 = I is an algebra
  const MatrixSubspace no_product = MatrixSubspace::from_spanning_set(
      {ComplexMatrix::Identity(3, 3), matrix_unit(3, 3, 0, 1), matrix_unit(3, 3, 1, 2)}, 3, 3);
  EXPECT_THROW(unital_algebra_classify(no_product), InputError);  // E01 E12 = E02 is missing
}
