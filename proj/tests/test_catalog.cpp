#include "hyperreflex/catalog.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace hyperreflex;
using namespace hyperreflex::testing;

namespace {

// Independent oracle for the circle minimum: golden-section search on every cell of a 20000-point scan.
double circle_min_oracle() {
  const int n = 20000;
  auto f = [](double th) { return kappa103_psi(std::cos(th), std::sin(th)); };
  double best = 1e300;
  for (int i = 0; i < n; ++i) {
    double a = 2 * std::numbers::pi * i / n, b = 2 * std::numbers::pi * (i + 1) / n;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 60; ++it) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      if (f(c) < f(d)) b = d;
      else a = c;
    }
    best = std::min(best, f(0.5 * (a + b)));
  }
  return best;
}

}  // namespace

TEST(Catalog, NestBimoduleMask) {
  // Upper triangular 3 x 3: domain interval j reaches codomain rows < j.
  const NestBimoduleSpec s{{0, 1, 2, 3}, {0, 1, 2, 3}, {0, 1, 2, 3}};
  EXPECT_TRUE(subspace_equal(build_nest_bimodule(s), upper_triangular(3)));
  EXPECT_THROW((NestBimoduleSpec{{0, 2, 1}, {0, 3}, {0, 1, 1}}.validate()), InputError);
  EXPECT_THROW((NestBimoduleSpec{{0, 3}, {0, 3}, {0, 2}}.validate()), InputError);
  EXPECT_THROW((NestBimoduleSpec{{0, 1, 3}, {0, 1, 3}, {0, 2, 1}}.validate()), InputError);
}

TEST(Catalog, TriConstReplacesCornerBlock) {
  // Column 0 reaches row 0; columns 1, 2 reach every row. The lower right 2 x 2 corner becomes C x.
  TriConstSpec t;
  t.outer = NestBimoduleSpec{{0, 1, 3}, {0, 1, 3}, {0, 1, 2}};
  Rng rng(21);
  const ComplexMatrix x = random_matrix(2, 2, rng);
  t.atoms = {TriConstAtom{2, x}};
  const MatrixSubspace s = build_tri_const(t);
  EXPECT_EQ(s.dim(), 4);
  ComplexMatrix el = ComplexMatrix::Zero(3, 3);
  el.block(1, 1, 2, 2) = x;
  EXPECT_TRUE(contains(s, el));
  EXPECT_FALSE(contains(s, matrix_unit(3, 3, 1, 1)));
  t.atoms = {TriConstAtom{2, ComplexMatrix::Ones(2, 1)}};
  EXPECT_THROW(build_tri_const(t), InputError);
  t.atoms = {TriConstAtom{1, ComplexMatrix::Ones(1, 1)}};
  EXPECT_NO_THROW(build_tri_const(t));
}

TEST(Catalog, DiagConstOffDiagonalBlocksAreFree) {
  DiagConstSpec d;
  d.d_out = d.d_in = 3;
  d.codomain_partition = {{0}, {1, 2}};
  d.domain_partition = {{0}, {1, 2}};
  d.blocks = {ZeroBlock{}, ZeroBlock{}};
  const MatrixSubspace s = build_diag_const(d);
  EXPECT_EQ(s.dim(), 4);  // the two off-diagonal blocks
  EXPECT_TRUE(contains(s, matrix_unit(3, 3, 0, 1)));
  EXPECT_FALSE(contains(s, matrix_unit(3, 3, 1, 1)));
  d.domain_partition = {{0}, {1}};
  EXPECT_THROW(build_diag_const(d), InputError);
}

TEST(Catalog, RandomSpecsBuild) {
  Rng rng(20);
  for (int i = 0; i < 50; ++i) {
    const DiagConstSpec d = random_diag_const_spec(rng, uniform_int(rng, 1, 4), uniform_int(rng, 1, 4));
    EXPECT_NO_THROW(build_diag_const(d));
  }
}

TEST(Catalog, Family22) {
  const MatrixSubspace f = family_22(0.5, 1.0);
  EXPECT_EQ(f.dim(), 2);
  ComplexMatrix m(2, 2);
  m << 1.0, 0.5, 0.0, 0.0;  // a = 1, b = 0
  EXPECT_TRUE(contains(f, m));
  EXPECT_TRUE(subspace_equal(family_22(0, 0), diagonal_masa(2)));
}

TEST(Catalog, PropTwoScene) {
  const PropTwoScene p = prop_two_scene();
  EXPECT_EQ(p.space.dim(), 2);
  EXPECT_NEAR(p.witness_s, std::sqrt(3.0) / 2, 1e-15);
  EXPECT_NEAR(p.witness_vector().norm(), 1.0, 1e-12);
  ComplexMatrix expected(3, 3);
  expected << 0, 0, std::numbers::sqrt2, -std::numbers::sqrt2, -1, 0, 0, 0, 1;
  EXPECT_LT((p.test - expected).norm(), 1e-15);
}

TEST(Catalog, Kappa103Compression) {
  const Kappa103Scene k = kappa103_scene();
  const double a = std::sin(std::numbers::pi / 8), b = std::cos(std::numbers::pi / 8);
  ComplexMatrix qtp_expected(2, 2);
  qtp_expected << a, -b, b, a;
  const ComplexMatrix qtp = k.codomain_basis.adjoint() * k.test * k.domain_basis;
  EXPECT_LT((qtp - qtp_expected).norm(), 1e-12);
  EXPECT_NEAR(operator_norm(k.test), 1.0, 1e-12);
  ComplexMatrix e1(2, 2), e2(2, 2);
  e1 << 1, 1, 0, 0;
  e2 << 0, 0, 0, 1;
  const MatrixSubspace expected = MatrixSubspace::from_spanning_set({e1, e2}, 2, 2);
  EXPECT_TRUE(subspace_equal(compress_to_bases(k.space, k.domain_basis, k.codomain_basis), expected, 1e-10));
}

TEST(Catalog, Kappa103CircleMinimumPinned) {
  const auto [k, angle] = kappa103_k();
  EXPECT_NEAR(k, 0.058058261758407797, 1e-9);
  EXPECT_NEAR(k, circle_min_oracle(), 1e-9);
  EXPECT_NEAR(kappa103_psi(std::cos(angle), std::sin(angle)), k, 1e-12);
  EXPECT_GT(k, 0.058);
}

TEST(Catalog, SmallSSceneCertificate) {
  for (double s : {0.5, 0.2, 0.1, 0.05}) {
    const SmallSScene sc = small_s_scene(s);
    EXPECT_EQ(sc.space.dim(), 4);
    EXPECT_NEAR(operator_norm(sc.a), 1.0, 1e-12);
    EXPECT_NEAR(sc.psi.trace_norm(), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(sc.psi(sc.a) - cplx(1.0)), 0.0, 1e-12);
    for (const auto& x : sc.space.basis()) EXPECT_LT(std::abs(sc.psi(x)), 1e-12);
  }
  EXPECT_THROW(small_s_scene(0.0), InputError);
  EXPECT_THROW(small_s_scene(1.5), InputError);
}

TEST(Catalog, LookupIds) {
  for (const auto& id : catalog_examples()) EXPECT_NO_THROW(catalog_lookup(id)) << id;
  EXPECT_EQ(catalog_lookup("diag:3").space.dim(), 3);
  EXPECT_EQ(catalog_lookup("family22:r=1,s=0").space.dim(), 2);
  EXPECT_THROW(catalog_lookup("nope"), InputError);
  EXPECT_THROW(catalog_lookup("diag:x"), InputError);
  EXPECT_THROW(catalog_lookup("family22:r=1"), InputError);
}
