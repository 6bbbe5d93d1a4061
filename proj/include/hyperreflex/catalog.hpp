#pragma once

#include "hyperreflex/bounds.hpp"
#include "hyperreflex/types.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hyperreflex {

/// Coordinate nests 0 = n_0 < ... < n_p = d_in and 0 = m_0 < ... < m_q = d_out with a
/// monotone order map theta on domain indices 0..p (theta[0] is unused by the mask).
/// Column b in domain interval j (n_{j-1} <= b < n_j) may be nonzero only in rows a < m_{theta(j)}.
struct NestBimoduleSpec {
  std::vector<int> domain_nest;
  std::vector<int> codomain_nest;
  std::vector<int> order_map;

  int d_in() const { return domain_nest.empty() ? 0 : domain_nest.back(); }
  int d_out() const { return codomain_nest.empty() ? 0 : codomain_nest.back(); }
  void validate() const;
  /// mask(a, b) is true when the matrix unit E_ab belongs to the bimodule.
  std::vector<std::vector<bool>> mask() const;
};

/// One selected atom block: the domain interval j (1-based) paired with codomain atom theta(j).
struct TriConstAtom {
  int domain_interval = 0;
  ComplexMatrix op;  // shape (m_theta(j) - m_theta(j)-1) x (n_j - n_{j-1})
};

/// A nest bimodule whose selected atom blocks are restricted to C * op.
struct TriConstSpec {
  NestBimoduleSpec outer;
  std::vector<TriConstAtom> atoms;

  void validate() const;
  /// Row and column coordinate ranges [row_lo, row_hi) x [col_lo, col_hi) of an atom.
  struct Block {
    int row_lo, row_hi, col_lo, col_hi;
  };
  Block block_of(const TriConstAtom& atom) const;
};

struct FullBlock {};
struct ZeroBlock {};
struct OneDimBlock {
  ComplexMatrix op;
};
using BlockSpec = std::variant<FullBlock, ZeroBlock, NestBimoduleSpec, TriConstSpec, OneDimBlock>;

/// Diagonal blocks Q_i T P_i constrained by sub-specs; off-diagonal blocks free.
/// Index sets may be empty; together they must partition the coordinates.
struct DiagConstSpec {
  int d_out = 0;
  int d_in = 0;
  std::vector<std::vector<int>> domain_partition;
  std::vector<std::vector<int>> codomain_partition;
  std::vector<BlockSpec> blocks;

  void validate() const;
};

MatrixSubspace build_nest_bimodule(const NestBimoduleSpec& spec);
MatrixSubspace build_tri_const(const TriConstSpec& spec);
MatrixSubspace build_diag_const(const DiagConstSpec& spec);
MatrixSubspace build_block(const BlockSpec& block, int d_out, int d_in);

/// span{[[1, r],[0, 0]], [[0, s],[0, 1]]}.
MatrixSubspace family_22(double r, double s);
/// span of the matrix units E_ab with support(a, b) true.
MatrixSubspace pattern_space(const std::vector<std::vector<bool>>& support);
MatrixSubspace diagonal_masa(int n);
MatrixSubspace scalars(int n);
MatrixSubspace upper_triangular(int n);
MatrixSubspace one_dimensional(const ComplexMatrix& t);

/// Parameterized squared-beta pieces ||M v - <M v, v> v||^2 over v = (0, cos a, sin a e^{i phi})
/// and the point e_1, for M = T and M = T^dagger. Their maximum is an upper bound for beta
/// of the algebra {diag(a, b, b)} because every element of its invariant lattice has rank <= 1
/// or corank <= 1 with a generator from these families.
std::vector<ParametricPiece> diag_abb_lattice_pieces(const ComplexMatrix& t);

struct PropTwoScene {
  MatrixSubspace space;   // {diag(a, b, b)}
  ComplexMatrix test;     // [[0,0,sqrt2],[-sqrt2,-1,0],[0,0,1]]
  double witness_s = 0.0; // the maximizing v_s = (0, c, s) has s = sqrt(3)/2
  ComplexVector witness_vector() const;
  PieceFactory pieces;
};
PropTwoScene prop_two_scene();

struct Kappa103Scene {
  double alpha = 0.0;  // sin(pi/8)
  double beta = 0.0;   // cos(pi/8)
  MatrixSubspace space;          // {[a I_4; b I_4]} in B(C^4, C^8)
  ComplexMatrix test;            // 8 x 4
  ComplexMatrix p;               // projection onto K = span{e1, e2} in C^4
  ComplexMatrix q;               // projection onto span{f1, f2} in C^8
  ComplexMatrix domain_basis;    // [e1 e2]
  ComplexMatrix codomain_basis;  // [f1 f2]
  std::vector<ParametricPiece> pieces;  // valid for `test` only
};
Kappa103Scene kappa103_scene();
/// psi(x, y) = 1/2 (x+y)^2 (a x - b y)^2 + y^2 (b x + a y)^2 with a = sin(pi/8), b = cos(pi/8).
double kappa103_psi(double x, double y);
/// min of psi on the unit circle, by dense scan and Brent refinement; returns {k, angle}.
std::pair<double, double> kappa103_k();

struct SmallSScene {
  double s = 0.0;
  MatrixSubspace space;  // {diag(X, sX, 0) : X in M_2} in M_6
  ComplexMatrix a;       // unit-norm test operator
  Functional psi;        // annihilating certificate with psi(a) = 1 in the tr(phi^dagger T) pairing
  std::vector<Stratum> strata;
};
SmallSScene small_s_scene(double s);

/// Certified bracket for beta_S(A)^2 with S = C diag(t1, t2, 0) (x) M_2 (the small-s spaces are t = (1, s)).
/// Off the stratum where the first two blocks of x are parallel, Sx contains the first two blocks and
/// the residual is ||P_3 A x||. On the stratum x = (cos a u, sin a e^{i phi} u, w) the residual is
/// ||R(a, phi) A L(a, phi)||^2 with L an isometry, maximized by Lipschitz branch-and-bound over (a, phi).
BranchAndBoundResult diag_tensor_beta_sq_bound(const ComplexMatrix& a, double t1, double t2, double abs_tol,
                                               long box_budget = 2000000, double budget_secs = 0.0);

/// A named catalog entry for the CLI and the experiment registry.
struct CatalogEntry {
  std::string id;
  std::string description;
  MatrixSubspace space;
  std::optional<ComplexMatrix> test;
  BetaHints hints;                    // for `test`
  std::optional<PieceFactory> pieces; // for arbitrary operators
  std::vector<ComplexMatrix> kappa_seeds;  // annihilator operators with a known large dist/beta ratio
  bool expect_reflexive = true;
};

/// Resolves ids such as "prop-two", "kappa103", "small-s:0.1", "family22:r=1,s=0", "masa23",
/// "masa32", "diag:3", "scalars:2", "upper:3", "ct-diag:1,0.5,0". Throws InputError on unknown ids.
CatalogEntry catalog_lookup(const std::string& id);
std::vector<std::string> catalog_examples();

}  // namespace hyperreflex
