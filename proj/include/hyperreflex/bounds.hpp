#pragma once

#include "hyperreflex/types.hpp"

#include <functional>

namespace hyperreflex {

struct BoxBound {
  double upper = 0.0;  // valid upper bound of the objective over the box
  double value = 0.0;  // objective at `point` (a valid lower bound of the max)
  RealVector point;
};

struct BranchAndBoundResult {
  double upper = 0.0;  // certified max upper bound (over the whole box when complete or not)
  double lower = 0.0;  // best value found
  RealVector argmax;
  long boxes = 0;
  bool complete = false;  // reached upper - lower <= abs_tol within budget
};

/// Best-first branch-and-bound over an axis-aligned box. `bound(center, half_widths)` must return a
/// valid upper bound over the cell and the objective at some point of it. Cells are bisected along
/// their widest side. The returned upper is valid even when the budget runs out.
BranchAndBoundResult branch_and_bound(const RealVector& lo, const RealVector& hi,
                                      const std::function<BoxBound(const RealVector&, const RealVector&)>& bound,
                                      double abs_tol, long box_budget, double budget_secs = 0.0);

/// Maximizes a parametric piece using its curvature constant. Values are squared betas.
BranchAndBoundResult maximize_piece(const ParametricPiece& piece, double abs_tol, long box_budget,
                                    double budget_secs = 0.0);

/// Point of the projective sphere CP^{n-1}, n <= 3, for parameters
/// n=2: (a, phi) -> (cos a, sin a e^{i phi});
/// n=3: (a, b, phi1, phi2) -> (cos a, sin a cos b e^{i phi1}, sin a sin b e^{i phi2}).
ComplexVector projective_point(const RealVector& p, Eigen::Index n);
/// Column k is the partial derivative in parameter k; each has norm <= 1, as do all second partials.
ComplexMatrix projective_partials(const RealVector& p, Eigen::Index n);
void projective_box(Eigen::Index n, RealVector& lo, RealVector& hi);

/// Exact sup of ||(I - P_{Sx}) T x|| over unit x, with rank decided at rank_tol.
double beta_objective(const ComplexMatrix& t, const MatrixSubspace& s, const ComplexVector& x,
                      double rank_tol = kRankTol);

/// Certified upper bound for beta over CP^{d_in - 1}, d_in <= 3, by branch-and-bound with
/// the cell bound g(x) <= ||R_c x|| for any coefficient vector c.
BranchAndBoundResult grid_beta_upper(const ComplexMatrix& t, const MatrixSubspace& s, double abs_tol,
                                     long box_budget, double budget_secs = 0.0);

}  // namespace hyperreflex
