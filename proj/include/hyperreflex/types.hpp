#pragma once

#include "hyperreflex/subspace.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hyperreflex {

/// How beta() certifies its upper bound.
enum class UpperMode {
  automatic,   // exact pattern formula, else scene pieces, else grid when d_in <= 3, else off
  off,         // upper is +infinity and the value is flagged heuristic
  grid,        // branch-and-bound cover of the projective sphere (d_in <= 3)
  parametric,  // scene-supplied parameterization maximized by branch-and-bound
};

struct OptimizerOptions {
  int restarts = 32;
  int max_iters = 400;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  UpperMode certified_upper_mode = UpperMode::automatic;
  /// Box budget for grid / parametric branch-and-bound.
  long box_budget = 2000000;
  /// Wall-clock budget in seconds for searches that can run long; <= 0 disables.
  double budget_secs = 0.0;

  void validate() const;
};

/// An estimate bracketed by certified bounds.
struct CertifiedValue {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  /// Dual certificate backing `lower` (distance: annihilating functional; beta: rank-one yx*).
  std::optional<Functional> dual;
  /// Primal coefficients backing `upper` for distance.
  std::optional<ComplexVector> primal;
  /// Witness vectors (beta maximizers, extremal sequences) or a witness operator in `witness_operator`.
  std::vector<ComplexVector> witness;
  std::optional<ComplexMatrix> witness_operator;
  bool converged = false;
  bool heuristic = false;
  std::string method;
  std::string note;

  double gap() const { return upper - lower; }
};

/// A parametrized family of structured vectors on which beta() always searches.
struct Stratum {
  std::string name;
  RealVector lo, hi;  // parameter box
  std::function<ComplexVector(const RealVector&)> embed;
};

/// A smooth piece of a scene-supplied parameterization of squared beta values.
/// The curvature constant L bounds |f(p+d) - f(p) - grad f(p).d| <= L/2 (sum_k |d_k|)^2 on the box.
struct ParametricPiece {
  std::string name;
  RealVector lo, hi;
  std::function<double(const RealVector&)> value_sq;
  double curvature = 0.0;
};

/// Extra information a caller may supply to beta() for one fixed operator T.
struct BetaHints {
  std::vector<ComplexVector> seeds;
  std::vector<Stratum> strata;
  /// Pieces whose maximum equals beta(T)^2; valid only for the operator they were built for.
  std::vector<ParametricPiece> pieces;
};

/// Builds pieces for an arbitrary operator T (used for spaces whose parameterization is T-independent).
using PieceFactory = std::function<std::vector<ParametricPiece>(const ComplexMatrix&)>;

}  // namespace hyperreflex
