#pragma once

#include "hyperreflex/types.hpp"

#include <optional>
#include <vector>

namespace hyperreflex {

/// dist(T, S) = min_c ||T - sum c_i S_i||. upper is the achieved primal value, lower the best
/// certified dual value Re phi(T) over annihilating phi of trace norm <= 1.
CertifiedValue distance(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts = {});

/// Dual value Re phi(T) / ||phi||_1 after projecting phi onto the annihilator of S.
double dual_value(const ComplexMatrix& t, const MatrixSubspace& s, const ComplexMatrix& phi,
                  ComplexMatrix* projected = nullptr);

/// beta_S(T) = sup_{|x|=1} ||(I - P_{Sx}) T x||. lower is backed by a rank-one annihilating
/// functional yx^* with |y^dagger T x| = lower; upper per opts.certified_upper_mode.
CertifiedValue beta(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts = {},
                    const BetaHints& hints = {});

/// beta as sup |y^dagger T x| over unit x, y with yx^* annihilating S, by alternating maximization
/// seeded from the adjoint problem. Heuristic lower bound with its rank-one certificate.
CertifiedValue beta_via_rank_one(const ComplexMatrix& t, const MatrixSubspace& s,
                                 const OptimizerOptions& opts = {});

/// True when S is spanned by matrix units; fills the support mask.
bool is_pattern_space(const MatrixSubspace& s, std::vector<std::vector<bool>>* support = nullptr,
                      double tol = 1e-10);
/// Exact beta for a pattern space: max over nonempty column sets J of ||P_{rows not reached by J} T P_J||.
CertifiedValue pattern_beta(const ComplexMatrix& t, const std::vector<std::vector<bool>>& support);

struct KappaOptions {
  OptimizerOptions inner;
  int restarts = 6;
  int ascent_steps = 25;
  double unbounded_threshold = 1e3;
  std::vector<ComplexMatrix> seeds;
  std::optional<PieceFactory> pieces;
  /// kappa_complete_probe at n >= 2, where each beta search costs seconds: random starts and ascent
  /// steps per start on top of the seeds carried up from level n - 1.
  int lifted_restarts = 1;
  int lifted_ascent_steps = 4;
};

struct KappaResult {
  CertifiedValue value;  // lower: certified ratio (>= 1); estimate: best heuristic ratio
  ComplexMatrix witness;           // best certified witness operator (unit norm, in the annihilator)
  ComplexMatrix estimate_witness;  // operator attaining value.estimate
  CertifiedValue witness_distance;
  CertifiedValue witness_beta;
  bool degenerate = false;           // S is the full space
  bool unbounded_suspected = false;  // estimate above the configured threshold
};

/// Ratio of dist(T,S) to beta_S(T) for one operator with both values and the certified ratio.
struct RatioEvaluation {
  CertifiedValue dist;
  CertifiedValue beta;
  double certified = 1.0;  // dist.lower / beta.upper, or 1 when beta has no certified upper
  double estimate = 1.0;   // dist.estimate / beta.estimate
};
RatioEvaluation evaluate_ratio(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts,
                               const BetaHints& hints = {});

KappaResult kappa_lower(const MatrixSubspace& s, const KappaOptions& opts = {});

/// kappa lower bounds for S (x) M_n, n = 1..n_max, each seeded with the previous witness.
std::vector<KappaResult> kappa_complete_probe(const MatrixSubspace& s, int n_max, const KappaOptions& opts = {},
                                              long dimension_cap = 1296);

struct ExtremalWitness {
  std::vector<ComplexVector> sequence;
  std::vector<double> image_norms;     // ||T x_k||
  std::vector<double> range_residuals; // ||P_{S x_k} T x_k||
  double operator_norm = 0.0;
  bool found = false;
};
/// Searches unit x with ||Tx|| ~ ||T|| and Tx orthogonal to Sx. Requires dist(T,S) = ||T|| within tol.
ExtremalWitness extremal_witness(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts = {});

struct ScaledKappaReport {
  KappaResult original;
  KappaResult scaled;
  double condition = 1.0;
  // Pointwise ratio(T; SX) <= cond * ratio(T X^{-1}; S), certified left side against the right estimate.
  bool scaled_within = false;    // T = the SX witness
  bool original_within = false;  // the same with S and SX exchanged, T = (S witness) X
  bool pass = false;
};
/// Kappa searches for S and S X, related through cond(X) = ||X|| ||X^{-1}|| at both witnesses.
ScaledKappaReport scaled_kappa_relation(const MatrixSubspace& s, const ComplexMatrix& x, const KappaOptions& opts = {});

}  // namespace hyperreflex
