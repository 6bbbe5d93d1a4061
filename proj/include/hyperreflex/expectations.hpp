#pragma once

#include "hyperreflex/types.hpp"

#include <vector>

namespace hyperreflex {

/// Paired coordinate blocks: E_i on the domain, F_i on the codomain, same index set.
/// Blocks on each side are disjoint; they need not cover all coordinates.
struct PartitionPair {
  int d_in = 0;
  int d_out = 0;
  std::vector<std::vector<int>> domain_blocks;
  std::vector<std::vector<int>> codomain_blocks;

  void validate() const;
  std::size_t size() const { return domain_blocks.size(); }
  /// True when both sides' blocks cover every coordinate.
  bool covering() const;
  /// The space D of operators T with T = sum_i F_i T E_i.
  MatrixSubspace diagonal_space() const;
  ComplexMatrix domain_projection(const std::vector<bool>& subset) const;
  ComplexMatrix codomain_projection(const std::vector<bool>& subset) const;
};

/// Singletons {i} -> {i} for i < min(d_out, d_in).
PartitionPair singleton_pair(int d_out, int d_in);
/// Equal consecutive blocks of size k on both sides of C^{m k}.
PartitionPair block_pair(int m, int k);

/// Phi(T) = sum_i F_i T E_i, the average of (F(X) - F(X^c)) T (E(X) - E(X^c)) over all subsets X.
ComplexMatrix sign_expectation(const ComplexMatrix& t, const PartitionPair& pp);

/// The group G^(n) of 2^n x 2^n signed permutation tensors generated by diag(+-1, +-1) and the
/// flip [[0, +-1], [+-1, 0]]; 8^n elements.
std::vector<ComplexMatrix> sign_flip_group(int n);
/// Average of G T G^* over G^(n) (x) I_k, in closed form I_{2^n} (x) (mean of the diagonal k x k blocks).
ComplexMatrix group_expectation(const ComplexMatrix& t, int n, int k);
/// Projections P (x) I_k with G = +-(2P - I) or G = +-i(2Q - I) for G in G^(n), excluding 0 and I.
std::vector<ComplexMatrix> group_lattice_projections(int n, int k);

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double factor = 0.0;
  bool pass = false;
};

/// lhs = ||T - Phi(T)||, rhs = factor * beta_D(T) with D the block space of pp (beta exact: D is a pattern).
/// factor 2 in general; with economy = true the partitions must cover and factor = 2 (1 - 2^{1-|I|}),
/// which is 3/2 for three blocks.
BoundReport averaging_bound_check(const ComplexMatrix& t, const PartitionPair& pp, bool economy = false,
                                  double tol = 1e-6);

/// lhs = dist(T, C I_{2^n} (x) M_k) (upper bound), rhs = factor * max ||P^perp T P|| over the group
/// lattice projections, factor 3/2 for n = 1 and 2 for n >= 2.
BoundReport scalartensor_bound_check(const ComplexMatrix& t, int n, int k, const OptimizerOptions& opts = {});

struct ContractionReport {
  double beta_phi = 0.0;  // beta_S(Phi(T)) estimate
  double beta_t = 0.0;    // beta_S(T) estimate
  bool pass = false;
};
/// beta_S(Phi(T)) <= beta_S(T) for S inside the block space of pp. The beta_S(T) search is seeded with
/// the sign flips (E(X) - E(X^c)) x of the beta_S(Phi(T)) witness x.
ContractionReport expectation_beta_contraction_check(const ComplexMatrix& t, const MatrixSubspace& s,
                                                     const PartitionPair& pp, const OptimizerOptions& opts = {});

/// C T (x) M_k for T = diag(taus), i.e. {diag(tau_0 A, tau_1 A, ...) : A in M_k}, with its block partition.
struct DiagonalTensorModel {
  std::vector<double> taus;
  int k = 1;

  void validate() const;
  MatrixSubspace space() const;
  PartitionPair blocks() const;
  /// taus = (1, s, 0) with 0 < s <= 1.
  bool rank_two_form() const;
};

struct ChainReport {
  double dist = 0.0;          // dist(X, S) estimate
  double beta_s = 0.0;        // beta_S(X) estimate
  double expectation_gap = 0.0;  // ||X - Phi(X)||
  double beta_d = 0.0;        // beta_D(X), exact
  double dist_phi = 0.0;      // dist(Phi(X), S) estimate
  double beta_s_phi = 0.0;    // beta_S(Phi(X)) estimate
  double link1_factor = 2.0;  // ||X - Phi(X)|| <= link1_factor * beta_D(X)
  double link2_factor = 2.0;  // dist(Phi(X), S) <= link2_factor * beta_S(Phi(X))
  bool link1 = false, link2 = false, link3 = false;
  double chain_factor = 4.0;  // dist(X, S) <= chain_factor * beta_S(X)
  bool chain = false;
  bool pass = false;
};
/// The chain dist(X,S) <= ||X - Phi(X)|| + dist(Phi(X), S) <= a beta_D(X) + b beta_S(Phi(X)) <= (a+b) beta_S(X)
/// with (a, b) = (2, 2), or (3/2, 1) when rank_two is set (requires the (1, s, 0) form).
ChainReport four_bound_chain(const ComplexMatrix& x, const DiagonalTensorModel& model, bool rank_two = false,
                             const OptimizerOptions& opts = {});

}  // namespace hyperreflex
