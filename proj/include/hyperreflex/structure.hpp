#pragma once

#include "hyperreflex/catalog.hpp"
#include "hyperreflex/metrics.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hyperreflex {

struct StructureOptions {
  int batch_size = 0;        // vectors per closure batch; 0 means 4 d_in
  int stability_window = 3;  // consecutive batches without new constraints
  int max_batches = 64;
  int samples = 16;          // generic vectors added to the structured range samples
  double tol = 1e-7;         // subspace comparisons and rank decisions
  double margin = 1e-3;      // a certified ratio must exceed 1 + margin to count as an obstruction
  std::uint64_t seed = 0;
  OptimizerOptions inner;    // beta / distance calls inside the structure routines

  void validate() const;
};

/// Ref(S) = {T : Tx in Sx for all x}: rank-one annihilators y x^* from generic x, then from beta
/// witnesses of candidate elements until every candidate has beta_S = 0. Always contains S.
MatrixSubspace reflexive_closure(const MatrixSubspace& s, const StructureOptions& opts = {});
bool is_reflexive(const MatrixSubspace& s, const StructureOptions& opts = {});

/// Domain vectors probing the range map x -> Sx: random vectors supported on every coordinate
/// subset of size <= 2 and on prefixes and suffixes, `samples` generic vectors, and vectors found by
/// a local search where dim Sx drops below its generic value.
std::vector<ComplexVector> range_samples(const MatrixSubspace& s, const StructureOptions& opts);

struct TotalOrderResult {
  bool is_nest_bimodule = false;
  bool reflexive = false;
  bool ranges_ordered = false;
  /// Coordinate presentation (rows and columns permuted by the orders below) when S is a pattern
  /// nest bimodule; absent for nests in a rotated basis.
  std::optional<NestBimoduleSpec> spec;
  std::vector<int> row_order, col_order;
  std::string reason;
};
TotalOrderResult total_order_check(const MatrixSubspace& s, const StructureOptions& opts = {});

struct NoncommutingPair {
  ComplexVector x, y;
  int q_rank = 0;           // rank of (Q_x v Q_y) - (Q_x ^ Q_y)
  int compression_dim = 0;  // dim of Q S restricted to span{x, y}
  bool violates_rank_two_form = false;  // q_rank != 2 or compression_dim != 1
};
struct CommutationReport {
  int samples = 0;
  bool all_commute = true;
  std::vector<NoncommutingPair> pairs;
  bool any_violation() const;
};
CommutationReport q_commutation_report(const MatrixSubspace& s, const StructureOptions& opts = {});
/// The diagnostics for one pair of domain vectors (noncommuting or not).
NoncommutingPair pair_diagnostics(const MatrixSubspace& s, const ComplexVector& x, const ComplexVector& y,
                                  double tol = 1e-7);

/// A compression Q S P (orthonormal bases of Ran P and Ran Q) with a test operator whose certified
/// dist / beta ratio exceeds 1 + margin. ratio = +inf when the test lies in Ref(QSP) but not in QSP.
struct ObstructionWitness {
  std::string kind;
  ComplexMatrix domain_basis;
  ComplexMatrix codomain_basis;
  MatrixSubspace compressed;
  ComplexMatrix test;
  CertifiedValue dist;
  CertifiedValue beta;
  double certified_ratio = 1.0;
};
/// Re-evaluates dist and beta of w.test against w.compressed and the certified ratio.
bool recheck_witness(const ObstructionWitness& w, double margin, const OptimizerOptions& opts = {});

enum class Case22 { trivial_dimension, codimension_one, rank_one_range, rank_one_kernel, masa, not_one_hyperreflexive };
struct Classify22Result {
  Case22 verdict = Case22::not_one_hyperreflexive;
  std::string label;  // "case 1", "case 2", "case 3a", "case 3b", "case 3c", "not 1-hyperreflexive"
  int dim = 0;
  bool one_hyperreflexive = false;
  /// dim 2 without kernel or cokernel: S = {[[a, ar + bs],[0, b]]} in the bases x1, x1' and y1, y1'.
  std::optional<double> r, s;
  std::vector<ComplexVector> rank_one_points;  // x with dim Sx = 1
  std::optional<ObstructionWitness> witness;
  std::string note;
};
Classify22Result classify_22(const MatrixSubspace& s, const StructureOptions& opts = {});

enum class Case23 { nest_bimodule, one_dimensional, two_masa_columns, masa_with_row, scalar_block_with_column, not_one_hyperreflexive };
struct Classify23Result {
  Case23 verdict = Case23::not_one_hyperreflexive;
  std::string label;  // "nest bimodule", "dim 1", "case 3", "case 4", "case 5", "not 1-hyperreflexive"
  int dim = 0;
  bool one_hyperreflexive = false;
  bool transposed = false;  // input was 3 x 2 and was classified through its adjoint
  /// Orthonormal bases bringing S to the normal form of the case (domain 3 x 3, codomain 2 x 2).
  std::optional<ComplexMatrix> domain_basis, codomain_basis;
  std::optional<ComplexMatrix> block_operator;  // T of case 5
  std::optional<ObstructionWitness> witness;
  std::string note;
};
Classify23Result classify_23(const MatrixSubspace& s, const StructureOptions& opts = {});

/// Searches small compressions of S for a certified obstruction to 1-hyperreflexivity.
std::optional<ObstructionWitness> find_obstruction(const MatrixSubspace& s, const StructureOptions& opts = {});

enum class BlockKind { zero, full, one_dimensional, nest_bimodule, tri_const, obstruction, unresolved };
std::string to_string(BlockKind k);

struct BlockVerdict {
  BlockKind kind = BlockKind::unresolved;
  std::vector<int> rows, cols;  // coordinates of C_j and D_j, in presentation order
  std::optional<BlockSpec> spec;
  std::optional<ObstructionWitness> obstruction;
};

enum class GlobalVerdict { one_hyperreflexive_consistent, not_one_hyperreflexive, inconclusive };
std::string to_string(GlobalVerdict v);

struct StructureReport {
  std::vector<std::vector<int>> codomain_partition;  // C_j as coordinate sets
  std::vector<std::vector<int>> domain_partition;    // D_j
  std::vector<BlockVerdict> blocks;
  GlobalVerdict verdict = GlobalVerdict::inconclusive;
  std::optional<DiagConstSpec> presentation;  // rebuilds to S when every block is recognized
  std::optional<ObstructionWitness> witness;
  CommutationReport commutation;
  bool diagnostics_consistent = true;  // no rank-two-form violation alongside a consistent verdict
  std::string note;
};
/// Block decomposition in the given coordinates: rows and columns are grouped by the entries that S
/// does not contain, coupled groups are merged, and each block is recognized or searched for obstructions.
StructureReport detect_structure(const MatrixSubspace& s, const StructureOptions& opts = {});

enum class AlgebraCase { nest_with_scalar_atoms, two_block_sum, not_one_hyperreflexive, inconclusive };
struct AlgebraClassification {
  AlgebraCase verdict = AlgebraCase::inconclusive;
  std::string label;  // "case 1", "case 2", "not 1-hyperreflexive", "inconclusive"
  std::optional<TriConstSpec> nest;       // case 1 in permuted coordinates, atoms are multiples of I
  std::vector<int> order;                 // coordinate order of the nest
  std::optional<ComplexMatrix> projection;  // case 2
  std::optional<ObstructionWitness> witness;
  std::string note;
};
/// Throws InputError when A does not contain I or is not closed under multiplication.
AlgebraClassification unital_algebra_classify(const MatrixSubspace& a, const StructureOptions& opts = {});

nlohmann::json witness_to_json(const ObstructionWitness& w);
nlohmann::json structure_report_to_json(const MatrixSubspace& s, const StructureReport& r);

}  // namespace hyperreflex
