#include "hyperreflex/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hyperreflex {

void StructureOptions::validate() const {
  if (batch_size < 0) throw InputError("structure batch_size must be >= 0");
  if (stability_window < 1) throw InputError("structure stability_window must be >= 1");
  if (max_batches < 1) throw InputError("structure max_batches must be >= 1");
  if (samples < 0) throw InputError("structure samples must be >= 0");
  if (!(tol > 0.0)) throw InputError("structure tol must be positive");
  if (!(margin > 0.0)) throw InputError("structure margin must be positive");
  inner.validate();
}

namespace {

/// Orthonormal columns spanning the annihilating constraints found so far, kept off S.
class ConstraintSet {
 public:
  explicit ConstraintSet(const MatrixSubspace& s) : s_(s), basis_(s.ambient_dim(), 0) {}

  bool add(const ComplexMatrix& phi) {
    ComplexVector v = vec(phi);
    const double scale = v.norm();
    if (scale == 0.0) return false;
    if (s_.dim() > 0) v -= s_.vec_basis() * (s_.vec_basis().adjoint() * v);
    for (int pass = 0; pass < 2; ++pass)
      if (basis_.cols() > 0) v -= basis_ * (basis_.adjoint() * v);
    if (v.norm() <= 1e-9 * scale) return false;
    basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
    basis_.col(basis_.cols() - 1) = v / v.norm();
    return true;
  }

  /// All y x^* with y orthogonal to S x.
  int add_point(const ComplexVector& x) {
    const ComplexMatrix a = action(s_, x);
    const ComplexMatrix ys = orthogonal_complement(a, s_.d_out());
    int added = 0;
    for (Eigen::Index j = 0; j < ys.cols(); ++j) added += add(ys.col(j) * x.adjoint()) ? 1 : 0;
    return added;
  }

  Eigen::Index size() const { return basis_.cols(); }
  MatrixSubspace solution_space() const {
    return MatrixSubspace::from_vec_columns(orthogonal_complement(basis_, s_.ambient_dim()), s_.d_out(), s_.d_in());
  }

 private:
  const MatrixSubspace& s_;
  ComplexMatrix basis_;
};

ComplexVector random_supported(const std::vector<int>& support, Eigen::Index n, Rng& rng) {
  ComplexVector x = ComplexVector::Zero(n);
  const ComplexVector c = random_vector(static_cast<Eigen::Index>(support.size()), rng);
  for (std::size_t i = 0; i < support.size(); ++i) x(support[i]) = c(static_cast<Eigen::Index>(i));
  return x.normalized();
}

/// Unit vectors where dim Sx falls below the generic rank. Sampling misses them outside coordinate
/// subspaces, so each start alternates: x is projected off B^* u, where sigma_k(M(x)) = u^* B x with
/// M(x) = [S_1 x ... S_d x] and B = sum_i v_i S_i for the k-th singular pair (u, v).
std::vector<ComplexVector> rank_drop_points(const MatrixSubspace& s, Rng& rng) {
  std::vector<ComplexVector> out;
  const Eigen::Index n = s.d_in();
  if (s.dim() == 0 || n < 2) return out;
  int generic = 0;
  for (int i = 0; i < 3; ++i) generic = std::max(generic, numerical_rank(action_matrix(s, random_unit_vector(n, rng)), 1e-9));
  const int starts = static_cast<int>(2 * n + 4);
  for (int k = generic; k >= 1; --k) {
    std::vector<ComplexMatrix> found;
    for (int st = 0; st < starts; ++st) {
      ComplexVector x = random_unit_vector(n, rng);
      for (int it = 0; it < 400; ++it) {
        const ComplexMatrix m = action_matrix(s, x);
        Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv(0) <= 1e-14 || sv(k - 1) <= 1e-12 * sv(0)) {
          bool fresh = true;
          for (const auto& f : found) fresh = fresh && std::abs(std::abs(f.col(0).dot(x)) - 1.0) > 1e-6;
          if (fresh) {
            found.push_back(x);
            out.push_back(x);
          }
          break;
        }
        const ComplexVector u = svd.matrixU().col(k - 1), v = svd.matrixV().col(k - 1);
        ComplexMatrix b = ComplexMatrix::Zero(s.d_out(), n);
        for (Eigen::Index i = 0; i < s.dim(); ++i) b += v(i) * s.basis_element(i);
        const ComplexVector g = b.adjoint() * u;
        if (g.norm() <= 1e-14) break;
        const ComplexVector next = x - g * (g.dot(x) / g.squaredNorm());
        if (next.norm() <= 1e-12) break;
        x = next.normalized();
      }
    }
  }
  return out;
}

bool range_contains(const ComplexMatrix& outer, const ComplexMatrix& inner, double tol) {
  if (inner.cols() == 0) return true;
  if (outer.cols() < inner.cols()) return false;
  return (inner - outer * (outer.adjoint() * inner)).norm() <= tol;
}

/// Orthonormal basis of the intersection of two column spans.
ComplexMatrix meet(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.cols() == 0 || b.cols() == 0) return ComplexMatrix(a.rows(), 0);
  ComplexMatrix stacked(a.rows(), a.cols() + b.cols());
  stacked << a, -b;
  Eigen::JacobiSVD<ComplexMatrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  const ComplexMatrix kernel = svd.matrixV().rightCols(stacked.cols() - r);
  return orthonormal_columns(a * kernel.topRows(a.cols()));
}

}  // namespace

MatrixSubspace reflexive_closure(const MatrixSubspace& s, const StructureOptions& opts) {
  opts.validate();
  if (s.is_full()) return s;
  Rng rng(opts.seed ^ 0x5bd1e995a1b2c3d4ULL);
  ConstraintSet cons(s);
  const int batch = opts.batch_size > 0 ? opts.batch_size : 4 * static_cast<int>(s.d_in());
  int quiet = 0;
  for (int b = 0; b < opts.max_batches && quiet < opts.stability_window; ++b) {
    int added = 0;
    for (int i = 0; i < batch; ++i) added += cons.add_point(random_unit_vector(s.d_in(), rng));
    quiet = added == 0 ? quiet + 1 : 0;
  }

  // Generic x miss the rank-drop points; beta is a seminorm vanishing exactly on Ref(S), so a random
  // element of the candidate complement has beta = 0 only if the whole candidate space does.
  OptimizerOptions bo = opts.inner;
  bo.certified_upper_mode = UpperMode::off;
  const int max_rounds = 4 * static_cast<int>(s.ambient_dim()) + 8;
  for (int round = 0; round < max_rounds; ++round) {
    const MatrixSubspace cand = cons.solution_space();
    if (cand.dim() <= s.dim()) break;
    ComplexMatrix extra = ComplexMatrix::Zero(cand.ambient_dim(), cand.dim());
    for (Eigen::Index j = 0; j < cand.dim(); ++j) {
      ComplexVector v = cand.vec_basis().col(j);
      if (s.dim() > 0) v -= s.vec_basis() * (s.vec_basis().adjoint() * v);
      extra.col(j) = v;
    }
    const ComplexMatrix outside = orthonormal_columns(extra, 1e-8);
    if (outside.cols() == 0) break;
    const ComplexVector c = random_vector(outside.cols(), rng);
    const ComplexMatrix t = unvec((outside * c).normalized(), s.d_out(), s.d_in());
    bo.seed = opts.inner.seed + static_cast<std::uint64_t>(round);
    const CertifiedValue b = beta(t, s, bo);
    const double thr = std::max(1e-6, 100 * opts.tol);
    if (b.lower <= thr) break;
    int added = 0;
    for (const auto& x : b.witness) added += cons.add_point(x.normalized());
    if (b.dual) added += cons.add(b.dual->matrix()) ? 1 : 0;
    if (added == 0) break;
  }
  return cons.solution_space();
}

bool is_reflexive(const MatrixSubspace& s, const StructureOptions& opts) {
  return reflexive_closure(s, opts).dim() == s.dim();
}

std::vector<ComplexVector> range_samples(const MatrixSubspace& s, const StructureOptions& opts) {
  const int n = static_cast<int>(s.d_in());
  Rng rng(opts.seed ^ 0x2545f4914f6cdd1dULL);
  std::vector<ComplexVector> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(random_supported({i}, n, rng));
    for (int j = i + 1; j < n; ++j) out.push_back(random_supported({i, j}, n, rng));
  }
  for (int k = 3; k < n; ++k) {
    std::vector<int> pre(static_cast<std::size_t>(k)), suf(static_cast<std::size_t>(k));
    std::iota(pre.begin(), pre.end(), 0);
    std::iota(suf.begin(), suf.end(), n - k);
    out.push_back(random_supported(pre, n, rng));
    out.push_back(random_supported(suf, n, rng));
  }
  for (int i = 0; i < opts.samples; ++i) out.push_back(random_unit_vector(n, rng));
  for (auto& x : rank_drop_points(s, rng)) out.push_back(std::move(x));
  return out;
}

TotalOrderResult total_order_check(const MatrixSubspace& s, const StructureOptions& opts) {
  opts.validate();
  TotalOrderResult res;
  const auto xs = range_samples(s, opts);
  std::vector<ComplexMatrix> ranges;
  ranges.reserve(xs.size());
  for (const auto& x : xs) ranges.push_back(action(s, x));
  const double tol = std::max(1e-6, 10 * opts.tol);
  res.ranges_ordered = true;
  for (std::size_t i = 0; i < ranges.size() && res.ranges_ordered; ++i)
    for (std::size_t j = i + 1; j < ranges.size(); ++j) {
      const auto& a = ranges[i].cols() <= ranges[j].cols() ? ranges[i] : ranges[j];
      const auto& b = ranges[i].cols() <= ranges[j].cols() ? ranges[j] : ranges[i];
      if (!range_contains(b, a, tol)) {
        res.ranges_ordered = false;
        res.reason = "incomparable ranges S x";
        break;
      }
    }
  if (!res.ranges_ordered) return res;

  std::vector<std::vector<bool>> support;
  const bool pattern = is_pattern_space(s, &support);
  // Spaces spanned by matrix units are reflexive.
  res.reflexive = pattern || is_reflexive(s, opts);
  if (!res.reflexive) {
    res.reason = "not reflexive";
    return res;
  }
  res.is_nest_bimodule = true;
  if (!pattern) {
    res.reason = "nest in a non-coordinate basis";
    return res;
  }

  const int rows = static_cast<int>(s.d_out());
  const int cols = static_cast<int>(s.d_in());
  std::vector<int> height(static_cast<std::size_t>(cols), 0);
  for (int b = 0; b < cols; ++b)
    for (int a = 0; a < rows; ++a) height[static_cast<std::size_t>(b)] += support[a][b] ? 1 : 0;
  res.col_order.resize(static_cast<std::size_t>(cols));
  std::iota(res.col_order.begin(), res.col_order.end(), 0);
  std::stable_sort(res.col_order.begin(), res.col_order.end(),
                   [&](int a, int b) { return height[static_cast<std::size_t>(a)] < height[static_cast<std::size_t>(b)]; });
  std::vector<bool> placed(static_cast<std::size_t>(rows), false);
  for (int b : res.col_order)
    for (int a = 0; a < rows; ++a)
      if (support[a][b] && !placed[static_cast<std::size_t>(a)]) {
        placed[static_cast<std::size_t>(a)] = true;
        res.row_order.push_back(a);
      }
  for (int a = 0; a < rows; ++a)
    if (!placed[static_cast<std::size_t>(a)]) res.row_order.push_back(a);

  NestBimoduleSpec spec;
  spec.domain_nest = {0};
  spec.codomain_nest = {0};
  spec.order_map = {0};
  std::vector<int> heights_sorted;
  for (int b : res.col_order) heights_sorted.push_back(height[static_cast<std::size_t>(b)]);
  for (int h : heights_sorted)
    if (h > spec.codomain_nest.back()) spec.codomain_nest.push_back(h);
  if (spec.codomain_nest.back() < rows) spec.codomain_nest.push_back(rows);
  for (int b = 0; b < cols; ++b) {
    if (b + 1 < cols && heights_sorted[static_cast<std::size_t>(b + 1)] == heights_sorted[static_cast<std::size_t>(b)])
      continue;
    spec.domain_nest.push_back(b + 1);
    const auto it = std::find(spec.codomain_nest.begin(), spec.codomain_nest.end(), heights_sorted[static_cast<std::size_t>(b)]);
    spec.order_map.push_back(static_cast<int>(it - spec.codomain_nest.begin()));
  }
  // The staircase must reproduce the support in the permuted coordinates.
  const auto mask = spec.mask();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (mask[i][j] != support[res.row_order[i]][res.col_order[j]]) {
        res.reason = "pattern is ordered but not a staircase";
        res.is_nest_bimodule = false;
        return res;
      }
  res.spec = spec;
  return res;
}

bool CommutationReport::any_violation() const {
  return std::any_of(pairs.begin(), pairs.end(), [](const NoncommutingPair& p) { return p.violates_rank_two_form; });
}

NoncommutingPair pair_diagnostics(const MatrixSubspace& s, const ComplexVector& x, const ComplexVector& y, double tol) {
  NoncommutingPair p;
  p.x = x;
  p.y = y;
  const ComplexMatrix a = action(s, x);
  const ComplexMatrix b = action(s, y);
  ComplexMatrix both(a.rows(), a.cols() + b.cols());
  both << a, b;
  const ComplexMatrix join = orthonormal_columns(both, 1e-9);
  const ComplexMatrix common = meet(a, b, std::max(1e-9, tol));
  // Q = join - meet: the part of the join orthogonal to the meet.
  ComplexMatrix q_basis = join;
  if (common.cols() > 0) q_basis = join * null_space(common.adjoint() * join, 1e-9);
  p.q_rank = static_cast<int>(q_basis.cols());
  ComplexMatrix dom(x.size(), 2);
  dom << x, y;
  const ComplexMatrix dom_basis = orthonormal_columns(dom, 1e-9);
  p.compression_dim = q_basis.cols() == 0 ? 0 : static_cast<int>(compress_to_bases(s, dom_basis, q_basis).dim());
  p.violates_rank_two_form = p.q_rank != 2 || p.compression_dim != 1;
  return p;
}

CommutationReport q_commutation_report(const MatrixSubspace& s, const StructureOptions& opts) {
  opts.validate();
  CommutationReport rep;
  const auto xs = range_samples(s, opts);
  rep.samples = static_cast<int>(xs.size());
  std::vector<ComplexMatrix> proj;
  for (const auto& x : xs) {
    const ComplexMatrix a = action(s, x);
    proj.push_back(a * a.adjoint());
  }
  constexpr std::size_t kMaxPairs = 400;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if ((proj[i] * proj[j] - proj[j] * proj[i]).norm() <= 1e-6) continue;
      rep.all_commute = false;
      if (rep.pairs.size() < kMaxPairs) rep.pairs.push_back(pair_diagnostics(s, xs[i], xs[j], opts.tol));
    }
  return rep;
}

}  // namespace hyperreflex
