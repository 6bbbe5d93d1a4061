#include "hyperreflex/expectations.hpp"

#include "hyperreflex/catalog.hpp"
#include "hyperreflex/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hyperreflex {

namespace {

void check_blocks(const std::vector<std::vector<int>>& blocks, int dim, const char* side) {
  std::vector<bool> used(static_cast<std::size_t>(std::max(dim, 0)), false);
  for (const auto& b : blocks) {
    if (b.empty()) throw InputError(std::string("PartitionPair: empty ") + side + " block");
    for (int i : b) {
      if (i < 0 || i >= dim) throw InputError(std::string("PartitionPair: ") + side + " index out of range");
      if (used[static_cast<std::size_t>(i)])
        throw InputError(std::string("PartitionPair: overlapping ") + side + " blocks");
      used[static_cast<std::size_t>(i)] = true;
    }
  }
}

bool covers(const std::vector<std::vector<int>>& blocks, int dim) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.size();
  return n == static_cast<std::size_t>(dim);
}

ComplexMatrix coordinate_projection(const std::vector<std::vector<int>>& blocks, int dim,
                                    const std::vector<bool>& subset) {
  if (subset.size() != blocks.size()) throw InputError("PartitionPair: subset size mismatch");
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (subset[b])
      for (int i : blocks[b]) p(i, i) = 1.0;
  return p;
}

std::vector<std::vector<bool>> block_support(const PartitionPair& pp) {
  std::vector<std::vector<bool>> sup(static_cast<std::size_t>(pp.d_out),
                                     std::vector<bool>(static_cast<std::size_t>(pp.d_in), false));
  for (std::size_t b = 0; b < pp.size(); ++b)
    for (int r : pp.codomain_blocks[b])
      for (int c : pp.domain_blocks[b]) sup[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = true;
  return sup;
}

double scaled_tol(double tol, const ComplexMatrix& t) { return std::max(tol, 1e-6) * 10 * std::max(1.0, operator_norm(t)); }

/// The 2^|I| sign flips (E(X) - E(X^c)) x, capped at 64 subsets.
std::vector<ComplexVector> sign_flips(const ComplexVector& x, const PartitionPair& pp) {
  std::vector<ComplexVector> out;
  const std::size_t m = std::min<std::size_t>(pp.size(), 6);
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    ComplexVector y = x;
    for (std::size_t b = 0; b < m; ++b)
      if (!(mask & (1u << b)))
        for (int i : pp.domain_blocks[b]) y(i) = -y(i);
    out.push_back(y);
  }
  return out;
}

CertifiedValue seeded_beta(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts,
                           const CertifiedValue& other, const PartitionPair& pp) {
  BetaHints hints;
  for (const auto& w : other.witness)
    for (auto& v : sign_flips(w, pp)) hints.seeds.push_back(std::move(v));
  return beta(t, s, opts, hints);
}

}  // namespace

void PartitionPair::validate() const {
  if (d_in < 1 || d_out < 1) throw InputError("PartitionPair: dimensions must be positive");
  if (domain_blocks.size() != codomain_blocks.size())
    throw InputError("PartitionPair: domain and codomain block counts differ");
  if (domain_blocks.empty()) throw InputError("PartitionPair: no blocks");
  check_blocks(domain_blocks, d_in, "domain");
  check_blocks(codomain_blocks, d_out, "codomain");
}

bool PartitionPair::covering() const { return covers(domain_blocks, d_in) && covers(codomain_blocks, d_out); }

MatrixSubspace PartitionPair::diagonal_space() const {
  validate();
  return pattern_space(block_support(*this));
}

ComplexMatrix PartitionPair::domain_projection(const std::vector<bool>& subset) const {
  return coordinate_projection(domain_blocks, d_in, subset);
}

ComplexMatrix PartitionPair::codomain_projection(const std::vector<bool>& subset) const {
  return coordinate_projection(codomain_blocks, d_out, subset);
}

PartitionPair singleton_pair(int d_out, int d_in) {
  PartitionPair pp;
  pp.d_out = d_out;
  pp.d_in = d_in;
  for (int i = 0; i < std::min(d_out, d_in); ++i) {
    pp.domain_blocks.push_back({i});
    pp.codomain_blocks.push_back({i});
  }
  pp.validate();
  return pp;
}

PartitionPair block_pair(int m, int k) {
  if (m < 1 || k < 1) throw InputError("block_pair: m and k must be positive");
  PartitionPair pp;
  pp.d_out = pp.d_in = m * k;
  for (int b = 0; b < m; ++b) {
    std::vector<int> idx;
    for (int p = 0; p < k; ++p) idx.push_back(b * k + p);
    pp.domain_blocks.push_back(idx);
    pp.codomain_blocks.push_back(idx);
  }
  return pp;
}

ComplexMatrix sign_expectation(const ComplexMatrix& t, const PartitionPair& pp) {
  pp.validate();
  if (t.rows() != pp.d_out || t.cols() != pp.d_in) throw InputError("sign_expectation: shape mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(t.rows(), t.cols());
  for (std::size_t b = 0; b < pp.size(); ++b)
    for (int r : pp.codomain_blocks[b])
      for (int c : pp.domain_blocks[b]) out(r, c) = t(r, c);
  return out;
}

std::vector<ComplexMatrix> sign_flip_group(int n) {
  if (n < 1 || n > 4) throw InputError("sign_flip_group: n must be in [1, 4]");
  std::vector<ComplexMatrix> base;
  for (int a : {1, -1})
    for (int b : {1, -1}) {
      ComplexMatrix d = ComplexMatrix::Zero(2, 2);
      d(0, 0) = a;
      d(1, 1) = b;
      base.push_back(d);
      ComplexMatrix f = ComplexMatrix::Zero(2, 2);
      f(0, 1) = a;
      f(1, 0) = b;
      base.push_back(f);
    }
  std::vector<ComplexMatrix> group = base;
  for (int level = 1; level < n; ++level) {
    std::vector<ComplexMatrix> next;
    next.reserve(group.size() * base.size());
    for (const auto& g : group)
      for (const auto& h : base) next.push_back(kron(g, h));
    group = std::move(next);
  }
  return group;
}

ComplexMatrix group_expectation(const ComplexMatrix& t, int n, int k) {
  if (n < 1 || k < 1) throw InputError("group_expectation: n and k must be positive");
  const Eigen::Index m = Eigen::Index(1) << n;
  if (t.rows() != m * k || t.cols() != m * k) throw InputError("group_expectation: T must be 2^n k square");
  ComplexMatrix mean = ComplexMatrix::Zero(k, k);
  for (Eigen::Index b = 0; b < m; ++b) mean += t.block(b * k, b * k, k, k);
  mean /= static_cast<double>(m);
  return kron(ComplexMatrix::Identity(m, m), mean);
}

std::vector<ComplexMatrix> group_lattice_projections(int n, int k) {
  if (k < 1) throw InputError("group_lattice_projections: k must be positive");
  std::vector<ComplexMatrix> out;
  for (const auto& g : sign_flip_group(n)) {
    const Eigen::Index m = g.rows();
    // G^2 = +-I; in the second case H = -iG is a Hermitian unitary.
    const bool square_minus = ((g * g) + ComplexMatrix::Identity(m, m)).norm() < 1e-12;
    const ComplexMatrix h = square_minus ? ComplexMatrix(cplx(0, -1) * g) : g;
    const ComplexMatrix p = 0.5 * (h + ComplexMatrix::Identity(m, m));
    const double tr = p.trace().real();
    if (tr < 0.5 || tr > static_cast<double>(m) - 0.5) continue;
    const bool seen = std::any_of(out.begin(), out.end(), [&](const ComplexMatrix& q) {
      return (q.topLeftCorner(m, m) - p).norm() < 1e-12;
    });
    if (!seen) out.push_back(p);
  }
  for (auto& p : out) p = kron(p, ComplexMatrix::Identity(k, k));
  return out;
}

BoundReport averaging_bound_check(const ComplexMatrix& t, const PartitionPair& pp, bool economy, double tol) {
  pp.validate();
  if (economy && !pp.covering()) throw InputError("averaging_bound_check: the economy factor needs covering blocks");
  BoundReport rep;
  const double blocks = static_cast<double>(pp.size());
  rep.factor = economy ? 2.0 * (1.0 - std::pow(2.0, 1.0 - blocks)) : 2.0;
  rep.lhs = operator_norm(t - sign_expectation(t, pp));
  rep.rhs = rep.factor * pattern_beta(t, block_support(pp)).estimate;
  rep.pass = rep.lhs <= rep.rhs + tol * std::max(1.0, operator_norm(t));
  return rep;
}

BoundReport scalartensor_bound_check(const ComplexMatrix& t, int n, int k, const OptimizerOptions& opts) {
  const Eigen::Index m = Eigen::Index(1) << n;
  if (t.rows() != m * k || t.cols() != m * k) throw InputError("scalartensor_bound_check: T must be 2^n k square");
  BoundReport rep;
  rep.factor = n == 1 ? 1.5 : 2.0;
  rep.lhs = distance(t, tensor_with_full(scalars(static_cast<int>(m)), k), opts).upper;
  double worst = 0.0;
  for (const auto& p : group_lattice_projections(n, k)) {
    const ComplexMatrix perp = ComplexMatrix::Identity(p.rows(), p.cols()) - p;
    worst = std::max(worst, operator_norm(perp * t * p));
  }
  rep.rhs = rep.factor * worst;
  rep.pass = rep.lhs <= rep.rhs + scaled_tol(opts.tol, t);
  return rep;
}

ContractionReport expectation_beta_contraction_check(const ComplexMatrix& t, const MatrixSubspace& s,
                                                     const PartitionPair& pp, const OptimizerOptions& opts) {
  require_shape(s, t, "expectation_beta_contraction_check");
  if (!subspace_contains(pp.diagonal_space(), s))
    throw InputError("expectation_beta_contraction_check: S is not inside the block space");
  ContractionReport rep;
  const CertifiedValue bphi = beta(sign_expectation(t, pp), s, opts);
  rep.beta_phi = bphi.estimate;
  rep.beta_t = seeded_beta(t, s, opts, bphi, pp).estimate;
  rep.pass = rep.beta_phi <= rep.beta_t + scaled_tol(opts.tol, t);
  return rep;
}

void DiagonalTensorModel::validate() const {
  if (taus.empty()) throw InputError("DiagonalTensorModel: taus must be nonempty");
  if (k < 1) throw InputError("DiagonalTensorModel: k must be positive");
  for (double v : taus)
    if (!std::isfinite(v) || v < 0.0) throw InputError("DiagonalTensorModel: taus must be finite and nonnegative");
  if (*std::max_element(taus.begin(), taus.end()) <= 0.0) throw InputError("DiagonalTensorModel: T is zero");
}

MatrixSubspace DiagonalTensorModel::space() const {
  validate();
  ComplexMatrix d = ComplexMatrix::Zero(static_cast<Eigen::Index>(taus.size()), static_cast<Eigen::Index>(taus.size()));
  for (std::size_t i = 0; i < taus.size(); ++i) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = taus[i];
  return tensor_with_full(one_dimensional(d), k);
}

PartitionPair DiagonalTensorModel::blocks() const {
  validate();
  return block_pair(static_cast<int>(taus.size()), k);
}

bool DiagonalTensorModel::rank_two_form() const {
  return taus.size() == 3 && taus[0] == 1.0 && taus[1] > 0.0 && taus[1] <= 1.0 && taus[2] == 0.0;
}

ChainReport four_bound_chain(const ComplexMatrix& x, const DiagonalTensorModel& model, bool rank_two,
                             const OptimizerOptions& opts) {
  if (rank_two && !model.rank_two_form()) throw InputError("four_bound_chain: rank-two mode needs taus = (1, s, 0)");
  const MatrixSubspace s = model.space();
  const PartitionPair pp = model.blocks();
  require_shape(s, x, "four_bound_chain");
  const double tol = scaled_tol(opts.tol, x);

  ChainReport rep;
  rep.link1_factor = rank_two ? 1.5 : 2.0;
  rep.link2_factor = rank_two ? 1.0 : 2.0;
  rep.chain_factor = rep.link1_factor + rep.link2_factor;

  const ComplexMatrix phi = sign_expectation(x, pp);
  rep.expectation_gap = operator_norm(x - phi);
  rep.beta_d = pattern_beta(x, block_support(pp)).estimate;
  const CertifiedValue bphi = beta(phi, s, opts);
  rep.beta_s_phi = bphi.estimate;
  rep.dist_phi = distance(phi, s, opts).estimate;
  rep.beta_s = std::max(seeded_beta(x, s, opts, bphi, pp).estimate, rep.beta_d);
  rep.dist = distance(x, s, opts).estimate;

  rep.link1 = rep.expectation_gap <= rep.link1_factor * rep.beta_d + tol;
  rep.link2 = rep.dist_phi <= rep.link2_factor * rep.beta_s_phi + tol;
  rep.link3 = rep.beta_s_phi <= rep.beta_s + tol;
  rep.chain = rep.dist <= rep.chain_factor * rep.beta_s + tol;
  rep.pass = rep.link1 && rep.link2 && rep.link3 && rep.chain;
  return rep;
}

}  // namespace hyperreflex
