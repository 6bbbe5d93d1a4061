#include "hyperreflex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperreflex {

namespace {

double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

ComplexMatrix normalize_operator(const ComplexMatrix& t) {
  const double n = operator_norm(t);
  return n > 0.0 ? ComplexMatrix(t / n) : t;
}

/// Cheap inner options for the search; exact pattern formulas stay on when they apply.
OptimizerOptions search_options(const OptimizerOptions& inner, bool pattern) {
  OptimizerOptions o = inner;
  o.restarts = std::max(3, inner.restarts / 8);
  o.max_iters = std::max(120, inner.max_iters / 2);
  o.certified_upper_mode = pattern ? UpperMode::automatic : UpperMode::off;
  return o;
}

struct Probe {
  ComplexMatrix t;
  double ratio = 0.0;
  CertifiedValue dist, beta;
};

Probe probe(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& o, const BetaHints& hints) {
  Probe p;
  p.t = t;
  p.dist = distance(t, s, o);
  p.beta = beta(t, s, o, hints);
  p.ratio = safe_ratio(p.dist.estimate, p.beta.estimate);
  return p;
}

/// Ascent direction of dist/beta in the annihilator, from the two dual certificates.
std::optional<ComplexMatrix> ratio_gradient(const Probe& p, const MatrixSubspace& s) {
  if (!p.dist.dual || !p.beta.dual || p.beta.estimate <= 0.0) return std::nullopt;
  const double b = p.beta.estimate;
  ComplexMatrix g = p.dist.dual->matrix() / b - (p.dist.estimate / (b * b)) * p.beta.dual->matrix();
  g -= project_hs(s, g);
  const double n = g.norm();
  if (n <= 1e-14) return std::nullopt;
  return ComplexMatrix(g / n);
}

Probe ascend(Probe cur, const MatrixSubspace& s, const OptimizerOptions& o, int steps, const BetaHints& hints) {
  double eta = 0.3;
  for (int it = 0; it < steps && eta > 1e-4; ++it) {
    const auto g = ratio_gradient(cur, s);
    if (!g) break;
    ComplexMatrix trial = cur.t + eta * *g;
    trial -= project_hs(s, trial);
    const Probe nxt = probe(normalize_operator(trial), s, o, hints);
    if (nxt.ratio > cur.ratio + 1e-9) {
      cur = nxt;
      eta = std::min(1.0, eta * 1.5);
    } else {
      eta *= 0.4;
    }
  }
  return cur;
}

}  // namespace

RatioEvaluation evaluate_ratio(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts,
                               const BetaHints& hints) {
  RatioEvaluation r;
  r.dist = distance(t, s, opts);
  r.beta = beta(t, s, opts, hints);
  r.estimate = safe_ratio(r.dist.estimate, r.beta.estimate);
  r.certified = std::isfinite(r.beta.upper) ? std::max(1.0, safe_ratio(r.dist.lower, r.beta.upper)) : 1.0;
  return r;
}

KappaResult kappa_lower(const MatrixSubspace& s, const KappaOptions& opts) {
  opts.inner.validate();
  KappaResult res;
  res.value.lower = res.value.estimate = 1.0;
  res.value.method = "ratio-ascent";
  if (s.is_full()) {
    res.degenerate = true;
    res.value.note = "full space";
    res.value.converged = true;
    return res;
  }
  const MatrixSubspace ann = annihilator(s);
  const bool pattern = is_pattern_space(s);
  const OptimizerOptions so = search_options(opts.inner, pattern);
  Rng rng(opts.inner.seed ^ 0xd1b54a32d192ed03ULL);

  std::vector<ComplexMatrix> starts;
  for (const auto& sd : opts.seeds) {
    require_shape(s, sd, "kappa_lower seed");
    ComplexMatrix t = sd - project_hs(s, sd);
    if (operator_norm(t) > 1e-12) starts.push_back(normalize_operator(t));
  }
  for (int r = 0; r < opts.restarts; ++r) {
    ComplexVector c = random_vector(ann.dim(), rng);
    starts.push_back(normalize_operator(ann.combine(c)));
  }

  std::vector<Probe> finals;
  for (const auto& t0 : starts) {
    // Pieces are built per operator and used only in certification.
    const BetaHints hints;
    finals.push_back(ascend(probe(t0, s, so, hints), s, so, opts.ascent_steps, hints));
  }
  std::sort(finals.begin(), finals.end(), [](const Probe& a, const Probe& b) { return a.ratio > b.ratio; });

  // Certify the seeds and the best few ascent results with the full inner options.
  std::vector<ComplexMatrix> to_certify;
  const std::size_t n_seeds = std::min(opts.seeds.size(), starts.size());
  for (std::size_t i = 0; i < n_seeds; ++i) to_certify.push_back(starts[i]);
  for (std::size_t i = 0; i < std::min<std::size_t>(3, finals.size()); ++i) to_certify.push_back(finals[i].t);

  double best_estimate = 0.0;
  if (!finals.empty()) {
    best_estimate = finals.front().ratio;
    res.estimate_witness = finals.front().t;
  }
  double best_cert = 1.0;
  bool have_witness = false;
  for (const auto& t : to_certify) {
    BetaHints hints;
    if (opts.pieces) hints.pieces = (*opts.pieces)(t);
    const RatioEvaluation ev = evaluate_ratio(t, s, opts.inner, hints);
    if (ev.estimate > best_estimate) {
      best_estimate = ev.estimate;
      res.estimate_witness = t;
    }
    if (!have_witness || ev.certified > best_cert) {
      best_cert = ev.certified;
      res.witness = t;
      res.witness_distance = ev.dist;
      res.witness_beta = ev.beta;
      have_witness = true;
    }
  }
  res.value.lower = std::max(1.0, best_cert);
  res.value.estimate = std::max(res.value.lower, best_estimate);
  res.value.heuristic = best_cert <= 1.0;
  res.value.witness_operator = res.witness;
  res.unbounded_suspected = res.value.estimate > opts.unbounded_threshold;
  if (res.unbounded_suspected) res.value.note = "ratio above threshold; possibly not hyperreflexive";
  return res;
}

std::vector<KappaResult> kappa_complete_probe(const MatrixSubspace& s, int n_max, const KappaOptions& opts,
                                              long dimension_cap) {
  if (n_max < 1) throw InputError("kappa_complete_probe: n_max must be >= 1");
  const long top = static_cast<long>(s.ambient_dim()) * n_max * n_max;
  if (top > dimension_cap)
    throw InputError("kappa_complete_probe: ambient dimension " + std::to_string(top) + " exceeds cap " +
                     std::to_string(dimension_cap));
  std::vector<KappaResult> out;
  std::optional<ComplexMatrix> prev;
  for (int n = 1; n <= n_max; ++n) {
    const MatrixSubspace sn = tensor_with_full(s, n);
    KappaOptions o = opts;
    o.pieces.reset();
    if (n == 1) o.pieces = opts.pieces;
    if (n >= 2) {
      o.restarts = opts.lifted_restarts;
      o.ascent_steps = opts.lifted_ascent_steps;
    }
    if (prev) {
      // Embed C^{n-1} into C^n on the inner factor: T -> (I (x) J) T (I (x) J^dagger).
      ComplexMatrix jo = ComplexMatrix::Zero(n, n - 1);
      jo.topRows(n - 1).setIdentity();
      const ComplexMatrix left = kron(ComplexMatrix::Identity(s.d_out(), s.d_out()), jo);
      const ComplexMatrix right = kron(ComplexMatrix::Identity(s.d_in(), s.d_in()), jo).adjoint();
      o.seeds = {left * *prev * right};
      if (out.back().witness.size() > 0 && out.back().witness != *prev)
        o.seeds.push_back(left * out.back().witness * right);
    }
    KappaResult r = kappa_lower(sn, o);
    if (!out.empty()) {
      // The embedded witness keeps its ratio, so the estimate cannot truly decrease.
      const double prev_est = out.back().value.estimate;
      if (r.value.estimate < prev_est - 2 * opts.inner.tol)
        r.value.note += (r.value.note.empty() ? "" : "; ") + std::string("estimate decreased beyond tolerance");
    }
    prev = r.estimate_witness;
    out.push_back(std::move(r));
  }
  return out;
}

ExtremalWitness extremal_witness(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts) {
  require_shape(s, t, "extremal_witness");
  ExtremalWitness w;
  w.operator_norm = operator_norm(t);
  const CertifiedValue d = distance(t, s, opts);
  if (std::abs(d.estimate - w.operator_norm) > std::max(opts.tol, 1e-6) * std::max(1.0, w.operator_norm))
    throw InputError("extremal_witness: dist(T,S) differs from ||T||");
  // Independent restarts of the beta search; the sequence records the improving iterates.
  double best = -1.0;
  for (int r = 0; r < std::max(1, opts.restarts / 8); ++r) {
    OptimizerOptions o = opts;
    o.seed = opts.seed + static_cast<std::uint64_t>(r);
    o.restarts = 8;
    o.certified_upper_mode = UpperMode::off;
    const CertifiedValue b = beta(t, s, o);
    if (b.witness.empty() || b.lower <= best) continue;
    best = b.lower;
    const ComplexVector x = b.witness.front().normalized();
    const ComplexVector tx = t * x;
    const ComplexMatrix q = action(s, x);
    w.sequence.push_back(x);
    w.image_norms.push_back(tx.norm());
    w.range_residuals.push_back((q * (q.adjoint() * tx)).norm());
  }
  if (!w.sequence.empty())
    w.found = w.image_norms.back() >= w.operator_norm - opts.tol && w.range_residuals.back() <= opts.tol;
  return w;
}

ScaledKappaReport scaled_kappa_relation(const MatrixSubspace& s, const ComplexMatrix& x, const KappaOptions& opts) {
  if (x.rows() != x.cols() || x.rows() != s.d_in()) throw InputError("scaled_kappa_relation: X must be d_in x d_in");
  const RealVector sv = singular_values(x);
  if (sv(sv.size() - 1) <= kRankTol * sv(0)) throw InputError("scaled_kappa_relation: X is singular");
  ScaledKappaReport rep;
  rep.condition = sv(0) / sv(sv.size() - 1);
  const ComplexMatrix xinv = x.inverse();
  const MatrixSubspace sx = right_multiply(s, x);
  rep.original = kappa_lower(s, opts);
  rep.scaled = kappa_lower(sx, opts);
  const double tol = std::max(opts.inner.tol, 1e-6) * 10;
  // ratio(T; SX) <= cond * ratio(T X^{-1}; S) pointwise; certified on the left, estimate on the right.
  const RatioEvaluation back = evaluate_ratio(rep.scaled.witness * xinv, s, opts.inner);
  rep.scaled_within = rep.scaled.value.lower <= rep.condition * back.estimate + tol;
  const RatioEvaluation fwd = evaluate_ratio(rep.original.witness * x, sx, opts.inner);
  rep.original_within = rep.original.value.lower <= rep.condition * fwd.estimate + tol;
  rep.pass = rep.scaled_within && rep.original_within;
  return rep;
}

}  // namespace hyperreflex
