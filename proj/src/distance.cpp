#include "hyperreflex/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hyperreflex {

void OptimizerOptions::validate() const {
  if (!(tol > 0.0)) throw InputError("optimizer tol must be positive");
  if (restarts < 1) throw InputError("optimizer restarts must be at least 1");
  if (max_iters < 1) throw InputError("optimizer max_iters must be at least 1");
  if (box_budget < 1) throw InputError("optimizer box_budget must be at least 1");
}

namespace {

ComplexMatrix residual(const ComplexMatrix& t, const MatrixSubspace& s, const ComplexVector& c) {
  return t - s.combine(c);
}

/// Smoothed max-eigenvalue model of c -> ||T - sum c_j S_j|| through the Hermitian dilation.
class SmoothedNorm {
 public:
  SmoothedNorm(const ComplexMatrix& t, const MatrixSubspace& s) : t_(t), s_(s) {}

  struct Eval {
    double value = 0.0;  // f_mu
    RealVector grad;
    RealMatrix hess;
    ComplexMatrix w12;  // top-right block of the softmax density
  };

  Eval evaluate(const RealVector& p, double mu, bool with_hessian) const {
    const Eigen::Index d = s_.dim();
    const Eigen::Index r = t_.rows(), c = t_.cols(), m = r + c;
    const ComplexMatrix res = residual(t_, s_, to_complex(p));
    ComplexMatrix h = ComplexMatrix::Zero(m, m);
    h.topRightCorner(r, c) = res;
    h.bottomLeftCorner(c, r) = res.adjoint();
    const HermitianEigen eig = hermitian_eigen(h);
    const RealVector& lam = eig.values;
    const double lmax = lam(m - 1);
    RealVector w = ((lam.array() - lmax) / mu).exp();
    const double z = w.sum();
    w /= z;
    Eval out;
    out.value = lmax + mu * std::log(z);
    const ComplexMatrix& v = eig.vectors;
    const ComplexMatrix vt = v.topRows(r), vb = v.bottomRows(c);
    const ComplexMatrix dens = v * w.cast<cplx>().asDiagonal() * v.adjoint();
    out.w12 = dens.topRightCorner(r, c);

    // Rotated derivatives G'_k = V^dagger (dH/dp_k) V for real and imaginary coefficient parts.
    std::vector<ComplexMatrix> gp(static_cast<std::size_t>(2 * d));
    const cplx iu(0.0, 1.0);
    for (Eigen::Index j = 0; j < d; ++j) {
      const ComplexMatrix x = -(vt.adjoint() * s_.basis_element(j) * vb);
      gp[static_cast<std::size_t>(j)] = x + x.adjoint();
      const ComplexMatrix xi = iu * x;
      gp[static_cast<std::size_t>(d + j)] = xi + xi.adjoint();
    }
    out.grad = RealVector(2 * d);
    for (Eigen::Index k = 0; k < 2 * d; ++k)
      out.grad(k) = (w.array() * gp[static_cast<std::size_t>(k)].diagonal().real().array()).sum();
    if (!with_hessian) return out;

    RealMatrix gamma(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) {
        const double dl = lam(a) - lam(b);
        if (std::abs(dl) > 1e-9 * mu) {
          gamma(a, b) = (w(a) - w(b)) / dl;
        } else {
          gamma(a, b) = 0.5 * (w(a) + w(b)) / mu;
        }
      }
    out.hess = RealMatrix(2 * d, 2 * d);
    for (Eigen::Index k = 0; k < 2 * d; ++k)
      for (Eigen::Index l = k; l < 2 * d; ++l) {
        const auto& a = gp[static_cast<std::size_t>(k)];
        const auto& b = gp[static_cast<std::size_t>(l)];
        const double val = (gamma.array() * (a.array() * b.array().conjugate()).real()).sum() -
                           out.grad(k) * out.grad(l) / mu;
        out.hess(k, l) = out.hess(l, k) = val;
      }
    return out;
  }

  ComplexVector to_complex(const RealVector& p) const {
    const Eigen::Index d = s_.dim();
    ComplexVector c(d);
    for (Eigen::Index j = 0; j < d; ++j) c(j) = cplx(p(j), p(d + j));
    return c;
  }
  static RealVector to_real(const ComplexVector& c) {
    const Eigen::Index d = c.size();
    RealVector p(2 * d);
    p.head(d) = c.real();
    p.tail(d) = c.imag();
    return p;
  }

 private:
  const ComplexMatrix& t_;
  const MatrixSubspace& s_;
};

/// Subgradient descent with averaged degenerate top pairs and diminishing steps.
ComplexVector subgradient_phase(const ComplexMatrix& t, const MatrixSubspace& s, ComplexVector c, int iters,
                                double scale) {
  ComplexVector best = c;
  double best_val = operator_norm(residual(t, s, c));
  const Eigen::Index d = s.dim();
  for (int k = 0; k < iters; ++k) {
    const SvdResult sv = svd(residual(t, s, c));
    const double top = sv.values(0);
    ComplexVector g = ComplexVector::Zero(d);
    int count = 0;
    for (Eigen::Index i = 0; i < sv.values.size() && sv.values(i) >= top - 1e-7 * scale; ++i, ++count) {
      const ComplexVector u = sv.left.col(i), v = sv.right.col(i);
      for (Eigen::Index j = 0; j < d; ++j) g(j) += std::conj(u.dot(s.basis_element(j) * v));
    }
    g /= static_cast<double>(count);
    const double gn = g.norm();
    if (gn < 1e-14) break;
    c += (0.2 * scale / std::sqrt(k + 1.0)) * g / gn;
    const double val = operator_norm(residual(t, s, c));
    if (val < best_val) {
      best_val = val;
      best = c;
    }
  }
  return best;
}

/// Frank-Wolfe on the spectraplex of the top singular window: minimizes sum_j |tr(Y B_j)|^2,
/// B_j = U^dagger S_j V, and returns phi = U Y V^dagger.
ComplexMatrix window_certificate(const ComplexMatrix& res, const MatrixSubspace& s, double window) {
  const SvdResult sv = svd(res);
  const double top = sv.values(0);
  Eigen::Index k = 1;
  while (k < sv.values.size() && sv.values(k) >= top - window) ++k;
  const ComplexMatrix u = sv.left.leftCols(k), v = sv.right.leftCols(k);
  const Eigen::Index d = s.dim();
  std::vector<ComplexMatrix> bs;
  for (Eigen::Index j = 0; j < d; ++j) bs.push_back(u.adjoint() * s.basis_element(j) * v);
  auto values = [&](const ComplexMatrix& y) {
    ComplexVector z(d);
    for (Eigen::Index j = 0; j < d; ++j) z(j) = (y * bs[static_cast<std::size_t>(j)]).trace();
    return z;
  };
  ComplexMatrix y = ComplexMatrix::Zero(k, k);
  y(0, 0) = 1.0;
  ComplexVector z = values(y);
  for (int it = 0; it < 50 && z.squaredNorm() > 1e-30; ++it) {
    ComplexMatrix g = ComplexMatrix::Zero(k, k);
    for (Eigen::Index j = 0; j < d; ++j)
      g += std::conj(z(j)) * bs[static_cast<std::size_t>(j)] + z(j) * bs[static_cast<std::size_t>(j)].adjoint();
    const HermitianEigen eg = hermitian_eigen(g);
    const ComplexVector e = eg.vectors.col(0);
    const ComplexMatrix vertex = e * e.adjoint();
    const ComplexVector zv = values(vertex);
    const ComplexVector delta = zv - z;
    const double dd = delta.squaredNorm();
    if (dd < 1e-30) break;
    const double gam = std::clamp(-(z.dot(delta)).real() / dd, 0.0, 1.0);
    if (gam <= 0.0) break;
    y = (1.0 - gam) * y + gam * vertex;
    z = values(y);
  }
  return u * y * v.adjoint();
}

/// Continuation in mu; stops after a stage whose smoothed density certifies a gap <= gap_target.
ComplexVector newton_polish(const ComplexMatrix& t, const MatrixSubspace& s, const ComplexVector& c0, double scale,
                            double gap_target) {
  const SmoothedNorm model(t, s);
  RealVector p = SmoothedNorm::to_real(c0);
  for (double mu = 1e-2 * scale; mu >= 0.99e-9 * scale; mu *= 0.2) {
    if (mu < 1e-2 * scale) {
      const auto ev = model.evaluate(p, mu, false);
      const ComplexMatrix res = residual(t, s, model.to_complex(p));
      const double upper = operator_norm(res);
      double lower = dual_value(t, s, 2.0 * ev.w12);
      for (double win : {mu, 10 * mu, 100 * mu}) lower = std::max(lower, dual_value(t, s, window_certificate(res, s, win)));
      if (upper - lower <= gap_target) break;
    }
    for (int it = 0; it < 60; ++it) {
      const auto ev = model.evaluate(p, mu, true);
      const Eigen::Index n = p.size();
      const double ridge = 1e-12 * std::max(1.0, ev.hess.diagonal().cwiseAbs().maxCoeff());
      const RealMatrix hr = ev.hess + ridge * RealMatrix::Identity(n, n);
      RealVector step = hr.ldlt().solve(-ev.grad);
      if (!step.allFinite() || step.dot(ev.grad) >= 0) step = -ev.grad;
      const double decrement = -step.dot(ev.grad);
      // Below this the decrease is lost in rounding of the value itself.
      if (decrement < std::max(1e-14 * mu, 1e-15 * scale)) break;
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        const RealVector trial = p + alpha * step;
        if (model.evaluate(trial, mu, false).value <= ev.value - 0.25 * alpha * decrement) {
          p = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
  }
  return model.to_complex(p);
}

}  // namespace

double dual_value(const ComplexMatrix& t, const MatrixSubspace& s, const ComplexMatrix& phi, ComplexMatrix* projected) {
  ComplexMatrix p = phi;
  if (!s.is_zero()) p -= project_hs(s, phi);
  if (projected) *projected = p;
  const double tn = trace_norm(p);
  if (tn <= 1e-300) return 0.0;
  return hs_inner(p, t).real() / tn;
}

CertifiedValue distance(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts) {
  require_shape(s, t, "distance");
  opts.validate();
  CertifiedValue out;
  out.method = "smoothed-newton";
  const double scale = operator_norm(t);
  const Eigen::Index d = s.dim();
  if (scale == 0.0 || s.is_full()) {
    out.primal = s.coefficients(t);
    out.upper = operator_norm(t - project_hs(s, t));
    out.estimate = out.upper;
    out.lower = 0.0;
    out.dual = Functional(ComplexMatrix::Zero(t.rows(), t.cols()));
    out.converged = out.upper <= opts.tol;
    return out;
  }
  auto finish_with = [&](const ComplexVector& c) {
    const ComplexMatrix res = residual(t, s, c);
    const SvdResult sv = svd(res);
    out.primal = c;
    out.upper = sv.values(0);
    // Candidate functionals, each projected onto the annihilator.
    std::vector<ComplexMatrix> cands;
    cands.push_back(sv.left.col(0) * sv.right.col(0).adjoint());
    if (d > 0) {
      const SmoothedNorm model(t, s);
      const RealVector p = SmoothedNorm::to_real(c);
      for (double mu : {1e-9, 1e-8, 1e-7, 1e-6}) cands.push_back(2.0 * model.evaluate(p, mu * scale, false).w12);
      for (double win : {1e-8, 1e-6, 1e-4, 1e-3}) cands.push_back(window_certificate(res, s, win * scale));
    }
    double best = -std::numeric_limits<double>::infinity();
    ComplexMatrix best_phi;
    for (const auto& phi : cands) {
      ComplexMatrix proj;
      const double val = dual_value(t, s, phi, &proj);
      if (val > best) {
        best = val;
        const double tn = trace_norm(proj);
        best_phi = tn > 0 ? ComplexMatrix(proj / tn) : proj;
      }
    }
    out.lower = std::max(0.0, best);
    out.dual = Functional(best_phi);
    out.estimate = out.upper;
    out.converged = out.gap() <= opts.tol;
  };

  if (s.is_zero()) {
    finish_with(ComplexVector(0));
    return out;
  }
  const ComplexVector c0 = s.coefficients(t);
  if (operator_norm(residual(t, s, c0)) <= 1e-13 * scale) {
    out.primal = c0;
    out.upper = out.estimate = operator_norm(residual(t, s, c0));
    out.lower = 0.0;
    out.dual = Functional(ComplexMatrix::Zero(t.rows(), t.cols()));
    out.converged = out.upper <= opts.tol;
    return out;
  }
  Rng rng(opts.seed);
  ComplexVector best = c0;
  double best_val = operator_norm(residual(t, s, c0));
  const int starts = std::min(opts.restarts, 3);
  for (int r = 0; r < starts; ++r) {
    ComplexVector start = c0;
    if (r > 0) start += 0.3 * scale * random_vector(d, rng) / std::sqrt(2.0 * static_cast<double>(d));
    const ComplexVector c = subgradient_phase(t, s, start, std::min(opts.max_iters, 60), scale);
    const double val = operator_norm(residual(t, s, c));
    if (val < best_val) {
      best_val = val;
      best = c;
    }
  }
  const ComplexVector polished = newton_polish(t, s, best, scale, 1e-2 * opts.tol);
  if (operator_norm(residual(t, s, polished)) < best_val) best = polished;
  finish_with(best);
  return out;
}

}  // namespace hyperreflex
