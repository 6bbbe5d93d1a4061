#include "hyperreflex/bounds.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>
#include <queue>

namespace hyperreflex {

namespace {

struct Cell {
  RealVector center;
  RealVector half;
  BoxBound bound;
  bool operator<(const Cell& other) const { return bound.upper < other.bound.upper; }
};

}  // namespace

BranchAndBoundResult branch_and_bound(const RealVector& lo, const RealVector& hi,
                                      const std::function<BoxBound(const RealVector&, const RealVector&)>& bound,
                                      double abs_tol, long box_budget, double budget_secs) {
  if (lo.size() != hi.size()) throw InputError("branch_and_bound: box bounds differ in length");
  const auto start = std::chrono::steady_clock::now();
  BranchAndBoundResult res;
  std::priority_queue<Cell> queue;
  Cell root{0.5 * (lo + hi), 0.5 * (hi - lo), {}};
  root.bound = bound(root.center, root.half);
  res.lower = root.bound.value;
  res.argmax = root.bound.point;
  res.boxes = 1;
  // Cells already within tolerance are dropped; their largest bound stays part of the answer.
  double pruned = -std::numeric_limits<double>::infinity();
  queue.push(root);
  while (!queue.empty()) {
    const double top = queue.top().bound.upper;
    if (top <= res.lower + abs_tol) {
      res.complete = true;
      break;
    }
    bool out_of_time = false;
    if (budget_secs > 0.0 && (res.boxes & 255) == 0) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
      out_of_time = el.count() > budget_secs;
    }
    if (res.boxes >= box_budget || out_of_time) break;
    Cell cell = queue.top();
    queue.pop();
    if (cell.half.size() == 0) continue;  // a point: its bound is exact
    Eigen::Index k = 0;
    cell.half.maxCoeff(&k);
    for (int side = -1; side <= 1; side += 2) {
      Cell child{cell.center, cell.half, {}};
      child.half(k) *= 0.5;
      child.center(k) += side * child.half(k);
      child.bound = bound(child.center, child.half);
      ++res.boxes;
      if (child.bound.value > res.lower) {
        res.lower = child.bound.value;
        res.argmax = child.bound.point;
      }
      if (child.bound.upper <= res.lower + abs_tol) {
        pruned = std::max(pruned, child.bound.upper);
        continue;
      }
      queue.push(std::move(child));
    }
  }
  res.upper = std::max({res.lower, pruned, queue.empty() ? res.lower : queue.top().bound.upper});
  if (queue.empty()) res.complete = true;
  return res;
}

BranchAndBoundResult maximize_piece(const ParametricPiece& piece, double abs_tol, long box_budget,
                                    double budget_secs) {
  const Eigen::Index dim = piece.lo.size();
  if (dim == 0) {
    BranchAndBoundResult r;
    r.lower = r.upper = piece.value_sq(RealVector(0));
    r.argmax = RealVector(0);
    r.boxes = 1;
    r.complete = true;
    return r;
  }
  const double lcurv = piece.curvature;
  auto bound = [&](const RealVector& c, const RealVector& h) {
    const double f0 = piece.value_sq(c);
    // Central differences; the error is at most L*eta/2 plus rounding.
    const double eta = 1e-6;
    double first = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      RealVector pp = c, pm = c;
      pp(k) += eta;
      pm(k) -= eta;
      const double fp = piece.value_sq(pp), fm = piece.value_sq(pm);
      const double g = (fp - fm) / (2 * eta);
      const double err = 0.5 * lcurv * eta + 4e-16 * (std::abs(fp) + std::abs(fm) + 1.0) / eta;
      first += (std::abs(g) + err) * h(k);
    }
    const double l1 = h.sum();
    return BoxBound{f0 + first + 0.5 * lcurv * l1 * l1, f0, c};
  };
  return branch_and_bound(piece.lo, piece.hi, bound, abs_tol, box_budget, budget_secs);
}

ComplexVector projective_point(const RealVector& p, Eigen::Index n) {
  ComplexVector x(n);
  if (n == 1) {
    x(0) = 1.0;
  } else if (n == 2) {
    x << std::cos(p(0)), std::sin(p(0)) * std::polar(1.0, p(1));
  } else if (n == 3) {
    const double sa = std::sin(p(0));
    x << std::cos(p(0)), sa * std::cos(p(1)) * std::polar(1.0, p(2)), sa * std::sin(p(1)) * std::polar(1.0, p(3));
  } else {
    throw InputError("projective_point: only n <= 3 is parameterized");
  }
  return x;
}

ComplexMatrix projective_partials(const RealVector& p, Eigen::Index n) {
  const cplx i(0.0, 1.0);
  if (n == 1) return ComplexMatrix(1, 0);
  if (n == 2) {
    const cplx e = std::polar(1.0, p(1));
    ComplexMatrix d(2, 2);
    d << -std::sin(p(0)), 0.0, std::cos(p(0)) * e, i * std::sin(p(0)) * e;
    return d;
  }
  if (n != 3) throw InputError("projective_partials: only n <= 3 is parameterized");
  const double sa = std::sin(p(0)), ca = std::cos(p(0)), sb = std::sin(p(1)), cb = std::cos(p(1));
  const cplx e1 = std::polar(1.0, p(2)), e2 = std::polar(1.0, p(3));
  ComplexMatrix d = ComplexMatrix::Zero(3, 4);
  d(0, 0) = -sa;
  d(1, 0) = ca * cb * e1;
  d(2, 0) = ca * sb * e2;
  d(1, 1) = -sa * sb * e1;
  d(2, 1) = sa * cb * e2;
  d(1, 2) = i * sa * cb * e1;
  d(2, 3) = i * sa * sb * e2;
  return d;
}

void projective_box(Eigen::Index n, RealVector& lo, RealVector& hi) {
  const double half_pi = std::numbers::pi / 2, two_pi = 2 * std::numbers::pi;
  if (n == 1) {
    lo = hi = RealVector(0);
  } else if (n == 2) {
    lo = RealVector::Zero(2);
    hi = RealVector(2);
    hi << half_pi, two_pi;
  } else if (n == 3) {
    lo = RealVector::Zero(4);
    hi = RealVector(4);
    hi << half_pi, half_pi, two_pi, two_pi;
  } else {
    throw InputError("projective_box: only n <= 3 is parameterized");
  }
}

double beta_objective(const ComplexMatrix& t, const MatrixSubspace& s, const ComplexVector& x,
                      double rank_tol) {
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  const ComplexVector u = x / nx;
  const ComplexVector tx = t * u;
  const ComplexMatrix q = action(s, u, rank_tol);
  return (tx - q * (q.adjoint() * tx)).norm();
}

BranchAndBoundResult grid_beta_upper(const ComplexMatrix& t, const MatrixSubspace& s, double abs_tol,
                                     long box_budget, double budget_secs) {
  require_shape(s, t, "grid_beta_upper");
  const Eigen::Index n = s.d_in();
  if (n > 3) throw InputError("grid mode needs d_in <= 3");
  const double scale = std::max(operator_norm(t), 1e-300);
  RealVector lo, hi;
  projective_box(n, lo, hi);
  const int d = static_cast<int>(s.dim());
  auto bound = [&](const RealVector& c, const RealVector& h) {
    const ComplexVector x = projective_point(c, n);
    const ComplexMatrix dx = projective_partials(c, n);
    const double value = beta_objective(t, s, x);
    const ComplexVector tx = t * x;
    const double l1 = h.sum();
    double best = std::numeric_limits<double>::infinity();
    auto try_coeffs = [&](const ComplexVector& coeffs) {
      ComplexMatrix r = t;
      for (int i = 0; i < d; ++i) r -= coeffs(i) * s.basis_element(i);
      const ComplexVector v = r * x;
      double lin = 0.0, wsum = 0.0;
      for (Eigen::Index k = 0; k < dx.cols(); ++k) {
        const ComplexVector w = r * dx.col(k);
        lin += h(k) * std::abs(v.dot(w).real());
        wsum += h(k) * w.norm();
      }
      const double ub = std::sqrt(v.squaredNorm() + 2 * lin + wsum * wsum) + operator_norm(r) * 0.5 * l1 * l1;
      best = std::min(best, ub);
    };
    if (d == 0) {
      try_coeffs(ComplexVector(0));
    } else {
      const ComplexMatrix m = action_matrix(s, x);
      const ComplexMatrix gram = m.adjoint() * m;
      const ComplexVector rhs = m.adjoint() * tx;
      try_coeffs(m.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(tx));
      for (double lam = 1e-1; lam >= 1e-8; lam *= 0.1) {
        const ComplexMatrix reg = gram + (lam * scale * scale) * ComplexMatrix::Identity(d, d);
        try_coeffs(reg.ldlt().solve(rhs));
      }
    }
    return BoxBound{best, value, c};
  };
  if (n == 1) {
    BranchAndBoundResult r;
    r.lower = r.upper = beta_objective(t, s, projective_point(RealVector(0), 1));
    r.argmax = RealVector(0);
    r.boxes = 1;
    r.complete = true;
    return r;
  }
  return branch_and_bound(lo, hi, bound, abs_tol, box_budget, budget_secs);
}

}  // namespace hyperreflex
