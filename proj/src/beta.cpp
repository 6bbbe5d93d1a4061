#include "hyperreflex/bounds.hpp"
#include "hyperreflex/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hyperreflex {

bool is_pattern_space(const MatrixSubspace& s, std::vector<std::vector<bool>>* support, double tol) {
  std::vector<std::vector<bool>> mask(static_cast<std::size_t>(s.d_out()),
                                      std::vector<bool>(static_cast<std::size_t>(s.d_in()), false));
  Eigen::Index count = 0;
  for (Eigen::Index a = 0; a < s.d_out(); ++a)
    for (Eigen::Index b = 0; b < s.d_in(); ++b) {
      double mass = 0.0;
      for (const auto& m : s.basis()) mass += std::norm(m(a, b));
      if (mass > tol) {
        mask[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
        ++count;
      }
    }
  // S is spanned by matrix units iff its orthogonal projection carries full unit mass on each support entry.
  if (count != s.dim()) return false;
  for (Eigen::Index a = 0; a < s.d_out(); ++a)
    for (Eigen::Index b = 0; b < s.d_in(); ++b)
      if (mask[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) {
        double mass = 0.0;
        for (const auto& m : s.basis()) mass += std::norm(m(a, b));
        if (std::abs(mass - 1.0) > 1e-8) return false;
      }
  if (support) *support = std::move(mask);
  return true;
}

CertifiedValue pattern_beta(const ComplexMatrix& t, const std::vector<std::vector<bool>>& support) {
  const Eigen::Index rows = t.rows(), cols = t.cols();
  if (cols > 20) throw InputError("pattern_beta: too many columns for subset enumeration");
  CertifiedValue out;
  out.method = "pattern";
  out.converged = true;
  ComplexVector best_x = ComplexVector::Zero(cols), best_y = ComplexVector::Zero(rows);
  double best = 0.0;
  for (unsigned long jmask = 1; jmask < (1UL << cols); ++jmask) {
    std::vector<Eigen::Index> js, free_rows;
    for (Eigen::Index b = 0; b < cols; ++b)
      if (jmask & (1UL << b)) js.push_back(b);
    for (Eigen::Index a = 0; a < rows; ++a) {
      bool reached = false;
      for (auto b : js) reached = reached || support[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (!reached) free_rows.push_back(a);
    }
    if (free_rows.empty()) continue;
    ComplexMatrix blk(static_cast<Eigen::Index>(free_rows.size()), static_cast<Eigen::Index>(js.size()));
    for (std::size_t i = 0; i < free_rows.size(); ++i)
      for (std::size_t j = 0; j < js.size(); ++j)
        blk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t(free_rows[i], js[j]);
    if (blk.norm() <= best) continue;
    const SvdResult sv = svd(blk);
    if (sv.values(0) > best) {
      best = sv.values(0);
      best_x.setZero();
      best_y.setZero();
      for (std::size_t j = 0; j < js.size(); ++j) best_x(js[j]) = sv.right(static_cast<Eigen::Index>(j), 0);
      for (std::size_t i = 0; i < free_rows.size(); ++i) best_y(free_rows[i]) = sv.left(static_cast<Eigen::Index>(i), 0);
    }
  }
  out.estimate = out.lower = out.upper = best;
  if (best > 0.0) {
    out.witness = {best_x};
    const cplx val = best_y.dot(t * best_x);
    const cplx phase = std::abs(val) > 0 ? val / std::abs(val) : cplx(1.0);
    out.dual = Functional(phase * best_y * best_x.adjoint());
  }
  return out;
}

namespace {

constexpr double kStartEps[3] = {1e-1, 1e-3, 1e-6};

struct RankOnePair {
  ComplexVector x, y;
  double value = -1.0;
};

/// Regularized objective eps (Tx)^dagger (M M^dagger + eps I)^{-1} (Tx), M = [S_1 x ... S_d x].
struct Regularized {
  double value;
  ComplexVector grad;       // Riemannian gradient on the unit sphere
  ComplexVector companion;  // (M M^dagger + eps I)^{-1} T x, the limiting orthogonal residual direction
};

Regularized regularized_eval(const ComplexMatrix& t, const MatrixSubspace& s, const ComplexVector& x, double eps,
                             bool with_grad) {
  const ComplexVector tx = t * x;
  const Eigen::Index dout = t.rows();
  const ComplexMatrix m = action_matrix(s, x);
  const ComplexMatrix g = m * m.adjoint() + eps * ComplexMatrix::Identity(dout, dout);
  const ComplexVector z = g.ldlt().solve(tx);
  Regularized r;
  r.value = eps * tx.dot(z).real();
  r.companion = z;
  if (!with_grad) return r;
  const ComplexVector a = m.adjoint() * z;  // a_i = (S_i x)^dagger z
  ComplexVector w = t.adjoint() * z;
  for (Eigen::Index i = 0; i < s.dim(); ++i) w -= std::conj(a(i)) * (s.basis_element(i).adjoint() * z);
  ComplexVector grad = 2.0 * eps * w;
  grad -= x.dot(grad).real() * x;
  r.grad = grad;
  return r;
}

/// Riemannian gradient ascent with eps continuation; returns the final unit vector and its companion.
/// Starting eps staggers basins: large eps smooths toward rank-drop strata, small eps follows the generic objective.
ComplexVector regularized_ascent(const ComplexMatrix& t, const MatrixSubspace& s, ComplexVector x, int steps,
                                 ComplexVector* companion, double eps0 = 1e-1) {
  x.normalize();
  double eta = 1.0;
  const double tn = std::max(operator_norm(t), 1e-300);
  for (double eps = eps0; eps >= 0.99e-12; eps *= 0.1) {
    Regularized cur = regularized_eval(t, s, x, eps, true);
    for (int it = 0; it < steps; ++it) {
      const double gn = cur.grad.norm();
      if (gn < 1e-13 * tn * tn) break;
      eta = std::min(eta * 2.0, 10.0);
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls) {
        ComplexVector trial = x + (eta / gn) * cur.grad;
        trial.normalize();
        const Regularized nxt = regularized_eval(t, s, trial, eps, true);
        if (nxt.value > cur.value + 1e-4 * eta * gn) {
          x = trial;
          cur = nxt;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;
    }
    if (companion) *companion = cur.companion;
  }
  return x;
}

double constraint_residual(const MatrixSubspace& s, const ComplexVector& x, const ComplexVector& y) {
  double r = 0.0;
  for (const auto& b : s.basis()) r += std::norm(y.dot(b * x));
  return std::sqrt(r);
}

/// Real Jacobian of (y^dagger S_i x)_i in the real coordinates (Re x, Im x, Re y, Im y).
RealMatrix constraint_jacobian(const MatrixSubspace& s, const ComplexVector& x, const ComplexVector& y) {
  const Eigen::Index n = x.size(), m = y.size(), d = s.dim();
  RealMatrix jac(2 * d, 2 * (n + m));
  std::vector<ComplexVector> sx, sy;
  for (Eigen::Index i = 0; i < d; ++i) {
    sx.push_back(s.basis_element(i) * x);
    sy.push_back(s.basis_element(i).adjoint() * y);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    const ComplexVector& a = sy[static_cast<std::size_t>(i)];  // d/dx: a^dagger dx
    const ComplexVector& b = sx[static_cast<std::size_t>(i)];  // d/dy: dy^dagger b
    for (Eigen::Index k = 0; k < n; ++k) {
      const cplx re = std::conj(a(k)), im = cplx(0.0, 1.0) * std::conj(a(k));
      jac(i, k) = re.real();
      jac(d + i, k) = re.imag();
      jac(i, n + k) = im.real();
      jac(d + i, n + k) = im.imag();
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      const cplx re = b(k), im = cplx(0.0, -1.0) * b(k);
      jac(i, 2 * n + k) = re.real();
      jac(d + i, 2 * n + k) = re.imag();
      jac(i, 2 * n + m + k) = im.real();
      jac(d + i, 2 * n + m + k) = im.imag();
    }
  }
  return jac;
}

RealVector pack(const ComplexVector& x, const ComplexVector& y) {
  const Eigen::Index n = x.size(), m = y.size();
  RealVector z(2 * (n + m));
  z << x.real(), x.imag(), y.real(), y.imag();
  return z;
}

void unpack(const RealVector& z, Eigen::Index n, Eigen::Index m, ComplexVector& x, ComplexVector& y) {
  x.resize(n);
  y.resize(m);
  for (Eigen::Index k = 0; k < n; ++k) x(k) = cplx(z(k), z(n + k));
  for (Eigen::Index k = 0; k < m; ++k) y(k) = cplx(z(2 * n + k), z(2 * n + m + k));
}

/// Gauss-Newton on y^dagger S_i x = 0 with minimum-norm corrections, keeping x and y unit.
bool restore_feasibility(const MatrixSubspace& s, ComplexVector& x, ComplexVector& y) {
  const Eigen::Index n = x.size(), m = y.size(), d = s.dim();
  if (d == 0) {
    x.normalize();
    y.normalize();
    return x.allFinite() && y.allFinite();
  }
  for (int it = 0; it < 30; ++it) {
    x.normalize();
    y.normalize();
    ComplexVector c(d);
    for (Eigen::Index i = 0; i < d; ++i) c(i) = y.dot(s.basis_element(i) * x);
    if (c.norm() <= 1e-14) return true;
    const RealMatrix jac = constraint_jacobian(s, x, y);
    RealVector rhs(2 * d);
    rhs.head(d) = -c.real();
    rhs.tail(d) = -c.imag();
    const RealVector dz = jac.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    if (!dz.allFinite()) return false;
    unpack(pack(x, y) + dz, n, m, x, y);
    if (x.norm() < 1e-8 || y.norm() < 1e-8) return false;
  }
  x.normalize();
  y.normalize();
  return constraint_residual(s, x, y) <= 1e-12;
}

/// Projected gradient ascent of |y^dagger T x|^2 on {y^dagger S_i x = 0, |x| = |y| = 1} with
/// Gauss-Newton retraction. Requires a feasible start.
void manifold_ascent(const ComplexMatrix& t, const MatrixSubspace& s, ComplexVector& x, ComplexVector& y,
                     int iters) {
  const Eigen::Index n = x.size(), m = y.size(), d = s.dim();
  auto objective = [&](const ComplexVector& xx, const ComplexVector& yy) { return std::norm(yy.dot(t * xx)); };
  double f = objective(x, y);
  double eta = 0.1;
  for (int it = 0; it < iters; ++it) {
    const cplx v = y.dot(t * x);
    ComplexVector gx = 2.0 * v * (t.adjoint() * y), gy = 2.0 * std::conj(v) * (t * x);
    const RealVector g = pack(gx, gy);
    RealMatrix cons(2 * d + 2, 2 * (n + m));
    cons.topRows(2 * d) = constraint_jacobian(s, x, y);
    cons.row(2 * d) = pack(x, ComplexVector::Zero(m)).transpose();
    cons.row(2 * d + 1) = pack(ComplexVector::Zero(n), y).transpose();
    const Eigen::JacobiSVD<RealMatrix> sv(cons, Eigen::ComputeThinV);
    const RealVector& sing = sv.singularValues();
    Eigen::Index rank = 0;
    while (rank < sing.size() && sing(rank) > 1e-10 * sing(0)) ++rank;
    const RealMatrix normal = sv.matrixV().leftCols(rank);
    const RealVector dir = g - normal * (normal.transpose() * g);
    const double dn = dir.norm();
    if (dn <= 1e-13 * std::max(1.0, f)) break;
    bool moved = false;
    eta = std::min(eta * 2.0, 10.0);
    for (int ls = 0; ls < 40; ++ls) {
      ComplexVector nx, ny;
      unpack(pack(x, y) + (eta / dn) * dir, n, m, nx, ny);
      if (restore_feasibility(s, nx, ny)) {
        const double nf = objective(nx, ny);
        if (nf > f + 1e-4 * eta * dn) {
          x = nx;
          y = ny;
          f = nf;
          moved = true;
          break;
        }
      }
      eta *= 0.5;
    }
    if (!moved) break;
  }
}

/// Alternating maximization of |y^dagger T x| over yx^* annihilating S, starting from a feasible pair.
RankOnePair alternate(const ComplexMatrix& t, const MatrixSubspace& s, ComplexVector x, ComplexVector y, int iters) {
  RankOnePair best;
  if (constraint_residual(s, x, y) <= 1e-12 || restore_feasibility(s, x, y)) {
    const double before = std::abs(y.dot(t * x));
    ComplexVector mx = x, my = y;
    manifold_ascent(t, s, mx, my, 4 * iters);
    if (std::abs(my.dot(t * mx)) > before) {
      x = mx;
      y = my;
    }
  }
  auto consider = [&](const ComplexVector& xx, const ComplexVector& yy) {
    if (constraint_residual(s, xx, yy) > 1e-8 * std::max(1.0, operator_norm(t))) return;
    const double v = std::abs(yy.dot(t * xx));
    if (v > best.value) best = {xx, yy, v};
  };
  consider(x, y);
  for (int it = 0; it < iters; ++it) {
    const double before = best.value;
    // y-step: the best y orthogonal to S x.
    const ComplexMatrix q = action(s, x);
    ComplexVector ny = t * x;
    ny -= q * (q.adjoint() * ny);
    if (ny.norm() > 1e-14) {
      y = ny / ny.norm();
      consider(x, y);
    }
    // x-step: the best x in {x : y^dagger S_i x = 0 for all i}.
    ComplexMatrix rows(s.dim(), x.size());
    for (Eigen::Index i = 0; i < s.dim(); ++i) rows.row(i) = y.adjoint() * s.basis_element(i);
    const ComplexMatrix ker = s.dim() == 0 ? ComplexMatrix::Identity(x.size(), x.size()) : null_space(rows);
    if (ker.cols() == 0) break;
    ComplexVector nx = ker * (ker.adjoint() * (t.adjoint() * y));
    if (nx.norm() <= 1e-14) break;
    x = nx / nx.norm();
    consider(x, y);
    if (best.value <= before + 1e-15) break;
  }
  return best;
}

RankOnePair polish_from_vector(const ComplexMatrix& t, const MatrixSubspace& s, const ComplexVector& x0,
                               const ComplexVector& companion) {
  RankOnePair best;
  // Exact evaluation at x0.
  {
    ComplexVector x = x0.normalized();
    const ComplexMatrix q = action(s, x);
    ComplexVector y = t * x;
    y -= q * (q.adjoint() * y);
    if (y.norm() > 1e-14) {
      const auto p = alternate(t, s, x, y.normalized(), 50);
      if (p.value > best.value) best = p;
    }
  }
  // Near a rank-drop stratum: restore exact feasibility of the regularized pair, then alternate.
  if (companion.size() == t.rows() && companion.norm() > 0) {
    ComplexVector x = x0.normalized(), y = companion.normalized();
    if (restore_feasibility(s, x, y)) {
      const auto p = alternate(t, s, x, y, 50);
      if (p.value > best.value) best = p;
    }
  }
  return best;
}

/// Nelder-Mead maximization of the exact objective over a stratum box.
double stratum_search(const ComplexMatrix& t, const MatrixSubspace& s, const Stratum& st, Rng& rng, int starts,
                      ComplexVector& best_x) {
  const Eigen::Index k = st.lo.size();
  auto f = [&](const RealVector& p) { return beta_objective(t, s, st.embed(p)); };
  double best = -1.0;
  auto record = [&](const RealVector& p, double v) {
    if (v > best) {
      best = v;
      best_x = st.embed(p).normalized();
    }
  };
  if (k == 0) {
    record(RealVector(0), f(RealVector(0)));
    return best;
  }
  const RealVector width = st.hi - st.lo;
  for (int r = 0; r < starts; ++r) {
    std::vector<RealVector> simplex;
    std::vector<double> vals;
    RealVector p0(k);
    for (Eigen::Index i = 0; i < k; ++i) p0(i) = st.lo(i) + uniform01(rng) * width(i);
    simplex.push_back(p0);
    for (Eigen::Index i = 0; i < k; ++i) {
      RealVector p = p0;
      p(i) += 0.15 * width(i);
      simplex.push_back(p);
    }
    for (const auto& p : simplex) vals.push_back(f(p));
    for (int it = 0; it < 300 * static_cast<int>(k); ++it) {
      std::vector<std::size_t> idx(simplex.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
      const std::size_t hi = idx.front(), lo = idx.back(), second = idx[idx.size() - 2];
      if (std::abs(vals[hi] - vals[lo]) < 1e-13 && it > 20) break;
      RealVector centroid = RealVector::Zero(k);
      for (std::size_t i = 0; i < simplex.size(); ++i)
        if (i != lo) centroid += simplex[i];
      centroid /= static_cast<double>(k);
      const RealVector refl = centroid + (centroid - simplex[lo]);
      const double fr = f(refl);
      if (fr > vals[hi]) {
        const RealVector exp = centroid + 2.0 * (centroid - simplex[lo]);
        const double fe = f(exp);
        if (fe > fr) {
          simplex[lo] = exp;
          vals[lo] = fe;
        } else {
          simplex[lo] = refl;
          vals[lo] = fr;
        }
      } else if (fr > vals[second]) {
        simplex[lo] = refl;
        vals[lo] = fr;
      } else {
        const RealVector con = centroid + 0.5 * (simplex[lo] - centroid);
        const double fc = f(con);
        if (fc > vals[lo]) {
          simplex[lo] = con;
          vals[lo] = fc;
        } else {
          for (std::size_t i = 0; i < simplex.size(); ++i)
            if (i != hi) {
              simplex[i] = simplex[hi] + 0.5 * (simplex[i] - simplex[hi]);
              vals[i] = f(simplex[i]);
            }
        }
      }
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) record(simplex[i], vals[i]);
  }
  return best;
}

void set_rank_one_certificate(CertifiedValue& out, const ComplexMatrix& t, const RankOnePair& p) {
  if (p.value <= 0.0) return;
  const cplx val = p.y.dot(t * p.x);
  const cplx phase = std::abs(val) > 0 ? val / std::abs(val) : cplx(1.0);
  out.dual = Functional(phase * p.y * p.x.adjoint());
  out.witness = {p.x};
}

std::vector<ComplexVector> structured_starts(const ComplexMatrix& t, int restarts, Rng& rng) {
  std::vector<ComplexVector> starts;
  const Eigen::Index n = t.cols();
  for (Eigen::Index j = 0; j < n; ++j) starts.push_back(ComplexVector::Unit(n, j));
  const SvdResult sv = svd(t);
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(n, 3); ++j) starts.push_back(sv.right.col(j));
  for (int r = 0; r < restarts; ++r) starts.push_back(random_unit_vector(n, rng));
  return starts;
}

}  // namespace

CertifiedValue beta(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts,
                    const BetaHints& hints) {
  require_shape(s, t, "beta");
  opts.validate();
  std::vector<std::vector<bool>> support;
  if (opts.certified_upper_mode != UpperMode::off && is_pattern_space(s, &support)) return pattern_beta(t, support);

  CertifiedValue out;
  out.method = "ascent";
  const double tn = operator_norm(t);
  if (tn == 0.0) {
    out.estimate = out.lower = out.upper = 0.0;
    out.converged = true;
    return out;
  }
  Rng rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  RankOnePair best;
  double best_exact = 0.0;
  ComplexVector best_exact_x;
  auto absorb = [&](const RankOnePair& p) {
    if (p.value > best.value) best = p;
  };
  auto consider_exact = [&](const ComplexVector& x) {
    const double v = beta_objective(t, s, x);
    if (v > best_exact) {
      best_exact = v;
      best_exact_x = x.normalized();
    }
  };

  std::vector<ComplexVector> starts = structured_starts(t, opts.restarts, rng);
  for (const auto& sd : hints.seeds) {
    if (sd.size() != t.cols()) throw InputError("beta: hint seed has the wrong length");
    starts.push_back(sd.normalized());
    consider_exact(sd);
    absorb(polish_from_vector(t, s, sd, ComplexVector()));
  }
  const int steps = std::max(10, opts.max_iters / 12);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    ComplexVector comp;
    const ComplexVector x = regularized_ascent(t, s, starts[k], steps, &comp, kStartEps[k % 3]);
    consider_exact(x);
    absorb(polish_from_vector(t, s, x, comp));
  }
  // Seeds from the adjoint side: y maximizing the adjoint objective, paired through restoration.
  {
    const ComplexMatrix ta = t.adjoint();
    const MatrixSubspace sa = adjoint_space(s);
    for (int r = 0; r < std::max(2, opts.restarts / 4); ++r) {
      ComplexVector xcomp;
      ComplexVector y = regularized_ascent(ta, sa, random_unit_vector(t.rows(), rng), steps, &xcomp, kStartEps[r % 3]);
      ComplexVector x = xcomp.norm() > 0 ? ComplexVector(xcomp.normalized()) : random_unit_vector(t.cols(), rng);
      if (restore_feasibility(s, x, y)) {
        consider_exact(x);
        absorb(alternate(t, s, x, y, 50));
      }
    }
  }
  for (const auto& st : hints.strata) {
    ComplexVector sx;
    stratum_search(t, s, st, rng, std::max(4, opts.restarts / 2), sx);
    if (sx.size() == t.cols()) {
      consider_exact(sx);
      absorb(polish_from_vector(t, s, sx, ComplexVector()));
    }
  }

  out.lower = std::max(0.0, std::max(best.value, best_exact));
  out.estimate = out.lower;
  if (best.value >= best_exact) {
    set_rank_one_certificate(out, t, best);
  } else {
    out.witness = {best_exact_x};
  }

  const UpperMode mode = opts.certified_upper_mode;
  const bool use_pieces = !hints.pieces.empty() && (mode == UpperMode::automatic || mode == UpperMode::parametric);
  const bool use_grid = !use_pieces && s.d_in() <= 3 && (mode == UpperMode::automatic || mode == UpperMode::grid);
  if (use_pieces) {
    double up_sq = 0.0, lo_sq = 0.0;
    bool complete = true;
    // sqrt(l + tol_sq) - sqrt(l) <= 0.9 tol.
    const double tol_sq = 1.8 * opts.tol * std::max(out.lower, 1e-3);
    for (const auto& piece : hints.pieces) {
      const auto r = maximize_piece(piece, tol_sq, opts.box_budget, opts.budget_secs);
      up_sq = std::max(up_sq, r.upper);
      lo_sq = std::max(lo_sq, r.lower);
      complete = complete && r.complete;
    }
    out.upper = std::sqrt(std::max(0.0, up_sq));
    out.estimate = std::max(out.estimate, std::sqrt(std::max(0.0, lo_sq)));
    out.method = "ascent+parametric";
    out.note = complete ? "" : "parametric budget exhausted";
  } else if (use_grid) {
    const auto r = grid_beta_upper(t, s, 0.5 * opts.tol, opts.box_budget, opts.budget_secs);
    out.upper = r.upper;
    if (r.lower > out.lower) {
      out.lower = out.estimate = r.lower;
      out.witness = {projective_point(r.argmax, s.d_in())};
      out.dual.reset();
    }
    out.method = "ascent+grid";
    out.note = r.complete ? "" : "grid budget exhausted";
  } else if (mode == UpperMode::parametric) {
    throw InputError("beta: parametric mode needs scene pieces");
  } else if (mode == UpperMode::grid) {
    throw InputError("beta: grid mode needs d_in <= 3");
  } else {
    out.heuristic = true;
  }
  out.upper = std::max(out.upper, out.lower);
  out.converged = !out.heuristic && out.gap() <= opts.tol;
  return out;
}

CertifiedValue beta_via_rank_one(const ComplexMatrix& t, const MatrixSubspace& s, const OptimizerOptions& opts) {
  require_shape(s, t, "beta_via_rank_one");
  opts.validate();
  CertifiedValue out;
  out.method = "rank-one";
  out.heuristic = true;
  const double tn = operator_norm(t);
  if (tn == 0.0 || s.is_full()) {
    out.estimate = out.lower = out.upper = 0.0;
    out.heuristic = false;
    out.converged = true;
    return out;
  }
  if (s.is_zero()) {
    const SvdResult sv = svd(t);
    out.estimate = out.lower = out.upper = sv.values(0);
    set_rank_one_certificate(out, t, {sv.right.col(0), sv.left.col(0), sv.values(0)});
    out.heuristic = false;
    out.converged = true;
    return out;
  }
  // The rank-one formulation is symmetric under adjoints: ascend over y for (T^dagger, S^dagger).
  const ComplexMatrix ta = t.adjoint();
  const MatrixSubspace sa = adjoint_space(s);
  Rng rng(opts.seed ^ 0x5851f42d4c957f2dULL);
  RankOnePair best;
  const int steps = std::max(10, opts.max_iters / 12);
  const auto starts = structured_starts(ta, 2 * opts.restarts, rng);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    ComplexVector xcomp;
    ComplexVector y = regularized_ascent(ta, sa, starts[k], steps, &xcomp, kStartEps[k % 3]);
    ComplexVector x = xcomp.size() == t.cols() && xcomp.norm() > 0 ? ComplexVector(xcomp.normalized())
                                                                   : random_unit_vector(t.cols(), rng);
    if (restore_feasibility(s, x, y)) {
      const auto p = alternate(t, s, x, y, 50);
      if (p.value > best.value) best = p;
    }
    // Direct alternation from the adjoint iterate: x-step first.
    ComplexMatrix rows(s.dim(), t.cols());
    for (Eigen::Index i = 0; i < s.dim(); ++i) rows.row(i) = y.normalized().adjoint() * s.basis_element(i);
    const ComplexMatrix ker = null_space(rows);
    if (ker.cols() > 0) {
      ComplexVector nx = ker * (ker.adjoint() * (ta * y));
      if (nx.norm() > 1e-14) {
        const auto p = alternate(t, s, nx.normalized(), y.normalized(), 50);
        if (p.value > best.value) best = p;
      }
    }
  }
  // Feasible pairs (e_j, P_{S e_j}^perp e_i): maximizers often sit on sparse supports.
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    const ComplexVector x = ComplexVector::Unit(t.cols(), j);
    const ComplexMatrix q = action(s, x);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      ComplexVector y = ComplexVector::Unit(t.rows(), i);
      y -= q * (q.adjoint() * y);
      if (y.norm() <= 1e-8) continue;
      const auto p = alternate(t, s, x, y.normalized(), 50);
      if (p.value > best.value) best = p;
    }
  }
  // Feasible pairs from random x on random supports: y = P_{Sx}^perp T x, then constrained ascent.
  for (int r = 0; r < 2 * opts.restarts; ++r) {
    ComplexVector x = random_unit_vector(t.cols(), rng);
    if (r % 2 == 1) {
      for (Eigen::Index k = 0; k < x.size(); ++k)
        if (uniform01(rng) < 0.4) x(k) = 0.0;
      if (x.norm() == 0.0) continue;
      x.normalize();
    }
    const ComplexMatrix q = action(s, x);
    ComplexVector y = t * x;
    y -= q * (q.adjoint() * y);
    if (y.norm() <= 1e-14) continue;
    const auto p = alternate(t, s, x, y.normalized(), 50);
    if (p.value > best.value) best = p;
  }
  out.estimate = out.lower = std::max(0.0, best.value);
  set_rank_one_certificate(out, t, best);
  return out;
}

}  // namespace hyperreflex
