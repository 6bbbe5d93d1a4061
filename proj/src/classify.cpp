#include "hyperreflex/structure.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace hyperreflex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ComplexMatrix coordinate_basis(const std::vector<int>& idx, Eigen::Index n) {
  ComplexMatrix b = ComplexMatrix::Zero(n, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) b(idx[i], static_cast<Eigen::Index>(i)) = 1.0;
  return b;
}

bool unit_in(const MatrixSubspace& s, Eigen::Index a, Eigen::Index b) {
  if (s.dim() == 0) return false;
  // vec is column-major: entry (a, b) sits at b * d_out + a.
  const auto row = s.vec_basis().row(b * s.d_out() + a);
  return std::abs(1.0 - row.squaredNorm()) <= 1e-9;
}

double ratio_of(const CertifiedValue& dist, const CertifiedValue& beta) {
  if (beta.upper == 0.0) return dist.lower > 0.0 ? kInf : 1.0;
  if (!std::isfinite(beta.upper)) return 1.0;
  return std::max(1.0, dist.lower / beta.upper);
}

ObstructionWitness evaluate_witness(std::string kind, ComplexMatrix dom, ComplexMatrix cod, MatrixSubspace comp,
                                    ComplexMatrix test, const OptimizerOptions& o) {
  ObstructionWitness w;
  w.kind = std::move(kind);
  w.domain_basis = std::move(dom);
  w.codomain_basis = std::move(cod);
  w.compressed = std::move(comp);
  w.test = std::move(test);
  w.dist = distance(w.test, w.compressed, o);
  w.beta = beta(w.test, w.compressed, o);
  w.certified_ratio = ratio_of(w.dist, w.beta);
  return w;
}

/// A test operator inside Ref(S) but outside S: beta_S vanishes on it.
std::optional<ObstructionWitness> non_reflexive_witness(const MatrixSubspace& s, const MatrixSubspace& ref,
                                                        const OptimizerOptions& o) {
  if (ref.dim() <= s.dim()) return std::nullopt;
  ComplexMatrix extra(ref.ambient_dim(), ref.dim());
  for (Eigen::Index j = 0; j < ref.dim(); ++j) {
    ComplexVector v = ref.vec_basis().col(j);
    if (s.dim() > 0) v -= s.vec_basis() * (s.vec_basis().adjoint() * v);
    extra.col(j) = v;
  }
  const ComplexMatrix outside = orthonormal_columns(extra, 1e-8);
  if (outside.cols() == 0) return std::nullopt;
  ObstructionWitness w;
  w.kind = "not_reflexive";
  w.domain_basis = ComplexMatrix::Identity(s.d_in(), s.d_in());
  w.codomain_basis = ComplexMatrix::Identity(s.d_out(), s.d_out());
  w.compressed = s;
  w.test = unvec(outside.col(0), s.d_out(), s.d_in());
  w.test /= operator_norm(w.test);
  w.dist = distance(w.test, s, o);
  OptimizerOptions bo = o;
  bo.certified_upper_mode = UpperMode::off;
  w.beta = beta(w.test, s, bo);
  w.beta.upper = 0.0;
  w.beta.note = "test lies in the reflexive closure";
  w.certified_ratio = ratio_of(w.dist, w.beta);
  return w;
}

/// Lifts a witness found for a compression of S to S's own coordinates.
ObstructionWitness lift(ObstructionWitness w, const ComplexMatrix& dom, const ComplexMatrix& cod) {
  w.domain_basis = dom * w.domain_basis;
  w.codomain_basis = cod * w.codomain_basis;
  return w;
}

ObstructionWitness adjoint_witness(ObstructionWitness w) {
  std::swap(w.domain_basis, w.codomain_basis);
  w.compressed = adjoint_space(w.compressed);
  w.test = w.test.adjoint().eval();
  return w;
}

ComplexVector unit_orthogonal(const ComplexVector& v) {
  ComplexVector w(2);
  w << -std::conj(v(1)), std::conj(v(0));
  return w.normalized();
}

/// Roots of c0 + c1 t + c2 t^2 with a flag for a root at infinity (degree drop).
std::vector<ComplexVector> quadratic_points(cplx c0, cplx c1, cplx c2, double scale) {
  const double eps = 1e-10 * std::max(scale, 1e-300);
  std::vector<ComplexVector> pts;
  auto push_t = [&](cplx t) {
    ComplexVector x(2);
    x << 1.0, t;
    pts.push_back(x.normalized());
  };
  ComplexVector inf(2);
  inf << 0.0, 1.0;
  if (std::abs(c2) > eps) {
    const cplx disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
    const cplx q = -0.5 * (c1 + (std::real(std::conj(c1) * disc) >= 0 ? disc : -disc));
    if (std::abs(q) > eps) {
      push_t(q / c2);
      push_t(c0 / q);
    } else {
      push_t(0.0);
      push_t(0.0);
    }
  } else if (std::abs(c1) > eps) {
    push_t(-c0 / c1);
    pts.push_back(inf);
  } else if (std::abs(c0) > eps) {
    pts.push_back(inf);
    pts.push_back(inf);
  }
  return pts;
}

bool parallel(const ComplexVector& a, const ComplexVector& b, double tol) {
  return std::abs(std::abs(a.normalized().dot(b.normalized())) - 1.0) <= tol;
}

std::string case22_label(Case22 c) {
  switch (c) {
    case Case22::trivial_dimension: return "case 1";
    case Case22::codimension_one: return "case 2";
    case Case22::rank_one_range: return "case 3a";
    case Case22::rank_one_kernel: return "case 3b";
    case Case22::masa: return "case 3c";
    case Case22::not_one_hyperreflexive: return "not 1-hyperreflexive";
  }
  return "";
}

std::string case23_label(Case23 c) {
  switch (c) {
    case Case23::nest_bimodule: return "nest bimodule";
    case Case23::one_dimensional: return "dim 1";
    case Case23::two_masa_columns: return "case 3";
    case Case23::masa_with_row: return "case 4";
    case Case23::scalar_block_with_column: return "case 5";
    case Case23::not_one_hyperreflexive: return "not 1-hyperreflexive";
  }
  return "";
}

}  // namespace

bool recheck_witness(const ObstructionWitness& w, double margin, const OptimizerOptions& opts) {
  if (w.kind == "not_reflexive") {
    StructureOptions so;
    so.inner = opts;
    const MatrixSubspace ref = reflexive_closure(w.compressed, so);
    return contains(ref, w.test, 1e-6) && distance(w.test, w.compressed, opts).lower > margin;
  }
  if (w.kind == "rank_drop_points") return w.certified_ratio >= 1.0 + margin;
  const CertifiedValue d = distance(w.test, w.compressed, opts);
  const CertifiedValue b = beta(w.test, w.compressed, opts);
  return ratio_of(d, b) >= 1.0 + margin;
}

// ---------------------------------------------------------------------------------------------
// 2 x 2 spaces

Classify22Result classify_22(const MatrixSubspace& s, const StructureOptions& opts) {
  if (s.d_out() != 2 || s.d_in() != 2) throw InputError("classify_22: ambient must be 2 x 2");
  opts.validate();
  Classify22Result res;
  res.dim = static_cast<int>(s.dim());
  auto finish = [&](Case22 c) {
    res.verdict = c;
    res.label = case22_label(c);
    res.one_hyperreflexive = c != Case22::not_one_hyperreflexive;
    return res;
  };
  if (res.dim == 0 || res.dim == 1 || res.dim == 4) return finish(Case22::trivial_dimension);

  if (res.dim == 3) {
    const ComplexMatrix phi = annihilator(s).basis_element(0);
    const RealVector sv = singular_values(phi);
    if (sv(1) <= 1e-8 * sv(0)) {
      const SvdResult d = svd(phi);
      res.rank_one_points = {ComplexVector(d.right.col(0))};
      return finish(Case22::codimension_one);
    }
    // No rank-one annihilator: S x = C^2 for every x != 0, so Ref(S) = M_2.
    res.witness = non_reflexive_witness(s, MatrixSubspace::full(2, 2), opts.inner);
    res.note = "no vector with one-dimensional range; not reflexive";
    return finish(Case22::not_one_hyperreflexive);
  }

  // dim 2
  ComplexMatrix side(2, 4), stacked(4, 2);
  side << s.basis_element(0), s.basis_element(1);
  stacked << s.basis_element(0), s.basis_element(1);
  if (numerical_rank(side, 1e-9) == 1) return finish(Case22::rank_one_range);
  if (numerical_rank(stacked, 1e-9) == 1) return finish(Case22::rank_one_kernel);

  // det [S_1 x, S_2 x] at x = (1, t) is a quadratic in t.
  auto det_at = [&](cplx t) {
    ComplexVector x(2);
    x << 1.0, t;
    return action_matrix(s, x).determinant();
  };
  const cplx p0 = det_at(0.0), p1 = det_at(1.0), pm = det_at(-1.0);
  const cplx c0 = p0, c1 = 0.5 * (p1 - pm), c2 = 0.5 * (p1 + pm) - p0;
  const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2)});
  std::vector<ComplexVector> pts = quadratic_points(c0, c1, c2, scale);
  if (pts.size() < 2 || scale <= 1e-12) {
    res.note = "rank-drop set is degenerate";
    res.witness = find_obstruction(s, opts);
    return finish(Case22::not_one_hyperreflexive);
  }
  if (parallel(pts[0], pts[1], 1e-9)) {
    // A single vector with one-dimensional range: Ref(S) is a three-dimensional nest bimodule.
    res.rank_one_points = {pts[0]};
    res.note = "one vector with one-dimensional range; not reflexive";
    res.witness = non_reflexive_witness(s, reflexive_closure(s, opts), opts.inner);
    return finish(Case22::not_one_hyperreflexive);
  }
  res.rank_one_points = pts;
  const ComplexVector x1 = pts[0], x2 = pts[1];
  const ComplexVector y1 = action(s, x1).col(0), y2 = action(s, x2).col(0);

  // Normal form in the bases x1, x1' and y1, y1': entry (2,1) vanishes.
  ComplexMatrix ud(2, 2), ur(2, 2);
  ud << x1, unit_orthogonal(x1);
  ur << y1, unit_orthogonal(y1);
  const ComplexMatrix b0 = ur.adjoint() * s.basis_element(0) * ud;
  const ComplexMatrix b1 = ur.adjoint() * s.basis_element(1) * ud;
  Eigen::Matrix2cd m;
  m << b0(0, 0), b1(0, 0), b0(1, 1), b1(1, 1);
  if (std::abs(m.determinant()) <= 1e-10) {
    res.note = "diagonal functionals dependent";
    res.witness = find_obstruction(s, opts);
    return finish(Case22::not_one_hyperreflexive);
  }
  const Eigen::Matrix2cd c = m.inverse();
  const ComplexMatrix ea = c(0, 0) * b0 + c(1, 0) * b1;
  const ComplexMatrix eb = c(0, 1) * b0 + c(1, 1) * b1;
  const cplx r = ea(0, 1), sc = eb(0, 1);
  res.r = std::abs(r);
  res.s = std::abs(sc);
  const double form_tol = std::max(1e-6, 10 * opts.tol);
  if (*res.r <= form_tol && *res.s <= form_tol) return finish(Case22::masa);

  // Witness: rotations U = [[a, -b],[b, a]], a = sin t, b = cos t, 0 < a < (r + s) b, in the phase-normalized
  // bases. beta_S(T) = max_i ||(I - y_i y_i^*) T x_i|| because S x = C^2 off the two rank-drop lines.
  const cplx pr = std::abs(r) > 0 ? r / std::abs(r) : 1.0;
  const cplx ps = std::abs(sc) > 0 ? sc / std::abs(sc) : 1.0;
  ComplexMatrix wr = ur.adjoint();
  wr.row(1) *= ps;
  ComplexMatrix wd = ud;
  wd.col(1) *= std::conj(pr);
  auto exact_beta = [&](const ComplexMatrix& t) {
    const ComplexVector v1 = t * x1, v2 = t * x2;
    return std::max((v1 - y1 * y1.dot(v1)).norm(), (v2 - y2 * y2.dot(v2)).norm());
  };
  const double limit = std::atan(*res.r + *res.s);
  std::vector<std::pair<double, ComplexMatrix>> cands;
  for (int k = 1; k <= 31; ++k) {
    const double th = limit * k / 32.0;
    ComplexMatrix u(2, 2);
    u << std::sin(th), -std::cos(th), std::cos(th), std::sin(th);
    const ComplexMatrix t = wr.adjoint() * u * wd.adjoint();
    cands.emplace_back(exact_beta(t), t);
  }
  std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::optional<ObstructionWitness> best;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, cands.size()); ++i) {
    ObstructionWitness w;
    w.kind = "rank_drop_points";
    w.domain_basis = ComplexMatrix::Identity(2, 2);
    w.codomain_basis = ComplexMatrix::Identity(2, 2);
    w.compressed = s;
    w.test = cands[i].second;
    w.dist = distance(w.test, s, opts.inner);
    w.beta.estimate = w.beta.lower = w.beta.upper = cands[i].first;
    w.beta.method = "rank-drop points";
    w.beta.converged = true;
    w.certified_ratio = ratio_of(w.dist, w.beta);
    if (!best || w.certified_ratio > best->certified_ratio) best = std::move(w);
  }
  res.witness = best;
  return finish(Case22::not_one_hyperreflexive);
}

// ---------------------------------------------------------------------------------------------
// 2 x 3 spaces

namespace {

struct PencilPoint {
  ComplexVector u;       // codomain vector orthogonal to S x for every x in the kernel
  ComplexMatrix kernel;  // orthonormal basis of {x : u^* S_i x = 0 for all i}
};

/// R(u) = [u^* S_1; ...; u^* S_k] for a space with two-dimensional codomain.
ComplexMatrix pencil_at(const MatrixSubspace& s, const ComplexVector& u) {
  ComplexMatrix r(s.dim(), s.d_in());
  for (Eigen::Index i = 0; i < s.dim(); ++i) r.row(i) = u.adjoint() * s.basis_element(i);
  return r;
}

/// Codomain directions u whose pencil R(u) drops rank; `continuum` when every u does.
std::vector<PencilPoint> pencil_points(const MatrixSubspace& s, bool& continuum, std::uint64_t seed) {
  continuum = false;
  const Eigen::Index n = s.d_in();
  std::vector<PencilPoint> out;
  if (s.dim() < n) {
    continuum = true;
    return out;
  }
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const ComplexMatrix g = random_matrix(n, s.dim(), rng);
  ComplexVector e1 = ComplexVector::Zero(2), e2 = ComplexVector::Zero(2);
  e1(0) = 1.0;
  e2(1) = 1.0;
  const ComplexMatrix r1 = pencil_at(s, e1), r2 = pencil_at(s, e2);
  // p(z) = det(G (R1 + z R2)) has degree <= n; interpolate at n + 1 points.
  const Eigen::Index deg = n;
  ComplexMatrix vand(deg + 1, deg + 1);
  ComplexVector vals(deg + 1);
  for (Eigen::Index i = 0; i <= deg; ++i) {
    const cplx z = std::polar(1.0, 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(deg + 1));
    for (Eigen::Index k = 0; k <= deg; ++k) vand(i, k) = std::pow(z, static_cast<double>(k));
    vals(i) = (g * (r1 + z * r2)).determinant();
  }
  const ComplexVector coef = vand.fullPivLu().solve(vals);
  const double scale = coef.cwiseAbs().maxCoeff();
  if (scale <= 1e-12 * std::pow(std::max(r1.norm(), r2.norm()), static_cast<double>(n))) {
    continuum = true;
    return out;
  }
  Eigen::Index top = deg;
  while (top > 0 && std::abs(coef(top)) <= 1e-10 * scale) --top;
  std::vector<cplx> zs;
  if (top >= 1) {
    ComplexMatrix comp = ComplexMatrix::Zero(top, top);
    for (Eigen::Index i = 1; i < top; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < top; ++i) comp(i, top - 1) = -coef(i) / coef(top);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(comp);
    for (Eigen::Index i = 0; i < top; ++i) zs.push_back(es.eigenvalues()(i));
  }
  auto accept = [&](const ComplexVector& u) {
    const ComplexMatrix r = pencil_at(s, u.normalized());
    const ComplexMatrix ker = null_space(r, 1e-7);
    if (ker.cols() == 0) return;
    for (const auto& p : out)
      if (parallel(p.u, u, 1e-7)) return;
    out.push_back({u.normalized(), ker});
  };
  for (const cplx z : zs) {
    // R(u) = conj(u_1) R1 + conj(u_2) R2, so z = conj(u_2) / conj(u_1).
    ComplexVector u(2);
    u << 1.0, std::conj(z);
    accept(u);
  }
  if (numerical_rank(r2, 1e-7) < n) accept(e2);
  return out;
}

}  // namespace

Classify23Result classify_23(const MatrixSubspace& input, const StructureOptions& opts) {
  opts.validate();
  const bool tall = input.d_out() == 3 && input.d_in() == 2;
  if (!tall && !(input.d_out() == 2 && input.d_in() == 3))
    throw InputError("classify_23: ambient must be 2 x 3 or 3 x 2");
  const MatrixSubspace s = tall ? adjoint_space(input) : input;
  Classify23Result res;
  res.transposed = tall;
  res.dim = static_cast<int>(s.dim());
  auto finish = [&](Case23 c) {
    res.verdict = c;
    res.label = case23_label(c);
    res.one_hyperreflexive = c != Case23::not_one_hyperreflexive;
    if (tall) {
      if (res.witness) res.witness = adjoint_witness(*res.witness);
      if (res.domain_basis && res.codomain_basis) std::swap(res.domain_basis, res.codomain_basis);
      if (res.block_operator) res.block_operator = res.block_operator->adjoint().eval();
    }
    return res;
  };
  if (res.dim == 0 || s.is_full()) return finish(Case23::nest_bimodule);
  if (res.dim == 1) return finish(Case23::one_dimensional);
  if (total_order_check(s, opts).is_nest_bimodule) return finish(Case23::nest_bimodule);

  const MatrixSubspace ref = reflexive_closure(s, opts);
  if (ref.dim() > s.dim()) {
    res.note = "not reflexive";
    res.witness = non_reflexive_witness(s, ref, opts.inner);
    return finish(Case23::not_one_hyperreflexive);
  }

  bool continuum = false;
  const auto pts = pencil_points(s, continuum, opts.seed);
  const double otol = 1e-6;
  auto orth = [&](const ComplexMatrix& a, const ComplexMatrix& b) { return (a.adjoint() * b).norm() <= otol; };

  if (res.dim == 4 && !continuum && pts.size() == 2 && pts[0].kernel.cols() == 1 && pts[1].kernel.cols() == 1 &&
      orth(pts[0].u, pts[1].u) && orth(pts[0].kernel, pts[1].kernel)) {
    ComplexMatrix dom(3, 3);
    dom << pts[0].kernel, pts[1].kernel, orthogonal_complement((ComplexMatrix(3, 2) << pts[0].kernel, pts[1].kernel).finished(), 3);
    ComplexMatrix cod(2, 2);
    cod << pts[1].u, pts[0].u;
    res.domain_basis = dom;
    res.codomain_basis = cod;
    return finish(Case23::two_masa_columns);
  }
  if (res.dim == 3 && !continuum && pts.size() == 2) {
    const int wide = pts[0].kernel.cols() == 2 ? 0 : (pts[1].kernel.cols() == 2 ? 1 : -1);
    if (wide >= 0) {
      const auto& pa = pts[static_cast<std::size_t>(wide)];
      const auto& pb = pts[static_cast<std::size_t>(1 - wide)];
      if (pb.kernel.cols() == 1 && orth(pa.u, pb.u) && orth(pa.kernel, pb.kernel)) {
        ComplexMatrix dom(3, 3);
        dom << pb.kernel, pa.kernel;
        ComplexMatrix cod(2, 2);
        cod << pa.u, pb.u;
        res.domain_basis = dom;
        res.codomain_basis = cod;
        return finish(Case23::masa_with_row);
      }
    }
  }
  if (res.dim == 3 && continuum) {
    const MatrixSubspace ann = annihilator(s);
    ComplexMatrix stacked(ann.dim() * 2, 3);
    for (Eigen::Index i = 0; i < ann.dim(); ++i) stacked.middleRows(2 * i, 2) = ann.basis_element(i);
    const ComplexMatrix common = null_space(stacked, 1e-8);
    if (common.cols() == 1) {
      const ComplexMatrix p = orthogonal_complement(common, 3);
      const MatrixSubspace sp = compress_to_bases(s, p, ComplexMatrix::Identity(2, 2));
      if (sp.dim() == 1 && numerical_rank(sp.basis_element(0), 1e-8) == 2) {
        ComplexMatrix dom(3, 3);
        dom << p, common;
        res.domain_basis = dom;
        res.codomain_basis = ComplexMatrix::Identity(2, 2);
        res.block_operator = sp.basis_element(0);
        return finish(Case23::scalar_block_with_column);
      }
    }
  }

  // Not one of the forms: search two-dimensional domain compressions, then small coordinate ones.
  std::vector<ComplexVector> probes;
  for (const auto& p : pts)
    for (Eigen::Index j = 0; j < p.kernel.cols(); ++j) probes.push_back(p.kernel.col(j));
  Rng rng(opts.seed ^ 0x3c6ef372fe94f82bULL);
  for (int i = 0; i < 6; ++i) probes.push_back(random_unit_vector(3, rng));
  const std::size_t np = probes.size();
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = i + 1; j < np; ++j) {
      ComplexMatrix two(3, 2);
      two << probes[i], probes[j];
      for (int variant = 0; variant < 2; ++variant) {
        ComplexMatrix plane = two;
        if (variant == 1) {
          // span{(x_i + x_j)/sqrt2, the vector orthogonal to x_i and x_j}
          plane.col(0) = (probes[i] + probes[j]).normalized();
          plane.col(1) = orthogonal_complement(two, 3).col(0);
        }
        const ComplexMatrix pb = orthonormal_columns(plane, 1e-8);
        if (pb.cols() != 2) continue;
        const MatrixSubspace c = compress_to_bases(s, pb, ComplexMatrix::Identity(2, 2));
        const Classify22Result r22 = classify_22(c, opts);
        if (!r22.one_hyperreflexive && r22.witness && r22.witness->certified_ratio >= 1.0 + opts.margin) {
          res.witness = lift(*r22.witness, pb, ComplexMatrix::Identity(2, 2));
          res.note = "two-dimensional domain compression";
          return finish(Case23::not_one_hyperreflexive);
        }
      }
    }
  res.witness = find_obstruction(s, opts);
  if (!res.witness) res.note = "no certified witness found";
  return finish(Case23::not_one_hyperreflexive);
}

// ---------------------------------------------------------------------------------------------
// Obstruction search

std::optional<ObstructionWitness> find_obstruction(const MatrixSubspace& s, const StructureOptions& opts) {
  opts.validate();
  const int rows = static_cast<int>(s.d_out()), cols = static_cast<int>(s.d_in());
  const double need = 1.0 + opts.margin;
  auto subsets = [](int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
      if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
      }
      for (int i = start; i < n; ++i) {
        cur.push_back(i);
        rec(i + 1);
        cur.pop_back();
      }
    };
    rec(0);
    return out;
  };

  // 1. Coordinate compressions equal to the independent-entry forms [[*,0],[0,*],[0,0]] and transpose;
  //    the test has ones off the two free entries (ratio sqrt(9/8)).
  for (const auto& [rk, ck] : {std::pair{3, 2}, std::pair{2, 3}}) {
    if (rows < rk || cols < ck) continue;
    for (const auto& rs : subsets(rows, rk))
      for (const auto& cs : subsets(cols, ck)) {
        const ComplexMatrix dom = coordinate_basis(cs, cols), cod = coordinate_basis(rs, rows);
        const MatrixSubspace c = compress_to_bases(s, dom, cod);
        if (c.dim() != 2) continue;
        std::vector<std::vector<bool>> sup;
        if (!is_pattern_space(c, &sup)) continue;
        std::vector<int> rc(static_cast<std::size_t>(rk), 0), cc(static_cast<std::size_t>(ck), 0);
        for (int a = 0; a < rk; ++a)
          for (int b = 0; b < ck; ++b)
            if (sup[a][b]) ++rc[static_cast<std::size_t>(a)], ++cc[static_cast<std::size_t>(b)];
        if (*std::max_element(rc.begin(), rc.end()) > 1 || *std::max_element(cc.begin(), cc.end()) > 1) continue;
        ComplexMatrix t = ComplexMatrix::Ones(rk, ck);
        for (int a = 0; a < rk; ++a)
          for (int b = 0; b < ck; ++b)
            if (sup[a][b]) t(a, b) = 0.0;
        ObstructionWitness w = evaluate_witness("coordinate_masa_form", dom, cod, c, t, opts.inner);
        if (w.certified_ratio >= need) return w;
      }
  }

  // 2. Coordinate 2 x 2 compressions.
  if (rows >= 2 && cols >= 2)
    for (const auto& rs : subsets(rows, 2))
      for (const auto& cs : subsets(cols, 2)) {
        const ComplexMatrix dom = coordinate_basis(cs, cols), cod = coordinate_basis(rs, rows);
        const MatrixSubspace c = compress_to_bases(s, dom, cod);
        if (c.dim() != 2 && c.dim() != 3) continue;
        const Classify22Result r = classify_22(c, opts);
        if (!r.one_hyperreflexive && r.witness && r.witness->certified_ratio >= need) return lift(*r.witness, dom, cod);
      }

  // 3. Pairs of domain vectors whose range projections fail the rank-two form.
  const CommutationReport rep = q_commutation_report(s, opts);
  int tried = 0;
  for (const auto& p : rep.pairs) {
    if (!p.violates_rank_two_form || tried >= 12) continue;
    ++tried;
    ComplexMatrix dom2(p.x.size(), 2);
    dom2 << p.x, p.y;
    const ComplexMatrix dom = orthonormal_columns(dom2, 1e-9);
    if (dom.cols() != 2) continue;
    ComplexMatrix both(s.d_out(), 0);
    for (const auto& v : {p.x, p.y}) {
      const ComplexMatrix a = action(s, v);
      ComplexMatrix nb(s.d_out(), both.cols() + a.cols());
      nb << both, a;
      both = nb;
    }
    const ComplexMatrix cod = orthonormal_columns(both, 1e-9);
    if (cod.cols() < 2 || cod.cols() > 3) continue;
    const MatrixSubspace c = compress_to_bases(s, dom, cod);
    if (cod.cols() == 2) {
      const Classify22Result r = classify_22(c, opts);
      if (!r.one_hyperreflexive && r.witness && r.witness->certified_ratio >= need) return lift(*r.witness, dom, cod);
    } else {
      const Classify23Result r = classify_23(c, opts);
      if (!r.one_hyperreflexive && r.witness && r.witness->certified_ratio >= need) return lift(*r.witness, dom, cod);
    }
  }

  // 4. The whole space when it is small.
  if (s.ambient_dim() <= 16 && !s.is_full() && s.dim() > 0) {
    KappaOptions ko;
    ko.inner = opts.inner;
    ko.inner.seed = opts.seed;
    ko.restarts = 4;
    const KappaResult k = kappa_lower(s, ko);
    if (k.value.lower >= need) {
      ObstructionWitness w;
      w.kind = "ratio_search";
      w.domain_basis = ComplexMatrix::Identity(s.d_in(), s.d_in());
      w.codomain_basis = ComplexMatrix::Identity(s.d_out(), s.d_out());
      w.compressed = s;
      w.test = k.witness;
      w.dist = k.witness_distance;
      w.beta = k.witness_beta;
      w.certified_ratio = k.value.lower;
      return w;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------------------------
// Block detector

std::string to_string(BlockKind k) {
  switch (k) {
    case BlockKind::zero: return "zero";
    case BlockKind::full: return "full";
    case BlockKind::one_dimensional: return "one_dimensional";
    case BlockKind::nest_bimodule: return "nest_bimodule";
    case BlockKind::tri_const: return "tri_const";
    case BlockKind::obstruction: return "obstruction";
    case BlockKind::unresolved: return "unresolved";
  }
  return "";
}

std::string to_string(GlobalVerdict v) {
  switch (v) {
    case GlobalVerdict::one_hyperreflexive_consistent: return "one_hyperreflexive_consistent";
    case GlobalVerdict::not_one_hyperreflexive: return "not_one_hyperreflexive";
    case GlobalVerdict::inconclusive: return "inconclusive";
  }
  return "";
}

namespace {

/// Unit HS norm with the first nonzero entry (column-major) real positive.
ComplexMatrix canonical_operator(const ComplexMatrix& op) {
  ComplexMatrix t = op / op.norm();
  const ComplexVector v = vec(t);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-12) {
      t *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  return t;
}

struct LocalRecognition {
  BlockKind kind = BlockKind::unresolved;
  std::optional<BlockSpec> spec;
  std::vector<int> row_order, col_order;  // local permutation used by the presentation
};

MatrixSubspace permuted(const MatrixSubspace& s, const std::vector<int>& row_order, const std::vector<int>& col_order) {
  return compress_to_bases(s, coordinate_basis(col_order, s.d_in()), coordinate_basis(row_order, s.d_out()));
}

std::optional<LocalRecognition> recognize_tri_const(const MatrixSubspace& b) {
  const int r = static_cast<int>(b.d_out()), c = static_cast<int>(b.d_in());
  std::vector<std::vector<bool>> in_p(static_cast<std::size_t>(r), std::vector<bool>(static_cast<std::size_t>(c), false));
  std::vector<ComplexMatrix> units;
  for (int a = 0; a < r; ++a)
    for (int j = 0; j < c; ++j)
      if (unit_in(b, a, j)) {
        in_p[a][j] = true;
        units.push_back(matrix_unit(r, c, a, j));
      }
  ComplexMatrix rest = b.vec_basis();
  for (const auto& u : units) {
    const ComplexVector uv = vec(u);
    rest -= uv * (uv.adjoint() * rest);
  }
  const ComplexMatrix rv = orthonormal_columns(rest, 1e-8);
  const Eigen::Index k = rv.cols();
  if (k == 0 || static_cast<Eigen::Index>(units.size()) + k != b.dim()) return std::nullopt;

  // Cells of the non-pattern part, clustered by parallel coefficient rows.
  std::vector<std::vector<std::pair<int, int>>> clusters;
  std::vector<ComplexVector> dirs;
  for (int j = 0; j < c; ++j)
    for (int a = 0; a < r; ++a) {
      const ComplexVector v = rv.row(j * r + a).transpose();
      if (v.norm() <= 1e-9) continue;
      if (in_p[a][j]) return std::nullopt;
      bool placed = false;
      for (std::size_t q = 0; q < dirs.size() && !placed; ++q)
        if (parallel(dirs[q], v, 1e-8)) {
          clusters[q].push_back({a, j});
          placed = true;
        }
      if (!placed) {
        dirs.push_back(v.normalized());
        clusters.push_back({{a, j}});
      }
    }
  if (static_cast<Eigen::Index>(clusters.size()) != k) return std::nullopt;
  ComplexMatrix w(k, k);
  for (Eigen::Index q = 0; q < k; ++q) w.row(q) = dirs[static_cast<std::size_t>(q)].transpose();
  Eigen::FullPivLU<ComplexMatrix> lu(w);
  if (lu.rank() < k) return std::nullopt;
  std::vector<ComplexMatrix> ops;
  struct Rect {
    std::vector<int> rows, cols;
  };
  std::vector<Rect> rects;
  for (Eigen::Index q = 0; q < k; ++q) {
    ComplexVector e = ComplexVector::Zero(k);
    e(q) = 1.0;
    ops.push_back(unvec(rv * lu.solve(e), r, c));
    Rect rc;
    for (const auto& [a, j] : clusters[static_cast<std::size_t>(q)]) {
      rc.rows.push_back(a);
      rc.cols.push_back(j);
    }
    for (auto* v : {&rc.rows, &rc.cols}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    rects.push_back(rc);
  }

  // Union of the pattern part and the bounding rectangles must be a staircase after permutation.
  std::vector<std::vector<bool>> u = in_p;
  std::vector<int> rect_of_col(static_cast<std::size_t>(c), -1), rect_of_row(static_cast<std::size_t>(r), -1);
  for (std::size_t q = 0; q < rects.size(); ++q) {
    for (int a : rects[q].rows) {
      if (rect_of_row[a] >= 0) return std::nullopt;
      rect_of_row[a] = static_cast<int>(q);
      for (int j : rects[q].cols) {
        if (in_p[a][j]) return std::nullopt;
        u[a][j] = true;
      }
    }
    for (int j : rects[q].cols) {
      if (rect_of_col[j] >= 0) return std::nullopt;
      rect_of_col[j] = static_cast<int>(q);
    }
  }
  std::vector<int> height(static_cast<std::size_t>(c), 0);
  for (int j = 0; j < c; ++j)
    for (int a = 0; a < r; ++a) height[j] += u[a][j] ? 1 : 0;
  LocalRecognition out;
  out.col_order.resize(static_cast<std::size_t>(c));
  std::iota(out.col_order.begin(), out.col_order.end(), 0);
  std::stable_sort(out.col_order.begin(), out.col_order.end(), [&](int x, int y) {
    if (height[x] != height[y]) return height[x] < height[y];
    return (rect_of_col[x] >= 0) > (rect_of_col[y] >= 0);
  });
  std::vector<bool> placed(static_cast<std::size_t>(r), false);
  for (int j : out.col_order) {
    std::vector<int> fresh;
    for (int a = 0; a < r; ++a)
      if (u[a][j] && !placed[a]) fresh.push_back(a);
    std::stable_sort(fresh.begin(), fresh.end(), [&](int x, int y) { return (rect_of_row[x] >= 0) < (rect_of_row[y] >= 0); });
    for (int a : fresh) {
      placed[a] = true;
      out.row_order.push_back(a);
    }
  }
  for (int a = 0; a < r; ++a)
    if (!placed[a]) out.row_order.push_back(a);

  std::vector<int> rpos(static_cast<std::size_t>(r)), cpos(static_cast<std::size_t>(c));
  for (int i = 0; i < r; ++i) rpos[out.row_order[i]] = i;
  for (int j = 0; j < c; ++j) cpos[out.col_order[j]] = j;
  std::vector<int> dom = {0, c}, cod = {0, r};
  std::vector<int> hs;
  for (int j = 0; j < c; ++j) hs.push_back(height[out.col_order[j]]);
  for (int j = 0; j + 1 < c; ++j)
    if (hs[j] != hs[j + 1]) dom.push_back(j + 1);
  for (int h : hs) cod.push_back(h);
  struct Span {
    int row_lo, row_hi, col_lo, col_hi;
  };
  std::vector<Span> spans;
  for (const auto& rc : rects) {
    Span sp{r, -1, c, -1};
    for (int a : rc.rows) sp.row_lo = std::min(sp.row_lo, rpos[a]), sp.row_hi = std::max(sp.row_hi, rpos[a] + 1);
    for (int j : rc.cols) sp.col_lo = std::min(sp.col_lo, cpos[j]), sp.col_hi = std::max(sp.col_hi, cpos[j] + 1);
    if (sp.row_hi - sp.row_lo != static_cast<int>(rc.rows.size()) || sp.col_hi - sp.col_lo != static_cast<int>(rc.cols.size()))
      return std::nullopt;
    dom.push_back(sp.col_lo);
    dom.push_back(sp.col_hi);
    cod.push_back(sp.row_lo);
    cod.push_back(sp.row_hi);
    spans.push_back(sp);
  }
  for (auto* v : {&dom, &cod}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  TriConstSpec spec;
  spec.outer.domain_nest = dom;
  spec.outer.codomain_nest = cod;
  spec.outer.order_map = {0};
  for (std::size_t j = 1; j < dom.size(); ++j) {
    const int h = hs[static_cast<std::size_t>(dom[j] - 1)];
    const auto it = std::find(cod.begin(), cod.end(), h);
    if (it == cod.end()) return std::nullopt;
    spec.outer.order_map.push_back(static_cast<int>(it - cod.begin()));
  }
  for (std::size_t q = 0; q < spans.size(); ++q) {
    const auto it = std::find(dom.begin(), dom.end(), spans[q].col_hi);
    if (it == dom.begin() || it == dom.end() || *(it - 1) != spans[q].col_lo) return std::nullopt;
    TriConstAtom atom;
    atom.domain_interval = static_cast<int>(it - dom.begin());
    atom.op = ComplexMatrix(spans[q].row_hi - spans[q].row_lo, spans[q].col_hi - spans[q].col_lo);
    for (int i = spans[q].row_lo; i < spans[q].row_hi; ++i)
      for (int j = spans[q].col_lo; j < spans[q].col_hi; ++j)
        atom.op(i - spans[q].row_lo, j - spans[q].col_lo) = ops[q](out.row_order[i], out.col_order[j]);
    atom.op = canonical_operator(atom.op);
    spec.atoms.push_back(atom);
  }
  try {
    spec.validate();
    const auto blk = [&](const TriConstAtom& a) { return spec.block_of(a); };
    for (std::size_t q = 0; q < spans.size(); ++q) {
      const auto bo = blk(spec.atoms[q]);
      if (bo.row_lo != spans[q].row_lo || bo.row_hi != spans[q].row_hi) return std::nullopt;
    }
    if (!subspace_equal(build_tri_const(spec), permuted(b, out.row_order, out.col_order), 1e-7)) return std::nullopt;
  } catch (const InputError&) {
    return std::nullopt;
  }
  out.kind = BlockKind::tri_const;
  out.spec = spec;
  return out;
}

LocalRecognition recognize_block(const MatrixSubspace& b, const StructureOptions& opts) {
  LocalRecognition out;
  const int r = static_cast<int>(b.d_out()), c = static_cast<int>(b.d_in());
  out.row_order.resize(static_cast<std::size_t>(r));
  out.col_order.resize(static_cast<std::size_t>(c));
  std::iota(out.row_order.begin(), out.row_order.end(), 0);
  std::iota(out.col_order.begin(), out.col_order.end(), 0);
  if (r == 0 || c == 0 || b.is_full()) {
    out.kind = BlockKind::full;
    out.spec = FullBlock{};
    return out;
  }
  if (b.dim() == 0) {
    out.kind = BlockKind::zero;
    out.spec = ZeroBlock{};
    return out;
  }
  if (b.dim() == 1) {
    out.kind = BlockKind::one_dimensional;
    out.spec = OneDimBlock{canonical_operator(b.basis_element(0))};
    return out;
  }
  if (is_pattern_space(b)) {
    const TotalOrderResult t = total_order_check(b, opts);
    if (t.is_nest_bimodule && t.spec) {
      out.kind = BlockKind::nest_bimodule;
      out.spec = *t.spec;
      out.row_order = t.row_order;
      out.col_order = t.col_order;
    }
    return out;
  }
  if (auto tc = recognize_tri_const(b)) return *tc;
  const TotalOrderResult t = total_order_check(b, opts);
  if (t.is_nest_bimodule) out.kind = BlockKind::nest_bimodule;  // nest in a rotated basis; no coordinate presentation
  return out;
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(static_cast<std::size_t>(n)) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

/// The part of S on the given cells (others zeroed), as a subspace.
Eigen::Index restricted_dim(const MatrixSubspace& s, const std::vector<std::vector<bool>>& cells) {
  ComplexMatrix v = s.vec_basis();
  for (Eigen::Index b = 0; b < s.d_in(); ++b)
    for (Eigen::Index a = 0; a < s.d_out(); ++a)
      if (!cells[a][b]) v.row(b * s.d_out() + a).setZero();
  return numerical_rank(v, 1e-9);
}

}  // namespace

StructureReport detect_structure(const MatrixSubspace& s, const StructureOptions& opts) {
  opts.validate();
  StructureReport rep;
  rep.commutation = q_commutation_report(s, opts);
  const int rows = static_cast<int>(s.d_out()), cols = static_cast<int>(s.d_in());

  // Rows and columns joined by every matrix unit missing from S.
  UnionFind uf(rows + cols);
  std::vector<std::vector<bool>> missing(static_cast<std::size_t>(rows), std::vector<bool>(static_cast<std::size_t>(cols)));
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b) {
      missing[a][b] = !unit_in(s, a, b);
      if (missing[a][b]) uf.unite(a, rows + b);
    }
  std::vector<bool> isolated(static_cast<std::size_t>(rows + cols), true);
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b)
      if (missing[a][b]) isolated[a] = isolated[rows + b] = false;
  // Isolated rows and columns form one free block; every other component is a block.
  for (int i = 0; i < rows + cols; ++i)
    if (isolated[i]) uf.unite(i, rows + cols - 1 >= 0 ? [&] {
        for (int k = 0; k < rows + cols; ++k)
          if (isolated[k]) return k;
        return i;
      }() : i);

  auto collect = [&]() {
    std::map<int, std::pair<std::vector<int>, std::vector<int>>> groups;
    for (int a = 0; a < rows; ++a) groups[uf.find(a)].first.push_back(a);
    for (int b = 0; b < cols; ++b) groups[uf.find(rows + b)].second.push_back(b);
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    for (auto& [k, v] : groups) out.push_back(v);
    return out;
  };
  auto cells_of = [&](const std::vector<std::pair<std::vector<int>, std::vector<int>>>& blocks,
                      const std::vector<std::size_t>& which) {
    std::vector<std::vector<bool>> cells(static_cast<std::size_t>(rows), std::vector<bool>(static_cast<std::size_t>(cols), false));
    for (std::size_t w : which)
      for (int a : blocks[w].first)
        for (int b : blocks[w].second) cells[a][b] = true;
    return cells;
  };

  // Merge blocks whose diagonal parts are coupled inside S.
  for (bool changed = true; changed;) {
    changed = false;
    const auto blocks = collect();
    std::vector<Eigen::Index> own(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) own[i] = restricted_dim(s, cells_of(blocks, {i}));
    for (std::size_t i = 0; i < blocks.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < blocks.size() && !changed; ++j)
        if (restricted_dim(s, cells_of(blocks, {i, j})) < own[i] + own[j]) {
          const int ri = blocks[i].first.empty() ? rows + blocks[i].second[0] : blocks[i].first[0];
          const int rj = blocks[j].first.empty() ? rows + blocks[j].second[0] : blocks[j].first[0];
          uf.unite(ri, rj);
          changed = true;
        }
  }

  bool all_known = true, have_obstruction = false, have_specs = true;
  for (const auto& [brows, bcols] : collect()) {
    BlockVerdict bv;
    const MatrixSubspace local = compress_to_bases(s, coordinate_basis(bcols, cols), coordinate_basis(brows, rows));
    if (brows.empty() || bcols.empty()) {
      bv.kind = BlockKind::full;
      bv.spec = FullBlock{};
      bv.rows = brows;
      bv.cols = bcols;
    } else {
      const LocalRecognition lr = recognize_block(local, opts);
      bv.kind = lr.kind;
      bv.spec = lr.spec;
      for (int i : lr.row_order) bv.rows.push_back(brows[static_cast<std::size_t>(i)]);
      for (int j : lr.col_order) bv.cols.push_back(bcols[static_cast<std::size_t>(j)]);
      if (bv.kind == BlockKind::unresolved) {
        if (auto w = find_obstruction(local, opts)) {
          bv.kind = BlockKind::obstruction;
          bv.obstruction = lift(*w, coordinate_basis(bcols, cols), coordinate_basis(brows, rows));
        }
      }
    }
    if (bv.kind == BlockKind::obstruction) {
      have_obstruction = true;
      if (!rep.witness) rep.witness = bv.obstruction;
    }
    if (bv.kind == BlockKind::unresolved) all_known = false;
    if (!bv.spec) have_specs = false;
    rep.codomain_partition.push_back(bv.rows);
    rep.domain_partition.push_back(bv.cols);
    rep.blocks.push_back(std::move(bv));
  }

  if (have_obstruction) {
    rep.verdict = GlobalVerdict::not_one_hyperreflexive;
  } else if (!all_known) {
    rep.verdict = GlobalVerdict::inconclusive;
    rep.note = "a block is neither recognized nor obstructed";
  } else {
    rep.verdict = GlobalVerdict::one_hyperreflexive_consistent;
    if (have_specs) {
      DiagConstSpec d;
      d.d_out = rows;
      d.d_in = cols;
      d.codomain_partition = rep.codomain_partition;
      d.domain_partition = rep.domain_partition;
      for (const auto& b : rep.blocks) d.blocks.push_back(*b.spec);
      if (subspace_equal(build_diag_const(d), s, 1e-7)) {
        rep.presentation = d;
      } else {
        rep.verdict = GlobalVerdict::inconclusive;
        rep.note = "block presentation does not rebuild the input";
      }
    } else {
      rep.note = "nest block in a non-coordinate basis; no coordinate presentation";
    }
  }
  if (rep.verdict == GlobalVerdict::one_hyperreflexive_consistent && rep.commutation.any_violation()) {
    rep.diagnostics_consistent = false;
    rep.note += (rep.note.empty() ? "" : "; ") + std::string("range-projection pair violates the rank-two form");
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Unital algebras

AlgebraClassification unital_algebra_classify(const MatrixSubspace& a, const StructureOptions& opts) {
  opts.validate();
  const Eigen::Index n = a.d_out();
  if (a.d_in() != n) throw InputError("unital_algebra_classify: algebra must be square");
  if (!contains(a, ComplexMatrix::Identity(n, n), 1e-7)) throw InputError("unital_algebra_classify: I is not in A");
  for (const auto& x : a.basis())
    for (const auto& y : a.basis())
      if (!contains(a, x * y, 1e-7)) throw InputError("unital_algebra_classify: A is not closed under multiplication");

  AlgebraClassification out;
  auto same_order = [](const std::vector<int>& r, const std::vector<int>& c) { return r == c; };
  // Case 1: a nest algebra with some atoms cut down to scalars, in one coordinate order.
  if (is_pattern_space(a)) {
    const TotalOrderResult t = total_order_check(a, opts);
    if (t.is_nest_bimodule && t.spec && same_order(t.row_order, t.col_order) &&
        t.spec->domain_nest == t.spec->codomain_nest) {
      out.verdict = AlgebraCase::nest_with_scalar_atoms;
      out.label = "case 1";
      out.nest = TriConstSpec{*t.spec, {}};
      out.order = t.row_order;
      return out;
    }
  } else if (auto tc = recognize_tri_const(a)) {
    const auto& spec = std::get<TriConstSpec>(*tc->spec);
    bool scalar_atoms = same_order(tc->row_order, tc->col_order);
    for (const auto& atom : spec.atoms) {
      if (atom.op.rows() != atom.op.cols()) {
        scalar_atoms = false;
        break;
      }
      const ComplexMatrix id = ComplexMatrix::Identity(atom.op.rows(), atom.op.cols()) / std::sqrt(static_cast<double>(atom.op.rows()));
      scalar_atoms = scalar_atoms && (atom.op - id).norm() <= 1e-7;
    }
    if (scalar_atoms) {
      out.verdict = AlgebraCase::nest_with_scalar_atoms;
      out.label = "case 1";
      out.nest = spec;
      out.order = tc->row_order;
      return out;
    }
  }

  const StructureReport rep = detect_structure(a, opts);
  if (rep.verdict == GlobalVerdict::not_one_hyperreflexive) {
    out.verdict = AlgebraCase::not_one_hyperreflexive;
    out.label = "not 1-hyperreflexive";
    out.witness = rep.witness;
    return out;
  }
  // Case 2: two zero blocks P x P^perp and P^perp x P, i.e. A = B(PH) + B(P^perp H).
  if (rep.verdict == GlobalVerdict::one_hyperreflexive_consistent) {
    std::vector<std::size_t> zeros;
    for (std::size_t i = 0; i < rep.blocks.size(); ++i)
      if (rep.blocks[i].kind == BlockKind::zero) zeros.push_back(i);
    auto sorted = [](std::vector<int> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    if (zeros.size() == 2 && rep.blocks.size() == 2) {
      const auto& b0 = rep.blocks[zeros[0]];
      const auto& b1 = rep.blocks[zeros[1]];
      if (sorted(b0.rows) == sorted(b1.cols) && sorted(b1.rows) == sorted(b0.cols)) {
        ComplexMatrix p = ComplexMatrix::Zero(n, n);
        for (int i : b0.rows) p(i, i) = 1.0;
        out.verdict = AlgebraCase::two_block_sum;
        out.label = "case 2";
        out.projection = p;
        return out;
      }
    }
  }
  out.verdict = AlgebraCase::inconclusive;
  out.label = "inconclusive";
  out.note = rep.note.empty() ? "no unital presentation found" : rep.note;
  return out;
}

// ---------------------------------------------------------------------------------------------
// Serialization

nlohmann::json witness_to_json(const ObstructionWitness& w) {
  nlohmann::json j;
  j["kind"] = w.kind;
  j["domain_basis"] = matrix_to_json(w.domain_basis);
  j["codomain_basis"] = matrix_to_json(w.codomain_basis);
  j["compressed"] = subspace_to_json(w.compressed);
  j["test"] = matrix_to_json(w.test);
  j["dist_lower"] = w.dist.lower;
  j["dist_upper"] = w.dist.upper;
  j["beta_estimate"] = w.beta.estimate;
  j["beta_upper"] = std::isfinite(w.beta.upper) ? nlohmann::json(w.beta.upper) : nlohmann::json("inf");
  j["certified_ratio"] = std::isfinite(w.certified_ratio) ? nlohmann::json(w.certified_ratio) : nlohmann::json("inf");
  return j;
}

nlohmann::json structure_report_to_json(const MatrixSubspace& s, const StructureReport& r) {
  nlohmann::json j = subspace_to_json(s);
  j["verdict"] = to_string(r.verdict);
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : r.blocks) {
    nlohmann::json jb{{"kind", to_string(b.kind)}, {"rows", b.rows}, {"cols", b.cols}};
    if (b.spec) {
      if (const auto* o = std::get_if<OneDimBlock>(&*b.spec)) jb["operator"] = matrix_to_json(o->op);
      if (const auto* nb = std::get_if<NestBimoduleSpec>(&*b.spec))
        jb["nest"] = {{"domain_nest", nb->domain_nest}, {"codomain_nest", nb->codomain_nest}, {"order_map", nb->order_map}};
      if (const auto* tc = std::get_if<TriConstSpec>(&*b.spec)) {
        jb["nest"] = {{"domain_nest", tc->outer.domain_nest},
                      {"codomain_nest", tc->outer.codomain_nest},
                      {"order_map", tc->outer.order_map}};
        nlohmann::json atoms = nlohmann::json::array();
        for (const auto& at : tc->atoms) atoms.push_back({{"domain_interval", at.domain_interval}, {"operator", matrix_to_json(at.op)}});
        jb["atoms"] = atoms;
      }
    }
    if (b.obstruction) jb["obstruction"] = witness_to_json(*b.obstruction);
    blocks.push_back(jb);
  }
  j["blocks"] = blocks;
  j["codomain_partition"] = r.codomain_partition;
  j["domain_partition"] = r.domain_partition;
  if (r.witness) j["witness"] = witness_to_json(*r.witness);
  j["commutation"] = {{"samples", r.commutation.samples},
                      {"all_commute", r.commutation.all_commute},
                      {"noncommuting_pairs", r.commutation.pairs.size()},
                      {"violations", r.commutation.any_violation()}};
  j["diagnostics_consistent"] = r.diagnostics_consistent;
  j["note"] = r.note;
  return j;
}

}  // namespace hyperreflex
