#include "hyperreflex/catalog.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace hyperreflex {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

void check_nest(const std::vector<int>& nest, const char* which) {
  if (nest.size() < 2) throw InputError(std::string(which) + " nest needs at least 0 and the top");
  if (nest.front() != 0) throw InputError(std::string(which) + " nest must start at 0");
  for (std::size_t i = 1; i < nest.size(); ++i)
    if (nest[i] <= nest[i - 1]) throw InputError(std::string(which) + " nest must be strictly increasing");
}

MatrixSubspace from_mask(const std::vector<std::vector<bool>>& mask, int d_out, int d_in) {
  std::vector<ComplexMatrix> gens;
  for (int b = 0; b < d_in; ++b)
    for (int a = 0; a < d_out; ++a)
      if (mask[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])
        gens.push_back(matrix_unit(d_out, d_in, a, b));
  return MatrixSubspace::from_spanning_set(gens, d_out, d_in);
}

}  // namespace

void NestBimoduleSpec::validate() const {
  check_nest(domain_nest, "domain");
  check_nest(codomain_nest, "codomain");
  if (order_map.size() != domain_nest.size())
    throw InputError("order map must have one entry per domain nest index");
  const int q = static_cast<int>(codomain_nest.size()) - 1;
  for (std::size_t j = 0; j < order_map.size(); ++j) {
    if (order_map[j] < 0 || order_map[j] > q) throw InputError("order map value out of range");
    if (j > 0 && order_map[j] < order_map[j - 1]) throw InputError("order map must be monotone");
  }
}

std::vector<std::vector<bool>> NestBimoduleSpec::mask() const {
  validate();
  std::vector<std::vector<bool>> m(static_cast<std::size_t>(d_out()),
                                   std::vector<bool>(static_cast<std::size_t>(d_in()), false));
  for (std::size_t j = 1; j < domain_nest.size(); ++j) {
    const int row_limit = codomain_nest[static_cast<std::size_t>(order_map[j])];
    for (int b = domain_nest[j - 1]; b < domain_nest[j]; ++b)
      for (int a = 0; a < row_limit; ++a) m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
  }
  return m;
}

TriConstSpec::Block TriConstSpec::block_of(const TriConstAtom& atom) const {
  const int j = atom.domain_interval;
  const int i = outer.order_map[static_cast<std::size_t>(j)];
  return {outer.codomain_nest[static_cast<std::size_t>(i - 1)], outer.codomain_nest[static_cast<std::size_t>(i)],
          outer.domain_nest[static_cast<std::size_t>(j - 1)], outer.domain_nest[static_cast<std::size_t>(j)]};
}

void TriConstSpec::validate() const {
  outer.validate();
  std::set<int> seen;
  const int p = static_cast<int>(outer.domain_nest.size()) - 1;
  for (const auto& atom : atoms) {
    const int j = atom.domain_interval;
    if (j < 1 || j > p) throw InputError("tri_const atom: domain interval out of range");
    if (!seen.insert(j).second) throw InputError("tri_const atoms must be distinct");
    const int th = outer.order_map[static_cast<std::size_t>(j)];
    // The block A_theta(j) x B_j must be a removable corner of the staircase.
    if (th < 1 || outer.order_map[static_cast<std::size_t>(j - 1)] >= th)
      throw InputError("tri_const atom " + std::to_string(j) + " is not a corner of the bimodule");
    const Block blk = block_of(atom);
    if (atom.op.rows() != blk.row_hi - blk.row_lo || atom.op.cols() != blk.col_hi - blk.col_lo)
      throw InputError("tri_const atom " + std::to_string(j) + ": operator has the wrong block shape");
    require_finite(atom.op, "tri_const atom operator");
  }
}

MatrixSubspace build_nest_bimodule(const NestBimoduleSpec& spec) {
  return from_mask(spec.mask(), spec.d_out(), spec.d_in());
}

MatrixSubspace build_tri_const(const TriConstSpec& spec) {
  spec.validate();
  auto mask = spec.outer.mask();
  const int d_out = spec.outer.d_out();
  const int d_in = spec.outer.d_in();
  std::vector<ComplexMatrix> extra;
  for (const auto& atom : spec.atoms) {
    const auto blk = spec.block_of(atom);
    for (int a = blk.row_lo; a < blk.row_hi; ++a)
      for (int b = blk.col_lo; b < blk.col_hi; ++b) mask[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = false;
    if (atom.op.norm() == 0.0) continue;
    ComplexMatrix e = ComplexMatrix::Zero(d_out, d_in);
    e.block(blk.row_lo, blk.col_lo, atom.op.rows(), atom.op.cols()) = atom.op;
    extra.push_back(e);
  }
  std::vector<ComplexMatrix> gens = from_mask(mask, d_out, d_in).basis();
  gens.insert(gens.end(), extra.begin(), extra.end());
  return MatrixSubspace::from_spanning_set(gens, d_out, d_in);
}

namespace {

std::pair<int, int> block_shape(const BlockSpec& block) {
  if (const auto* n = std::get_if<NestBimoduleSpec>(&block)) return {n->d_out(), n->d_in()};
  if (const auto* t = std::get_if<TriConstSpec>(&block)) return {t->outer.d_out(), t->outer.d_in()};
  if (const auto* o = std::get_if<OneDimBlock>(&block))
    return {static_cast<int>(o->op.rows()), static_cast<int>(o->op.cols())};
  return {-1, -1};  // Full and Zero adapt to any shape
}

void check_partition(const std::vector<std::vector<int>>& part, int n, const char* which) {
  std::vector<int> hits(static_cast<std::size_t>(n), 0);
  for (const auto& set : part)
    for (int i : set) {
      if (i < 0 || i >= n) throw InputError(std::string(which) + " partition index out of range");
      ++hits[static_cast<std::size_t>(i)];
    }
  for (int h : hits)
    if (h != 1) throw InputError(std::string(which) + " partition must be disjoint and exhaustive");
}

}  // namespace

void DiagConstSpec::validate() const {
  if (d_out <= 0 || d_in <= 0) throw InputError("diag_const: dimensions must be positive");
  if (domain_partition.size() != codomain_partition.size() || blocks.size() != domain_partition.size())
    throw InputError("diag_const: partitions and blocks must have equal counts");
  check_partition(domain_partition, d_in, "domain");
  check_partition(codomain_partition, d_out, "codomain");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto [r, c] = block_shape(blocks[i]);
    if (r >= 0 && (r != static_cast<int>(codomain_partition[i].size()) ||
                   c != static_cast<int>(domain_partition[i].size())))
      throw InputError("diag_const: block " + std::to_string(i) + " shape does not match its partition sets");
  }
}

MatrixSubspace build_block(const BlockSpec& block, int d_out, int d_in) {
  if (std::holds_alternative<FullBlock>(block)) return MatrixSubspace::full(d_out, d_in);
  if (std::holds_alternative<ZeroBlock>(block)) return MatrixSubspace(d_out, d_in);
  if (const auto* n = std::get_if<NestBimoduleSpec>(&block)) return build_nest_bimodule(*n);
  if (const auto* t = std::get_if<TriConstSpec>(&block)) return build_tri_const(*t);
  return one_dimensional(std::get<OneDimBlock>(block).op);
}

MatrixSubspace build_diag_const(const DiagConstSpec& spec) {
  spec.validate();
  std::vector<ComplexMatrix> gens;
  const std::size_t nb = spec.blocks.size();
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      if (i == j) continue;
      for (int a : spec.codomain_partition[i])
        for (int b : spec.domain_partition[j]) gens.push_back(matrix_unit(spec.d_out, spec.d_in, a, b));
    }
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& rows = spec.codomain_partition[i];
    const auto& cols = spec.domain_partition[i];
    if (rows.empty() || cols.empty()) continue;
    const MatrixSubspace sub =
        build_block(spec.blocks[i], static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (const auto& b : sub.basis()) {
      ComplexMatrix e = ComplexMatrix::Zero(spec.d_out, spec.d_in);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
          e(rows[r], cols[c]) = b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      gens.push_back(e);
    }
  }
  return MatrixSubspace::from_spanning_set(gens, spec.d_out, spec.d_in);
}

MatrixSubspace family_22(double r, double s) {
  if (!(r >= 0.0) || !(s >= 0.0)) throw InputError("family_22: r and s must be nonnegative");
  ComplexMatrix a(2, 2), b(2, 2);
  a << 1.0, r, 0.0, 0.0;
  b << 0.0, s, 0.0, 1.0;
  return MatrixSubspace::from_spanning_set({a, b}, 2, 2);
}

MatrixSubspace pattern_space(const std::vector<std::vector<bool>>& support) {
  if (support.empty() || support.front().empty()) throw InputError("pattern_space: empty support");
  const int rows = static_cast<int>(support.size());
  const int cols = static_cast<int>(support.front().size());
  for (const auto& row : support)
    if (static_cast<int>(row.size()) != cols) throw InputError("pattern_space: ragged support");
  return from_mask(support, rows, cols);
}

MatrixSubspace diagonal_masa(int n) {
  std::vector<std::vector<bool>> m(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = true;
  return pattern_space(m);
}

MatrixSubspace scalars(int n) {
  return MatrixSubspace::from_spanning_set({ComplexMatrix::Identity(n, n)}, n, n);
}

MatrixSubspace upper_triangular(int n) {
  NestBimoduleSpec spec;
  for (int i = 0; i <= n; ++i) {
    spec.domain_nest.push_back(i);
    spec.codomain_nest.push_back(i);
    spec.order_map.push_back(i);
  }
  return build_nest_bimodule(spec);
}

MatrixSubspace one_dimensional(const ComplexMatrix& t) {
  require_finite(t, "one_dimensional");
  return MatrixSubspace::from_spanning_set({t}, t.rows(), t.cols());
}

namespace {

/// ||M v - <M v, v> v||^2 over v(p) = (0, cos a, sin a e^{i phi}). Every first and second partial of v
/// has norm <= 1, which gives curvature 20 ||M||^2 for this quartic.
ParametricPiece vector_family_piece(const std::string& name, const ComplexMatrix& m) {
  ParametricPiece piece;
  piece.name = name;
  piece.lo = RealVector::Zero(2);
  piece.hi = RealVector(2);
  piece.hi << std::numbers::pi / 2, 2 * std::numbers::pi;
  piece.value_sq = [m](const RealVector& p) {
    ComplexVector v(3);
    v << 0.0, std::cos(p(0)), std::sin(p(0)) * std::polar(1.0, p(1));
    const ComplexVector mv = m * v;
    return (mv - v.dot(mv) * v).squaredNorm();
  };
  const double mn = operator_norm(m);
  piece.curvature = 20.0 * mn * mn;
  return piece;
}

ParametricPiece point_piece(const std::string& name, const ComplexMatrix& m, const ComplexVector& v) {
  ParametricPiece piece;
  piece.name = name;
  piece.lo = RealVector(0);
  piece.hi = RealVector(0);
  piece.value_sq = [m, v](const RealVector&) {
    const ComplexVector mv = m * v;
    return (mv - v.dot(mv) * v).squaredNorm();
  };
  return piece;
}

}  // namespace

std::vector<ParametricPiece> diag_abb_lattice_pieces(const ComplexMatrix& t) {
  if (t.rows() != 3 || t.cols() != 3) throw InputError("diag_abb_lattice_pieces: operator must be 3x3");
  const ComplexMatrix ta = t.adjoint();
  const ComplexVector e1 = ComplexVector::Unit(3, 0);
  // Rank-one invariant P = v v^*: ||P^perp T v||. Corank-one P = I - w w^*: ||(I - w w^*) T^* w||.
  return {vector_family_piece("rank1:(0,u)", t), vector_family_piece("corank1:(0,u)", ta),
          point_piece("rank1:e1", t, e1), point_piece("corank1:e1", ta, e1)};
}

ComplexVector PropTwoScene::witness_vector() const {
  ComplexVector v(3);
  v << 0.0, std::sqrt(1.0 - witness_s * witness_s), witness_s;
  return v;
}

PropTwoScene prop_two_scene() {
  PropTwoScene scene;
  ComplexMatrix d1 = ComplexMatrix::Zero(3, 3), d2 = ComplexMatrix::Zero(3, 3);
  d1(0, 0) = 1.0;
  d2(1, 1) = 1.0;
  d2(2, 2) = 1.0;
  scene.space = MatrixSubspace::from_spanning_set({d1, d2}, 3, 3);
  scene.space.set_labels({"diag(1,0,0)", "diag(0,1,1)"});
  scene.test = ComplexMatrix::Zero(3, 3);
  scene.test(0, 2) = kSqrt2;
  scene.test(1, 0) = -kSqrt2;
  scene.test(1, 1) = -1.0;
  scene.test(2, 2) = 1.0;
  scene.witness_s = std::sqrt(3.0) / 2.0;
  scene.pieces = diag_abb_lattice_pieces;
  return scene;
}

double kappa103_psi(double x, double y) {
  const double a = std::sin(std::numbers::pi / 8);
  const double b = std::cos(std::numbers::pi / 8);
  const double u = (x + y) * (a * x - b * y);
  const double w = y * (b * x + a * y);
  return 0.5 * u * u + w * w;
}

std::pair<double, double> kappa103_k() {
  // psi(-x,-y) = psi(x,y): scanning [0, pi) covers the circle.
  const int n = 20000;
  double best_t = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = std::numbers::pi * i / n;
    const double v = kappa103_psi(std::cos(t), std::sin(t));
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  const double h = std::numbers::pi / n;
  auto f = [](double t) { return kappa103_psi(std::cos(t), std::sin(t)); };
  const auto r = boost::math::tools::brent_find_minima(f, best_t - h, best_t + h, 52);
  return {r.second, r.first};
}

Kappa103Scene kappa103_scene() {
  Kappa103Scene sc;
  sc.alpha = std::sin(std::numbers::pi / 8);
  sc.beta = std::cos(std::numbers::pi / 8);
  const double al = sc.alpha, be = sc.beta;
  // H = C^4 = K + K^perp with K = span{e1, e2}; H + H ordered as (H x u1, H x u2).
  const ComplexMatrix i4 = ComplexMatrix::Identity(4, 4);
  ComplexMatrix top = ComplexMatrix::Zero(8, 4), bottom = ComplexMatrix::Zero(8, 4);
  top.topRows(4) = i4;
  bottom.bottomRows(4) = i4;
  sc.space = MatrixSubspace::from_spanning_set({top, bottom}, 8, 4);
  sc.space.set_labels({"I (x) u1", "I (x) u2"});

  ComplexMatrix t1(2, 2), t2(2, 2);
  t1 << al, -be, al, -be;
  t1 /= kSqrt2;
  t2 << 0.0, 0.0, be, al;
  sc.test = ComplexMatrix::Zero(8, 4);
  sc.test.block(0, 0, 2, 2) = t1;
  sc.test.block(4, 0, 2, 2) = t2;

  sc.domain_basis = ComplexMatrix::Zero(4, 2);
  sc.domain_basis(0, 0) = 1.0;
  sc.domain_basis(1, 1) = 1.0;
  sc.codomain_basis = ComplexMatrix::Zero(8, 2);
  sc.codomain_basis(0, 0) = 1.0 / kSqrt2;  // f1 = (e1 + e2)/sqrt2 (x) u1
  sc.codomain_basis(1, 0) = 1.0 / kSqrt2;
  sc.codomain_basis(5, 1) = 1.0;  // f2 = e2 (x) u2
  sc.p = sc.domain_basis * sc.domain_basis.adjoint();
  sc.q = sc.codomain_basis * sc.codomain_basis.adjoint();

  // beta(T)^2 = sup over r in [0,1], real unit (x, y) of r^2 - r^4 psi(x, y).
  // With |psi| <= 2 and psi a degree-4 trigonometric polynomial, |psi'| <= 8 and |psi''| <= 32,
  // so every second partial of the piece is bounded by 32.
  ParametricPiece piece;
  piece.name = "r^2 - r^4 psi(cos t, sin t)";
  piece.lo = RealVector::Zero(2);
  piece.hi = RealVector(2);
  piece.hi << 1.0, 2 * std::numbers::pi;
  piece.value_sq = [](const RealVector& p) {
    const double r2 = p(0) * p(0);
    return r2 - r2 * r2 * kappa103_psi(std::cos(p(1)), std::sin(p(1)));
  };
  piece.curvature = 32.0;
  sc.pieces = {piece};
  return sc;
}

SmallSScene small_s_scene(double s) {
  if (!(s > 0.0) || s > 1.0) throw InputError("small_s_scene: s must lie in (0, 1]");
  SmallSScene sc;
  sc.s = s;
  std::vector<ComplexMatrix> gens;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      ComplexMatrix e = ComplexMatrix::Zero(6, 6);
      e(p, q) = 1.0;
      e(2 + p, 2 + q) = s;
      gens.push_back(e);
    }
  sc.space = MatrixSubspace::from_spanning_set(gens, 6, 6);

  // K = C^2 with e1, e2 the standard basis and f = e1. Block (i, j) occupies rows 2i.., cols 2j...
  sc.a = ComplexMatrix::Zero(6, 6);
  sc.a(1, 0) = -1.0;                // A_11 = -e2 f^*
  sc.a(0, 2) = 1.0 / kSqrt2;        // A_12 = e1 f^* / sqrt2
  sc.a(3, 2) = 1.0 / kSqrt2;        // A_22 = e2 f^* / sqrt2
  ComplexMatrix psi = ComplexMatrix::Zero(6, 6);
  const double den = s + kSqrt2;
  psi(0, 1) = -s / den;   // psi_11 = -s/(s+sqrt2) f e2^*
  psi(2, 0) = 1.0 / den;  // psi_21 = f e1^* / (s+sqrt2)
  psi(2, 3) = 1.0 / den;  // psi_22 = f e2^* / (s+sqrt2)
  // The printed functional acts by T -> tr(psi T); in the tr(phi^dagger T) pairing it is psi^dagger.
  sc.psi = Functional(psi.adjoint());

  // g vanishes unless the first two blocks of x are parallel; that stratum is
  // x = (cos b u, sin b e^{i chi} u, 0) with u = (cos a, sin a e^{i phi}).
  Stratum st;
  st.name = "parallel first blocks";
  st.lo = RealVector::Zero(4);
  st.hi = RealVector(4);
  st.hi << std::numbers::pi / 2, 2 * std::numbers::pi, std::numbers::pi / 2, 2 * std::numbers::pi;
  st.embed = [](const RealVector& p) {
    ComplexVector u(2);
    u << std::cos(p(0)), std::sin(p(0)) * std::polar(1.0, p(1));
    ComplexVector x = ComplexVector::Zero(6);
    x.segment(0, 2) = std::cos(p(2)) * u;
    x.segment(2, 2) = std::sin(p(2)) * std::polar(1.0, p(3)) * u;
    return x;
  };
  sc.strata = {st};
  return sc;
}

BranchAndBoundResult diag_tensor_beta_sq_bound(const ComplexMatrix& a, double t1, double t2, double abs_tol,
                                               long box_budget, double budget_secs) {
  if (a.rows() != 6 || a.cols() != 6) throw InputError("diag_tensor_beta_sq_bound: operator must be 6 x 6");
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw InputError("diag_tensor_beta_sq_bound: t1 and t2 must be positive");
  const double anorm = operator_norm(a);
  const double generic = std::pow(operator_norm(a.bottomRows(2)), 2);
  // Per cell: ||d/dp (d d^*)|| <= 2 ||dv/dp|| / min |v| for d = v / |v|, v = (t1 cos a, t2 sin a e^{i phi}),
  // with ||dv/da|| <= max(t1, t2) and ||dv/dphi|| <= t2 sin a; ||dL/dp|| <= 1; and
  // |f(p') - f(p)| <= 2 ||A|| ||M(p') - M(p)|| for f = ||M||^2, ||M|| <= ||A||.
  const double tmax = std::max(t1, t2);
  auto min_v = [&](double a_lo, double a_hi) {
    // |v|^2 is monotone in a on [0, pi/2], so its minimum sits at an end of the cell.
    auto vn = [&](double a) { return std::sqrt(std::pow(t1 * std::cos(a), 2) + std::pow(t2 * std::sin(a), 2)); };
    return std::min(vn(a_lo), vn(a_hi));
  };
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  auto value = [&](const RealVector& p) {
    const double ca = std::cos(p(0)), sa = std::sin(p(0));
    const cplx e = std::polar(1.0, p(1));
    ComplexVector d(2);
    d << t1 * ca, t2 * sa * e;
    d.normalize();
    ComplexMatrix r = ComplexMatrix::Identity(6, 6);
    r.topLeftCorner(4, 4) -= kron(d * d.adjoint(), id2);
    ComplexMatrix l = ComplexMatrix::Zero(6, 4);
    l.block(0, 0, 2, 2) = ca * id2;
    l.block(2, 0, 2, 2) = sa * e * id2;
    l.block(4, 2, 2, 2) = id2;
    return std::pow(operator_norm(r * a * l), 2);
  };
  auto bound = [&](const RealVector& c, const RealVector& h) {
    const double f = value(c);
    const double a_lo = std::max(0.0, c(0) - h(0)), a_hi = std::min(std::numbers::pi / 2, c(0) + h(0));
    const double vmin = min_v(a_lo, a_hi);
    const double lip_a = 2.0 * anorm * anorm * (2.0 * tmax / vmin + 1.0);
    const double lip_phi = 2.0 * anorm * anorm * (2.0 * t2 * std::sin(a_hi) / vmin + std::sin(a_hi));
    return BoxBound{f + lip_a * h(0) + lip_phi * h(1), f, c};
  };
  RealVector lo = RealVector::Zero(2), hi(2);
  hi << std::numbers::pi / 2, 2 * std::numbers::pi;
  BranchAndBoundResult res = branch_and_bound(lo, hi, bound, abs_tol, box_budget, budget_secs);
  res.lower = std::max(res.lower, generic);
  res.upper = std::max(res.upper, generic);
  return res;
}

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& id) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError("catalog id '" + id + "': '" + item + "' is not a number");
    }
  }
  return out;
}

int parse_size(const std::string& text, const std::string& id) {
  const auto v = parse_numbers(text, id);
  if (v.size() != 1 || v[0] < 1 || v[0] > 64 || v[0] != std::floor(v[0]))
    throw InputError("catalog id '" + id + "': expected a positive integer size");
  return static_cast<int>(v[0]);
}

}  // namespace

CatalogEntry catalog_lookup(const std::string& id) {
  CatalogEntry e;
  e.id = id;
  const auto colon = id.find(':');
  const std::string head = id.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);

  if (head == "prop-two" || head == "algebra-d") {
    auto sc = prop_two_scene();
    e.description = "the algebra {diag(a,b,b)} in M_3 with its 3x3 test operator";
    e.space = sc.space;
    e.test = sc.test;
    e.hints.seeds = {sc.witness_vector()};
    e.hints.pieces = sc.pieces(sc.test);
    e.pieces = sc.pieces;
    e.kappa_seeds = {sc.test};
  } else if (head == "kappa103") {
    auto sc = kappa103_scene();
    e.description = "C I_4 (x) M_{2,1} with the 8x4 test operator built from sin(pi/8), cos(pi/8)";
    e.space = sc.space;
    e.test = sc.test;
    e.hints.pieces = sc.pieces;
  } else if (head == "small-s") {
    const auto v = parse_numbers(arg.empty() ? "0.1" : arg, id);
    if (v.size() != 1) throw InputError("catalog id '" + id + "': expected small-s:<s>");
    auto sc = small_s_scene(v[0]);
    e.description = "{diag(X, sX, 0) : X in M_2} in M_6 with its unit-norm test operator";
    e.space = sc.space;
    e.test = sc.a;
    e.hints.strata = sc.strata;
  } else if (head == "family22") {
    double r = 0.0, s = 0.0;
    bool has_r = false, has_s = false;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InputError("catalog id '" + id + "': expected r=<r>,s=<s>");
      const auto key = item.substr(0, eq);
      const auto val = parse_numbers(item.substr(eq + 1), id);
      if (val.size() != 1) throw InputError("catalog id '" + id + "': bad value for " + key);
      if (key == "r") r = val[0], has_r = true;
      else if (key == "s") s = val[0], has_s = true;
      else throw InputError("catalog id '" + id + "': unknown parameter '" + key + "'");
    }
    if (!has_r || !has_s) throw InputError("catalog id '" + id + "': expected r=<r>,s=<s>");
    e.description = "span{[[1,r],[0,0]], [[0,s],[0,1]]}";
    e.space = family_22(r, s);
  } else if (head == "masa23" || head == "masa32") {
    std::vector<std::vector<bool>> m = {{true, false, false}, {false, true, false}};
    if (head == "masa32") m = {{true, false}, {false, true}, {false, false}};
    e.description = "independent-entry masa bimodule with a zero row or column";
    e.space = pattern_space(m);
    // dist = 3/2 against beta = sqrt(2).
    ComplexMatrix w(3, 2);
    w << 0, 1, 1, 0, 1, 1;
    e.kappa_seeds = {head == "masa32" ? w : ComplexMatrix(w.transpose())};
  } else if (head == "diag") {
    const int n = arg.empty() ? 3 : parse_size(arg, id);
    e.description = "diagonal masa D_n";
    e.space = diagonal_masa(n);
    if (n >= 3) {
      // Cyclic shift minus its inverse; for n = 3 dist = sqrt(3) against beta = sqrt(2).
      ComplexMatrix w = ComplexMatrix::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        w(i, (i + 1) % n) += 1.0;
        w((i + 1) % n, i) -= 1.0;
      }
      e.kappa_seeds = {w};
    }
  } else if (head == "scalars") {
    const int n = arg.empty() ? 2 : parse_size(arg, id);
    e.description = "scalar matrices C I_n";
    e.space = scalars(n);
  } else if (head == "upper") {
    const int n = arg.empty() ? 3 : parse_size(arg, id);
    e.description = "upper-triangular nest algebra";
    e.space = upper_triangular(n);
  } else if (head == "ct-diag") {
    const auto v = parse_numbers(arg.empty() ? "1,0.5" : arg, id);
    const int n = static_cast<int>(v.size());
    ComplexMatrix t = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) t(i, i) = v[static_cast<std::size_t>(i)];
    if (t.norm() == 0.0) throw InputError("catalog id '" + id + "': operator must be nonzero");
    e.description = "one-dimensional space C diag(...)";
    e.space = one_dimensional(t);
  } else {
    throw InputError("unknown catalog id '" + id + "'");
  }
  return e;
}

std::vector<std::string> catalog_examples() {
  return {"prop-two", "kappa103", "small-s:0.1", "family22:r=1,s=0", "masa23", "masa32",
          "diag:3",   "scalars:2", "upper:3",    "ct-diag:1,0.5"};
}

}  // namespace hyperreflex
