#include "hyperreflex/subspace.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace hyperreflex {

MatrixSubspace::MatrixSubspace(Eigen::Index d_out, Eigen::Index d_in)
    : d_out_(d_out), d_in_(d_in), vec_basis_(d_out * d_in, 0) {
  if (d_out < 0 || d_in < 0) throw InputError("negative ambient dimension");
}

MatrixSubspace MatrixSubspace::from_vec_columns(const ComplexMatrix& columns, Eigen::Index d_out,
                                                Eigen::Index d_in, double tol) {
  if (columns.rows() != d_out * d_in) throw InputError("from_vec_columns: length mismatch");
  MatrixSubspace s(d_out, d_in);
  require_finite(columns, "spanning set");
  s.vec_basis_ = orthonormal_columns(columns, tol);
  s.basis_.reserve(static_cast<std::size_t>(s.vec_basis_.cols()));
  for (Eigen::Index j = 0; j < s.vec_basis_.cols(); ++j)
    s.basis_.push_back(unvec(s.vec_basis_.col(j), d_out, d_in));
  return s;
}

MatrixSubspace MatrixSubspace::from_spanning_set(const std::vector<ComplexMatrix>& spanning,
                                                 Eigen::Index d_out, Eigen::Index d_in,
                                                 double tol) {
  ComplexMatrix cols(d_out * d_in, static_cast<Eigen::Index>(spanning.size()));
  for (std::size_t j = 0; j < spanning.size(); ++j) {
    if (spanning[j].rows() != d_out || spanning[j].cols() != d_in)
      throw InputError("from_spanning_set: shape mismatch");
    cols.col(static_cast<Eigen::Index>(j)) = vec(spanning[j]);
  }
  return from_vec_columns(cols, d_out, d_in, tol);
}

MatrixSubspace MatrixSubspace::from_spanning_set(const std::vector<ComplexMatrix>& spanning,
                                                 double tol) {
  if (spanning.empty()) throw InputError("from_spanning_set: empty list without a shape");
  return from_spanning_set(spanning, spanning.front().rows(), spanning.front().cols(), tol);
}

MatrixSubspace MatrixSubspace::full(Eigen::Index d_out, Eigen::Index d_in) {
  return from_vec_columns(ComplexMatrix::Identity(d_out * d_in, d_out * d_in), d_out, d_in);
}

ComplexMatrix MatrixSubspace::combine(const ComplexVector& coeffs) const {
  if (coeffs.size() != dim()) throw InputError("combine: coefficient count mismatch");
  return unvec(vec_basis_ * coeffs, d_out_, d_in_);
}

ComplexVector MatrixSubspace::coefficients(const ComplexMatrix& t) const {
  if (t.rows() != d_out_ || t.cols() != d_in_) throw InputError("coefficients: shape mismatch");
  return vec_basis_.adjoint() * vec(t);
}

Functional::Functional(ComplexMatrix matrix)
    : matrix_(std::move(matrix)), trace_norm_(hyperreflex::trace_norm(matrix_)) {}

void require_shape(const MatrixSubspace& s, const ComplexMatrix& t, const std::string& op) {
  if (t.rows() != s.d_out() || t.cols() != s.d_in())
    throw InputError(op + ": operator is " + std::to_string(t.rows()) + "x" +
                     std::to_string(t.cols()) + ", subspace ambient is " +
                     std::to_string(s.d_out()) + "x" + std::to_string(s.d_in()));
  require_finite(t, op + " operator");
}

void require_same_ambient(const MatrixSubspace& a, const MatrixSubspace& b, const std::string& op) {
  if (a.d_out() != b.d_out() || a.d_in() != b.d_in())
    throw InputError(op + ": ambient shapes differ");
}

ComplexMatrix project_hs(const MatrixSubspace& s, const ComplexMatrix& t) {
  require_shape(s, t, "project_hs");
  if (s.is_zero()) return ComplexMatrix::Zero(t.rows(), t.cols());
  return s.combine(s.coefficients(t));
}

bool contains(const MatrixSubspace& s, const ComplexMatrix& t, double tol) {
  const ComplexMatrix p = project_hs(s, t);
  return (t - p).norm() <= tol * std::max(1.0, t.norm());
}

MatrixSubspace annihilator(const MatrixSubspace& s) {
  const ComplexMatrix comp = orthogonal_complement(s.vec_basis(), s.ambient_dim());
  return MatrixSubspace::from_vec_columns(comp, s.d_out(), s.d_in());
}

ComplexMatrix action_matrix(const MatrixSubspace& s, const ComplexVector& x) {
  if (x.size() != s.d_in()) throw InputError("action: vector length mismatch");
  ComplexMatrix m(s.d_out(), s.dim());
  for (Eigen::Index i = 0; i < s.dim(); ++i) m.col(i) = s.basis_element(i) * x;
  return m;
}

ComplexMatrix action(const MatrixSubspace& s, const ComplexVector& x, double rank_tol) {
  if (x.size() != s.d_in()) throw InputError("action: vector length mismatch");
  if (s.is_zero() || x.norm() == 0.0) return ComplexMatrix(s.d_out(), 0);
  // Scale-free rank decision: S_i x is compared against the largest S_i x.
  return orthonormal_columns(action_matrix(s, x / x.norm()), rank_tol);
}

ComplexMatrix range_projection(const MatrixSubspace& s, const ComplexVector& x, double rank_tol) {
  const ComplexMatrix q = action(s, x, rank_tol);
  return q * q.adjoint();
}

MatrixSubspace compress_to_bases(const MatrixSubspace& s, const ComplexMatrix& domain_basis,
                                 const ComplexMatrix& codomain_basis) {
  if (domain_basis.rows() != s.d_in() || codomain_basis.rows() != s.d_out())
    throw InputError("compression: basis shape mismatch");
  std::vector<ComplexMatrix> gens;
  gens.reserve(s.basis().size());
  for (const auto& b : s.basis()) gens.push_back(codomain_basis.adjoint() * b * domain_basis);
  return MatrixSubspace::from_spanning_set(gens, codomain_basis.cols(), domain_basis.cols());
}

Compression compress(const MatrixSubspace& s, const ComplexMatrix& p, const ComplexMatrix& q) {
  if (p.rows() != s.d_in() || p.cols() != s.d_in() || q.rows() != s.d_out() ||
      q.cols() != s.d_out())
    throw InputError("compression: projection shape mismatch");
  if (!is_projection(p) || !is_projection(q))
    throw InputError("compression: inputs must be orthogonal projections");
  const ComplexMatrix vp = orthonormal_columns(p);
  const ComplexMatrix wq = orthonormal_columns(q);
  return {compress_to_bases(s, vp, wq), vp, wq};
}

MatrixSubspace compression(const MatrixSubspace& s, const ComplexMatrix& p, const ComplexMatrix& q) {
  return compress(s, p, q).space;
}

MatrixSubspace adjoint_space(const MatrixSubspace& s) {
  std::vector<ComplexMatrix> gens;
  for (const auto& b : s.basis()) gens.push_back(b.adjoint());
  return MatrixSubspace::from_spanning_set(gens, s.d_in(), s.d_out());
}

MatrixSubspace tensor_with_full(const MatrixSubspace& s, Eigen::Index k) {
  if (k < 1) throw InputError("tensor_with_full: k must be at least 1");
  std::vector<ComplexMatrix> gens;
  for (const auto& b : s.basis())
    for (Eigen::Index p = 0; p < k; ++p)
      for (Eigen::Index q = 0; q < k; ++q) gens.push_back(kron(b, matrix_unit(k, k, p, q)));
  return MatrixSubspace::from_spanning_set(gens, s.d_out() * k, s.d_in() * k);
}

MatrixSubspace conjugate(const MatrixSubspace& s, const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.cols() != s.d_out() || v.rows() != s.d_in()) throw InputError("conjugate: shape mismatch");
  std::vector<ComplexMatrix> gens;
  for (const auto& b : s.basis()) gens.push_back(u * b * v);
  return MatrixSubspace::from_spanning_set(gens, u.rows(), v.cols());
}

MatrixSubspace right_multiply(const MatrixSubspace& s, const ComplexMatrix& x) {
  return conjugate(s, ComplexMatrix::Identity(s.d_out(), s.d_out()), x);
}

MatrixSubspace subspace_sum(const MatrixSubspace& a, const MatrixSubspace& b) {
  require_same_ambient(a, b, "subspace_sum");
  ComplexMatrix cols(a.ambient_dim(), a.dim() + b.dim());
  cols << a.vec_basis(), b.vec_basis();
  return MatrixSubspace::from_vec_columns(cols, a.d_out(), a.d_in());
}

MatrixSubspace subspace_intersection(const MatrixSubspace& a, const MatrixSubspace& b) {
  require_same_ambient(a, b, "subspace_intersection");
  return annihilator(subspace_sum(annihilator(a), annihilator(b)));
}

bool subspace_contains(const MatrixSubspace& outer, const MatrixSubspace& inner, double tol) {
  require_same_ambient(outer, inner, "subspace_contains");
  if (inner.is_zero()) return true;
  const ComplexMatrix resid =
      inner.vec_basis() - outer.vec_basis() * (outer.vec_basis().adjoint() * inner.vec_basis());
  for (Eigen::Index j = 0; j < resid.cols(); ++j)
    if (resid.col(j).norm() > tol) return false;
  return true;
}

bool subspace_equal(const MatrixSubspace& a, const MatrixSubspace& b, double tol) {
  if (a.d_out() != b.d_out() || a.d_in() != b.d_in()) return false;
  if (a.dim() != b.dim()) return false;
  return subspace_contains(a, b, tol) && subspace_contains(b, a, tol);
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

namespace {

RealMatrix real_rows_from_json(const nlohmann::json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw InputError(where + ": expected a nonempty array of rows");
  const std::size_t ncols = rows.at(0).is_array() ? rows.at(0).size() : 0;
  if (ncols == 0) throw InputError(where + ": rows must be nonempty arrays");
  RealMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != ncols)
      throw InputError(where + ": row " + std::to_string(i) + " has the wrong length");
    for (std::size_t j = 0; j < ncols; ++j) {
      if (!row[j].is_number())
        throw InputError(where + ": entry [" + std::to_string(i) + "][" + std::to_string(j) +
                         "] is not a number");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return out;
}

}  // namespace

ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("re")) throw InputError(where + ": missing field 're'");
  const RealMatrix re = real_rows_from_json(j.at("re"), where + ".re");
  RealMatrix im = RealMatrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) {
    im = real_rows_from_json(j.at("im"), where + ".im");
    if (im.rows() != re.rows() || im.cols() != re.cols())
      throw InputError(where + ": 're' and 'im' shapes differ");
  }
  ComplexMatrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  require_finite(m, where);
  return m;
}

nlohmann::json subspace_to_json(const MatrixSubspace& s) {
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& b : s.basis()) basis.push_back(matrix_to_json(b));
  return {{"d_out", s.d_out()}, {"d_in", s.d_in()}, {"basis", basis}, {"labels", s.labels()}};
}

MatrixSubspace subspace_from_json(const nlohmann::json& j) {
  for (const char* key : {"d_out", "d_in", "basis"})
    if (!j.contains(key)) throw InputError(std::string("subspace document: missing field '") + key + "'");
  if (!j.at("d_out").is_number_integer() || !j.at("d_in").is_number_integer())
    throw InputError("subspace document: 'd_out' and 'd_in' must be integers");
  const auto d_out = j.at("d_out").get<Eigen::Index>();
  const auto d_in = j.at("d_in").get<Eigen::Index>();
  if (d_out <= 0 || d_in <= 0) throw InputError("subspace document: dimensions must be positive");
  if (!j.at("basis").is_array()) throw InputError("subspace document: 'basis' must be an array");
  std::vector<ComplexMatrix> gens;
  for (std::size_t i = 0; i < j.at("basis").size(); ++i) {
    const std::string where = "basis[" + std::to_string(i) + "]";
    ComplexMatrix m = matrix_from_json(j.at("basis")[i], where);
    if (m.rows() != d_out || m.cols() != d_in)
      throw InputError(where + ": shape does not match d_out x d_in");
    gens.push_back(std::move(m));
  }
  MatrixSubspace s = MatrixSubspace::from_spanning_set(gens, d_out, d_in);
  if (j.contains("labels") && j.at("labels").is_array())
    s.set_labels(j.at("labels").get<std::vector<std::string>>());
  return s;
}

}  // namespace hyperreflex
