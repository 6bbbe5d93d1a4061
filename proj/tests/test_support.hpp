#pragma once

// Random generators and brute-force oracles shared by the unit suites and the acceptance binary.

#include "hyperreflex/catalog.hpp"
#include "hyperreflex/expectations.hpp"
#include "hyperreflex/linalg.hpp"
#include "hyperreflex/subspace.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace hyperreflex::testing {

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// 0 = n_0 < n_1 < ... < n_p = n with random interior cuts.
inline std::vector<int> random_nest(Rng& rng, int n) {
  std::vector<int> nest{0};
  for (int c = 1; c < n; ++c)
    if (uniform01(rng) < 0.5) nest.push_back(c);
  nest.push_back(n);
  return nest;
}

inline NestBimoduleSpec random_nest_spec(Rng& rng, int d_out, int d_in) {
  NestBimoduleSpec s;
  s.domain_nest = random_nest(rng, d_in);
  s.codomain_nest = random_nest(rng, d_out);
  const int q = static_cast<int>(s.codomain_nest.size()) - 1;
  s.order_map.assign(s.domain_nest.size(), 0);
  for (std::size_t j = 1; j < s.order_map.size(); ++j)
    s.order_map[j] = std::max(s.order_map[j - 1], uniform_int(rng, 0, q));
  return s;
}

/// A nest bimodule with a random subset of its removable corner blocks replaced by C * X.
inline TriConstSpec random_tri_const_spec(Rng& rng, int d_out, int d_in) {
  TriConstSpec t;
  t.outer = random_nest_spec(rng, d_out, d_in);
  for (std::size_t j = 1; j < t.outer.domain_nest.size(); ++j) {
    const int th = t.outer.order_map[j];
    if (th < 1 || t.outer.order_map[j - 1] >= th || uniform01(rng) < 0.4) continue;
    TriConstAtom atom;
    atom.domain_interval = static_cast<int>(j);
    const auto blk = t.block_of(atom);
    atom.op = random_matrix(blk.row_hi - blk.row_lo, blk.col_hi - blk.col_lo, rng);
    t.atoms.push_back(atom);
  }
  return t;
}

inline BlockSpec random_block(Rng& rng, int rows, int cols) {
  if (rows == 0 || cols == 0) return ZeroBlock{};
  switch (uniform_int(rng, 0, 4)) {
    case 0: return FullBlock{};
    case 1: return ZeroBlock{};
    case 2: return random_nest_spec(rng, rows, cols);
    case 3: return random_tri_const_spec(rng, rows, cols);
    default: return OneDimBlock{random_matrix(rows, cols, rng)};
  }
}

/// Coordinates {0..n-1} split into `parts` random (possibly empty) sets, each shuffled.
inline std::vector<std::vector<int>> random_partition(Rng& rng, int n, int parts) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(parts));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(uniform_int(rng, 0, parts - 1))].push_back(i);
  for (auto& p : out) std::shuffle(p.begin(), p.end(), rng);
  return out;
}

inline DiagConstSpec random_diag_const_spec(Rng& rng, int d_out, int d_in) {
  DiagConstSpec d;
  d.d_out = d_out;
  d.d_in = d_in;
  const int parts = uniform_int(rng, 1, 3);
  d.codomain_partition = random_partition(rng, d_out, parts);
  d.domain_partition = random_partition(rng, d_in, parts);
  for (int i = 0; i < parts; ++i)
    d.blocks.push_back(random_block(rng, static_cast<int>(d.codomain_partition[static_cast<std::size_t>(i)].size()),
                                    static_cast<int>(d.domain_partition[static_cast<std::size_t>(i)].size())));
  return d;
}

inline std::vector<std::vector<bool>> random_mask(Rng& rng, int d_out, int d_in, double p) {
  std::vector<std::vector<bool>> m(static_cast<std::size_t>(d_out), std::vector<bool>(static_cast<std::size_t>(d_in)));
  for (auto& row : m)
    for (std::size_t b = 0; b < row.size(); ++b) row[b] = uniform01(rng) < p;
  return m;
}

/// Random subspace of B(C^d_in, C^d_out) of the given dimension.
inline MatrixSubspace random_subspace(Rng& rng, int d_out, int d_in, int dim) {
  std::vector<ComplexMatrix> gens;
  for (int i = 0; i < dim; ++i) gens.push_back(random_matrix(d_out, d_in, rng));
  return MatrixSubspace::from_spanning_set(gens, d_out, d_in);
}

/// Ref(S) from the constraints (I - P_{Sx}) T x = 0 over every x with entries in
/// {0, 1, -1, i, 1 + i}. The grid contains all coordinate-supported directions, where the range
/// dimension drops for the spaces this oracle is used on.
inline MatrixSubspace grid_reflexive_closure(const MatrixSubspace& s) {
  const Eigen::Index n = s.d_in(), m = s.d_out();
  const std::vector<cplx> values{0.0, 1.0, -1.0, cplx(0, 1), cplx(1, 1)};
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  std::vector<ComplexMatrix> rows;
  while (true) {
    ComplexVector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = values[static_cast<std::size_t>(digits[static_cast<std::size_t>(i)])];
    if (x.norm() > 0) {
      const ComplexMatrix r = ComplexMatrix::Identity(m, m) - range_projection(s, x);
      // vec(r T x) = (x^T (x) r) vec(T)
      rows.push_back(kron(x.transpose(), r));
    }
    std::size_t k = 0;
    while (k < digits.size() && ++digits[k] == static_cast<int>(values.size())) digits[k++] = 0;
    if (k == digits.size()) break;
  }
  ComplexMatrix a(static_cast<Eigen::Index>(rows.size()) * m, n * m);
  for (std::size_t i = 0; i < rows.size(); ++i) a.middleRows(static_cast<Eigen::Index>(i) * m, m) = rows[i];
  return MatrixSubspace::from_vec_columns(null_space(a, 1e-9), m, n);
}

/// Average of (F(X) - F(X^c)) T (E(X) - E(X^c)) over every subset X of the block indices.
inline ComplexMatrix exhaustive_sign_average(const ComplexMatrix& t, const PartitionPair& pp) {
  const std::size_t nb = pp.size();
  ComplexMatrix sum = ComplexMatrix::Zero(t.rows(), t.cols());
  for (unsigned mask = 0; mask < (1u << nb); ++mask) {
    std::vector<bool> in(nb), out(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      in[i] = (mask >> i) & 1u;
      out[i] = !in[i];
    }
    const ComplexMatrix f = pp.codomain_projection(in) - pp.codomain_projection(out);
    const ComplexMatrix e = pp.domain_projection(in) - pp.domain_projection(out);
    sum += f * t * e;
  }
  return sum / static_cast<double>(1u << nb);
}

/// Average of (G (x) I_k) T (G (x) I_k)^* over the signed flip group G^(n).
inline ComplexMatrix exhaustive_group_average(const ComplexMatrix& t, int n, int k) {
  const auto group = sign_flip_group(n);
  ComplexMatrix sum = ComplexMatrix::Zero(t.rows(), t.cols());
  const ComplexMatrix id = ComplexMatrix::Identity(k, k);
  for (const auto& g : group) {
    const ComplexMatrix gk = kron(g, id);
    sum += gk * t * gk.adjoint();
  }
  return sum / static_cast<double>(group.size());
}

}  // namespace hyperreflex::testing
