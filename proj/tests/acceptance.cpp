// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any criterion fails.

#include "hyperreflex/bounds.hpp"
#include "hyperreflex/catalog.hpp"
#include "hyperreflex/expectations.hpp"
#include "hyperreflex/metrics.hpp"
#include "hyperreflex/report.hpp"
#include "hyperreflex/structure.hpp"

#include "test_support.hpp"

#include <chrono>
#include <cstdlib>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

using namespace hyperreflex;
using namespace hyperreflex::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string num(double v) { return format_number(v); }

OptimizerOptions light(int restarts = 8) {
  OptimizerOptions o;
  o.restarts = restarts;
  o.certified_upper_mode = UpperMode::off;
  return o;
}

/// Runs the experiment and records its failing expectations and the runtime limit.
void experiment(Outcome& out, const std::string& name, double limit_secs) {
  const ExperimentReport r = run_experiment(name);
  for (const auto& e : r.expectations)
    if (!e.pass) out.check(false, e.statement);
  out.check(r.duration_secs < limit_secs, "runtime " + num(r.duration_secs) + " s < " + num(limit_secs) + " s");
  out.note(name + " " + num(r.duration_secs) + " s");
}

Outcome criterion_prop_two() {
  Outcome o;
  experiment(o, "prop-two", 10.0);
  return o;
}

Outcome criterion_kappa103() {
  Outcome o;
  const auto [k, angle] = kappa103_k();
  o.check(std::abs(k - 0.058058261758407797) <= 1e-9, "k = " + num(k) + " pinned at 0.0580582617584 +- 1e-9");
  experiment(o, "kappa103", 10.0);
  return o;
}

Outcome criterion_small_s() {
  Outcome o;
  experiment(o, "small-s-limit", 30.0);
  return o;
}

Outcome criterion_classify() {
  Outcome o;
  experiment(o, "classify-sweep", 60.0);
  return o;
}

Outcome criterion_masa() {
  Outcome o;
  experiment(o, "masa-obstructions", 60.0);
  return o;
}

Outcome criterion_tensor() {
  Outcome o;
  experiment(o, "tensor-monotone", 300.0);
  return o;
}

/// Runs `trials` instances of a property and records the first few failures.
void property(Outcome& out, const std::string& name, int trials, const std::function<bool(Rng&, std::string&)>& f,
              std::uint64_t seed) {
  Rng rng(seed);
  int fails = 0;
  for (int i = 0; i < trials; ++i) {
    std::string detail;
    if (!f(rng, detail)) {
      if (++fails <= 3) out.check(false, name + " trial " + std::to_string(i) + ": " + detail);
    }
  }
  out.check(fails == 0, name + ": " + std::to_string(fails) + " of " + std::to_string(trials) + " trials failed");
  if (fails == 0) out.note(name + " " + std::to_string(trials) + "/" + std::to_string(trials));
}

Outcome criterion_properties() {
  Outcome o;
  const int n = 200;
  property(o, "beta <= dist + 2e-6", n, [](Rng& rng, std::string& d) {
    const int m = uniform_int(rng, 1, 4), k = uniform_int(rng, 1, 4);
    const MatrixSubspace s = random_subspace(rng, m, k, uniform_int(rng, 0, m * k));
    const ComplexMatrix t = random_matrix(m, k, rng);
    const double b = beta(t, s, light()).estimate, dist = distance(t, s).upper;
    d = num(b) + " vs " + num(dist);
    return b <= dist + 2e-6;
  }, 701);

  // Q S P inside S for coordinate P, Q and a pattern S; T = Q T P.
  property(o, "cutdown: dist equal, beta_S <= beta_QSP", n, [](Rng& rng, std::string& d) {
    const int m = uniform_int(rng, 2, 5), k = uniform_int(rng, 2, 5);
    const auto mask = random_mask(rng, m, k, 0.5);
    const MatrixSubspace s = pattern_space(mask);
    std::vector<int> rows, cols;
    for (int a = 0; a < m; ++a)
      if (uniform01(rng) < 0.6) rows.push_back(a);
    for (int b = 0; b < k; ++b)
      if (uniform01(rng) < 0.6) cols.push_back(b);
    if (rows.empty()) rows.push_back(0);
    if (cols.empty()) cols.push_back(0);
    ComplexMatrix pb = ComplexMatrix::Zero(k, static_cast<Eigen::Index>(cols.size()));
    ComplexMatrix qb = ComplexMatrix::Zero(m, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) pb(cols[j], static_cast<Eigen::Index>(j)) = 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) qb(rows[i], static_cast<Eigen::Index>(i)) = 1.0;
    const MatrixSubspace qsp = compress_to_bases(s, pb, qb);
    const ComplexMatrix tc = random_matrix(qb.cols(), pb.cols(), rng);
    const ComplexMatrix t = qb * tc * pb.adjoint();
    const CertifiedValue d_full = distance(t, s), d_comp = distance(tc, qsp);
    std::vector<std::vector<bool>> sup_full, sup_comp;
    is_pattern_space(s, &sup_full);
    const bool comp_pattern = qsp.is_zero() || is_pattern_space(qsp, &sup_comp);
    if (qsp.is_zero()) sup_comp.assign(rows.size(), std::vector<bool>(cols.size(), false));
    const double b_full = pattern_beta(t, sup_full).estimate, b_comp = pattern_beta(tc, sup_comp).estimate;
    d = "dist " + num(d_full.estimate) + " / " + num(d_comp.estimate) + ", beta " + num(b_full) + " / " + num(b_comp);
    return comp_pattern && std::abs(d_full.estimate - d_comp.estimate) <= 2e-6 && b_full <= b_comp + 1e-6;
  }, 702);

  // S X: dist(TX, SX) <= ||X|| dist(T, S) and beta_SX(TX) >= beta_S(T) / ||X^-1|| at y = X^-1 x.
  property(o, "multiply: two-sided cond(X) inequality", n, [](Rng& rng, std::string& d) {
    const int m = uniform_int(rng, 1, 3), k = uniform_int(rng, 2, 3);
    const MatrixSubspace s = random_subspace(rng, m, k, uniform_int(rng, 1, m * k - 1));
    const ComplexMatrix x = ComplexMatrix::Identity(k, k) + 0.5 * random_matrix(k, k, rng);
    const ComplexMatrix xi = x.inverse();
    const ComplexMatrix t = random_matrix(m, k, rng);
    const MatrixSubspace sx = right_multiply(s, x);
    const double lhs_d = distance(t * x, sx).lower, rhs_d = operator_norm(x) * distance(t, s).upper;
    const CertifiedValue b = beta(t, s, light());
    bool beta_ok = true;
    if (!b.witness.empty()) {
      const ComplexVector w = b.witness.front().normalized();
      const ComplexVector y = (xi * w).normalized();
      const double at_y = beta_objective(t * x, sx, y);
      beta_ok = at_y >= beta_objective(t, s, w) / operator_norm(xi) - 1e-6;
      d = "beta at X^-1 x " + num(at_y) + " vs " + num(beta_objective(t, s, w) / operator_norm(xi));
    }
    d += ", dist " + num(lhs_d) + " vs " + num(rhs_d);
    // The symmetric inequality with S = (S X) X^-1.
    const double back = distance(t, s).lower, fwd = operator_norm(xi) * distance(t * x, sx).upper;
    return beta_ok && lhs_d <= rhs_d + 1e-6 && back <= fwd + 1e-6;
  }, 703);

  property(o, "offdiag: ||T - Phi(T)|| <= 2 beta_D(T) + 1e-6", n, [](Rng& rng, std::string& d) {
    const PartitionPair pp = block_pair(uniform_int(rng, 2, 3), uniform_int(rng, 1, 2));
    const BoundReport r = averaging_bound_check(random_matrix(pp.d_out, pp.d_in, rng), pp, false, 1e-6);
    d = num(r.lhs) + " vs " + num(r.rhs);
    return r.lhs <= r.rhs + 1e-6;
  }, 704);

  property(o, "offdiag: beta_S(Phi(T)) <= beta_S(T) + 1e-6", n, [](Rng& rng, std::string& d) {
    const double s = 0.1 + 0.9 * uniform01(rng);
    const DiagonalTensorModel model{{1.0, s, 0.0}, 1};
    const ContractionReport c =
        expectation_beta_contraction_check(random_matrix(3, 3, rng), model.space(), model.blocks(), light());
    d = num(c.beta_phi) + " vs " + num(c.beta_t);
    return c.beta_phi <= c.beta_t + 1e-6;
  }, 705);

  property(o, "scalartensor n=1 factor 3/2", n, [](Rng& rng, std::string& d) {
    const int k = uniform_int(rng, 1, 3);
    const BoundReport r = scalartensor_bound_check(random_matrix(2 * k, 2 * k, rng), 1, k, light());
    d = num(r.lhs) + " vs " + num(r.rhs);
    return r.pass;
  }, 706);

  property(o, "scalartensor n=2 factor 2", n, [](Rng& rng, std::string& d) {
    const BoundReport r = scalartensor_bound_check(random_matrix(4, 4, rng), 2, 1, light());
    d = num(r.lhs) + " vs " + num(r.rhs);
    return r.pass;
  }, 707);

  property(o, "four-bound: dist <= 4 beta and <= 2.5 beta (rank two)", n, [](Rng& rng, std::string& d) {
    // T_s models C diag(1, s, 0) (x) M_k; every fourth trial uses k = 2 (dimension 6).
    static int counter = 0;
    const int k = (counter++ % 4 == 3) ? 2 : 1;
    const DiagonalTensorModel model{{1.0, 0.05 + 0.95 * uniform01(rng), 0.0}, k};
    const ComplexMatrix x = random_matrix(3 * k, 3 * k, rng);
    const ChainReport g = four_bound_chain(x, model, false, light(4));
    const ChainReport r = four_bound_chain(x, model, true, light(4));
    d = "dist " + num(g.dist) + " beta " + num(g.beta_s) + " links " + std::to_string(g.pass) + std::to_string(r.pass);
    return g.pass && r.pass && g.dist <= 4.0 * g.beta_s + 1e-6 && r.dist <= 2.5 * r.beta_s + 1e-6;
  }, 708);

  {
    const ComplexMatrix t = ComplexMatrix::Constant(3, 3, 1.0 / 3.0);
    const double gap = operator_norm(t - sign_expectation(t, singleton_pair(3, 3)));
    OptimizerOptions tight;
    tight.tol = 1e-8;
    const double d = distance(t, scalars(3), tight).estimate;
    o.check(std::abs(gap - (2.0 - 2.0 / 3.0) * d) <= 1e-8,
            "constant3: ||T - Phi(T)|| = " + num(gap) + " vs (4/3) dist = " + num(4.0 / 3.0 * d));
  }
  return o;
}

Outcome criterion_oracles() {
  Outcome o;
  property(o, "beta vs beta_via_rank_one within 1e-5", 200, [](Rng& rng, std::string& d) {
    const int m = uniform_int(rng, 1, 3), k = uniform_int(rng, 1, 3);
    const MatrixSubspace s = random_subspace(rng, m, k, uniform_int(rng, 0, m * k - 1));
    const ComplexMatrix t = random_matrix(m, k, rng);
    const double a = beta(t, s, light(32)).estimate, b = beta_via_rank_one(t, s, light(32)).estimate;
    d = num(a) + " vs " + num(b);
    return std::abs(a - b) <= 1e-5;
  }, 801);

  property(o, "sign expectation vs exhaustive average within 1e-10", 200, [](Rng& rng, std::string& d) {
    const int m = uniform_int(rng, 2, 6), nb = uniform_int(rng, 1, std::min(m, 4));
    PartitionPair pp;
    pp.d_out = pp.d_in = m;
    pp.domain_blocks = random_partition(rng, m, nb);
    pp.codomain_blocks = random_partition(rng, m, nb);
    // Empty blocks are not allowed: drop them pairwise.
    PartitionPair q;
    q.d_out = q.d_in = m;
    for (int i = 0; i < nb; ++i)
      if (!pp.domain_blocks[i].empty() && !pp.codomain_blocks[i].empty()) {
        q.domain_blocks.push_back(pp.domain_blocks[i]);
        q.codomain_blocks.push_back(pp.codomain_blocks[i]);
      }
    if (q.size() == 0) return true;
    const ComplexMatrix t = random_matrix(m, m, rng);
    const double err = (sign_expectation(t, q) - exhaustive_sign_average(t, q)).norm();
    d = "error " + num(err);
    return err <= 1e-10;
  }, 802);

  property(o, "group expectation vs exhaustive average within 1e-10", 200, [](Rng& rng, std::string& d) {
    const int n = uniform_int(rng, 1, 2), k = n == 1 ? uniform_int(rng, 1, 3) : 1;
    const int dim = (1 << n) * k;
    const ComplexMatrix t = random_matrix(dim, dim, rng);
    const double err = (group_expectation(t, n, k) - exhaustive_group_average(t, n, k)).norm();
    d = "error " + num(err);
    return err <= 1e-10;
  }, 803);

  // Random pattern spaces and pattern spaces with a tied pair of entries against the grid oracle;
  // one-dimensional spaces against their known closure.
  property(o, "reflexive_closure vs oracle", 100, [](Rng& rng, std::string& d) {
    const int m = uniform_int(rng, 1, 4), k = uniform_int(rng, 1, 4);
    MatrixSubspace s;
    const int kind = uniform_int(rng, 0, 2);
    if (kind == 2) {
      s = one_dimensional(random_matrix(m, k, rng));
    } else {
      const auto mask = random_mask(rng, m, k, 0.4);
      std::vector<ComplexMatrix> gens;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < k; ++b)
          if (mask[a][b]) gens.push_back(matrix_unit(m, k, a, b));
      if (kind == 1)
        gens.push_back(matrix_unit(m, k, uniform_int(rng, 0, m - 1), uniform_int(rng, 0, k - 1)) +
                       matrix_unit(m, k, uniform_int(rng, 0, m - 1), uniform_int(rng, 0, k - 1)));
      s = gens.empty() ? MatrixSubspace(m, k) : MatrixSubspace::from_spanning_set(gens, m, k);
    }
    // One-dimensional spaces are reflexive: T x in span(A x) for all x forces T in span{A}. The grid
    // misses their constraint directions (the hyperplane A x = 0 has no grid points in general).
    const MatrixSubspace a = reflexive_closure(s), b = kind == 2 ? s : grid_reflexive_closure(s);
    d = std::to_string(m) + "x" + std::to_string(k) + " dim " + std::to_string(s.dim()) + ": closure " +
        std::to_string(a.dim()) + ", oracle " + std::to_string(b.dim());
    return subspace_equal(a, b, 1e-6);
  }, 804);
  return o;
}

Outcome criterion_round_trip() {
  Outcome o;
  Rng rng(901);
  int recovered = 0, consistent_verdicts = 0, kinds[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < 100; ++i) {
    const int d_out = uniform_int(rng, 1, 4), d_in = uniform_int(rng, 1, 4);
    // Plain nest bimodules, tri_const spaces, and diag_const presentations in turn.
    DiagConstSpec spec;
    const int kind = i % 3;
    if (kind == 0) {
      spec.d_out = d_out;
      spec.d_in = d_in;
      spec.codomain_partition = {random_partition(rng, d_out, 1)[0]};
      spec.domain_partition = {random_partition(rng, d_in, 1)[0]};
      spec.blocks = {random_nest_spec(rng, d_out, d_in)};
    } else if (kind == 1) {
      spec.d_out = d_out;
      spec.d_in = d_in;
      spec.codomain_partition = {random_partition(rng, d_out, 1)[0]};
      spec.domain_partition = {random_partition(rng, d_in, 1)[0]};
      spec.blocks = {random_tri_const_spec(rng, d_out, d_in)};
    } else {
      spec = random_diag_const_spec(rng, d_out, d_in);
    }
    ++kinds[kind];
    const MatrixSubspace s = build_diag_const(spec);
    const StructureReport r = detect_structure(s);
    const std::string tag = "build " + std::to_string(i) + " (" + std::to_string(d_out) + "x" + std::to_string(d_in) + ")";
    if (!r.presentation) {
      o.check(false, tag + ": no presentation, verdict " + to_string(r.verdict) + " " + r.note);
      continue;
    }
    const bool eq = subspace_equal(build_diag_const(*r.presentation), s, 1e-7);
    o.check(eq, tag + ": rebuilt presentation differs");
    recovered += eq ? 1 : 0;
    if (r.verdict == GlobalVerdict::one_hyperreflexive_consistent) {
      ++consistent_verdicts;
      o.check(r.diagnostics_consistent, tag + ": commutation diagnostics inconsistent with the verdict");
    }
  }
  o.note(std::to_string(recovered) + "/100 presentations rebuilt (" + std::to_string(kinds[0]) + " nest, " +
         std::to_string(kinds[1]) + " tri_const, " + std::to_string(kinds[2]) + " diag_const); " +
         std::to_string(consistent_verdicts) + " consistent verdicts");
  return o;
}

}  // namespace

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"prop two reproduction", criterion_prop_two},
      {"kappa >= 1.03 scene", criterion_kappa103},
      {"small-s limit", criterion_small_s},
      {"classification soundness sweep", criterion_classify},
      {"masa obstruction constants", criterion_masa},
      {"tensor monotonicity", criterion_tensor},
      {"inequality property suites", criterion_properties},
      {"oracle equivalences", criterion_oracles},
      {"structure round trip", criterion_round_trip},
  };
  int failed = 0;
  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::cerr << "unknown criterion '" << argv[a] << "'\n";
      return 2;
    }
    selected[static_cast<std::size_t>(k - 1)] = true;
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::cout << "CRITERION " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << "  ("
              << num(secs) << " s)\n";
    for (const auto& n : o.notes) std::cout << "    " << n << "\n";
    std::cout << std::flush;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAILED") << "\n";
  return failed == 0 ? 0 : 1;
}
