#include "hyperreflex/catalog.hpp"
#include "hyperreflex/metrics.hpp"
#include "hyperreflex/report.hpp"
#include "hyperreflex/structure.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace hr = hyperreflex;

namespace {

struct Common {
  double tol = 1e-6;
  int restarts = 32;
  std::uint64_t seed = 0;
  std::string json_out;
  double budget_secs = 0.0;

  hr::OptimizerOptions optimizer() const {
    hr::OptimizerOptions o;
    o.tol = tol;
    o.restarts = restarts;
    o.seed = seed;
    o.budget_secs = budget_secs;
    o.validate();
    return o;
  }
};

struct Input {
  std::string source;
  hr::MatrixSubspace space;
  std::optional<hr::ComplexMatrix> test;
  hr::BetaHints hints;
  std::optional<hr::PieceFactory> pieces;
  std::vector<hr::ComplexMatrix> kappa_seeds;
};

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hr::InputError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    // The parser message carries the line and column.
    throw hr::InputError(path + ": " + e.what());
  }
}

/// A catalog id, or a JSON subspace document with an optional "test" matrix.
Input load_input(const std::string& arg) {
  Input in;
  in.source = arg;
  if (std::ifstream(arg).good()) {
    const nlohmann::json j = read_json_file(arg);
    try {
      in.space = hr::subspace_from_json(j);
      if (j.contains("test")) in.test = hr::matrix_from_json(j.at("test"), "test");
    } catch (const hr::InputError& e) {
      throw hr::InputError(arg + ": " + e.what());
    }
    if (in.test && (in.test->rows() != in.space.d_out() || in.test->cols() != in.space.d_in()))
      throw hr::InputError(arg + ": test: shape does not match d_out x d_in");
    return in;
  }
  const hr::CatalogEntry e = hr::catalog_lookup(arg);
  in.space = e.space;
  in.test = e.test;
  in.hints = e.hints;
  in.pieces = e.pieces;
  in.kappa_seeds = e.kappa_seeds;
  return in;
}

hr::ComplexMatrix operator_for(const Input& in, const std::string& op_file, bool zero, hr::BetaHints* hints) {
  if (zero) return hr::ComplexMatrix::Zero(in.space.d_out(), in.space.d_in());
  if (!op_file.empty()) {
    const hr::ComplexMatrix t = hr::matrix_from_json(read_json_file(op_file), op_file);
    if (t.rows() != in.space.d_out() || t.cols() != in.space.d_in())
      throw hr::InputError(op_file + ": operator shape does not match the subspace");
    if (hints && in.pieces) hints->pieces = (*in.pieces)(t);
    return t;
  }
  if (!in.test) throw hr::InputError(in.source + " has no test operator; pass --operator FILE or --zero-operator");
  if (hints) *hints = in.hints;
  return *in.test;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw hr::InputError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

void print_value(const std::string& label, const hr::CertifiedValue& v) {
  std::cout << label << " = " << hr::format_number(v.estimate) << "  certified [" << hr::format_number(v.lower) << ", "
            << hr::format_number(v.upper) << "]  (" << v.method << (v.heuristic ? ", heuristic upper" : "") << ")\n";
}

hr::ExitCode check_expect(std::optional<double> expect, double value, double tol) {
  if (!expect) return hr::ExitCode::ok;
  const bool ok = std::abs(value - *expect) <= tol;
  std::cout << "expect " << hr::format_number(*expect) << " within " << hr::format_number(tol) << ": "
            << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? hr::ExitCode::ok : hr::ExitCode::expectation_failed;
}

hr::ExitCode check_verdict(const std::optional<std::string>& expect, const std::string& label) {
  if (!expect) return hr::ExitCode::ok;
  const bool ok = *expect == label;
  std::cout << "expect verdict '" << *expect << "': " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? hr::ExitCode::ok : hr::ExitCode::expectation_failed;
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos || eq == 0) throw hr::InputError("--param expects key=value, got '" + it + "'");
    out[it.substr(0, eq)] = it.substr(eq + 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance constants and 1-hyperreflexivity of matrix subspaces"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--tol", c.tol, "Target accuracy of certified bounds")->capture_default_str();
  app.add_option("--restarts", c.restarts, "Random restarts per optimization")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed of every random draw")->capture_default_str();
  app.add_option("--json-out", c.json_out, "Write the machine-readable report to this path");
  app.add_option("--budget-secs", c.budget_secs, "Wall-clock budget for long searches (0 = none)");

  std::string input, op_file, experiment;
  std::optional<double> expect;
  std::optional<std::string> expect_verdict;
  bool zero = false;
  int tensor_n = 0;
  std::vector<std::string> params;

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("input", input, "Catalog id or JSON subspace document")->required();
  };
  auto add_operator = [&](CLI::App* sub) {
    auto* f = sub->add_option("--operator", op_file, "JSON matrix document for the operator");
    sub->add_flag("--zero-operator", zero, "Use the zero operator")->excludes(f);
  };

  auto* dist = app.add_subcommand("dist", "dist(T, S) with a dual certificate");
  add_input(dist);
  add_operator(dist);
  dist->add_option("--expect", expect, "Fail unless the estimate is within --tol of this value");

  auto* beta = app.add_subcommand("beta", "beta_S(T) with certified bounds");
  add_input(beta);
  add_operator(beta);
  beta->add_option("--expect", expect, "Fail unless the estimate is within --tol of this value");

  auto* kappa = app.add_subcommand("kappa", "Lower bound on the distance constant");
  add_input(kappa);
  kappa->add_option("--tensor", tensor_n, "Also probe S (x) M_n for n up to this value");
  kappa->add_option("--expect-at-least", expect, "Fail unless the certified lower bound reaches this value");

  auto* classify = app.add_subcommand("classify", "Classify a 2 x 2, 2 x 3 or 3 x 2 subspace");
  add_input(classify);
  classify->add_option("--expect-verdict", expect_verdict, "Fail unless the case label matches");

  auto* detect = app.add_subcommand("detect", "Block structure and 1-hyperreflexivity verdict");
  add_input(detect);
  detect->add_option("--expect-verdict", expect_verdict, "Fail unless the global verdict matches");

  auto* exportc = app.add_subcommand("export", "Write a catalog entry as a JSON subspace document");
  add_input(exportc);
  std::string out_path;
  exportc->add_option("output", out_path, "Output path")->required();

  auto* run = app.add_subcommand("run", "Run a named experiment");
  run->add_option("experiment", experiment, "Experiment name (see 'list')")->required();
  run->add_option("--param", params, "Experiment parameter key=value (comma-separated lists)");

  auto* list = app.add_subcommand("list", "List experiments and catalog ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(hr::ExitCode::input_error);
  }

  try {
    const hr::OptimizerOptions opts = c.optimizer();
    if (list->parsed()) {
      std::cout << "experiments:\n";
      for (const auto& n : hr::experiment_names()) std::cout << "  " << n << "\n";
      std::cout << "catalog ids:\n";
      for (const auto& n : hr::catalog_examples()) std::cout << "  " << n << "\n";
      return 0;
    }
    if (run->parsed()) {
      hr::ExperimentOptions eo;
      eo.inner = opts;
      eo.budget_secs = c.budget_secs;
      eo.params = parse_params(params);
      const hr::ExperimentReport r = hr::run_experiment(experiment, eo);
      std::cout << hr::format_report(r);
      write_json(c.json_out, hr::report_to_json(r));
      return static_cast<int>(r.exit_code());
    }

    const Input in = load_input(input);
    nlohmann::json doc;
    doc["input"] = in.source;
    doc["subspace"] = hr::subspace_to_json(in.space);
    hr::ExitCode code = hr::ExitCode::ok;

    if (exportc->parsed()) {
      nlohmann::json j = hr::subspace_to_json(in.space);
      if (in.test) j["test"] = hr::matrix_to_json(*in.test);
      write_json(out_path, j);
      std::cout << "wrote " << out_path << "\n";
      return 0;
    }
    if (dist->parsed()) {
      const hr::ComplexMatrix t = operator_for(in, op_file, zero, nullptr);
      const hr::CertifiedValue d = hr::distance(t, in.space, opts);
      print_value("dist(T, S)", d);
      doc["dist"] = hr::certified_to_json(d);
      code = check_expect(expect, d.estimate, c.tol);
    } else if (beta->parsed()) {
      hr::BetaHints hints;
      const hr::ComplexMatrix t = operator_for(in, op_file, zero, &hints);
      const hr::CertifiedValue b = hr::beta(t, in.space, opts, hints);
      print_value("beta_S(T)", b);
      doc["beta"] = hr::certified_to_json(b);
      code = check_expect(expect, b.estimate, c.tol);
    } else if (kappa->parsed()) {
      hr::KappaOptions ko;
      ko.inner = opts;
      ko.seeds = in.kappa_seeds;
      if (in.test) ko.seeds.push_back(*in.test);
      ko.pieces = in.pieces;
      const hr::KappaResult k = hr::kappa_lower(in.space, ko);
      print_value("kappa", k.value);
      doc["kappa"] = hr::certified_to_json(k.value);
      if (tensor_n > 1) {
        const auto probe = hr::kappa_complete_probe(in.space, tensor_n, ko);
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t n = 0; n < probe.size(); ++n) {
          print_value("kappa of S (x) M_" + std::to_string(n + 1), probe[n].value);
          arr.push_back(hr::certified_to_json(probe[n].value));
        }
        doc["tensor_probe"] = arr;
      }
      if (expect) {
        const bool ok = k.value.lower >= *expect;
        std::cout << "expect certified lower >= " << hr::format_number(*expect) << ": "
                  << (ok ? "PASS" : (c.budget_secs > 0 ? "INCONCLUSIVE" : "FAIL")) << "\n";
        if (!ok) code = c.budget_secs > 0 ? hr::ExitCode::inconclusive : hr::ExitCode::expectation_failed;
      }
    } else if (classify->parsed()) {
      hr::StructureOptions so;
      so.inner = opts;
      so.seed = c.seed;
      const auto r = in.space.d_out(), d = in.space.d_in();
      std::string label;
      std::optional<hr::ObstructionWitness> witness;
      if (r == 2 && d == 2) {
        const hr::Classify22Result res = hr::classify_22(in.space, so);
        label = res.label;
        witness = res.witness;
        if (res.r) doc["r"] = *res.r;
        if (res.s) doc["s"] = *res.s;
      } else if ((r == 2 && d == 3) || (r == 3 && d == 2)) {
        const hr::Classify23Result res = hr::classify_23(in.space, so);
        label = res.label;
        witness = res.witness;
        doc["transposed"] = res.transposed;
      } else {
        throw hr::InputError("classify needs a 2 x 2, 2 x 3 or 3 x 2 subspace; got " + std::to_string(r) + " x " +
                             std::to_string(d) + " (use 'detect')");
      }
      std::cout << "verdict: " << label << "\n";
      doc["verdict"] = label;
      if (witness) {
        std::cout << "witness: " << witness->kind << ", certified ratio " << hr::format_number(witness->certified_ratio)
                  << "\n";
        doc["witness"] = hr::witness_to_json(*witness);
      }
      code = check_verdict(expect_verdict, label);
    } else if (detect->parsed()) {
      hr::StructureOptions so;
      so.inner = opts;
      so.seed = c.seed;
      const hr::StructureReport rep = hr::detect_structure(in.space, so);
      doc = hr::structure_report_to_json(in.space, rep);
      doc["input"] = in.source;
      std::cout << "verdict: " << hr::to_string(rep.verdict) << "\n";
      for (std::size_t i = 0; i < rep.blocks.size(); ++i)
        std::cout << "  block " << i << ": " << hr::to_string(rep.blocks[i].kind) << " (" << rep.blocks[i].rows.size()
                  << " x " << rep.blocks[i].cols.size() << ")\n";
      if (rep.witness)
        std::cout << "witness: " << rep.witness->kind << ", certified ratio "
                  << hr::format_number(rep.witness->certified_ratio) << "\n";
      if (!rep.note.empty()) std::cout << "note: " << rep.note << "\n";
      code = check_verdict(expect_verdict, hr::to_string(rep.verdict));
      if (code == hr::ExitCode::ok && !expect_verdict && rep.verdict == hr::GlobalVerdict::inconclusive)
        code = hr::ExitCode::inconclusive;
    }
    write_json(c.json_out, doc);
    return static_cast<int>(code);
  } catch (const hr::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return static_cast<int>(hr::ExitCode::input_error);
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return static_cast<int>(hr::ExitCode::input_error);
  }
}
