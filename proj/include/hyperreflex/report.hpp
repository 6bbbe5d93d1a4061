#pragma once

#include "hyperreflex/types.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace hyperreflex {

enum class ExitCode : int { ok = 0, expectation_failed = 1, input_error = 2, inconclusive = 3 };

struct ExperimentOptions {
  OptimizerOptions inner;   // tol, restarts, seed and budget of every library call
  double budget_secs = 0.0; // whole-experiment budget; <= 0 disables
  /// Experiment parameters as key -> comma-separated values, e.g. {"s", "0.2,0.1"}.
  std::map<std::string, std::string> params;
};

struct ReportedQuantity {
  std::string name;
  CertifiedValue value;
};

/// One declared expectation, with its inequality restated numerically.
struct Expectation {
  std::string name;
  double lhs = 0.0;
  std::string relation;  // "<=", ">=", "<", ">"
  double rhs = 0.0;
  bool pass = false;
  bool inconclusive = false;  // a search fell short after the budget ran out
  std::string statement;      // e.g. "kappa lower 1.15470053838 >= 1.15469953838"
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::json inputs;  // catalog ids, parameters, seed
  std::vector<ReportedQuantity> quantities;
  std::vector<Expectation> expectations;
  std::vector<std::string> table;  // trend rows for experiments that sweep a parameter
  double duration_secs = 0.0;

  bool pass() const;          // every expectation passed
  bool inconclusive() const;  // no failure, at least one inconclusive expectation
  ExitCode exit_code() const;
};

std::vector<std::string> experiment_names();
/// Throws InputError for an unknown name or a malformed parameter.
ExperimentReport run_experiment(const std::string& name, const ExperimentOptions& opts = {});

/// 12 significant digits; "inf" / "-inf" / "nan" for non-finite values.
std::string format_number(double v);
nlohmann::json certified_to_json(const CertifiedValue& v);
nlohmann::json report_to_json(const ExperimentReport& r);
std::string format_report(const ExperimentReport& r);

}  // namespace hyperreflex
