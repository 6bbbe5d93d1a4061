#include "hyperreflex/report.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

using namespace hyperreflex;

TEST(Report, NumbersUseTwelveSignificantDigits) {
  EXPECT_EQ(format_number(std::sqrt(3.0)), "1.73205080757");
  EXPECT_EQ(format_number(1.5), "1.5");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(Report, CertifiedJsonKeepsNonFiniteAsStrings) {
  CertifiedValue v;
  v.estimate = v.lower = 1.0;
  v.method = "m";
  const nlohmann::json j = certified_to_json(v);
  EXPECT_EQ(j.at("upper"), "inf");
  EXPECT_EQ(j.at("lower"), 1.0);
  EXPECT_EQ(j.at("method"), "m");
}

TEST(Report, ExitCodes) {
  ExperimentReport r;
  EXPECT_EQ(r.exit_code(), ExitCode::ok);
  Expectation ok{"a", 1, "<=", 2, true, false, ""};
  Expectation open{"b", 1, ">=", 2, false, true, ""};
  Expectation bad{"c", 1, ">=", 2, false, false, ""};
  r.expectations = {ok, open};
  EXPECT_FALSE(r.pass());
  EXPECT_TRUE(r.inconclusive());
  EXPECT_EQ(r.exit_code(), ExitCode::inconclusive);
  r.expectations.push_back(bad);
  EXPECT_FALSE(r.inconclusive());
  EXPECT_EQ(r.exit_code(), ExitCode::expectation_failed);
}

TEST(Report, RegistryAndInputErrors) {
  const auto names = experiment_names();
  EXPECT_EQ(names.size(), 9u);
  EXPECT_THROW(run_experiment("no-such-experiment"), InputError);
  ExperimentOptions o;
  o.params["bogus"] = "1";
  EXPECT_THROW(run_experiment("prop-two", o), InputError);
  o.params = {{"s", "0.1,abc"}};
  EXPECT_THROW(run_experiment("small-s-limit", o), InputError);
  o.params = {{"s", "2"}};
  EXPECT_THROW(run_experiment("small-s-limit", o), InputError);
  o.params = {{"trials", "1.5"}};
  EXPECT_THROW(run_experiment("four-bound", o), InputError);
}

TEST(Report, PropTwoExperiment) {
  const ExperimentReport r = run_experiment("prop-two");
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.exit_code(), ExitCode::ok);
  EXPECT_LT(r.duration_secs, 10.0);
  const nlohmann::json j = report_to_json(r);
  for (const char* key : {"experiment", "inputs", "quantities", "expectations", "pass", "duration_secs"})
    EXPECT_TRUE(j.contains(key)) << key;
  for (const auto& e : j.at("expectations")) EXPECT_TRUE(e.at("pass").get<bool>()) << e.at("statement");
  EXPECT_NE(format_report(r).find("PASS"), std::string::npos);
}

TEST(Report, ReproducibleForFixedSeed) {
  ExperimentOptions o;
  o.params = {{"trials", "3"}};
  const auto a = report_to_json(run_experiment("averaging-bounds", o));
  const auto b = report_to_json(run_experiment("averaging-bounds", o));
  EXPECT_EQ(a.at("quantities"), b.at("quantities"));
}

TEST(Report, ClassifySweepParameters) {
  ExperimentOptions o;
  o.params = {{"r", "0"}, {"s", "0,1"}};
  const ExperimentReport r = run_experiment("classify-sweep", o);
  EXPECT_TRUE(r.pass());
}
