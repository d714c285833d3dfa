// Copyright 2026 The perturbml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "perturbml/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "perturbml/csv.hpp"
#include "perturbml/errors.hpp"

namespace perturbml {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "perturbml_tests" / name;
  fs::remove_all(dir);
  return dir;
}

const char* kConsistencyConfig = R"({
  "experiment": "consistency",
  "seed": 11,
  "trials": 100,
  "n_grid": [200],
  "delta": 0.05,
  "problem": {
    "kind": "mle_expfam",
    "family": "bernoulli_pm1",
    "dims": [4],
    "theta_star": {"sparse": {"nonzeros": 2, "magnitude": 0.5}}
  },
  "perturbation": {"kind": "gaussian_additive", "sigma_eta": 1.0},
  "regularizer": {"kind": "l1"},
  "solver": {"alpha": 2.0, "xi": 1e-4, "max_iters": 5000}
})";

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config(R"({"experiment": "rate_table", "bogus": 1})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({
    "experiment": "rate_table", "n_grid": [10],
    "problem": {"kind": "mle_expfam", "oops": true}
  })"),
               ConfigError);
}

TEST(Config, RejectsMalformedAndMissing) {
  EXPECT_THROW(parse_config("not json"), ConfigError);
  EXPECT_THROW(parse_config("{}"), ConfigError);
  // consistency without trials (trials = 0) is invalid.
  EXPECT_THROW(parse_config(R"({
    "experiment": "consistency",
    "n_grid": [100],
    "problem": {"kind": "mle_expfam", "dims": [2]},
    "perturbation": {"kind": "identity"},
    "regularizer": {"kind": "l1"}
  })"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({
    "experiment": "rate_table", "n_grid": [10], "delta": 1.5
  })"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({
    "experiment": "consistency", "trials": 100, "n_grid": [100],
    "problem": {"kind": "mle_expfam", "dims": [2]},
    "perturbation": {"kind": "gaussian_additive",
                     "sigma_eta": 1.0, "sigma_eta_sq": 1.0},
    "regularizer": {"kind": "l1"}
  })"),
               ConfigError);
}

TEST(Config, RoundTripsThroughJson) {
  const ExperimentConfig config = parse_config(kConsistencyConfig);
  const ExperimentConfig reparsed = parse_config(config_json(config));
  EXPECT_EQ(config_json(config), config_json(reparsed));
  EXPECT_EQ(reparsed.trials, 100);
  EXPECT_EQ(reparsed.problem.dims, std::vector<long>{4});
  EXPECT_EQ(reparsed.problem.theta.nonzeros, 2);
}

TEST(Config, SigmaSquaredAccepted) {
  const ExperimentConfig config = parse_config(R"({
    "experiment": "irrecoverability",
    "seed": 3, "trials": 1000,
    "irrecoverability": {"kind": "glm_labels", "gamma": 0.5, "n": 50},
    "perturbation": {"kind": "gaussian_additive", "sigma_eta_sq": 4.0}
  })");
  EXPECT_DOUBLE_EQ(config.perturbation.sigma_eta, 2.0);
}

TEST(RunExperiment, RateTableSummaryHoldsKnownValue) {
  const fs::path dir = fresh_dir("rate_table");
  ExperimentConfig config = parse_config(R"({
    "experiment": "rate_table",
    "n_grid": [100, 400],
    "delta": 0.05,
    "problem": {"kind": "mle_expfam", "dims": [10]},
    "rate_query": {"reg": "l1", "sigma_x": 1.0, "sigma_eta": 0.0, "p": 10}
  })");
  RunOverrides overrides;
  overrides.output_dir = dir.string();
  const RunOutcome outcome = run_experiment(config, overrides);
  EXPECT_EQ(outcome.exit_code, kExitOk);

  const json summary = json::parse(slurp(dir / "summary.json"));
  EXPECT_NEAR(summary["rates"][0]["epsilon"].get<double>(),
              0.34616367652045713, 1e-9);
  EXPECT_FALSE(summary["rates"][0]["order_only"].get<bool>());
  EXPECT_TRUE(summary["pass"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "results.csv"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(RunExperiment, MissingOutputDirIsConfigError) {
  ExperimentConfig config = parse_config(R"({
    "experiment": "rate_table", "n_grid": [10],
    "problem": {"kind": "mle_expfam", "dims": [2]}
  })");
  ASSERT_EQ(nullptr, std::getenv("PERTURBML_OUTPUT_DIR"));
  const RunOutcome outcome = run_experiment(config, {});
  EXPECT_EQ(outcome.exit_code, kExitConfigInvalid);
}

TEST(RunExperiment, ConsistencyRerunsAreByteIdentical) {
  ExperimentConfig config = parse_config(kConsistencyConfig);
  const fs::path dir_a = fresh_dir("consistency_a");
  const fs::path dir_b = fresh_dir("consistency_b");
  RunOverrides a, b;
  a.output_dir = dir_a.string();
  b.output_dir = dir_b.string();
  const RunOutcome out_a = run_experiment(config, a);
  const RunOutcome out_b = run_experiment(config, b);
  EXPECT_EQ(out_a.exit_code, kExitOk);
  EXPECT_EQ(out_b.exit_code, kExitOk);
  const std::string csv_a = slurp(dir_a / "results.csv");
  EXPECT_FALSE(csv_a.empty());
  EXPECT_EQ(csv_a, slurp(dir_b / "results.csv"));
  EXPECT_EQ(slurp(dir_a / "summary.json"), slurp(dir_b / "summary.json"));
}

TEST(RunExperiment, JobsDoNotChangeResults) {
  ExperimentConfig config = parse_config(kConsistencyConfig);
  const fs::path dir_a = fresh_dir("jobs_1");
  const fs::path dir_b = fresh_dir("jobs_4");
  RunOverrides a, b;
  a.output_dir = dir_a.string();
  a.jobs = 1;
  b.output_dir = dir_b.string();
  b.jobs = 4;
  run_experiment(config, a);
  run_experiment(config, b);
  EXPECT_EQ(slurp(dir_a / "results.csv"), slurp(dir_b / "results.csv"));
}

TEST(RunExperiment, ManifestReproducesRun) {
  ExperimentConfig config = parse_config(kConsistencyConfig);
  const fs::path dir_a = fresh_dir("manifest_a");
  RunOverrides a;
  a.output_dir = dir_a.string();
  run_experiment(config, a);

  const json manifest = json::parse(slurp(dir_a / "manifest.json"));
  EXPECT_EQ(manifest["library_version"].get<std::string>(),
            std::string("0.1.0"));
  ExperimentConfig reloaded = parse_config(manifest["config"].dump());
  const fs::path dir_b = fresh_dir("manifest_b");
  RunOverrides b;
  b.output_dir = dir_b.string();
  run_experiment(reloaded, b);
  EXPECT_EQ(slurp(dir_a / "results.csv"), slurp(dir_b / "results.csv"));
}

TEST(RunExperiment, ConcentrationPasses) {
  const fs::path dir = fresh_dir("concentration");
  ExperimentConfig config = parse_config(R"({
    "experiment": "concentration",
    "seed": 5, "trials": 300, "n_grid": [200], "delta": 0.05,
    "problem": {"kind": "mle_expfam", "dims": [4],
                "theta_star": {"zeros": true}},
    "perturbation": {"kind": "gaussian_additive", "sigma_eta": 1.0},
    "regularizer": {"kind": "l1"}
  })");
  RunOverrides overrides;
  overrides.output_dir = dir.string();
  const RunOutcome outcome = run_experiment(config, overrides);
  EXPECT_EQ(outcome.exit_code, kExitOk);
  const json summary = json::parse(slurp(dir / "summary.json"));
  EXPECT_TRUE(summary["per_n"][0]["pass"].get<bool>());
  EXPECT_LE(summary["per_n"][0]["quantile"].get<double>(),
            summary["per_n"][0]["rate"].get<double>());
}

TEST(RunExperiment, IrrecoverabilityThresholdPassesAndControlFails) {
  const fs::path dir = fresh_dir("irrecov_pass");
  ExperimentConfig config = parse_config(R"({
    "experiment": "irrecoverability",
    "seed": 9, "trials": 1500,
    "irrecoverability": {"kind": "glm_labels", "gamma": 0.5, "n": 50,
                          "noise_at_threshold": true}
  })");
  RunOverrides overrides;
  overrides.output_dir = dir.string();
  const RunOutcome outcome = run_experiment(config, overrides);
  EXPECT_EQ(outcome.exit_code, kExitOk);
  const json summary = json::parse(slurp(dir / "summary.json"));
  EXPECT_GE(summary["failure_rate"].get<double>(), 0.5);
  EXPECT_NEAR(summary["threshold"]["sigma_eta_sq"].get<double>(),
              23.083120654223414, 1e-9);

  // Falsification control: weak noise must fail the declared criterion.
  const fs::path dir2 = fresh_dir("irrecov_fail");
  ExperimentConfig weak = parse_config(R"({
    "experiment": "irrecoverability",
    "seed": 9, "trials": 1500,
    "irrecoverability": {"kind": "glm_labels", "gamma": 0.5, "n": 50},
    "perturbation": {"kind": "gaussian_additive", "sigma_eta": 0.05}
  })");
  RunOverrides overrides2;
  overrides2.output_dir = dir2.string();
  const RunOutcome failed = run_experiment(weak, overrides2);
  EXPECT_EQ(failed.exit_code, kExitCriteriaFailed);
  const json weak_summary = json::parse(slurp(dir2 / "summary.json"));
  EXPECT_LT(weak_summary["failure_rate"].get<double>(), 0.5);
}

TEST(RunExperiment, OverridesApply) {
  const fs::path dir = fresh_dir("overrides");
  ExperimentConfig config = parse_config(kConsistencyConfig);
  RunOverrides overrides;
  overrides.output_dir = dir.string();
  overrides.seed = 999;
  overrides.trials = 120;
  run_experiment(config, overrides);
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["config"]["seed"].get<std::uint64_t>(), 999u);
  EXPECT_EQ(manifest["config"]["trials"].get<long>(), 120);
}

TEST(Csv, EscapingAndFormatting) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("with,comma"), "\"with,comma\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  std::ostringstream out;
  write_csv_row(out, {"a", "b,c"});
  EXPECT_EQ(out.str(), "a,\"b,c\"\r\n");
}

}  // namespace
}  // namespace perturbml
