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

#ifndef PERTURBML_EXPERIMENT_HPP_
#define PERTURBML_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perturbml/irrecover.hpp"
#include "perturbml/rates.hpp"

namespace perturbml {

enum class ExperimentKind {
  rate_table,
  consistency,
  concentration,
  irrecoverability,
};

// Recipe for the true hypothesis. `sparse` places `nonzeros` coordinates of
// the given magnitude at the start of the coefficient vector.
struct ThetaInit {
  enum class Kind { zeros, constant, sparse, explicit_values };
  Kind kind = Kind::zeros;
  double constant = 0.0;
  long nonzeros = 0;
  double magnitude = 0.0;
  std::vector<double> values;
};

struct ProblemConfig {
  ProblemKind kind = ProblemKind::mle_expfam;
  Family family = Family::bernoulli_pm1;
  std::vector<long> dims;  // [p] for vector classes, [n1, n2] for matrices
  ThetaInit theta;
  double design_bound = 1.0;  // glm only
  long basis_count = 0;       // nonparam only
  double lipschitz_K = 1.0;   // maxmargin only
  double plus_prob = 0.5;     // maxmargin only
};

struct PerturbationConfig {
  MechanismKind kind = MechanismKind::identity;
  double sigma_eta = 0.0;
  double q = 1.0;
  bool sigma_given_squared = false;  // parsed from sigma_eta_sq
};

struct SolverConfig {
  double alpha = 2.0;
  double xi = 1e-4;
  int max_iters = 20000;
  StepRule step_rule = StepRule::backtracking;
  double step = 1.0;
};

// rate_table experiments evaluate one table column over n_grid.
struct RateTableConfig {
  RateRegKind reg = RateRegKind::l1;
  double sigma_x = 1.0;
  double sigma_eta = 0.0;
  long p = 1;
  long k = 1;
  long g = 1;
  double B = 1.0;
  long q_n = 1;
  double beta = 0.25;
  double K = 1.0;
  double q = 1.0;
};

struct IrrecovConfig {
  IrrecovKind kind = IrrecovKind::glm_labels;
  double gamma = 0.5;
  long n = 1;
  long p = 0;
  // Gaussian classes may ask for noise pinned at the theorem threshold
  // instead of giving sigma_eta explicitly.
  bool noise_at_threshold = false;
};

// Optional pass criteria beyond the built-in defaults.
struct CriteriaConfig {
  std::optional<double> min_coverage;       // consistency
  std::optional<double> exponent_min;       // consistency
  std::optional<double> exponent_max;       // consistency
  std::optional<double> max_failure_rate;   // irrecoverability control runs
  bool require_adversary_pass = true;       // irrecoverability
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::rate_table;
  std::uint64_t seed = 0;
  long trials = 0;
  std::vector<long> n_grid;
  double delta = 0.05;
  double gamma = 0.5;
  TailKind tail = TailKind::subgaussian;
  std::string output_dir;
  int jobs = 1;

  ProblemConfig problem;
  PerturbationConfig perturbation;
  RegularizerSpec regularizer;
  SolverConfig solver;
  RateTableConfig rate_query;
  IrrecovConfig irrecoverability;
  CriteriaConfig criteria;
};

// Strict parse: unknown keys are rejected, referenced module invariants are
// re-validated. Throws ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// Serialization used for manifest.json; parse_config(config_json(c)) == c.
std::string config_json(const ExperimentConfig& config);

// Builds the base problem spec from a config; `n` sizes designs and sample
// counts, drawing any random design from `rng`.
ProblemSpec build_problem(const ProblemConfig& config, long n, PhiloxRng& rng);

PerturbationSpec build_perturbation(const PerturbationConfig& config,
                                    std::uint64_t seed);

struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<int> jobs;
};

// Exit codes mirrored by the command-line runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitCriteriaFailed = 3;
inline constexpr int kExitRuntimeError = 4;

struct RunOutcome {
  int exit_code = kExitOk;
  bool criteria_passed = false;
  std::string output_dir;
  std::string message;
};

// Runs the experiment and writes results.csv, summary.json and manifest.json
// into the output directory. Reruns with identical config and seed produce
// byte-identical results.csv. Partial results are preserved on runtime
// errors.
RunOutcome run_experiment(ExperimentConfig config, const RunOverrides& overrides);

}  // namespace perturbml

#endif  // PERTURBML_EXPERIMENT_HPP_
