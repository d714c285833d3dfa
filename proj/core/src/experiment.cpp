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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "perturbml/csv.hpp"
#include "perturbml/errors.hpp"
#include "perturbml/exp_family.hpp"
#include "perturbml/experiment.hpp"
#include "perturbml/version.hpp"
#include "parallel.hpp"

namespace perturbml {
namespace {

using nlohmann::json;

std::string resolve_output_dir(const ExperimentConfig& config,
                               const RunOverrides& overrides) {
  if (overrides.output_dir) return *overrides.output_dir;
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("PERTURBML_OUTPUT_DIR")) {
    if (*env) return env;
  }
  throw ConfigError(
      "no output directory: set output_dir, --output-dir, or "
      "PERTURBML_OUTPUT_DIR");
}

void write_manifest(const std::filesystem::path& dir,
                    const ExperimentConfig& config) {
  json manifest;
  manifest["library_version"] = kVersion;
  manifest["seed"] = config.seed;
  manifest["config"] = json::parse(config_json(config));
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
}

void write_summary(const std::filesystem::path& dir, const json& summary) {
  std::ofstream out(dir / "summary.json", std::ios::binary);
  out << summary.dump(2) << "\n";
}

// Empirical (1 - delta) quantile: the smallest value with at least a
// (1 - delta) fraction of the sample at or below it.
double upper_quantile(std::vector<double> values, double delta) {
  std::sort(values.begin(), values.end());
  const double target = (1.0 - delta) * static_cast<double>(values.size());
  size_t k = static_cast<size_t>(std::ceil(target));
  if (k < 1) k = 1;
  if (k > values.size()) k = values.size();
  return values[k - 1];
}

bool run_rate_table(const ExperimentConfig& config,
                    const std::filesystem::path& dir, json& summary) {
  std::ofstream csv(dir / "results.csv", std::ios::binary);
  write_csv_row(csv, {"n", "p", "delta", "tail", "reg", "sigma_x", "sigma_eta",
                      "epsilon", "order_only", "eps_prime"});
  json rows = json::array();
  for (long n : config.n_grid) {
    RateQuery q;
    q.problem_kind = config.problem.kind;
    q.tail = config.tail;
    q.sigma_x = config.rate_query.sigma_x;
    q.sigma_eta = config.rate_query.sigma_eta;
    q.n = n;
    q.p = config.rate_query.p;
    q.delta = config.delta;
    q.reg_kind = config.rate_query.reg;
    q.k = config.rate_query.k;
    q.g = config.rate_query.g;
    q.B = config.rate_query.B;
    q.q_n = config.rate_query.q_n;
    q.beta = config.rate_query.beta;
    q.K = config.rate_query.K;
    q.q = config.rate_query.q;
    const RateValue eps = rate(q);
    const double eps_prime = perturbed_rate_prime(q);
    write_csv_row(
        csv,
        {std::to_string(n), std::to_string(q.p), format_double(q.delta),
         config.tail == TailKind::subgaussian ? "subgaussian"
                                              : "finite_variance",
         rate_reg_kind_name(q.reg_kind), format_double(q.sigma_x),
         format_double(q.sigma_eta), format_double(eps.value),
         eps.order_only ? "1" : "0", format_double(eps_prime)});
    rows.push_back({{"n", n},
                    {"epsilon", eps.value},
                    {"order_only", eps.order_only},
                    {"eps_prime", eps_prime}});
  }
  summary["rates"] = rows;
  return true;
}

bool run_consistency(const ExperimentConfig& config,
                     const std::filesystem::path& dir, json& summary) {
  PhiloxRng design_rng(config.seed, 0x64657369676eULL);
  const ProblemSpec spec =
      build_problem(config.problem, config.n_grid.front(), design_rng);
  const PerturbationSpec pert =
      build_perturbation(config.perturbation, config.seed);
  RegularizerSpec reg = config.regularizer;

  SolveConfig solve_cfg;
  solve_cfg.alpha = config.solver.alpha;
  solve_cfg.xi = config.solver.xi;
  solve_cfg.max_iters = config.solver.max_iters;
  solve_cfg.step_rule = config.solver.step_rule;
  solve_cfg.fixed_step = config.solver.step;

  ConsistencyParams params;
  params.delta = config.delta;
  params.tail = config.tail;
  params.trials_per_n = config.trials;
  params.n_grid = config.n_grid;
  params.seed = config.seed;
  params.jobs = config.jobs;

  const ConsistencyReport report =
      consistency_experiment(spec, pert, reg, solve_cfg, params);

  std::ofstream csv(dir / "results.csv", std::ios::binary);
  write_csv_row(csv, {"trial_id", "n", "gap", "rhs", "dual_dev",
                      "solver_error"});
  long trial_id = 0;
  for (const auto& t : report.trials) {
    write_csv_row(csv, {std::to_string(trial_id++), std::to_string(t.n),
                        format_double(t.gap), format_double(t.rhs),
                        format_double(t.dual_dev),
                        t.solver_error ? "1" : "0"});
  }

  json per_n = json::array();
  for (size_t i = 0; i < report.n_grid.size(); ++i) {
    per_n.push_back({{"n", report.n_grid[i]},
                     {"epsilon", report.rates[i]},
                     {"lambda", report.lambdas[i]},
                     {"median_gap", report.median_gaps[i]}});
  }
  const double default_min_coverage =
      1.0 - config.delta -
      3.0 * std::sqrt(config.delta * (1.0 - config.delta) /
                      static_cast<double>(config.trials));
  const double min_coverage =
      config.criteria.min_coverage.value_or(default_min_coverage);
  const bool pass_coverage = report.coverage >= min_coverage;
  bool pass_exponent = true;
  if (config.criteria.exponent_min || config.criteria.exponent_max) {
    if (!std::isfinite(report.fitted_exponent)) {
      pass_exponent = false;
    } else {
      if (config.criteria.exponent_min &&
          report.fitted_exponent < *config.criteria.exponent_min) {
        pass_exponent = false;
      }
      if (config.criteria.exponent_max &&
          report.fitted_exponent > *config.criteria.exponent_max) {
        pass_exponent = false;
      }
    }
  }

  summary["coverage"] = report.coverage;
  summary["fitted_exponent"] = report.fitted_exponent;
  summary["per_n"] = per_n;
  summary["min_coverage"] = min_coverage;
  summary["pass_coverage"] = pass_coverage;
  summary["pass_exponent"] = pass_exponent;
  return pass_coverage && pass_exponent;
}

bool run_concentration(const ExperimentConfig& config,
                       const std::filesystem::path& dir, json& summary) {
  PhiloxRng design_rng(config.seed, 0x64657369676eULL);
  const ProblemSpec base =
      build_problem(config.problem, config.n_grid.front(), design_rng);
  const PerturbationSpec pert =
      build_perturbation(config.perturbation, config.seed);

  const long grid_size = static_cast<long>(config.n_grid.size());
  const long total = grid_size * config.trials;
  std::vector<double> devs(static_cast<size_t>(total));
  parallel_for(total, config.jobs, [&](long idx) {
    const long gi = idx / config.trials;
    const long trial = idx % config.trials;
    const auto seeds = philox4x64_block(
        {static_cast<std::uint64_t>(gi), static_cast<std::uint64_t>(trial), 0,
         0},
        {config.seed, 0x636f6e63656e74ULL});
    PhiloxRng rng(seeds[0], 0);
    const ProblemSpec spec_n =
        resize_problem(base, config.n_grid[static_cast<size_t>(gi)], rng);
    const Dataset data =
        sample_dataset(spec_n, config.n_grid[static_cast<size_t>(gi)], rng);
    PerturbationSpec trial_pert = pert;
    trial_pert.seed = seeds[1];
    const Dataset perturbed = perturb_dataset(spec_n, data, trial_pert);
    devs[static_cast<size_t>(idx)] =
        dual_norm_deviation(spec_n, pert, perturbed);
  });

  std::ofstream csv(dir / "results.csv", std::ios::binary);
  write_csv_row(csv, {"trial_id", "n", "dual_dev"});
  for (long idx = 0; idx < total; ++idx) {
    const long gi = idx / config.trials;
    write_csv_row(csv,
                  {std::to_string(idx),
                   std::to_string(config.n_grid[static_cast<size_t>(gi)]),
                   format_double(devs[static_cast<size_t>(idx)])});
  }

  bool all_pass = true;
  json per_n = json::array();
  for (long gi = 0; gi < grid_size; ++gi) {
    const long n = config.n_grid[static_cast<size_t>(gi)];
    std::vector<double> slice(
        devs.begin() + gi * config.trials,
        devs.begin() + (gi + 1) * config.trials);
    const double quantile = upper_quantile(std::move(slice), config.delta);
    const RateQuery q = make_rate_query(base, pert, config.regularizer,
                                        config.tail, n, config.delta);
    const double bound = rate(q).value;
    const bool pass = quantile <= bound;
    all_pass = all_pass && pass;
    per_n.push_back({{"n", n},
                     {"quantile", quantile},
                     {"rate", bound},
                     {"pass", pass}});
  }
  summary["per_n"] = per_n;
  return all_pass;
}

bool run_irrecoverability(const ExperimentConfig& config,
                          const std::filesystem::path& dir, json& summary) {
  IrrecovQuery query;
  query.kind = config.irrecoverability.kind;
  query.gamma = config.irrecoverability.gamma;
  query.n = config.irrecoverability.n;
  query.p = config.irrecoverability.p;
  query.validate();

  const NoiseThreshold threshold = min_noise_variance(query);
  PerturbationConfig pert_cfg = config.perturbation;
  if (config.irrecoverability.noise_at_threshold) {
    if (threshold.is_interval) {
      throw ConfigError(
          "noise_at_threshold applies to the Gaussian classes; give q "
          "explicitly for maxmargin_flip");
    }
    pert_cfg.sigma_eta = std::sqrt(threshold.sigma_eta_sq);
    pert_cfg.kind = query.kind == IrrecovKind::mle_ising
                        ? MechanismKind::ising_clamp
                        : MechanismKind::gaussian_additive;
  }
  const PerturbationSpec pert = build_perturbation(pert_cfg, config.seed);

  const AdversaryResult result =
      simulate_adversary(query, pert, config.trials, config.jobs);

  std::ofstream csv(dir / "results.csv", std::ios::binary);
  write_csv_row(csv, {"trial_id", "n", "recovery_failed"});
  for (long t = 0; t < result.trials; ++t) {
    write_csv_row(csv, {std::to_string(t), std::to_string(query.n),
                        result.per_trial[static_cast<size_t>(t)] ? "1" : "0"});
  }

  json threshold_json;
  if (threshold.is_interval) {
    threshold_json = {{"q_lo", threshold.q_lo},
                      {"q_hi", threshold.q_hi},
                      {"q_hi_strict", threshold.q_hi_strict}};
  } else {
    threshold_json = {{"sigma_eta_sq", threshold.sigma_eta_sq}};
  }
  summary["failure_rate"] = result.failure_rate;
  summary["failures"] = result.failures;
  summary["gamma"] = result.gamma_target;
  summary["stderr"] = result.stderr_rate;
  summary["adversary_pass"] = result.pass;
  summary["threshold"] = threshold_json;
  summary["mi_bound_nats"] = pairwise_kl_mi_bound(query, pert);
  summary["entropy_nats"] = restricted_ensemble_entropy(query);
  summary["fano_bound"] = fano_failure_bound(
      restricted_ensemble_entropy(query), pairwise_kl_mi_bound(query, pert));

  bool pass = true;
  if (config.criteria.require_adversary_pass) pass = pass && result.pass;
  if (config.criteria.max_failure_rate) {
    pass = pass && result.failure_rate <= *config.criteria.max_failure_rate;
  }
  return pass;
}

}  // namespace

RunOutcome run_experiment(ExperimentConfig config,
                          const RunOverrides& overrides) {
  RunOutcome outcome;
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.trials) config.trials = *overrides.trials;
  if (overrides.jobs) config.jobs = *overrides.jobs;
  std::filesystem::path dir;
  try {
    config.output_dir = resolve_output_dir(config, overrides);
    dir = config.output_dir;
    std::filesystem::create_directories(dir);
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfigInvalid;
    outcome.message = e.what();
    return outcome;
  } catch (const std::exception& e) {
    outcome.exit_code = kExitRuntimeError;
    outcome.message = e.what();
    return outcome;
  }
  outcome.output_dir = config.output_dir;

  write_manifest(dir, config);
  json summary;
  summary["experiment"] = json::parse(config_json(config))["experiment"];
  summary["library_version"] = kVersion;
  try {
    bool pass = false;
    switch (config.experiment) {
      case ExperimentKind::rate_table:
        pass = run_rate_table(config, dir, summary);
        break;
      case ExperimentKind::consistency:
        pass = run_consistency(config, dir, summary);
        break;
      case ExperimentKind::concentration:
        pass = run_concentration(config, dir, summary);
        break;
      case ExperimentKind::irrecoverability:
        pass = run_irrecoverability(config, dir, summary);
        break;
    }
    summary["pass"] = pass;
    write_summary(dir, summary);
    outcome.criteria_passed = pass;
    outcome.exit_code = pass ? kExitOk : kExitCriteriaFailed;
    outcome.message = pass ? "all declared criteria hold"
                           : "one or more declared criteria failed";
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfigInvalid;
    outcome.message = e.what();
  } catch (const std::exception& e) {
    // Preserve whatever results were written before the failure.
    summary["pass"] = false;
    summary["error"] = e.what();
    write_summary(dir, summary);
    outcome.exit_code = kExitRuntimeError;
    outcome.message = e.what();
  }
  return outcome;
}

}  // namespace perturbml
