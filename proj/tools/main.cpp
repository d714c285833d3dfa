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

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "perturbml/errors.hpp"
#include "perturbml/experiment.hpp"
#include "perturbml/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"perturbml: perturbed-data loss minimization experiments"};
  app.set_version_flag("--version", perturbml::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  long trials = 0;
  int jobs = 0;

  CLI::App* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("config", config_path, "path to the experiment config JSON")
      ->required();
  CLI::Option* out_opt =
      run->add_option("--output-dir", output_dir, "where to write artifacts");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the config seed");
  CLI::Option* trials_opt =
      run->add_option("--trials", trials, "override the trial count");
  CLI::Option* jobs_opt =
      run->add_option("--jobs", jobs, "worker threads for trials");

  CLI11_PARSE(app, argc, argv);

  perturbml::ExperimentConfig config;
  try {
    config = perturbml::load_config(config_path);
  } catch (const perturbml::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return perturbml::kExitConfigInvalid;
  }

  perturbml::RunOverrides overrides;
  if (*out_opt) overrides.output_dir = output_dir;
  if (*seed_opt) overrides.seed = seed;
  if (*trials_opt) overrides.trials = trials;
  if (*jobs_opt) overrides.jobs = jobs;

  const perturbml::RunOutcome outcome =
      perturbml::run_experiment(config, overrides);
  if (outcome.exit_code == perturbml::kExitOk) {
    std::cout << "ok: " << outcome.message << " (" << outcome.output_dir
              << ")\n";
  } else {
    std::cerr << "exit " << outcome.exit_code << ": " << outcome.message
              << "\n";
  }
  return outcome.exit_code;
}
