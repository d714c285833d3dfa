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

#ifndef PERTURBML_OPTIMIZE_HPP_
#define PERTURBML_OPTIMIZE_HPP_

#include <functional>

#include "perturbml/hypothesis.hpp"
#include "perturbml/problem.hpp"
#include "perturbml/regularize.hpp"

namespace perturbml {

enum class StepRule { backtracking, fixed };

struct SolveConfig {
  double alpha = 2.0;  // penalty multiplier; must stay >= 2
  double xi = 1e-6;    // target suboptimality
  int max_iters = 20000;
  StepRule step_rule = StepRule::backtracking;
  double fixed_step = 1.0;   // also the initial backtracking step
  double tol_grad = 1e-13;   // gradient-mapping stall tolerance

  // Optional start point (defaults to zero) and per-iteration observer of the
  // regularized objective.
  const Hypothesis* init = nullptr;
  std::function<void(int, double)> observer;

  void validate() const;
};

struct SolveCertificate {
  double objective_value = 0.0;
  // Certified upper bound on the suboptimality of objective_value. Infinite
  // when no radius bound is available (e.g. lambda = 0 on a non-separable
  // loss).
  double duality_or_progress_gap = 0.0;
  int iterations = 0;
  bool converged = false;  // implies duality_or_progress_gap <= xi
};

struct SolveResult {
  Hypothesis theta;
  SolveCertificate certificate;
};

// lambda_n = alpha * eps_{n,delta}. Throws AlphaBelowTwoError for alpha < 2.
double penalty_parameter(double alpha, double eps_n_delta);

// Minimizes empirical_loss(spec, theta, data) + lambda_n * R(theta) by
// proximal gradient descent with backtracking (smooth losses) or proximal
// subgradient descent with diminishing steps and best-iterate/averaged
// certificates (hinge). Initialization at zero unless cfg.init is set.
SolveResult minimize(const ProblemSpec& spec, const Dataset& data,
                     const RegularizerSpec& reg, double lambda_n,
                     const SolveConfig& cfg);

}  // namespace perturbml

#endif  // PERTURBML_OPTIMIZE_HPP_
