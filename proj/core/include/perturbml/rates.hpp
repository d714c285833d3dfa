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

#ifndef PERTURBML_RATES_HPP_
#define PERTURBML_RATES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "perturbml/optimize.hpp"
#include "perturbml/perturb.hpp"
#include "perturbml/problem.hpp"
#include "perturbml/regularize.hpp"

namespace perturbml {

enum class TailKind { subgaussian, finite_variance };

// Columns of the rate table. tikhonov_or_l1inf also covers the dirty
// multitask entry; overlap kinds carry the maximum group size g.
enum class RateRegKind {
  l1,
  k_support,
  tikhonov_or_l1inf,
  multitask_l12,
  overlap_l12,
  overlap_l1inf,
  low_rank,
};

struct RateQuery {
  ProblemKind problem_kind = ProblemKind::mle_expfam;
  TailKind tail = TailKind::subgaussian;
  double sigma_x = 1.0;
  double sigma_eta = 0.0;
  long n = 1;
  long p = 1;
  double delta = 0.05;
  RateRegKind reg_kind = RateRegKind::l1;
  long k = 1;          // k-support
  long g = 1;          // maximum group size
  double B = 1.0;      // design bound (glm / nonparam)
  long q_n = 1;        // basis count (nonparam)
  double beta = 0.25;  // nonparam order parameter, in (0, 1/2)
  double K = 1.0;      // maxmargin Lipschitz constant
  double q = 1.0;      // maxmargin keep probability

  void validate() const;
};

struct RateValue {
  double value = 0.0;
  // True when only the order of the rate is known and the constant is taken
  // to be one; such values are comparison aids, not guarantees.
  bool order_only = false;
};

// The convergence rate eps_{n,delta}. Exact constants exist for the l1
// column of mle (sigma sqrt(2/n (log p + log 2/delta)), sigma sqrt(p/(n
// delta))), for glm and nonparam (times B, nonparam adding log q_n inside),
// and for maxmargin (2K/n). Everything else evaluates the table order with
// unit constant and order_only set. Combinations without a table entry throw
// InvalidCombinationError.
RateValue rate(const RateQuery& query);

// eps'_n of the bounded-perturbed-loss assumption: 0 for the unbiased
// classes, 2K(1-q)/n for maxmargin under the sign-flip channel.
double perturbed_rate_prime(const RateQuery& query);

// Class-specific deviation |that - t|_inf between the empirical perturbed
// statistic and its expectation, using the closed-form expectation from the
// true hypothesis. Not defined for maxmargin_mf.
double dual_norm_deviation(const ProblemSpec& spec,
                           const PerturbationSpec& pert, const Dataset& data);

struct ConsistencyTrial {
  long n = 0;
  long trial = 0;
  double gap = 0.0;
  double rhs = 0.0;
  double dual_dev = 0.0;
  bool solver_error = false;
  std::string error;
};

struct ConsistencyReport {
  std::vector<ConsistencyTrial> trials;
  std::vector<long> n_grid;
  std::vector<double> rates;        // eps_{n,delta} per grid point
  std::vector<double> lambdas;      // alpha * eps per grid point
  std::vector<double> median_gaps;  // per grid point, error trials excluded
  double coverage = 0.0;            // fraction of trials with gap <= rhs
  double fitted_exponent = 0.0;     // OLS slope of log median-gap on log n
  double delta = 0.0;
};

struct ConsistencyParams {
  double delta = 0.05;
  TailKind tail = TailKind::subgaussian;
  long trials_per_n = 100;  // must be >= 100
  std::vector<long> n_grid;
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Monte Carlo check of the perturbed loss-consistency inequality: per grid
// point and trial, draw data, perturb it, solve with lambda_n = alpha *
// eps_{n,delta}, and record the population-loss gap against
//   eps_{n,delta} (alpha R(theta_eta*) + c(theta_eta*)) + eps'_n c(theta*)
//   + xi.
// For the unbiased mechanisms theta_eta* = theta*; for maxmargin the flipped
// population minimizer has the same closed form as the clean one. Solver
// failures are recorded per trial, never fatal.
ConsistencyReport consistency_experiment(const ProblemSpec& spec,
                                         const PerturbationSpec& pert,
                                         const RegularizerSpec& reg,
                                         const SolveConfig& solve_cfg,
                                         const ConsistencyParams& params);

// Maps a regularizer to its rate-table column.
RateRegKind rate_column_for(RegKind kind);

// Stable identifier of a rate column, as used in configs and CSV output.
const char* rate_reg_kind_name(RateRegKind kind);

// Builds the rate query matching one consistency/concentration instance.
RateQuery make_rate_query(const ProblemSpec& spec, const PerturbationSpec& pert,
                          const RegularizerSpec& reg, TailKind tail, long n,
                          double delta);

}  // namespace perturbml

#endif  // PERTURBML_RATES_HPP_
