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

#ifndef PERTURBML_EXP_FAMILY_HPP_
#define PERTURBML_EXP_FAMILY_HPP_

#include <Eigen/Core>

#include "perturbml/hypothesis.hpp"
#include "perturbml/problem.hpp"

namespace perturbml {

// log Z(nu) for a single natural-parameter coordinate, guarded against
// overflow (log-sum-exp form for the Bernoulli family).
double log_partition_scalar(Family family, double nu);

// Same, dispatched through the problem spec. Throws UnsupportedFamilyError
// for maxmargin_mf, which has no likelihood normalizer.
double log_partition(const ProblemSpec& spec, double nu);

// d/dnu log Z(nu): tanh(nu) for Bernoulli, nu for the Gaussian. This is the
// conditional mean of the sufficient statistic.
double mean_parameter(Family family, double nu);

// Empirical loss of `theta` on `data`. When data.perturbed is true the values
// are mechanism outputs and the same formulas apply to them.
double empirical_loss(const ProblemSpec& spec, const Hypothesis& theta,
                      const Dataset& data);

// Maximum-likelihood loss evaluated from a precomputed sufficient statistic,
// -<T, theta> + log Z(theta). Summed statistics are normalized by their
// sample count first.
double mle_loss_from_stats(const ProblemSpec& spec, const Hypothesis& theta,
                           const SufficientStatistic& stat);

// Population loss L(theta) under the generative law in `spec`; closed form
// for every supported class.
double expected_loss(const ProblemSpec& spec, const Hypothesis& theta);

// Population loss of the sign-flip channel with keep probability q applied to
// maxmargin data. For the unbiased mechanisms the perturbed population loss
// equals expected_loss.
double expected_loss_signflip(const ProblemSpec& spec, const Hypothesis& theta,
                              double keep_prob);

// Gradient (hinge: a subgradient with f'(1) = 0) of empirical_loss in theta.
Eigen::MatrixXd loss_gradient(const ProblemSpec& spec, const Hypothesis& theta,
                              const Dataset& data);

// Average of per-sample sufficient statistics (mle_expfam only).
SufficientStatistic empirical_stats(const ProblemSpec& spec,
                                    const Dataset& data);

// A lower bound on inf_theta of the empirical loss, used by the solver to
// certify suboptimality. May be -infinity (Bernoulli likelihoods with
// perturbed values outside [-1, 1] are unbounded below).
double empirical_loss_lower_bound(const ProblemSpec& spec,
                                  const Dataset& data);

// Closed-form minimizers of the maxmargin population losses: entries are
// sign(2p - 1) with p the (possibly flipped) probability of +1, and 0 at
// p = 1/2.
Hypothesis maxmargin_true_hypothesis(const ProblemSpec& spec);
Hypothesis maxmargin_true_hypothesis_signflip(const ProblemSpec& spec,
                                              double keep_prob);

// Sub-Gaussian parameter (and variance bound) of t(x) for the supported
// families: 1 for the +/-1 Bernoulli (half its range) and 1 for the
// unit-variance Gaussian.
double sigma_x_bound(Family family);

}  // namespace perturbml

#endif  // PERTURBML_EXP_FAMILY_HPP_
