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

#ifndef PERTURBML_PROBLEM_HPP_
#define PERTURBML_PROBLEM_HPP_

#include <Eigen/Core>

#include "perturbml/hypothesis.hpp"
#include "perturbml/rng.hpp"

namespace perturbml {

enum class ProblemKind {
  mle_expfam,
  glm_fixed,
  expfam_pca,
  nonparam_regression,
  maxmargin_mf,
};

// Exponential families with sufficient statistic t(y) = y. Bernoulli on
// {-1,+1} has log Z(nu) = log(e^nu + e^-nu); the unit-variance Gaussian has
// log Z(nu) = nu^2/2 + log sqrt(2 pi).
enum class Family { bernoulli_pm1, gaussian_unit };

// One problem instance: the generative truth plus everything the losses need.
//
// Per class:
//   mle_expfam          theta* in R^p, samples x in R^p, t(x) = x.
//   glm_fixed           theta* in R^p, fixed design rows x^(i) with
//                       |x|_inf <= design_bound, labels y^(i).
//   expfam_pca          theta* in R^{n1 x n2}, one observation per entry.
//   nonparam_regression theta* holds basis coefficients (basis_count per
//                       input coordinate); raw design points live in [0, 1]
//                       and are expanded in the cosine basis
//                       sqrt(2) cos(k pi x), so design_bound = sqrt(2).
//   maxmargin_mf        theta* in R^{n1 x n2}, data in {-1,+1}^{n1 x n2},
//                       hinge loss with Lipschitz constant lipschitz_K;
//                       entries are +1 with probability plus_prob.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::mle_expfam;
  Family family = Family::bernoulli_pm1;
  Hypothesis true_hypothesis;
  Eigen::Index n_samples = 0;

  // glm_fixed / nonparam_regression only.
  Eigen::MatrixXd design;       // n x p rows x^(i) (raw points for nonparam)
  double design_bound = 0.0;    // B
  Eigen::Index basis_count = 0; // q_n, nonparam only

  // maxmargin_mf only.
  double lipschitz_K = 1.0;
  double plus_prob = 0.5;

  // Throws on violated invariants (shapes, bounds, domains).
  void validate() const;
};

// Data container shared by all classes. Interpretation:
//   mle_expfam: n x p sample rows; glm/nonparam: n x 1 labels;
//   expfam_pca / maxmargin_mf: the n1 x n2 observation matrix.
// `perturbed` records whether the values passed through a mechanism, which
// relaxes the binary-domain checks for Bernoulli data.
struct Dataset {
  Eigen::MatrixXd values;
  bool perturbed = false;
};

// Empirical sufficient statistic. `summed` marks statistics published as a
// sum over samples (the pairwise pipeline) rather than an average; consumers
// divide by sample_count in that case.
struct SufficientStatistic {
  Eigen::MatrixXd values;
  Eigen::Index sample_count = 1;
  bool summed = false;
};

// Draws a dataset of size n from the generative law in `spec`. For glm and
// nonparam the design stays fixed and only labels are drawn; n must match
// the design row count. For matrix classes n must equal n1 * n2.
Dataset sample_dataset(const ProblemSpec& spec, Eigen::Index n, PhiloxRng& rng);

// Uniform design draw for glm (entries in [-B, B]) and nonparam (points in
// [0, 1]).
Eigen::MatrixXd sample_design(ProblemKind kind, Eigen::Index n, Eigen::Index p,
                              double bound, PhiloxRng& rng);

// Expands raw nonparam points into the cosine basis: column (l * q_n + k-1)
// holds sqrt(2) cos(k pi x_l), k = 1..q_n.
Eigen::MatrixXd nonparam_design_matrix(const ProblemSpec& spec,
                                       const Eigen::MatrixXd& raw_points);

// Number of coefficients the hypothesis carries for `spec` (p, q_n * p, or
// n1 * n2).
Eigen::Index hypothesis_dim(const ProblemSpec& spec);

// Rebuilds the instance at sample count n: resamples the design for the
// fixed-design classes and rescales constant matrix hypotheses to d x d with
// d = sqrt(n). Non-constant matrix hypotheses only accept their own size.
ProblemSpec resize_problem(const ProblemSpec& base, long n, PhiloxRng& rng);

}  // namespace perturbml

#endif  // PERTURBML_PROBLEM_HPP_
