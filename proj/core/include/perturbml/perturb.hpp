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

#ifndef PERTURBML_PERTURB_HPP_
#define PERTURBML_PERTURB_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "perturbml/problem.hpp"

namespace perturbml {

enum class MechanismKind { identity, gaussian_additive, ising_clamp, sign_flip };

struct PerturbationSpec {
  MechanismKind kind = MechanismKind::identity;
  double sigma_eta = 0.0;  // gaussian_additive / ising_clamp
  double q = 1.0;          // sign_flip keep probability, in (1/2, 1]
  std::uint64_t seed = 0;

  // Rejects sigma_eta < 0 and sign_flip with q <= 1/2 (the flipped loss is
  // uninformative there) or q > 1.
  void validate() const;
};

// data + iid N(0, sigma_eta^2) noise; noise for row i comes from stream i of
// the spec seed, so outputs are reproducible per sample.
Eigen::MatrixXd perturb_gaussian(const Eigen::MatrixXd& data,
                                 const PerturbationSpec& spec);

// Pairwise-statistic pipeline: per-sample Gaussian noise, outer products,
// sum over samples, zero the diagonal, clamp off-diagonal entries to [-1, 1].
// Samples are rows in {-1,+1}^d; the published statistic is the d x d sum.
SufficientStatistic perturb_ising_stats(const Eigen::MatrixXd& samples,
                                        const PerturbationSpec& spec);

// Each entry kept with probability q, negated with probability 1 - q.
Eigen::MatrixXd perturb_signflip(const Eigen::MatrixXd& matrix,
                                 const PerturbationSpec& spec);

// Applies the mechanism appropriate for the problem class to a dataset.
// ising_clamp is not a dataset-to-dataset map and is rejected here.
Dataset perturb_dataset(const ProblemSpec& problem, const Dataset& data,
                        const PerturbationSpec& spec);

// Monte Carlo check of E_Q[psi(x, eta)] = t(x) on one input.
struct UnbiasednessReport {
  Eigen::MatrixXd bias;         // estimate of E[psi] - t(x), per coordinate
  Eigen::MatrixXd stderr_bias;  // standard error of each estimate
  bool pass = false;            // every |bias| <= 4 * stderr
};

// `sample` is a single input in the mechanism's domain: a row vector in
// {-1,+1}^d for ising_clamp (whose statistic check skips the diagonal), any
// real matrix for gaussian_additive, a +/-1 matrix for sign_flip.
UnbiasednessReport check_unbiased(const PerturbationSpec& spec,
                                  const Eigen::MatrixXd& sample, long trials);

// Monte Carlo verification that composing a sub-Gaussian(sigma_x) statistic
// (a Rademacher draw) with additive N(0, sigma_eta^2) noise stays within the
// composed moment-generating-function envelope
//   E[exp(l (psi - E psi))] <= 1.05 * exp((sigma_x^2 + sigma_eta^2) l^2 / 2)
// at each multiplier in `lambdas`.
struct MgfCheckReport {
  std::vector<double> lambdas;
  std::vector<double> empirical_mgf;
  std::vector<double> envelope;  // includes the 1.05 slack factor
  bool pass = false;
};

MgfCheckReport subgaussian_mgf_check(double sigma_x, double sigma_eta,
                                     const std::vector<double>& lambdas,
                                     long draws, std::uint64_t seed);

// Monte Carlo verification that Var[psi] <= sigma_x^2 + sigma_eta^2 up to
// three standard errors of the sample variance.
struct VarianceCheckReport {
  double sample_variance = 0.0;
  double bound = 0.0;  // sigma_x^2 + sigma_eta^2
  double stderr_variance = 0.0;
  bool pass = false;
};

VarianceCheckReport variance_composition_check(double sigma_x,
                                               double sigma_eta, long draws,
                                               std::uint64_t seed);

}  // namespace perturbml

#endif  // PERTURBML_PERTURB_HPP_
