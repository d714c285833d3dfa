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

#ifndef PERTURBML_IRRECOVER_HPP_
#define PERTURBML_IRRECOVER_HPP_

#include <cstdint>
#include <vector>

#include "perturbml/perturb.hpp"

namespace perturbml {

enum class IrrecovKind { mle_ising, glm_labels, pca_entries, maxmargin_flip };

// One irecoverability instance. For mle_ising, n counts samples in
// {-1,+1}^sqrt(p) and p must be a perfect square; for the other classes n
// counts published scalars (labels or matrix entries).
struct IrrecovQuery {
  IrrecovKind kind = IrrecovKind::glm_labels;
  double gamma = 0.5;  // target failure probability, in (0, 1]
  long n = 1;
  long p = 0;  // mle_ising only

  // Enforces the feasibility conditions: gamma <= 1 - 4/(n sqrt p) and
  // n <= 2^{sqrt(p)/4} for mle_ising, gamma <= 1 - 2/n otherwise. Throws
  // InfeasibleQueryError naming the violated condition.
  void validate() const;
};

// Fano lower bound on the recovery-failure probability,
//   1 - (I + log 2) / H,
// clipped to zero in the vacuous regime H <= I + log 2. Both arguments are
// in nats. Throws NonPositiveEntropyError for H <= 0.
double fano_failure_bound(double entropy_nats, double mutual_info_bound_nats);

// Entropy (in nats) of the restricted ensemble each theorem measures
// recovery against: n log 2 per published scalar, and the permutation-
// adjusted n sqrt(p) log 2 - n log n for mle_ising.
double restricted_ensemble_entropy(const IrrecovQuery& query);

// Noise threshold guaranteeing failure probability gamma. Gaussian classes
// return a minimal variance; maxmargin_flip returns the open interval of
// admissible keep probabilities. `q_hi_strict` is the narrower interval
// endpoint 1/2 + (1-gamma) log(2) / 8; `q_hi` the wider 1/2 + (1-gamma)/8.
struct NoiseThreshold {
  bool is_interval = false;
  double sigma_eta_sq = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
  double q_hi_strict = 0.0;
};

NoiseThreshold min_noise_variance(const IrrecovQuery& query);

// The mutual-information bound (nats) used inside each theorem's Fano step:
// 2 n sqrt(p) / sigma^2 for mle_ising, 4 n / sigma^2 for glm/pca, and
// (n/4)(2q - 1) log(q / (1-q)) for maxmargin_flip. The mechanism must match
// the class (MechanismMismatchError otherwise).
double pairwise_kl_mi_bound(const IrrecovQuery& query,
                            const PerturbationSpec& pert);

struct AdversaryResult {
  long trials = 0;
  long failures = 0;
  double failure_rate = 0.0;
  double gamma_target = 0.0;
  double stderr_rate = 0.0;
  bool pass = false;  // failure_rate >= gamma - 3 * stderr
  std::vector<std::uint8_t> per_trial;  // 1 where recovery failed
};

// Runs the Bayes-optimal adversary for the class under a uniform prior over
// the binary inputs and reports the empirical full-recovery failure rate:
//   glm_labels / pca_entries  sign thresholding of y + eta at zero,
//   maxmargin_flip            the identity map (MAP for q > 1/2),
//   mle_ising                 exhaustive MAP over all datasets, success
//                             judged up to sample permutation; restricted to
//                             sqrt(p) <= 4 and n <= 3
//                             (IntractableInstanceError beyond).
// The adversary observes the noised samples themselves, which is at least as
// informative as any published post-processing of them.
AdversaryResult simulate_adversary(const IrrecovQuery& query,
                                   const PerturbationSpec& pert, long trials,
                                   int jobs = 1);

}  // namespace perturbml

#endif  // PERTURBML_IRRECOVER_HPP_
