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

#include "perturbml/irrecover.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "perturbml/errors.hpp"
#include "perturbml/rng.hpp"
#include "parallel.hpp"

namespace perturbml {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long isqrt_exact(long p) {
  const long d = std::lround(std::sqrt(static_cast<double>(p)));
  if (d * d != p) {
    throw InfeasibleQueryError("mle_ising needs p to be a perfect square");
  }
  return d;
}

void check_mechanism(const IrrecovQuery& query, const PerturbationSpec& pert) {
  switch (query.kind) {
    case IrrecovKind::mle_ising:
      if (pert.kind != MechanismKind::ising_clamp) {
        throw MechanismMismatchError("mle_ising uses the ising_clamp pipeline");
      }
      return;
    case IrrecovKind::glm_labels:
    case IrrecovKind::pca_entries:
      if (pert.kind != MechanismKind::gaussian_additive) {
        throw MechanismMismatchError(
            "glm_labels/pca_entries use gaussian_additive noise");
      }
      return;
    case IrrecovKind::maxmargin_flip:
      if (pert.kind != MechanismKind::sign_flip) {
        throw MechanismMismatchError("maxmargin_flip uses the sign_flip channel");
      }
      return;
  }
  throw Error("unknown irrecoverability kind");
}

// Per-trial failure of the thresholding adversary on n uniform +/-1 scalars
// with additive Gaussian noise.
bool threshold_trial_fails(long n, double sigma, PhiloxRng& rng) {
  for (long i = 0; i < n; ++i) {
    const double y = rng.rademacher();
    const double z = y + sigma * rng.normal();
    const double decoded = z >= 0.0 ? 1.0 : -1.0;
    if (decoded != y) return true;
  }
  return false;
}

bool signflip_trial_fails(long n, double q, PhiloxRng& rng) {
  for (long i = 0; i < n; ++i) {
    // Identity decoding fails exactly when the entry was flipped.
    if (!rng.bernoulli(q)) return true;
  }
  return false;
}

// Exhaustive MAP decoding of an Ising dataset up to permutation. The
// adversary sees the noised samples and maximizes the posterior of the
// sample multiset under the uniform prior.
bool ising_trial_fails(long n, long d, double sigma, PhiloxRng& rng) {
  const long num_vectors = 1L << d;

  std::vector<int> truth(static_cast<size_t>(n));
  std::vector<std::vector<double>> observed(
      static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(d)));
  for (long i = 0; i < n; ++i) {
    int code = 0;
    for (long j = 0; j < d; ++j) {
      const double x = rng.rademacher();
      if (x > 0) code |= 1 << j;
      observed[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          x + sigma * rng.normal();
    }
    truth[static_cast<size_t>(i)] = code;
  }

  if (sigma == 0.0) return false;  // noiseless channel: decoding is exact

  // Log-likelihood of candidate vector v for observation i (common constants
  // dropped).
  std::vector<std::vector<double>> loglik(
      static_cast<size_t>(n),
      std::vector<double>(static_cast<size_t>(num_vectors)));
  for (long i = 0; i < n; ++i) {
    for (long v = 0; v < num_vectors; ++v) {
      double ss = 0.0;
      for (long j = 0; j < d; ++j) {
        const double coord = (v >> j) & 1 ? 1.0 : -1.0;
        const double diff = observed[static_cast<size_t>(i)]
                                    [static_cast<size_t>(j)] - coord;
        ss += diff * diff;
      }
      loglik[static_cast<size_t>(i)][static_cast<size_t>(v)] =
          -ss / (2.0 * sigma * sigma);
    }
  }

  // Accumulate posterior mass per multiset over all ordered assignments.
  std::vector<int> assignment(static_cast<size_t>(n), 0);
  std::vector<int> key;
  double max_loglik = -kInf;
  std::vector<std::pair<std::vector<int>, double>> ordered;
  while (true) {
    double ll = 0.0;
    for (long i = 0; i < n; ++i) {
      ll += loglik[static_cast<size_t>(i)]
                  [static_cast<size_t>(assignment[static_cast<size_t>(i)])];
    }
    key.assign(assignment.begin(), assignment.end());
    std::sort(key.begin(), key.end());
    ordered.emplace_back(key, ll);
    max_loglik = std::max(max_loglik, ll);

    long pos = n - 1;
    while (pos >= 0 &&
           ++assignment[static_cast<size_t>(pos)] == num_vectors) {
      assignment[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  for (auto& entry : ordered) {
    entry.second = std::exp(entry.second - max_loglik);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<int> best_multiset;
  double best_mass = -1.0;
  size_t i = 0;
  while (i < ordered.size()) {
    double mass = 0.0;
    size_t j = i;
    while (j < ordered.size() && ordered[j].first == ordered[i].first) {
      mass += ordered[j].second;
      ++j;
    }
    if (mass > best_mass) {
      best_mass = mass;
      best_multiset = ordered[i].first;
    }
    i = j;
  }

  std::vector<int> truth_sorted = truth;
  std::sort(truth_sorted.begin(), truth_sorted.end());
  return best_multiset != truth_sorted;
}

}  // namespace

void IrrecovQuery::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InfeasibleQueryError("gamma must lie in (0, 1]");
  }
  if (n < 1) throw InfeasibleQueryError("n must be >= 1");
  if (kind == IrrecovKind::mle_ising) {
    const long d = isqrt_exact(p);
    const double cap = 1.0 - 4.0 / (static_cast<double>(n) * d);
    if (gamma > cap) {
      throw InfeasibleQueryError(
          "infeasible: gamma exceeds 1 - 4/(n sqrt(p))");
    }
    if (static_cast<double>(n) > std::pow(2.0, d / 4.0) + 1e-9) {
      throw InfeasibleQueryError("infeasible: n exceeds 2^{sqrt(p)/4}");
    }
    return;
  }
  const double cap = 1.0 - 2.0 / static_cast<double>(n);
  if (gamma > cap) {
    throw InfeasibleQueryError("infeasible: gamma exceeds 1 - 2/n");
  }
}

double fano_failure_bound(double entropy_nats, double mutual_info_bound_nats) {
  if (entropy_nats <= 0.0) {
    throw NonPositiveEntropyError("entropy must be positive");
  }
  if (entropy_nats <= mutual_info_bound_nats + M_LN2) {
    return 0.0;  // vacuous regime
  }
  return 1.0 - (mutual_info_bound_nats + M_LN2) / entropy_nats;
}

double restricted_ensemble_entropy(const IrrecovQuery& query) {
  const double n = static_cast<double>(query.n);
  if (query.kind == IrrecovKind::mle_ising) {
    const double d = static_cast<double>(isqrt_exact(query.p));
    return n * d * M_LN2 - n * std::log(n);
  }
  return n * M_LN2;
}

NoiseThreshold min_noise_variance(const IrrecovQuery& query) {
  query.validate();
  NoiseThreshold threshold;
  switch (query.kind) {
    case IrrecovKind::mle_ising:
      threshold.sigma_eta_sq = 4.0 / ((1.0 - query.gamma) * M_LN2);
      return threshold;
    case IrrecovKind::glm_labels:
    case IrrecovKind::pca_entries:
      threshold.sigma_eta_sq = 8.0 / ((1.0 - query.gamma) * M_LN2);
      return threshold;
    case IrrecovKind::maxmargin_flip:
      threshold.is_interval = true;
      threshold.q_lo = 0.5;
      threshold.q_hi = 0.5 + (1.0 - query.gamma) / 8.0;
      threshold.q_hi_strict = 0.5 + (1.0 - query.gamma) * M_LN2 / 8.0;
      return threshold;
  }
  throw Error("unknown irrecoverability kind");
}

double pairwise_kl_mi_bound(const IrrecovQuery& query,
                            const PerturbationSpec& pert) {
  check_mechanism(query, pert);
  const double n = static_cast<double>(query.n);
  switch (query.kind) {
    case IrrecovKind::mle_ising: {
      if (pert.sigma_eta <= 0.0) return kInf;
      const double d = static_cast<double>(isqrt_exact(query.p));
      return 2.0 * n * d / (pert.sigma_eta * pert.sigma_eta);
    }
    case IrrecovKind::glm_labels:
    case IrrecovKind::pca_entries:
      if (pert.sigma_eta <= 0.0) return kInf;
      return 4.0 * n / (pert.sigma_eta * pert.sigma_eta);
    case IrrecovKind::maxmargin_flip: {
      const double q = pert.q;
      if (q <= 0.0 || q > 1.0) {
        throw MechanismMismatchError("keep probability must lie in (0, 1]");
      }
      if (q == 1.0) return kInf;
      if (q == 0.5) return 0.0;
      return n / 4.0 * (2.0 * q - 1.0) * std::log(q / (1.0 - q));
    }
  }
  throw Error("unknown irrecoverability kind");
}

AdversaryResult simulate_adversary(const IrrecovQuery& query,
                                   const PerturbationSpec& pert, long trials,
                                   int jobs) {
  query.validate();
  check_mechanism(query, pert);
  pert.validate();
  if (trials < 1000) {
    throw Error("simulate_adversary needs at least 1000 trials");
  }
  long d = 0;
  if (query.kind == IrrecovKind::mle_ising) {
    d = isqrt_exact(query.p);
    if (d > 4 || query.n > 3) {
      throw IntractableInstanceError(
          "exhaustive MAP supports sqrt(p) <= 4 and n <= 3");
    }
  }

  std::vector<char> failed(static_cast<size_t>(trials), 0);
  parallel_for(trials, jobs, [&](long t) {
    const auto seed = philox4x64_block({static_cast<std::uint64_t>(t), 0, 0, 0},
                                       {pert.seed, 0x616476657273ULL});
    PhiloxRng rng(seed[0], 0);
    bool fails = false;
    switch (query.kind) {
      case IrrecovKind::glm_labels:
      case IrrecovKind::pca_entries:
        fails = threshold_trial_fails(query.n, pert.sigma_eta, rng);
        break;
      case IrrecovKind::maxmargin_flip:
        fails = signflip_trial_fails(query.n, pert.q, rng);
        break;
      case IrrecovKind::mle_ising:
        fails = ising_trial_fails(query.n, d, pert.sigma_eta, rng);
        break;
    }
    failed[static_cast<size_t>(t)] = fails ? 1 : 0;
  });

  AdversaryResult result;
  result.trials = trials;
  result.per_trial.assign(failed.begin(), failed.end());
  for (char f : failed) result.failures += f;
  result.failure_rate =
      static_cast<double>(result.failures) / static_cast<double>(trials);
  result.gamma_target = query.gamma;
  result.stderr_rate = std::sqrt(result.failure_rate *
                                 (1.0 - result.failure_rate) /
                                 static_cast<double>(trials));
  result.pass =
      result.failure_rate >= query.gamma - 3.0 * result.stderr_rate;
  return result;
}

}  // namespace perturbml
