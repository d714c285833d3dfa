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

#include "perturbml/perturb.hpp"

#include <cmath>

#include "perturbml/errors.hpp"

namespace perturbml {
namespace {

void check_kind(const PerturbationSpec& spec, MechanismKind expected,
                const char* op) {
  if (spec.kind != expected) {
    throw WrongKindError(std::string(op) + ": mechanism kind mismatch");
  }
}

void check_binary(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 1.0 && m(i, j) != -1.0) {
        throw NonBinaryDataError(std::string(what) +
                                 ": entries must be -1 or +1");
      }
    }
  }
}

// Splittable per-trial seed derivation through the block cipher itself.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                          std::uint64_t index) {
  return philox4x64_block({index, 0, 0, 0}, {seed, tag})[0];
}

Eigen::MatrixXd add_row_stream_noise(const Eigen::MatrixXd& data, double sigma,
                                     std::uint64_t seed) {
  Eigen::MatrixXd out = data;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    PhiloxRng rng(seed, static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) += sigma * rng.normal();
    }
  }
  return out;
}

}  // namespace

void PerturbationSpec::validate() const {
  if (sigma_eta < 0.0) {
    throw WrongKindError("sigma_eta must be nonnegative");
  }
  if (kind == MechanismKind::sign_flip && (q <= 0.5 || q > 1.0)) {
    throw WrongKindError("sign_flip requires keep probability q in (1/2, 1]");
  }
}

Eigen::MatrixXd perturb_gaussian(const Eigen::MatrixXd& data,
                                 const PerturbationSpec& spec) {
  check_kind(spec, MechanismKind::gaussian_additive, "perturb_gaussian");
  spec.validate();
  if (spec.sigma_eta == 0.0) return data;
  return add_row_stream_noise(data, spec.sigma_eta, spec.seed);
}

SufficientStatistic perturb_ising_stats(const Eigen::MatrixXd& samples,
                                        const PerturbationSpec& spec) {
  check_kind(spec, MechanismKind::ising_clamp, "perturb_ising_stats");
  spec.validate();
  check_binary(samples, "perturb_ising_stats");
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    PhiloxRng rng(spec.seed, static_cast<std::uint64_t>(i));
    Eigen::VectorXd noisy = samples.row(i).transpose();
    for (Eigen::Index j = 0; j < d; ++j) {
      noisy(j) += spec.sigma_eta * rng.normal();
    }
    sum.noalias() += noisy * noisy.transpose();
  }
  sum.diagonal().setZero();
  sum = sum.cwiseMax(-1.0).cwiseMin(1.0);

  SufficientStatistic stat;
  stat.values = sum;
  stat.sample_count = n;
  stat.summed = true;
  return stat;
}

Eigen::MatrixXd perturb_signflip(const Eigen::MatrixXd& matrix,
                                 const PerturbationSpec& spec) {
  check_kind(spec, MechanismKind::sign_flip, "perturb_signflip");
  spec.validate();
  check_binary(matrix, "perturb_signflip");
  Eigen::MatrixXd out = matrix;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    PhiloxRng rng(spec.seed, static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if (!rng.bernoulli(spec.q)) out(i, j) = -out(i, j);
    }
  }
  return out;
}

Dataset perturb_dataset(const ProblemSpec& problem, const Dataset& data,
                        const PerturbationSpec& spec) {
  spec.validate();
  Dataset out;
  out.perturbed = true;
  switch (spec.kind) {
    case MechanismKind::identity:
      out.values = data.values;
      return out;
    case MechanismKind::gaussian_additive:
      if (problem.kind == ProblemKind::maxmargin_mf) {
        throw WrongKindError("maxmargin_mf data is perturbed by sign_flip");
      }
      out.values = perturb_gaussian(data.values, spec);
      return out;
    case MechanismKind::sign_flip:
      if (problem.kind != ProblemKind::maxmargin_mf) {
        throw WrongKindError("sign_flip applies to maxmargin_mf data");
      }
      out.values = perturb_signflip(data.values, spec);
      return out;
    case MechanismKind::ising_clamp:
      throw WrongKindError(
          "ising_clamp publishes a sufficient statistic, not a dataset");
  }
  throw Error("unknown mechanism kind");
}

UnbiasednessReport check_unbiased(const PerturbationSpec& spec,
                                  const Eigen::MatrixXd& sample, long trials) {
  if (trials < 10000) {
    throw Error("check_unbiased needs at least 10^4 trials");
  }
  spec.validate();

  const bool ising = spec.kind == MechanismKind::ising_clamp;
  Eigen::MatrixXd target;  // t(x)
  Eigen::Index rows, cols;
  if (ising) {
    if (sample.rows() != 1) {
      throw ShapeMismatchError("ising_clamp check takes a single sample row");
    }
    target = sample.transpose() * sample;
    target.diagonal().setZero();
    rows = cols = sample.cols();
  } else {
    target = sample;
    rows = sample.rows();
    cols = sample.cols();
  }

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(rows, cols);
  for (long t = 0; t < trials; ++t) {
    PerturbationSpec trial_spec = spec;
    trial_spec.seed = derive_seed(spec.seed, 0x756e626961736564ULL,
                                  static_cast<std::uint64_t>(t));
    Eigen::MatrixXd psi;
    switch (spec.kind) {
      case MechanismKind::identity:
        psi = sample;
        break;
      case MechanismKind::gaussian_additive:
        psi = perturb_gaussian(sample, trial_spec);
        break;
      case MechanismKind::sign_flip:
        psi = perturb_signflip(sample, trial_spec);
        break;
      case MechanismKind::ising_clamp:
        psi = perturb_ising_stats(sample, trial_spec).values;
        break;
    }
    const Eigen::MatrixXd delta = psi - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta.cwiseProduct(psi - mean);
  }

  UnbiasednessReport report;
  report.bias = mean - target;
  report.stderr_bias =
      (m2 / static_cast<double>(trials - 1) / static_cast<double>(trials))
          .cwiseSqrt();
  report.pass = true;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (ising && i == j) continue;  // diagonal is removed, not published
      if (std::abs(report.bias(i, j)) > 4.0 * report.stderr_bias(i, j)) {
        report.pass = false;
      }
    }
  }
  return report;
}

MgfCheckReport subgaussian_mgf_check(double sigma_x, double sigma_eta,
                                     const std::vector<double>& lambdas,
                                     long draws, std::uint64_t seed) {
  MgfCheckReport report;
  report.lambdas = lambdas;
  report.pass = true;
  PhiloxRng rng(seed, 0);
  std::vector<double> psi(static_cast<size_t>(draws));
  for (auto& v : psi) {
    v = sigma_x * rng.rademacher() + sigma_eta * rng.normal();
  }
  const double sigma_sq = sigma_x * sigma_x + sigma_eta * sigma_eta;
  for (double lambda : lambdas) {
    double acc = 0.0;
    for (double v : psi) acc += std::exp(lambda * v);
    const double empirical = acc / static_cast<double>(draws);
    const double envelope = 1.05 * std::exp(0.5 * sigma_sq * lambda * lambda);
    report.empirical_mgf.push_back(empirical);
    report.envelope.push_back(envelope);
    if (empirical > envelope) report.pass = false;
  }
  return report;
}

VarianceCheckReport variance_composition_check(double sigma_x,
                                               double sigma_eta, long draws,
                                               std::uint64_t seed) {
  PhiloxRng rng(seed, 1);
  double mean = 0.0, m2 = 0.0;
  std::vector<double> psi(static_cast<size_t>(draws));
  for (long i = 0; i < draws; ++i) {
    const double v = sigma_x * rng.rademacher() + sigma_eta * rng.normal();
    psi[static_cast<size_t>(i)] = v;
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  VarianceCheckReport report;
  report.sample_variance = m2 / static_cast<double>(draws - 1);
  report.bound = sigma_x * sigma_x + sigma_eta * sigma_eta;
  // Standard error of the sample variance from the fourth central moment.
  double m4 = 0.0;
  for (double v : psi) {
    const double c = v - mean;
    m4 += c * c * c * c;
  }
  m4 /= static_cast<double>(draws);
  const double var = report.sample_variance;
  report.stderr_variance =
      std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(draws));
  report.pass = var <= report.bound + 3.0 * report.stderr_variance;
  return report;
}

}  // namespace perturbml
