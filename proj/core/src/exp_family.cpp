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

#include "perturbml/exp_family.hpp"

#include <cmath>
#include <limits>

#include "perturbml/errors.hpp"

namespace perturbml {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_theta_shape(const ProblemSpec& spec, const Hypothesis& theta) {
  if (theta.shape() != spec.true_hypothesis.shape()) {
    throw ShapeMismatchError("hypothesis shape does not match problem spec");
  }
}

void check_finite(double loss) {
  if (!std::isfinite(loss)) {
    throw NonFiniteObjectiveError("loss evaluated to a non-finite value");
  }
}

double hinge(double k, double z) { return k * std::max(0.0, 1.0 - z); }

// Subgradient with the convention f'(1) = 0 at the kink.
double hinge_grad(double k, double z) { return z < 1.0 ? -k : 0.0; }

// min over nu of -t * nu + log Z(nu), the tightest per-coordinate lower
// bound on the likelihood loss. -infinity when the Bernoulli loss is
// unbounded below (|t| > 1).
double pointwise_loss_min(Family family, double t) {
  switch (family) {
    case Family::bernoulli_pm1: {
      const double a = std::abs(t);
      if (a > 1.0) return -kInf;
      if (a == 1.0) return 0.0;
      // minimizer nu = atanh(t); log 2cosh(atanh t) = log 2 - log(1-t^2)/2
      return -t * std::atanh(t) + M_LN2 - 0.5 * std::log1p(-t * t);
    }
    case Family::gaussian_unit:
      return -0.5 * t * t + kLogSqrt2Pi;
  }
  throw Error("unknown family");
}

// Shared glm/nonparam loss on an expanded design.
double glm_loss(const ProblemSpec& spec, const Eigen::VectorXd& nu,
                const Eigen::MatrixXd& labels) {
  const Eigen::Index n = labels.rows();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    loss += -labels(i, 0) * nu(i) + log_partition_scalar(spec.family, nu(i));
  }
  return loss / static_cast<double>(n);
}

Eigen::MatrixXd design_or_basis(const ProblemSpec& spec) {
  return spec.kind == ProblemKind::nonparam_regression
             ? nonparam_design_matrix(spec, spec.design)
             : spec.design;
}

}  // namespace

double log_partition_scalar(Family family, double nu) {
  switch (family) {
    case Family::bernoulli_pm1: {
      // log(e^nu + e^-nu) = |nu| + log(1 + e^{-2|nu|})
      const double a = std::abs(nu);
      return a + std::log1p(std::exp(-2.0 * a));
    }
    case Family::gaussian_unit:
      return 0.5 * nu * nu + kLogSqrt2Pi;
  }
  throw Error("unknown family");
}

double log_partition(const ProblemSpec& spec, double nu) {
  if (spec.kind == ProblemKind::maxmargin_mf) {
    throw UnsupportedFamilyError(
        "maxmargin_mf has no exponential-family partition function");
  }
  return log_partition_scalar(spec.family, nu);
}

double mean_parameter(Family family, double nu) {
  switch (family) {
    case Family::bernoulli_pm1:
      return std::tanh(nu);
    case Family::gaussian_unit:
      return nu;
  }
  throw Error("unknown family");
}

double empirical_loss(const ProblemSpec& spec, const Hypothesis& theta,
                      const Dataset& data) {
  check_theta_shape(spec, theta);
  double loss = 0.0;
  switch (spec.kind) {
    case ProblemKind::mle_expfam: {
      if (data.values.cols() != theta.size()) {
        throw ShapeMismatchError("sample width must equal hypothesis size");
      }
      const Eigen::VectorXd stats = data.values.colwise().mean();
      loss = -stats.dot(theta.values.col(0));
      for (Eigen::Index j = 0; j < theta.size(); ++j) {
        loss += log_partition_scalar(spec.family, theta.values(j, 0));
      }
      break;
    }
    case ProblemKind::glm_fixed:
    case ProblemKind::nonparam_regression: {
      if (data.values.rows() != spec.design.rows() || data.values.cols() != 1) {
        throw ShapeMismatchError("labels must be one column per design row");
      }
      const Eigen::VectorXd nu = design_or_basis(spec) * theta.values.col(0);
      loss = glm_loss(spec, nu, data.values);
      break;
    }
    case ProblemKind::expfam_pca: {
      if (data.values.rows() != theta.values.rows() ||
          data.values.cols() != theta.values.cols()) {
        throw ShapeMismatchError("observation matrix must match hypothesis");
      }
      for (Eigen::Index i = 0; i < theta.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < theta.values.cols(); ++j) {
          loss += -data.values(i, j) * theta.values(i, j) +
                  log_partition_scalar(spec.family, theta.values(i, j));
        }
      }
      loss /= static_cast<double>(theta.size());
      break;
    }
    case ProblemKind::maxmargin_mf: {
      if (data.values.rows() != theta.values.rows() ||
          data.values.cols() != theta.values.cols()) {
        throw ShapeMismatchError("observation matrix must match hypothesis");
      }
      for (Eigen::Index i = 0; i < theta.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < theta.values.cols(); ++j) {
          loss += hinge(spec.lipschitz_K,
                        data.values(i, j) * theta.values(i, j));
        }
      }
      loss /= static_cast<double>(theta.size());
      break;
    }
  }
  check_finite(loss);
  return loss;
}

double mle_loss_from_stats(const ProblemSpec& spec, const Hypothesis& theta,
                           const SufficientStatistic& stat) {
  check_theta_shape(spec, theta);
  if (stat.values.size() != theta.size()) {
    throw ShapeMismatchError("statistic size must equal hypothesis size");
  }
  const double scale =
      stat.summed ? 1.0 / static_cast<double>(stat.sample_count) : 1.0;
  double loss = 0.0;
  const auto stat_flat = stat.values.reshaped();
  const auto theta_flat = theta.values.reshaped();
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    loss += -scale * stat_flat(j) * theta_flat(j) +
            log_partition_scalar(spec.family, theta_flat(j));
  }
  check_finite(loss);
  return loss;
}

double expected_loss(const ProblemSpec& spec, const Hypothesis& theta) {
  check_theta_shape(spec, theta);
  double loss = 0.0;
  switch (spec.kind) {
    case ProblemKind::mle_expfam: {
      for (Eigen::Index j = 0; j < theta.size(); ++j) {
        const double expected_stat =
            mean_parameter(spec.family, spec.true_hypothesis.values(j, 0));
        loss += -expected_stat * theta.values(j, 0) +
                log_partition_scalar(spec.family, theta.values(j, 0));
      }
      break;
    }
    case ProblemKind::glm_fixed:
    case ProblemKind::nonparam_regression: {
      const Eigen::MatrixXd x = design_or_basis(spec);
      const Eigen::VectorXd nu_star = x * spec.true_hypothesis.values.col(0);
      const Eigen::VectorXd nu = x * theta.values.col(0);
      const Eigen::Index n = x.rows();
      for (Eigen::Index i = 0; i < n; ++i) {
        loss += -mean_parameter(spec.family, nu_star(i)) * nu(i) +
                log_partition_scalar(spec.family, nu(i));
      }
      loss /= static_cast<double>(n);
      break;
    }
    case ProblemKind::expfam_pca: {
      for (Eigen::Index i = 0; i < theta.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < theta.values.cols(); ++j) {
          const double expected_stat =
              mean_parameter(spec.family, spec.true_hypothesis.values(i, j));
          loss += -expected_stat * theta.values(i, j) +
                  log_partition_scalar(spec.family, theta.values(i, j));
        }
      }
      loss /= static_cast<double>(theta.size());
      break;
    }
    case ProblemKind::maxmargin_mf:
      return expected_loss_signflip(spec, theta, 1.0);
  }
  check_finite(loss);
  return loss;
}

double expected_loss_signflip(const ProblemSpec& spec, const Hypothesis& theta,
                              double keep_prob) {
  check_theta_shape(spec, theta);
  if (spec.kind != ProblemKind::maxmargin_mf) {
    throw WrongKindError("sign-flip population loss applies to maxmargin_mf");
  }
  const double p_plus = keep_prob * spec.plus_prob +
                        (1.0 - keep_prob) * (1.0 - spec.plus_prob);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < theta.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < theta.values.cols(); ++j) {
      loss += p_plus * hinge(spec.lipschitz_K, theta.values(i, j)) +
              (1.0 - p_plus) * hinge(spec.lipschitz_K, -theta.values(i, j));
    }
  }
  loss /= static_cast<double>(theta.size());
  check_finite(loss);
  return loss;
}

Eigen::MatrixXd loss_gradient(const ProblemSpec& spec, const Hypothesis& theta,
                              const Dataset& data) {
  check_theta_shape(spec, theta);
  Eigen::MatrixXd grad(theta.values.rows(), theta.values.cols());
  switch (spec.kind) {
    case ProblemKind::mle_expfam: {
      if (data.values.cols() != theta.size()) {
        throw ShapeMismatchError("sample width must equal hypothesis size");
      }
      const Eigen::VectorXd stats = data.values.colwise().mean();
      for (Eigen::Index j = 0; j < theta.size(); ++j) {
        grad(j, 0) =
            -stats(j) + mean_parameter(spec.family, theta.values(j, 0));
      }
      break;
    }
    case ProblemKind::glm_fixed:
    case ProblemKind::nonparam_regression: {
      if (data.values.rows() != spec.design.rows() || data.values.cols() != 1) {
        throw ShapeMismatchError("labels must be one column per design row");
      }
      const Eigen::MatrixXd x = design_or_basis(spec);
      const Eigen::VectorXd nu = x * theta.values.col(0);
      Eigen::VectorXd residual(nu.size());
      for (Eigen::Index i = 0; i < nu.size(); ++i) {
        residual(i) =
            -data.values(i, 0) + mean_parameter(spec.family, nu(i));
      }
      grad = x.transpose() * residual / static_cast<double>(nu.size());
      break;
    }
    case ProblemKind::expfam_pca: {
      if (data.values.rows() != theta.values.rows() ||
          data.values.cols() != theta.values.cols()) {
        throw ShapeMismatchError("observation matrix must match hypothesis");
      }
      for (Eigen::Index i = 0; i < theta.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < theta.values.cols(); ++j) {
          grad(i, j) = (-data.values(i, j) +
                        mean_parameter(spec.family, theta.values(i, j))) /
                       static_cast<double>(theta.size());
        }
      }
      break;
    }
    case ProblemKind::maxmargin_mf: {
      if (data.values.rows() != theta.values.rows() ||
          data.values.cols() != theta.values.cols()) {
        throw ShapeMismatchError("observation matrix must match hypothesis");
      }
      for (Eigen::Index i = 0; i < theta.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < theta.values.cols(); ++j) {
          const double x = data.values(i, j);
          grad(i, j) = x *
                       hinge_grad(spec.lipschitz_K, x * theta.values(i, j)) /
                       static_cast<double>(theta.size());
        }
      }
      break;
    }
  }
  return grad;
}

SufficientStatistic empirical_stats(const ProblemSpec& spec,
                                    const Dataset& data) {
  if (spec.kind != ProblemKind::mle_expfam) {
    throw WrongKindError("empirical_stats is defined for mle_expfam");
  }
  SufficientStatistic stat;
  stat.values = data.values.colwise().mean().transpose();
  stat.sample_count = data.values.rows();
  stat.summed = false;
  return stat;
}

double empirical_loss_lower_bound(const ProblemSpec& spec,
                                  const Dataset& data) {
  switch (spec.kind) {
    case ProblemKind::mle_expfam: {
      const Eigen::VectorXd stats = data.values.colwise().mean();
      double bound = 0.0;
      for (Eigen::Index j = 0; j < stats.size(); ++j) {
        bound += pointwise_loss_min(spec.family, stats(j));
      }
      return bound;
    }
    case ProblemKind::glm_fixed:
    case ProblemKind::nonparam_regression: {
      double bound = 0.0;
      for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
        bound += pointwise_loss_min(spec.family, data.values(i, 0));
      }
      return bound / static_cast<double>(data.values.rows());
    }
    case ProblemKind::expfam_pca: {
      double bound = 0.0;
      for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
          bound += pointwise_loss_min(spec.family, data.values(i, j));
        }
      }
      return bound / static_cast<double>(data.values.size());
    }
    case ProblemKind::maxmargin_mf:
      return 0.0;
  }
  throw Error("unknown problem kind");
}

Hypothesis maxmargin_true_hypothesis(const ProblemSpec& spec) {
  return maxmargin_true_hypothesis_signflip(spec, 1.0);
}

Hypothesis maxmargin_true_hypothesis_signflip(const ProblemSpec& spec,
                                              double keep_prob) {
  if (spec.kind != ProblemKind::maxmargin_mf) {
    throw WrongKindError("maxmargin true hypothesis requires maxmargin_mf");
  }
  const double p_plus = keep_prob * spec.plus_prob +
                        (1.0 - keep_prob) * (1.0 - spec.plus_prob);
  double value = 0.0;
  if (p_plus > 0.5) value = 1.0;
  if (p_plus < 0.5) value = -1.0;
  Hypothesis h = spec.true_hypothesis;
  h.values.setConstant(value);
  return h;
}

double sigma_x_bound(Family family) {
  switch (family) {
    case Family::bernoulli_pm1:
    case Family::gaussian_unit:
      return 1.0;
  }
  throw Error("unknown family");
}

}  // namespace perturbml
