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

#include "perturbml/optimize.hpp"

#include <cmath>
#include <limits>

#include "perturbml/errors.hpp"
#include "perturbml/exp_family.hpp"

namespace perturbml {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Hypothesis start_point(const ProblemSpec& spec, const SolveConfig& cfg) {
  if (cfg.init != nullptr) {
    if (cfg.init->shape() != spec.true_hypothesis.shape()) {
      throw ShapeMismatchError("initial point shape mismatch");
    }
    return *cfg.init;
  }
  return Hypothesis::Zeros(spec.true_hypothesis.shape(),
                           spec.true_hypothesis.norm_tag);
}

// Closed-form unregularized minimizer for coordinate-separable likelihoods,
// used to certify lambda = 0 solves. Empty when no closed form applies.
bool separable_minimizer(const ProblemSpec& spec, const Dataset& data,
                         Eigen::MatrixXd& out) {
  auto invert = [&](double t, double& nu) {
    if (spec.family == Family::gaussian_unit) {
      nu = t;
      return true;
    }
    if (std::abs(t) >= 1.0) return false;
    nu = std::atanh(t);
    return true;
  };
  switch (spec.kind) {
    case ProblemKind::mle_expfam: {
      const Eigen::VectorXd stats = data.values.colwise().mean();
      out.resize(stats.size(), 1);
      for (Eigen::Index j = 0; j < stats.size(); ++j) {
        if (!invert(stats(j), out(j, 0))) return false;
      }
      return true;
    }
    case ProblemKind::expfam_pca: {
      out.resize(data.values.rows(), data.values.cols());
      for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
          if (!invert(data.values(i, j), out(i, j))) return false;
        }
      }
      return true;
    }
    default:
      return false;
  }
}

// Upper bound on |x_pre - theta_opt|_F. Every supported regularizer
// satisfies R(theta) >= |theta|_F, so lambda |theta_opt|_F <= F(theta_opt) -
// inf f <= current_objective - f_lower.
double radius_bound(const ProblemSpec& spec, const Dataset& data,
                    double lambda, double f_lower, double objective,
                    const Eigen::MatrixXd& x_pre) {
  if (lambda > 0.0 && std::isfinite(f_lower)) {
    return x_pre.norm() + std::max(0.0, objective - f_lower) / lambda;
  }
  if (lambda == 0.0) {
    Eigen::MatrixXd opt;
    if (separable_minimizer(spec, data, opt)) {
      return (x_pre - opt).norm();
    }
  }
  return kInf;
}

SolveResult solve_smooth(const ProblemSpec& spec, const Dataset& data,
                         const RegularizerSpec& reg, double lambda,
                         const SolveConfig& cfg) {
  Hypothesis x = start_point(spec, cfg);
  double f = empirical_loss(spec, x, data);
  double objective = f + (lambda > 0 ? lambda * reg_value(reg, x) : 0.0);
  const double f_lower = empirical_loss_lower_bound(spec, data);
  const double s_init = cfg.fixed_step;
  double s = s_init;

  SolveResult result;
  result.theta = x;
  result.certificate.objective_value = objective;
  result.certificate.duality_or_progress_gap = kInf;

  Hypothesis cand = x;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const Eigen::MatrixXd grad = loss_gradient(spec, x, data);
    const Eigen::MatrixXd x_pre = x.values;
    const double f_pre = f;

    double f_cand = 0.0;
    bool majorized = false;
    while (true) {
      if (lambda > 0.0) {
        Hypothesis v = x;
        v.values = x.values - s * grad;
        cand = prox(reg, v, s * lambda);
      } else {
        cand.values = x.values - s * grad;
      }
      const Eigen::MatrixXd dx = cand.values - x_pre;
      f_cand = empirical_loss(spec, cand, data);
      majorized = f_cand <= f_pre + grad.cwiseProduct(dx).sum() +
                                dx.squaredNorm() / (2.0 * s) + 1e-12;
      if (cfg.step_rule == StepRule::fixed || majorized || s < 1e-18) break;
      s *= 0.5;
    }

    const double move = (cand.values - x_pre).norm();
    const double mapping_norm = move / s;
    x = cand;
    f = f_cand;
    objective = f + (lambda > 0 ? lambda * reg_value(reg, x) : 0.0);
    if (!std::isfinite(objective)) {
      throw NonFiniteObjectiveError("objective became non-finite");
    }
    if (cfg.observer) cfg.observer(iter, objective);

    result.theta = x;
    result.certificate.objective_value = objective;
    result.certificate.iterations = iter;
    if (majorized) {
      const double radius =
          radius_bound(spec, data, lambda, f_lower, objective, x_pre);
      result.certificate.duality_or_progress_gap = mapping_norm * radius;
      if (result.certificate.duality_or_progress_gap <= cfg.xi) {
        result.certificate.converged = true;
        return result;
      }
    }
    if (mapping_norm <= cfg.tol_grad) return result;  // stalled
    if (cfg.step_rule == StepRule::backtracking) s = std::min(2.0 * s, s_init);
  }
  return result;  // max iters exceeded: best iterate, converged = false
}

SolveResult solve_hinge(const ProblemSpec& spec, const Dataset& data,
                        const RegularizerSpec& reg, double lambda,
                        const SolveConfig& cfg) {
  Hypothesis x = start_point(spec, cfg);
  const double init_norm = x.values.norm();
  auto objective_at = [&](const Hypothesis& h) {
    return empirical_loss(spec, h, data) +
           (lambda > 0 ? lambda * reg_value(reg, h) : 0.0);
  };

  Hypothesis best = x;
  double best_obj = objective_at(x);
  Eigen::MatrixXd averaged = Eigen::MatrixXd::Zero(x.values.rows(),
                                                   x.values.cols());
  double step_sum = 0.0;
  double slack_sum = 0.0;  // sum of s^2 |g|^2 / 2 + s L_f |move|
  // Any hinge subgradient has Frobenius norm at most K / sqrt(#entries).
  const double lipschitz =
      spec.lipschitz_K / std::sqrt(static_cast<double>(hypothesis_dim(spec)));

  SolveResult result;
  result.theta = best;
  result.certificate.objective_value = best_obj;
  result.certificate.duality_or_progress_gap = kInf;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const double s = cfg.step_rule == StepRule::fixed
                         ? cfg.fixed_step
                         : cfg.fixed_step / std::sqrt(static_cast<double>(iter));
    const Eigen::MatrixXd grad = loss_gradient(spec, x, data);
    Hypothesis v = x;
    v.values = x.values - s * grad;
    Hypothesis next = lambda > 0 ? prox(reg, v, s * lambda) : v;

    const double move = (next.values - x.values).norm();
    step_sum += s;
    slack_sum += 0.5 * s * s * grad.squaredNorm() + s * lipschitz * move;
    averaged += s * next.values;

    x = next;
    const double obj = objective_at(x);
    if (!std::isfinite(obj)) {
      throw NonFiniteObjectiveError("objective became non-finite");
    }
    if (cfg.observer) cfg.observer(iter, obj);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }

    result.certificate.iterations = iter;
    if (lambda > 0.0) {
      // |theta_opt| <= F(theta_opt)/lambda <= best_obj/lambda; hinge >= 0.
      const double radius = init_norm + best_obj / lambda;
      result.certificate.duality_or_progress_gap =
          (0.5 * radius * radius + slack_sum) / step_sum;
    }

    // Prefer the averaged iterate when it beats the best single iterate; the
    // same telescoped bound certifies it by convexity.
    Hypothesis avg = x;
    avg.values = averaged / step_sum;
    const double avg_obj = objective_at(avg);
    if (avg_obj < best_obj) {
      best_obj = avg_obj;
      best = avg;
    }

    result.theta = best;
    result.certificate.objective_value = best_obj;
    if (result.certificate.duality_or_progress_gap <= cfg.xi) {
      result.certificate.converged = true;
      return result;
    }
  }
  return result;
}

}  // namespace

void SolveConfig::validate() const {
  if (alpha < 2.0) {
    throw AlphaBelowTwoError("solver alpha must be at least 2");
  }
  if (xi <= 0.0) throw Error("xi must be positive");
  if (max_iters < 1) throw Error("max_iters must be positive");
  if (fixed_step <= 0.0) throw Error("step must be positive");
}

double penalty_parameter(double alpha, double eps_n_delta) {
  if (alpha < 2.0) {
    throw AlphaBelowTwoError("penalty parameter requires alpha >= 2");
  }
  if (eps_n_delta <= 0.0) {
    throw Error("penalty parameter requires a positive rate");
  }
  return alpha * eps_n_delta;
}

SolveResult minimize(const ProblemSpec& spec, const Dataset& data,
                     const RegularizerSpec& reg, double lambda_n,
                     const SolveConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (lambda_n < 0.0) throw Error("lambda_n must be nonnegative");
  if (spec.kind == ProblemKind::maxmargin_mf) {
    return solve_hinge(spec, data, reg, lambda_n, cfg);
  }
  return solve_smooth(spec, data, reg, lambda_n, cfg);
}

}  // namespace perturbml
