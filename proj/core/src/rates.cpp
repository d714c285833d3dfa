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

#include "perturbml/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "perturbml/errors.hpp"
#include "perturbml/exp_family.hpp"
#include "parallel.hpp"

namespace perturbml {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void not_applicable(const char* what) {
  throw InvalidCombinationError(std::string("rate table has no entry (") +
                                what + ")");
}

double subg_factor(double sigma, double delta) {
  return sigma * std::sqrt(std::log(1.0 / delta));
}

double fv_factor(double sigma, double delta) {
  return sigma * std::sqrt(1.0 / delta);
}

// Table cells shared by the mle and glm rows (glm callers multiply by B and
// reject low_rank).
double vector_class_cell(const RateQuery& q, double sigma) {
  const double n = static_cast<double>(q.n);
  const double p = static_cast<double>(q.p);
  const double lp = std::log(p);
  if (q.tail == TailKind::subgaussian) {
    switch (q.reg_kind) {
      case RateRegKind::l1:
        return sigma *
               std::sqrt(2.0 / n * (std::log(p) + std::log(2.0 / q.delta)));
      case RateRegKind::k_support:
        return subg_factor(sigma, q.delta) * std::sqrt(q.k * lp / n);
      case RateRegKind::tikhonov_or_l1inf:
        return subg_factor(sigma, q.delta) * std::sqrt(p * lp / n);
      case RateRegKind::multitask_l12:
        return subg_factor(sigma, q.delta) * std::pow(p, 0.25) *
               std::sqrt(lp / n);
      case RateRegKind::overlap_l12:
        return subg_factor(sigma, q.delta) * std::sqrt(q.g * lp / n);
      case RateRegKind::overlap_l1inf:
        return subg_factor(sigma, q.delta) * q.g * std::sqrt(lp / n);
      case RateRegKind::low_rank:
        return subg_factor(sigma, q.delta) * std::sqrt(p * lp / n);
    }
  } else {
    switch (q.reg_kind) {
      case RateRegKind::l1:
        return sigma * std::sqrt(p / (n * q.delta));
      case RateRegKind::k_support:
        return fv_factor(sigma, q.delta) * std::sqrt(q.k * p / n);
      case RateRegKind::tikhonov_or_l1inf:
        return fv_factor(sigma, q.delta) * p / std::sqrt(n);
      case RateRegKind::multitask_l12:
        return fv_factor(sigma, q.delta) * std::pow(p, 0.75) / std::sqrt(n);
      case RateRegKind::overlap_l12:
        return fv_factor(sigma, q.delta) * std::sqrt(q.g * p / n);
      case RateRegKind::overlap_l1inf:
        return fv_factor(sigma, q.delta) * q.g * std::sqrt(p / n);
      case RateRegKind::low_rank:
        return fv_factor(sigma, q.delta) * p / std::sqrt(n);
    }
  }
  throw Error("unknown rate column");
}

RateValue pca_rate(const RateQuery& q, double sigma) {
  const double n = static_cast<double>(q.n);
  const double ln_n = std::log(n);
  if (q.tail == TailKind::subgaussian) {
    switch (q.reg_kind) {
      case RateRegKind::l1:
        return {sigma * std::sqrt(std::log(1.0 / q.delta) / n), true};
      case RateRegKind::tikhonov_or_l1inf:
        return {subg_factor(sigma, q.delta) * std::sqrt(ln_n / n), true};
      case RateRegKind::multitask_l12:
        return {subg_factor(sigma, q.delta) * std::sqrt(ln_n) /
                    std::pow(n, 0.75),
                true};
      case RateRegKind::low_rank:
        return {subg_factor(sigma, q.delta) * std::sqrt(ln_n / n), true};
      default:
        not_applicable("pca column is NA");
    }
  }
  switch (q.reg_kind) {
    case RateRegKind::l1:
      return {sigma * std::sqrt(1.0 / (n * q.delta)), true};
    case RateRegKind::multitask_l12:
      return {fv_factor(sigma, q.delta) / std::pow(n, 0.25), true};
    case RateRegKind::tikhonov_or_l1inf:
    case RateRegKind::low_rank:
      not_applicable("pca finite-variance column has no guarantees");
    default:
      not_applicable("pca column is NA");
  }
}

RateValue nonparam_rate(const RateQuery& q, double sigma) {
  const double n = static_cast<double>(q.n);
  const double p = static_cast<double>(q.p);
  const double lp = std::log(p);
  const double denom = std::pow(n, 0.5 - q.beta);
  if (q.tail == TailKind::subgaussian) {
    switch (q.reg_kind) {
      case RateRegKind::l1:
        return {sigma * q.B *
                    std::sqrt(2.0 / n *
                              (std::log(p) + std::log(double(q.q_n)) +
                               std::log(2.0 / q.delta))),
                false};
      case RateRegKind::k_support:
        return {subg_factor(sigma, q.delta) * q.B * std::sqrt(q.k * lp) / denom,
                true};
      case RateRegKind::tikhonov_or_l1inf:
        return {subg_factor(sigma, q.delta) * q.B * p * std::sqrt(lp) / denom,
                true};
      case RateRegKind::multitask_l12:
        return {subg_factor(sigma, q.delta) * q.B * std::sqrt(p * lp) / denom,
                true};
      case RateRegKind::overlap_l12:
        return {subg_factor(sigma, q.delta) * q.B * std::sqrt(q.g * lp) / denom,
                true};
      case RateRegKind::overlap_l1inf:
        return {subg_factor(sigma, q.delta) * q.B * q.g * std::sqrt(lp) / denom,
                true};
      case RateRegKind::low_rank:
        not_applicable("nonparam low-rank column is NA");
    }
  }
  switch (q.reg_kind) {
    case RateRegKind::l1:
      return {sigma * q.B * std::sqrt(q.q_n * p / (n * q.delta)), false};
    case RateRegKind::k_support:
      return {fv_factor(sigma, q.delta) * q.B * std::sqrt(double(q.k) * p) /
                  denom,
              true};
    case RateRegKind::tikhonov_or_l1inf:
      return {fv_factor(sigma, q.delta) * q.B * std::pow(p, 1.5) / denom, true};
    case RateRegKind::multitask_l12:
      return {fv_factor(sigma, q.delta) * q.B * p / denom, true};
    default:
      not_applicable("nonparam finite-variance column is NA");
  }
}

RateValue maxmargin_rate(const RateQuery& q) {
  const double n = static_cast<double>(q.n);
  switch (q.reg_kind) {
    case RateRegKind::l1:
      return {2.0 * q.K / n, false};
    case RateRegKind::tikhonov_or_l1inf:
      return {q.K / std::sqrt(n), true};
    case RateRegKind::multitask_l12:
      return {q.K / std::pow(n, 0.75), true};
    case RateRegKind::low_rank:
      return {q.K / std::sqrt(n), true};
    default:
      not_applicable("maxmargin column is NA");
  }
}

Eigen::MatrixXd expanded_design(const ProblemSpec& spec) {
  return spec.kind == ProblemKind::nonparam_regression
             ? nonparam_design_matrix(spec, spec.design)
             : spec.design;
}

double l1_norm(const Hypothesis& h) { return h.values.cwiseAbs().sum(); }

Hypothesis population_minimizer(const ProblemSpec& spec) {
  if (spec.kind == ProblemKind::maxmargin_mf) {
    return maxmargin_true_hypothesis(spec);
  }
  return spec.true_hypothesis;
}

}  // namespace

void RateQuery::validate() const {
  if (n < 1 || p < 1) throw InvalidCombinationError("n and p must be >= 1");
  if (sigma_x < 0 || sigma_eta < 0) {
    throw InvalidCombinationError("sigma parameters must be nonnegative");
  }
  if (k < 1 || g < 1) {
    throw InvalidCombinationError("k and g must be >= 1");
  }
  if (problem_kind == ProblemKind::maxmargin_mf) {
    if (K <= 0) throw InvalidCombinationError("maxmargin needs K > 0");
    if (q <= 0.5 || q > 1.0) {
      throw InvalidCombinationError("maxmargin needs q in (1/2, 1]");
    }
    return;  // the maxmargin row holds with probability one (delta = 0)
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidCombinationError("delta must lie in (0, 1)");
  }
  if (problem_kind == ProblemKind::glm_fixed ||
      problem_kind == ProblemKind::nonparam_regression) {
    if (B <= 0) throw InvalidCombinationError("design bound B must be > 0");
  }
  if (problem_kind == ProblemKind::nonparam_regression) {
    if (q_n < 1) throw InvalidCombinationError("q_n must be >= 1");
    if (!(beta > 0.0 && beta < 0.5)) {
      throw InvalidCombinationError("beta must lie in (0, 1/2)");
    }
  }
}

RateValue rate(const RateQuery& query) {
  query.validate();
  const double sigma = std::hypot(query.sigma_x, query.sigma_eta);
  switch (query.problem_kind) {
    case ProblemKind::mle_expfam:
      return {vector_class_cell(query, sigma),
              query.reg_kind != RateRegKind::l1};
    case ProblemKind::glm_fixed: {
      if (query.reg_kind == RateRegKind::low_rank) {
        not_applicable("glm low-rank column is NA");
      }
      const bool exact = query.reg_kind == RateRegKind::l1;
      // The exact l1 constants carry B; order-only columns keep it as the
      // natural scale factor.
      return {query.B * vector_class_cell(query, sigma), !exact};
    }
    case ProblemKind::expfam_pca:
      return pca_rate(query, sigma);
    case ProblemKind::nonparam_regression:
      return nonparam_rate(query, sigma);
    case ProblemKind::maxmargin_mf:
      return maxmargin_rate(query);
  }
  throw Error("unknown problem kind");
}

double perturbed_rate_prime(const RateQuery& query) {
  query.validate();
  if (query.problem_kind == ProblemKind::maxmargin_mf) {
    return 2.0 * query.K * (1.0 - query.q) / static_cast<double>(query.n);
  }
  return 0.0;
}

double dual_norm_deviation(const ProblemSpec& spec,
                           const PerturbationSpec& pert, const Dataset& data) {
  if (spec.kind == ProblemKind::maxmargin_mf) {
    throw WrongKindError(
        "dual_norm_deviation is defined for the likelihood classes");
  }
  if (pert.kind == MechanismKind::sign_flip ||
      pert.kind == MechanismKind::ising_clamp) {
    throw MechanismMismatchError(
        "dual_norm_deviation needs an unbiased dataset mechanism");
  }
  switch (spec.kind) {
    case ProblemKind::mle_expfam: {
      const Eigen::VectorXd stats = data.values.colwise().mean();
      double dev = 0.0;
      for (Eigen::Index j = 0; j < stats.size(); ++j) {
        const double expected =
            mean_parameter(spec.family, spec.true_hypothesis.values(j, 0));
        dev = std::max(dev, std::abs(stats(j) - expected));
      }
      return dev;
    }
    case ProblemKind::glm_fixed:
    case ProblemKind::nonparam_regression: {
      const Eigen::MatrixXd x = expanded_design(spec);
      const Eigen::VectorXd nu_star =
          x * spec.true_hypothesis.values.col(0);
      Eigen::VectorXd residual(nu_star.size());
      for (Eigen::Index i = 0; i < nu_star.size(); ++i) {
        residual(i) =
            data.values(i, 0) - mean_parameter(spec.family, nu_star(i));
      }
      return (x.transpose() * residual / static_cast<double>(x.rows()))
          .cwiseAbs()
          .maxCoeff();
    }
    case ProblemKind::expfam_pca: {
      double dev = 0.0;
      for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
          const double expected =
              mean_parameter(spec.family, spec.true_hypothesis.values(i, j));
          dev = std::max(dev, std::abs(data.values(i, j) - expected));
        }
      }
      return dev / static_cast<double>(data.values.size());
    }
    default:
      throw Error("unknown problem kind");
  }
}

const char* rate_reg_kind_name(RateRegKind kind) {
  switch (kind) {
    case RateRegKind::l1: return "l1";
    case RateRegKind::k_support: return "k_support";
    case RateRegKind::tikhonov_or_l1inf: return "tikhonov_or_l1inf";
    case RateRegKind::multitask_l12: return "multitask_l12";
    case RateRegKind::overlap_l12: return "overlap_l12";
    case RateRegKind::overlap_l1inf: return "overlap_l1inf";
    case RateRegKind::low_rank: return "low_rank";
  }
  return "?";
}

RateRegKind rate_column_for(RegKind kind) {
  switch (kind) {
    case RegKind::l1:
    case RegKind::elastic_net:  // shares the sparsity column
      return RateRegKind::l1;
    case RegKind::tikhonov:
      return RateRegKind::tikhonov_or_l1inf;
    case RegKind::group_l12:
      return RateRegKind::multitask_l12;
    case RegKind::trace_norm:
      return RateRegKind::low_rank;
  }
  throw Error("unknown regularizer kind");
}

RateQuery make_rate_query(const ProblemSpec& spec, const PerturbationSpec& pert,
                          const RegularizerSpec& reg, TailKind tail, long n,
                          double delta) {
  RateQuery q;
  q.problem_kind = spec.kind;
  q.tail = tail;
  q.delta = delta;
  q.n = n;
  q.reg_kind = rate_column_for(reg.kind);
  q.sigma_x = spec.kind == ProblemKind::maxmargin_mf
                  ? 0.0
                  : sigma_x_bound(spec.family);
  q.sigma_eta =
      pert.kind == MechanismKind::gaussian_additive ? pert.sigma_eta : 0.0;
  switch (spec.kind) {
    case ProblemKind::mle_expfam:
      q.p = spec.true_hypothesis.size();
      break;
    case ProblemKind::glm_fixed:
      q.p = spec.true_hypothesis.size();
      q.B = spec.design_bound;
      break;
    case ProblemKind::nonparam_regression:
      q.p = spec.design.cols();
      q.B = std::sqrt(2.0);  // cosine basis bound
      q.q_n = spec.basis_count;
      break;
    case ProblemKind::expfam_pca:
      q.p = spec.true_hypothesis.size();
      break;
    case ProblemKind::maxmargin_mf:
      q.p = spec.true_hypothesis.size();
      q.K = spec.lipschitz_K;
      q.q = pert.kind == MechanismKind::sign_flip ? pert.q : 1.0;
      break;
  }
  if (reg.kind == RegKind::group_l12) {
    long max_group = 1;
    for (const auto& group : reg.groups) {
      max_group = std::max<long>(max_group, group.size());
    }
    q.g = max_group;
  }
  return q;
}

ConsistencyReport consistency_experiment(const ProblemSpec& spec,
                                         const PerturbationSpec& pert,
                                         const RegularizerSpec& reg,
                                         const SolveConfig& solve_cfg,
                                         const ConsistencyParams& params) {
  spec.validate();
  pert.validate();
  solve_cfg.validate();
  if (params.trials_per_n < 100) {
    throw Error("consistency_experiment needs at least 100 trials per n");
  }
  if (params.n_grid.empty()) throw Error("n_grid must be nonempty");

  const long grid_size = static_cast<long>(params.n_grid.size());
  const long total = grid_size * params.trials_per_n;

  ConsistencyReport report;
  report.delta = params.delta;
  report.n_grid = params.n_grid;
  report.trials.resize(static_cast<size_t>(total));
  report.rates.resize(static_cast<size_t>(grid_size));
  report.lambdas.resize(static_cast<size_t>(grid_size));

  for (long gi = 0; gi < grid_size; ++gi) {
    const RateQuery q = make_rate_query(spec, pert, reg, params.tail,
                                        params.n_grid[static_cast<size_t>(gi)],
                                        params.delta);
    report.rates[static_cast<size_t>(gi)] = rate(q).value;
    report.lambdas[static_cast<size_t>(gi)] =
        penalty_parameter(solve_cfg.alpha, report.rates[static_cast<size_t>(gi)]);
  }

  parallel_for(total, params.jobs, [&](long idx) {
    const long gi = idx / params.trials_per_n;
    const long trial = idx % params.trials_per_n;
    const long n = params.n_grid[static_cast<size_t>(gi)];
    ConsistencyTrial& record = report.trials[static_cast<size_t>(idx)];
    record.n = n;
    record.trial = trial;
    try {
      const auto seeds = philox4x64_block(
          {static_cast<std::uint64_t>(gi), static_cast<std::uint64_t>(trial),
           0, 0},
          {params.seed, 0x636f6e7369737430ULL});
      PhiloxRng data_rng(seeds[0], 0);
      const ProblemSpec spec_n = resize_problem(spec, n, data_rng);
      const Dataset data = sample_dataset(spec_n, n, data_rng);
      PerturbationSpec trial_pert = pert;
      trial_pert.seed = seeds[1];
      const Dataset perturbed = perturb_dataset(spec_n, data, trial_pert);

      const double eps = report.rates[static_cast<size_t>(gi)];
      const double lambda = report.lambdas[static_cast<size_t>(gi)];
      const RateQuery q =
          make_rate_query(spec_n, pert, reg, params.tail, n, params.delta);
      const double eps_prime = perturbed_rate_prime(q);

      const SolveResult solved =
          minimize(spec_n, perturbed, reg, lambda, solve_cfg);

      const Hypothesis theta_star = population_minimizer(spec_n);
      const Hypothesis theta_star_eta =
          spec_n.kind == ProblemKind::maxmargin_mf &&
                  trial_pert.kind == MechanismKind::sign_flip
              ? maxmargin_true_hypothesis_signflip(spec_n, trial_pert.q)
              : theta_star;

      // The scale in the consistency inequality: the hinge analysis pins
      // the l1 norm, the likelihood classes use the regularizer's norm.
      const bool hinge = spec_n.kind == ProblemKind::maxmargin_mf;
      const double c_star_eta =
          hinge ? l1_norm(theta_star_eta) : scale(reg, theta_star_eta);
      const double c_star = hinge ? l1_norm(theta_star) : scale(reg, theta_star);

      record.gap = expected_loss(spec_n, solved.theta) -
                   expected_loss(spec_n, theta_star);
      record.rhs = eps * (solve_cfg.alpha * reg_value(reg, theta_star_eta) +
                          c_star_eta) +
                   eps_prime * c_star + solve_cfg.xi;
      record.dual_dev = hinge ? kNaN
                              : dual_norm_deviation(spec_n, pert, perturbed);
    } catch (const Error& e) {
      record.solver_error = true;
      record.error = e.what();
    }
  });

  long covered = 0, valid = 0;
  for (const auto& t : report.trials) {
    if (t.solver_error) continue;
    ++valid;
    if (t.gap <= t.rhs) ++covered;
  }
  report.coverage = valid > 0 ? static_cast<double>(covered) / valid : 0.0;

  report.median_gaps.assign(static_cast<size_t>(grid_size), kNaN);
  for (long gi = 0; gi < grid_size; ++gi) {
    std::vector<double> gaps;
    for (long t = 0; t < params.trials_per_n; ++t) {
      const auto& rec =
          report.trials[static_cast<size_t>(gi * params.trials_per_n + t)];
      if (!rec.solver_error) gaps.push_back(rec.gap);
    }
    if (gaps.empty()) continue;
    std::sort(gaps.begin(), gaps.end());
    const size_t m = gaps.size() / 2;
    report.median_gaps[static_cast<size_t>(gi)] =
        gaps.size() % 2 == 1 ? gaps[m] : 0.5 * (gaps[m - 1] + gaps[m]);
  }

  // OLS of log median-gap on log n over grid points with positive medians.
  std::vector<double> xs, ys;
  for (long gi = 0; gi < grid_size; ++gi) {
    const double med = report.median_gaps[static_cast<size_t>(gi)];
    if (std::isfinite(med) && med > 0.0) {
      xs.push_back(std::log(static_cast<double>(
          params.n_grid[static_cast<size_t>(gi)])));
      ys.push_back(std::log(med));
    }
  }
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    report.fitted_exponent = sxx > 0 ? sxy / sxx : kNaN;
  } else {
    report.fitted_exponent = kNaN;
  }
  return report;
}

}  // namespace perturbml
