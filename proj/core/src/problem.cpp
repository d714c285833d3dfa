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

#include "perturbml/problem.hpp"

#include <cmath>
#include <string>

#include "perturbml/errors.hpp"

namespace perturbml {
namespace {

// P[y = +1] for the Bernoulli family with natural parameter nu.
double bernoulli_plus_prob(double nu) {
  // e^nu / (e^nu + e^-nu) = 1 / (1 + e^-2nu)
  return 1.0 / (1.0 + std::exp(-2.0 * nu));
}

double sample_label(Family family, double nu, PhiloxRng& rng) {
  switch (family) {
    case Family::bernoulli_pm1:
      return rng.bernoulli(bernoulli_plus_prob(nu)) ? 1.0 : -1.0;
    case Family::gaussian_unit:
      return rng.normal(nu, 1.0);
  }
  throw Error("unknown family");
}

}  // namespace

void ProblemSpec::validate() const {
  if (!true_hypothesis.all_finite()) {
    throw ShapeMismatchError("true hypothesis has non-finite entries");
  }
  switch (kind) {
    case ProblemKind::mle_expfam:
      if (true_hypothesis.kind != ShapeKind::vector) {
        throw ShapeMismatchError("mle_expfam needs a vector hypothesis");
      }
      break;
    case ProblemKind::glm_fixed:
      if (true_hypothesis.kind != ShapeKind::vector) {
        throw ShapeMismatchError("glm_fixed needs a vector hypothesis");
      }
      if (design.rows() == 0 || design.cols() != true_hypothesis.size()) {
        throw ShapeMismatchError("glm design must be n x p");
      }
      if (design_bound <= 0) {
        throw ShapeMismatchError("design bound B must be positive");
      }
      if (design.cwiseAbs().maxCoeff() > design_bound + 1e-12) {
        throw ShapeMismatchError("design violates |x|_inf <= B");
      }
      break;
    case ProblemKind::nonparam_regression:
      if (true_hypothesis.kind != ShapeKind::vector) {
        throw ShapeMismatchError("nonparam needs a coefficient vector");
      }
      if (basis_count < 1) {
        throw ShapeMismatchError("basis_count must be >= 1");
      }
      if (design.rows() == 0 ||
          true_hypothesis.size() != basis_count * design.cols()) {
        throw ShapeMismatchError(
            "nonparam coefficients must have basis_count entries per input "
            "coordinate");
      }
      if (design.minCoeff() < 0.0 || design.maxCoeff() > 1.0) {
        throw ShapeMismatchError("nonparam design points must lie in [0,1]");
      }
      break;
    case ProblemKind::expfam_pca:
      if (true_hypothesis.kind != ShapeKind::matrix) {
        throw ShapeMismatchError("expfam_pca needs a matrix hypothesis");
      }
      break;
    case ProblemKind::maxmargin_mf:
      if (true_hypothesis.kind != ShapeKind::matrix) {
        throw ShapeMismatchError("maxmargin_mf needs a matrix hypothesis");
      }
      if (lipschitz_K <= 0) {
        throw ShapeMismatchError("lipschitz_K must be positive");
      }
      if (plus_prob < 0.0 || plus_prob > 1.0) {
        throw ShapeMismatchError("plus_prob must lie in [0,1]");
      }
      break;
  }
}

Eigen::Index hypothesis_dim(const ProblemSpec& spec) {
  return spec.true_hypothesis.size();
}

Eigen::MatrixXd sample_design(ProblemKind kind, Eigen::Index n, Eigen::Index p,
                              double bound, PhiloxRng& rng) {
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double u = rng.uniform();
      x(i, j) = kind == ProblemKind::nonparam_regression
                    ? u
                    : bound * (2.0 * u - 1.0);
    }
  }
  return x;
}

Eigen::MatrixXd nonparam_design_matrix(const ProblemSpec& spec,
                                       const Eigen::MatrixXd& raw_points) {
  const Eigen::Index q = spec.basis_count;
  const Eigen::Index p = raw_points.cols();
  Eigen::MatrixXd phi(raw_points.rows(), q * p);
  for (Eigen::Index i = 0; i < raw_points.rows(); ++i) {
    for (Eigen::Index l = 0; l < p; ++l) {
      for (Eigen::Index k = 1; k <= q; ++k) {
        phi(i, l * q + (k - 1)) =
            std::sqrt(2.0) * std::cos(k * M_PI * raw_points(i, l));
      }
    }
  }
  return phi;
}

ProblemSpec resize_problem(const ProblemSpec& base, long n, PhiloxRng& rng) {
  ProblemSpec s = base;
  s.n_samples = n;
  switch (base.kind) {
    case ProblemKind::mle_expfam:
      return s;
    case ProblemKind::glm_fixed:
      s.design = sample_design(base.kind, n, base.true_hypothesis.size(),
                               base.design_bound, rng);
      return s;
    case ProblemKind::nonparam_regression:
      s.design = sample_design(base.kind, n, base.design.cols(), 1.0, rng);
      return s;
    case ProblemKind::expfam_pca:
    case ProblemKind::maxmargin_mf: {
      if (n == base.true_hypothesis.size()) return s;
      const auto& v = base.true_hypothesis.values;
      if ((v.array() != v(0, 0)).any()) {
        throw ShapeMismatchError(
            "grid over matrix sizes needs a constant true hypothesis");
      }
      const long d = std::lround(std::sqrt(static_cast<double>(n)));
      if (d * d != n) {
        throw ShapeMismatchError(
            "matrix-class grid sizes must be perfect squares");
      }
      s.true_hypothesis.values = Eigen::MatrixXd::Constant(d, d, v(0, 0));
      return s;
    }
  }
  throw Error("unknown problem kind");
}

Dataset sample_dataset(const ProblemSpec& spec, Eigen::Index n,
                       PhiloxRng& rng) {
  spec.validate();
  Dataset data;
  switch (spec.kind) {
    case ProblemKind::mle_expfam: {
      const Eigen::Index p = spec.true_hypothesis.size();
      data.values.resize(n, p);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
          data.values(i, j) =
              sample_label(spec.family, spec.true_hypothesis.values(j, 0), rng);
        }
      }
      break;
    }
    case ProblemKind::glm_fixed: {
      if (n != spec.design.rows()) {
        throw ShapeMismatchError("label count must match design rows");
      }
      const Eigen::VectorXd nu = spec.design * spec.true_hypothesis.values;
      data.values.resize(n, 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        data.values(i, 0) = sample_label(spec.family, nu(i), rng);
      }
      break;
    }
    case ProblemKind::nonparam_regression: {
      if (n != spec.design.rows()) {
        throw ShapeMismatchError("label count must match design rows");
      }
      const Eigen::MatrixXd phi = nonparam_design_matrix(spec, spec.design);
      const Eigen::VectorXd nu = phi * spec.true_hypothesis.values;
      data.values.resize(n, 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        data.values(i, 0) = sample_label(spec.family, nu(i), rng);
      }
      break;
    }
    case ProblemKind::expfam_pca: {
      const auto& theta = spec.true_hypothesis.values;
      if (n != theta.size()) {
        throw ShapeMismatchError("expfam_pca draws exactly n1*n2 entries");
      }
      data.values.resize(theta.rows(), theta.cols());
      for (Eigen::Index i = 0; i < theta.rows(); ++i) {
        for (Eigen::Index j = 0; j < theta.cols(); ++j) {
          data.values(i, j) = sample_label(spec.family, theta(i, j), rng);
        }
      }
      break;
    }
    case ProblemKind::maxmargin_mf: {
      const auto& theta = spec.true_hypothesis.values;
      if (n != theta.size()) {
        throw ShapeMismatchError("maxmargin_mf draws exactly n1*n2 entries");
      }
      data.values.resize(theta.rows(), theta.cols());
      for (Eigen::Index i = 0; i < theta.rows(); ++i) {
        for (Eigen::Index j = 0; j < theta.cols(); ++j) {
          data.values(i, j) = rng.bernoulli(spec.plus_prob) ? 1.0 : -1.0;
        }
      }
      break;
    }
  }
  return data;
}

}  // namespace perturbml
