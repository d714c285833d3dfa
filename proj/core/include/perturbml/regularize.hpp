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

#ifndef PERTURBML_REGULARIZE_HPP_
#define PERTURBML_REGULARIZE_HPP_

#include <vector>

#include <Eigen/Core>

#include "perturbml/hypothesis.hpp"

namespace perturbml {

enum class RegKind { l1, tikhonov, elastic_net, group_l12, trace_norm };

struct RegularizerSpec {
  RegKind kind = RegKind::l1;
  // group_l12 only: a disjoint cover of coordinate indices 0..p-1.
  std::vector<std::vector<Eigen::Index>> groups;

  // Checks the group structure against a coordinate count.
  void validate(Eigen::Index p) const;
};

// R(theta):
//   l1            |theta|_1
//   tikhonov      |theta|_2^2 + 1/4
//   elastic_net   |theta|_1 + |theta|_2^2 + 1/4
//   group_l12     sum_g |theta_g|_2
//   trace_norm    nuclear norm (matrix shapes only)
double reg_value(const RegularizerSpec& reg, const Hypothesis& theta);

// Scale function c(theta) paired with each regularizer: l1 and elastic_net
// use |.|_1, tikhonov |.|_2, group_l12 its group norm, trace_norm the
// nuclear norm.
double scale(const RegularizerSpec& reg, const Hypothesis& theta);

// The lower-bounding function r with r(c(theta)) <= R(theta) and r(z) >= z:
// identity for l1, elastic_net, group_l12 and trace_norm; z^2 + 1/4 for
// tikhonov.
double lower_bound_r(const RegularizerSpec& reg, double z);

// prox_{t R}(v) = argmin_theta { t R(theta) + |theta - v|_2^2 / 2 }
// (Frobenius distance for matrices). Constant offsets in R do not move the
// minimizer.
Hypothesis prox(const RegularizerSpec& reg, const Hypothesis& v, double t);

// A subgradient of R at theta (minimal-norm choice at kinks).
Eigen::MatrixXd reg_subgradient(const RegularizerSpec& reg,
                                const Hypothesis& theta);

}  // namespace perturbml

#endif  // PERTURBML_REGULARIZE_HPP_
