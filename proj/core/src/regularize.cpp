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

#include "perturbml/regularize.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "perturbml/errors.hpp"

namespace perturbml {
namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

void require_matrix(const Hypothesis& theta) {
  if (theta.kind != ShapeKind::matrix) {
    throw ShapeMismatchError("trace_norm requires a matrix hypothesis");
  }
}

void require_groups(const RegularizerSpec& reg, const Hypothesis& theta) {
  if (theta.kind != ShapeKind::vector) {
    throw ShapeMismatchError("group_l12 requires a vector hypothesis");
  }
  reg.validate(theta.size());
}

double group_norm(const RegularizerSpec& reg, const Hypothesis& theta) {
  double total = 0.0;
  for (const auto& group : reg.groups) {
    double sq = 0.0;
    for (Eigen::Index idx : group) {
      sq += theta.values(idx, 0) * theta.values(idx, 0);
    }
    total += std::sqrt(sq);
  }
  return total;
}

double nuclear_norm(const Hypothesis& theta) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(theta.values);
  return svd.singularValues().sum();
}

}  // namespace

void RegularizerSpec::validate(Eigen::Index p) const {
  if (kind != RegKind::group_l12) return;
  std::vector<char> seen(static_cast<size_t>(p), 0);
  for (const auto& group : groups) {
    for (Eigen::Index idx : group) {
      if (idx < 0 || idx >= p || seen[static_cast<size_t>(idx)]) {
        throw ShapeMismatchError(
            "groups must form a disjoint cover of coordinates");
      }
      seen[static_cast<size_t>(idx)] = 1;
    }
  }
  for (char s : seen) {
    if (!s) {
      throw ShapeMismatchError(
          "groups must form a disjoint cover of coordinates");
    }
  }
}

double reg_value(const RegularizerSpec& reg, const Hypothesis& theta) {
  switch (reg.kind) {
    case RegKind::l1:
      return theta.values.cwiseAbs().sum();
    case RegKind::tikhonov:
      return theta.values.squaredNorm() + 0.25;
    case RegKind::elastic_net:
      return theta.values.cwiseAbs().sum() + theta.values.squaredNorm() + 0.25;
    case RegKind::group_l12:
      require_groups(reg, theta);
      return group_norm(reg, theta);
    case RegKind::trace_norm:
      require_matrix(theta);
      return nuclear_norm(theta);
  }
  throw Error("unknown regularizer kind");
}

double scale(const RegularizerSpec& reg, const Hypothesis& theta) {
  switch (reg.kind) {
    case RegKind::l1:
    case RegKind::elastic_net:
      return theta.values.cwiseAbs().sum();
    case RegKind::tikhonov:
      return theta.values.norm();
    case RegKind::group_l12:
      require_groups(reg, theta);
      return group_norm(reg, theta);
    case RegKind::trace_norm:
      require_matrix(theta);
      return nuclear_norm(theta);
  }
  throw Error("unknown regularizer kind");
}

double lower_bound_r(const RegularizerSpec& reg, double z) {
  switch (reg.kind) {
    case RegKind::tikhonov:
      return z * z + 0.25;
    case RegKind::l1:
    case RegKind::elastic_net:
    case RegKind::group_l12:
    case RegKind::trace_norm:
      return z;
  }
  throw Error("unknown regularizer kind");
}

Hypothesis prox(const RegularizerSpec& reg, const Hypothesis& v, double t) {
  if (t <= 0.0) throw Error("prox step must be positive");
  Hypothesis out = v;
  switch (reg.kind) {
    case RegKind::l1:
      out.values = v.values.unaryExpr(
          [t](double x) { return soft_threshold(x, t); });
      return out;
    case RegKind::tikhonov:
      out.values = v.values / (1.0 + 2.0 * t);
      return out;
    case RegKind::elastic_net:
      // prox of t(|.|_1 + |.|_2^2): soft threshold, then shrink.
      out.values = v.values.unaryExpr([t](double x) {
        return soft_threshold(x, t) / (1.0 + 2.0 * t);
      });
      return out;
    case RegKind::group_l12: {
      require_groups(reg, v);
      for (const auto& group : reg.groups) {
        double sq = 0.0;
        for (Eigen::Index idx : group) sq += v.values(idx, 0) * v.values(idx, 0);
        const double norm = std::sqrt(sq);
        const double shrink = norm <= t ? 0.0 : 1.0 - t / norm;
        for (Eigen::Index idx : group) out.values(idx, 0) *= shrink;
      }
      return out;
    }
    case RegKind::trace_norm: {
      require_matrix(v);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          v.values, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Eigen::VectorXd sv = svd.singularValues();
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        sv(i) = soft_threshold(sv(i), t);
      }
      out.values = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
      return out;
    }
  }
  throw Error("unknown regularizer kind");
}

Eigen::MatrixXd reg_subgradient(const RegularizerSpec& reg,
                                const Hypothesis& theta) {
  auto sign = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
  switch (reg.kind) {
    case RegKind::l1:
      return theta.values.unaryExpr(sign);
    case RegKind::tikhonov:
      return 2.0 * theta.values;
    case RegKind::elastic_net:
      return theta.values.unaryExpr(sign) + 2.0 * theta.values;
    case RegKind::group_l12: {
      require_groups(reg, theta);
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(theta.size(), 1);
      for (const auto& group : reg.groups) {
        double sq = 0.0;
        for (Eigen::Index idx : group) {
          sq += theta.values(idx, 0) * theta.values(idx, 0);
        }
        const double norm = std::sqrt(sq);
        if (norm == 0.0) continue;  // minimal-norm subgradient at the kink
        for (Eigen::Index idx : group) {
          g(idx, 0) = theta.values(idx, 0) / norm;
        }
      }
      return g;
    }
    case RegKind::trace_norm: {
      require_matrix(theta);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          theta.values, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd& sv = svd.singularValues();
      Eigen::VectorXd mask(sv.size());
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        mask(i) = sv(i) > 1e-12 ? 1.0 : 0.0;
      }
      return svd.matrixU() * mask.asDiagonal() * svd.matrixV().transpose();
    }
  }
  throw Error("unknown regularizer kind");
}

}  // namespace perturbml
