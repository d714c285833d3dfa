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

#ifndef PERTURBML_HYPOTHESIS_HPP_
#define PERTURBML_HYPOTHESIS_HPP_

#include <Eigen/Core>

namespace perturbml {

enum class ShapeKind { vector, matrix };

struct Shape {
  ShapeKind kind = ShapeKind::vector;
  Eigen::Index rows = 0;
  Eigen::Index cols = 1;

  static Shape Vector(Eigen::Index p) { return {ShapeKind::vector, p, 1}; }
  static Shape Matrix(Eigen::Index n1, Eigen::Index n2) {
    return {ShapeKind::matrix, n1, n2};
  }
  Eigen::Index size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

// The ambient norm used by the scale function paired with a hypothesis.
enum class NormTag { l1, l2, linf, group, nuclear };

// Parameter container for all problem classes: a vector in R^p (stored as a
// p x 1 matrix) or a matrix in R^{n1 x n2}.
struct Hypothesis {
  ShapeKind kind = ShapeKind::vector;
  NormTag norm_tag = NormTag::l1;
  Eigen::MatrixXd values;

  static Hypothesis Vector(const Eigen::VectorXd& v,
                           NormTag tag = NormTag::l1) {
    Hypothesis h;
    h.kind = ShapeKind::vector;
    h.norm_tag = tag;
    h.values = v;
    return h;
  }

  static Hypothesis Matrix(const Eigen::MatrixXd& m,
                           NormTag tag = NormTag::nuclear) {
    Hypothesis h;
    h.kind = ShapeKind::matrix;
    h.norm_tag = tag;
    h.values = m;
    return h;
  }

  static Hypothesis Zeros(const Shape& s, NormTag tag = NormTag::l1) {
    Hypothesis h;
    h.kind = s.kind;
    h.norm_tag = tag;
    h.values = Eigen::MatrixXd::Zero(s.rows, s.cols);
    return h;
  }

  Shape shape() const { return {kind, values.rows(), values.cols()}; }
  Eigen::Index size() const { return values.size(); }
  bool all_finite() const { return values.allFinite(); }
};

}  // namespace perturbml

#endif  // PERTURBML_HYPOTHESIS_HPP_
