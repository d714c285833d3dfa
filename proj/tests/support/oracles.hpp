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

// Independent reference computations used to pin expected test values.
// Everything here is deliberately brute force and shares no code with the
// library paths it checks.

#ifndef PERTURBML_TESTS_SUPPORT_ORACLES_HPP_
#define PERTURBML_TESTS_SUPPORT_ORACLES_HPP_

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Central finite difference of a scalar function along one coordinate.
inline double central_difference(const std::function<double(double)>& f,
                                 double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Bisection root finder for an increasing function.
inline double bisect_increasing(const std::function<double(double)>& f,
                                double lo, double hi, double tol = 1e-13) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Dense grid minimization over [lo, hi].
inline double grid_minimize(const std::function<double(double)>& f, double lo,
                            double hi, long points) {
  double best_x = lo;
  double best = f(lo);
  for (long i = 1; i <= points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(points);
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

// One-dimensional l1-regularized Bernoulli likelihood minimizer by bisection
// on the stationarity condition tanh(theta) = t -/+ lambda.
inline double l1_mle_minimizer(double t, double lambda) {
  if (std::abs(t) <= lambda) return 0.0;
  const double target = t > 0 ? t - lambda : t + lambda;
  const double root = bisect_increasing(
      [target](double th) { return std::tanh(th) - target; }, -20.0, 20.0);
  return root;
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace oracles

#endif  // PERTURBML_TESTS_SUPPORT_ORACLES_HPP_
