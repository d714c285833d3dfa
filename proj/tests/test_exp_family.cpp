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

#include <gtest/gtest.h>

#include "perturbml/errors.hpp"
#include "perturbml/perturb.hpp"
#include "support/oracles.hpp"

namespace perturbml {
namespace {

ProblemSpec mle_spec(const Eigen::VectorXd& theta_star,
                     Family family = Family::bernoulli_pm1) {
  ProblemSpec spec;
  spec.kind = ProblemKind::mle_expfam;
  spec.family = family;
  spec.true_hypothesis = Hypothesis::Vector(theta_star);
  spec.n_samples = 4;
  return spec;
}

ProblemSpec maxmargin_spec(Eigen::Index n1, Eigen::Index n2, double k = 1.0,
                           double plus_prob = 0.5) {
  ProblemSpec spec;
  spec.kind = ProblemKind::maxmargin_mf;
  spec.true_hypothesis = Hypothesis::Matrix(Eigen::MatrixXd::Zero(n1, n2));
  spec.n_samples = n1 * n2;
  spec.lipschitz_K = k;
  spec.plus_prob = plus_prob;
  return spec;
}

TEST(LogPartition, BernoulliValues) {
  const ProblemSpec spec = mle_spec(Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(log_partition(spec, 0.0), std::log(2.0), 1e-15);
  // Direct evaluation of the two-point sum.
  EXPECT_NEAR(log_partition(spec, 1.0),
              std::log(std::exp(1.0) + std::exp(-1.0)), 1e-12);
  EXPECT_NEAR(log_partition(spec, 1.0), 1.1269280110429725, 1e-10);
}

TEST(LogPartition, GaussianValue) {
  const ProblemSpec spec =
      mle_spec(Eigen::VectorXd::Zero(1), Family::gaussian_unit);
  EXPECT_NEAR(log_partition(spec, 0.0), 0.5 * std::log(2.0 * M_PI), 1e-12);
  EXPECT_NEAR(log_partition(spec, 0.0), 0.9189385332046727, 1e-10);
}

TEST(LogPartition, OverflowGuarded) {
  const ProblemSpec spec = mle_spec(Eigen::VectorXd::Zero(1));
  const double v = log_partition(spec, 1000.0);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 1000.0, 1e-9);
  EXPECT_TRUE(std::isfinite(log_partition(spec, -1000.0)));
}

TEST(LogPartition, MaxmarginUnsupported) {
  const ProblemSpec spec = maxmargin_spec(2, 2);
  EXPECT_THROW(log_partition(spec, 0.0), UnsupportedFamilyError);
}

TEST(LogPartition, ConvexAlongRandomSlices) {
  PhiloxRng rng(11, 0);
  for (const Family family : {Family::bernoulli_pm1, Family::gaussian_unit}) {
    for (int i = 0; i < 100; ++i) {
      const double a = 6.0 * (rng.uniform() - 0.5);
      const double b = 6.0 * (rng.uniform() - 0.5);
      const double mid = 0.5 * (a + b);
      EXPECT_LE(log_partition_scalar(family, mid),
                0.5 * log_partition_scalar(family, a) +
                    0.5 * log_partition_scalar(family, b) + 1e-12);
    }
  }
}

TEST(EmpiricalLoss, MleZeroThetaIsLogTwo) {
  const ProblemSpec spec = mle_spec(Eigen::VectorXd::Zero(1));
  Dataset data;
  data.values = Eigen::MatrixXd(3, 1);
  data.values << 1, -1, 1;
  const Hypothesis theta = Hypothesis::Vector(Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(empirical_loss(spec, theta, data), std::log(2.0), 1e-15);
}

TEST(EmpiricalLoss, HingeAtZeroIsOne) {
  const ProblemSpec spec = maxmargin_spec(2, 3);
  Dataset data;
  data.values = Eigen::MatrixXd::Ones(2, 3);
  data.values(1, 2) = -1;
  const Hypothesis theta = Hypothesis::Matrix(Eigen::MatrixXd::Zero(2, 3));
  EXPECT_DOUBLE_EQ(empirical_loss(spec, theta, data), 1.0);
}

TEST(EmpiricalLoss, GlmSinglePoint) {
  ProblemSpec spec;
  spec.kind = ProblemKind::glm_fixed;
  spec.family = Family::bernoulli_pm1;
  spec.true_hypothesis = Hypothesis::Vector(Eigen::VectorXd::Ones(1));
  spec.design = Eigen::MatrixXd::Ones(1, 1);
  spec.design_bound = 1.0;
  spec.n_samples = 1;
  Dataset data;
  data.values = Eigen::MatrixXd::Ones(1, 1);
  const Hypothesis theta = Hypothesis::Vector(Eigen::VectorXd::Ones(1));
  // -1 + log(e + 1/e), evaluated directly.
  EXPECT_NEAR(empirical_loss(spec, theta, data),
              -1.0 + std::log(std::exp(1.0) + std::exp(-1.0)), 1e-12);
  EXPECT_NEAR(empirical_loss(spec, theta, data), 0.1269280110429725, 1e-10);
}

TEST(EmpiricalLoss, ShapeMismatchRejected) {
  const ProblemSpec spec = mle_spec(Eigen::VectorXd::Zero(2));
  Dataset data;
  data.values = Eigen::MatrixXd::Ones(3, 2);
  const Hypothesis theta = Hypothesis::Vector(Eigen::VectorXd::Zero(3));
  EXPECT_THROW(empirical_loss(spec, theta, data), ShapeMismatchError);
}

TEST(ExpectedLoss, MleZeroCase) {
  const ProblemSpec spec = mle_spec(Eigen::VectorXd::Zero(1));
  const Hypothesis theta = Hypothesis::Vector(Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(expected_loss(spec, theta), std::log(2.0), 1e-15);
}

TEST(ExpectedLoss, MleClosedFormTanhLogCosh) {
  // theta* = 1: T = tanh(1), L(0.5) = -tanh(1)/2 + log(2 cosh(1/2)).
  const ProblemSpec spec = mle_spec(Eigen::VectorXd::Ones(1));
  Eigen::VectorXd half(1);
  half << 0.5;
  const double oracle =
      -std::tanh(1.0) * 0.5 + std::log(2.0 * std::cosh(0.5));
  EXPECT_NEAR(expected_loss(spec, Hypothesis::Vector(half)), oracle, 1e-12);
  EXPECT_NEAR(oracle, 0.4324646095403404, 1e-12);
}

TEST(ExpectedLoss, MatchesMonteCarlo) {
  Eigen::VectorXd theta_star(3);
  theta_star << 0.4, -0.7, 0.1;
  const ProblemSpec spec = mle_spec(theta_star);
  Eigen::VectorXd theta_v(3);
  theta_v << -0.2, 0.5, 0.9;
  const Hypothesis theta = Hypothesis::Vector(theta_v);

  PhiloxRng rng(5, 0);
  const long draws = 200000;
  double acc = 0.0, acc_sq = 0.0;
  for (long i = 0; i < draws; ++i) {
    const Dataset sample = sample_dataset(spec, 1, rng);
    const double loss = empirical_loss(spec, theta, sample);
    acc += loss;
    acc_sq += loss * loss;
  }
  const double mc = acc / draws;
  const double se =
      std::sqrt((acc_sq / draws - mc * mc) / static_cast<double>(draws));
  EXPECT_NEAR(expected_loss(spec, theta), mc, 4.0 * se + 1e-6);
}

TEST(ExpectedLoss, HingeSatisfiedMargin) {
  const ProblemSpec spec = maxmargin_spec(2, 2, 1.0, 1.0);  // P[x=+1] = 1
  const Hypothesis theta =
      Hypothesis::Matrix(Eigen::MatrixXd::Constant(2, 2, 2.0));
  EXPECT_DOUBLE_EQ(expected_loss(spec, theta), 0.0);
}

TEST(ExpectedLoss, TrueHypothesisMinimizes) {
  PhiloxRng rng(17, 0);
  // mle
  {
    Eigen::VectorXd ts(4);
    ts << 0.3, -0.4, 0.0, 1.1;
    const ProblemSpec spec = mle_spec(ts);
    const double at_star = expected_loss(spec, spec.true_hypothesis);
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd t(4);
      for (int j = 0; j < 4; ++j) t(j) = 4.0 * (rng.uniform() - 0.5);
      EXPECT_GE(expected_loss(spec, Hypothesis::Vector(t)), at_star - 1e-12);
    }
  }
  // glm
  {
    ProblemSpec spec;
    spec.kind = ProblemKind::glm_fixed;
    spec.family = Family::bernoulli_pm1;
    Eigen::VectorXd ts(2);
    ts << 0.6, -0.2;
    spec.true_hypothesis = Hypothesis::Vector(ts);
    spec.design_bound = 1.0;
    spec.design = sample_design(spec.kind, 12, 2, 1.0, rng);
    spec.n_samples = 12;
    const double at_star = expected_loss(spec, spec.true_hypothesis);
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd t(2);
      for (int j = 0; j < 2; ++j) t(j) = 4.0 * (rng.uniform() - 0.5);
      EXPECT_GE(expected_loss(spec, Hypothesis::Vector(t)), at_star - 1e-12);
    }
  }
  // pca
  {
    ProblemSpec spec;
    spec.kind = ProblemKind::expfam_pca;
    spec.family = Family::bernoulli_pm1;
    Eigen::MatrixXd ts(2, 2);
    ts << 0.2, -0.8, 0.5, 0.0;
    spec.true_hypothesis = Hypothesis::Matrix(ts);
    spec.n_samples = 4;
    const double at_star = expected_loss(spec, spec.true_hypothesis);
    for (int i = 0; i < 100; ++i) {
      Eigen::MatrixXd t(2, 2);
      for (int j = 0; j < 4; ++j) t(j / 2, j % 2) = 4.0 * (rng.uniform() - 0.5);
      EXPECT_GE(expected_loss(spec, Hypothesis::Matrix(t)), at_star - 1e-12);
    }
  }
}

TEST(LossGradient, MleMatchesDefinition) {
  Eigen::VectorXd ts(2);
  ts << 0.1, -0.5;
  const ProblemSpec spec = mle_spec(ts);
  Dataset data;
  data.values = Eigen::MatrixXd(2, 2);
  data.values << 1, -1, 1, 1;
  Eigen::VectorXd tv(2);
  tv << 0.7, -0.3;
  const Hypothesis theta = Hypothesis::Vector(tv);
  const Eigen::MatrixXd g = loss_gradient(spec, theta, data);
  const Eigen::VectorXd stats = data.values.colwise().mean();
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(g(j, 0), -stats(j) + std::tanh(tv(j)), 1e-14);
  }
}

// Analytic gradients match central finite differences on every smooth class.
TEST(LossGradient, FiniteDifferenceAllSmoothClasses) {
  PhiloxRng rng(23, 0);
  const double h = 1e-5;
  const double tol = 1e-4;

  auto check = [&](const ProblemSpec& spec, const Dataset& data) {
    for (int rep = 0; rep < 20; ++rep) {
      Hypothesis theta = spec.true_hypothesis;
      for (Eigen::Index i = 0; i < theta.values.size(); ++i) {
        theta.values(i) = 2.0 * (rng.uniform() - 0.5);
      }
      const Eigen::MatrixXd grad = loss_gradient(spec, theta, data);
      for (Eigen::Index i = 0; i < theta.values.size(); ++i) {
        Hypothesis plus = theta, minus = theta;
        plus.values(i) += h;
        minus.values(i) -= h;
        const double fd = (empirical_loss(spec, plus, data) -
                           empirical_loss(spec, minus, data)) /
                          (2.0 * h);
        const double scale = std::max(1.0, std::abs(fd));
        ASSERT_NEAR(grad(i), fd, tol * scale);
      }
    }
  };

  for (const Family family : {Family::bernoulli_pm1, Family::gaussian_unit}) {
    Eigen::VectorXd ts(3);
    ts << 0.2, -0.1, 0.4;
    ProblemSpec spec = mle_spec(ts, family);
    const Dataset data = sample_dataset(spec, 9, rng);
    check(spec, data);
  }
  {
    ProblemSpec spec;
    spec.kind = ProblemKind::glm_fixed;
    spec.family = Family::bernoulli_pm1;
    Eigen::VectorXd ts(3);
    ts << 0.5, 0.0, -0.7;
    spec.true_hypothesis = Hypothesis::Vector(ts);
    spec.design_bound = 1.5;
    spec.design = sample_design(spec.kind, 8, 3, 1.5, rng);
    spec.n_samples = 8;
    const Dataset data = sample_dataset(spec, 8, rng);
    check(spec, data);
  }
  {
    ProblemSpec spec;
    spec.kind = ProblemKind::nonparam_regression;
    spec.family = Family::bernoulli_pm1;
    spec.basis_count = 3;
    spec.design = sample_design(spec.kind, 7, 1, 1.0, rng);
    spec.design_bound = std::sqrt(2.0);
    spec.true_hypothesis = Hypothesis::Vector(Eigen::VectorXd::Zero(3));
    spec.n_samples = 7;
    const Dataset data = sample_dataset(spec, 7, rng);
    check(spec, data);
  }
  {
    ProblemSpec spec;
    spec.kind = ProblemKind::expfam_pca;
    spec.family = Family::bernoulli_pm1;
    spec.true_hypothesis = Hypothesis::Matrix(Eigen::MatrixXd::Zero(2, 3));
    spec.n_samples = 6;
    const Dataset data = sample_dataset(spec, 6, rng);
    check(spec, data);
  }
}

TEST(LossGradient, HingeSubgradientConvention) {
  const ProblemSpec spec = maxmargin_spec(1, 1, 2.0);
  Dataset data;
  data.values = Eigen::MatrixXd::Ones(1, 1);
  // x * theta = 2: inactive hinge, zero subgradient.
  EXPECT_DOUBLE_EQ(
      loss_gradient(spec, Hypothesis::Matrix(Eigen::MatrixXd::Constant(1, 1, 2.0)),
                    data)(0, 0),
      0.0);
  // Exactly at the kink the convention is f'(1) = 0.
  EXPECT_DOUBLE_EQ(
      loss_gradient(spec, Hypothesis::Matrix(Eigen::MatrixXd::Ones(1, 1)),
                    data)(0, 0),
      0.0);
  // Active hinge: d/dtheta K max(0, 1 - x theta) = -K x.
  EXPECT_DOUBLE_EQ(
      loss_gradient(spec, Hypothesis::Matrix(Eigen::MatrixXd::Zero(1, 1)),
                    data)(0, 0),
      -2.0);
}

TEST(PerturbedFlag, IdentityMechanismMatchesUnperturbed) {
  PhiloxRng rng(31, 0);
  Eigen::VectorXd ts(3);
  ts << 0.3, -0.3, 0.0;
  const ProblemSpec spec = mle_spec(ts);
  const Dataset data = sample_dataset(spec, 20, rng);
  PerturbationSpec identity;
  identity.kind = MechanismKind::identity;
  const Dataset via_identity = perturb_dataset(spec, data, identity);
  EXPECT_FALSE(data.perturbed);
  EXPECT_TRUE(via_identity.perturbed);
  const Hypothesis theta = Hypothesis::Vector(ts);
  EXPECT_DOUBLE_EQ(empirical_loss(spec, theta, data),
                   empirical_loss(spec, theta, via_identity));
}

TEST(EmpiricalStats, AgreesWithDirectLoss) {
  PhiloxRng rng(37, 0);
  Eigen::VectorXd ts(3);
  ts << 0.2, -0.6, 0.0;
  const ProblemSpec spec = mle_spec(ts);
  const Dataset data = sample_dataset(spec, 25, rng);
  const SufficientStatistic stat = empirical_stats(spec, data);
  EXPECT_FALSE(stat.summed);
  EXPECT_EQ(stat.sample_count, 25);
  Eigen::VectorXd tv(3);
  tv << 0.4, 0.1, -0.9;
  const Hypothesis theta = Hypothesis::Vector(tv);
  EXPECT_NEAR(mle_loss_from_stats(spec, theta, stat),
              empirical_loss(spec, theta, data), 1e-14);
}

TEST(MleLossFromStats, SummedStatsNormalized) {
  Eigen::VectorXd ts(2);
  ts << 0.0, 0.0;
  const ProblemSpec spec = mle_spec(ts);
  SufficientStatistic stat;
  stat.values = Eigen::MatrixXd::Constant(2, 1, 3.0);
  stat.sample_count = 6;
  stat.summed = true;
  Eigen::VectorXd tv(2);
  tv << 1.0, -1.0;
  const Hypothesis theta = Hypothesis::Vector(tv);
  // Normalized statistic is 0.5 per coordinate.
  const double expected = -0.5 * 1.0 - 0.5 * (-1.0) +
                          2.0 * std::log(2.0 * std::cosh(1.0));
  EXPECT_NEAR(mle_loss_from_stats(spec, theta, stat), expected, 1e-12);
}

TEST(MaxmarginTruth, ClosedFormSigns) {
  {
    const ProblemSpec spec = maxmargin_spec(2, 2, 1.0, 0.9);
    EXPECT_TRUE((maxmargin_true_hypothesis(spec).values.array() == 1.0).all());
    // Flipping with q = 0.6 keeps P[+1] = 0.58 > 1/2: same minimizer.
    EXPECT_TRUE(
        (maxmargin_true_hypothesis_signflip(spec, 0.6).values.array() == 1.0)
            .all());
  }
  {
    const ProblemSpec spec = maxmargin_spec(2, 2, 1.0, 0.5);
    EXPECT_TRUE((maxmargin_true_hypothesis(spec).values.array() == 0.0).all());
  }
  {
    const ProblemSpec spec = maxmargin_spec(2, 2, 1.0, 0.2);
    EXPECT_TRUE((maxmargin_true_hypothesis(spec).values.array() == -1.0).all());
  }
}

TEST(LossLowerBound, BernoulliPointwiseMin) {
  Eigen::VectorXd ts(1);
  ts << 0.0;
  const ProblemSpec spec = mle_spec(ts);
  Dataset data;
  data.values = Eigen::MatrixXd(2, 1);
  data.values << 1, -1;  // mean 0 -> pointwise min log 2
  EXPECT_NEAR(empirical_loss_lower_bound(spec, data), std::log(2.0), 1e-12);
  // Perturbed statistic beyond [-1, 1]: unbounded below.
  Dataset wide;
  wide.values = Eigen::MatrixXd::Constant(2, 1, 1.5);
  wide.perturbed = true;
  EXPECT_EQ(empirical_loss_lower_bound(spec, wide),
            -std::numeric_limits<double>::infinity());
}

}  // namespace
}  // namespace perturbml
