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

#include <benchmark/benchmark.h>

#include "perturbml/exp_family.hpp"
#include "perturbml/irrecover.hpp"
#include "perturbml/optimize.hpp"
#include "perturbml/perturb.hpp"
#include "perturbml/rates.hpp"
#include "perturbml/regularize.hpp"
#include "perturbml/rng.hpp"

namespace {

using namespace perturbml;

void BM_PhiloxNormal(benchmark::State& state) {
  PhiloxRng rng(1, 0);
  double acc = 0;
  for (auto _ : state) {
    acc += rng.normal();
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_PhiloxNormal);

void BM_GaussianMechanism(benchmark::State& state) {
  const long n = state.range(0);
  Eigen::MatrixXd data = Eigen::MatrixXd::Ones(n, 10);
  PerturbationSpec pert;
  pert.kind = MechanismKind::gaussian_additive;
  pert.sigma_eta = 1.0;
  pert.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(perturb_gaussian(data, pert));
  }
  state.SetItemsProcessed(state.iterations() * n * 10);
}
BENCHMARK(BM_GaussianMechanism)->Arg(100)->Arg(1000)->Arg(10000);

void BM_RateEval(benchmark::State& state) {
  RateQuery q;
  q.problem_kind = ProblemKind::mle_expfam;
  q.sigma_x = 1.0;
  q.sigma_eta = 1.0;
  q.n = 1000;
  q.p = 10;
  q.delta = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rate(q).value);
  }
}
BENCHMARK(BM_RateEval);

void BM_L1MleSolve(benchmark::State& state) {
  const long p = state.range(0);
  ProblemSpec spec;
  spec.kind = ProblemKind::mle_expfam;
  spec.family = Family::bernoulli_pm1;
  spec.true_hypothesis = Hypothesis::Vector(Eigen::VectorXd::Zero(p));
  spec.n_samples = 1;
  PhiloxRng rng(7, 0);
  Dataset data;
  data.values.resize(1, p);
  for (long j = 0; j < p; ++j) data.values(0, j) = 1.2 * (rng.uniform() - 0.5);
  data.perturbed = true;
  RegularizerSpec reg;
  SolveConfig cfg;
  cfg.xi = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimize(spec, data, reg, 0.1, cfg));
  }
}
BENCHMARK(BM_L1MleSolve)->Arg(10)->Arg(100);

void BM_TraceNormProx(benchmark::State& state) {
  const long d = state.range(0);
  PhiloxRng rng(9, 0);
  Eigen::MatrixXd m(d, d);
  for (long i = 0; i < d * d; ++i) m(i / d, i % d) = rng.normal();
  const Hypothesis v = Hypothesis::Matrix(m);
  RegularizerSpec reg;
  reg.kind = RegKind::trace_norm;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox(reg, v, 0.5));
  }
}
BENCHMARK(BM_TraceNormProx)->Arg(20)->Arg(100)->Arg(200);

void BM_ThresholdAdversary(benchmark::State& state) {
  IrrecovQuery query;
  query.kind = IrrecovKind::glm_labels;
  query.gamma = 0.5;
  query.n = 100;
  PerturbationSpec pert;
  pert.kind = MechanismKind::gaussian_additive;
  pert.sigma_eta = 4.0;
  pert.seed = 11;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_adversary(query, pert, 1000));
  }
  state.SetItemsProcessed(state.iterations() * 1000 * query.n);
}
BENCHMARK(BM_ThresholdAdversary);

}  // namespace

BENCHMARK_MAIN();
