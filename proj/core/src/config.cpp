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

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "perturbml/errors.hpp"
#include "perturbml/experiment.hpp"

namespace perturbml {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void expect_keys(const json& obj, const std::set<std::string>& allowed,
                 const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      fail("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

template <typename T>
T get_required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail("missing key \"" + std::string(key) + "\" in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "rate_table") return ExperimentKind::rate_table;
  if (s == "consistency") return ExperimentKind::consistency;
  if (s == "concentration") return ExperimentKind::concentration;
  if (s == "irrecoverability") return ExperimentKind::irrecoverability;
  fail("unknown experiment \"" + s + "\"");
}

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::rate_table: return "rate_table";
    case ExperimentKind::consistency: return "consistency";
    case ExperimentKind::concentration: return "concentration";
    case ExperimentKind::irrecoverability: return "irrecoverability";
  }
  return "?";
}

ProblemKind parse_problem_kind(const std::string& s) {
  if (s == "mle_expfam") return ProblemKind::mle_expfam;
  if (s == "glm_fixed") return ProblemKind::glm_fixed;
  if (s == "expfam_pca") return ProblemKind::expfam_pca;
  if (s == "nonparam_regression") return ProblemKind::nonparam_regression;
  if (s == "maxmargin_mf") return ProblemKind::maxmargin_mf;
  fail("unknown problem kind \"" + s + "\"");
}

const char* problem_kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::mle_expfam: return "mle_expfam";
    case ProblemKind::glm_fixed: return "glm_fixed";
    case ProblemKind::expfam_pca: return "expfam_pca";
    case ProblemKind::nonparam_regression: return "nonparam_regression";
    case ProblemKind::maxmargin_mf: return "maxmargin_mf";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "bernoulli_pm1") return Family::bernoulli_pm1;
  if (s == "gaussian_unit") return Family::gaussian_unit;
  fail("unknown family \"" + s + "\"");
}

const char* family_name(Family f) {
  return f == Family::bernoulli_pm1 ? "bernoulli_pm1" : "gaussian_unit";
}

MechanismKind parse_mechanism(const std::string& s) {
  if (s == "identity") return MechanismKind::identity;
  if (s == "gaussian_additive") return MechanismKind::gaussian_additive;
  if (s == "ising_clamp") return MechanismKind::ising_clamp;
  if (s == "sign_flip") return MechanismKind::sign_flip;
  fail("unknown perturbation kind \"" + s + "\"");
}

const char* mechanism_name(MechanismKind k) {
  switch (k) {
    case MechanismKind::identity: return "identity";
    case MechanismKind::gaussian_additive: return "gaussian_additive";
    case MechanismKind::ising_clamp: return "ising_clamp";
    case MechanismKind::sign_flip: return "sign_flip";
  }
  return "?";
}

RegKind parse_reg_kind(const std::string& s) {
  if (s == "l1") return RegKind::l1;
  if (s == "tikhonov") return RegKind::tikhonov;
  if (s == "elastic_net") return RegKind::elastic_net;
  if (s == "group_l12") return RegKind::group_l12;
  if (s == "trace_norm") return RegKind::trace_norm;
  fail("unknown regularizer kind \"" + s + "\"");
}

const char* reg_kind_name(RegKind k) {
  switch (k) {
    case RegKind::l1: return "l1";
    case RegKind::tikhonov: return "tikhonov";
    case RegKind::elastic_net: return "elastic_net";
    case RegKind::group_l12: return "group_l12";
    case RegKind::trace_norm: return "trace_norm";
  }
  return "?";
}

RateRegKind parse_rate_reg(const std::string& s) {
  if (s == "l1") return RateRegKind::l1;
  if (s == "k_support") return RateRegKind::k_support;
  if (s == "tikhonov_or_l1inf") return RateRegKind::tikhonov_or_l1inf;
  if (s == "multitask_l12") return RateRegKind::multitask_l12;
  if (s == "overlap_l12") return RateRegKind::overlap_l12;
  if (s == "overlap_l1inf") return RateRegKind::overlap_l1inf;
  if (s == "low_rank") return RateRegKind::low_rank;
  fail("unknown rate column \"" + s + "\"");
}

IrrecovKind parse_irrecov_kind(const std::string& s) {
  if (s == "mle_ising") return IrrecovKind::mle_ising;
  if (s == "glm_labels") return IrrecovKind::glm_labels;
  if (s == "pca_entries") return IrrecovKind::pca_entries;
  if (s == "maxmargin_flip") return IrrecovKind::maxmargin_flip;
  fail("unknown irrecoverability kind \"" + s + "\"");
}

const char* irrecov_kind_name(IrrecovKind k) {
  switch (k) {
    case IrrecovKind::mle_ising: return "mle_ising";
    case IrrecovKind::glm_labels: return "glm_labels";
    case IrrecovKind::pca_entries: return "pca_entries";
    case IrrecovKind::maxmargin_flip: return "maxmargin_flip";
  }
  return "?";
}

ThetaInit parse_theta(const json& obj) {
  expect_keys(obj, {"zeros", "constant", "sparse", "values"}, "theta_star");
  if (obj.size() != 1) fail("theta_star must pick exactly one recipe");
  ThetaInit t;
  if (obj.contains("zeros")) {
    if (!obj.at("zeros").get<bool>()) fail("theta_star.zeros must be true");
    t.kind = ThetaInit::Kind::zeros;
  } else if (obj.contains("constant")) {
    t.kind = ThetaInit::Kind::constant;
    t.constant = obj.at("constant").get<double>();
  } else if (obj.contains("sparse")) {
    const json& s = obj.at("sparse");
    expect_keys(s, {"nonzeros", "magnitude"}, "theta_star.sparse");
    t.kind = ThetaInit::Kind::sparse;
    t.nonzeros = get_required<long>(s, "nonzeros", "theta_star.sparse");
    t.magnitude = get_required<double>(s, "magnitude", "theta_star.sparse");
  } else {
    t.kind = ThetaInit::Kind::explicit_values;
    t.values = obj.at("values").get<std::vector<double>>();
  }
  return t;
}

json theta_json(const ThetaInit& t) {
  switch (t.kind) {
    case ThetaInit::Kind::zeros:
      return json{{"zeros", true}};
    case ThetaInit::Kind::constant:
      return json{{"constant", t.constant}};
    case ThetaInit::Kind::sparse:
      return json{{"sparse", {{"nonzeros", t.nonzeros},
                              {"magnitude", t.magnitude}}}};
    case ThetaInit::Kind::explicit_values:
      return json{{"values", t.values}};
  }
  return {};
}

ProblemConfig parse_problem(const json& obj) {
  expect_keys(obj,
              {"kind", "family", "dims", "theta_star", "design_bound",
               "basis_count", "lipschitz_K", "plus_prob"},
              "problem");
  ProblemConfig p;
  p.kind = parse_problem_kind(get_required<std::string>(obj, "kind", "problem"));
  p.family = parse_family(get_or<std::string>(obj, "family", "bernoulli_pm1"));
  p.dims = get_or<std::vector<long>>(obj, "dims", {1});
  if (obj.contains("theta_star")) p.theta = parse_theta(obj.at("theta_star"));
  p.design_bound = get_or<double>(obj, "design_bound", 1.0);
  p.basis_count = get_or<long>(obj, "basis_count", 0);
  p.lipschitz_K = get_or<double>(obj, "lipschitz_K", 1.0);
  p.plus_prob = get_or<double>(obj, "plus_prob", 0.5);
  return p;
}

json problem_json(const ProblemConfig& p) {
  json obj;
  obj["kind"] = problem_kind_name(p.kind);
  obj["family"] = family_name(p.family);
  obj["dims"] = p.dims;
  obj["theta_star"] = theta_json(p.theta);
  obj["design_bound"] = p.design_bound;
  obj["basis_count"] = p.basis_count;
  obj["lipschitz_K"] = p.lipschitz_K;
  obj["plus_prob"] = p.plus_prob;
  return obj;
}

PerturbationConfig parse_perturbation(const json& obj) {
  expect_keys(obj, {"kind", "sigma_eta", "sigma_eta_sq", "q"}, "perturbation");
  PerturbationConfig p;
  p.kind = parse_mechanism(get_required<std::string>(obj, "kind", "perturbation"));
  if (obj.contains("sigma_eta") && obj.contains("sigma_eta_sq")) {
    fail("give sigma_eta or sigma_eta_sq, not both");
  }
  if (obj.contains("sigma_eta_sq")) {
    const double sq = obj.at("sigma_eta_sq").get<double>();
    if (sq < 0) fail("sigma_eta_sq must be nonnegative");
    p.sigma_eta = std::sqrt(sq);
    p.sigma_given_squared = true;
  } else {
    p.sigma_eta = get_or<double>(obj, "sigma_eta", 0.0);
  }
  p.q = get_or<double>(obj, "q", 1.0);
  return p;
}

json perturbation_json(const PerturbationConfig& p) {
  json obj;
  obj["kind"] = mechanism_name(p.kind);
  if (p.sigma_given_squared) {
    obj["sigma_eta_sq"] = p.sigma_eta * p.sigma_eta;
  } else {
    obj["sigma_eta"] = p.sigma_eta;
  }
  obj["q"] = p.q;
  return obj;
}

RegularizerSpec parse_regularizer(const json& obj) {
  expect_keys(obj, {"kind", "groups"}, "regularizer");
  RegularizerSpec reg;
  reg.kind = parse_reg_kind(get_required<std::string>(obj, "kind", "regularizer"));
  if (obj.contains("groups")) {
    for (const auto& group : obj.at("groups")) {
      std::vector<Eigen::Index> g;
      for (const auto& idx : group) g.push_back(idx.get<long>());
      reg.groups.push_back(std::move(g));
    }
  }
  return reg;
}

json regularizer_json(const RegularizerSpec& reg) {
  json obj;
  obj["kind"] = reg_kind_name(reg.kind);
  if (!reg.groups.empty()) {
    json groups = json::array();
    for (const auto& g : reg.groups) {
      json group = json::array();
      for (Eigen::Index idx : g) group.push_back(static_cast<long>(idx));
      groups.push_back(group);
    }
    obj["groups"] = groups;
  }
  return obj;
}

SolverConfig parse_solver(const json& obj) {
  expect_keys(obj, {"alpha", "xi", "max_iters", "step_rule", "step"}, "solver");
  SolverConfig s;
  s.alpha = get_or<double>(obj, "alpha", 2.0);
  s.xi = get_or<double>(obj, "xi", 1e-4);
  s.max_iters = get_or<int>(obj, "max_iters", 20000);
  const std::string rule = get_or<std::string>(obj, "step_rule", "backtracking");
  if (rule == "backtracking") {
    s.step_rule = StepRule::backtracking;
  } else if (rule == "fixed") {
    s.step_rule = StepRule::fixed;
  } else {
    fail("unknown step_rule \"" + rule + "\"");
  }
  s.step = get_or<double>(obj, "step", 1.0);
  if (s.alpha < 2.0) fail("solver.alpha must be at least 2");
  if (s.xi <= 0.0) fail("solver.xi must be positive");
  return s;
}

json solver_json(const SolverConfig& s) {
  json obj;
  obj["alpha"] = s.alpha;
  obj["xi"] = s.xi;
  obj["max_iters"] = s.max_iters;
  obj["step_rule"] =
      s.step_rule == StepRule::backtracking ? "backtracking" : "fixed";
  obj["step"] = s.step;
  return obj;
}

RateTableConfig parse_rate_query(const json& obj) {
  expect_keys(obj,
              {"reg", "sigma_x", "sigma_eta", "p", "k", "g", "B", "q_n",
               "beta", "K", "q"},
              "rate_query");
  RateTableConfig r;
  r.reg = parse_rate_reg(get_or<std::string>(obj, "reg", "l1"));
  r.sigma_x = get_or<double>(obj, "sigma_x", 1.0);
  r.sigma_eta = get_or<double>(obj, "sigma_eta", 0.0);
  r.p = get_or<long>(obj, "p", 1);
  r.k = get_or<long>(obj, "k", 1);
  r.g = get_or<long>(obj, "g", 1);
  r.B = get_or<double>(obj, "B", 1.0);
  r.q_n = get_or<long>(obj, "q_n", 1);
  r.beta = get_or<double>(obj, "beta", 0.25);
  r.K = get_or<double>(obj, "K", 1.0);
  r.q = get_or<double>(obj, "q", 1.0);
  return r;
}

json rate_query_json(const RateTableConfig& r) {
  json obj;
  obj["reg"] = rate_reg_kind_name(r.reg);
  obj["sigma_x"] = r.sigma_x;
  obj["sigma_eta"] = r.sigma_eta;
  obj["p"] = r.p;
  obj["k"] = r.k;
  obj["g"] = r.g;
  obj["B"] = r.B;
  obj["q_n"] = r.q_n;
  obj["beta"] = r.beta;
  obj["K"] = r.K;
  obj["q"] = r.q;
  return obj;
}

IrrecovConfig parse_irrecov(const json& obj) {
  expect_keys(obj, {"kind", "gamma", "n", "p", "noise_at_threshold"},
              "irrecoverability");
  IrrecovConfig c;
  c.kind = parse_irrecov_kind(
      get_required<std::string>(obj, "kind", "irrecoverability"));
  c.gamma = get_required<double>(obj, "gamma", "irrecoverability");
  c.n = get_required<long>(obj, "n", "irrecoverability");
  c.p = get_or<long>(obj, "p", 0);
  c.noise_at_threshold = get_or<bool>(obj, "noise_at_threshold", false);
  return c;
}

json irrecov_json(const IrrecovConfig& c) {
  json obj;
  obj["kind"] = irrecov_kind_name(c.kind);
  obj["gamma"] = c.gamma;
  obj["n"] = c.n;
  obj["p"] = c.p;
  obj["noise_at_threshold"] = c.noise_at_threshold;
  return obj;
}

CriteriaConfig parse_criteria(const json& obj) {
  expect_keys(obj,
              {"min_coverage", "exponent_min", "exponent_max",
               "max_failure_rate", "require_adversary_pass"},
              "criteria");
  CriteriaConfig c;
  if (obj.contains("min_coverage")) c.min_coverage = obj.at("min_coverage").get<double>();
  if (obj.contains("exponent_min")) c.exponent_min = obj.at("exponent_min").get<double>();
  if (obj.contains("exponent_max")) c.exponent_max = obj.at("exponent_max").get<double>();
  if (obj.contains("max_failure_rate")) {
    c.max_failure_rate = obj.at("max_failure_rate").get<double>();
  }
  c.require_adversary_pass = get_or<bool>(obj, "require_adversary_pass", true);
  return c;
}

json criteria_json(const CriteriaConfig& c) {
  json obj;
  if (c.min_coverage) obj["min_coverage"] = *c.min_coverage;
  if (c.exponent_min) obj["exponent_min"] = *c.exponent_min;
  if (c.exponent_max) obj["exponent_max"] = *c.exponent_max;
  if (c.max_failure_rate) obj["max_failure_rate"] = *c.max_failure_rate;
  obj["require_adversary_pass"] = c.require_adversary_pass;
  return obj;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  expect_keys(root,
              {"experiment", "seed", "trials", "n_grid", "delta", "gamma",
               "tail", "output_dir", "jobs", "problem", "perturbation",
               "regularizer", "solver", "rate_query", "irrecoverability",
               "criteria"},
              "config");

  ExperimentConfig c;
  c.experiment = parse_experiment_kind(
      get_required<std::string>(root, "experiment", "config"));
  c.seed = get_or<std::uint64_t>(root, "seed", 0);
  c.trials = get_or<long>(root, "trials", 0);
  c.n_grid = get_or<std::vector<long>>(root, "n_grid", {});
  c.delta = get_or<double>(root, "delta", 0.05);
  c.gamma = get_or<double>(root, "gamma", 0.5);
  const std::string tail = get_or<std::string>(root, "tail", "subgaussian");
  if (tail == "subgaussian") {
    c.tail = TailKind::subgaussian;
  } else if (tail == "finite_variance") {
    c.tail = TailKind::finite_variance;
  } else {
    fail("unknown tail \"" + tail + "\"");
  }
  c.output_dir = get_or<std::string>(root, "output_dir", "");
  c.jobs = get_or<int>(root, "jobs", 1);
  if (c.jobs < 1) fail("jobs must be >= 1");

  if (root.contains("problem")) c.problem = parse_problem(root.at("problem"));
  if (root.contains("perturbation")) {
    c.perturbation = parse_perturbation(root.at("perturbation"));
  }
  if (root.contains("regularizer")) {
    c.regularizer = parse_regularizer(root.at("regularizer"));
  }
  if (root.contains("solver")) c.solver = parse_solver(root.at("solver"));
  if (root.contains("rate_query")) {
    c.rate_query = parse_rate_query(root.at("rate_query"));
  }
  if (root.contains("irrecoverability")) {
    c.irrecoverability = parse_irrecov(root.at("irrecoverability"));
  }
  if (root.contains("criteria")) c.criteria = parse_criteria(root.at("criteria"));

  // Cross-field validation per experiment.
  switch (c.experiment) {
    case ExperimentKind::rate_table:
      if (c.n_grid.empty()) fail("rate_table needs a nonempty n_grid");
      break;
    case ExperimentKind::consistency:
      if (!root.contains("problem")) fail("consistency needs a problem");
      if (!root.contains("perturbation")) fail("consistency needs a perturbation");
      if (!root.contains("regularizer")) fail("consistency needs a regularizer");
      if (c.n_grid.empty()) fail("consistency needs a nonempty n_grid");
      if (c.trials < 100) fail("consistency needs trials >= 100");
      break;
    case ExperimentKind::concentration:
      if (!root.contains("problem")) fail("concentration needs a problem");
      if (!root.contains("perturbation")) fail("concentration needs a perturbation");
      if (c.n_grid.empty()) fail("concentration needs a nonempty n_grid");
      if (c.trials < 1) fail("concentration needs trials >= 1");
      break;
    case ExperimentKind::irrecoverability:
      if (!root.contains("irrecoverability")) {
        fail("irrecoverability experiment needs an irrecoverability section");
      }
      if (!root.contains("perturbation") &&
          !c.irrecoverability.noise_at_threshold) {
        fail("irrecoverability needs a perturbation or noise_at_threshold");
      }
      if (c.trials < 1000) fail("irrecoverability needs trials >= 1000");
      break;
  }
  if (!(c.delta > 0.0 && c.delta < 1.0)) fail("delta must lie in (0,1)");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_json(const ExperimentConfig& c) {
  json root;
  root["experiment"] = experiment_kind_name(c.experiment);
  root["seed"] = c.seed;
  root["trials"] = c.trials;
  root["n_grid"] = c.n_grid;
  root["delta"] = c.delta;
  root["gamma"] = c.gamma;
  root["tail"] =
      c.tail == TailKind::subgaussian ? "subgaussian" : "finite_variance";
  root["output_dir"] = c.output_dir;
  root["jobs"] = c.jobs;
  switch (c.experiment) {
    case ExperimentKind::rate_table:
      root["problem"] = problem_json(c.problem);
      root["rate_query"] = rate_query_json(c.rate_query);
      break;
    case ExperimentKind::consistency:
      root["problem"] = problem_json(c.problem);
      root["perturbation"] = perturbation_json(c.perturbation);
      root["regularizer"] = regularizer_json(c.regularizer);
      root["solver"] = solver_json(c.solver);
      break;
    case ExperimentKind::concentration:
      root["problem"] = problem_json(c.problem);
      root["perturbation"] = perturbation_json(c.perturbation);
      root["regularizer"] = regularizer_json(c.regularizer);
      break;
    case ExperimentKind::irrecoverability:
      root["irrecoverability"] = irrecov_json(c.irrecoverability);
      root["perturbation"] = perturbation_json(c.perturbation);
      break;
  }
  root["criteria"] = criteria_json(c.criteria);
  return root.dump(2);
}

ProblemSpec build_problem(const ProblemConfig& config, long n, PhiloxRng& rng) {
  ProblemSpec spec;
  spec.kind = config.kind;
  spec.family = config.family;
  spec.n_samples = n;
  spec.lipschitz_K = config.lipschitz_K;
  spec.plus_prob = config.plus_prob;
  spec.basis_count = config.basis_count;

  long coeff_dim = 0;
  long rows = 0, cols = 1;
  switch (config.kind) {
    case ProblemKind::mle_expfam:
    case ProblemKind::glm_fixed:
      if (config.dims.size() != 1) fail("vector classes need dims = [p]");
      coeff_dim = rows = config.dims[0];
      break;
    case ProblemKind::nonparam_regression:
      if (config.dims.size() != 1) fail("nonparam needs dims = [input_dim]");
      if (config.basis_count < 1) fail("nonparam needs basis_count >= 1");
      coeff_dim = rows = config.basis_count * config.dims[0];
      break;
    case ProblemKind::expfam_pca:
    case ProblemKind::maxmargin_mf:
      if (config.dims.size() != 2) fail("matrix classes need dims = [n1, n2]");
      rows = config.dims[0];
      cols = config.dims[1];
      coeff_dim = rows * cols;
      break;
  }

  Eigen::VectorXd flat = Eigen::VectorXd::Zero(coeff_dim);
  switch (config.theta.kind) {
    case ThetaInit::Kind::zeros:
      break;
    case ThetaInit::Kind::constant:
      flat.setConstant(config.theta.constant);
      break;
    case ThetaInit::Kind::sparse:
      if (config.theta.nonzeros > coeff_dim) {
        fail("theta_star.sparse.nonzeros exceeds the coefficient count");
      }
      flat.head(config.theta.nonzeros).setConstant(config.theta.magnitude);
      break;
    case ThetaInit::Kind::explicit_values:
      if (static_cast<long>(config.theta.values.size()) != coeff_dim) {
        fail("theta_star.values length must match the coefficient count");
      }
      for (long i = 0; i < coeff_dim; ++i) flat(i) = config.theta.values[i];
      break;
  }

  if (config.kind == ProblemKind::expfam_pca ||
      config.kind == ProblemKind::maxmargin_mf) {
    spec.true_hypothesis =
        Hypothesis::Matrix(Eigen::Map<Eigen::MatrixXd>(flat.data(), rows, cols));
  } else {
    spec.true_hypothesis = Hypothesis::Vector(flat);
  }

  switch (config.kind) {
    case ProblemKind::glm_fixed:
      spec.design_bound = config.design_bound;
      spec.design = sample_design(config.kind, n, config.dims[0],
                                  config.design_bound, rng);
      break;
    case ProblemKind::nonparam_regression:
      spec.design_bound = std::sqrt(2.0);
      spec.design = sample_design(config.kind, n, config.dims[0], 1.0, rng);
      break;
    default:
      break;
  }
  spec.validate();
  return spec;
}

PerturbationSpec build_perturbation(const PerturbationConfig& config,
                                    std::uint64_t seed) {
  PerturbationSpec spec;
  spec.kind = config.kind;
  spec.sigma_eta = config.sigma_eta;
  spec.q = config.q;
  spec.seed = seed;
  spec.validate();
  return spec;
}

}  // namespace perturbml
