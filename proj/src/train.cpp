// Copyright 2026 The Bornforge Authors
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

#include "bornforge/train.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bornforge/cost_mmd.hpp"
#include "bornforge/cost_sinkhorn.hpp"
#include "bornforge/cost_stein.hpp"
#include "bornforge/data.hpp"
#include "bornforge/errors.hpp"
#include "bornforge/metrics.hpp"
#include "bornforge/parallel.hpp"
#include "bornforge/rng.hpp"

#ifndef BORNFORGE_VERSION
#define BORNFORGE_VERSION "0.0.0"
#endif

namespace bornforge {

namespace {

// Seed stream labels. Data streams and training streams never share a label.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kDataStream = 2;
constexpr std::uint64_t kSplitStream = 3;
constexpr std::uint64_t kModelStream = 10;
constexpr std::uint64_t kBatchModelStream = 11;
constexpr std::uint64_t kBatchDataStream = 12;
constexpr std::uint64_t kTestStream = 13;
constexpr std::uint64_t kShiftStream = 14;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ParamKind kind_of(const std::string& name) {
  if (name == "couplings") return ParamKind::kCoupling;
  if (name == "locals") return ParamKind::kLocal;
  if (name == "gamma") return ParamKind::kGamma;
  if (name == "delta") return ParamKind::kDelta;
  return ParamKind::kSigma;
}

}  // namespace

std::string version_string() { return BORNFORGE_VERSION; }

AdamState adam_init(std::size_t dim, const OptimizerConfig& opt) {
  AdamState s;
  s.m.assign(dim, 0.0);
  s.v.assign(dim, 0.0);
  s.beta1 = opt.beta1;
  s.beta2 = opt.beta2;
  s.eps = opt.eps;
  s.learning_rate = opt.learning_rate;
  return s;
}

std::vector<double> adam_step(AdamState& state, const std::vector<double>& grad) {
  if (grad.size() != state.m.size()) throw ShapeError("gradient length does not match Adam state");
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  std::vector<double> delta(grad.size());
  for (std::size_t k = 0; k < grad.size(); ++k) {
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * grad[k];
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * grad[k] * grad[k];
    const double mhat = state.m[k] / c1;
    const double vhat = state.v[k] / c2;
    delta[k] = state.learning_rate * mhat / (std::sqrt(vhat) + state.eps);
  }
  return delta;
}

std::unique_ptr<CostFunction> make_cost(const RunConfig& cfg, const ProbabilityVector& target) {
  if (cfg.cost.kind == "mmd") return std::make_unique<MmdCost>(cfg.cost.kernel, cfg.n);
  if (cfg.cost.kind == "stein") {
    SteinOptions opts;
    opts.score = cfg.cost.score;
    opts.eta = cfg.cost.eta;
    opts.eigenvectors = cfg.cost.eigenvectors;
    opts.policy = cfg.cost.undefined_score == "drop" ? UndefinedScorePolicy::kDropPair
                                                     : UndefinedScorePolicy::kError;
    return std::make_unique<SteinCost>(cfg.cost.kernel, cfg.n, opts, target);
  }
  return std::make_unique<SinkhornCost>(cfg.cost.sinkhorn);
}

CircuitParams initial_params(const RunConfig& cfg) {
  CircuitParams p = random_hard_init(cfg.n, HardFamily::parse(cfg.model.init_family, cfg.model.init_d),
                                     derive_seed(cfg.seed, {kInitStream}));
  const auto nn = static_cast<std::size_t>(cfg.n);
  p.set_gamma(std::vector<double>(nn, cfg.model.final_gamma));
  p.set_delta(std::vector<double>(nn, cfg.model.final_delta));
  p.set_sigma(std::vector<double>(nn, cfg.model.final_sigma));
  for (std::size_t k = 0; k < p.size(); ++k) p.set_trainable(k, false);
  for (const auto& name : cfg.model.trainable) p.set_trainable_kind(kind_of(name), true);
  if (cfg.model.couplings != "full") {
    for (std::size_t k = 0; k < p.num_couplings(); ++k) {
      const auto idx = p.index_at(k);
      bool keep = false;
      for (const auto& [a, b] : cfg.model.edges) {
        keep = keep || (std::min(a, b) == idx.i && std::max(a, b) == idx.j);
      }
      if (cfg.model.couplings == "none" || !keep) {
        p.set(k, 0.0);
        p.set_trainable(k, false);
      }
    }
  }
  return p;
}

TrainingProblem make_problem(const RunConfig& cfg) {
  TrainingProblem prob;
  prob.init = initial_params(cfg);
  SampleSet all;
  TargetSpec spec{cfg.n, cfg.data.modes, cfg.data.p};
  std::uint64_t data_seed = cfg.seed;
  if (!cfg.data.file.empty()) {
    DatasetFile file = read_dataset(cfg.data.file);
    if (file.spec.n != cfg.n) throw ConfigError("data.file", "dataset width differs from n");
    spec = file.spec;
    data_seed = file.seed;
    all = std::move(file.samples);
    if (all.size() < cfg.data.train + 2) {
      throw ConfigError("data.file", "dataset has fewer samples than the train split needs");
    }
  } else {
    all = sample_target(spec, cfg.data.samples, derive_seed(cfg.seed, {kDataStream}));
  }
  prob.target = target_pmf(spec);
  prob.dataset = {spec, data_seed, all};
  auto split = split_samples(all, cfg.data.train, derive_seed(cfg.seed, {kSplitStream}));
  prob.train = std::move(split.train);
  prob.test = std::move(split.test);
  return prob;
}

TrainingRecord train_problem(const RunConfig& cfg, const TrainingProblem& problem) {
  const auto cost = make_cost(cfg, problem.target);
  const bool exact = cfg.training.expectation == "exact";
  TrainingRecord rec;
  rec.config = to_json(cfg);
  rec.seed = cfg.seed;
  rec.initial = problem.init;
  rec.target = problem.target;

  CircuitParams theta = problem.init;
  const auto trainable = theta.trainable_indices();
  AdamState adam = adam_init(trainable.size(), cfg.optimizer);
  const std::uint64_t seed = cfg.seed;
  const std::size_t N = cfg.training.model_samples;

  for (int e = 0; e <= cfg.training.epochs; ++e) {
    const auto ue = static_cast<std::uint64_t>(e);
    const ProbabilityVector p = build_distribution(theta);
    EpochRow row;
    row.epoch = e;
    row.tv = tv_distance(p, problem.target);
    row.param_hash = theta.hash();
    row.params = theta.values();

    CostEvaluation grad_eval;
    if (exact) {
      grad_eval = cost->evaluate_exact(p, problem.target);
      row.cost_train = row.cost_test = grad_eval.cost.value;
      row.converged = grad_eval.cost.converged;
    } else {
      const SampleSet X = sample(p, N, derive_seed(seed, {kModelStream, ue}));
      const auto train_eval = cost->evaluate(X, problem.train);
      const SampleSet Xt = sample(p, N, derive_seed(seed, {kTestStream, ue}));
      const auto test_eval = cost->evaluate(Xt, problem.test);
      row.cost_train = train_eval.cost.value;
      row.cost_test = test_eval.cost.value;
      row.converged = train_eval.cost.converged && test_eval.cost.converged;
      if (e < cfg.training.epochs) {
        const SampleSet Xb = subsample(X, cfg.training.batch_size, derive_seed(seed, {kBatchModelStream, ue}));
        const SampleSet Yb = subsample(problem.train, cfg.training.batch_size,
                                       derive_seed(seed, {kBatchDataStream, ue}));
        grad_eval = cost->evaluate(Xb, Yb);
      }
    }

    if (e < cfg.training.epochs) {
      std::vector<double> grad(trainable.size());
      parallel_for(trainable.size(), cfg.threads, [&](std::size_t slot) {
        const ParamIndex idx = theta.index_at(trainable[slot]);
        if (exact) {
          grad[slot] = exact_shift_gradient(grad_eval, prob_gradient(theta, idx));
          return;
        }
        const std::uint64_t s = derive_seed(seed, {kShiftStream, ue, trainable[slot]});
        const auto up = sample(build_distribution(shifted_params(theta, idx, +1)),
                               cfg.training.shift_samples, derive_seed(s, {1}));
        const auto down = sample(build_distribution(shifted_params(theta, idx, -1)),
                                 cfg.training.shift_samples, derive_seed(s, {2}));
        grad[slot] = shift_gradient(grad_eval, up, down);
      });
      const auto delta = adam_step(adam, grad);
      for (std::size_t slot = 0; slot < trainable.size(); ++slot) {
        const std::size_t k = trainable[slot];
        double next = theta.value(k) - delta[slot];
        if (cfg.training.snap) {
          next = snap_odd_multiple(next, cfg.training.snap_d);
          if (!on_odd_lattice(next, cfg.training.snap_d)) {
            throw NumericalError("snapped parameter left the odd-multiple lattice");
          }
        }
        theta.set(k, next);
      }
      row.gradient = std::move(grad);
    }
    rec.epochs.push_back(std::move(row));
  }
  rec.final_params = theta;
  return rec;
}

TrainingRecord run_training(const RunConfig& cfg) { return train_problem(cfg, make_problem(cfg)); }

Json TrainingRecord::to_json() const {
  Json j;
  j["version"] = version_string();
  j["seed"] = seed;
  j["config"] = config;
  j["initial_params"] = params_to_json(initial);
  j["final_params"] = params_to_json(final_params);
  j["target_probs"] = target.probs;
  j["final_probs"] = build_distribution(final_params).probs;
  Json rows = Json::array();
  for (const auto& r : epochs) {
    rows.push_back({{"epoch", r.epoch},
                    {"cost_train", r.cost_train},
                    {"cost_test", r.cost_test},
                    {"tv", r.tv},
                    {"param_hash", hex64(r.param_hash)},
                    {"converged", r.converged},
                    {"params", r.params},
                    {"gradient", r.gradient}});
  }
  j["epochs"] = rows;
  return j;
}

std::string TrainingRecord::trace_csv() const {
  std::string out = "epoch,cost_train,cost_test,tv\n";
  for (const auto& r : epochs) {
    out += std::to_string(r.epoch) + "," + g17(r.cost_train) + "," + g17(r.cost_test) + "," +
           g17(r.tv) + "\n";
  }
  return out;
}

void write_run_artifacts(const std::string& dir, const TrainingRecord& record) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&dir](const std::string& name, const std::string& body) {
    const auto path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << body;
    if (!out) throw IoError("failed writing '" + path + "'");
  };
  write("record.json", record.to_json().dump(2) + "\n");
  write("trace.csv", record.trace_csv());
  write("config.json", record.config.dump(2) + "\n");
}

}  // namespace bornforge
