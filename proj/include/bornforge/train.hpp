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

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bornforge/config.hpp"
#include "bornforge/cost.hpp"
#include "bornforge/data.hpp"
#include "bornforge/model.hpp"
#include "bornforge/sim.hpp"

namespace bornforge {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double learning_rate = 0.05;
};

AdamState adam_init(std::size_t dim, const OptimizerConfig& opt);

/// Bias-corrected Adam. Returns delta; the caller applies theta <- theta - delta.
std::vector<double> adam_step(AdamState& state, const std::vector<double>& grad);

struct EpochRow {
  int epoch = 0;
  double cost_train = 0.0;
  double cost_test = 0.0;
  double tv = 0.0;
  std::uint64_t param_hash = 0;
  bool converged = true;
  std::vector<double> params;
  /// Gradient over trainable entries, in flat order; empty on the last row.
  std::vector<double> gradient;
};

struct TrainingRecord {
  Json config;
  std::uint64_t seed = 0;
  std::vector<EpochRow> epochs;
  CircuitParams initial;
  CircuitParams final_params;
  ProbabilityVector target;

  Json to_json() const;
  /// epoch,cost_train,cost_test,tv with %.17g.
  std::string trace_csv() const;
};

/// Everything a run needs besides its settings.
struct TrainingProblem {
  CircuitParams init;
  ProbabilityVector target;
  SampleSet train;
  SampleSet test;
  /// Unsplit dataset and where it came from; used only for persistence.
  DatasetFile dataset;
};

std::unique_ptr<CostFunction> make_cost(const RunConfig& cfg, const ProbabilityVector& target);

/// Seeded Ising init from the configured family, then the configured final
/// layer, coupling topology and trainable mask.
CircuitParams initial_params(const RunConfig& cfg);

/// Target pmf, dataset and its train/test split.
TrainingProblem make_problem(const RunConfig& cfg);

TrainingRecord train_problem(const RunConfig& cfg, const TrainingProblem& problem);

TrainingRecord run_training(const RunConfig& cfg);

/// Writes record.json, trace.csv and config.json under `dir` (created if needed).
void write_run_artifacts(const std::string& dir, const TrainingRecord& record);

std::string version_string();

}  // namespace bornforge
