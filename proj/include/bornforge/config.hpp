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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bornforge/cost_sinkhorn.hpp"
#include "bornforge/kernels.hpp"
#include "bornforge/model.hpp"

namespace bornforge {

using Json = nlohmann::json;

struct ModelConfig {
  /// "full", "none", or "edges" with `edges` listing the coupled pairs.
  std::string couplings = "full";
  std::vector<std::pair<int, int>> edges;
  std::string init_family = "irrational";
  int init_d = 1;
  /// U_f field values applied to every qubit.
  double final_gamma = 0.78539816339744830962;
  double final_delta = 0.0;
  double final_sigma = 0.0;
  /// Any of "couplings", "locals", "gamma", "delta", "sigma".
  std::vector<std::string> trainable{"couplings", "locals"};
};

struct CostConfig {
  std::string kind = "mmd";  // mmd | stein | sinkhorn
  KernelSpec kernel;
  std::string score = "exact";  // exact | identity | spectral
  double eta = 0.01;
  int eigenvectors = 3;
  std::string undefined_score = "error";  // error | drop
  SinkhornOptions sinkhorn;
};

struct DataConfig {
  double p = 0.9;
  int num_modes = 1;
  std::vector<Bits> modes;
  std::size_t samples = 500;
  std::size_t train = 400;
  /// Optional dataset file; when set, samples come from it instead.
  std::string file;
};

struct OptimizerConfig {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainingConfig {
  int epochs = 100;
  std::size_t model_samples = 500;
  std::size_t batch_size = 250;
  std::size_t shift_samples = 500;
  std::string expectation = "sampled";  // sampled | exact
  bool snap = false;
  int snap_d = 1;
};

struct CompileConfig {
  std::string target_family = "irrational";
  int target_d = 1;
  /// Materialized IQP target couplings (upper triangle, row-major) and locals.
  std::vector<double> target_j;
  std::vector<double> target_b;
};

struct RunConfig {
  std::string command = "train";
  int n = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out = "bornforge-out";
  ModelConfig model;
  CostConfig cost;
  DataConfig data;
  OptimizerConfig optimizer;
  TrainingConfig training;
  CompileConfig compile;
};

/// Stein eigenvector default: 3 up to n = 3, 6 from n = 4.
int default_eigenvectors(int n);

/// Fills seed-dependent defaults (modes, compile target) that are still empty.
void materialize(RunConfig& cfg);

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& cfg);

Json to_json(const RunConfig& cfg);

/// Parses, validates and materializes. Unknown keys are rejected.
RunConfig config_from_json(const Json& j);

RunConfig load_config(const std::string& path);
void save_config(const std::string& path, const RunConfig& cfg);

Json params_to_json(const CircuitParams& params);
CircuitParams params_from_json(const Json& j);

Json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const Json& j, const std::string& field = "cost.kernel");

}  // namespace bornforge
