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

#include <string>

#include "bornforge/config.hpp"
#include "bornforge/model.hpp"
#include "bornforge/sim.hpp"
#include "bornforge/train.hpp"

namespace bornforge {

/// IQP target, QAOA ansatz with Gamma_k = pi/4 frozen, and the run settings.
struct CompileJob {
  int n = 0;
  CircuitParams target;
  CircuitParams ansatz_init;
  RunConfig config;

  /// Throws UsageError if either side leaves its circuit family.
  void validate() const;
};

CompileJob make_compile_job(const RunConfig& cfg);

struct CompileReport {
  TrainingRecord record;
  CircuitParams target;
  CircuitParams initial;
  CircuitParams learned;
  ProbabilityVector target_probs;
  ProbabilityVector learned_probs;
  double initial_tv = 0.0;
  double final_tv = 0.0;

  Json to_json() const;
  /// Plain-text parameter table and probability table.
  std::string table() const;
};

bool is_iqp(const CircuitParams& p, double tol = 1e-12);
bool is_qaoa(const CircuitParams& p, double tol = 1e-12);

/// Target distribution and its sampled train/test split. Depends only on the
/// target and the data section of the config, never on training settings.
TrainingProblem compile_problem(const CompileJob& job);

CompileReport compile_run(const CompileJob& job);

/// record.json, trace.csv, config.json plus compile.json and compile.txt.
void write_compile_artifacts(const std::string& dir, const CompileReport& report);

}  // namespace bornforge
