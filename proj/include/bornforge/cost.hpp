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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bornforge/bits.hpp"
#include "bornforge/sim.hpp"

namespace bornforge {

struct CostValue {
  double value = 0.0;
  std::size_t n_model_samples = 0;
  std::size_t n_data_samples = 0;
  bool converged = true;
};

/// A cost evaluated at the current model, together with its first variation
/// w(x) = dL/dp(x). Every cost here is differentiated as
/// dL/dtheta = sum_x dp(x)/dtheta * w(x), so one witness serves every
/// parameter of the epoch. w returns NaN where it is undefined (dropped
/// Stein pairs); such points are skipped by the averaging helpers.
struct CostEvaluation {
  CostValue cost;
  std::function<double(Bits)> witness;
};

/// Mean witness over `up` minus mean witness over `down`: the sampled
/// parameter-shift estimate built from circuits at theta +/- pi/4.
double shift_gradient(const CostEvaluation& eval, const SampleSet& up, const SampleSet& down);

/// sum_x dp[x] w(x) with dp from prob_gradient.
double exact_shift_gradient(const CostEvaluation& eval, const std::vector<double>& dp);

class CostFunction {
 public:
  virtual ~CostFunction() = default;
  virtual std::string name() const = 0;
  /// Sample-based cost of the model samples against the data samples.
  virtual CostEvaluation evaluate(const SampleSet& model, const SampleSet& data) const = 0;
  /// Same cost with every expectation taken exactly.
  virtual CostEvaluation evaluate_exact(const ProbabilityVector& p,
                                        const ProbabilityVector& pi) const = 0;
};

/// Thread-safe memo around a pure function of a bitstring.
std::function<double(Bits)> memoize(std::function<double(Bits)> fn);

}  // namespace bornforge
