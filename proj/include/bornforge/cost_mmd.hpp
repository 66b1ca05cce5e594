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

#include "bornforge/cost.hpp"
#include "bornforge/data.hpp"
#include "bornforge/kernels.hpp"
#include "bornforge/model.hpp"

namespace bornforge {

/// sum_{a,b} wA_a wB_b kappa(a, b).
double kernel_mean(const WeightedSupport& A, const WeightedSupport& B, const Kernel& kernel);

/// sum_{x,y} kappa(x,y) [p(x)p(y) + pi(x)pi(y) - 2 p(x)pi(y)].
double mmd_exact(const ProbabilityVector& p, const ProbabilityVector& pi, const Kernel& kernel);

/// Unbiased U-statistic. Needs at least two samples on each side; may be negative.
CostValue mmd_estimate(const SampleSet& X, const SampleSet& Y, const Kernel& kernel);

/// 2 E kappa(a,x) - 2 E kappa(b,x) - 2 E kappa(a,y) + 2 E kappa(b,y), with
/// a from the +pi/4 circuit and b from the -pi/4 circuit, `shots` draws each.
double mmd_gradient(const CircuitParams& params, const ParamIndex& idx, const SampleSet& X,
                    const SampleSet& Y, const Kernel& kernel, std::size_t shots,
                    std::uint64_t seed);

/// Same with every expectation exact.
double mmd_gradient_exact(const CircuitParams& params, const ParamIndex& idx,
                          const ProbabilityVector& pi, const Kernel& kernel);

class MmdCost : public CostFunction {
 public:
  explicit MmdCost(KernelSpec spec, int n) : kernel_(std::move(spec), n) {}
  std::string name() const override { return "mmd"; }
  CostEvaluation evaluate(const SampleSet& model, const SampleSet& data) const override;
  CostEvaluation evaluate_exact(const ProbabilityVector& p,
                                const ProbabilityVector& pi) const override;
  const Kernel& kernel() const { return kernel_; }

 private:
  Kernel kernel_;
};

}  // namespace bornforge
