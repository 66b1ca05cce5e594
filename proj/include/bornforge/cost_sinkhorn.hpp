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
#include <vector>

#include <Eigen/Dense>

#include "bornforge/cost.hpp"
#include "bornforge/data.hpp"
#include "bornforge/model.hpp"

namespace bornforge {

/// l1 (Hamming) distances between two point lists.
Eigen::MatrixXd cost_matrix(const std::vector<Bits>& X, const std::vector<Bits>& Y);

struct SinkhornOptions {
  double epsilon = 0.1;
  int max_iters = 5000;
  double tol = 1e-9;
  /// Anneal epsilon down from the cost diameter before the final solve.
  bool epsilon_scaling = true;
};

/// Dual potentials on p's and q's supports; s and t are the self-transport
/// potentials of p and q.
struct Potentials {
  Eigen::VectorXd f, g, s, t;
  int iterations_used = 0;
  bool converged = false;
};

/// Iteration cap after the small-epsilon allowance.
int effective_max_iters(const SinkhornOptions& opts);

Potentials sinkhorn_potentials(const WeightedSupport& p, const WeightedSupport& q,
                               const SinkhornOptions& opts);

/// Regularized transport cost <p, f> + <q, g> at the fixed point, with the
/// regularizer epsilon KL(U | p x q).
double ot_epsilon(const WeightedSupport& p, const WeightedSupport& q, const SinkhornOptions& opts);

struct SinkhornResult {
  double value = 0.0;
  Potentials potentials;
  bool converged = false;
};

/// sum p (f - s) + sum q (g - t).
SinkhornResult sinkhorn_divergence(const WeightedSupport& p, const WeightedSupport& q,
                                   const SinkhornOptions& opts);
SinkhornResult sinkhorn_divergence(const SampleSet& X, const SampleSet& Y,
                                   const SinkhornOptions& opts);
SinkhornResult sinkhorn_divergence(const ProbabilityVector& p, const ProbabilityVector& q,
                                   const SinkhornOptions& opts);

/// Exact minimum of <C, U> over couplings of p and q (min-cost flow by
/// successive shortest paths). Throws CapacityError above 64 points per side.
double exact_ot(const WeightedSupport& p, const WeightedSupport& q, const Eigen::MatrixXd& C);
double exact_ot(const WeightedSupport& p, const WeightedSupport& q);

/// First variation of the divergence in p, extended to every bitstring:
/// -eps LSE_k(log q_k + (g_k - C(x, y_k))/eps) + eps LSE_k(log p_k + (s_k - C(x, x_k))/eps).
double sinkhorn_phi(Bits x, const WeightedSupport& p, const WeightedSupport& q,
                    const Potentials& pot, double epsilon);

double sinkhorn_gradient(const CircuitParams& params, const ParamIndex& idx, const SampleSet& X,
                         const SampleSet& Y, const SinkhornOptions& opts, std::size_t shots,
                         std::uint64_t seed);

double sinkhorn_gradient_exact(const CircuitParams& params, const ParamIndex& idx,
                               const ProbabilityVector& pi, const SinkhornOptions& opts);

class SinkhornCost : public CostFunction {
 public:
  explicit SinkhornCost(SinkhornOptions opts) : opts_(opts) {}
  std::string name() const override { return "sinkhorn"; }
  CostEvaluation evaluate(const SampleSet& model, const SampleSet& data) const override;
  CostEvaluation evaluate_exact(const ProbabilityVector& p,
                                const ProbabilityVector& pi) const override;
  const SinkhornOptions& options() const { return opts_; }

 private:
  CostEvaluation evaluate_support(const WeightedSupport& p, const WeightedSupport& q) const;
  SinkhornOptions opts_;
};

}  // namespace bornforge
