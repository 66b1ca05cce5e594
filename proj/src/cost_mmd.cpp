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

#include "bornforge/cost_mmd.hpp"

#include <memory>

#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"

namespace bornforge {

double kernel_mean(const WeightedSupport& A, const WeightedSupport& B, const Kernel& kernel) {
  double acc = 0.0;
  for (std::size_t a = 0; a < A.size(); ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < B.size(); ++b) row += B.weights[b] * kernel(A.points[a], B.points[b]);
    acc += A.weights[a] * row;
  }
  return acc;
}

namespace {

void check_same_n(int a, int b) {
  if (a != b) throw ShapeError("distributions live on different register widths");
}

/// sum_{a != b} kappa over samples, via distinct points.
double off_diagonal_sum(const EmpiricalDist& d, const Kernel& kernel) {
  double total = 0.0;
  for (const auto& [x, cx] : d.counts) {
    for (const auto& [y, cy] : d.counts) {
      const double k = kernel(x, y);
      const double pairs = x == y ? static_cast<double>(cx) * static_cast<double>(cx - 1)
                                  : static_cast<double>(cx) * static_cast<double>(cy);
      total += pairs * k;
    }
  }
  return total;
}

double mmd_witness(Bits x, const WeightedSupport& P, const WeightedSupport& Q,
                   const Kernel& kernel) {
  double wp = 0.0;
  for (std::size_t k = 0; k < P.size(); ++k) wp += P.weights[k] * kernel(x, P.points[k]);
  double wq = 0.0;
  for (std::size_t k = 0; k < Q.size(); ++k) wq += Q.weights[k] * kernel(x, Q.points[k]);
  return 2.0 * wp - 2.0 * wq;
}

}  // namespace

double mmd_exact(const ProbabilityVector& p, const ProbabilityVector& pi, const Kernel& kernel) {
  check_same_n(p.n, pi.n);
  check_same_n(p.n, kernel.n());
  const auto P = to_weighted_support(p);
  const auto Q = to_weighted_support(pi);
  return kernel_mean(P, P, kernel) + kernel_mean(Q, Q, kernel) - 2.0 * kernel_mean(P, Q, kernel);
}

CostValue mmd_estimate(const SampleSet& X, const SampleSet& Y, const Kernel& kernel) {
  check_same_n(X.n, Y.n);
  if (X.size() < 2 || Y.size() < 2) throw UsageError("MMD estimator needs at least two samples per side");
  const auto ex = empirical(X);
  const auto ey = empirical(Y);
  const double N = static_cast<double>(X.size());
  const double M = static_cast<double>(Y.size());
  double cross = 0.0;
  for (const auto& [x, cx] : ex.counts) {
    for (const auto& [y, cy] : ey.counts) {
      cross += static_cast<double>(cx) * static_cast<double>(cy) * kernel(x, y);
    }
  }
  const double value = off_diagonal_sum(ex, kernel) / (N * (N - 1.0)) +
                       off_diagonal_sum(ey, kernel) / (M * (M - 1.0)) - 2.0 * cross / (N * M);
  return {value, X.size(), Y.size(), true};
}

double mmd_gradient(const CircuitParams& params, const ParamIndex& idx, const SampleSet& X,
                    const SampleSet& Y, const Kernel& kernel, std::size_t shots,
                    std::uint64_t seed) {
  const auto up = sample(build_distribution(shifted_params(params, idx, +1)), shots,
                         derive_seed(seed, {1}));
  const auto down = sample(build_distribution(shifted_params(params, idx, -1)), shots,
                           derive_seed(seed, {2}));
  const auto P = to_weighted_support(X);
  const auto Q = to_weighted_support(Y);
  CostEvaluation eval{{}, [&](Bits x) { return mmd_witness(x, P, Q, kernel); }};
  return shift_gradient(eval, up, down);
}

double mmd_gradient_exact(const CircuitParams& params, const ParamIndex& idx,
                          const ProbabilityVector& pi, const Kernel& kernel) {
  const auto p = build_distribution(params);
  const auto P = to_weighted_support(p);
  const auto Q = to_weighted_support(pi);
  CostEvaluation eval{{}, [&](Bits x) { return mmd_witness(x, P, Q, kernel); }};
  return exact_shift_gradient(eval, prob_gradient(params, idx));
}

CostEvaluation MmdCost::evaluate(const SampleSet& model, const SampleSet& data) const {
  CostEvaluation eval;
  eval.cost = mmd_estimate(model, data, kernel_);
  auto P = std::make_shared<WeightedSupport>(to_weighted_support(model));
  auto Q = std::make_shared<WeightedSupport>(to_weighted_support(data));
  const Kernel* k = &kernel_;
  eval.witness = memoize([P, Q, k](Bits x) { return mmd_witness(x, *P, *Q, *k); });
  return eval;
}

CostEvaluation MmdCost::evaluate_exact(const ProbabilityVector& p,
                                       const ProbabilityVector& pi) const {
  CostEvaluation eval;
  eval.cost = {mmd_exact(p, pi, kernel_), 0, 0, true};
  auto P = std::make_shared<WeightedSupport>(to_weighted_support(p));
  auto Q = std::make_shared<WeightedSupport>(to_weighted_support(pi));
  const Kernel* k = &kernel_;
  eval.witness = memoize([P, Q, k](Bits x) { return mmd_witness(x, *P, *Q, *k); });
  return eval;
}

}  // namespace bornforge
