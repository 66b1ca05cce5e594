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

#include "bornforge/metrics.hpp"

#include <cmath>

#include "bornforge/cost_mmd.hpp"
#include "bornforge/cost_sinkhorn.hpp"
#include "bornforge/data.hpp"
#include "bornforge/errors.hpp"

namespace bornforge {

namespace {

void check_pair(const ProbabilityVector& a, const ProbabilityVector& b) {
  if (a.n != b.n || a.dim() != b.dim()) throw ShapeError("distributions differ in width");
}

}  // namespace

double tv_distance(const ProbabilityVector& p, const ProbabilityVector& pi) {
  check_pair(p, pi);
  double acc = 0.0;
  for (std::size_t x = 0; x < p.dim(); ++x) acc += std::abs(p.probs[x] - pi.probs[x]);
  return std::min(1.0, 0.5 * acc);
}

double kl_divergence(const ProbabilityVector& pi, const ProbabilityVector& p) {
  check_pair(p, pi);
  double acc = 0.0;
  for (std::size_t x = 0; x < p.dim(); ++x) {
    if (pi.probs[x] == 0.0) continue;
    if (p.probs[x] == 0.0) return kKlInfinity;
    acc += pi.probs[x] * std::log(pi.probs[x] / p.probs[x]);
  }
  return std::max(0.0, acc);
}

bool MetricReport::all_hold() const {
  for (const auto& c : bound_checks) {
    if (c.applicable && !c.holds) return false;
  }
  return true;
}

double regularization_gap_bound(int n, double epsilon) {
  const double L = n;
  const double D = n;
  return 2.0 * epsilon * std::log(std::exp(2.0) * L * D / (n * epsilon));
}

MetricReport bound_harness(const ProbabilityVector& p, const ProbabilityVector& pi,
                           const KernelSpec& spec, double epsilon, double slack) {
  check_pair(p, pi);
  MetricReport r;
  r.tv = tv_distance(p, pi);
  const double kl = kl_divergence(pi, p);
  if (std::isfinite(kl)) r.kl = kl;

  const Kernel kernel(spec, p.n);
  const double mmd = std::max(0.0, mmd_exact(p, pi, kernel));
  r.bound_checks.push_back({"sqrt_mmd_le_tv", std::sqrt(mmd), r.tv, true, std::sqrt(mmd) <= r.tv + slack});

  const auto P = to_weighted_support(p);
  const auto Q = to_weighted_support(pi);
  const double ot0 = exact_ot(P, Q);
  r.bound_checks.push_back({"tv_le_ot0", r.tv, ot0, true, r.tv <= ot0 + slack});
  r.bound_checks.push_back({"ot0_le_n_tv", ot0, p.n * r.tv, true, ot0 <= p.n * r.tv + slack});

  SinkhornOptions opts;
  opts.epsilon = epsilon;
  const double gap = ot_epsilon(P, Q, opts) - ot0;
  const double gap_slack = std::max(slack, 1e-7);
  r.bound_checks.push_back({"ot_eps_minus_ot0_ge_0", 0.0, gap, true, gap >= -gap_slack});
  const bool applicable = epsilon <= p.n * std::exp(2.0);
  const double bound = regularization_gap_bound(p.n, epsilon);
  r.bound_checks.push_back({"ot_eps_gap_le_bound", gap, bound, applicable,
                            !applicable || gap <= bound + gap_slack});
  return r;
}

}  // namespace bornforge
