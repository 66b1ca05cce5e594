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

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bornforge/kernels.hpp"
#include "bornforge/sim.hpp"

namespace bornforge {

double tv_distance(const ProbabilityVector& p, const ProbabilityVector& pi);

/// Returned by kl_divergence when pi is not absolutely continuous w.r.t. p.
inline constexpr double kKlInfinity = std::numeric_limits<double>::infinity();

/// sum pi log(pi / p), 0 log 0 = 0.
double kl_divergence(const ProbabilityVector& pi, const ProbabilityVector& p);

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool applicable = true;
  bool holds = true;
};

struct MetricReport {
  double tv = 0.0;
  std::optional<double> kl;
  std::vector<BoundCheck> bound_checks;

  /// True when every applicable check holds.
  bool all_hold() const;
};

/// 2 eps log(e^2 L D / (n eps)) with L = D = n.
double regularization_gap_bound(int n, double epsilon);

/// sqrt(MMD) <= TV, TV <= OT_0 <= n TV, OT_eps - OT_0 >= 0 and
/// OT_eps - OT_0 <= regularization_gap_bound (not applicable when eps > n e^2).
MetricReport bound_harness(const ProbabilityVector& p, const ProbabilityVector& pi,
                           const KernelSpec& spec, double epsilon, double slack = 1e-9);

}  // namespace bornforge
