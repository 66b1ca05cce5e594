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

#include "bornforge/cost.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "bornforge/errors.hpp"

namespace bornforge {

namespace {

double witness_mean(const CostEvaluation& eval, const SampleSet& s) {
  // Aggregate duplicates, then sum in key order.
  std::map<Bits, std::size_t> counts;
  for (Bits x : s.outcomes) ++counts[x];
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& [x, c] : counts) {
    const double w = eval.witness(x);
    if (std::isnan(w)) continue;
    sum += w * static_cast<double>(c);
    used += c;
  }
  return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

}  // namespace

double shift_gradient(const CostEvaluation& eval, const SampleSet& up, const SampleSet& down) {
  if (up.empty() || down.empty()) throw UsageError("shifted sample sets must be nonempty");
  return witness_mean(eval, up) - witness_mean(eval, down);
}

double exact_shift_gradient(const CostEvaluation& eval, const std::vector<double>& dp) {
  double g = 0.0;
  for (std::size_t x = 0; x < dp.size(); ++x) {
    if (dp[x] == 0.0) continue;
    const double w = eval.witness(x);
    if (std::isnan(w)) continue;
    g += dp[x] * w;
  }
  return g;
}

std::function<double(Bits)> memoize(std::function<double(Bits)> fn) {
  struct Memo {
    std::function<double(Bits)> fn;
    std::shared_mutex mu;
    std::map<Bits, double> values;
  };
  auto memo = std::make_shared<Memo>();
  memo->fn = std::move(fn);
  return [memo](Bits x) {
    {
      std::shared_lock lock(memo->mu);
      auto it = memo->values.find(x);
      if (it != memo->values.end()) return it->second;
    }
    const double v = memo->fn(x);
    std::unique_lock lock(memo->mu);
    memo->values.emplace(x, v);
    return v;
  };
}

}  // namespace bornforge
