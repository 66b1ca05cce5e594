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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bornforge/bits.hpp"
#include "bornforge/sim.hpp"

namespace bornforge {

/// Mixture of product-Bernoulli blobs centred on `modes`.
struct TargetSpec {
  int n = 0;
  std::vector<Bits> modes;
  double p = 0.9;

  /// Throws UsageError on an empty mode list, a mode wider than n, or p outside (0, 1].
  void validate() const;
  bool operator==(const TargetSpec&) const = default;
};

/// min(2^(n-1), 5).
inline int default_mode_count(int n) { return n >= 4 ? 5 : std::min(1 << (n - 1), 5); }

/// T distinct modes drawn uniformly without replacement.
std::vector<Bits> random_modes(int n, int T, std::uint64_t seed);

ProbabilityVector target_pmf(const TargetSpec& spec);

/// Pick a mode uniformly, then flip each bit independently with probability 1 - p.
SampleSet sample_target(const TargetSpec& spec, std::size_t M, std::uint64_t seed);

struct EmpiricalDist {
  int n = 0;
  std::map<Bits, std::size_t> counts;
  std::size_t total = 0;
};

/// Distinct points with positive weights summing to one.
struct WeightedSupport {
  int n = 0;
  std::vector<Bits> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

EmpiricalDist empirical(const SampleSet& samples);

WeightedSupport to_weighted_support(const EmpiricalDist& dist);

WeightedSupport to_weighted_support(const SampleSet& samples);

/// Support of a probability vector, entries with p(x) > 0, in index order.
WeightedSupport to_weighted_support(const ProbabilityVector& pv);

/// Dense 2^n vector from weights.
ProbabilityVector to_probability_vector(const WeightedSupport& ws);

struct Split {
  SampleSet train;
  SampleSet test;
};

/// Seeded shuffle, first `n_train` go to train and the rest to test.
Split split_samples(const SampleSet& samples, std::size_t n_train, std::uint64_t seed);

/// Seeded subset of size `count` drawn without replacement, in shuffled order.
SampleSet subsample(const SampleSet& samples, std::size_t count, std::uint64_t seed);

/// Newline-delimited bitstrings preceded by one header line:
/// `#bornforge-dataset {"n":..,"modes":[..],"p":..,"seed":..,"count":..}`.
struct DatasetFile {
  TargetSpec spec;
  std::uint64_t seed = 0;
  SampleSet samples;
};

void write_dataset(const std::string& path, const DatasetFile& data);
DatasetFile read_dataset(const std::string& path);

}  // namespace bornforge
