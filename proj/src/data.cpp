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

#include "bornforge/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"

namespace bornforge {

void TargetSpec::validate() const {
  check_qubit_count(n);
  if (modes.empty()) throw UsageError("target needs at least one mode");
  for (Bits m : modes) {
    if ((m & ~all_ones(n)) != 0) throw UsageError("target mode wider than n bits");
  }
  if (!(p > 0.0 && p <= 1.0)) throw UsageError("target fidelity p must lie in (0, 1]");
}

std::vector<Bits> random_modes(int n, int T, std::uint64_t seed) {
  check_qubit_count(n);
  const std::uint64_t space = std::uint64_t{1} << n;
  if (T < 1 || static_cast<std::uint64_t>(T) > space) {
    throw UsageError("mode count must lie in [1, 2^n]");
  }
  Rng rng(seed);
  std::vector<Bits> modes;
  std::set<Bits> seen;
  while (modes.size() < static_cast<std::size_t>(T)) {
    const Bits m = rng.below(space);
    if (seen.insert(m).second) modes.push_back(m);
  }
  return modes;
}

ProbabilityVector target_pmf(const TargetSpec& spec) {
  spec.validate();
  const std::size_t dim = std::size_t{1} << spec.n;
  std::vector<double> probs(dim, 0.0);
  // Per-distance weights p^(n-d) (1-p)^d; pow(0, 0) = 1 handles p = 1.
  std::vector<double> w(static_cast<std::size_t>(spec.n) + 1);
  for (int d = 0; d <= spec.n; ++d) {
    w[static_cast<std::size_t>(d)] = std::pow(spec.p, spec.n - d) * std::pow(1.0 - spec.p, d);
  }
  const double inv_t = 1.0 / static_cast<double>(spec.modes.size());
  for (std::size_t y = 0; y < dim; ++y) {
    double acc = 0.0;
    for (Bits m : spec.modes) acc += w[static_cast<std::size_t>(hamming_distance(m, y))];
    probs[y] = acc * inv_t;
  }
  return {spec.n, std::move(probs)};
}

SampleSet sample_target(const TargetSpec& spec, std::size_t M, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  SampleSet out{spec.n, {}};
  out.outcomes.reserve(M);
  const double flip = 1.0 - spec.p;
  for (std::size_t s = 0; s < M; ++s) {
    Bits y = spec.modes[rng.below(spec.modes.size())];
    for (int k = 0; k < spec.n; ++k) {
      if (rng.uniform() < flip) y = toggle(y, k);
    }
    out.outcomes.push_back(y);
  }
  return out;
}

EmpiricalDist empirical(const SampleSet& samples) {
  if (samples.empty()) throw UsageError("empirical distribution of an empty sample set");
  EmpiricalDist d{samples.n, {}, samples.size()};
  for (Bits x : samples.outcomes) ++d.counts[x];
  return d;
}

WeightedSupport to_weighted_support(const EmpiricalDist& dist) {
  if (dist.total == 0) throw UsageError("empirical distribution is empty");
  WeightedSupport ws{dist.n, {}, {}};
  for (const auto& [x, c] : dist.counts) {
    if (c == 0) continue;
    ws.points.push_back(x);
    ws.weights.push_back(static_cast<double>(c) / static_cast<double>(dist.total));
  }
  return ws;
}

WeightedSupport to_weighted_support(const SampleSet& samples) {
  return to_weighted_support(empirical(samples));
}

WeightedSupport to_weighted_support(const ProbabilityVector& pv) {
  WeightedSupport ws{pv.n, {}, {}};
  for (std::size_t x = 0; x < pv.dim(); ++x) {
    if (pv.probs[x] > 0.0) {
      ws.points.push_back(x);
      ws.weights.push_back(pv.probs[x]);
    }
  }
  if (ws.points.empty()) throw UsageError("probability vector has empty support");
  return ws;
}

ProbabilityVector to_probability_vector(const WeightedSupport& ws) {
  check_qubit_count(ws.n);
  std::vector<double> probs(std::size_t{1} << ws.n, 0.0);
  for (std::size_t k = 0; k < ws.size(); ++k) probs.at(ws.points[k]) += ws.weights[k];
  return {ws.n, std::move(probs)};
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = count; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace

Split split_samples(const SampleSet& samples, std::size_t n_train, std::uint64_t seed) {
  if (n_train > samples.size()) throw UsageError("train split larger than the sample set");
  const auto idx = shuffled_indices(samples.size(), seed);
  Split s{{samples.n, {}}, {samples.n, {}}};
  for (std::size_t k = 0; k < idx.size(); ++k) {
    (k < n_train ? s.train : s.test).outcomes.push_back(samples.outcomes[idx[k]]);
  }
  return s;
}

SampleSet subsample(const SampleSet& samples, std::size_t count, std::uint64_t seed) {
  if (count > samples.size()) throw UsageError("subsample larger than the sample set");
  const auto idx = shuffled_indices(samples.size(), seed);
  SampleSet out{samples.n, {}};
  out.outcomes.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.outcomes.push_back(samples.outcomes[idx[k]]);
  return out;
}

namespace {
constexpr const char* kDatasetTag = "#bornforge-dataset ";
}

void write_dataset(const std::string& path, const DatasetFile& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset '" + path + "'");
  nlohmann::json header;
  header["n"] = data.spec.n;
  header["modes"] = nlohmann::json::array();
  for (Bits m : data.spec.modes) header["modes"].push_back(to_bitstring(m, data.spec.n));
  header["p"] = data.spec.p;
  header["seed"] = data.seed;
  header["count"] = data.samples.size();
  out << kDatasetTag << header.dump() << '\n';
  for (Bits x : data.samples.outcomes) out << to_bitstring(x, data.spec.n) << '\n';
  if (!out) throw IoError("failed writing dataset '" + path + "'");
}

DatasetFile read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read dataset '" + path + "'");
  std::string line;
  const std::string tag = kDatasetTag;
  if (!std::getline(in, line) || line.rfind(tag, 0) != 0) {
    throw IoError("dataset '" + path + "' lacks a header line");
  }
  DatasetFile data;
  try {
    const auto header = nlohmann::json::parse(line.substr(tag.size()));
    data.spec.n = header.at("n").get<int>();
    for (const auto& m : header.at("modes")) {
      data.spec.modes.push_back(parse_bitstring(m.get<std::string>()));
    }
    data.spec.p = header.at("p").get<double>();
    data.seed = header.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("dataset header in '" + path + "': " + e.what());
  }
  data.samples.n = data.spec.n;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (static_cast<int>(line.size()) != data.spec.n) {
      throw IoError("dataset line '" + line + "' does not have n bits");
    }
    data.samples.outcomes.push_back(parse_bitstring(line));
  }
  return data;
}

}  // namespace bornforge
