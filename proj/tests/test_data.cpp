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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "bornforge/data.hpp"
#include "bornforge/errors.hpp"

using namespace bornforge;

namespace {

// Mixture pmf from an explicit Hamming-distance formula over all strings.
std::vector<double> mixture_oracle(const TargetSpec& spec) {
  std::vector<double> out(std::size_t{1} << spec.n, 0.0);
  for (Bits y = 0; y < out.size(); ++y) {
    for (Bits m : spec.modes) {
      int d = 0;
      for (int i = 0; i < spec.n; ++i) d += static_cast<int>(((y ^ m) >> i) & 1u);
      out[y] += std::pow(spec.p, spec.n - d) * std::pow(1 - spec.p, d) / static_cast<double>(spec.modes.size());
    }
  }
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bornforge_test_data_" + name);
}

}  // namespace

TEST(TargetPmf, SingleModeHand) {
  const auto pi = target_pmf(TargetSpec{2, {0b00}, 0.9});
  EXPECT_NEAR(pi.probs[0b00], 0.81, 1e-15);
  EXPECT_NEAR(pi.probs[0b01], 0.09, 1e-15);
  EXPECT_NEAR(pi.probs[0b10], 0.09, 1e-15);
  EXPECT_NEAR(pi.probs[0b11], 0.01, 1e-15);
}

TEST(TargetPmf, DeltaWhenFidelityIsOne) {
  const auto pi = target_pmf(TargetSpec{3, {0b101}, 1.0});
  for (Bits x = 0; x < 8; ++x) EXPECT_EQ(pi.probs[x], x == 0b101 ? 1.0 : 0.0);
}

TEST(TargetPmf, NormalizedAndMatchesFormula) {
  for (int n = 1; n <= 4; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const TargetSpec spec{n, random_modes(n, default_mode_count(n), seed), 0.6 + 0.07 * static_cast<double>(seed)};
      const auto pi = target_pmf(spec);
      double total = 0;
      for (double v : pi.probs) total += v;
      EXPECT_NEAR(total, 1.0, 1e-12);
      const auto ref = mixture_oracle(spec);
      for (Bits x = 0; x < pi.dim(); ++x) EXPECT_NEAR(pi.probs[x], ref[x], 1e-15);
    }
  }
}

TEST(RandomModes, DistinctAndInRange) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto modes = random_modes(4, 5, seed);
    EXPECT_EQ(modes.size(), 5u);
    EXPECT_EQ(std::set<Bits>(modes.begin(), modes.end()).size(), 5u);
    for (Bits m : modes) EXPECT_LT(m, 16u);
  }
  EXPECT_EQ(random_modes(3, 4, 7), random_modes(3, 4, 7));
  EXPECT_THROW(random_modes(2, 5, 1), UsageError);
  EXPECT_EQ(default_mode_count(1), 1);
  EXPECT_EQ(default_mode_count(3), 4);
  EXPECT_EQ(default_mode_count(6), 5);
}

TEST(TargetSpec, Validation) {
  EXPECT_THROW((TargetSpec{2, {}, 0.9}.validate()), UsageError);
  EXPECT_THROW((TargetSpec{2, {0b100}, 0.9}.validate()), UsageError);
  EXPECT_THROW((TargetSpec{2, {0}, 0.0}.validate()), UsageError);
  EXPECT_THROW((TargetSpec{2, {0}, 1.5}.validate()), UsageError);
  EXPECT_NO_THROW((TargetSpec{2, {0}, 1.0}.validate()));
}

TEST(SampleTarget, ConcentratesOnPmf) {
  const TargetSpec spec{2, {0b01, 0b10}, 0.8};
  const auto pi = target_pmf(spec);
  const std::size_t M = 100000;
  const auto X = sample_target(spec, M, 3);
  std::vector<double> counts(4, 0.0);
  for (Bits x : X.outcomes) counts[x] += 1;
  for (Bits x = 0; x < 4; ++x) {
    const double sd = std::sqrt(static_cast<double>(M) * pi.probs[x] * (1 - pi.probs[x]));
    EXPECT_LT(std::abs(counts[x] - static_cast<double>(M) * pi.probs[x]), 4 * sd);
  }
}

TEST(SampleTarget, ChiSquareAgreement) {
  // 0.999 quantiles of chi-square with 2^n - 1 degrees of freedom.
  const double critical[] = {0.0, 10.83, 16.27, 24.32, 37.70};
  for (int n = 1; n <= 4; ++n) {
    const TargetSpec spec{n, random_modes(n, default_mode_count(n), 11), 0.85};
    const auto pi = target_pmf(spec);
    const std::size_t M = 50000;
    const auto X = sample_target(spec, M, 100 + static_cast<std::uint64_t>(n));
    std::vector<double> counts(pi.dim(), 0.0);
    for (Bits x : X.outcomes) counts[x] += 1;
    double chi2 = 0;
    for (Bits x = 0; x < pi.dim(); ++x) {
      const double e = static_cast<double>(M) * pi.probs[x];
      chi2 += (counts[x] - e) * (counts[x] - e) / e;
    }
    EXPECT_LT(chi2, critical[n]) << "n=" << n;
  }
}

TEST(SampleTarget, DeterministicAndDegenerate) {
  const TargetSpec spec{3, {0b110, 0b001}, 0.9};
  EXPECT_EQ(sample_target(spec, 50, 9).outcomes, sample_target(spec, 50, 9).outcomes);
  EXPECT_NE(sample_target(spec, 50, 9).outcomes, sample_target(spec, 50, 10).outcomes);
  for (Bits x : sample_target(TargetSpec{3, {0b011}, 1.0}, 200, 1).outcomes) EXPECT_EQ(x, 0b011u);
}

TEST(Empirical, WeightsFromCounts) {
  const auto ws = to_weighted_support(SampleSet{2, {0b00, 0b00, 0b01}});
  ASSERT_EQ(ws.size(), 2u);
  EXPECT_EQ(ws.points[0], 0b00u);
  EXPECT_NEAR(ws.weights[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(ws.weights[1], 1.0 / 3.0, 1e-15);
  const auto d = empirical(SampleSet{2, {0b00, 0b00, 0b01}});
  EXPECT_EQ(d.total, 3u);
  EXPECT_EQ(d.counts.at(0b00), 2u);
}

TEST(Empirical, OrderInvariant) {
  const auto a = to_weighted_support(SampleSet{3, {5, 1, 1, 7, 5, 5}});
  const auto b = to_weighted_support(SampleSet{3, {1, 5, 7, 5, 1, 5}});
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.weights, b.weights);
}

TEST(Empirical, EmptyIsError) {
  EXPECT_THROW(empirical(SampleSet{2, {}}), UsageError);
  EXPECT_THROW(to_weighted_support(SampleSet{2, {}}), UsageError);
}

TEST(Empirical, ProbabilityVectorRoundTrip) {
  const ProbabilityVector pv{2, {0.5, 0.0, 0.25, 0.25}};
  const auto ws = to_weighted_support(pv);
  EXPECT_EQ(ws.points, (std::vector<Bits>{0, 2, 3}));
  EXPECT_EQ(to_probability_vector(ws).probs, pv.probs);
}

TEST(Dataset, RoundTrip) {
  const TargetSpec spec{3, {0b101, 0b010}, 0.85};
  const DatasetFile file{spec, 42, sample_target(spec, 300, 42)};
  const auto path = temp_file("roundtrip.txt");
  write_dataset(path.string(), file);
  const auto back = read_dataset(path.string());
  EXPECT_EQ(back.spec, spec);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.samples.n, 3);
  EXPECT_EQ(back.samples.outcomes, file.samples.outcomes);
  const auto a = to_weighted_support(file.samples), b = to_weighted_support(back.samples);
  EXPECT_EQ(a.weights, b.weights);
  std::filesystem::remove(path);
}

TEST(Dataset, TextUsesBitstrings) {
  const DatasetFile file{TargetSpec{3, {0b001}, 0.9}, 1, SampleSet{3, {0b001, 0b110}}};
  const auto path = temp_file("text.txt");
  write_dataset(path.string(), file);
  std::ifstream in(path);
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  EXPECT_EQ(header.rfind("#bornforge-dataset ", 0), 0u);
  EXPECT_EQ(a, "100");
  EXPECT_EQ(b, "011");
  std::filesystem::remove(path);
}

TEST(Dataset, Errors) {
  EXPECT_THROW(read_dataset("/nonexistent/dir/file.txt"), IoError);
  const auto path = temp_file("bad.txt");
  {
    std::ofstream out(path);
    out << "010\n";
  }
  EXPECT_THROW(read_dataset(path.string()), IoError);
  {
    std::ofstream out(path);
    out << "#bornforge-dataset {\"n\":3,\"modes\":[\"010\"],\"p\":0.9,\"seed\":1,\"count\":1}\n01\n";
  }
  EXPECT_THROW(read_dataset(path.string()), IoError);
  std::filesystem::remove(path);
}

TEST(Split, DisjointAndDeterministic) {
  SampleSet all{4, {}};
  for (Bits i = 0; i < 500; ++i) all.outcomes.push_back(i % 16);
  const auto s = split_samples(all, 400, 8);
  EXPECT_EQ(s.train.size(), 400u);
  EXPECT_EQ(s.test.size(), 100u);
  auto merged = s.train.outcomes;
  merged.insert(merged.end(), s.test.outcomes.begin(), s.test.outcomes.end());
  auto sorted_all = all.outcomes;
  std::sort(merged.begin(), merged.end());
  std::sort(sorted_all.begin(), sorted_all.end());
  EXPECT_EQ(merged, sorted_all);
  const auto again = split_samples(all, 400, 8);
  EXPECT_EQ(again.train.outcomes, s.train.outcomes);
  EXPECT_EQ(again.test.outcomes, s.test.outcomes);
  EXPECT_NE(split_samples(all, 400, 9).train.outcomes, s.train.outcomes);
  EXPECT_THROW(split_samples(all, 501, 8), UsageError);
}

TEST(Split, IndexDisjointOnDistinctValues) {
  SampleSet all{10, {}};
  for (Bits i = 0; i < 500; ++i) all.outcomes.push_back(i);
  const auto s = split_samples(all, 400, 2);
  const std::set<Bits> train(s.train.outcomes.begin(), s.train.outcomes.end());
  for (Bits x : s.test.outcomes) EXPECT_EQ(train.count(x), 0u);
}

TEST(Subsample, SizeAndDeterminism) {
  SampleSet all{10, {}};
  for (Bits i = 0; i < 100; ++i) all.outcomes.push_back(i);
  const auto a = subsample(all, 30, 4);
  EXPECT_EQ(a.size(), 30u);
  EXPECT_EQ(std::set<Bits>(a.outcomes.begin(), a.outcomes.end()).size(), 30u);
  EXPECT_EQ(subsample(all, 30, 4).outcomes, a.outcomes);
  EXPECT_THROW(subsample(all, 101, 4), UsageError);
}
