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
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "bornforge/bits.hpp"
#include "bornforge/sim.hpp"

namespace bornforge {

struct KernelSpec {
  /// kNegL1 is kappa(x, y) = -|x - y|_1; it is not a probability kernel and
  /// exists for comparing Sinkhorn's large-epsilon limit.
  enum class Kind : std::uint8_t { kGaussian, kHamming, kQuantum, kNegL1 };

  Kind kind = Kind::kGaussian;
  std::vector<double> bandwidths{0.25, 10.0, 1000.0};
  bool sampled = false;
  int shots = 1024;
  std::uint64_t seed = 0;

  static KernelSpec gaussian(std::vector<double> sigma = {0.25, 10.0, 1000.0});
  static KernelSpec hamming();
  static KernelSpec quantum_exact();
  static KernelSpec quantum_sampled(int shots, std::uint64_t seed);
  static KernelSpec neg_l1();

  std::string name() const;
  /// Throws UsageError on empty or nonpositive bandwidths or shots < 1.
  void validate() const;

  bool operator==(const KernelSpec&) const = default;
};

double gaussian_kernel(Bits x, Bits y, const std::vector<double>& sigma);

double hamming_kernel(Bits x, Bits y, int n);

/// U_Phi H U_Phi H |0>, with U_Phi = exp(i sum_{l<m} phi_lm Z_l Z_m + i sum_k phi_k Z_k),
/// phi_lm = (pi/4 - x_l)(pi/4 - x_m), phi_k = (pi/4) x_k.
StateVector quantum_feature_state(Bits x, int n);

/// Exact |<Phi(x)|Phi(y)>|^2, or the fraction of `shots` all-zero outcomes of
/// U_Phi(x)^dagger U_Phi(y) |0> in sampled mode.
double quantum_kernel(Bits x, Bits y, int n, const KernelSpec& spec);

/// Uncached evaluation of any kernel kind.
double kernel_value(const KernelSpec& spec, Bits x, Bits y, int n);

/// Kernel bound to a register width, with memoization. Thread safe.
class Kernel {
 public:
  Kernel(KernelSpec spec, int n);

  double operator()(Bits x, Bits y) const;
  const KernelSpec& spec() const { return spec_; }
  int n() const { return n_; }

 private:
  const StateVector& feature(Bits x) const;

  KernelSpec spec_;
  int n_;
  std::vector<double> by_distance_;  // distance-only kernels
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::uint64_t, double> pair_cache_;
  mutable std::unordered_map<Bits, std::unique_ptr<StateVector>> feature_cache_;
};

struct GramMatrix {
  std::vector<Bits> rows;
  std::vector<Bits> cols;
  Eigen::MatrixXd values;
};

GramMatrix gram(const std::vector<Bits>& X, const std::vector<Bits>& Y, const Kernel& kernel);

}  // namespace bornforge
