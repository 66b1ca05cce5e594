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

#include "bornforge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"

namespace bornforge {

KernelSpec KernelSpec::gaussian(std::vector<double> sigma) {
  KernelSpec s;
  s.kind = Kind::kGaussian;
  s.bandwidths = std::move(sigma);
  return s;
}

KernelSpec KernelSpec::hamming() {
  KernelSpec s;
  s.kind = Kind::kHamming;
  return s;
}

KernelSpec KernelSpec::quantum_exact() {
  KernelSpec s;
  s.kind = Kind::kQuantum;
  return s;
}

KernelSpec KernelSpec::quantum_sampled(int shots, std::uint64_t seed) {
  KernelSpec s;
  s.kind = Kind::kQuantum;
  s.sampled = true;
  s.shots = shots;
  s.seed = seed;
  return s;
}

KernelSpec KernelSpec::neg_l1() {
  KernelSpec s;
  s.kind = Kind::kNegL1;
  return s;
}

std::string KernelSpec::name() const {
  switch (kind) {
    case Kind::kGaussian: return "gaussian";
    case Kind::kHamming: return "hamming";
    case Kind::kQuantum: return "quantum";
    case Kind::kNegL1: return "neg_l1";
  }
  return "?";
}

void KernelSpec::validate() const {
  if (kind == Kind::kGaussian) {
    if (bandwidths.empty()) throw UsageError("gaussian kernel needs at least one bandwidth");
    for (double s : bandwidths) {
      if (!(s > 0.0)) throw UsageError("gaussian bandwidths must be positive");
    }
  }
  if (kind == Kind::kQuantum && sampled && shots < 1) {
    throw UsageError("sampled quantum kernel needs shots >= 1");
  }
}

namespace {

double gaussian_at_distance(int d, const std::vector<double>& sigma) {
  double sum = 0.0;
  for (double s : sigma) sum += std::exp(-static_cast<double>(d) / (2.0 * s));
  return sum / static_cast<double>(sigma.size());
}

StateVector feature_diagonal(StateVector state, Bits x, int n) {
  constexpr double q = std::numbers::pi / 4.0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> b(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    b[static_cast<std::size_t>(l)] = q * bit_of(x, l);
    for (int m = l + 1; m < n; ++m) {
      J(l, m) = J(m, l) = (q - bit_of(x, l)) * (q - bit_of(x, m));
    }
  }
  return apply_ising_diagonal(std::move(state), J, b);
}

void check_width(Bits x, Bits y, int n) {
  check_qubit_count(n);
  if (((x | y) & ~all_ones(n)) != 0) throw ShapeError("bitstring wider than the register");
}

}  // namespace

double gaussian_kernel(Bits x, Bits y, const std::vector<double>& sigma) {
  return gaussian_at_distance(hamming_distance(x, y), sigma);
}

double hamming_kernel(Bits x, Bits y, int n) {
  return std::exp(-static_cast<double>(hamming_distance(x, y)) / static_cast<double>(n));
}

StateVector quantum_feature_state(Bits x, int n) {
  StateVector s = basis_state(n, 0);
  apply_hadamard_all(s);
  s = feature_diagonal(std::move(s), x, n);
  apply_hadamard_all(s);
  return feature_diagonal(std::move(s), x, n);
}

namespace {

double overlap_squared(const StateVector& a, const StateVector& b) {
  Complex acc = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) acc += std::conj(a.amplitudes[k]) * b.amplitudes[k];
  return std::min(1.0, std::norm(acc));
}

/// Runs U_Phi(x)^dagger on Phi(y) and counts zero outcomes over `shots` draws.
double sampled_overlap(const StateVector& fx, const StateVector& fy, Bits x, Bits y,
                       const KernelSpec& spec) {
  const double p0 = overlap_squared(fx, fy);
  const Bits lo = std::min(x, y);
  const Bits hi = std::max(x, y);
  Rng rng(derive_seed(spec.seed, {lo, hi}));
  int zeros = 0;
  for (int r = 0; r < spec.shots; ++r) {
    if (rng.uniform() < p0) ++zeros;
  }
  return static_cast<double>(zeros) / static_cast<double>(spec.shots);
}

}  // namespace

double quantum_kernel(Bits x, Bits y, int n, const KernelSpec& spec) {
  check_width(x, y, n);
  if (!spec.sampled && x == y) return 1.0;
  const StateVector fx = quantum_feature_state(x, n);
  const StateVector fy = quantum_feature_state(y, n);
  if (!spec.sampled) return overlap_squared(fx, fy);
  return sampled_overlap(fx, fy, x, y, spec);
}

double kernel_value(const KernelSpec& spec, Bits x, Bits y, int n) {
  switch (spec.kind) {
    case KernelSpec::Kind::kGaussian:
      check_width(x, y, n);
      return gaussian_kernel(x, y, spec.bandwidths);
    case KernelSpec::Kind::kHamming:
      check_width(x, y, n);
      return hamming_kernel(x, y, n);
    case KernelSpec::Kind::kQuantum:
      return quantum_kernel(x, y, n, spec);
    case KernelSpec::Kind::kNegL1:
      check_width(x, y, n);
      return -static_cast<double>(hamming_distance(x, y));
  }
  return 0.0;
}

Kernel::Kernel(KernelSpec spec, int n) : spec_(std::move(spec)), n_(n) {
  spec_.validate();
  check_qubit_count(n);
  if (spec_.kind != KernelSpec::Kind::kQuantum) {
    by_distance_.resize(static_cast<std::size_t>(n) + 1);
    for (int d = 0; d <= n; ++d) {
      by_distance_[static_cast<std::size_t>(d)] = kernel_value(spec_, 0, all_ones(d), n);
    }
  }
}

const StateVector& Kernel::feature(Bits x) const {
  {
    std::shared_lock lock(mu_);
    auto it = feature_cache_.find(x);
    if (it != feature_cache_.end()) return *it->second;
  }
  auto state = std::make_unique<StateVector>(quantum_feature_state(x, n_));
  std::unique_lock lock(mu_);
  auto [it, inserted] = feature_cache_.try_emplace(x, std::move(state));
  return *it->second;
}

double Kernel::operator()(Bits x, Bits y) const {
  if (!by_distance_.empty()) {
    if (((x | y) & ~all_ones(n_)) != 0) throw ShapeError("bitstring wider than the register");
    return by_distance_[static_cast<std::size_t>(hamming_distance(x, y))];
  }
  if (!spec_.sampled && x == y) return 1.0;
  const Bits lo = std::min(x, y);
  const Bits hi = std::max(x, y);
  const std::uint64_t key = (lo << 32) | hi;
  {
    std::shared_lock lock(mu_);
    auto it = pair_cache_.find(key);
    if (it != pair_cache_.end()) return it->second;
  }
  const StateVector& fx = feature(lo);
  const StateVector& fy = feature(hi);
  const double v = spec_.sampled ? sampled_overlap(fx, fy, lo, hi, spec_)
                                 : overlap_squared(fx, fy);
  std::unique_lock lock(mu_);
  pair_cache_.emplace(key, v);
  return v;
}

GramMatrix gram(const std::vector<Bits>& X, const std::vector<Bits>& Y, const Kernel& kernel) {
  if (X.empty() || Y.empty()) throw UsageError("gram needs nonempty sample lists");
  GramMatrix g{X, Y, Eigen::MatrixXd(static_cast<Eigen::Index>(X.size()),
                                     static_cast<Eigen::Index>(Y.size()))};
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t j = 0; j < Y.size(); ++j) {
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel(X[i], Y[j]);
    }
  }
  return g;
}

}  // namespace bornforge
