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

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bornforge/rng.hpp"
#include "bornforge/sim.hpp"

namespace bornforge::testing {

inline constexpr double kPi = 3.14159265358979323846;

/// Full-support distribution with entries at least floor / (dim (floor + 1)).
inline ProbabilityVector random_pmf(int n, std::uint64_t seed, double floor = 0.05) {
  Rng rng(seed);
  std::vector<double> w(std::size_t{1} << n);
  double total = 0.0;
  for (double& v : w) {
    v = floor + rng.uniform();
    total += v;
  }
  for (double& v : w) v /= total;
  return {n, w};
}

inline ProbabilityVector uniform_pmf(int n) {
  const std::size_t dim = std::size_t{1} << n;
  return {n, std::vector<double>(dim, 1.0 / static_cast<double>(dim))};
}

inline ProbabilityVector one_hot(int n, Bits x) {
  std::vector<double> w(std::size_t{1} << n, 0.0);
  w[x] = 1.0;
  return {n, w};
}

/// A (x) B with A as the high-order factor.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  Eigen::MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  }
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace bornforge::testing
