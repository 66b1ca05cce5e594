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

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bornforge/bits.hpp"

namespace bornforge {

using Complex = std::complex<double>;

/// Largest register the dense simulator accepts.
inline constexpr int kMaxQubits = 24;

/// Throws CapacityError unless 1 <= n <= kMaxQubits.
void check_qubit_count(int n);

/// Dense pure state over n qubits, indexed by Bits (qubit 0 = LSB).
struct StateVector {
  int n = 0;
  std::vector<Complex> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  double norm_squared() const;
};

/// Exact Born distribution over {0,1}^n.
struct ProbabilityVector {
  int n = 0;
  std::vector<double> probs;

  std::size_t dim() const { return probs.size(); }
  double operator[](Bits x) const { return probs[x]; }

  /// Builds from raw values. Throws ShapeError if the length is not 2^n or the
  /// entries are negative or do not sum to one within `tol`.
  static ProbabilityVector from(int n, std::vector<double> probs, double tol = 1e-9);
};

/// Bitstrings drawn from some distribution, in draw order.
struct SampleSet {
  int n = 0;
  std::vector<Bits> outcomes;

  std::size_t size() const { return outcomes.size(); }
  bool empty() const { return outcomes.empty(); }
};

/// Row-major 2x2 complex matrix.
using Gate2 = std::array<Complex, 4>;

StateVector init_plus_state(int n);

StateVector basis_state(int n, Bits x);

/// Multiplies amplitude x by exp(i (sum_{i<j} J_ij z_i z_j + sum_k b_k z_k)).
/// J must be symmetric with zero diagonal (only the upper triangle is read).
StateVector apply_ising_diagonal(StateVector state, const Eigen::MatrixXd& J,
                                 std::span<const double> b);

/// exp(i (g X + d Y + s Z)) in closed form.
Gate2 final_layer_gate(double gamma, double delta, double sigma);

void apply_gate(StateVector& state, int qubit, const Gate2& gate);

/// Applies final_layer_gate(gamma[k], delta[k], sigma[k]) to every qubit k.
StateVector apply_final_layer(StateVector state, std::span<const double> gamma,
                              std::span<const double> delta,
                              std::span<const double> sigma);

void apply_hadamard_all(StateVector& state);

ProbabilityVector born_probabilities(const StateVector& state);

/// Inverse-CDF sampler over a fixed probability vector.
class Sampler {
 public:
  explicit Sampler(const ProbabilityVector& pv);
  template <class Rng>
  Bits draw(Rng& rng) const {
    return locate(rng.uniform());
  }
  int n() const { return n_; }

 private:
  Bits locate(double u) const;
  int n_;
  std::vector<double> cdf_;
};

/// N i.i.d. draws from pv; deterministic in `seed`.
SampleSet sample(const ProbabilityVector& pv, std::size_t count, std::uint64_t seed);

}  // namespace bornforge
