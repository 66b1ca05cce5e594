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

#include "bornforge/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"

namespace bornforge {

void check_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw CapacityError("qubit count " + std::to_string(n) + " outside [1, " +
                        std::to_string(kMaxQubits) + "]");
  }
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

ProbabilityVector ProbabilityVector::from(int n, std::vector<double> probs, double tol) {
  check_qubit_count(n);
  if (probs.size() != (std::size_t{1} << n)) {
    throw ShapeError("probability vector length " + std::to_string(probs.size()) +
                     " is not 2^" + std::to_string(n));
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ShapeError("probability vector has a negative or NaN entry");
    total += p;
  }
  if (std::abs(total - 1.0) > tol) {
    throw ShapeError("probability vector sums to " + std::to_string(total));
  }
  return {n, std::move(probs)};
}

StateVector init_plus_state(int n) {
  check_qubit_count(n);
  const std::size_t dim = std::size_t{1} << n;
  const double amp = std::pow(2.0, -0.5 * n);
  return {n, std::vector<Complex>(dim, Complex(amp, 0.0))};
}

StateVector basis_state(int n, Bits x) {
  check_qubit_count(n);
  StateVector s{n, std::vector<Complex>(std::size_t{1} << n)};
  s.amplitudes.at(x) = 1.0;
  return s;
}

StateVector apply_ising_diagonal(StateVector state, const Eigen::MatrixXd& J,
                                 std::span<const double> b) {
  const int n = state.n;
  if (J.rows() != n || J.cols() != n || static_cast<int>(b.size()) != n) {
    throw ShapeError("Ising parameters do not match a " + std::to_string(n) +
                     "-qubit register");
  }
  // Nonzero couplings only.
  struct Edge {
    int i, j;
    double w;
  };
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (J(i, j) != 0.0) edges.push_back({i, j, J(i, j)});
    }
  }
  for (std::size_t x = 0; x < state.dim(); ++x) {
    double phase = 0.0;
    for (const auto& e : edges) phase += e.w * z_of(x, e.i) * z_of(x, e.j);
    for (int k = 0; k < n; ++k) phase += b[static_cast<std::size_t>(k)] * z_of(x, k);
    state.amplitudes[x] *= std::polar(1.0, phase);
  }
  return state;
}

Gate2 final_layer_gate(double gamma, double delta, double sigma) {
  const double theta = std::sqrt(gamma * gamma + delta * delta + sigma * sigma);
  if (theta == 0.0) return {1.0, 0.0, 0.0, 1.0};
  const double c = std::cos(theta);
  const double s = std::sin(theta) / theta;
  const Complex i(0.0, 1.0);
  // cos(t) I + i sin(t) (nx X + ny Y + nz Z)
  return {Complex(c, 0.0) + i * s * sigma, i * s * Complex(gamma, -delta),
          i * s * Complex(gamma, delta), Complex(c, 0.0) - i * s * sigma};
}

void apply_gate(StateVector& state, int qubit, const Gate2& g) {
  const std::size_t stride = std::size_t{1} << qubit;
  const std::size_t dim = state.dim();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t off = 0; off < stride; ++off) {
      Complex& a0 = state.amplitudes[base + off];
      Complex& a1 = state.amplitudes[base + off + stride];
      const Complex v0 = a0;
      const Complex v1 = a1;
      a0 = g[0] * v0 + g[1] * v1;
      a1 = g[2] * v0 + g[3] * v1;
    }
  }
}

StateVector apply_final_layer(StateVector state, std::span<const double> gamma,
                              std::span<const double> delta,
                              std::span<const double> sigma) {
  const auto n = static_cast<std::size_t>(state.n);
  if (gamma.size() != n || delta.size() != n || sigma.size() != n) {
    throw ShapeError("final-layer vectors must have length " + std::to_string(n));
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (gamma[k] == 0.0 && delta[k] == 0.0 && sigma[k] == 0.0) continue;
    apply_gate(state, static_cast<int>(k), final_layer_gate(gamma[k], delta[k], sigma[k]));
  }
  return state;
}

void apply_hadamard_all(StateVector& state) {
  const double r = 1.0 / std::sqrt(2.0);
  const Gate2 h{r, r, r, -r};
  for (int k = 0; k < state.n; ++k) apply_gate(state, k, h);
}

ProbabilityVector born_probabilities(const StateVector& state) {
  ProbabilityVector pv{state.n, std::vector<double>(state.dim())};
  double total = 0.0;
  for (std::size_t x = 0; x < state.dim(); ++x) {
    pv.probs[x] = std::norm(state.amplitudes[x]);
    total += pv.probs[x];
  }
  // Renormalize to unit total.
  for (double& p : pv.probs) p /= total;
  return pv;
}

Sampler::Sampler(const ProbabilityVector& pv) : n_(pv.n), cdf_(pv.dim()) {
  std::partial_sum(pv.probs.begin(), pv.probs.end(), cdf_.begin());
}

Bits Sampler::locate(double u) const {
  const double target = u * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  if (it == cdf_.end()) --it;
  return static_cast<Bits>(it - cdf_.begin());
}

SampleSet sample(const ProbabilityVector& pv, std::size_t count, std::uint64_t seed) {
  Sampler sampler(pv);
  Rng rng(seed);
  SampleSet out{pv.n, {}};
  out.outcomes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.outcomes.push_back(sampler.draw(rng));
  return out;
}

}  // namespace bornforge
