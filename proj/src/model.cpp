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

#include "bornforge/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <string>

#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"

namespace bornforge {

namespace {

const char* kind_prefix(ParamKind kind) {
  switch (kind) {
    case ParamKind::kCoupling: return "J";
    case ParamKind::kLocal: return "b";
    case ParamKind::kGamma: return "gamma";
    case ParamKind::kDelta: return "delta";
    case ParamKind::kSigma: return "sigma";
  }
  return "?";
}

}  // namespace

std::string ParamIndex::name() const {
  std::string s = kind_prefix(kind);
  if (kind == ParamKind::kCoupling) {
    return s + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
  }
  return s + "[" + std::to_string(i) + "]";
}

ParamIndex ParamIndex::parse(const std::string& name) {
  const auto open = name.find('[');
  if (open == std::string::npos || name.back() != ']') {
    throw UsageError("bad parameter name '" + name + "'");
  }
  const std::string prefix = name.substr(0, open);
  const std::string inner = name.substr(open + 1, name.size() - open - 2);
  try {
    if (prefix == "J") {
      const auto comma = inner.find(',');
      if (comma == std::string::npos) throw UsageError("coupling needs two indices");
      return coupling(std::stoi(inner.substr(0, comma)), std::stoi(inner.substr(comma + 1)));
    }
    const int k = std::stoi(inner);
    if (prefix == "b") return local(k);
    if (prefix == "gamma") return gamma(k);
    if (prefix == "delta") return delta(k);
    if (prefix == "sigma") return sigma(k);
  } catch (const std::logic_error&) {
  }
  throw UsageError("bad parameter name '" + name + "'");
}

CircuitParams::CircuitParams(int n) : n_(n) {
  check_qubit_count(n);
  const std::size_t total = num_couplings() + 4 * static_cast<std::size_t>(n);
  base_.assign(total, 0.0);
  shift_.assign(total, 0);
  mask_.assign(total, 0);
  set_trainable_kind(ParamKind::kCoupling, true);
  set_trainable_kind(ParamKind::kLocal, true);
}

std::size_t CircuitParams::block_start(ParamKind kind) const {
  const auto nn = static_cast<std::size_t>(n_);
  switch (kind) {
    case ParamKind::kCoupling: return 0;
    case ParamKind::kLocal: return num_couplings();
    case ParamKind::kGamma: return num_couplings() + nn;
    case ParamKind::kDelta: return num_couplings() + 2 * nn;
    case ParamKind::kSigma: return num_couplings() + 3 * nn;
  }
  return 0;
}

std::size_t CircuitParams::flat_of(const ParamIndex& idx) const {
  if (idx.kind == ParamKind::kCoupling) {
    if (idx.i < 0 || idx.j <= idx.i || idx.j >= n_) {
      throw UsageError("coupling index " + idx.name() + " needs 0 <= i < j < n");
    }
    // Row-major upper triangle.
    const int i = idx.i;
    return static_cast<std::size_t>(i * n_ - i * (i + 1) / 2 + (idx.j - i - 1));
  }
  if (idx.i < 0 || idx.i >= n_) throw UsageError("index " + idx.name() + " out of range");
  return block_start(idx.kind) + static_cast<std::size_t>(idx.i);
}

ParamIndex CircuitParams::index_at(std::size_t k) const {
  if (k >= size()) throw UsageError("flat parameter index out of range");
  if (k < num_couplings()) {
    int i = 0;
    std::size_t row = static_cast<std::size_t>(n_ - 1);
    while (k >= row) {
      k -= row;
      ++i;
      --row;
    }
    return ParamIndex::coupling(i, i + 1 + static_cast<int>(k));
  }
  k -= num_couplings();
  const auto nn = static_cast<std::size_t>(n_);
  const int q = static_cast<int>(k % nn);
  switch (k / nn) {
    case 0: return ParamIndex::local(q);
    case 1: return ParamIndex::gamma(q);
    case 2: return ParamIndex::delta(q);
    default: return ParamIndex::sigma(q);
  }
}

double CircuitParams::value(std::size_t k) const {
  if (shift_[k] == 0) return base_[k];
  return base_[k] + shift_[k] * kShiftStep;
}

void CircuitParams::set(std::size_t k, double v) {
  base_.at(k) = v;
  shift_[k] = 0;
}

void CircuitParams::set_trainable_kind(ParamKind kind, bool on) {
  const std::size_t start = block_start(kind);
  const std::size_t len = kind == ParamKind::kCoupling ? num_couplings()
                                                       : static_cast<std::size_t>(n_);
  for (std::size_t k = start; k < start + len; ++k) mask_[k] = on ? 1 : 0;
}

std::vector<std::size_t> CircuitParams::trainable_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size(); ++k) {
    if (mask_[k]) out.push_back(k);
  }
  return out;
}

std::vector<double> CircuitParams::values() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < size(); ++k) out[k] = value(k);
  return out;
}

void CircuitParams::set_values(const std::vector<double>& v) {
  if (v.size() != size()) throw ShapeError("flat parameter vector has wrong length");
  for (std::size_t k = 0; k < size(); ++k) set(k, v[k]);
}

Eigen::MatrixXd CircuitParams::J() const {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_, n_);
  std::size_t k = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j, ++k) {
      J(i, j) = value(k);
      J(j, i) = J(i, j);
    }
  }
  return J;
}

void CircuitParams::set_J(const Eigen::MatrixXd& J) {
  if (J.rows() != n_ || J.cols() != n_) throw ShapeError("J must be n x n");
  for (int i = 0; i < n_; ++i) {
    if (J(i, i) != 0.0) throw ShapeError("J must have a zero diagonal");
    for (int j = i + 1; j < n_; ++j) {
      if (std::abs(J(i, j) - J(j, i)) > 1e-12) throw ShapeError("J must be symmetric");
      set(ParamIndex::coupling(i, j), J(i, j));
    }
  }
}

std::vector<double> CircuitParams::block(ParamKind kind) const {
  const std::size_t start = block_start(kind);
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = value(start + k);
  return out;
}

void CircuitParams::set_block(ParamKind kind, const std::vector<double>& v) {
  if (v.size() != static_cast<std::size_t>(n_)) {
    throw ShapeError(std::string(kind_prefix(kind)) + " must have length n");
  }
  const std::size_t start = block_start(kind);
  for (std::size_t k = 0; k < v.size(); ++k) set(start + k, v[k]);
}

std::uint64_t CircuitParams::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(n_));
  for (std::size_t k = 0; k < size(); ++k) {
    const double v = value(k);
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    mix(bits);
  }
  return h;
}

Eigen::MatrixXd symmetric_from_upper(int n, const std::vector<double>& upper) {
  if (upper.size() != static_cast<std::size_t>(n * (n - 1) / 2)) {
    throw ShapeError("coupling list has wrong length");
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) J(i, j) = J(j, i) = upper[k++];
  }
  return J;
}

StateVector build_state(const CircuitParams& params) {
  const auto b = params.b();
  const auto g = params.gamma();
  const auto d = params.delta();
  const auto s = params.sigma();
  return apply_final_layer(apply_ising_diagonal(init_plus_state(params.n()), params.J(), b),
                           g, d, s);
}

ProbabilityVector build_distribution(const CircuitParams& params) {
  return born_probabilities(build_state(params));
}

CircuitParams shifted_params(const CircuitParams& params, const ParamIndex& idx, int sign) {
  if (sign != 1 && sign != -1) throw UsageError("shift sign must be +1 or -1");
  const std::size_t k = params.flat_of(idx);
  if (!params.trainable(k)) throw UsageError("parameter " + idx.name() + " is not trainable");
  CircuitParams out = params;
  out.add_shift(k, sign);
  return out;
}

std::vector<double> prob_gradient(const CircuitParams& params, const ParamIndex& idx) {
  const auto up = build_distribution(shifted_params(params, idx, +1));
  const auto down = build_distribution(shifted_params(params, idx, -1));
  std::vector<double> grad(up.dim());
  for (std::size_t x = 0; x < grad.size(); ++x) grad[x] = up.probs[x] - down.probs[x];
  return grad;
}

CircuitParams iqp_params(const Eigen::MatrixXd& J, const std::vector<double>& b) {
  CircuitParams p(static_cast<int>(b.size()));
  p.set_J(J);
  p.set_b(b);
  const double h = std::numbers::pi / (2.0 * std::numbers::sqrt2);
  p.set_gamma(std::vector<double>(b.size(), h));
  p.set_sigma(std::vector<double>(b.size(), h));
  return p;
}

CircuitParams qaoa_params(const Eigen::MatrixXd& J, const std::vector<double>& b,
                          const std::vector<double>& gamma) {
  CircuitParams p(static_cast<int>(b.size()));
  p.set_J(J);
  p.set_b(b);
  std::vector<double> neg(gamma.size());
  for (std::size_t k = 0; k < gamma.size(); ++k) neg[k] = -gamma[k];
  p.set_gamma(neg);
  return p;
}

CircuitParams qaoa_params(const Eigen::MatrixXd& J, const std::vector<double>& b,
                          double gamma) {
  return qaoa_params(J, b, std::vector<double>(b.size(), gamma));
}

std::string HardFamily::name() const {
  switch (kind) {
    case Kind::kGrid8: return "grid8";
    case Kind::kOddMultiple: return "odd_multiple";
    case Kind::kIrrational: return "irrational";
  }
  return "?";
}

HardFamily HardFamily::parse(const std::string& name, int d) {
  if (name == "grid8") return grid8();
  if (name == "odd_multiple") {
    if (d < 1) throw UsageError("odd_multiple needs d >= 1");
    return odd_multiple(d);
  }
  if (name == "irrational") return irrational();
  throw UsageError("unknown init family '" + name + "'");
}

CircuitParams random_hard_init(int n, const HardFamily& family, std::uint64_t seed) {
  CircuitParams p(n);
  Rng rng(seed);
  const std::size_t count = p.num_couplings() + static_cast<std::size_t>(n);
  for (std::size_t k = 0; k < count; ++k) {
    double angle = 0.0;
    switch (family.kind) {
      case HardFamily::Kind::kGrid8:
        angle = static_cast<double>(rng.below(8)) * std::numbers::pi / 8.0;
        break;
      case HardFamily::Kind::kOddMultiple: {
        const auto cells = static_cast<std::uint64_t>(8 * family.d);
        angle = static_cast<double>(2 * rng.below(cells) + 1) * std::numbers::pi /
                static_cast<double>(cells);
        break;
      }
      case HardFamily::Kind::kIrrational:
        angle = 2.0 * std::numbers::pi * rng.uniform();
        break;
    }
    p.set(k, angle);
  }
  return p;
}

double snap_odd_multiple(double angle, int d) {
  const double unit = std::numbers::pi / (8.0 * d);
  const double l = std::round((angle / unit - 1.0) / 2.0);
  return (2.0 * l + 1.0) * unit;
}

bool on_odd_lattice(double angle, int d, double tol) {
  return std::abs(angle - snap_odd_multiple(angle, d)) <= tol;
}

}  // namespace bornforge
