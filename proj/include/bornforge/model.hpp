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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bornforge/sim.hpp"

namespace bornforge {

enum class ParamKind : std::uint8_t { kCoupling, kLocal, kGamma, kDelta, kSigma };

struct ParamIndex {
  ParamKind kind = ParamKind::kLocal;
  int i = 0;
  int j = 0;  // only meaningful for couplings

  static ParamIndex coupling(int i, int j) { return {ParamKind::kCoupling, i, j}; }
  static ParamIndex local(int k) { return {ParamKind::kLocal, k, 0}; }
  static ParamIndex gamma(int k) { return {ParamKind::kGamma, k, 0}; }
  static ParamIndex delta(int k) { return {ParamKind::kDelta, k, 0}; }
  static ParamIndex sigma(int k) { return {ParamKind::kSigma, k, 0}; }

  /// "J[0,1]", "b[2]", "gamma[0]", ...
  std::string name() const;
  static ParamIndex parse(const std::string& name);

  bool operator==(const ParamIndex&) const = default;
};

/// Size of one parameter-shift step.
inline constexpr double kShiftStep = 0.78539816339744830962;  // pi/4

/// theta = {J_ij, b_k, Gamma_k, Delta_k, Sigma_k} stored flat in the order
/// couplings (i<j, row-major), locals, Gamma, Delta, Sigma.
///
/// Shifted copies keep the base value untouched and count shift steps
/// separately, so undoing a shift restores the original bit pattern.
class CircuitParams {
 public:
  CircuitParams() = default;
  /// All-zero parameters; couplings and locals trainable.
  explicit CircuitParams(int n);

  int n() const { return n_; }
  std::size_t size() const { return base_.size(); }
  std::size_t num_couplings() const { return static_cast<std::size_t>(n_ * (n_ - 1) / 2); }

  std::size_t flat_of(const ParamIndex& idx) const;
  ParamIndex index_at(std::size_t k) const;

  /// Effective value including pending shifts.
  double value(std::size_t k) const;
  double value(const ParamIndex& idx) const { return value(flat_of(idx)); }
  /// Overwrites the base value and clears any shift on that entry.
  void set(std::size_t k, double v);
  void set(const ParamIndex& idx, double v) { set(flat_of(idx), v); }

  int shift_count(std::size_t k) const { return shift_[k]; }
  void add_shift(std::size_t k, int steps) { shift_[k] += steps; }

  bool trainable(std::size_t k) const { return mask_[k] != 0; }
  bool trainable(const ParamIndex& idx) const { return trainable(flat_of(idx)); }
  void set_trainable(std::size_t k, bool on) { mask_[k] = on ? 1 : 0; }
  void set_trainable(const ParamIndex& idx, bool on) { set_trainable(flat_of(idx), on); }
  void set_trainable_kind(ParamKind kind, bool on);
  std::vector<std::size_t> trainable_indices() const;

  std::vector<double> values() const;
  void set_values(const std::vector<double>& v);

  Eigen::MatrixXd J() const;
  std::vector<double> b() const { return block(ParamKind::kLocal); }
  std::vector<double> gamma() const { return block(ParamKind::kGamma); }
  std::vector<double> delta() const { return block(ParamKind::kDelta); }
  std::vector<double> sigma() const { return block(ParamKind::kSigma); }

  void set_J(const Eigen::MatrixXd& J);
  void set_b(const std::vector<double>& v) { set_block(ParamKind::kLocal, v); }
  void set_gamma(const std::vector<double>& v) { set_block(ParamKind::kGamma, v); }
  void set_delta(const std::vector<double>& v) { set_block(ParamKind::kDelta, v); }
  void set_sigma(const std::vector<double>& v) { set_block(ParamKind::kSigma, v); }

  /// FNV-1a over the effective values' bit patterns; used in training records.
  std::uint64_t hash() const;

  bool operator==(const CircuitParams&) const = default;

 private:
  std::size_t block_start(ParamKind kind) const;
  std::vector<double> block(ParamKind kind) const;
  void set_block(ParamKind kind, const std::vector<double>& v);

  int n_ = 0;
  std::vector<double> base_;
  std::vector<int> shift_;
  std::vector<char> mask_;
};

StateVector build_state(const CircuitParams& params);

ProbabilityVector build_distribution(const CircuitParams& params);

/// Copy with entry idx moved by sign * kShiftStep. Throws UsageError if idx is
/// frozen or sign is not +1/-1.
CircuitParams shifted_params(const CircuitParams& params, const ParamIndex& idx, int sign);

/// p(theta + pi/4) - p(theta - pi/4), entrywise. Exact for couplings and
/// locals; for a final-layer entry only when the other two components on that
/// qubit are zero.
std::vector<double> prob_gradient(const CircuitParams& params, const ParamIndex& idx);

/// Gamma = Sigma = pi/(2 sqrt 2), Delta = 0: final layer is iH on every qubit.
CircuitParams iqp_params(const Eigen::MatrixXd& J, const std::vector<double>& b);

/// Final layer exp(-i Gamma_k X): stores -Gamma, Delta = Sigma = 0.
CircuitParams qaoa_params(const Eigen::MatrixXd& J, const std::vector<double>& b,
                          const std::vector<double>& gamma);
CircuitParams qaoa_params(const Eigen::MatrixXd& J, const std::vector<double>& b,
                          double gamma);

struct HardFamily {
  enum class Kind : std::uint8_t { kGrid8, kOddMultiple, kIrrational };
  Kind kind = Kind::kIrrational;
  int d = 1;  // denominator factor for kOddMultiple

  static HardFamily grid8() { return {Kind::kGrid8, 1}; }
  static HardFamily odd_multiple(int d) { return {Kind::kOddMultiple, d}; }
  static HardFamily irrational() { return {Kind::kIrrational, 1}; }

  std::string name() const;
  static HardFamily parse(const std::string& name, int d = 1);
};

/// Draws every J_ij (i<j) and b_k from the family; final layer stays zero.
CircuitParams random_hard_init(int n, const HardFamily& family, std::uint64_t seed);

/// Nearest (2l+1) pi / (8d).
double snap_odd_multiple(double angle, int d);
bool on_odd_lattice(double angle, int d, double tol = 1e-9);

/// Symmetric J from the upper triangle of flat couplings.
Eigen::MatrixXd symmetric_from_upper(int n, const std::vector<double>& upper);

}  // namespace bornforge
