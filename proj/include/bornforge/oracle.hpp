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

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bornforge/model.hpp"

namespace bornforge::oracle {

/// Single-qubit operator placed on `qubit` of an n-qubit register (qubit 0 is
/// the least significant index bit).
Eigen::MatrixXcd embed(const Eigen::Matrix2cd& op, int qubit, int n);

Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix2cd hadamard();

/// exp(i sum J_ij Z_i Z_j + i sum b_k Z_k) by dense matrix exponential.
Eigen::MatrixXcd ising_unitary(const CircuitParams& params);

/// exp(i sum_k (Gamma_k X_k + Delta_k Y_k + Sigma_k Z_k)) by dense matrix exponential.
Eigen::MatrixXcd final_unitary(const CircuitParams& params);

/// Tensor power of H.
Eigen::MatrixXcd hadamard_all(int n);

/// |<x| U_f U_z H^n |0>|^2 from the dense matrices above.
std::vector<double> distribution(const CircuitParams& params);

/// Central difference of f in flat entry k.
double central_difference(const std::function<double(const CircuitParams&)>& f,
                          const CircuitParams& params, std::size_t k, double h);

/// Entrywise central difference of the Born distribution.
std::vector<double> prob_gradient_fd(const CircuitParams& params, std::size_t k, double h);

/// Minimum of <C, U> over couplings, by enumerating every spanning-tree basis
/// of the transportation polytope. Meant for a handful of points per side.
double transport_by_vertices(const std::vector<double>& a, const std::vector<double>& b,
                             const Eigen::MatrixXd& C);

/// |sum_x pi(x) [s_pi(x) phi(x) - Delta phi(x)]|, max over components.
double stein_identity_residual(const ProbabilityVector& pi,
                               const std::vector<std::complex<double>>& phi);

/// Random parameters with every block drawn uniformly from [-pi, pi).
CircuitParams random_params(int n, std::uint64_t seed);

/// Random full-support distribution with entries bounded away from zero.
ProbabilityVector random_distribution(int n, std::uint64_t seed, double floor = 0.02);

struct SuiteResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_deviation <= tolerance; }
};

/// Every oracle comparison at width n.
std::vector<SuiteResult> run_suites(int n, std::uint64_t seed);

}  // namespace bornforge::oracle
