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

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "bornforge/bits.hpp"
#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"
#include "bornforge/sim.hpp"
#include "helpers.hpp"

using namespace bornforge;
using bornforge::testing::kron;

namespace {

const Complex kI{0.0, 1.0};

Eigen::Matrix2cd pz() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

// exp(A) by Taylor series, summed until terms drop below 1e-18.
Eigen::Matrix2cd taylor_exp(const Eigen::Matrix2cd& A) {
  Eigen::Matrix2cd sum = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd term = Eigen::Matrix2cd::Identity();
  for (int k = 1; k < 200; ++k) {
    term = term * A / static_cast<double>(k);
    sum += term;
    if (term.norm() < 1e-18) break;
  }
  return sum;
}

}  // namespace

TEST(InitPlusState, OneQubit) {
  const auto s = init_plus_state(1);
  ASSERT_EQ(s.dim(), 2u);
  EXPECT_NEAR(s.amplitudes[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.amplitudes[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(InitPlusState, TwoQubits) {
  const auto s = init_plus_state(2);
  for (const auto& a : s.amplitudes) {
    EXPECT_DOUBLE_EQ(a.real(), 0.5);
    EXPECT_DOUBLE_EQ(a.imag(), 0.0);
  }
}

TEST(InitPlusState, ThreeQubitsNormalized) {
  const auto s = init_plus_state(3);
  for (const auto& a : s.amplitudes) EXPECT_NEAR(a.real(), std::pow(2.0, -1.5), 1e-15);
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
}

TEST(InitPlusState, CapacityError) {
  EXPECT_THROW(init_plus_state(0), CapacityError);
  EXPECT_THROW(init_plus_state(kMaxQubits + 1), CapacityError);
}

TEST(IsingDiagonal, ZeroIsIdentity) {
  const auto s = init_plus_state(3);
  const auto out = apply_ising_diagonal(s, Eigen::MatrixXd::Zero(3, 3), std::vector<double>(3, 0.0));
  for (std::size_t x = 0; x < s.dim(); ++x) EXPECT_EQ(out.amplitudes[x], s.amplitudes[x]);
}

TEST(IsingDiagonal, SingleQubitPhases) {
  const std::vector<double> b{std::numbers::pi / 2};
  auto out0 = apply_ising_diagonal(basis_state(1, 0), Eigen::MatrixXd::Zero(1, 1), b);
  auto out1 = apply_ising_diagonal(basis_state(1, 1), Eigen::MatrixXd::Zero(1, 1), b);
  EXPECT_NEAR(std::abs(out0.amplitudes[0] - kI), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out1.amplitudes[1] + kI), 0.0, 1e-15);
}

TEST(IsingDiagonal, MatchesMatrixExponentialTwoQubits) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const double j01 = 6.0 * rng.uniform() - 3.0;
    const double b0 = 6.0 * rng.uniform() - 3.0;
    const double b1 = 6.0 * rng.uniform() - 3.0;
    // Qubit 1 is the high-order factor.
    const Eigen::MatrixXcd I2 = Eigen::Matrix2cd::Identity();
    const Eigen::MatrixXcd Z = pz();
    const Eigen::MatrixXcd H = j01 * kron(Z, Z) + b0 * kron(I2, Z) + b1 * kron(Z, I2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::VectorXcd phases = (kI * es.eigenvalues().cast<Complex>()).array().exp();
    const Eigen::MatrixXcd U = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 2);
    J(0, 1) = J(1, 0) = j01;
    const auto in = init_plus_state(2);
    const auto out = apply_ising_diagonal(in, J, std::vector<double>{b0, b1});
    Eigen::VectorXcd v(4);
    for (int x = 0; x < 4; ++x) v(x) = in.amplitudes[static_cast<std::size_t>(x)];
    const Eigen::VectorXcd expect = U * v;
    for (int x = 0; x < 4; ++x) EXPECT_NEAR(std::abs(out.amplitudes[static_cast<std::size_t>(x)] - expect(x)), 0.0, 1e-12);
  }
}

TEST(IsingDiagonal, ShapeMismatch) {
  EXPECT_THROW(apply_ising_diagonal(init_plus_state(2), Eigen::MatrixXd::Zero(3, 3), std::vector<double>(2, 0.0)),
               ShapeError);
  EXPECT_THROW(apply_ising_diagonal(init_plus_state(2), Eigen::MatrixXd::Zero(2, 2), std::vector<double>(3, 0.0)),
               ShapeError);
}

TEST(FinalLayer, ZeroIsIdentity) {
  const auto s = apply_ising_diagonal(init_plus_state(2), Eigen::MatrixXd::Constant(2, 2, 0.3), std::vector<double>{0.1, 0.7});
  const std::vector<double> z(2, 0.0);
  const auto out = apply_final_layer(s, z, z, z);
  for (std::size_t x = 0; x < s.dim(); ++x) EXPECT_EQ(out.amplitudes[x], s.amplitudes[x]);
}

TEST(FinalLayer, IqpSettingIsIH) {
  const double h = std::numbers::pi / (2.0 * std::numbers::sqrt2);
  const Gate2 g = final_layer_gate(h, 0.0, h);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(g[0] - kI * r), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(g[1] - kI * r), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(g[2] - kI * r), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(g[3] + kI * r), 0.0, 1e-12);
}

TEST(FinalLayer, MatchesTaylorSeriesOneQubit) {
  Eigen::Matrix2cd X, Y;
  X << 0, 1, 1, 0;
  Y << 0, -kI, kI, 0;
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const double g = 4.0 * rng.uniform() - 2.0;
    const double d = 4.0 * rng.uniform() - 2.0;
    const double s = 4.0 * rng.uniform() - 2.0;
    const Eigen::Matrix2cd U = taylor_exp(kI * (g * X + d * Y + s * pz()));
    const Gate2 G = final_layer_gate(g, d, s);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) EXPECT_NEAR(std::abs(G[static_cast<std::size_t>(2 * r + c)] - U(r, c)), 0.0, 1e-12);
    }
    // Applied to a state, the gate acts as the 2x2 matrix.
    StateVector st{1, {Complex(0.6, 0.0), Complex(0.0, 0.8)}};
    const auto out = apply_final_layer(st, std::vector<double>{g}, std::vector<double>{d}, std::vector<double>{s});
    Eigen::Vector2cd v(0.6, Complex(0.0, 0.8));
    const Eigen::Vector2cd e = U * v;
    EXPECT_NEAR(std::abs(out.amplitudes[0] - e(0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(out.amplitudes[1] - e(1)), 0.0, 1e-12);
  }
}

TEST(FinalLayer, ShapeMismatch) {
  const std::vector<double> two(2, 0.1), three(3, 0.1);
  EXPECT_THROW(apply_final_layer(init_plus_state(2), three, two, two), ShapeError);
  EXPECT_THROW(apply_final_layer(init_plus_state(2), two, two, three), ShapeError);
}

TEST(Born, PlusStateUniform) {
  const auto pv = born_probabilities(init_plus_state(2));
  for (double p : pv.probs) EXPECT_NEAR(p, 0.25, 1e-15);
}

TEST(Born, BasisStateOneHot) {
  const Bits x = parse_bitstring("01");
  const auto pv = born_probabilities(basis_state(2, x));
  for (Bits y = 0; y < 4; ++y) EXPECT_EQ(pv.probs[y], y == x ? 1.0 : 0.0);
}

TEST(Born, DiagonalPhasesLeaveUniform) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
    std::vector<double> b(3);
    for (int i = 0; i < 3; ++i) {
      b[static_cast<std::size_t>(i)] = 10.0 * rng.uniform() - 5.0;
      for (int j = i + 1; j < 3; ++j) J(i, j) = J(j, i) = 10.0 * rng.uniform() - 5.0;
    }
    const auto pv = born_probabilities(apply_ising_diagonal(init_plus_state(3), J, b));
    for (double p : pv.probs) EXPECT_NEAR(p, 0.125, 1e-12);
  }
}

TEST(Norm, PreservedByEveryOperation) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> b(static_cast<std::size_t>(n)), g(b), d(b), s(b);
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      b[u] = 6 * rng.uniform();
      g[u] = 6 * rng.uniform();
      d[u] = 6 * rng.uniform();
      s[u] = 6 * rng.uniform();
      for (int j = i + 1; j < n; ++j) J(i, j) = J(j, i) = 6 * rng.uniform();
    }
    auto st = apply_ising_diagonal(init_plus_state(n), J, b);
    EXPECT_NEAR(st.norm_squared(), 1.0, 1e-12);
    st = apply_final_layer(st, g, d, s);
    EXPECT_NEAR(st.norm_squared(), 1.0, 1e-12);
    apply_hadamard_all(st);
    EXPECT_NEAR(st.norm_squared(), 1.0, 1e-12);
  }
}

TEST(BitOrder, QubitKIsBitKAndCharacterK) {
  // A Z phase followed by an X rotation on qubit 1 alone biases only that qubit.
  const int n = 3;
  std::vector<double> b(3, 0.0), g(3, 0.0), z(3, 0.0);
  b[1] = std::numbers::pi / 8;
  g[1] = std::numbers::pi / 4;
  const auto pv = born_probabilities(apply_final_layer(apply_ising_diagonal(init_plus_state(n), Eigen::MatrixXd::Zero(3, 3), b), g, z, z));
  double marg[3] = {0, 0, 0};
  for (Bits x = 0; x < 8; ++x) {
    for (int k = 0; k < 3; ++k) marg[k] += bit_of(x, k) ? pv.probs[x] : 0.0;
  }
  EXPECT_NEAR(marg[0], 0.5, 1e-12);
  EXPECT_NEAR(marg[2], 0.5, 1e-12);
  EXPECT_GT(std::abs(marg[1] - 0.5), 0.1);
  // The sampled bitstring reports qubit k at character k.
  const auto samples = sample(pv, 2000, 4);
  int ones_at_1 = 0;
  for (Bits x : samples.outcomes) ones_at_1 += to_bitstring(x, n)[1] == '1';
  EXPECT_NEAR(ones_at_1 / 2000.0, marg[1], 0.05);
  EXPECT_EQ(to_bitstring(Bits{1} << 1, 3), "010");
  EXPECT_EQ(toggle(0, 0), parse_bitstring("100"));
}

TEST(Sample, OneHot) {
  const auto pv = bornforge::testing::one_hot(2, 2);
  const auto s = sample(pv, 5, 9);
  ASSERT_EQ(s.size(), 5u);
  for (Bits x : s.outcomes) EXPECT_EQ(x, 2u);
}

TEST(Sample, UniformConcentration) {
  const std::size_t N = 100000;
  const auto s = sample(bornforge::testing::uniform_pmf(2), N, 1234);
  std::vector<double> count(4, 0.0);
  for (Bits x : s.outcomes) count[x] += 1.0;
  const double sigma = std::sqrt(0.25 * 0.75 / N);
  for (double c : count) EXPECT_LT(std::abs(c / N - 0.25), 4 * sigma);
}

TEST(Sample, Deterministic) {
  const auto pv = bornforge::testing::random_pmf(3, 17);
  EXPECT_EQ(sample(pv, 300, 42).outcomes, sample(pv, 300, 42).outcomes);
  EXPECT_NE(sample(pv, 300, 42).outcomes, sample(pv, 300, 43).outcomes);
}

TEST(ProbabilityVectorFrom, Validates) {
  EXPECT_THROW(ProbabilityVector::from(2, {0.5, 0.5}), ShapeError);
  EXPECT_THROW(ProbabilityVector::from(1, {0.7, 0.7}), ShapeError);
  EXPECT_THROW(ProbabilityVector::from(1, {1.2, -0.2}), ShapeError);
  EXPECT_NO_THROW(ProbabilityVector::from(1, {0.3, 0.7}));
}

TEST(Bits, StringRoundTrip) {
  EXPECT_EQ(parse_bitstring("1101"), 0b1011u);
  EXPECT_EQ(to_bitstring(0b1011u, 4), "1101");
  EXPECT_THROW(parse_bitstring("10a"), ShapeError);
}
