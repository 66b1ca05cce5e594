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

#include "bornforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "bornforge/cost_mmd.hpp"
#include "bornforge/cost_sinkhorn.hpp"
#include "bornforge/cost_stein.hpp"
#include "bornforge/data.hpp"
#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"

namespace bornforge::oracle {

namespace {

using C = std::complex<double>;
constexpr C kI{0.0, 1.0};

// Union-find over the a + b bipartite nodes.
struct Forest {
  std::vector<int> parent;
  explicit Forest(int size) : parent(static_cast<std::size_t>(size)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)];
    return v;
  }
  bool unite(int u, int v) {
    u = find(u);
    v = find(v);
    if (u == v) return false;
    parent[static_cast<std::size_t>(u)] = v;
    return true;
  }
};

// Flows on a spanning tree given the node supplies; nullopt-like NaN when infeasible.
double tree_cost(const std::vector<std::pair<int, int>>& cells, const std::vector<double>& a,
                 const std::vector<double>& b, const Eigen::MatrixXd& Cm) {
  const int na = static_cast<int>(a.size());
  std::vector<double> supply(a);
  supply.insert(supply.end(), b.begin(), b.end());
  std::vector<int> degree(supply.size(), 0);
  for (auto [i, j] : cells) {
    ++degree[static_cast<std::size_t>(i)];
    ++degree[static_cast<std::size_t>(na + j)];
  }
  std::vector<char> used(cells.size(), 0);
  double cost = 0.0;
  for (std::size_t step = 0; step < cells.size(); ++step) {
    bool found = false;
    for (std::size_t e = 0; e < cells.size() && !found; ++e) {
      if (used[e]) continue;
      const auto [i, j] = cells[e];
      const int u = i;
      const int v = na + j;
      int leaf = -1;
      int other = -1;
      if (degree[static_cast<std::size_t>(u)] == 1) {
        leaf = u;
        other = v;
      } else if (degree[static_cast<std::size_t>(v)] == 1) {
        leaf = v;
        other = u;
      }
      if (leaf < 0) continue;
      const double flow = supply[static_cast<std::size_t>(leaf)];
      if (flow < -1e-12) return std::numeric_limits<double>::quiet_NaN();
      cost += flow * Cm(i, j);
      supply[static_cast<std::size_t>(leaf)] = 0.0;
      supply[static_cast<std::size_t>(other)] -= flow;
      --degree[static_cast<std::size_t>(leaf)];
      --degree[static_cast<std::size_t>(other)];
      used[e] = 1;
      found = true;
    }
    if (!found) return std::numeric_limits<double>::quiet_NaN();
  }
  return cost;
}

}  // namespace

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, -kI, kI, 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd m;
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

Eigen::MatrixXcd embed(const Eigen::Matrix2cd& op, int qubit, int n) {
  // Kronecker order: qubit n-1 outermost, qubit 0 innermost.
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const Eigen::Matrix2cd f = q == qubit ? op : Eigen::Matrix2cd::Identity();
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) next.block(r * out.rows(), c * out.cols(), out.rows(), out.cols()) = out * f(r, c);
    }
    out = std::move(next);
  }
  return out;
}

Eigen::MatrixXcd ising_unitary(const CircuitParams& params) {
  const int n = params.n();
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  const Eigen::MatrixXd J = params.J();
  const auto b = params.b();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) H += J(i, j) * embed(pauli_z(), i, n) * embed(pauli_z(), j, n);
    H += b[static_cast<std::size_t>(i)] * embed(pauli_z(), i, n);
  }
  return (kI * H).exp();
}

Eigen::MatrixXcd final_unitary(const CircuitParams& params) {
  const int n = params.n();
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  const auto g = params.gamma();
  const auto d = params.delta();
  const auto s = params.sigma();
  for (int k = 0; k < n; ++k) {
    const auto u = static_cast<std::size_t>(k);
    H += g[u] * embed(pauli_x(), k, n) + d[u] * embed(pauli_y(), k, n) + s[u] * embed(pauli_z(), k, n);
  }
  return (kI * H).exp();
}

Eigen::MatrixXcd hadamard_all(int n) {
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(dim, dim);
  for (int k = 0; k < n; ++k) out = embed(hadamard(), k, n) * out;
  return out;
}

std::vector<double> distribution(const CircuitParams& params) {
  const int n = params.n();
  const auto dim = Eigen::Index{1} << n;
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(dim);
  zero(0) = 1.0;
  const Eigen::VectorXcd psi = final_unitary(params) * ising_unitary(params) * hadamard_all(n) * zero;
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (Eigen::Index x = 0; x < dim; ++x) out[static_cast<std::size_t>(x)] = std::norm(psi(x));
  return out;
}

double central_difference(const std::function<double(const CircuitParams&)>& f,
                          const CircuitParams& params, std::size_t k, double h) {
  CircuitParams up = params;
  CircuitParams down = params;
  up.set(k, params.value(k) + h);
  down.set(k, params.value(k) - h);
  return (f(up) - f(down)) / (2.0 * h);
}

std::vector<double> prob_gradient_fd(const CircuitParams& params, std::size_t k, double h) {
  CircuitParams up = params;
  CircuitParams down = params;
  up.set(k, params.value(k) + h);
  down.set(k, params.value(k) - h);
  const auto pu = distribution(up);
  const auto pd = distribution(down);
  std::vector<double> out(pu.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = (pu[x] - pd[x]) / (2.0 * h);
  return out;
}

double transport_by_vertices(const std::vector<double>& a, const std::vector<double>& b,
                             const Eigen::MatrixXd& Cm) {
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  if (na < 1 || nb < 1) throw ShapeError("empty marginal");
  if (na * nb > 25) throw CapacityError("vertex enumeration is limited to 25 cells");
  const int rank = na + nb - 1;
  const int cells = na * nb;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(rank));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Forest forest(na + nb);
    bool tree = true;
    std::vector<std::pair<int, int>> chosen;
    for (int c : pick) {
      const int i = c / nb;
      const int j = c % nb;
      chosen.emplace_back(i, j);
      tree = tree && forest.unite(i, na + j);
    }
    if (tree) {
      const double cost = tree_cost(chosen, a, b, Cm);
      if (!std::isnan(cost)) best = std::min(best, cost);
    }
    int pos = rank - 1;
    while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == cells - rank + pos) --pos;
    if (pos < 0) break;
    ++pick[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < rank; ++q) pick[static_cast<std::size_t>(q)] = pick[static_cast<std::size_t>(q - 1)] + 1;
  }
  return best;
}

double stein_identity_residual(const ProbabilityVector& pi, const std::vector<C>& phi) {
  const int n = pi.n;
  std::vector<C> acc(static_cast<std::size_t>(n), C{0.0, 0.0});
  for (Bits x = 0; x < pi.dim(); ++x) {
    const Eigen::VectorXd s = exact_score(pi, x);
    for (int i = 0; i < n; ++i) {
      const C delta = phi[x] - phi[toggle(x, i)];
      acc[static_cast<std::size_t>(i)] += pi.probs[x] * (s(i) * phi[x] - delta);
    }
  }
  double worst = 0.0;
  for (const auto& v : acc) worst = std::max(worst, std::abs(v));
  return worst;
}

CircuitParams random_params(int n, std::uint64_t seed) {
  CircuitParams p(n);
  Rng rng(seed);
  for (std::size_t k = 0; k < p.size(); ++k) p.set(k, (2.0 * rng.uniform() - 1.0) * std::numbers::pi);
  return p;
}

ProbabilityVector random_distribution(int n, std::uint64_t seed, double floor) {
  Rng rng(seed);
  std::vector<double> w(std::size_t{1} << n);
  double total = 0.0;
  for (double& v : w) {
    v = floor + rng.uniform();
    total += v;
  }
  for (double& v : w) v /= total;
  return ProbabilityVector::from(n, std::move(w));
}

std::vector<SuiteResult> run_suites(int n, std::uint64_t seed) {
  std::vector<SuiteResult> out;

  SuiteResult sim{"simulator_vs_dense_unitary", 0.0, 1e-10};
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto params = random_params(n, derive_seed(seed, {1, t}));
    const auto p = build_distribution(params);
    const auto q = distribution(params);
    for (std::size_t x = 0; x < q.size(); ++x) sim.max_deviation = std::max(sim.max_deviation, std::abs(p.probs[x] - q[x]));
  }
  out.push_back(sim);

  SuiteResult shift{"prob_gradient_vs_finite_difference", 0.0, 1e-6};
  for (std::uint64_t t = 0; t < 5; ++t) {
    auto params = random_params(n, derive_seed(seed, {2, t}));
    for (std::size_t k : params.trainable_indices()) {
      const auto g = prob_gradient(params, params.index_at(k));
      const auto fd = prob_gradient_fd(params, k, 1e-5);
      for (std::size_t x = 0; x < g.size(); ++x) shift.max_deviation = std::max(shift.max_deviation, std::abs(g[x] - fd[x]));
    }
  }
  out.push_back(shift);

  SuiteResult iqp{"iqp_final_layer_is_iH", 0.0, 1e-12};
  const double h = std::numbers::pi / (2.0 * std::numbers::sqrt2);
  const Gate2 gate = final_layer_gate(h, 0.0, h);
  const Eigen::Matrix2cd iH = kI * hadamard();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) iqp.max_deviation = std::max(iqp.max_deviation, std::abs(gate[static_cast<std::size_t>(2 * r + c)] - iH(r, c)));
  }
  out.push_back(iqp);

  SuiteResult stein{"difference_stein_identity", 0.0, 1e-10};
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto pi = random_distribution(n, derive_seed(seed, {3, t}));
    Rng rng(derive_seed(seed, {4, t}));
    std::vector<C> phi(pi.dim());
    for (auto& v : phi) v = C(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    stein.max_deviation = std::max(stein.max_deviation, stein_identity_residual(pi, phi));
  }
  out.push_back(stein);

  const auto params = random_params(n, derive_seed(seed, {5}));
  const auto pi = random_distribution(n, derive_seed(seed, {6}));
  const Kernel gauss(KernelSpec::gaussian(), n);
  SuiteResult mmd{"mmd_gradient_vs_finite_difference", 0.0, 1e-6};
  SuiteResult sg{"stein_gradient_vs_finite_difference", 0.0, 1e-6};
  SuiteResult sk{"sinkhorn_gradient_vs_finite_difference", 0.0, 1e-4};
  const ExactScore score(pi);
  SinkhornOptions opts;
  opts.epsilon = 0.1;
  const auto mmd_of = [&](const CircuitParams& q) { return mmd_exact(build_distribution(q), pi, gauss); };
  const auto stein_of = [&](const CircuitParams& q) { return stein_cost_exact(build_distribution(q), score, gauss); };
  const auto sink_of = [&](const CircuitParams& q) { return sinkhorn_divergence(build_distribution(q), pi, opts).value; };
  for (std::size_t k : params.trainable_indices()) {
    const auto idx = params.index_at(k);
    mmd.max_deviation = std::max(mmd.max_deviation, std::abs(mmd_gradient_exact(params, idx, pi, gauss) - central_difference(mmd_of, params, k, 1e-5)));
    sg.max_deviation = std::max(sg.max_deviation, std::abs(stein_gradient_exact(params, idx, score, gauss) - central_difference(stein_of, params, k, 1e-5)));
    sk.max_deviation = std::max(sk.max_deviation, std::abs(sinkhorn_gradient_exact(params, idx, pi, opts) - central_difference(sink_of, params, k, 1e-4)));
  }
  out.push_back(mmd);
  out.push_back(sg);
  out.push_back(sk);

  SuiteResult ot{"exact_ot_vs_vertex_enumeration", 0.0, 1e-10};
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t side = std::min<std::size_t>(dim, 4);
  for (std::uint64_t t = 0; t < 10; ++t) {
    Rng rng(derive_seed(seed, {7, t}));
    auto pick = [&](std::uint64_t stream) {
      std::vector<Bits> all(dim);
      std::iota(all.begin(), all.end(), Bits{0});
      Rng r(derive_seed(seed, {8, t, stream}));
      for (std::size_t i = 0; i + 1 < all.size(); ++i) std::swap(all[i], all[i + r.below(all.size() - i)]);
      all.resize(side);
      std::sort(all.begin(), all.end());
      WeightedSupport ws{n, all, {}};
      double total = 0.0;
      for (std::size_t i = 0; i < side; ++i) {
        ws.weights.push_back(0.05 + rng.uniform());
        total += ws.weights.back();
      }
      for (double& w : ws.weights) w /= total;
      return ws;
    };
    const auto a = pick(0);
    const auto b = pick(1);
    const Eigen::MatrixXd Cm = cost_matrix(a.points, b.points);
    ot.max_deviation = std::max(ot.max_deviation, std::abs(exact_ot(a, b, Cm) - transport_by_vertices(a.weights, b.weights, Cm)));
  }
  out.push_back(ot);
  return out;
}

}  // namespace bornforge::oracle
