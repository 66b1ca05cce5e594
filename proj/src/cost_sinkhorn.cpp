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

#include "bornforge/cost_sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"

namespace bornforge {

Eigen::MatrixXd cost_matrix(const std::vector<Bits>& X, const std::vector<Bits>& Y) {
  if (X.empty() || Y.empty()) throw UsageError("cost matrix needs nonempty supports");
  Eigen::MatrixXd C(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(Y.size()));
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t j = 0; j < Y.size(); ++j) {
      C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hamming_distance(X[i], Y[j]);
    }
  }
  return C;
}

int effective_max_iters(const SinkhornOptions& opts) {
  if (opts.epsilon >= 0.1) return opts.max_iters;
  const double factor = std::ceil(0.1 / opts.epsilon);
  return static_cast<int>(std::min(1e8, opts.max_iters * factor));
}

namespace {

double lse(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

/// out_i = -eps LSE_k(logw_k + (pot_k - C_ik)/eps), C given row-wise.
void c_transform(const Eigen::MatrixXd& C, const Eigen::VectorXd& logw, const Eigen::VectorXd& pot,
                 double eps, Eigen::VectorXd& out) {
  const Eigen::Index rows = C.rows();
  out.resize(rows);
  Eigen::VectorXd tmp(C.cols());
  for (Eigen::Index i = 0; i < rows; ++i) {
    tmp = logw + (pot - C.row(i).transpose()) / eps;
    out(i) = -eps * lse(tmp);
  }
}

Eigen::VectorXd log_weights(const WeightedSupport& w) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!(w.weights[k] > 0.0)) throw UsageError("support weights must be positive");
    out(static_cast<Eigen::Index>(k)) = std::log(w.weights[k]);
  }
  return out;
}

std::vector<double> epsilon_schedule(double target, double diameter, bool scaling) {
  std::vector<double> eps;
  if (scaling) {
    for (double e = std::max(diameter, target); e > target; e *= 0.5) eps.push_back(e);
  }
  eps.push_back(target);
  return eps;
}

struct Budget {
  int used = 0;
};

/// Alternating updates; returns true when the max change drops below tol.
bool run_pair(const Eigen::MatrixXd& C, const Eigen::MatrixXd& Ct, const Eigen::VectorXd& logp,
              const Eigen::VectorXd& logq, double eps, double tol, int max_iters,
              Eigen::VectorXd& f, Eigen::VectorXd& g, Budget& budget) {
  Eigen::VectorXd f_new, g_new;
  for (int it = 0; it < max_iters; ++it) {
    c_transform(C, logq, g, eps, f_new);
    c_transform(Ct, logp, f_new, eps, g_new);
    const double change = std::max((f_new - f).cwiseAbs().maxCoeff(), (g_new - g).cwiseAbs().maxCoeff());
    f.swap(f_new);
    g.swap(g_new);
    ++budget.used;
    if (!f.allFinite() || !g.allFinite()) throw NumericalError("Sinkhorn potentials overflowed");
    if (change < tol) return true;
  }
  return false;
}

/// Averaged self-transport update s <- (s + T(s)) / 2.
bool run_self(const Eigen::MatrixXd& C, const Eigen::VectorXd& logw, double eps, double tol,
              int max_iters, Eigen::VectorXd& s, Budget& budget) {
  Eigen::VectorXd ts;
  for (int it = 0; it < max_iters; ++it) {
    c_transform(C, logw, s, eps, ts);
    const Eigen::VectorXd next = 0.5 * (s + ts);
    const double change = (next - s).cwiseAbs().maxCoeff();
    s = next;
    ++budget.used;
    if (!s.allFinite()) throw NumericalError("Sinkhorn potentials overflowed");
    if (change < tol) return true;
  }
  return false;
}

constexpr int kNewtonIters = 30;
constexpr Eigen::Index kNewtonMaxPoints = 2048;

/// Newton ascent on the semi-dual D(g) = <p, f(g)> + <q, g>, f = c-transform
/// of g, with backtracking. Returns true once the step drops below tol.
bool newton_pair(const Eigen::MatrixXd& C, const Eigen::VectorXd& logp,
                 const Eigen::VectorXd& logq, double eps, double tol, Eigen::VectorXd& f,
                 Eigen::VectorXd& g, Budget& budget) {
  const Eigen::Index m = g.size();
  auto objective = [&](const Eigen::VectorXd& gv, Eigen::VectorXd& fv) {
    c_transform(C, logq, gv, eps, fv);
    return logp.array().exp().matrix().dot(fv) + logq.array().exp().matrix().dot(gv);
  };
  const Eigen::VectorXd p = logp.array().exp();
  const Eigen::VectorXd q = logq.array().exp();
  double value = objective(g, f);
  for (int it = 0; it < kNewtonIters; ++it) {
    ++budget.used;
    Eigen::MatrixXd U(C.rows(), m);
    for (Eigen::Index i = 0; i < C.rows(); ++i) {
      U.row(i) = (logp(i) + logq.array() + (f(i) + g.array() - C.row(i).transpose().array()) / eps)
                     .exp()
                     .transpose();
    }
    const Eigen::VectorXd col = U.colwise().sum().transpose();
    const Eigen::VectorXd grad = q - col;
    Eigen::MatrixXd A = Eigen::MatrixXd(col.asDiagonal()) - U.transpose() * p.cwiseInverse().asDiagonal() * U;
    A.array() += 1.0 / static_cast<double>(m);
    A.diagonal().array() += 1e-14 * col.maxCoeff();
    const Eigen::VectorXd step = A.ldlt().solve(eps * grad);
    if (!step.allFinite()) return false;
    double t = 1.0;
    Eigen::VectorXd g_try, f_try;
    for (; t > 1e-4; t *= 0.5) {
      g_try = g + t * step;
      const double v = objective(g_try, f_try);
      if (v >= value - 1e-15 * std::max(1.0, std::abs(value))) {
        value = v;
        break;
      }
    }
    if (t <= 1e-4) return false;
    g.swap(g_try);
    f.swap(f_try);
    if ((t * step).cwiseAbs().maxCoeff() < tol) return true;
  }
  return false;
}

constexpr int kStageIters = 500;
constexpr double kStageTol = 1e-6;

}  // namespace

Potentials sinkhorn_potentials(const WeightedSupport& p, const WeightedSupport& q,
                               const SinkhornOptions& opts) {
  if (!(opts.epsilon > 0.0)) throw UsageError("Sinkhorn epsilon must be positive");
  if (p.size() == 0 || q.size() == 0) throw UsageError("Sinkhorn needs nonempty supports");
  const Eigen::MatrixXd Cpq = cost_matrix(p.points, q.points);
  const Eigen::MatrixXd Cqp = Cpq.transpose();
  const Eigen::MatrixXd Cpp = cost_matrix(p.points, p.points);
  const Eigen::MatrixXd Cqq = cost_matrix(q.points, q.points);
  const Eigen::VectorXd logp = log_weights(p);
  const Eigen::VectorXd logq = log_weights(q);
  const double diameter = std::max({Cpq.maxCoeff(), Cpp.maxCoeff(), Cqq.maxCoeff()});

  Potentials pot;
  pot.f = Eigen::VectorXd::Zero(logp.size());
  pot.g = Eigen::VectorXd::Zero(logq.size());
  pot.s = Eigen::VectorXd::Zero(logp.size());
  pot.t = Eigen::VectorXd::Zero(logq.size());

  const int cap = effective_max_iters(opts);
  const auto schedule = epsilon_schedule(opts.epsilon, diameter, opts.epsilon_scaling);
  Budget budget;
  bool ok = true;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const bool last = k + 1 == schedule.size();
    const double eps = schedule[k];
    const double tol = last ? opts.tol : std::max(opts.tol, kStageTol);
    const int iters = last ? cap : kStageIters;
    bool a = run_pair(Cpq, Cqp, logp, logq, eps, tol, iters, pot.f, pot.g, budget);
    if (last && std::max(logp.size(), logq.size()) <= kNewtonMaxPoints) {
      a = newton_pair(Cpq, logp, logq, eps, tol, pot.f, pot.g, budget) || a;
    }
    const bool b = run_self(Cpp, logp, eps, tol, iters, pot.s, budget);
    const bool c = run_self(Cqq, logq, eps, tol, iters, pot.t, budget);
    if (last) ok = a && b && c;
  }
  pot.iterations_used = budget.used;
  pot.converged = ok;
  return pot;
}

double ot_epsilon(const WeightedSupport& p, const WeightedSupport& q, const SinkhornOptions& opts) {
  const auto pot = sinkhorn_potentials(p, q, opts);
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) v += p.weights[i] * pot.f(static_cast<Eigen::Index>(i));
  for (std::size_t j = 0; j < q.size(); ++j) v += q.weights[j] * pot.g(static_cast<Eigen::Index>(j));
  return v;
}

SinkhornResult sinkhorn_divergence(const WeightedSupport& p, const WeightedSupport& q,
                                   const SinkhornOptions& opts) {
  if (p.n != q.n) throw ShapeError("distributions live on different register widths");
  SinkhornResult r;
  r.potentials = sinkhorn_potentials(p, q, opts);
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    v += p.weights[i] * (r.potentials.f(k) - r.potentials.s(k));
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    v += q.weights[j] * (r.potentials.g(k) - r.potentials.t(k));
  }
  r.value = v;
  r.converged = r.potentials.converged;
  return r;
}

SinkhornResult sinkhorn_divergence(const SampleSet& X, const SampleSet& Y,
                                   const SinkhornOptions& opts) {
  return sinkhorn_divergence(to_weighted_support(X), to_weighted_support(Y), opts);
}

SinkhornResult sinkhorn_divergence(const ProbabilityVector& p, const ProbabilityVector& q,
                                   const SinkhornOptions& opts) {
  return sinkhorn_divergence(to_weighted_support(p), to_weighted_support(q), opts);
}

double exact_ot(const WeightedSupport& p, const WeightedSupport& q, const Eigen::MatrixXd& C) {
  const auto a = static_cast<int>(p.size());
  const auto b = static_cast<int>(q.size());
  if (a > 64 || b > 64) throw CapacityError("exact OT oracle is limited to 64 points per side");
  if (C.rows() != a || C.cols() != b) throw ShapeError("cost matrix does not match supports");

  struct Edge {
    int to;
    double cap;
    double cost;
  };
  const int source = 0;
  const int sink = a + b + 1;
  const int nodes = a + b + 2;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
  auto add = [&](int u, int v, double cap, double cost) {
    adj[static_cast<std::size_t>(u)].push_back(static_cast<int>(edges.size()));
    edges.push_back({v, cap, cost});
    adj[static_cast<std::size_t>(v)].push_back(static_cast<int>(edges.size()));
    edges.push_back({u, 0.0, -cost});
  };
  for (int i = 0; i < a; ++i) add(source, 1 + i, p.weights[static_cast<std::size_t>(i)], 0.0);
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) add(1 + i, 1 + a + j, 2.0, C(i, j));
  }
  for (int j = 0; j < b; ++j) add(1 + a + j, sink, q.weights[static_cast<std::size_t>(j)], 0.0);

  constexpr double kEps = 1e-15;
  const double inf = std::numeric_limits<double>::infinity();
  double flow = 0.0;
  double total = 0.0;
  std::vector<double> dist(static_cast<std::size_t>(nodes));
  std::vector<int> via(static_cast<std::size_t>(nodes));
  for (;;) {
    // Bellman-Ford shortest path on the residual graph.
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(via.begin(), via.end(), -1);
    dist[source] = 0.0;
    for (int round = 0; round < nodes; ++round) {
      bool changed = false;
      for (int u = 0; u < nodes; ++u) {
        if (dist[static_cast<std::size_t>(u)] == inf) continue;
        for (int e : adj[static_cast<std::size_t>(u)]) {
          const Edge& ed = edges[static_cast<std::size_t>(e)];
          if (ed.cap <= kEps) continue;
          const double nd = dist[static_cast<std::size_t>(u)] + ed.cost;
          if (nd < dist[static_cast<std::size_t>(ed.to)] - 1e-12) {
            dist[static_cast<std::size_t>(ed.to)] = nd;
            via[static_cast<std::size_t>(ed.to)] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == inf) break;
    double push = inf;
    for (int v = sink; v != source;) {
      const int e = via[static_cast<std::size_t>(v)];
      push = std::min(push, edges[static_cast<std::size_t>(e)].cap);
      v = edges[static_cast<std::size_t>(e ^ 1)].to;
    }
    for (int v = sink; v != source;) {
      const int e = via[static_cast<std::size_t>(v)];
      edges[static_cast<std::size_t>(e)].cap -= push;
      edges[static_cast<std::size_t>(e ^ 1)].cap += push;
      v = edges[static_cast<std::size_t>(e ^ 1)].to;
    }
    flow += push;
    total += push * dist[sink];
  }
  if (std::abs(flow - 1.0) > 1e-9) throw NumericalError("exact OT did not route all mass");
  return total;
}

double exact_ot(const WeightedSupport& p, const WeightedSupport& q) {
  return exact_ot(p, q, cost_matrix(p.points, q.points));
}

double sinkhorn_phi(Bits x, const WeightedSupport& p, const WeightedSupport& q,
                    const Potentials& pot, double epsilon) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(q.size()));
  for (std::size_t k = 0; k < q.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    a(i) = std::log(q.weights[k]) + (pot.g(i) - hamming_distance(x, q.points[k])) / epsilon;
  }
  Eigen::VectorXd b(static_cast<Eigen::Index>(p.size()));
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    b(i) = std::log(p.weights[k]) + (pot.s(i) - hamming_distance(x, p.points[k])) / epsilon;
  }
  return -epsilon * lse(a) + epsilon * lse(b);
}

CostEvaluation SinkhornCost::evaluate_support(const WeightedSupport& p,
                                              const WeightedSupport& q) const {
  auto r = std::make_shared<SinkhornResult>(sinkhorn_divergence(p, q, opts_));
  auto P = std::make_shared<WeightedSupport>(p);
  auto Q = std::make_shared<WeightedSupport>(q);
  const double eps = opts_.epsilon;
  CostEvaluation eval;
  eval.cost.value = r->value;
  eval.cost.converged = r->converged;
  eval.witness = memoize([r, P, Q, eps](Bits x) { return sinkhorn_phi(x, *P, *Q, r->potentials, eps); });
  return eval;
}

CostEvaluation SinkhornCost::evaluate(const SampleSet& model, const SampleSet& data) const {
  auto eval = evaluate_support(to_weighted_support(model), to_weighted_support(data));
  eval.cost.n_model_samples = model.size();
  eval.cost.n_data_samples = data.size();
  return eval;
}

CostEvaluation SinkhornCost::evaluate_exact(const ProbabilityVector& p,
                                            const ProbabilityVector& pi) const {
  return evaluate_support(to_weighted_support(p), to_weighted_support(pi));
}

double sinkhorn_gradient(const CircuitParams& params, const ParamIndex& idx, const SampleSet& X,
                         const SampleSet& Y, const SinkhornOptions& opts, std::size_t shots,
                         std::uint64_t seed) {
  const auto up = sample(build_distribution(shifted_params(params, idx, +1)), shots,
                         derive_seed(seed, {1}));
  const auto down = sample(build_distribution(shifted_params(params, idx, -1)), shots,
                           derive_seed(seed, {2}));
  return shift_gradient(SinkhornCost(opts).evaluate(X, Y), up, down);
}

double sinkhorn_gradient_exact(const CircuitParams& params, const ParamIndex& idx,
                               const ProbabilityVector& pi, const SinkhornOptions& opts) {
  const auto eval = SinkhornCost(opts).evaluate_exact(build_distribution(params), pi);
  return exact_shift_gradient(eval, prob_gradient(params, idx));
}

}  // namespace bornforge
