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

#include "bornforge/cost_stein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"

namespace bornforge {

Bits flip(Bits x, int i, int n) {
  if (i < 0 || i >= n) throw UsageError("flip index out of range");
  return toggle(x, i);
}

bool ExactScore::defined_at(Bits x) const { return x < pi_.dim() && pi_.probs[x] > 0.0; }

Eigen::VectorXd ExactScore::operator()(Bits x) const { return exact_score(pi_, x); }

Eigen::VectorXd exact_score(const ProbabilityVector& pi, Bits x) {
  if (x >= pi.dim()) throw ShapeError("bitstring wider than the register");
  const double px = pi.probs[x];
  if (!(px > 0.0)) {
    throw ScoreUndefinedError("score undefined at " + to_bitstring(x, pi.n) +
                              ": zero target probability");
  }
  Eigen::VectorXd s(pi.n);
  for (int i = 0; i < pi.n; ++i) s(i) = 1.0 - pi.probs[toggle(x, i)] / px;
  return s;
}

TabulatedScore::TabulatedScore(int n, std::vector<Bits> points, Eigen::MatrixXd rows,
                               std::string method)
    : n_(n), points_(std::move(points)), rows_(std::move(rows)), method_(std::move(method)) {
  if (rows_.rows() != static_cast<Eigen::Index>(points_.size()) || rows_.cols() != n_) {
    throw ShapeError("score table must be (#points) x n");
  }
  for (std::size_t k = 0; k < points_.size(); ++k) {
    row_of_.try_emplace(points_[k], static_cast<Eigen::Index>(k));
  }
}

Eigen::VectorXd TabulatedScore::operator()(Bits x) const {
  auto it = row_of_.find(x);
  if (it == row_of_.end()) {
    throw ScoreUndefinedError(method_ + " score is not defined off the sample points (" +
                              to_bitstring(x, n_) + ")");
  }
  return rows_.row(it->second).transpose();
}

namespace {

Eigen::MatrixXd gram_of(const std::vector<Bits>& pts, const Kernel& kernel) {
  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a; b < m; ++b) {
      K(a, b) = K(b, a) = kernel(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)]);
    }
  }
  return K;
}

/// D_ab = sum_i w_i [kappa(x_a, x_i) - kappa(x_a, flip(x_i, b))].
Eigen::MatrixXd shifted_kernel_moments(const std::vector<Bits>& pts, const Eigen::VectorXd& w,
                                       const Kernel& kernel, int n) {
  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index a = 0; a < m; ++a) {
    const Bits xa = pts[static_cast<std::size_t>(a)];
    for (Eigen::Index i = 0; i < m; ++i) {
      const Bits xi = pts[static_cast<std::size_t>(i)];
      const double k0 = kernel(xa, xi);
      for (int b = 0; b < n; ++b) D(a, b) += w(i) * (k0 - kernel(xa, toggle(xi, b)));
    }
  }
  return D;
}

Eigen::MatrixXd ridge_solve(Eigen::MatrixXd K, double eta, const Eigen::MatrixXd& rhs) {
  K.diagonal().array() += eta;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericalError("ridge system is singular");
  }
  Eigen::MatrixXd sol = ldlt.solve(rhs);
  if (!sol.allFinite()) throw NumericalError("ridge system is singular");
  return sol;
}

}  // namespace

std::unique_ptr<TabulatedScore> identity_score(const SampleSet& samples, const Kernel& kernel,
                                               double eta) {
  if (samples.size() < 2) throw UsageError("identity score needs at least two samples");
  if (!(eta > 0.0)) throw UsageError("identity score needs a positive ridge coefficient");
  const auto M = static_cast<double>(samples.size());
  const Eigen::VectorXd w =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(samples.size()), 1.0 / M);
  const Eigen::MatrixXd D = shifted_kernel_moments(samples.outcomes, w, kernel, samples.n);
  Eigen::MatrixXd G = M * ridge_solve(gram_of(samples.outcomes, kernel), eta, D);
  return std::make_unique<TabulatedScore>(samples.n, samples.outcomes, std::move(G), "identity");
}

std::unique_ptr<TabulatedScore> identity_score_weighted(const WeightedSupport& support,
                                                        const Kernel& kernel, double eta) {
  if (support.size() < 2) throw UsageError("identity score needs at least two points");
  if (!(eta > 0.0)) throw UsageError("identity score needs a positive ridge coefficient");
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
      support.weights.data(), static_cast<Eigen::Index>(support.weights.size()));
  const Eigen::MatrixXd D = shifted_kernel_moments(support.points, w, kernel, support.n);
  Eigen::MatrixXd G = ridge_solve(gram_of(support.points, kernel), eta, D);
  G = w.cwiseInverse().asDiagonal() * G;
  return std::make_unique<TabulatedScore>(support.n, support.points, std::move(G), "identity");
}

std::unique_ptr<SpectralScore> spectral_score(const SampleSet& samples, const Kernel& kernel,
                                              int J) {
  const auto M = samples.size();
  if (J < 1 || static_cast<std::size_t>(J) > M) {
    throw UsageError("spectral score needs 1 <= J <= M");
  }
  const auto dist = empirical(samples);
  std::unique_ptr<SpectralScore> s(new SpectralScore(kernel));
  s->n_ = samples.n;
  s->sqrt_m_ = std::sqrt(static_cast<double>(M));
  const auto U = static_cast<Eigen::Index>(dist.counts.size());
  s->counts_.resize(U);
  for (const auto& [x, c] : dist.counts) {
    s->counts_(static_cast<Eigen::Index>(s->points_.size())) = static_cast<double>(c);
    s->points_.push_back(x);
  }
  if (J > U) {
    throw NumericalError("spectral score: only " + std::to_string(U) +
                         " distinct samples, so eigenvalue " + std::to_string(J) + " is zero");
  }

  // The M x M Gram matrix over samples with repeats shares its nonzero
  // spectrum with C^{1/2} K_u C^{1/2} over the distinct points.
  const Eigen::VectorXd root = s->counts_.cwiseSqrt();
  const Eigen::MatrixXd A = root.asDiagonal() * gram_of(s->points_, kernel) * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(U));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::VectorXd& ev = eig.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&ev](Eigen::Index a, Eigen::Index b) { return ev(a) > ev(b); });

  const double top = ev(order[0]);
  s->lambda_.resize(J);
  s->coef_.resize(J, U);
  for (int j = 0; j < J; ++j) {
    const Eigen::Index col = order[static_cast<std::size_t>(j)];
    const double lam = ev(col);
    if (!(lam > 1e-12 * std::max(1.0, top))) {
      throw NumericalError("spectral score: eigenvalue " + std::to_string(j + 1) +
                           " is not positive");
    }
    Eigen::VectorXd b = eig.eigenvectors().col(col);
    for (Eigen::Index k = 0; k < U; ++k) {
      if (std::abs(b(k)) > 1e-12) {
        if (b(k) < 0) b = -b;
        break;
      }
    }
    s->lambda_(j) = lam;
    // u on sample m equals b_k / sqrt(c_k); summing over repeats gives c_k u_k.
    s->coef_.row(j) = (b.array() * root.array()).matrix().transpose();
  }

  const double Md = static_cast<double>(M);
  s->beta_ = Eigen::MatrixXd::Zero(samples.n, J);
  for (Eigen::Index k = 0; k < U; ++k) {
    const Bits xk = s->points_[static_cast<std::size_t>(k)];
    const Eigen::VectorXd psi = s->eigenfunctions(xk);
    for (int i = 0; i < samples.n; ++i) {
      const Eigen::VectorXd psi_flip = s->eigenfunctions(toggle(xk, i));
      s->beta_.row(i) += (s->counts_(k) / Md) * (psi - psi_flip).transpose();
    }
  }
  return s;
}

Eigen::VectorXd SpectralScore::eigenfunctions(Bits x) const {
  const auto U = static_cast<Eigen::Index>(points_.size());
  Eigen::VectorXd kx(U);
  for (Eigen::Index k = 0; k < U; ++k) kx(k) = (*kernel_)(x, points_[static_cast<std::size_t>(k)]);
  return sqrt_m_ * (coef_ * kx).cwiseQuotient(lambda_);
}

Eigen::VectorXd SpectralScore::operator()(Bits x) const { return beta_ * eigenfunctions(x); }

namespace {

double stein_kernel_with(Bits x, Bits y, const Eigen::VectorXd& sx, const Eigen::VectorXd& sy,
                         const Kernel& k, int n) {
  const double kxy = k(x, y);
  double value = sx.dot(sy) * kxy;
  for (int i = 0; i < n; ++i) {
    const double k_xy_flip = k(x, toggle(y, i));
    const double k_flip_xy = k(toggle(x, i), y);
    const double k_flip_flip = k(toggle(x, i), toggle(y, i));
    value -= sx(i) * (kxy - k_xy_flip);
    value -= (kxy - k_flip_xy) * sy(i);
    value += kxy - k_xy_flip - k_flip_xy + k_flip_flip;
  }
  return value;
}

/// Distinct points, their weights, and scores where defined.
struct SteinSupport {
  std::vector<Bits> points;
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> scores;
  double defined_weight = 0.0;
};

SteinSupport stein_support(const WeightedSupport& P, const ScoreFunction& score,
                           UndefinedScorePolicy policy) {
  SteinSupport s;
  for (std::size_t k = 0; k < P.size(); ++k) {
    if (!score.defined_at(P.points[k])) {
      if (policy == UndefinedScorePolicy::kError) score(P.points[k]);  // throws
      continue;
    }
    s.points.push_back(P.points[k]);
    s.weights.push_back(P.weights[k]);
    s.scores.push_back(score(P.points[k]));
    s.defined_weight += P.weights[k];
  }
  return s;
}

double stein_value(const SteinSupport& s, const Kernel& k, int n) {
  if (s.points.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t a = 0; a < s.points.size(); ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < s.points.size(); ++b) {
      row += s.weights[b] * stein_kernel_with(s.points[a], s.points[b], s.scores[a], s.scores[b], k, n);
    }
    total += s.weights[a] * row;
  }
  return total / (s.defined_weight * s.defined_weight);
}

/// 2 sum_y p(y) kappa_pi(x, y) over the defined part of the support.
double stein_witness(Bits x, const SteinSupport& s, const ScoreFunction& score, const Kernel& k,
                     int n, UndefinedScorePolicy policy) {
  if (!score.defined_at(x)) {
    if (policy == UndefinedScorePolicy::kError) score(x);
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (s.points.empty()) return 0.0;
  const Eigen::VectorXd sx = score(x);
  double acc = 0.0;
  for (std::size_t b = 0; b < s.points.size(); ++b) {
    acc += s.weights[b] * stein_kernel_with(x, s.points[b], sx, s.scores[b], k, n);
  }
  return 2.0 * acc / s.defined_weight;
}

CostEvaluation stein_evaluation(const WeightedSupport& P, std::shared_ptr<const ScoreFunction> score,
                                std::shared_ptr<const Kernel> kernel, UndefinedScorePolicy policy) {
  auto support = std::make_shared<SteinSupport>(stein_support(P, *score, policy));
  const int n = P.n;
  CostEvaluation eval;
  eval.cost.value = stein_value(*support, *kernel, n);
  eval.witness = memoize([support, score, kernel, n, policy](Bits x) {
    return stein_witness(x, *support, *score, *kernel, n, policy);
  });
  return eval;
}

/// Non-owning shared_ptr for callers that guarantee the lifetime.
template <class T>
std::shared_ptr<const T> borrow(const T& ref) {
  return std::shared_ptr<const T>(&ref, [](const T*) {});
}

}  // namespace

double stein_kernel(Bits x, Bits y, const ScoreFunction& score, const Kernel& base) {
  return stein_kernel_with(x, y, score(x), score(y), base, base.n());
}

CostValue stein_cost(const SampleSet& X, const ScoreFunction& score, const Kernel& base,
                     UndefinedScorePolicy policy) {
  if (X.empty()) throw UsageError("stein cost needs at least one sample");
  const auto s = stein_support(to_weighted_support(X), score, policy);
  return {stein_value(s, base, X.n), X.size(), 0, true};
}

double stein_cost_exact(const ProbabilityVector& p, const ScoreFunction& score,
                        const Kernel& base) {
  const auto s = stein_support(to_weighted_support(p), score, UndefinedScorePolicy::kError);
  return stein_value(s, base, p.n);
}

double stein_gradient(const CircuitParams& params, const ParamIndex& idx, const SampleSet& X,
                      const ScoreFunction& score, const Kernel& base, std::size_t shots,
                      std::uint64_t seed, UndefinedScorePolicy policy) {
  const auto up = sample(build_distribution(shifted_params(params, idx, +1)), shots,
                         derive_seed(seed, {1}));
  const auto down = sample(build_distribution(shifted_params(params, idx, -1)), shots,
                           derive_seed(seed, {2}));
  const auto eval = stein_evaluation(to_weighted_support(X), borrow(score), borrow(base), policy);
  return shift_gradient(eval, up, down);
}

double stein_gradient_exact(const CircuitParams& params, const ParamIndex& idx,
                            const ScoreFunction& score, const Kernel& base) {
  const auto eval = stein_evaluation(to_weighted_support(build_distribution(params)),
                                     borrow(score), borrow(base), UndefinedScorePolicy::kError);
  return exact_shift_gradient(eval, prob_gradient(params, idx));
}

SteinCost::SteinCost(KernelSpec spec, int n, SteinOptions options, ProbabilityVector target)
    : kernel_(std::make_shared<Kernel>(std::move(spec), n)), options_(std::move(options)) {
  if (options_.score != "exact" && options_.score != "identity" && options_.score != "spectral") {
    throw UsageError("unknown score method '" + options_.score + "'");
  }
  if (target.n != n) throw ShapeError("target width does not match the model");
  exact_ = std::make_shared<ExactScore>(std::move(target));
}

std::shared_ptr<const ScoreFunction> SteinCost::score_for(const SampleSet& data) const {
  if (options_.score == "identity") return identity_score(data, *kernel_, options_.eta);
  if (options_.score == "spectral") {
    return spectral_score(data, *kernel_, options_.eigenvectors);
  }
  return exact_;
}

CostEvaluation SteinCost::evaluate(const SampleSet& model, const SampleSet& data) const {
  auto eval = stein_evaluation(to_weighted_support(model), score_for(data), kernel_,
                               options_.policy);
  eval.cost.n_model_samples = model.size();
  eval.cost.n_data_samples = data.size();
  return eval;
}

CostEvaluation SteinCost::evaluate_exact(const ProbabilityVector& p,
                                         const ProbabilityVector& pi) const {
  return stein_evaluation(to_weighted_support(p), std::make_shared<ExactScore>(pi), kernel_,
                          UndefinedScorePolicy::kError);
}

}  // namespace bornforge
