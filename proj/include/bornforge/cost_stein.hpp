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

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "bornforge/cost.hpp"
#include "bornforge/data.hpp"
#include "bornforge/kernels.hpp"
#include "bornforge/model.hpp"

namespace bornforge {

/// Toggles bit i. Throws UsageError when i is outside [0, n).
Bits flip(Bits x, int i, int n);

/// [f(x) - f(flip(x, i))]_i.
template <class F>
Eigen::VectorXd shift_difference(F&& f, Bits x, int n) {
  Eigen::VectorXd out(n);
  const auto fx = f(x);
  for (int i = 0; i < n; ++i) out(i) = fx - f(toggle(x, i));
  return out;
}

/// Difference score s(x)_i = 1 - pi(flip(x, i)) / pi(x), possibly estimated.
class ScoreFunction {
 public:
  virtual ~ScoreFunction() = default;
  virtual int n() const = 0;
  virtual std::string method() const = 0;
  virtual bool defined_at(Bits x) const = 0;
  /// Throws ScoreUndefinedError where the score does not exist.
  virtual Eigen::VectorXd operator()(Bits x) const = 0;
};

class ExactScore : public ScoreFunction {
 public:
  explicit ExactScore(ProbabilityVector pi) : pi_(std::move(pi)) {}
  int n() const override { return pi_.n; }
  std::string method() const override { return "exact"; }
  bool defined_at(Bits x) const override;
  Eigen::VectorXd operator()(Bits x) const override;

 private:
  ProbabilityVector pi_;
};

/// Score known only at a fixed set of points (rows of a table).
class TabulatedScore : public ScoreFunction {
 public:
  TabulatedScore(int n, std::vector<Bits> points, Eigen::MatrixXd rows, std::string method);
  int n() const override { return n_; }
  std::string method() const override { return method_; }
  bool defined_at(Bits x) const override { return row_of_.count(x) != 0; }
  Eigen::VectorXd operator()(Bits x) const override;
  const Eigen::MatrixXd& matrix() const { return rows_; }
  const std::vector<Bits>& points() const { return points_; }

 private:
  int n_;
  std::vector<Bits> points_;
  Eigen::MatrixXd rows_;
  std::unordered_map<Bits, Eigen::Index> row_of_;
  std::string method_;
};

/// Nystrom-based score, defined on all of {0,1}^n.
class SpectralScore : public ScoreFunction {
 public:
  int n() const override { return n_; }
  std::string method() const override { return "spectral"; }
  bool defined_at(Bits) const override { return true; }
  Eigen::VectorXd operator()(Bits x) const override;

  /// psi_hat_j(x) for j < J.
  Eigen::VectorXd eigenfunctions(Bits x) const;
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXd& beta() const { return beta_; }

 private:
  friend std::unique_ptr<SpectralScore> spectral_score(const SampleSet&, const Kernel&, int);
  SpectralScore(const Kernel& kernel) : kernel_(&kernel) {}

  const Kernel* kernel_;
  int n_ = 0;
  double sqrt_m_ = 0.0;
  std::vector<Bits> points_;
  Eigen::VectorXd counts_;
  Eigen::VectorXd lambda_;  // top-J eigenvalues of the M x M Gram matrix
  Eigen::MatrixXd coef_;    // J x U, counts-weighted eigenvector entries
  Eigen::MatrixXd beta_;    // n x J
};

Eigen::VectorXd exact_score(const ProbabilityVector& pi, Bits x);

/// Regression estimate over M samples: rows of M (K + eta I)^{-1} <Delta, K>,
/// one row per sample, n columns. Defined only at the sample points.
std::unique_ptr<TabulatedScore> identity_score(const SampleSet& samples, const Kernel& kernel,
                                               double eta);

/// Weighted form W^{-1} (K + eta I)^{-1} D over distinct points, with
/// D_ab = sum_i w_i [kappa(x_a, x_i) - kappa(x_a, flip(x_i, b))]. Uniform
/// weights over samples reduce to identity_score.
std::unique_ptr<TabulatedScore> identity_score_weighted(const WeightedSupport& support,
                                                        const Kernel& kernel, double eta);

/// Top-J Nystrom eigenfunctions of the sample Gram matrix. The kernel must
/// outlive the returned object. Throws UsageError when J > M or J < 1, and
/// NumericalError when one of the top-J eigenvalues is not positive.
std::unique_ptr<SpectralScore> spectral_score(const SampleSet& samples, const Kernel& kernel,
                                              int J);

/// Four-term Stein kernel built on the base kernel and the score.
double stein_kernel(Bits x, Bits y, const ScoreFunction& score, const Kernel& base);

enum class UndefinedScorePolicy : std::uint8_t { kError, kDropPair };

/// V-statistic over all ordered pairs of X (diagonal included).
CostValue stein_cost(const SampleSet& X, const ScoreFunction& score, const Kernel& base,
                     UndefinedScorePolicy policy = UndefinedScorePolicy::kError);

/// sum_{x,y} p(x) p(y) kappa_pi(x,y).
double stein_cost_exact(const ProbabilityVector& p, const ScoreFunction& score,
                        const Kernel& base);

/// Shifted samples in one slot, model samples X in the other.
double stein_gradient(const CircuitParams& params, const ParamIndex& idx, const SampleSet& X,
                      const ScoreFunction& score, const Kernel& base, std::size_t shots,
                      std::uint64_t seed,
                      UndefinedScorePolicy policy = UndefinedScorePolicy::kError);

double stein_gradient_exact(const CircuitParams& params, const ParamIndex& idx,
                            const ScoreFunction& score, const Kernel& base);

struct SteinOptions {
  std::string score = "exact";  // exact | identity | spectral
  double eta = 0.01;
  int eigenvectors = 3;
  UndefinedScorePolicy policy = UndefinedScorePolicy::kError;
};

/// Stein cost for training. The exact score comes from `target`; the
/// estimated scores are rebuilt from each data sample set handed to evaluate.
class SteinCost : public CostFunction {
 public:
  SteinCost(KernelSpec spec, int n, SteinOptions options, ProbabilityVector target);
  std::string name() const override { return "stein"; }
  CostEvaluation evaluate(const SampleSet& model, const SampleSet& data) const override;
  /// Uses the exact score of `pi` regardless of the configured method.
  CostEvaluation evaluate_exact(const ProbabilityVector& p,
                                const ProbabilityVector& pi) const override;

 private:
  std::shared_ptr<const ScoreFunction> score_for(const SampleSet& data) const;

  std::shared_ptr<Kernel> kernel_;
  SteinOptions options_;
  std::shared_ptr<const ScoreFunction> exact_;
};

}  // namespace bornforge
