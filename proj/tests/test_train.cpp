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
#include <sstream>

#include "bornforge/cost_sinkhorn.hpp"
#include "bornforge/errors.hpp"
#include "bornforge/metrics.hpp"
#include "bornforge/oracle.hpp"
#include "bornforge/train.hpp"

using namespace bornforge;

namespace {

RunConfig small_config(int n, const std::string& cost, std::uint64_t seed) {
  RunConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.cost.kind = cost;
  cfg.data.num_modes = 1;
  cfg.training.epochs = 5;
  cfg.cost.eigenvectors = default_eigenvectors(n);
  materialize(cfg);
  validate(cfg);
  return cfg;
}

}  // namespace

TEST(Adam, ZeroGradientGivesZeroDelta) {
  auto st = adam_init(3, OptimizerConfig{});
  for (int i = 0; i < 5; ++i) {
    for (double d : adam_step(st, {0.0, 0.0, 0.0})) EXPECT_EQ(d, 0.0);
  }
  EXPECT_EQ(st.t, 5);
}

TEST(Adam, ConstantGradientStepsAtLearningRate) {
  OptimizerConfig opt;
  opt.learning_rate = 0.01;
  auto st = adam_init(2, opt);
  std::vector<double> delta;
  for (int i = 0; i < 2000; ++i) delta = adam_step(st, {3.0, -0.2});
  EXPECT_NEAR(delta[0], 0.01, 1e-8);
  EXPECT_NEAR(delta[1], -0.01, 1e-7);
}

TEST(Adam, FirstStepMatchesClosedForm) {
  OptimizerConfig opt;
  auto st = adam_init(1, opt);
  const double g = 0.37;
  // m_hat = g and v_hat = g^2 after bias correction.
  EXPECT_NEAR(adam_step(st, {g})[0], opt.learning_rate * g / (std::abs(g) + opt.eps), 1e-15);
}

TEST(Adam, ShapeMismatch) {
  auto st = adam_init(2, OptimizerConfig{});
  EXPECT_THROW(adam_step(st, {1.0}), ShapeError);
}

TEST(Training, ZeroEpochsRecordsInitialEvaluationOnly) {
  auto cfg = small_config(2, "mmd", 1);
  cfg.training.epochs = 0;
  const auto rec = run_training(cfg);
  ASSERT_EQ(rec.epochs.size(), 1u);
  EXPECT_EQ(rec.epochs[0].epoch, 0);
  EXPECT_TRUE(rec.epochs[0].gradient.empty());
  EXPECT_EQ(rec.final_params, rec.initial);
}

TEST(Training, DeterministicGivenSeeds) {
  for (const std::string cost : {"mmd", "stein", "sinkhorn"}) {
    auto cfg = small_config(3, cost, 4);
    cfg.threads = 3;
    const auto a = run_training(cfg);
    cfg.threads = 1;
    const auto b = run_training(cfg);
    ASSERT_EQ(a.epochs.size(), b.epochs.size());
    for (std::size_t e = 0; e < a.epochs.size(); ++e) {
      EXPECT_EQ(a.epochs[e].param_hash, b.epochs[e].param_hash) << cost;
      EXPECT_EQ(a.epochs[e].cost_train, b.epochs[e].cost_train) << cost;
      EXPECT_EQ(a.epochs[e].tv, b.epochs[e].tv) << cost;
    }
    EXPECT_EQ(a.trace_csv(), b.trace_csv());
    auto ja = a.to_json(), jb = b.to_json();
    ja["config"].erase("threads");
    jb["config"].erase("threads");
    EXPECT_EQ(ja.dump(), jb.dump());
  }
}

TEST(Training, EpochsContiguousAndTvMatchesParams) {
  auto cfg = small_config(2, "mmd", 6);
  const auto rec = run_training(cfg);
  ASSERT_EQ(rec.epochs.size(), 6u);
  for (std::size_t e = 0; e < rec.epochs.size(); ++e) {
    EXPECT_EQ(rec.epochs[e].epoch, static_cast<int>(e));
    CircuitParams p = rec.initial;
    for (std::size_t k = 0; k < p.size(); ++k) p.set(k, rec.epochs[e].params[k]);
    EXPECT_DOUBLE_EQ(rec.epochs[e].tv, tv_distance(build_distribution(p), rec.target));
    EXPECT_EQ(rec.epochs[e].param_hash, p.hash());
  }
}

TEST(Training, SinkhornImprovesTvOnTwoQubits) {
  auto cfg = small_config(2, "sinkhorn", 2);
  cfg.cost.sinkhorn.epsilon = 0.1;
  cfg.training.epochs = 50;
  const auto rec = run_training(cfg);
  EXPECT_LT(rec.epochs.back().tv, rec.epochs.front().tv);
}

TEST(Training, ExactMmdDecreasesOverEveryWindow) {
  auto cfg = small_config(2, "mmd", 3);
  cfg.training.expectation = "exact";
  cfg.training.epochs = 60;
  cfg.optimizer.learning_rate = 0.01;
  const auto rec = run_training(cfg);
  for (std::size_t e = 0; e + 10 < rec.epochs.size(); ++e) EXPECT_LT(rec.epochs[e + 10].cost_train, rec.epochs[e].cost_train) << "epoch " << e;
}

TEST(Training, FirstExactGradientMatchesFiniteDifference) {
  for (const std::string cost : {"mmd", "stein", "sinkhorn"}) {
    for (int n : {2, 3}) {
      auto cfg = small_config(n, cost, 8);
      cfg.training.expectation = "exact";
      cfg.training.epochs = 1;
      cfg.cost.sinkhorn.epsilon = 0.5;
      const auto problem = make_problem(cfg);
      const auto rec = train_problem(cfg, problem);
      const auto fn = make_cost(cfg, problem.target);
      const auto f = [&](const CircuitParams& q) { return fn->evaluate_exact(build_distribution(q), problem.target).cost.value; };
      const auto trainable = problem.init.trainable_indices();
      ASSERT_EQ(rec.epochs[0].gradient.size(), trainable.size());
      for (std::size_t slot = 0; slot < trainable.size(); ++slot) {
        EXPECT_NEAR(rec.epochs[0].gradient[slot], oracle::central_difference(f, problem.init, trainable[slot], 1e-5), 1e-5)
            << cost << " n=" << n << " slot " << slot;
      }
    }
  }
}

TEST(Training, SnappingKeepsOddLattice) {
  auto cfg = small_config(3, "mmd", 5);
  cfg.model.init_family = "odd_multiple";
  cfg.training.snap = true;
  cfg.optimizer.learning_rate = 0.5;
  cfg.training.epochs = 8;
  validate(cfg);
  const auto rec = run_training(cfg);
  const auto trainable = rec.initial.trainable_indices();
  bool moved = false;
  for (const auto& row : rec.epochs) {
    for (std::size_t k : trainable) {
      EXPECT_TRUE(on_odd_lattice(row.params[k], 1)) << row.params[k];
      moved = moved || row.params[k] != rec.initial.value(k);
    }
  }
  EXPECT_TRUE(moved);
}

TEST(Training, FrozenEntriesNeverMove) {
  auto cfg = small_config(3, "mmd", 9);
  cfg.model.couplings = "edges";
  cfg.model.edges = {{0, 1}};
  validate(cfg);
  const auto rec = run_training(cfg);
  const auto init = rec.initial;
  EXPECT_EQ(init.trainable_indices().size(), 4u);
  for (std::size_t k = 0; k < init.size(); ++k) {
    if (!init.trainable(k)) EXPECT_EQ(rec.final_params.value(k), init.value(k));
  }
  EXPECT_EQ(rec.final_params.J()(0, 2), 0.0);
}

TEST(Training, TraceCsvFormat) {
  auto cfg = small_config(2, "mmd", 1);
  cfg.training.epochs = 2;
  const auto rec = run_training(cfg);
  std::istringstream in(rec.trace_csv());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epoch,cost_train,cost_test,tv");
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string epoch, a, b, c;
    std::getline(fields, epoch, ',');
    std::getline(fields, a, ',');
    std::getline(fields, b, ',');
    std::getline(fields, c, ',');
    EXPECT_EQ(std::stoi(epoch), rows);
    EXPECT_EQ(std::stod(c), rec.epochs[static_cast<std::size_t>(rows)].tv);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Training, RecordJsonCarriesConfigAndEpochs) {
  auto cfg = small_config(2, "stein", 1);
  cfg.training.epochs = 1;
  const auto j = run_training(cfg).to_json();
  EXPECT_EQ(j.at("epochs").size(), 2u);
  EXPECT_EQ(j.at("config").at("cost").at("kind"), "stein");
  EXPECT_EQ(j.at("seed"), 1u);
  EXPECT_EQ(j.at("target_probs").size(), 4u);
  EXPECT_EQ(j.at("epochs")[0].at("param_hash").get<std::string>().size(), 16u);
}
