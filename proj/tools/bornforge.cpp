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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bornforge/compile.hpp"
#include "bornforge/config.hpp"
#include "bornforge/data.hpp"
#include "bornforge/errors.hpp"
#include "bornforge/metrics.hpp"
#include "bornforge/oracle.hpp"
#include "bornforge/parallel.hpp"
#include "bornforge/rng.hpp"
#include "bornforge/train.hpp"

namespace bf = bornforge;

namespace {

enum ExitCode : int {
  kOk = 0,
  kChecksFailed = 1,
  kUsage = 2,
  kConfig = 3,
  kCapacity = 4,
  kIo = 5,
  kNumerical = 6,
  kScore = 7,
  kInternal = 10,
};

struct RunFlags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> epochs;
  std::optional<std::string> cost;
  std::optional<std::string> kernel;
  std::optional<std::string> score;
  std::optional<double> epsilon;
  std::optional<int> n;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config, "JSON run configuration");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--threads", f.threads, "worker threads")->envname("BORNFORGE_THREADS");
  app->add_option("--epochs", f.epochs, "training epochs");
  app->add_option("--cost", f.cost, "cost function")->check(CLI::IsMember({"mmd", "stein", "sinkhorn"}));
  app->add_option("--kernel", f.kernel, "base kernel")->check(CLI::IsMember({"gaussian", "hamming", "quantum"}));
  app->add_option("--score", f.score, "Stein score method")->check(CLI::IsMember({"exact", "identity", "spectral"}));
  app->add_option("--epsilon", f.epsilon, "Sinkhorn regularization");
  app->add_option("--n", f.n, "qubit count");
}

bf::RunConfig resolve(const std::string& command, const RunFlags& f) {
  bf::Json j = bf::Json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw bf::IoError("cannot open config '" + f.config + "'");
    try {
      j = bf::Json::parse(in);
    } catch (const bf::Json::exception& e) {
      throw bf::ConfigError(f.config, std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw bf::ConfigError(f.config, "top level must be an object");
  }
  j["command"] = command;
  if (f.n) j["n"] = *f.n;
  if (f.seed) j["seed"] = *f.seed;
  j["threads"] = f.threads.value_or(j.value("threads", bf::default_thread_count()));
  if (f.out) j["out"] = *f.out;
  if (f.epochs) j["training"]["epochs"] = *f.epochs;
  if (f.cost) j["cost"]["kind"] = *f.cost;
  if (f.score) j["cost"]["score"] = *f.score;
  if (f.epsilon) j["cost"]["epsilon"] = *f.epsilon;
  if (f.kernel) {
    auto& k = j["cost"]["kernel"];
    if (k.is_object()) {
      k["kind"] = *f.kernel;
    } else {
      k = *f.kernel;
    }
  }
  return bf::config_from_json(j);
}

void print_summary(const bf::TrainingRecord& rec, const std::string& out) {
  const auto& first = rec.epochs.front();
  const auto& last = rec.epochs.back();
  std::printf("epochs %d  tv %.6f -> %.6f  cost_train %.6g -> %.6g\n", last.epoch, first.tv, last.tv,
              first.cost_train, last.cost_train);
  std::printf("wrote %s\n", out.c_str());
}

int cmd_train(const RunFlags& f) {
  const auto cfg = resolve("train", f);
  const auto problem = bf::make_problem(cfg);
  const auto rec = bf::train_problem(cfg, problem);
  bf::write_run_artifacts(cfg.out, rec);
  bf::write_dataset((std::filesystem::path(cfg.out) / "dataset.txt").string(), problem.dataset);
  print_summary(rec, cfg.out);
  return kOk;
}

int cmd_compile(const RunFlags& f) {
  const auto cfg = resolve("compile", f);
  const auto report = bf::compile_run(bf::make_compile_job(cfg));
  bf::write_compile_artifacts(cfg.out, report);
  std::fputs(report.table().c_str(), stdout);
  std::printf("wrote %s\n", cfg.out.c_str());
  return kOk;
}

int cmd_bench(int n, int pairs, std::uint64_t seed, double epsilon, const std::string& kernel) {
  bf::check_qubit_count(n);
  if (n > 6) throw bf::CapacityError("bench supports n <= 6 (exact transport on 2^n points)");
  if (pairs < 1) throw bf::UsageError("--pairs must be positive");
  bf::KernelSpec spec = kernel == "hamming" ? bf::KernelSpec::hamming()
                        : kernel == "quantum" ? bf::KernelSpec::quantum_exact()
                                              : bf::KernelSpec::gaussian();
  struct Tally {
    int applicable = 0;
    int held = 0;
    double worst = -1e300;  // max of lhs - rhs
  };
  std::vector<std::string> order;
  std::map<std::string, Tally> tally;
  for (int t = 0; t < pairs; ++t) {
    const auto ut = static_cast<std::uint64_t>(t);
    const auto p = bf::oracle::random_distribution(n, bf::derive_seed(seed, {ut, 0}));
    const auto q = bf::oracle::random_distribution(n, bf::derive_seed(seed, {ut, 1}));
    const auto report = bf::bound_harness(p, q, spec, epsilon);
    for (const auto& c : report.bound_checks) {
      if (!tally.count(c.name)) order.push_back(c.name);
      auto& s = tally[c.name];
      if (!c.applicable) continue;
      ++s.applicable;
      s.held += c.holds ? 1 : 0;
      s.worst = std::max(s.worst, c.lhs - c.rhs);
    }
  }
  bool ok = true;
  std::printf("bench n=%d pairs=%d seed=%llu epsilon=%g kernel=%s\n", n, pairs,
              static_cast<unsigned long long>(seed), epsilon, spec.name().c_str());
  for (const auto& name : order) {
    const auto& s = tally[name];
    if (s.applicable == 0) {
      std::printf("  %-24s n/a\n", name.c_str());
      continue;
    }
    ok = ok && s.held == s.applicable;
    std::printf("  %-24s %d/%d hold  max(lhs-rhs) %.3e\n", name.c_str(), s.held, s.applicable, s.worst);
  }
  std::printf("%s\n", ok ? "all applicable bounds hold" : "bound violations found");
  return ok ? kOk : kChecksFailed;
}

int cmd_oracle(int n, std::uint64_t seed) {
  bf::check_qubit_count(n);
  if (n > 8) throw bf::CapacityError("oracle suites use dense 2^n x 2^n matrices; n <= 8");
  bool ok = true;
  for (const auto& r : bf::oracle::run_suites(n, seed)) {
    ok = ok && r.pass();
    std::printf("%-40s max deviation %.3e  tol %.0e  %s\n", r.name.c_str(), r.max_deviation, r.tolerance,
                r.pass() ? "PASS" : "FAIL");
  }
  return ok ? kOk : kChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ising Born machine trainer"};
  app.set_version_flag("--version", bf::version_string());
  app.require_subcommand(1);

  RunFlags train_flags;
  RunFlags compile_flags;
  auto* train = app.add_subcommand("train", "train a circuit on a dataset");
  add_run_flags(train, train_flags);
  auto* compile = app.add_subcommand("compile", "fit a QAOA circuit to an IQP target");
  add_run_flags(compile, compile_flags);

  int bench_n = 2;
  int bench_pairs = 100;
  std::uint64_t bench_seed = 0;
  double bench_eps = 0.1;
  std::string bench_kernel = "gaussian";
  auto* bench = app.add_subcommand("bench", "check metric inequalities on random pairs");
  bench->add_option("--n", bench_n, "qubit count");
  bench->add_option("--pairs", bench_pairs, "number of random pairs");
  bench->add_option("--seed", bench_seed, "seed");
  bench->add_option("--epsilon", bench_eps, "Sinkhorn regularization");
  bench->add_option("--kernel", bench_kernel, "MMD kernel")->check(CLI::IsMember({"gaussian", "hamming", "quantum"}));

  int oracle_n = 3;
  std::uint64_t oracle_seed = 0;
  auto* oracle = app.add_subcommand("oracle-check", "compare against dense and finite-difference oracles");
  oracle->add_option("--n", oracle_n, "qubit count");
  oracle->add_option("--seed", oracle_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(train_flags);
    if (*compile) return cmd_compile(compile_flags);
    if (*bench) return cmd_bench(bench_n, bench_pairs, bench_seed, bench_eps, bench_kernel);
    if (*oracle) return cmd_oracle(oracle_n, oracle_seed);
  } catch (const bf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const bf::CapacityError& e) {
    std::fprintf(stderr, "capacity error: %s\n", e.what());
    return kCapacity;
  } catch (const bf::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  } catch (const bf::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  } catch (const bf::ScoreUndefinedError& e) {
    std::fprintf(stderr, "score undefined: %s\n", e.what());
    return kScore;
  } catch (const bf::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const bf::ShapeError& e) {
    std::fprintf(stderr, "shape error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
  return kUsage;
}
