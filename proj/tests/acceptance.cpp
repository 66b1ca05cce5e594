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

// Acceptance run: prints one "criterion K: PASS|FAIL" line per criterion,
// followed by indented detail lines. Exit status is nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bornforge/compile.hpp"
#include "bornforge/config.hpp"
#include "bornforge/cost_mmd.hpp"
#include "bornforge/cost_sinkhorn.hpp"
#include "bornforge/cost_stein.hpp"
#include "bornforge/metrics.hpp"
#include "bornforge/oracle.hpp"
#include "bornforge/parallel.hpp"
#include "bornforge/rng.hpp"
#include "bornforge/train.hpp"

using namespace bornforge;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int worker_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

ProbabilityVector full_support(int n, std::uint64_t seed) { return oracle::random_distribution(n, seed); }

Outcome simulator_equivalence() {
  Outcome o;
  double worst = 0;
  for (int n = 1; n <= 3; ++n) {
    for (std::uint64_t t = 0; t < 50; ++t) {
      const auto params = oracle::random_params(n, derive_seed(1, {static_cast<std::uint64_t>(n), t}));
      const auto fast = build_distribution(params).probs;
      const auto dense = oracle::distribution(params);
      for (std::size_t x = 0; x < fast.size(); ++x) worst = std::max(worst, std::abs(fast[x] - dense[x]));
    }
  }
  o.pass = worst <= 1e-10;
  o.details.push_back("max |p - p_dense| = " + fmt("%.3e", worst) + " over 150 parameter sets");
  return o;
}

Outcome shift_exactness() {
  Outcome o;
  double worst = 0;
  std::size_t checked = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto params = oracle::random_params(3, derive_seed(2, {t}));
    for (std::size_t k : params.trainable_indices()) {
      const auto g = prob_gradient(params, params.index_at(k));
      const auto fd = oracle::prob_gradient_fd(params, k, 1e-5);
      for (std::size_t x = 0; x < g.size(); ++x) worst = std::max(worst, std::abs(g[x] - fd[x]));
      ++checked;
    }
  }
  o.pass = worst <= 1e-6;
  o.details.push_back("max deviation " + fmt("%.3e", worst) + " over " + std::to_string(checked) + " trainable entries");
  return o;
}

Outcome iqp_identity() {
  Outcome o;
  const double h = std::numbers::pi / (2.0 * std::numbers::sqrt2);
  const std::complex<double> i(0.0, 1.0);
  const Gate2 gate = final_layer_gate(h, 0.0, h);
  const Eigen::Matrix2cd iH = i * oracle::hadamard();
  double worst = 0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(gate[static_cast<std::size_t>(2 * r + c)] - iH(r, c)));
  for (int n = 1; n <= 3; ++n) {
    CircuitParams p(n);
    p.set_gamma(std::vector<double>(static_cast<std::size_t>(n), h));
    p.set_sigma(std::vector<double>(static_cast<std::size_t>(n), h));
    const Eigen::MatrixXcd target = std::pow(i, n) * oracle::hadamard_all(n);
    worst = std::max(worst, (oracle::final_unitary(p) - target).cwiseAbs().maxCoeff());
  }
  o.pass = worst <= 1e-12;
  o.details.push_back("max |U_f - iH| = " + fmt("%.3e", worst) + " (single gate and n = 1..3 registers)");
  return o;
}

Outcome stein_identity() {
  Outcome o;
  double worst = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(t % 4);
    const auto pi = full_support(n, derive_seed(4, {t}));
    Rng rng(derive_seed(4, {t, 1}));
    std::vector<std::complex<double>> phi(pi.dim());
    for (auto& v : phi) v = {2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
    for (int k = 0; k < n; ++k) {
      std::complex<double> acc = 0;
      for (Bits x = 0; x < pi.dim(); ++x) {
        const double s = exact_score(pi, x)(k);
        acc += pi.probs[x] * (s * phi[x] - (phi[x] - phi[flip(x, k, n)]));
      }
      worst = std::max(worst, std::abs(acc));
    }
  }
  o.pass = worst < 1e-10;
  o.details.push_back("max |E[s phi - Delta phi]| = " + fmt("%.3e", worst) + " over 100 pairs, n = 1..4");
  return o;
}

Outcome zeros_at_target() {
  Outcome o;
  double mmd = 0, stein = 0, sink = 0;
  for (int n = 1; n <= 3; ++n) {
    const Kernel k(KernelSpec::gaussian(), n);
    for (std::uint64_t t = 0; t < 10; ++t) {
      const auto p = full_support(n, derive_seed(5, {static_cast<std::uint64_t>(n), t}));
      mmd = std::max(mmd, std::abs(mmd_exact(p, p, k)));
      stein = std::max(stein, std::abs(stein_cost_exact(p, ExactScore(p), k)));
      for (double eps : {0.1, 1.0, 10.0}) {
        SinkhornOptions opts;
        opts.epsilon = eps;
        sink = std::max(sink, std::abs(sinkhorn_divergence(p, p, opts).value));
      }
    }
  }
  o.pass = mmd <= 1e-12 && stein <= 1e-10 && sink <= 1e-6;
  o.details.push_back("max |MMD(p,p)| = " + fmt("%.3e", mmd) + ", |SD(p,p)| = " + fmt("%.3e", stein) +
                      ", |S_eps(p,p)| = " + fmt("%.3e", sink));
  return o;
}

Outcome sinkhorn_limits() {
  Outcome o;
  const Kernel negc(KernelSpec::neg_l1(), 2);
  double dev = 0, half_dev = 0;
  SinkhornOptions big;
  big.epsilon = 1e4;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto p = full_support(2, derive_seed(6, {t, 0})), q = full_support(2, derive_seed(6, {t, 1}));
    const double s = sinkhorn_divergence(p, q, big).value;
    const double m = mmd_exact(p, q, negc);
    dev = std::max(dev, std::abs(s - m));
    half_dev = std::max(half_dev, std::abs(s - 0.5 * m));
  }
  const bool limit_ok = dev <= 1e-3;
  o.details.push_back("eps = 1e4: max |S_eps - MMD_{-C}| = " + fmt("%.3e", dev) + (limit_ok ? " (ok)" : " (exceeds 1e-3)"));
  o.details.push_back("eps = 1e4: max |S_eps - MMD_{-C} / 2| = " + fmt("%.3e", half_dev) + " (informational)");

  bool gap_ok = true;
  for (double eps : {0.5, 0.1, 0.02}) {
    double lo = 1e9, worst_slack = -1e9;
    SinkhornOptions opts;
    opts.epsilon = eps;
    const double bound = regularization_gap_bound(2, eps);
    for (std::uint64_t t = 0; t < 50; ++t) {
      const auto P = to_weighted_support(full_support(2, derive_seed(7, {t, 0})));
      const auto Q = to_weighted_support(full_support(2, derive_seed(7, {t, 1})));
      const double ot0 = oracle::transport_by_vertices(P.weights, Q.weights, cost_matrix(P.points, Q.points));
      const double gap = ot_epsilon(P, Q, opts) - ot0;
      lo = std::min(lo, gap);
      worst_slack = std::max(worst_slack, gap - bound);
    }
    const bool ok = lo >= -1e-7 && worst_slack <= 1e-7;
    gap_ok = gap_ok && ok;
    o.details.push_back("eps = " + fmt("%g", eps) + ": min gap " + fmt("%.3e", lo) + ", max gap - bound " +
                        fmt("%.3e", worst_slack) + " (bound " + fmt("%.4f", bound) + ")" + (ok ? "" : " VIOLATED"));
  }
  o.pass = limit_ok && gap_ok;
  return o;
}

Outcome metric_chain() {
  Outcome o;
  std::size_t bad = 0, total = 0;
  for (int n : {2, 3}) {
    const Kernel k(KernelSpec::gaussian(), n);
    for (std::uint64_t t = 0; t < 200; ++t) {
      const auto p = full_support(n, derive_seed(8, {static_cast<std::uint64_t>(n), t, 0}));
      const auto q = full_support(n, derive_seed(8, {static_cast<std::uint64_t>(n), t, 1}));
      const double tv = tv_distance(p, q);
      const double ot0 = exact_ot(to_weighted_support(p), to_weighted_support(q));
      const double root = std::sqrt(std::max(0.0, mmd_exact(p, q, k)));
      if (!(root <= tv + 1e-12 && tv <= ot0 + 1e-12 && ot0 <= n * tv + 1e-12)) ++bad;
      ++total;
    }
  }
  o.pass = bad == 0;
  o.details.push_back(std::to_string(total - bad) + "/" + std::to_string(total) + " pairs satisfy sqrt(MMD) <= TV <= OT_0 <= n TV");
  return o;
}

Outcome cost_gradients() {
  Outcome o;
  double mmd = 0, stein = 0, sink = 0;
  for (int n : {2, 3}) {
    const Kernel k(KernelSpec::gaussian(), n);
    SinkhornOptions opts;
    for (std::uint64_t t = 0; t < 3; ++t) {
      const auto params = oracle::random_params(n, derive_seed(9, {static_cast<std::uint64_t>(n), t}));
      const auto pi = full_support(n, derive_seed(9, {static_cast<std::uint64_t>(n), t, 1}));
      const ExactScore score(pi);
      for (std::size_t idx : params.trainable_indices()) {
        const auto at = params.index_at(idx);
        const auto fd = [&](const std::function<double(const CircuitParams&)>& f, double h) {
          return oracle::central_difference(f, params, idx, h);
        };
        mmd = std::max(mmd, std::abs(mmd_gradient_exact(params, at, pi, k) -
                                     fd([&](const CircuitParams& q) { return mmd_exact(build_distribution(q), pi, k); }, 1e-5)));
        stein = std::max(stein, std::abs(stein_gradient_exact(params, at, score, k) -
                                         fd([&](const CircuitParams& q) { return stein_cost_exact(build_distribution(q), score, k); }, 1e-5)));
        sink = std::max(sink, std::abs(sinkhorn_gradient_exact(params, at, pi, opts) -
                                       fd([&](const CircuitParams& q) { return sinkhorn_divergence(build_distribution(q), pi, opts).value; }, 1e-4)));
      }
    }
  }
  o.pass = mmd <= 1e-6 && stein <= 1e-6 && sink <= 1e-4;
  o.details.push_back("max deviation: MMD " + fmt("%.3e", mmd) + ", Stein " + fmt("%.3e", stein) + ", Sinkhorn (eps 0.1) " +
                      fmt("%.3e", sink));
  return o;
}

Outcome score_recovery() {
  Outcome o;
  const Kernel k(KernelSpec::gaussian(), 2);
  double spectral = 0;
  for (std::uint64_t t = 0; t < 3; ++t) {
    const auto pi = full_support(2, derive_seed(10, {t}));
    const auto s = spectral_score(sample(pi, 200000, derive_seed(10, {t, 1})), k, 4);
    for (Bits x = 0; x < 4; ++x) spectral = std::max(spectral, ((*s)(x) - exact_score(pi, x)).cwiseAbs().maxCoeff());
  }
  const auto pi = full_support(2, derive_seed(10, {99}));
  std::string trail;
  double identity = 0;
  for (double eta : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
    const auto s = identity_score_weighted(to_weighted_support(pi), k, eta);
    identity = 0;
    for (Bits x = 0; x < 4; ++x) identity = std::max(identity, ((*s)(x) - exact_score(pi, x)).cwiseAbs().maxCoeff());
    trail += " " + fmt("%.1e", identity);
  }
  o.pass = spectral <= 0.1 && identity <= 1e-6;
  o.details.push_back("spectral (J = 4, M = 2e5): max error " + fmt("%.3e", spectral));
  o.details.push_back("identity error at eta = 1e-2 .. 1e-10:" + trail);
  return o;
}

RunConfig trend_config(const std::string& cost, std::uint64_t seed) {
  Json j{{"n", 3},
         {"seed", seed},
         {"threads", worker_threads()},
         {"cost", {{"kind", cost}, {"score", "exact"}, {"epsilon", 0.1}}},
         {"data", {{"samples", 500}}},
         {"training", {{"epochs", 100}, {"model_samples", 500}, {"batch_size", 250}}}};
  return config_from_json(j);
}

Outcome trend_reproduction() {
  Outcome o;
  const std::vector<std::string> costs{"mmd", "stein", "sinkhorn"};
  std::vector<double> mean(3, 0.0);
  bool all_reduce = true;
  for (std::size_t c = 0; c < costs.size(); ++c) {
    std::string line = costs[c] + ":";
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto rec = run_training(trend_config(costs[c], seed));
      const double first = rec.epochs.front().tv, last = rec.epochs.back().tv;
      all_reduce = all_reduce && last < first;
      mean[c] += last / 5.0;
      line += " " + fmt("%.3f", first) + "->" + fmt("%.3f", last);
    }
    o.details.push_back(line);
  }
  const double gap_stein = mean[0] - mean[1], gap_sink = mean[0] - mean[2];
  const bool ordering = gap_stein >= 0 && gap_sink >= 0;
  o.details.push_back(std::string("(a) TV reduced on every seed: ") + (all_reduce ? "yes" : "no"));
  o.details.push_back("(b) mean final TV: mmd " + fmt("%.4f", mean[0]) + ", stein " + fmt("%.4f", mean[1]) + ", sinkhorn " +
                      fmt("%.4f", mean[2]) + "; gaps mmd-stein " + fmt("%+.4f", gap_stein) + ", mmd-sinkhorn " +
                      fmt("%+.4f", gap_sink) + (ordering ? "" : " (negative gap)"));
  o.pass = all_reduce && ordering;
  return o;
}

Outcome compilation_trend() {
  Outcome o;
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Json j{{"command", "compile"},
           {"n", 2},
           {"seed", seed},
           {"threads", worker_threads()},
           {"cost", {{"kind", "sinkhorn"}, {"epsilon", 0.1}}}};
    const auto report = compile_run(make_compile_job(config_from_json(j)));
    improved += report.final_tv < report.initial_tv ? 1 : 0;
    o.details.push_back("seed " + std::to_string(seed) + ": TV " + fmt("%.4f", report.initial_tv) + " -> " +
                        fmt("%.4f", report.final_tv));
    std::istringstream table(report.table());
    for (std::string line; std::getline(table, line);) {
      if (!line.empty()) o.details.push_back("    " + line);
    }
  }
  o.pass = improved >= 4;
  o.details.push_back(std::to_string(improved) + "/5 seeds improved");
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BORNFORGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / "bornforge_acceptance_determinism";
  std::filesystem::remove_all(root);
  for (const std::string cost : {"mmd", "stein", "sinkhorn"}) {
    const std::string base = "train --n 3 --epochs 10 --seed 12 --cost " + cost + " --out ";
    const auto a = root / (cost + "_a"), b = root / (cost + "_b");
    const int ca = run_cli(base + a.string() + " --threads 1");
    const int cb = run_cli(base + b.string() + " --threads 4");
    const std::string ta = slurp(a / "trace.csv"), tb = slurp(b / "trace.csv");
    const bool same = ca == 0 && cb == 0 && !ta.empty() && ta == tb;
    o.pass = o.pass && same;
    o.details.push_back(cost + ": trace.csv " + (same ? "byte-identical" : "differs") + " (" + std::to_string(ta.size()) +
                        " bytes, threads 1 vs 4)");
  }
  const auto c = root / "compile_a", d = root / "compile_b";
  const bool compile_same = run_cli("compile --n 2 --epochs 10 --seed 3 --out " + c.string()) == 0 &&
                            run_cli("compile --n 2 --epochs 10 --seed 3 --out " + d.string()) == 0 &&
                            slurp(c / "trace.csv") == slurp(d / "trace.csv");
  o.pass = o.pass && compile_same;
  o.details.push_back(std::string("compile: trace.csv ") + (compile_same ? "byte-identical" : "differs"));
  std::filesystem::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"simulator matches dense unitary oracle", simulator_equivalence},
      {"parameter shift matches finite differences", shift_exactness},
      {"IQP final layer equals iH", iqp_identity},
      {"discrete Stein identity", stein_identity},
      {"costs vanish at the target", zeros_at_target},
      {"Sinkhorn limits", sinkhorn_limits},
      {"metric chain", metric_chain},
      {"exact cost gradients match finite differences", cost_gradients},
      {"score estimator recovery", score_recovery},
      {"training trend at n = 3", trend_reproduction},
      {"IQP to QAOA compilation trend", compilation_trend},
      {"byte-identical traces", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.details.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s %s (%.1f s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(), secs);
    for (const auto& d : o.details) std::printf("  %s\n", d.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
