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

#include "bornforge/compile.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bornforge/data.hpp"
#include "bornforge/errors.hpp"
#include "bornforge/metrics.hpp"
#include "bornforge/rng.hpp"

namespace bornforge {

namespace {

constexpr double kQaoaGamma = 0.78539816339744830962;
constexpr std::uint64_t kCompileInitStream = 0x636f6d70696e6974;
constexpr std::uint64_t kCompileDataStream = 0x636f6d7064617461;
constexpr std::uint64_t kCompileSplitStream = 0x636f6d7073706c74;

bool all_near(const std::vector<double>& v, double x, double tol) {
  for (double e : v) {
    if (std::abs(e - x) > tol) return false;
  }
  return true;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

bool is_iqp(const CircuitParams& p, double tol) {
  const double g = 3.14159265358979323846 / (2.0 * std::sqrt(2.0));
  return all_near(p.gamma(), g, tol) && all_near(p.sigma(), g, tol) && all_near(p.delta(), 0.0, tol);
}

bool is_qaoa(const CircuitParams& p, double tol) {
  return all_near(p.delta(), 0.0, tol) && all_near(p.sigma(), 0.0, tol);
}

void CompileJob::validate() const {
  if (target.n() != n || ansatz_init.n() != n) throw UsageError("compile job widths disagree");
  if (!is_iqp(target)) throw UsageError("compile target is not an IQP circuit");
  if (!is_qaoa(ansatz_init) || !all_near(ansatz_init.gamma(), -kQaoaGamma, 1e-12)) {
    throw UsageError("compile ansatz is not a QAOA circuit with Gamma = pi/4");
  }
  for (std::size_t k = ansatz_init.num_couplings() + static_cast<std::size_t>(n); k < ansatz_init.size(); ++k) {
    if (ansatz_init.trainable(k)) throw UsageError("compile ansatz final layer must stay frozen");
  }
}

CompileJob make_compile_job(const RunConfig& cfg) {
  CompileJob job;
  job.n = cfg.n;
  job.config = cfg;
  const Eigen::MatrixXd Jt = symmetric_from_upper(cfg.n, cfg.compile.target_j);
  job.target = iqp_params(Jt, cfg.compile.target_b);

  const CircuitParams init = random_hard_init(cfg.n, HardFamily::parse(cfg.model.init_family, cfg.model.init_d),
                                              derive_seed(cfg.seed, {kCompileInitStream}));
  job.ansatz_init = qaoa_params(init.J(), init.b(), kQaoaGamma);
  for (std::size_t k = 0; k < job.ansatz_init.size(); ++k) job.ansatz_init.set_trainable(k, false);
  job.ansatz_init.set_trainable_kind(ParamKind::kCoupling, true);
  job.ansatz_init.set_trainable_kind(ParamKind::kLocal, true);
  job.validate();
  return job;
}

TrainingProblem compile_problem(const CompileJob& job) {
  const RunConfig& cfg = job.config;
  TrainingProblem prob;
  prob.init = job.ansatz_init;
  prob.target = build_distribution(job.target);
  const SampleSet all = sample(prob.target, cfg.data.samples, derive_seed(cfg.seed, {kCompileDataStream}));
  auto split = split_samples(all, cfg.data.train, derive_seed(cfg.seed, {kCompileSplitStream}));
  prob.train = std::move(split.train);
  prob.test = std::move(split.test);
  prob.dataset.spec.n = job.n;
  prob.dataset.seed = cfg.seed;
  prob.dataset.samples = all;
  return prob;
}

CompileReport compile_run(const CompileJob& job) {
  job.validate();
  const RunConfig& cfg = job.config;
  const TrainingProblem prob = compile_problem(job);

  CompileReport rep;
  rep.record = train_problem(cfg, prob);
  rep.target = job.target;
  rep.initial = job.ansatz_init;
  rep.learned = rep.record.final_params;
  if (!is_qaoa(rep.learned) || rep.learned.gamma() != rep.initial.gamma()) {
    throw NumericalError("compile ansatz left the QAOA family during training");
  }
  rep.target_probs = prob.target;
  rep.learned_probs = build_distribution(rep.learned);
  rep.initial_tv = rep.record.epochs.front().tv;
  rep.final_tv = rep.record.epochs.back().tv;
  return rep;
}

Json CompileReport::to_json() const {
  Json params = Json::array();
  for (std::size_t k = 0; k < target.num_couplings() + static_cast<std::size_t>(target.n()); ++k) {
    params.push_back({{"name", target.index_at(k).name()},
                      {"target", target.value(k)},
                      {"initial", initial.value(k)},
                      {"learned", learned.value(k)}});
  }
  Json probs = Json::array();
  for (std::size_t x = 0; x < target_probs.probs.size(); ++x) {
    probs.push_back({{"x", to_bitstring(static_cast<Bits>(x), target.n())},
                     {"target", target_probs.probs[x]},
                     {"learned", learned_probs.probs[x]}});
  }
  return {{"initial_tv", initial_tv}, {"final_tv", final_tv}, {"parameters", params}, {"probabilities", probs}};
}

std::string CompileReport::table() const {
  std::string out = "param        target     initial    learned\n";
  for (std::size_t k = 0; k < target.num_couplings() + static_cast<std::size_t>(target.n()); ++k) {
    std::string name = target.index_at(k).name();
    name.resize(std::max<std::size_t>(name.size(), 10), ' ');
    out += name + " " + fmt("%10.6f", target.value(k)) + " " + fmt("%10.6f", initial.value(k)) + " " +
           fmt("%10.6f", learned.value(k)) + "\n";
  }
  out += "\nx          target     learned\n";
  for (std::size_t x = 0; x < target_probs.probs.size(); ++x) {
    std::string bits = to_bitstring(static_cast<Bits>(x), target.n());
    bits.resize(std::max<std::size_t>(bits.size(), 8), ' ');
    out += bits + " " + fmt("%10.6f", target_probs.probs[x]) + " " + fmt("%10.6f", learned_probs.probs[x]) + "\n";
  }
  out += "\ninitial TV " + fmt("%.6f", initial_tv) + "\nfinal TV   " + fmt("%.6f", final_tv) + "\n";
  return out;
}

void write_compile_artifacts(const std::string& dir, const CompileReport& report) {
  write_run_artifacts(dir, report.record);
  auto write = [&dir](const std::string& name, const std::string& body) {
    const auto path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << body;
  };
  write("compile.json", report.to_json().dump(2) + "\n");
  write("compile.txt", report.table());
}

}  // namespace bornforge
