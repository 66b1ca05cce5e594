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

#include "bornforge/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bornforge/data.hpp"
#include "bornforge/errors.hpp"
#include "bornforge/rng.hpp"

namespace bornforge {

namespace {

// Labels for derived seed streams.
constexpr std::uint64_t kModesStream = 0x6d6f646573;
constexpr std::uint64_t kCompileTargetStream = 0x746172676574;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const Json& obj, const std::string& prefix, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(join(prefix, key), "unknown field");
  }
}

template <class T>
T read(const Json& obj, const std::string& prefix, const std::string& key, const T& fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(join(prefix, key), "has the wrong type");
  }
}

const Json& section(const Json& root, const std::string& key) {
  static const Json empty = Json::object();
  if (!root.contains(key) || root.at(key).is_null()) return empty;
  return root.at(key);
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

std::string policy_check(const std::string& v, const std::string& field,
                         std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (v == o) return v;
  }
  std::string list;
  for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
  throw ConfigError(field, "must be one of {" + list + "}, got '" + v + "'");
}

}  // namespace

int default_eigenvectors(int n) {
  if (n >= 4) return 6;
  return std::min(3, 1 << n);
}

Json kernel_to_json(const KernelSpec& spec) {
  Json j;
  j["kind"] = spec.name();
  j["bandwidths"] = spec.bandwidths;
  j["mode"] = spec.sampled ? "sampled" : "exact";
  j["shots"] = spec.shots;
  j["seed"] = spec.seed;
  return j;
}

KernelSpec kernel_from_json(const Json& j, const std::string& field) {
  if (j.is_string()) return kernel_from_json(Json{{"kind", j.get<std::string>()}}, field);
  reject_unknown(j, field, {"kind", "bandwidths", "mode", "shots", "seed"});
  KernelSpec spec;
  const auto kind = policy_check(read<std::string>(j, field, "kind", "gaussian"), join(field, "kind"),
                                 {"gaussian", "hamming", "quantum", "neg_l1"});
  if (kind == "gaussian") spec.kind = KernelSpec::Kind::kGaussian;
  if (kind == "hamming") spec.kind = KernelSpec::Kind::kHamming;
  if (kind == "quantum") spec.kind = KernelSpec::Kind::kQuantum;
  if (kind == "neg_l1") spec.kind = KernelSpec::Kind::kNegL1;
  spec.bandwidths = read<std::vector<double>>(j, field, "bandwidths", spec.bandwidths);
  const auto mode = policy_check(read<std::string>(j, field, "mode", "exact"), join(field, "mode"),
                                 {"exact", "sampled"});
  spec.sampled = mode == "sampled";
  spec.shots = read<int>(j, field, "shots", spec.shots);
  spec.seed = read<std::uint64_t>(j, field, "seed", spec.seed);
  require(!spec.bandwidths.empty(), join(field, "bandwidths"), "must not be empty");
  for (double s : spec.bandwidths) require(s > 0.0, join(field, "bandwidths"), "must be positive");
  require(spec.shots >= 1, join(field, "shots"), "must be >= 1");
  return spec;
}

Json params_to_json(const CircuitParams& params) {
  Json j;
  const int n = params.n();
  j["n"] = n;
  const Eigen::MatrixXd J = params.J();
  Json rows = Json::array();
  for (int r = 0; r < n; ++r) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) row[static_cast<std::size_t>(c)] = J(r, c);
    rows.push_back(row);
  }
  j["j"] = rows;
  j["b"] = params.b();
  j["gamma"] = params.gamma();
  j["delta"] = params.delta();
  j["sigma"] = params.sigma();
  Json names = Json::array();
  for (std::size_t k : params.trainable_indices()) names.push_back(params.index_at(k).name());
  j["trainable"] = names;
  return j;
}

CircuitParams params_from_json(const Json& j) {
  reject_unknown(j, "params", {"n", "j", "b", "gamma", "delta", "sigma", "trainable"});
  require(j.contains("n"), "params.n", "missing");
  const int n = read<int>(j, "params", "n", 0);
  require(n >= 1 && n <= kMaxQubits, "params.n", "out of range");
  CircuitParams p(n);
  const auto nn = static_cast<std::size_t>(n);
  if (j.contains("j")) {
    const auto rows = read<std::vector<std::vector<double>>>(j, "params", "j", {});
    require(rows.size() == nn, "params.j", "must be n x n");
    Eigen::MatrixXd J(n, n);
    for (std::size_t r = 0; r < nn; ++r) {
      require(rows[r].size() == nn, "params.j", "must be n x n");
      for (std::size_t c = 0; c < nn; ++c) {
        J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
    try {
      p.set_J(J);
    } catch (const ShapeError& e) {
      throw ConfigError("params.j", e.what());
    }
  }
  auto vec = [&](const char* key, void (CircuitParams::*setter)(const std::vector<double>&)) {
    if (!j.contains(key)) return;
    const auto v = read<std::vector<double>>(j, "params", key, {});
    require(v.size() == nn, std::string("params.") + key, "must have length n");
    (p.*setter)(v);
  };
  vec("b", &CircuitParams::set_b);
  vec("gamma", &CircuitParams::set_gamma);
  vec("delta", &CircuitParams::set_delta);
  vec("sigma", &CircuitParams::set_sigma);
  if (j.contains("trainable")) {
    for (std::size_t k = 0; k < p.size(); ++k) p.set_trainable(k, false);
    for (const auto& name : read<std::vector<std::string>>(j, "params", "trainable", {})) {
      try {
        p.set_trainable(ParamIndex::parse(name), true);
      } catch (const UsageError& e) {
        throw ConfigError("params.trainable", e.what());
      }
    }
  }
  return p;
}

void materialize(RunConfig& cfg) {
  if (cfg.data.modes.empty() && cfg.data.file.empty()) {
    cfg.data.modes = random_modes(cfg.n, cfg.data.num_modes, derive_seed(cfg.seed, {kModesStream}));
  }
  if (cfg.command == "compile" && cfg.compile.target_j.empty() && cfg.compile.target_b.empty()) {
    const auto t = random_hard_init(cfg.n, HardFamily::parse(cfg.compile.target_family, cfg.compile.target_d),
                                    derive_seed(cfg.seed, {kCompileTargetStream}));
    for (std::size_t k = 0; k < t.num_couplings(); ++k) cfg.compile.target_j.push_back(t.value(k));
    cfg.compile.target_b = t.b();
  }
}

void validate(const RunConfig& cfg) {
  policy_check(cfg.command, "command", {"train", "compile", "bench", "oracle-check"});
  require(cfg.n >= 1 && cfg.n <= kMaxQubits, "n", "must lie in [1, " + std::to_string(kMaxQubits) + "]");
  require(cfg.threads >= 1, "threads", "must be >= 1");
  require(!cfg.out.empty(), "out", "must not be empty");

  policy_check(cfg.model.couplings, "model.couplings", {"full", "none", "edges"});
  for (const auto& [i, k] : cfg.model.edges) {
    require(i >= 0 && k >= 0 && i < cfg.n && k < cfg.n && i != k, "model.edges",
            "entries must be distinct qubit indices below n");
  }
  policy_check(cfg.model.init_family, "model.init.family", {"grid8", "odd_multiple", "irrational"});
  require(cfg.model.init_d >= 1, "model.init.d", "must be >= 1");
  for (const auto& t : cfg.model.trainable) {
    policy_check(t, "model.trainable", {"couplings", "locals", "gamma", "delta", "sigma"});
  }

  policy_check(cfg.cost.kind, "cost.kind", {"mmd", "stein", "sinkhorn"});
  try {
    cfg.cost.kernel.validate();
  } catch (const UsageError& e) {
    throw ConfigError("cost.kernel", e.what());
  }
  require(cfg.cost.kernel.kind != KernelSpec::Kind::kNegL1 || cfg.cost.kind != "stein",
          "cost.kernel.kind", "neg_l1 is not a valid Stein base kernel");
  policy_check(cfg.cost.score, "cost.score", {"exact", "identity", "spectral"});
  require(cfg.cost.eta > 0.0, "cost.eta", "must be positive");
  require(cfg.cost.eigenvectors >= 1, "cost.eigenvectors", "must be >= 1");
  policy_check(cfg.cost.undefined_score, "cost.undefined_score", {"error", "drop"});
  require(cfg.cost.sinkhorn.epsilon > 0.0, "cost.epsilon", "must be positive");
  require(cfg.cost.sinkhorn.max_iters >= 1, "cost.max_iters", "must be >= 1");
  require(cfg.cost.sinkhorn.tol > 0.0, "cost.tol", "must be positive");

  require(cfg.data.p > 0.0 && cfg.data.p <= 1.0, "data.p", "must lie in (0, 1]");
  require(cfg.data.num_modes >= 1 && (cfg.n >= 24 || cfg.data.num_modes <= (1 << cfg.n)),
          "data.num_modes", "must lie in [1, 2^n]");
  for (Bits m : cfg.data.modes) require((m & ~all_ones(cfg.n)) == 0, "data.modes", "mode wider than n");
  require(cfg.data.train >= 2 && cfg.data.train < cfg.data.samples, "data.train",
          "must be >= 2 and leave at least one test sample");
  require(cfg.data.samples - cfg.data.train >= 2, "data.samples", "test split needs >= 2 samples");

  require(cfg.optimizer.learning_rate > 0.0, "optimizer.learning_rate", "must be positive");
  require(cfg.optimizer.beta1 >= 0.0 && cfg.optimizer.beta1 < 1.0, "optimizer.beta1", "must lie in [0, 1)");
  require(cfg.optimizer.beta2 >= 0.0 && cfg.optimizer.beta2 < 1.0, "optimizer.beta2", "must lie in [0, 1)");
  require(cfg.optimizer.eps > 0.0, "optimizer.eps", "must be positive");

  require(cfg.training.epochs >= 0, "training.epochs", "must be >= 0");
  require(cfg.training.model_samples >= 2, "training.model_samples", "must be >= 2");
  require(cfg.training.batch_size >= 2 && cfg.training.batch_size <= cfg.training.model_samples &&
              cfg.training.batch_size <= cfg.data.train,
          "training.batch_size", "must lie in [2, min(model_samples, data.train)]");
  require(cfg.training.shift_samples >= 1, "training.shift_samples", "must be >= 1");
  policy_check(cfg.training.expectation, "training.expectation", {"sampled", "exact"});
  require(cfg.training.snap_d >= 1, "training.snap_d", "must be >= 1");
  require(!cfg.training.snap || cfg.model.init_family == "odd_multiple", "training.snap",
          "lattice snapping needs model.init.family = odd_multiple");

  if (cfg.cost.kind == "stein" && cfg.cost.score == "spectral" &&
      cfg.training.expectation == "sampled") {
    require(static_cast<std::size_t>(cfg.cost.eigenvectors) <= cfg.training.batch_size,
            "cost.eigenvectors", "cannot exceed the data batch size");
  }
  if (cfg.command == "compile" && !(cfg.compile.target_j.empty() && cfg.compile.target_b.empty())) {
    require(cfg.compile.target_j.size() == static_cast<std::size_t>(cfg.n * (cfg.n - 1) / 2),
            "compile.target_j", "must list the n(n-1)/2 upper-triangle couplings");
    require(cfg.compile.target_b.size() == static_cast<std::size_t>(cfg.n), "compile.target_b",
            "must have length n");
  }
  policy_check(cfg.compile.target_family, "compile.target_family", {"grid8", "odd_multiple", "irrational"});
  require(cfg.compile.target_d >= 1, "compile.target_d", "must be >= 1");
}

Json to_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["n"] = cfg.n;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["out"] = cfg.out;

  Json model;
  model["couplings"] = cfg.model.couplings;
  Json edges = Json::array();
  for (const auto& [a, b] : cfg.model.edges) edges.push_back({a, b});
  model["edges"] = edges;
  model["init"] = {{"family", cfg.model.init_family}, {"d", cfg.model.init_d}};
  model["final_layer"] = {{"gamma", cfg.model.final_gamma},
                          {"delta", cfg.model.final_delta},
                          {"sigma", cfg.model.final_sigma}};
  model["trainable"] = cfg.model.trainable;
  j["model"] = model;

  Json cost;
  cost["kind"] = cfg.cost.kind;
  cost["kernel"] = kernel_to_json(cfg.cost.kernel);
  cost["score"] = cfg.cost.score;
  cost["eta"] = cfg.cost.eta;
  cost["eigenvectors"] = cfg.cost.eigenvectors;
  cost["undefined_score"] = cfg.cost.undefined_score;
  cost["epsilon"] = cfg.cost.sinkhorn.epsilon;
  cost["max_iters"] = cfg.cost.sinkhorn.max_iters;
  cost["tol"] = cfg.cost.sinkhorn.tol;
  cost["epsilon_scaling"] = cfg.cost.sinkhorn.epsilon_scaling;
  j["cost"] = cost;

  Json data;
  data["p"] = cfg.data.p;
  data["num_modes"] = cfg.data.num_modes;
  Json modes = Json::array();
  for (Bits m : cfg.data.modes) modes.push_back(to_bitstring(m, cfg.n));
  data["modes"] = modes;
  data["samples"] = cfg.data.samples;
  data["train"] = cfg.data.train;
  data["file"] = cfg.data.file;
  j["data"] = data;

  j["optimizer"] = {{"learning_rate", cfg.optimizer.learning_rate},
                    {"beta1", cfg.optimizer.beta1},
                    {"beta2", cfg.optimizer.beta2},
                    {"eps", cfg.optimizer.eps}};

  j["training"] = {{"epochs", cfg.training.epochs},
                   {"model_samples", cfg.training.model_samples},
                   {"batch_size", cfg.training.batch_size},
                   {"shift_samples", cfg.training.shift_samples},
                   {"expectation", cfg.training.expectation},
                   {"snap", cfg.training.snap},
                   {"snap_d", cfg.training.snap_d}};

  j["compile"] = {{"target_family", cfg.compile.target_family},
                  {"target_d", cfg.compile.target_d},
                  {"target_j", cfg.compile.target_j},
                  {"target_b", cfg.compile.target_b}};
  return j;
}

RunConfig config_from_json(const Json& j) {
  reject_unknown(j, "", {"command", "n", "seed", "threads", "out", "model", "cost", "data",
                         "optimizer", "training", "compile"});
  RunConfig cfg;
  if (!j.contains("n") || j.at("n").is_null()) throw ConfigError("n", "missing required field");
  cfg.command = read<std::string>(j, "", "command", cfg.command);
  cfg.n = read<int>(j, "", "n", 0);
  require(cfg.n >= 1 && cfg.n <= kMaxQubits, "n", "must lie in [1, " + std::to_string(kMaxQubits) + "]");
  cfg.seed = read<std::uint64_t>(j, "", "seed", cfg.seed);
  cfg.threads = read<int>(j, "", "threads", cfg.threads);
  cfg.out = read<std::string>(j, "", "out", cfg.out);

  const Json& model = section(j, "model");
  reject_unknown(model, "model", {"couplings", "edges", "init", "final_layer", "trainable"});
  cfg.model.couplings = read<std::string>(model, "model", "couplings", cfg.model.couplings);
  for (const auto& e : read<std::vector<std::vector<int>>>(model, "model", "edges", {})) {
    require(e.size() == 2, "model.edges", "entries must be [i, j] pairs");
    cfg.model.edges.emplace_back(e[0], e[1]);
  }
  const Json& init = section(model, "init");
  reject_unknown(init, "model.init", {"family", "d"});
  cfg.model.init_family = read<std::string>(init, "model.init", "family", cfg.model.init_family);
  cfg.model.init_d = read<int>(init, "model.init", "d", cfg.model.init_d);
  const Json& fl = section(model, "final_layer");
  reject_unknown(fl, "model.final_layer", {"gamma", "delta", "sigma"});
  cfg.model.final_gamma = read<double>(fl, "model.final_layer", "gamma", cfg.model.final_gamma);
  cfg.model.final_delta = read<double>(fl, "model.final_layer", "delta", cfg.model.final_delta);
  cfg.model.final_sigma = read<double>(fl, "model.final_layer", "sigma", cfg.model.final_sigma);
  cfg.model.trainable = read<std::vector<std::string>>(model, "model", "trainable", cfg.model.trainable);

  const Json& cost = section(j, "cost");
  reject_unknown(cost, "cost", {"kind", "kernel", "score", "eta", "eigenvectors", "undefined_score",
                                "epsilon", "max_iters", "tol", "epsilon_scaling"});
  cfg.cost.kind = read<std::string>(cost, "cost", "kind", cfg.cost.kind);
  if (cost.contains("kernel")) cfg.cost.kernel = kernel_from_json(cost.at("kernel"));
  cfg.cost.score = read<std::string>(cost, "cost", "score", cfg.cost.score);
  cfg.cost.eta = read<double>(cost, "cost", "eta", cfg.cost.eta);
  cfg.cost.eigenvectors = read<int>(cost, "cost", "eigenvectors", default_eigenvectors(cfg.n));
  cfg.cost.undefined_score = read<std::string>(cost, "cost", "undefined_score", cfg.cost.undefined_score);
  cfg.cost.sinkhorn.epsilon = read<double>(cost, "cost", "epsilon", cfg.cost.sinkhorn.epsilon);
  cfg.cost.sinkhorn.max_iters = read<int>(cost, "cost", "max_iters", cfg.cost.sinkhorn.max_iters);
  cfg.cost.sinkhorn.tol = read<double>(cost, "cost", "tol", cfg.cost.sinkhorn.tol);
  cfg.cost.sinkhorn.epsilon_scaling =
      read<bool>(cost, "cost", "epsilon_scaling", cfg.cost.sinkhorn.epsilon_scaling);

  const Json& data = section(j, "data");
  reject_unknown(data, "data", {"p", "num_modes", "modes", "samples", "train", "file"});
  cfg.data.p = read<double>(data, "data", "p", cfg.data.p);
  cfg.data.num_modes = read<int>(data, "data", "num_modes", default_mode_count(cfg.n));
  for (const auto& m : read<std::vector<std::string>>(data, "data", "modes", {})) {
    require(static_cast<int>(m.size()) == cfg.n, "data.modes", "each mode needs n bits");
    try {
      cfg.data.modes.push_back(parse_bitstring(m));
    } catch (const ShapeError& e) {
      throw ConfigError("data.modes", e.what());
    }
  }
  if (!cfg.data.modes.empty() && !data.contains("num_modes")) {
    cfg.data.num_modes = static_cast<int>(cfg.data.modes.size());
  }
  require(cfg.data.modes.empty() || cfg.data.modes.size() == static_cast<std::size_t>(cfg.data.num_modes),
          "data.num_modes", "disagrees with the number of listed modes");
  cfg.data.samples = read<std::size_t>(data, "data", "samples", cfg.data.samples);
  cfg.data.train = read<std::size_t>(data, "data", "train", cfg.data.samples * 4 / 5);
  cfg.data.file = read<std::string>(data, "data", "file", cfg.data.file);

  const Json& opt = section(j, "optimizer");
  reject_unknown(opt, "optimizer", {"learning_rate", "beta1", "beta2", "eps"});
  cfg.optimizer.learning_rate = read<double>(opt, "optimizer", "learning_rate", cfg.optimizer.learning_rate);
  cfg.optimizer.beta1 = read<double>(opt, "optimizer", "beta1", cfg.optimizer.beta1);
  cfg.optimizer.beta2 = read<double>(opt, "optimizer", "beta2", cfg.optimizer.beta2);
  cfg.optimizer.eps = read<double>(opt, "optimizer", "eps", cfg.optimizer.eps);

  const Json& tr = section(j, "training");
  reject_unknown(tr, "training", {"epochs", "model_samples", "batch_size", "shift_samples",
                                  "expectation", "snap", "snap_d"});
  cfg.training.epochs = read<int>(tr, "training", "epochs", cfg.training.epochs);
  cfg.training.model_samples = read<std::size_t>(tr, "training", "model_samples", cfg.training.model_samples);
  cfg.training.batch_size = read<std::size_t>(tr, "training", "batch_size", cfg.training.model_samples / 2);
  cfg.training.shift_samples = read<std::size_t>(tr, "training", "shift_samples", cfg.training.model_samples);
  cfg.training.expectation = read<std::string>(tr, "training", "expectation", cfg.training.expectation);
  cfg.training.snap = read<bool>(tr, "training", "snap", cfg.training.snap);
  cfg.training.snap_d = read<int>(tr, "training", "snap_d", cfg.model.init_d);

  const Json& comp = section(j, "compile");
  reject_unknown(comp, "compile", {"target_family", "target_d", "target_j", "target_b"});
  cfg.compile.target_family = read<std::string>(comp, "compile", "target_family", cfg.compile.target_family);
  cfg.compile.target_d = read<int>(comp, "compile", "target_d", cfg.compile.target_d);
  cfg.compile.target_j = read<std::vector<double>>(comp, "compile", "target_j", {});
  cfg.compile.target_b = read<std::vector<double>>(comp, "compile", "target_b", {});

  validate(cfg);
  materialize(cfg);
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

void save_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config '" + path + "'");
  out << to_json(cfg).dump(2) << '\n';
}

}  // namespace bornforge
