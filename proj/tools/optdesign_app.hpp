// Copyright 2026 The optdesign Authors
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

#ifndef OPTDESIGN_TOOLS_APP_HPP
#define OPTDESIGN_TOOLS_APP_HPP

// Command-line front end: surface, search, simulate and select. Kept in a
// header so tests can run commands in-process.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "optdesign/optdesign.hpp"

namespace optdesign::app {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRefused = 2, kEmptyData = 3 };

// Configuration error raised before any computation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchSettings {
  std::string strategy = "gpucbpe";
  SearchConfig config;
  bool regret = false;  // compute the true maximum exhaustively first
};

struct SimulateSettings {
  std::string model = "bayes_nash";
  std::optional<ModelParams> params;  // unset means draw from the grid
  GameDesign design{kMinPayoff, 0.5};
  int n_players = 10;
  int n_rounds = 3;
};

struct SelectSettings {
  std::vector<std::string> inputs;
  GameDesign design{kMinPayoff, 0.5};
  std::vector<std::size_t> bootstrap_sizes;
  std::size_t bootstrap_replicates = 0;
  std::optional<std::string> posterior_model;
};

struct RunConfig {
  std::string command;
  DesignGrid grid;
  ObjectiveConfig objective;
  std::vector<double> prior;  // empty means uniform
  std::optional<std::string> target;
  unsigned threads = 0;
  std::string out = ".";
  SearchSettings search;
  SimulateSettings simulate;
  SelectSettings select;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "' in " + where);
  }
}

inline ModelId require_model(const std::string& name) {
  const auto m = parse_model_id(name);
  if (!m) throw ConfigError("unknown model id '" + name + "'");
  return *m;
}

inline std::vector<ModelId> parse_models(const std::vector<std::string>& names) {
  std::vector<ModelId> out;
  for (const auto& n : names) out.push_back(require_model(n));
  if (out.empty()) throw ConfigError("model list is empty");
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline GameDesign parse_design(const json& j, const std::string& where) {
  check_keys(j, {"A", "pi"}, where);
  GameDesign d;
  if (j.contains("A")) d.max_payoff = get<double>(j, "A", where);
  if (j.contains("pi")) d.prob_a = get<double>(j, "pi", where);
  return d;
}

inline ModelParams parse_params(const json& j, const std::string& where) {
  check_keys(j, {"epsilon0", "alpha", "delta", "pi_per"}, where);
  ModelParams p;
  for (const char* k : {"epsilon0", "alpha", "delta", "pi_per"}) {
    if (!j.contains(k)) throw ConfigError(std::string("missing '") + k + "' in " + where);
  }
  p.epsilon0 = get<double>(j, "epsilon0", where);
  p.alpha = get<double>(j, "alpha", where);
  p.delta = get<double>(j, "delta", where);
  p.pi_per = get<double>(j, "pi_per", where);
  return p;
}

inline std::vector<std::string> model_names(const std::vector<ModelId>& ms) {
  std::vector<std::string> out;
  for (ModelId m : ms) out.emplace_back(to_string(m));
  return out;
}

inline void apply_json(RunConfig& c, const json& j) {
  check_keys(j,
             {"command", "grid", "models", "prior", "objective", "target", "mode", "K", "seed",
              "instance", "enumeration_cap", "threads", "out", "search", "simulate", "select"},
             "config");
  const std::string top = "config";
  if (j.contains("command")) {
    const auto cmd = get<std::string>(j, "command", top);
    if (cmd != c.command) {
      throw ConfigError("config is for command '" + cmd + "', not '" + c.command + "'");
    }
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, {"n_a", "n_pi", "a_min", "a_max", "pi_min", "pi_max"}, "grid");
    if (g.contains("n_a")) c.grid.n_a = get<int>(g, "n_a", "grid");
    if (g.contains("n_pi")) c.grid.n_pi = get<int>(g, "n_pi", "grid");
    if (g.contains("a_min")) c.grid.a_lo = get<double>(g, "a_min", "grid");
    if (g.contains("a_max")) c.grid.a_hi = get<double>(g, "a_max", "grid");
    if (g.contains("pi_min")) c.grid.pi_lo = get<double>(g, "pi_min", "grid");
    if (g.contains("pi_max")) c.grid.pi_hi = get<double>(g, "pi_max", "grid");
  }
  if (j.contains("models")) {
    c.objective.models = parse_models(get<std::vector<std::string>>(j, "models", top));
  }
  if (j.contains("prior")) c.prior = get<std::vector<double>>(j, "prior", top);
  if (j.contains("objective")) {
    const auto o = get<std::string>(j, "objective", top);
    if (o == "one_sided") {
      c.objective.objective = InfoObjective::one_sided(0);
    } else if (o == "average") {
      c.objective.objective = InfoObjective::average();
    } else {
      throw ConfigError("objective must be one_sided or average");
    }
  }
  if (j.contains("target")) c.target = get<std::string>(j, "target", top);
  if (j.contains("mode")) {
    const auto m = get<std::string>(j, "mode", top);
    if (m == "exact") {
      c.objective.mode = InfoMode::kExact;
    } else if (m == "sampled") {
      c.objective.mode = InfoMode::kSampled;
    } else {
      throw ConfigError("mode must be exact or sampled");
    }
  }
  if (j.contains("K")) c.objective.samples = get<std::size_t>(j, "K", top);
  if (j.contains("seed")) c.objective.seed = get<std::uint64_t>(j, "seed", top);
  if (j.contains("instance")) {
    const json& in = j["instance"];
    check_keys(in, {"n_pairs", "n_rounds"}, "instance");
    if (in.contains("n_pairs")) c.objective.n_pairs = get<int>(in, "n_pairs", "instance");
    if (in.contains("n_rounds")) c.objective.n_rounds = get<int>(in, "n_rounds", "instance");
  }
  if (j.contains("enumeration_cap")) {
    c.objective.enumeration_cap = get<double>(j, "enumeration_cap", top);
  }
  if (j.contains("threads")) c.threads = get<unsigned>(j, "threads", top);
  if (j.contains("out")) c.out = get<std::string>(j, "out", top);
  if (j.contains("search")) {
    const json& s = j["search"];
    const std::string w = "search";
    check_keys(s,
               {"strategy", "budget", "n_init", "beta", "delta", "stop_threshold", "stop_repeats",
                "use_stopping", "refit_every", "regret"},
               w);
    auto& sc = c.search.config;
    if (s.contains("strategy")) c.search.strategy = get<std::string>(s, "strategy", w);
    if (s.contains("budget")) sc.budget = get<std::size_t>(s, "budget", w);
    if (s.contains("n_init")) sc.n_init = get<std::size_t>(s, "n_init", w);
    if (s.contains("beta") && !s["beta"].is_null()) sc.beta = get<double>(s, "beta", w);
    if (s.contains("delta")) sc.delta = get<double>(s, "delta", w);
    if (s.contains("stop_threshold")) sc.stop_threshold = get<double>(s, "stop_threshold", w);
    if (s.contains("stop_repeats")) sc.stop_repeats = get<int>(s, "stop_repeats", w);
    if (s.contains("use_stopping")) sc.use_stopping = get<bool>(s, "use_stopping", w);
    if (s.contains("refit_every")) sc.refit_every = get<std::size_t>(s, "refit_every", w);
    if (s.contains("regret")) c.search.regret = get<bool>(s, "regret", w);
  }
  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    const std::string w = "simulate";
    check_keys(s, {"model", "params", "design", "n_players", "n_rounds"}, w);
    if (s.contains("model")) c.simulate.model = get<std::string>(s, "model", w);
    if (s.contains("params")) {
      if (s["params"].is_string()) {
        if (s["params"] != "sample") throw ConfigError("simulate.params must be an object or \"sample\"");
        c.simulate.params.reset();
      } else {
        c.simulate.params = parse_params(s["params"], "simulate.params");
      }
    }
    if (s.contains("design")) c.simulate.design = parse_design(s["design"], "simulate.design");
    if (s.contains("n_players")) c.simulate.n_players = get<int>(s, "n_players", w);
    if (s.contains("n_rounds")) c.simulate.n_rounds = get<int>(s, "n_rounds", w);
  }
  if (j.contains("select")) {
    const json& s = j["select"];
    const std::string w = "select";
    check_keys(s, {"inputs", "design", "bootstrap", "posterior"}, w);
    if (s.contains("inputs")) c.select.inputs = get<std::vector<std::string>>(s, "inputs", w);
    if (s.contains("design")) c.select.design = parse_design(s["design"], "select.design");
    if (s.contains("bootstrap")) {
      const json& b = s["bootstrap"];
      check_keys(b, {"sizes", "replicates"}, "select.bootstrap");
      c.select.bootstrap_sizes = get<std::vector<std::size_t>>(b, "sizes", "select.bootstrap");
      c.select.bootstrap_replicates = get<std::size_t>(b, "replicates", "select.bootstrap");
    }
    if (s.contains("posterior")) c.select.posterior_model = get<std::string>(s, "posterior", w);
  }
}

// Cross-field checks and derived settings, done before any computation.
inline void finalize(RunConfig& c) {
  try {
    c.grid.validate();
    auto& o = c.objective;
    const std::size_t n = o.models.size();
    o.prior = c.prior.empty() ? ModelPrior::uniform(n) : ModelPrior{c.prior};
    validate(o.prior, n);
    if (o.objective.kind == InfoObjective::Kind::kOneSided) {
      std::size_t target = 0;
      if (c.target) {
        const ModelId t = require_model(*c.target);
        const auto it = std::find(o.models.begin(), o.models.end(), t);
        if (it == o.models.end()) throw ConfigError("target is not in the model list");
        target = static_cast<std::size_t>(it - o.models.begin());
      }
      o.objective = InfoObjective::one_sided(target);
    }
    if (o.samples < 1) throw ConfigError("K must be >= 1");
    if (o.n_pairs < 1 || o.n_rounds < 1) throw ConfigError("instance needs >= 1 pair and round");
    if (c.command == "surface" || c.command == "search") {
      if (n < 2) throw ConfigError("information needs at least two models");
    }
    if (c.command == "search") {
      const auto& s = c.search.strategy;
      if (s != "gpucbpe" && s != "grid_scan" && s != "random") {
        throw ConfigError("strategy must be gpucbpe, grid_scan or random");
      }
      if (s == "gpucbpe") c.search.config.validate(c.grid);
      if (c.search.config.budget < 1) throw ConfigError("budget must be >= 1");
    }
    if (c.command == "simulate") {
      require_model(c.simulate.model);
      validate(c.simulate.design);
      if (c.simulate.n_players < 2 || c.simulate.n_players % 2 != 0) {
        throw ConfigError("n_players must be even and >= 2");
      }
      if (c.simulate.n_rounds < 1) throw ConfigError("n_rounds must be >= 1");
    }
    if (c.command == "select") {
      validate(c.select.design);
      if (c.select.inputs.empty()) throw ConfigError("select needs at least one --input");
      if (c.select.posterior_model) require_model(*c.select.posterior_model);
      if (!c.select.bootstrap_sizes.empty() && c.select.bootstrap_replicates < 1) {
        throw ConfigError("bootstrap needs replicates >= 1");
      }
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

// Writes via a temporary file in the same directory and renames it into
// place, so readers never see a partial artifact.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.parent_path() /
                   ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline std::string fmt(double v) { return format_double(v); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands. Each returns the artifacts to write as (file name, content).

using Artifacts = std::vector<std::pair<std::string, std::string>>;

inline Artifacts cmd_surface(const RunConfig& c, std::ostream& log) {
  InformationObjective f(c.objective, Exec{c.threads});
  std::ostringstream csv;
  csv << info_csv_header() << '\n';
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const InfoPoint p = f(c.grid.design(i));
    csv << to_csv_row(p) << '\n';
    if (p.value > best_value) {
      best_value = p.value;
      best = i;
    }
  }
  const GameDesign d = c.grid.design(best);
  log << "argmax A=" << detail::fmt(d.max_payoff) << " pi=" << detail::fmt(d.prob_a)
      << " value=" << detail::fmt(best_value) << '\n';
  return {{"surface.csv", csv.str()}};
}

inline Artifacts cmd_search(const RunConfig& c, std::ostream& log) {
  InformationObjective f(c.objective, Exec{c.threads});
  // Memoized by grid index; the objective is deterministic per design.
  std::vector<std::optional<double>> cache(c.grid.size());
  auto index_of = [&](const GameDesign& d) {
    const double ua = c.grid.n_a == 1 ? 0.0 : (d.max_payoff - c.grid.a_lo) / (c.grid.a_hi - c.grid.a_lo);
    const double up = c.grid.n_pi == 1 ? 0.0 : (d.prob_a - c.grid.pi_lo) / (c.grid.pi_hi - c.grid.pi_lo);
    return c.grid.snap(ua, up);
  };
  DesignObjective objective = [&](const GameDesign& d) {
    auto& slot = cache[index_of(d)];
    if (!slot) slot = f(d).value;
    return *slot;
  };
  std::optional<double> true_max;
  if (c.search.regret) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.grid.size(); ++i) m = std::max(m, objective(c.grid.design(i)));
    true_max = m;
  }
  std::ostringstream trace;
  nlohmann::ordered_json result;
  if (c.search.strategy == "gpucbpe") {
    const SearchResult r = run_gpucbpe(objective, c.grid, c.search.config, true_max);
    write_trace(trace, r.trace);
    result["argmax"] = {{"A", r.argmax_design.max_payoff}, {"pi", r.argmax_design.prob_a}};
    result["value"] = r.argmax_value;
    result["evaluations"] = r.evaluations;
    result["stopped_by"] = r.stopped_by;
  } else {
    const auto strategy =
        c.search.strategy == "grid_scan" ? BaselineStrategy::kGridScan : BaselineStrategy::kRandom;
    const BaselineResult r = baseline_search(objective, c.grid, strategy, c.search.config.budget,
                                             c.objective.seed, true_max);
    write_trace(trace, r.trace);
    result["argmax"] = {{"A", r.best_design.max_payoff}, {"pi", r.best_design.prob_a}};
    result["value"] = r.best_value;
    result["evaluations"] = r.queried.size();
    result["stopped_by"] = r.queried.size() >= c.grid.size() ? "exhausted" : "budget";
  }
  log << "argmax A=" << detail::fmt(result["argmax"]["A"].get<double>())
      << " pi=" << detail::fmt(result["argmax"]["pi"].get<double>())
      << " evaluations=" << result["evaluations"].get<std::size_t>() << '\n';
  return {{"trace.csv", trace.str()}, {"result.json", result.dump(2) + "\n"}};
}

inline Artifacts cmd_simulate(const RunConfig& c, std::ostream& log) {
  const auto& s = c.simulate;
  const ModelId model = detail::require_model(s.model);
  MatchingSchedule schedule;
  try {
    schedule = perfect_stranger_schedule(s.n_players, s.n_rounds, 0);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  ModelParams params;
  if (s.params) {
    params = *s.params;
  } else {
    const ParamGrid grid(s.design);
    Rng rng = make_rng(c.objective.seed, "simulate/params");
    params = grid.at(uniform_index(rng, grid.size()));
  }
  SessionDataset data;
  try {
    data = simulate_dataset(model, params, s.design, schedule, c.objective.seed);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  std::ostringstream csv;
  write_session_csv(csv, data);
  log << "simulated " << data.size() << " matches\n";
  return {{"session.csv", csv.str()}};
}

inline Artifacts cmd_select(const RunConfig& c, std::ostream& log) {
  const auto& s = c.select;
  std::vector<SessionDataset> sessions;
  std::size_t kept = 0;
  for (const auto& path : s.inputs) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    SessionDataset d;
    try {
      d = read_session_csv(is, s.design);
    } catch (const ParseError& e) {
      throw ConfigError(path + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw ConfigError(path + ": " + e.what());
    }
    sessions.push_back(exclusion_filter(d));
    kept += sessions.back().size();
  }
  if (kept == 0) throw EmptyData("no matches left after exclusion");
  const Exec exec{c.threads};
  const OddsReport rep = likelihood_odds(sessions, c.objective.models, exec);
  Artifacts out{{"odds.json", to_json(rep).dump(2) + "\n"}};
  log << "best model " << to_string(rep.models[rep.best].model) << (rep.ties ? " (tied)" : "")
      << '\n';

  // Bootstrap and posterior work on the pooled records of a single session.
  if (!s.bootstrap_sizes.empty() || s.posterior_model) {
    if (sessions.size() != 1) throw ConfigError("bootstrap and posterior take a single input");
  }
  if (!s.bootstrap_sizes.empty()) {
    BootstrapCurve curve;
    try {
      curve = bootstrap_odds(sessions[0], c.objective.models, s.bootstrap_sizes,
                             s.bootstrap_replicates, c.objective.seed, exec);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    std::ostringstream csv;
    write_bootstrap_csv(csv, curve);
    out.emplace_back("bootstrap.csv", csv.str());
  }
  if (s.posterior_model) {
    const ParamGrid grid(s.design);
    const ParamPosterior post =
        parameter_posterior(sessions[0], detail::require_model(*s.posterior_model), grid, exec);
    std::ostringstream csv;
    write_posterior_csv(csv, post, grid);
    out.emplace_back("posterior.csv", csv.str());
  }
  return out;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Bayesian optimal design for the Stop-Go game"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, out, models, mode, strategy, params, model, bootstrap, posterior;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::size_t> k, budget;
    std::optional<double> a, pi;
    std::optional<int> players, rounds;
    std::vector<std::string> inputs;
    bool regret = false;
  } f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file");
    sub->add_option("--seed", f.seed, "root seed");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--threads", f.threads, "worker cap (0 = all cores)");
    sub->add_option("--k", f.k, "datasets sampled per model");
    sub->add_option("--models", f.models, "comma-separated model ids");
    sub->add_option("--mode", f.mode, "exact or sampled");
  };
  auto* surface = app.add_subcommand("surface", "evaluate the information surface");
  auto* search = app.add_subcommand("search", "search the design grid");
  auto* simulate = app.add_subcommand("simulate", "simulate a session");
  auto* select = app.add_subcommand("select", "score sessions against the models");
  for (auto* sub : {surface, search, simulate, select}) common(sub);
  search->add_option("--strategy", f.strategy, "gpucbpe, grid_scan or random");
  search->add_option("--budget", f.budget, "maximum evaluations");
  search->add_flag("--regret", f.regret, "evaluate the whole grid first to report regret");
  simulate->add_option("--model", f.model, "model id");
  simulate->add_option("--params", f.params, "eps0,alpha,delta,pi_per or 'sample'");
  simulate->add_option("--players", f.players, "number of players");
  simulate->add_option("--rounds", f.rounds, "number of rounds");
  for (auto* sub : {simulate, select}) {
    sub->add_option("--A", f.a, "maximum payoff A");
    sub->add_option("--pi", f.pi, "probability of world a");
  }
  select->add_option("--input", f.inputs, "session CSV (repeatable)");
  select->add_option("--bootstrap", f.bootstrap, "sizes=N,N,...;reps=R");
  select->add_option("--posterior", f.posterior, "model=ID");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  RunConfig c;
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  try {
    if (!f.config.empty()) {
      std::ifstream is(f.config);
      if (!is) throw ConfigError("cannot open config " + f.config);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(is);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      detail::apply_json(c, j);
    }
    if (f.seed) c.objective.seed = *f.seed;
    if (!f.out.empty()) c.out = f.out;
    if (f.threads) c.threads = *f.threads;
    if (f.k) c.objective.samples = *f.k;
    if (!f.models.empty()) c.objective.models = detail::parse_models(detail::split(f.models, ','));
    if (!f.mode.empty()) {
      if (f.mode == "exact") {
        c.objective.mode = InfoMode::kExact;
      } else if (f.mode == "sampled") {
        c.objective.mode = InfoMode::kSampled;
      } else {
        throw ConfigError("--mode must be exact or sampled");
      }
    }
    if (!f.strategy.empty()) c.search.strategy = f.strategy;
    if (f.budget) c.search.config.budget = *f.budget;
    if (f.regret) c.search.regret = true;
    if (!f.model.empty()) c.simulate.model = f.model;
    if (!f.params.empty()) {
      if (f.params == "sample") {
        c.simulate.params.reset();
      } else {
        const auto parts = detail::split(f.params, ',');
        if (parts.size() != 4) throw ConfigError("--params needs eps0,alpha,delta,pi_per");
        try {
          c.simulate.params =
              ModelParams{std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]),
                          std::stod(parts[3])};
        } catch (const std::exception&) {
          throw ConfigError("--params values must be numbers");
        }
      }
    }
    if (f.players) c.simulate.n_players = *f.players;
    if (f.rounds) c.simulate.n_rounds = *f.rounds;
    if (f.a) c.simulate.design.max_payoff = c.select.design.max_payoff = *f.a;
    if (f.pi) c.simulate.design.prob_a = c.select.design.prob_a = *f.pi;
    if (!f.inputs.empty()) c.select.inputs = f.inputs;
    if (!f.bootstrap.empty()) {
      c.select.bootstrap_sizes.clear();
      for (const auto& part : detail::split(f.bootstrap, ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw ConfigError("--bootstrap expects key=value parts");
        const std::string key = part.substr(0, eq), value = part.substr(eq + 1);
        try {
          if (key == "sizes") {
            for (const auto& v : detail::split(value, ',')) {
              c.select.bootstrap_sizes.push_back(std::stoul(v));
            }
          } else if (key == "reps") {
            c.select.bootstrap_replicates = std::stoul(value);
          } else {
            throw ConfigError("unknown --bootstrap key '" + key + "'");
          }
        } catch (const std::logic_error&) {
          throw ConfigError("--bootstrap values must be integers");
        }
      }
    }
    if (!f.posterior.empty()) {
      if (f.posterior.rfind("model=", 0) != 0) throw ConfigError("--posterior expects model=ID");
      c.select.posterior_model = f.posterior.substr(6);
    }
    detail::finalize(c);

    Artifacts artifacts;
    if (c.command == "surface") {
      artifacts = cmd_surface(c, out);
    } else if (c.command == "search") {
      artifacts = cmd_search(c, out);
    } else if (c.command == "simulate") {
      artifacts = cmd_simulate(c, out);
    } else {
      artifacts = cmd_select(c, out);
    }
    std::filesystem::create_directories(c.out);
    for (const auto& [name, content] : artifacts) {
      detail::write_atomic(std::filesystem::path(c.out) / name, content);
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const EnumerationCapExceeded& e) {
    err << "refused: " << e.what() << '\n';
    return kRefused;
  } catch (const EmptyData& e) {
    err << "error: " << e.what() << '\n';
    return kEmptyData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace optdesign::app

#endif  // OPTDESIGN_TOOLS_APP_HPP
