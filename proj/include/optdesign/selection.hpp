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

#ifndef OPTDESIGN_SELECTION_HPP
#define OPTDESIGN_SELECTION_HPP

// Model selection on observed sessions: exclusion of bot-contaminated
// matches, likelihood odds, block-bootstrap odds curves and parameter
// posteriors.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "optdesign/errors.hpp"
#include "optdesign/likelihood.hpp"
#include "optdesign/models.hpp"
#include "optdesign/parallel.hpp"
#include "optdesign/random.hpp"
#include "optdesign/stopgo.hpp"

namespace optdesign {

// Drops flagged matches and every later match of a player who has been in a
// dropped match. Taint spreads round by round, so it follows the matching
// graph transitively.
inline SessionDataset exclusion_filter(const SessionDataset& data) {
  SessionDataset out = data;
  out.records.clear();
  std::set<int> tainted;
  std::vector<int> newly;
  for (std::size_t i = 0; i < data.records.size();) {
    const int round = data.records[i].round;
    newly.clear();
    for (; i < data.records.size() && data.records[i].round == round; ++i) {
      const MatchRecord& r = data.records[i];
      if (r.bot_lineage || tainted.count(r.p1) || tainted.count(r.p2)) {
        newly.push_back(r.p1);
        newly.push_back(r.p2);
      } else {
        out.records.push_back(r);
      }
    }
    tainted.insert(newly.begin(), newly.end());
  }
  return out;
}

struct ModelOdds {
  ModelId model;
  double log_likelihood = 0.0;
  double odds = 0.0;
};

struct OddsReport {
  GameDesign design;
  std::size_t matches_used = 0;
  std::vector<ModelOdds> models;  // in the requested order
  std::size_t best = 0;           // first model with the top likelihood
  bool ties = false;              // more than one model has odds 1
};

// Log-likelihoods relative to the best: odds_i = exp(ll_i - max ll).
inline OddsReport odds_from_log_likelihoods(const GameDesign& design, std::size_t matches,
                                            std::span<const ModelId> models,
                                            std::span<const double> lls) {
  OddsReport rep;
  rep.design = design;
  rep.matches_used = matches;
  const double top = *std::max_element(lls.begin(), lls.end());
  int at_top = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double odds = std::isfinite(top) ? std::exp(lls[i] - top) : 1.0;
    rep.models.push_back({models[i], lls[i], odds});
    if (odds == 1.0) {
      if (at_top++ == 0) rep.best = i;
    }
  }
  rep.ties = at_top > 1;
  return rep;
}

// Sessions are independent, so per-model log-likelihoods add across them.
// All sessions must share one design.
inline OddsReport likelihood_odds(std::span<const SessionDataset> sessions,
                                  std::span<const ModelId> models, const Exec& exec = {}) {
  if (models.empty()) throw InvalidArgument("no models to compare");
  if (sessions.empty()) throw InvalidArgument("no sessions to score");
  std::size_t matches = 0;
  for (const auto& s : sessions) {
    if (s.design.max_payoff != sessions[0].design.max_payoff ||
        s.design.prob_a != sessions[0].design.prob_a) {
      throw InvalidArgument("sessions scored together must share a design");
    }
    matches += s.size();
  }
  if (matches == 0) throw InvalidArgument("dataset is empty");
  const ParamGrid grid(sessions[0].design);
  std::vector<double> lls(models.size(), 0.0);
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (const auto& s : sessions) {
      if (!s.empty()) lls[m] += dataset_log_likelihood(models[m], s, grid, exec);
    }
  }
  return odds_from_log_likelihoods(sessions[0].design, matches, models, lls);
}

inline OddsReport likelihood_odds(const SessionDataset& data, std::span<const ModelId> models,
                                  const Exec& exec = {}) {
  return likelihood_odds(std::span<const SessionDataset>(&data, 1), models, exec);
}

inline nlohmann::ordered_json to_json(const OddsReport& rep) {
  nlohmann::ordered_json j;
  j["design"] = {{"A", rep.design.max_payoff}, {"pi", rep.design.prob_a}};
  j["matches_used"] = rep.matches_used;
  j["models"] = nlohmann::ordered_json::array();
  for (const auto& m : rep.models) {
    j["models"].push_back(
        {{"id", std::string(to_string(m.model))}, {"loglik", m.log_likelihood}, {"odds", m.odds}});
  }
  j["ties"] = rep.ties;
  return j;
}

// ---------------------------------------------------------------------------
// Bootstrap.

// A subsample of `size` matches built from whole pair slots (all rounds of
// one slot), drawn without replacement; the last slot drawn is cut to its
// earliest rounds so the size is exact. Records keep their original order.
inline SessionDataset block_subsample(const SessionDataset& data, std::size_t size, Rng& rng) {
  if (size > data.size()) {
    throw InvalidArgument("subsample size " + std::to_string(size) + " exceeds the " +
                          std::to_string(data.size()) + " available matches");
  }
  std::map<int, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    blocks[data.records[i].pair].push_back(i);
  }
  std::vector<int> slots;
  for (const auto& [slot, rows] : blocks) slots.push_back(slot);
  shuffle_range(slots.begin(), slots.end(), rng);
  std::vector<std::size_t> keep;
  for (int slot : slots) {
    if (keep.size() >= size) break;
    const auto& rows = blocks[slot];
    const std::size_t take = std::min(rows.size(), size - keep.size());
    keep.insert(keep.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(keep.begin(), keep.end());
  SessionDataset out = data;
  out.records.clear();
  for (std::size_t i : keep) out.records.push_back(data.records[i]);
  return out;
}

struct BootstrapSample {
  std::size_t size = 0;
  std::size_t replicate = 0;
  ModelId model;
  double odds = 0.0;
};

struct BootstrapSummary {
  std::size_t size = 0;
  ModelId model;
  double mean = 0.0;
  double sd = 0.0;
};

struct BootstrapCurve {
  std::vector<std::size_t> sizes;
  std::vector<BootstrapSample> samples;  // size-major, then replicate, then model
  std::vector<BootstrapSummary> summary;
};

inline BootstrapCurve bootstrap_odds(const SessionDataset& data, std::span<const ModelId> models,
                                     std::vector<std::size_t> sizes, std::size_t replicates,
                                     std::uint64_t seed, const Exec& exec = {}) {
  if (models.empty()) throw InvalidArgument("no models to compare");
  if (replicates < 1) throw InvalidArgument("replicates must be >= 1");
  if (sizes.empty()) throw InvalidArgument("no bootstrap sizes given");
  for (std::size_t s : sizes) {
    if (s < 1 || s > data.size()) {
      throw InvalidArgument("bootstrap size " + std::to_string(s) + " outside [1, " +
                            std::to_string(data.size()) + "]");
    }
  }
  BootstrapCurve curve;
  curve.sizes = sizes;
  const ParamGrid grid(data.design);
  const std::size_t jobs = sizes.size() * replicates;
  std::vector<std::vector<double>> odds(jobs);
  // Replicates run in parallel; each evaluates its models serially.
  parallel_for(jobs, exec, [&](std::size_t job) {
    const std::size_t si = job / replicates;
    const std::size_t r = job % replicates;
    Rng rng = make_rng(seed, "bootstrap/size=" + std::to_string(sizes[si]) +
                                 "/replicate=" + std::to_string(r));
    const SessionDataset sub = block_subsample(data, sizes[si], rng);
    std::vector<double> lls(models.size());
    for (std::size_t m = 0; m < models.size(); ++m) {
      lls[m] = dataset_log_likelihood(models[m], sub, grid, Exec{1});
    }
    const OddsReport rep = odds_from_log_likelihoods(data.design, sub.size(), models, lls);
    for (const auto& mo : rep.models) odds[job].push_back(mo.odds);
  });
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    for (std::size_t r = 0; r < replicates; ++r) {
      for (std::size_t m = 0; m < models.size(); ++m) {
        curve.samples.push_back({sizes[si], r, models[m], odds[si * replicates + r][m]});
      }
    }
    for (std::size_t m = 0; m < models.size(); ++m) {
      double sum = 0.0, sq = 0.0;
      for (std::size_t r = 0; r < replicates; ++r) sum += odds[si * replicates + r][m];
      const double mean = sum / static_cast<double>(replicates);
      for (std::size_t r = 0; r < replicates; ++r) {
        const double d = odds[si * replicates + r][m] - mean;
        sq += d * d;
      }
      const double sd = replicates > 1 ? std::sqrt(sq / static_cast<double>(replicates - 1)) : 0.0;
      curve.summary.push_back({sizes[si], models[m], mean, sd});
    }
  }
  return curve;
}

inline void write_bootstrap_csv(std::ostream& os, const BootstrapCurve& curve) {
  os << "size,replicate,model,odds\n";
  char buf[32];
  for (const auto& s : curve.samples) {
    std::snprintf(buf, sizeof buf, "%.10g", s.odds);
    os << s.size << ',' << s.replicate << ',' << to_string(s.model) << ',' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Parameter posterior under a uniform prior on the grid.

struct ParamPosterior {
  ModelId model;
  std::vector<double> weights;  // grid order
  std::size_t mode = 0;
};

inline ParamPosterior parameter_posterior(const SessionDataset& data, ModelId model,
                                          const ParamGrid& grid, const Exec& exec = {}) {
  if (data.empty()) throw InvalidArgument("dataset is empty");
  const std::vector<double> lls = param_log_likelihoods(model, data, grid, exec);
  const double norm = log_sum_exp(lls);
  ParamPosterior post;
  post.model = model;
  post.weights.resize(lls.size());
  if (!std::isfinite(norm)) {
    throw InvalidArgument("dataset has zero likelihood at every grid point");
  }
  for (std::size_t i = 0; i < lls.size(); ++i) post.weights[i] = std::exp(lls[i] - norm);
  post.mode = static_cast<std::size_t>(
      std::max_element(post.weights.begin(), post.weights.end()) - post.weights.begin());
  return post;
}

inline void write_posterior_csv(std::ostream& os, const ParamPosterior& post,
                                const ParamGrid& grid) {
  os << "epsilon0,alpha,delta,pi_per,weight\n";
  char buf[160];
  for (std::size_t i = 0; i < post.weights.size(); ++i) {
    const ModelParams p = grid.at(i);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n", p.epsilon0, p.alpha,
                  p.delta, p.pi_per, post.weights[i]);
    os << buf;
  }
}

}  // namespace optdesign

#endif  // OPTDESIGN_SELECTION_HPP
