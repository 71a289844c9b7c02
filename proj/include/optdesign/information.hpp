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

#ifndef OPTDESIGN_INFORMATION_HPP
#define OPTDESIGN_INFORMATION_HPP

// Expected information of a design: the KL divergence of one model's dataset
// distribution from the prior-weighted mixture of its competitors, either by
// enumerating every dataset or from simulated samples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <numeric>
#include <string>
#include <vector>

#include "optdesign/errors.hpp"
#include "optdesign/likelihood.hpp"
#include "optdesign/models.hpp"
#include "optdesign/parallel.hpp"
#include "optdesign/random.hpp"
#include "optdesign/stopgo.hpp"

namespace optdesign {

inline constexpr double kSaturationFloor = 1e-300;
inline constexpr double kDefaultEnumerationCap = 1e6;

struct ModelPrior {
  std::vector<double> weights;

  static ModelPrior uniform(std::size_t n) {
    return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
  }
};

inline void validate(const ModelPrior& prior, std::size_t n_models) {
  if (prior.weights.size() != n_models) {
    throw InvalidArgument("prior has " + std::to_string(prior.weights.size()) +
                          " weights for " + std::to_string(n_models) + " models");
  }
  double total = 0.0;
  for (double w : prior.weights) {
    if (!(w >= 0.0)) throw InvalidArgument("prior weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("prior weights must sum to 1");
  }
}

// Rows are datasets, columns are models: likelihood[m][row].
struct LikelihoodTable {
  std::vector<std::string> keys;
  std::vector<std::vector<double>> likelihood;

  std::size_t rows() const { return keys.size(); }
  std::size_t models() const { return likelihood.size(); }
};

struct KlResult {
  double value = 0.0;
  bool saturated = false;  // some competitor mass was floored
};

// Sum over datasets x of l_t(x) log[(1 - p_t) l_t(x) / sum_{i != t} p_i l_i(x)]
// in nats.
inline KlResult kl_one_sided(const LikelihoodTable& table,
                             const ModelPrior& prior, std::size_t target,
                             double floor = kSaturationFloor) {
  if (table.rows() == 0) throw InvalidArgument("likelihood table is empty");
  if (table.models() < 2) {
    throw InvalidArgument("information needs at least two models");
  }
  validate(prior, table.models());
  if (target >= table.models()) throw InvalidArgument("target model out of range");
  const double rest = 1.0 - prior.weights[target];
  if (!(rest > 0.0)) {
    throw InvalidArgument("prior puts no mass on the competing models");
  }
  const auto& lt = table.likelihood[target];
  std::vector<double> terms(table.rows(), 0.0);
  KlResult out;
  for (std::size_t x = 0; x < table.rows(); ++x) {
    if (lt[x] <= 0.0) continue;
    double mix = 0.0;
    for (std::size_t i = 0; i < table.models(); ++i) {
      if (i != target) mix += prior.weights[i] * table.likelihood[i][x];
    }
    if (mix <= 0.0) {
      mix = floor;
      out.saturated = true;
    }
    terms[x] = lt[x] * std::log(rest * lt[x] / mix);
  }
  out.value = pairwise_sum(terms);
  return out;
}

// Prior-weighted mean of the one-sided divergences of every model.
inline KlResult average_information(const LikelihoodTable& table,
                                    const ModelPrior& prior,
                                    double floor = kSaturationFloor) {
  if (table.models() < 2) {
    throw InvalidArgument("information needs at least two models");
  }
  validate(prior, table.models());
  KlResult out;
  for (std::size_t i = 0; i < table.models(); ++i) {
    if (prior.weights[i] == 0.0) continue;
    const KlResult r = kl_one_sided(table, prior, i, floor);
    out.value += prior.weights[i] * r.value;
    out.saturated = out.saturated || r.saturated;
  }
  return out;
}

// Which scalar of the table a design is scored by.
struct InfoObjective {
  enum class Kind { kOneSided, kAverage };
  Kind kind = Kind::kOneSided;
  std::size_t target = 0;

  static InfoObjective one_sided(std::size_t target) {
    return {Kind::kOneSided, target};
  }
  static InfoObjective average() { return {Kind::kAverage, 0}; }
};

inline KlResult evaluate(const InfoObjective& objective,
                         const LikelihoodTable& table, const ModelPrior& prior,
                         double floor = kSaturationFloor) {
  return objective.kind == InfoObjective::Kind::kAverage
             ? average_information(table, prior, floor)
             : kl_one_sided(table, prior, objective.target, floor);
}

enum class InfoMode { kExact, kSampled };

inline const char* to_string(InfoMode m) {
  return m == InfoMode::kExact ? "exact" : "sampled";
}

struct InfoPoint {
  GameDesign design;
  double value = 0.0;
  InfoMode mode = InfoMode::kSampled;
  std::size_t samples = 0;  // K in sampled mode, 0 when exact
  std::uint64_t seed = 0;
  bool saturated = false;
};

inline std::string info_csv_header() { return "A,pi,value,mode,K,seed,saturated"; }

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string to_csv_row(const InfoPoint& p) {
  return format_double(p.design.max_payoff) + "," + format_double(p.design.prob_a) +
         "," + format_double(p.value) + "," + to_string(p.mode) + "," +
         std::to_string(p.samples) + "," + std::to_string(p.seed) + "," +
         (p.saturated ? "1" : "0");
}

// ---------------------------------------------------------------------------
// Exact mode.

inline std::string key_from_codes(std::span<const std::uint8_t> codes) {
  std::string key(codes.size(), '0');
  for (std::size_t k = 0; k < codes.size(); ++k) {
    key[k] = static_cast<char>('0' + codes[k]);
  }
  return key;
}

namespace detail {

// Adds the probability of every dataset reachable from the cursor's current
// position into column, indexed by the base-8 reading of the outcome codes.
inline void enumerate_into(SessionCursor& cursor, std::size_t depth,
                           std::size_t prefix, double prob,
                           std::vector<double>& column) {
  if (depth == 0) {
    column[prefix] += prob;
    return;
  }
  const ObservedStrategy obs = cursor.observed();
  for (std::uint8_t c = 0; c < kNumOutcomes; ++c) {
    const double p = prob * match_likelihood(obs, outcome_from_code(c), cursor.design());
    if (p == 0.0) continue;
    cursor.advance(c, /*keep_undo=*/true);
    enumerate_into(cursor, depth - 1, prefix * kNumOutcomes + c, p, column);
    cursor.retreat();
  }
}

inline constexpr std::size_t kExactShards = 8;

}  // namespace detail

// Likelihood of every dataset on the schedule, averaged over the grid.
inline LikelihoodTable exact_table(const GameDesign& design,
                                   std::span<const ModelId> models,
                                   const MatchingSchedule& schedule,
                                   double cap = kDefaultEnumerationCap,
                                   const Exec& exec = {}) {
  validate(design);
  const std::size_t n = schedule.n_matches();
  const double count = std::pow(8.0, static_cast<double>(n));
  if (count > cap) {
    throw EnumerationCapExceeded(
        "exact mode would enumerate 8^" + std::to_string(n) +
        " datasets, above the cap of " + format_double(cap) +
        "; use sampled mode");
  }
  const auto rows = static_cast<std::size_t>(count);
  const SessionLayout layout = layout_from_schedule(schedule);
  const ParamGrid grid(design);

  LikelihoodTable table;
  table.keys.resize(rows);
  std::vector<std::uint8_t> codes(n);
  for (std::size_t x = 0; x < rows; ++x) {
    std::size_t v = x;
    for (std::size_t k = n; k-- > 0;) {
      codes[k] = static_cast<std::uint8_t>(v % kNumOutcomes);
      v /= kNumOutcomes;
    }
    table.keys[x] = key_from_codes(codes);
  }

  for (ModelId m : models) {
    std::vector<std::vector<double>> shards(detail::kExactShards);
    parallel_for(detail::kExactShards, exec, [&](std::size_t s) {
      shards[s].assign(rows, 0.0);
      SessionCursor cursor(m, design, layout);
      for (std::size_t i = s; i < grid.size(); i += detail::kExactShards) {
        cursor.reset(grid.at(i));
        detail::enumerate_into(cursor, n, 0, 1.0, shards[s]);
      }
    });
    std::vector<double> column(rows, 0.0);
    for (const auto& shard : shards) {
      for (std::size_t x = 0; x < rows; ++x) column[x] += shard[x];
    }
    for (double& v : column) v /= static_cast<double>(grid.size());
    table.likelihood.push_back(std::move(column));
  }
  return table;
}

inline InfoPoint exact_information(const GameDesign& design,
                                   std::span<const ModelId> models,
                                   const ModelPrior& prior,
                                   const MatchingSchedule& schedule,
                                   const InfoObjective& objective,
                                   double cap = kDefaultEnumerationCap,
                                   const Exec& exec = {}) {
  validate(prior, models.size());
  const LikelihoodTable table = exact_table(design, models, schedule, cap, exec);
  const KlResult r = evaluate(objective, table, prior);
  return {design, r.value, InfoMode::kExact, 0, 0, r.saturated};
}

// Pairs keep their partner from round to round when a perfect-stranger
// schedule is impossible (e.g. the two-player game).
inline MatchingSchedule default_schedule(int n_pairs, int n_rounds) {
  if (n_rounds <= n_pairs) {
    return perfect_stranger_schedule(2 * n_pairs, n_rounds, 0);
  }
  MatchingSchedule s = perfect_stranger_schedule(2 * n_pairs, 1, 0);
  s.rounds.resize(n_rounds, s.rounds.front());
  return s;
}

inline InfoPoint exact_information(const GameDesign& design,
                                   std::span<const ModelId> models,
                                   const ModelPrior& prior, int n_pairs,
                                   int n_rounds, const InfoObjective& objective,
                                   double cap = kDefaultEnumerationCap,
                                   const Exec& exec = {}) {
  return exact_information(design, models, prior,
                           default_schedule(n_pairs, n_rounds), objective, cap,
                           exec);
}

// ---------------------------------------------------------------------------
// Sampled mode.

inline constexpr std::size_t kSampleBlock = 500;

// For each model, draws K parameter combinations uniformly from the grid and
// simulates one dataset per draw. A dataset's relative likelihood under a
// model is the fraction of that model's K draws that produced it; the table
// covers the union of all models' samples.
inline LikelihoodTable sampled_table(const GameDesign& design,
                                     std::span<const ModelId> models,
                                     std::size_t samples,
                                     const MatchingSchedule& schedule,
                                     std::uint64_t seed, const Exec& exec = {}) {
  validate(design);
  if (samples < 1) throw InvalidArgument("sample count K must be >= 1");
  const SessionLayout layout = layout_from_schedule(schedule);
  const ParamGrid grid(design);
  const std::size_t n = layout.seats.size();
  const std::size_t blocks_per_model = (samples + kSampleBlock - 1) / kSampleBlock;
  const std::size_t jobs = blocks_per_model * models.size();

  std::vector<std::vector<std::string>> block_keys(jobs);
  parallel_for(jobs, exec, [&](std::size_t job) {
    const std::size_t mi = job / blocks_per_model;
    const std::size_t b = job % blocks_per_model;
    const ModelId m = models[mi];
    Rng rng = make_rng(seed, "sampling/model=" + std::string(to_string(m)) +
                                 "/block=" + std::to_string(b));
    SessionCursor cursor(m, design, layout);
    std::vector<std::uint8_t> codes(n);
    const std::size_t begin = b * kSampleBlock;
    const std::size_t end = std::min(samples, begin + kSampleBlock);
    auto& keys = block_keys[job];
    keys.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) {
      const ModelParams params = grid.at(uniform_index(rng, grid.size()));
      simulate_codes(cursor, params, rng, codes);
      keys.push_back(key_from_codes(codes));
    }
  });

  // Per model: sorted keys with counts.
  std::vector<std::vector<std::pair<std::string, std::size_t>>> counted(models.size());
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    std::vector<std::string> all;
    all.reserve(samples);
    for (std::size_t b = 0; b < blocks_per_model; ++b) {
      auto& keys = block_keys[mi * blocks_per_model + b];
      std::move(keys.begin(), keys.end(), std::back_inserter(all));
    }
    std::sort(all.begin(), all.end());
    auto& c = counted[mi];
    for (std::size_t i = 0; i < all.size();) {
      std::size_t j = i;
      while (j < all.size() && all[j] == all[i]) ++j;
      c.emplace_back(std::move(all[i]), j - i);
      i = j;
    }
  }

  LikelihoodTable table;
  for (const auto& c : counted) {
    for (const auto& [key, count] : c) table.keys.push_back(key);
  }
  std::sort(table.keys.begin(), table.keys.end());
  table.keys.erase(std::unique(table.keys.begin(), table.keys.end()),
                   table.keys.end());
  table.likelihood.assign(models.size(), std::vector<double>(table.rows(), 0.0));
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    std::size_t row = 0;
    for (const auto& [key, count] : counted[mi]) {
      while (table.keys[row] != key) ++row;
      table.likelihood[mi][row] =
          static_cast<double>(count) / static_cast<double>(samples);
    }
  }
  return table;
}

inline InfoPoint sampled_information(const GameDesign& design,
                                     std::span<const ModelId> models,
                                     const ModelPrior& prior, std::size_t samples,
                                     const MatchingSchedule& schedule,
                                     std::uint64_t seed,
                                     const InfoObjective& objective,
                                     const Exec& exec = {}) {
  validate(prior, models.size());
  const LikelihoodTable table =
      sampled_table(design, models, samples, schedule, seed, exec);
  // Datasets unseen by a competitor get half a count of mass rather than the
  // 1e-300 floor, which otherwise turns every unmatched target dataset into
  // roughly 690 nats.
  const double floor = 0.5 / static_cast<double>(samples);
  const KlResult r = evaluate(objective, table, prior, floor);
  return {design, r.value, InfoMode::kSampled, samples, seed, r.saturated};
}

// ---------------------------------------------------------------------------
// Design-space objective.

struct ObjectiveConfig {
  std::vector<ModelId> models{ModelId::kBayesNash, ModelId::kNoUpdate,
                              ModelId::kFictitious};
  ModelPrior prior = ModelPrior::uniform(3);
  InfoObjective objective = InfoObjective::one_sided(0);
  InfoMode mode = InfoMode::kSampled;
  std::size_t samples = 10000;
  int n_pairs = 3;
  int n_rounds = 1;
  double enumeration_cap = kDefaultEnumerationCap;
  std::uint64_t seed = 1;
};

// Information value as a function of the design. Every design is sampled with
// the same root seed (common random numbers), so a point has the same value
// whichever search strategy asks for it and neighbouring designs share noise.
class InformationObjective {
 public:
  explicit InformationObjective(ObjectiveConfig config, Exec exec = {})
      : config_(std::move(config)),
        exec_(exec),
        schedule_(default_schedule(config_.n_pairs, config_.n_rounds)) {
    validate(config_.prior, config_.models.size());
    if (config_.models.size() < 2) {
      throw InvalidArgument("information needs at least two models");
    }
  }

  InfoPoint operator()(const GameDesign& d) const {
    if (config_.mode == InfoMode::kExact) {
      return exact_information(d, config_.models, config_.prior, schedule_,
                               config_.objective, config_.enumeration_cap, exec_);
    }
    return sampled_information(d, config_.models, config_.prior, config_.samples,
                               schedule_, config_.seed, config_.objective, exec_);
  }

  const ObjectiveConfig& config() const { return config_; }

 private:
  ObjectiveConfig config_;
  Exec exec_;
  MatchingSchedule schedule_;
};

}  // namespace optdesign

#endif  // OPTDESIGN_INFORMATION_HPP
