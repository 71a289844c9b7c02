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

#ifndef OPTDESIGN_LIKELIHOOD_HPP
#define OPTDESIGN_LIKELIHOOD_HPP

// Dataset likelihoods and forward simulation. Both walk a session match by
// match with a SessionCursor, which holds every player's private learning
// state and the per-round tremble rate.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "optdesign/errors.hpp"
#include "optdesign/models.hpp"
#include "optdesign/parallel.hpp"
#include "optdesign/random.hpp"
#include "optdesign/stopgo.hpp"

namespace optdesign {

// One match slot with dense player indices.
struct Seat {
  int round = 1;
  int p1 = 0;
  int p2 = 0;
};

struct SessionLayout {
  int n_players = 0;
  std::vector<Seat> seats;  // ordered by round
};

inline SessionLayout layout_from_schedule(const MatchingSchedule& s) {
  SessionLayout layout;
  layout.n_players = s.n_players;
  layout.seats.reserve(s.n_matches());
  for (int t = 0; t < s.n_rounds(); ++t) {
    for (const Pairing& p : s.rounds[t]) layout.seats.push_back({t + 1, p.p1, p.p2});
  }
  return layout;
}

// A session re-expressed for the cursor: dense player ids plus one outcome
// code per match.
struct PreparedSession {
  SessionLayout layout;
  std::vector<std::uint8_t> codes;
};

inline PreparedSession prepare_session(const SessionDataset& data) {
  PreparedSession out;
  std::map<int, int> dense;
  auto id = [&dense](int raw) {
    auto [it, inserted] = dense.try_emplace(raw, static_cast<int>(dense.size()));
    return it->second;
  };
  out.layout.seats.reserve(data.records.size());
  out.codes.reserve(data.records.size());
  int last_round = 0;
  for (const MatchRecord& r : data.records) {
    if (r.round < last_round) {
      throw InvalidArgument("session records must be ordered by round");
    }
    last_round = r.round;
    const int p1 = id(r.p1);
    const int p2 = id(r.p2);
    out.layout.seats.push_back({r.round, p1, p2});
    out.codes.push_back(outcome_code(r.outcome));
  }
  out.layout.n_players = static_cast<int>(dense.size());
  return out;
}

class SessionCursor {
 public:
  SessionCursor(ModelId model, const GameDesign& design,
                const SessionLayout& layout)
      : model_(model), design_(design), layout_(&layout) {}

  void reset(const ModelParams& params) {
    params_ = params;
    position_ = 0;
    cached_round_ = -1;
    undo_.clear();
    if (!is_history_free(model_)) {
      players_.assign(layout_->n_players, PlayerState{});
    }
  }

  std::size_t position() const { return position_; }
  bool done() const { return position_ == layout_->seats.size(); }

  // Tremble-mixed strategy for the next match.
  ObservedStrategy observed() {
    const Seat& seat = layout_->seats[position_];
    if (seat.round != cached_round_) {
      cached_round_ = seat.round;
      eps_ = tremble_at_round(params_, seat.round);
      if (model_ == ModelId::kBayesNash) {
        round_obs_ = observed_probs(model1_strategy(params_, design_, eps_), eps_);
      } else if (model_ == ModelId::kNoUpdate) {
        round_obs_ = observed_probs(model2_strategy(params_, design_, eps_), eps_);
      }
    }
    switch (model_) {
      case ModelId::kBayesNash:
      case ModelId::kNoUpdate:
        return round_obs_;
      case ModelId::kFictitious: {
        const auto s1 = model3_strategy(players_[seat.p1].beliefs, params_, design_);
        const auto s2 = model3_strategy(players_[seat.p2].beliefs, params_, design_);
        return observed_probs({s1.p_a, s1.p_b, s2.q}, eps_);
      }
      case ModelId::kRothErev: {
        const auto s1 = model4_strategy(players_[seat.p1].propensities, Role::kPlayer1);
        const auto s2 = model4_strategy(players_[seat.p2].propensities, Role::kPlayer2);
        return observed_probs({s1.p_a, s1.p_b, s2.q}, eps_);
      }
    }
    return round_obs_;
  }

  // Records the outcome of the next match and updates both players.
  void advance(std::uint8_t code, bool keep_undo = false) {
    const Seat& seat = layout_->seats[position_];
    if (!is_history_free(model_)) {
      PlayerState& a = players_[seat.p1];
      PlayerState& b = players_[seat.p2];
      if (keep_undo) undo_.push_back({a, b});
      const Outcome o = outcome_from_code(code);
      if (model_ == ModelId::kFictitious) {
        a.beliefs = fictitious_update(a.beliefs, o);
        b.beliefs = fictitious_update(b.beliefs, o);
      } else {
        const Payoffs u = payoff(design_, o);
        const int node = o.world == World::kA ? PropensityState::kNodeWorldA
                                              : PropensityState::kNodeWorldB;
        a.propensities = model4_update(a.propensities, node,
                                       static_cast<int>(o.p1), u.p1, params_.alpha);
        b.propensities = model4_update(b.propensities, PropensityState::kNodePlayer2,
                                       static_cast<int>(o.p2), u.p2, params_.alpha);
      }
    }
    ++position_;
  }

  // Undoes the last advance(code, true).
  void retreat() {
    --position_;
    if (!is_history_free(model_)) {
      const Seat& seat = layout_->seats[position_];
      players_[seat.p1] = undo_.back().first;
      players_[seat.p2] = undo_.back().second;
      undo_.pop_back();
    }
  }

  const GameDesign& design() const { return design_; }

 private:
  struct PlayerState {
    FictitiousState beliefs;
    PropensityState propensities;
  };

  ModelId model_;
  GameDesign design_;
  const SessionLayout* layout_;
  ModelParams params_;
  std::size_t position_ = 0;
  int cached_round_ = -1;
  double eps_ = 0.0;
  ObservedStrategy round_obs_;
  std::vector<PlayerState> players_;
  std::vector<std::pair<PlayerState, PlayerState>> undo_;
};

// log of the product of match likelihoods under one parameter combination.
inline double log_likelihood_at(SessionCursor& cursor, const ModelParams& params,
                                std::span<const std::uint8_t> codes) {
  cursor.reset(params);
  double ll = 0.0;
  for (std::uint8_t code : codes) {
    const double p =
        match_likelihood(cursor.observed(), outcome_from_code(code), cursor.design());
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += std::log(p);
    cursor.advance(code);
  }
  return ll;
}

inline constexpr std::size_t kGridBlock = 1024;

// Per-grid-point log-likelihood of the dataset, in grid order.
inline std::vector<double> param_log_likelihoods(ModelId model,
                                                 const SessionDataset& data,
                                                 const ParamGrid& grid,
                                                 const Exec& exec = {}) {
  const PreparedSession prepared = prepare_session(data);
  std::vector<double> out(grid.size());
  const std::size_t blocks = (grid.size() + kGridBlock - 1) / kGridBlock;
  parallel_for(blocks, exec, [&](std::size_t b) {
    SessionCursor cursor(model, data.design, prepared.layout);
    const std::size_t end = std::min(grid.size(), (b + 1) * kGridBlock);
    for (std::size_t i = b * kGridBlock; i < end; ++i) {
      out[i] = log_likelihood_at(cursor, grid.at(i), prepared.codes);
    }
  });
  return out;
}

// log of the uniform-prior average over the grid of the dataset likelihood.
inline double dataset_log_likelihood(ModelId model, const SessionDataset& data,
                                     const ParamGrid& grid,
                                     const Exec& exec = {}) {
  if (data.empty()) return 0.0;
  const auto lls = param_log_likelihoods(model, data, grid, exec);
  return log_sum_exp(lls) - std::log(static_cast<double>(lls.size()));
}

inline double dataset_likelihood(ModelId model, const SessionDataset& data,
                                 const ParamGrid& grid, const Exec& exec = {}) {
  return std::exp(dataset_log_likelihood(model, data, grid, exec));
}

// Draws one outcome from the tremble-mixed strategy. World uses the true pi.
inline std::uint8_t draw_outcome(const ObservedStrategy& obs,
                                 const GameDesign& design, Rng& rng) {
  Outcome o;
  o.world = bernoulli(rng, design.prob_a) ? World::kA : World::kB;
  const double p_go = o.world == World::kA ? obs.p_a : obs.p_b;
  o.p1 = bernoulli(rng, p_go) ? P1Action::kGo : P1Action::kStop;
  o.p2 = bernoulli(rng, obs.q) ? P2Action::kLeft : P2Action::kRight;
  return outcome_code(o);
}

// Fills out[k] with the outcome of match k; out.size() == seats.
inline void simulate_codes(SessionCursor& cursor, const ModelParams& params,
                           Rng& rng, std::span<std::uint8_t> out) {
  cursor.reset(params);
  for (auto& code : out) {
    code = draw_outcome(cursor.observed(), cursor.design(), rng);
    cursor.advance(code);
  }
}

inline SessionDataset simulate_dataset(ModelId model, const ModelParams& params,
                                       const GameDesign& design,
                                       const MatchingSchedule& schedule,
                                       std::uint64_t seed) {
  validate(design);
  const SessionLayout layout = layout_from_schedule(schedule);
  SessionCursor cursor(model, design, layout);
  Rng rng = make_rng(seed, "simulate");
  std::vector<std::uint8_t> codes(layout.seats.size());
  simulate_codes(cursor, params, rng, codes);
  return make_session(design, schedule, codes);
}

}  // namespace optdesign

#endif  // OPTDESIGN_LIKELIHOOD_HPP
