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

#ifndef OPTDESIGN_MODELS_HPP
#define OPTDESIGN_MODELS_HPP

// Behavioral models of Stop-Go play.
//
//   bayes_nash   every player plays the Bayes-Nash equilibrium for its
//                perceived pi and current tremble rate.
//   no_update    as above, but player 2 does not update its belief after Go.
//   fictitious   players best-respond to running frequencies of what they
//                have personally observed.
//   roth_erev    choice probabilities proportional to discounted
//                accumulated payoffs per action.
//
// Strategies are (p_a, p_b, q): probability player 1 plays Go in world a,
// Go in world b, and probability player 2 plays Left.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optdesign/errors.hpp"
#include "optdesign/stopgo.hpp"

namespace optdesign {

enum class ModelId { kBayesNash, kNoUpdate, kFictitious, kRothErev };

inline constexpr std::array<ModelId, 4> kAllModels = {
    ModelId::kBayesNash, ModelId::kNoUpdate, ModelId::kFictitious,
    ModelId::kRothErev};

inline std::string_view to_string(ModelId m) {
  switch (m) {
    case ModelId::kBayesNash: return "bayes_nash";
    case ModelId::kNoUpdate: return "no_update";
    case ModelId::kFictitious: return "fictitious";
    case ModelId::kRothErev: return "roth_erev";
  }
  return "unknown";
}

inline std::optional<ModelId> parse_model_id(std::string_view s) {
  for (ModelId m : kAllModels) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

inline bool is_history_free(ModelId m) {
  return m == ModelId::kBayesNash || m == ModelId::kNoUpdate;
}

struct StrategyProfile {
  double p_a = 0.5;
  double p_b = 0.5;
  double q = 0.5;

  friend bool operator==(const StrategyProfile&,
                         const StrategyProfile&) = default;
};

// Strategy after tremble mixing; each component lies in
// [eps/2, 1 - eps/2].
struct ObservedStrategy {
  double p_a = 0.5;
  double p_b = 0.5;
  double q = 0.5;
};

inline constexpr double kDomainTolerance = 1e-9;
inline constexpr double kTieTolerance = 1e-12;

// Tremble in round t (1-based): eps0 * alpha^(t-1).
inline double tremble_at_round(const ModelParams& p, int round) {
  if (round <= 1) return p.epsilon0;
  return p.epsilon0 * std::pow(p.alpha, round - 1);
}

namespace detail {

inline double checked_probability(double v, const char* what) {
  if (v < -kDomainTolerance || v > 1.0 + kDomainTolerance || std::isnan(v)) {
    throw DomainError(std::string(what) + " = " + std::to_string(v) +
                      " is outside [0, 1]");
  }
  return std::clamp(v, 0.0, 1.0);
}

// 1 if lhs > rhs, 0.5 on a tie, 0 otherwise.
inline double threshold(double lhs, double rhs) {
  if (std::abs(lhs - rhs) <= kTieTolerance) return 0.5;
  return lhs > rhs ? 1.0 : 0.0;
}

}  // namespace detail

// Perceived-pi threshold A / (2 + A) at which the equilibrium changes shape.
inline double pi_hat(const GameDesign& d) {
  return d.max_payoff / (2.0 + d.max_payoff);
}

// Bayes-Nash equilibrium, five cases tested in the order A, B, C, D, E.
// Case C is bounded by the same threshold that opens case D; with the
// printed case-A bound in its place, D would be unreachable and p_b would go
// negative for large tremble.
inline StrategyProfile model1_strategy(const ModelParams& params,
                                       const GameDesign& design,
                                       double eps) {
  const double a = design.max_payoff;
  const double pi = params.pi_per;
  const double hat = pi_hat(design);
  const double denom = hat + pi - 2.0 * hat * pi;
  const double bound_ab = 2.0 * hat * (1.0 - pi) / denom;
  const double bound_cd = 2.0 * pi * (1.0 - hat) / denom;
  // The tremble correction has a (1 - eps) denominator; at eps = 1 every
  // observed probability is 1/2 whatever the strategy, so drop it there.
  const double slope = (a + 2.0) * pi - a;
  const double correction = eps < 1.0 ? slope * eps / 2.0 / (1.0 - eps) : 0.0;

  if (pi > hat && eps <= 2.0 / a) {
    if (eps <= bound_ab) {  // case A
      const double p_a = a * (1.0 - pi) / (2.0 * pi) - correction / (2.0 * pi);
      const double q = ((a - 1.0) / a - eps / 2.0) / (1.0 - eps);
      return {detail::checked_probability(p_a, "bayes_nash p_a"), 1.0,
              detail::checked_probability(q, "bayes_nash q")};
    }
    return {0.0, 1.0, 1.0};  // case B
  }
  if (pi <= hat) {
    if (eps <= bound_cd) {  // case C
      const double p_b = 2.0 * pi / (a * (1.0 - pi)) +
                         correction / (a * (1.0 - pi));
      return {1.0, detail::checked_probability(p_b, "bayes_nash p_b"), 0.5};
    }
    return {1.0, 0.0, 0.0};  // case D
  }
  return {1.0, 1.0, 1.0};  // case E: pi > hat with eps > 2 / A
}

// Player 2 keeps its prior belief after Go.
inline StrategyProfile model2_strategy(const ModelParams& params,
                                       const GameDesign& design, double eps) {
  const double a = design.max_payoff;
  const double pi = params.pi_per;
  const double lhs = 2.0 * pi;
  const double rhs = a * (1.0 - pi);
  if (std::abs(lhs - rhs) <= kTieTolerance) return {1.0, 0.5, 0.5};
  if (lhs > rhs) {
    return {detail::threshold(eps * a / 2.0, 1.0),
            detail::threshold(2.0 * (1.0 - eps / 2.0), 1.0), 1.0};
  }
  return {detail::threshold((1.0 - eps / 2.0) * a, 1.0), 0.0, 0.0};
}

// Running frequencies a player has personally observed. Each estimate starts
// at 1/2 with weight one observation:
//   emp  = (1/2 + #left) / (#go + 1)          P(Left | Go)
//   empa = (1/2 + #go in a) / (#a games + 1)   P(Go | world a)
//   empb = (1/2 + #go in b) / (#b games + 1)   P(Go | world b)
struct FictitiousState {
  double emp = 0.5;
  double empa = 0.5;
  double empb = 0.5;
  int num_go = 0;
  int num_left = 0;
  int num_game_a = 0;
  int num_game_b = 0;
  int num_go_a = 0;
  int num_go_b = 0;
};

inline constexpr double kFictitiousPrior = 0.5;

inline FictitiousState fictitious_update(FictitiousState s,
                                         const Outcome& observed) {
  const bool go = observed.p1 == P1Action::kGo;
  if (observed.world == World::kA) {
    ++s.num_game_a;
    if (go) ++s.num_go_a;
    s.empa = (kFictitiousPrior + s.num_go_a) / (s.num_game_a + 1.0);
  } else {
    ++s.num_game_b;
    if (go) ++s.num_go_b;
    s.empb = (kFictitiousPrior + s.num_go_b) / (s.num_game_b + 1.0);
  }
  if (go) {
    ++s.num_go;
    if (observed.p2 == P2Action::kLeft) ++s.num_left;
    s.emp = (kFictitiousPrior + s.num_left) / (s.num_go + 1.0);
  }
  return s;
}

// Player 2's posterior that the world is a, given Go.
inline double fictitious_belief(const FictitiousState& s, double pi_per) {
  const double num = s.empa * pi_per;
  const double den = num + s.empb * (1.0 - pi_per);
  return den > 0.0 ? num / den : pi_per;
}

inline StrategyProfile model3_strategy(const FictitiousState& s,
                                       const ModelParams& params,
                                       const GameDesign& design) {
  const double a = design.max_payoff;
  const double belief = fictitious_belief(s, params.pi_per);
  return {detail::threshold((1.0 - s.emp) * a, 1.0),
          detail::threshold(2.0 * s.emp, 1.0),
          detail::threshold(2.0 * belief, (1.0 - belief) * a)};
}

// Roth-Erev propensities. Player 1 has one decision node per world
// (Go, Stop); player 2 has a single node (Left, Right).
enum class Role { kPlayer1, kPlayer2 };

inline constexpr double kInitialPropensity = 1.0;

struct PropensityState {
  static constexpr int kNodeWorldA = 0;
  static constexpr int kNodeWorldB = 1;
  static constexpr int kNodePlayer2 = 2;

  // nodes[n][0] is Go (or Left), nodes[n][1] is Stop (or Right).
  std::array<std::array<double, 2>, 3> nodes{
      {{kInitialPropensity, kInitialPropensity},
       {kInitialPropensity, kInitialPropensity},
       {kInitialPropensity, kInitialPropensity}}};

  double choice_probability(int node) const {
    const auto& n = nodes[node];
    return n[0] / (n[0] + n[1]);
  }
};

inline StrategyProfile model4_strategy(const PropensityState& s, Role role) {
  StrategyProfile out;
  if (role == Role::kPlayer1) {
    out.p_a = s.choice_probability(PropensityState::kNodeWorldA);
    out.p_b = s.choice_probability(PropensityState::kNodeWorldB);
  } else {
    out.q = s.choice_probability(PropensityState::kNodePlayer2);
  }
  return out;
}

// Discounts the propensities at the visited node by (1 - alpha) and adds
// the reward to the action taken there.
inline PropensityState model4_update(PropensityState s, int node, int action,
                                     double reward, double alpha) {
  if (reward < 0.0) throw InvalidArgument("roth_erev rewards must be >= 0");
  auto& n = s.nodes[node];
  n[0] *= 1.0 - alpha;
  n[1] *= 1.0 - alpha;
  n[action] += reward;
  if (!(n[0] + n[1] > 0.0)) n = {kInitialPropensity, kInitialPropensity};
  return s;
}

inline ObservedStrategy observed_probs(const StrategyProfile& s, double eps) {
  const auto mix = [eps](double p) { return (1.0 - eps) * p + eps / 2.0; };
  return {mix(s.p_a), mix(s.p_b), mix(s.q)};
}

inline double match_likelihood(const ObservedStrategy& obs,
                               const Outcome& o, const GameDesign& design) {
  const bool world_a = o.world == World::kA;
  const double p_world = world_a ? design.prob_a : 1.0 - design.prob_a;
  const double p_go = world_a ? obs.p_a : obs.p_b;
  const double p1 = o.p1 == P1Action::kGo ? p_go : 1.0 - p_go;
  const double p2 = o.p2 == P2Action::kLeft ? obs.q : 1.0 - obs.q;
  return p_world * p1 * p2;
}

}  // namespace optdesign

#endif  // OPTDESIGN_MODELS_HPP
