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

#ifndef OPTDESIGN_STOPGO_HPP
#define OPTDESIGN_STOPGO_HPP

// The Stop-Go game: design points, the eight match outcomes, payoffs,
// perfect-stranger rematching, session datasets and the discretized grid of
// behavioral model parameters.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "optdesign/errors.hpp"
#include "optdesign/random.hpp"

namespace optdesign {

inline constexpr double kMinPayoff = 2.0;
inline constexpr double kMaxPayoff = 6.0;
inline constexpr double kMinPi = 0.1;
inline constexpr double kMaxPi = 0.9;
// Payoff units to dollars, as shown to participants (3.33 units = $10.00).
inline constexpr double kDollarsPerUnit = 3.0;

// An experimental design: the maximum payoff A and the probability pi that
// nature picks world a.
struct GameDesign {
  double max_payoff = 3.33;
  double prob_a = 0.5;

  friend bool operator==(const GameDesign&, const GameDesign&) = default;
};

inline void validate(const GameDesign& d) {
  if (!(d.max_payoff >= kMinPayoff && d.max_payoff <= kMaxPayoff)) {
    throw InvalidArgument("design A must lie in [2, 6], got " +
                          std::to_string(d.max_payoff));
  }
  if (!(d.prob_a >= kMinPi && d.prob_a <= kMaxPi)) {
    throw InvalidArgument("design pi must lie in [0.1, 0.9], got " +
                          std::to_string(d.prob_a));
  }
}

enum class World : std::uint8_t { kA = 0, kB = 1 };
enum class P1Action : std::uint8_t { kGo = 0, kStop = 1 };
enum class P2Action : std::uint8_t { kLeft = 0, kRight = 1 };

// One match. Player 2's choice is recorded even when player 1 stops.
struct Outcome {
  World world = World::kA;
  P1Action p1 = P1Action::kGo;
  P2Action p2 = P2Action::kLeft;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

inline constexpr std::size_t kNumOutcomes = 8;

// Canonical code in [0, 8): a-go-left, a-go-right, a-stop-left,
// a-stop-right, b-go-left, b-go-right, b-stop-left, b-stop-right.
inline constexpr std::uint8_t outcome_code(const Outcome& o) {
  return static_cast<std::uint8_t>(static_cast<unsigned>(o.world) * 4u +
                                   static_cast<unsigned>(o.p1) * 2u +
                                   static_cast<unsigned>(o.p2));
}

inline constexpr Outcome outcome_from_code(std::uint8_t code) {
  return Outcome{static_cast<World>((code >> 2) & 1u),
                 static_cast<P1Action>((code >> 1) & 1u),
                 static_cast<P2Action>(code & 1u)};
}

inline std::array<Outcome, kNumOutcomes> enumerate_outcomes() {
  std::array<Outcome, kNumOutcomes> all{};
  for (std::uint8_t c = 0; c < kNumOutcomes; ++c) all[c] = outcome_from_code(c);
  return all;
}

inline std::string to_string(const Outcome& o) {
  std::string s = o.world == World::kA ? "a" : "b";
  s += o.p1 == P1Action::kGo ? "-go" : "-stop";
  s += o.p2 == P2Action::kLeft ? "-left" : "-right";
  return s;
}

struct Payoffs {
  double p1 = 0.0;
  double p2 = 0.0;

  friend bool operator==(const Payoffs&, const Payoffs&) = default;
};

inline Payoffs payoff(const GameDesign& design, const Outcome& o) {
  if (o.p1 == P1Action::kStop) return {1.0, 1.0};
  const double a = design.max_payoff;
  if (o.world == World::kA) {
    return o.p2 == P2Action::kLeft ? Payoffs{0.0, 2.0} : Payoffs{a, 0.0};
  }
  return o.p2 == P2Action::kLeft ? Payoffs{2.0, 0.0} : Payoffs{0.0, a};
}

inline double to_dollars(double units) { return units * kDollarsPerUnit; }

using BigInt = boost::multiprecision::cpp_int;

// Number of distinct datasets: 8^(pairs * rounds), exact.
inline BigInt count_datasets(int n_pairs, int n_rounds) {
  if (n_pairs < 1 || n_rounds < 1) {
    throw InvalidArgument("count_datasets needs n_pairs >= 1 and n_rounds >= 1");
  }
  const auto exponent = static_cast<unsigned>(n_pairs) *
                        static_cast<unsigned>(n_rounds);
  return boost::multiprecision::pow(BigInt(8), exponent);
}

// ---------------------------------------------------------------------------
// Matching.

struct Pairing {
  int p1 = 0;
  int p2 = 0;

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

// rounds[t][slot] pairs a role-1 player with a role-2 player in round t + 1.
// Role-1 players carry ids [0, n/2), role-2 players ids [n/2, n).
struct MatchingSchedule {
  int n_players = 0;
  std::vector<std::vector<Pairing>> rounds;

  int n_pairs() const { return n_players / 2; }
  int n_rounds() const { return static_cast<int>(rounds.size()); }
  std::size_t n_matches() const {
    return static_cast<std::size_t>(n_pairs()) * rounds.size();
  }
};

// Cyclic rotation: in round t the role-1 player in slot i meets the role-2
// player in slot (i + t) mod (n/2). The seed permutes which player occupies
// each slot.
inline MatchingSchedule perfect_stranger_schedule(int n_players, int n_rounds,
                                                  std::uint64_t seed) {
  if (n_players < 2 || n_players % 2 != 0) {
    throw InvalidArgument("perfect stranger matching needs an even number of "
                          "players >= 2, got " + std::to_string(n_players));
  }
  const int m = n_players / 2;
  if (n_rounds < 1) throw InvalidArgument("n_rounds must be >= 1");
  if (n_rounds > m) {
    throw InfeasibleSchedule(
        "perfect stranger matching of " + std::to_string(n_players) +
        " players supports at most " + std::to_string(m) + " rounds, got " +
        std::to_string(n_rounds));
  }
  std::vector<int> role1(m), role2(m);
  std::iota(role1.begin(), role1.end(), 0);
  std::iota(role2.begin(), role2.end(), m);
  if (seed != 0) {
    Rng rng = make_rng(seed, "schedule");
    shuffle_range(role1.begin(), role1.end(), rng);
    shuffle_range(role2.begin(), role2.end(), rng);
  }
  MatchingSchedule s;
  s.n_players = n_players;
  s.rounds.resize(n_rounds);
  for (int t = 0; t < n_rounds; ++t) {
    s.rounds[t].reserve(m);
    for (int i = 0; i < m; ++i) {
      s.rounds[t].push_back({role1[i], role2[(i + t) % m]});
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Session data.

struct MatchRecord {
  int round = 1;  // 1-based
  int pair = 0;   // slot within the round
  int p1 = 0;
  int p2 = 0;
  Outcome outcome;
  bool bot_lineage = false;

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

struct SessionDataset {
  GameDesign design;
  int n_pairs = 0;
  int n_rounds = 0;
  std::vector<MatchRecord> records;  // ordered by round

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
};

// Checks the structural invariants of a complete session: pairs x rounds
// records, rounds non-decreasing, each player at most once per round and
// roles never swapping.
inline void validate_session(const SessionDataset& data, bool require_complete) {
  if (require_complete &&
      data.records.size() !=
          static_cast<std::size_t>(data.n_pairs) * data.n_rounds) {
    throw InvalidArgument("session has " + std::to_string(data.records.size()) +
                          " records, expected n_pairs * n_rounds");
  }
  std::vector<std::pair<int, int>> role;  // (id, role)
  int last_round = 0;
  std::vector<int> seen_this_round;
  for (const auto& r : data.records) {
    if (r.round < 1) throw InvalidArgument("round numbers start at 1");
    if (r.round < last_round) {
      throw InvalidArgument("records must be ordered by round");
    }
    if (r.round != last_round) {
      seen_this_round.clear();
      last_round = r.round;
    }
    for (auto [id, rl] : {std::pair{r.p1, 1}, std::pair{r.p2, 2}}) {
      if (std::find(seen_this_round.begin(), seen_this_round.end(), id) !=
          seen_this_round.end()) {
        throw InvalidArgument("player " + std::to_string(id) +
                              " appears twice in round " +
                              std::to_string(r.round));
      }
      seen_this_round.push_back(id);
      auto it = std::find_if(role.begin(), role.end(),
                             [id = id](const auto& e) { return e.first == id; });
      if (it == role.end()) {
        role.emplace_back(id, rl);
      } else if (it->second != rl) {
        throw InvalidArgument("player " + std::to_string(id) +
                              " switches roles");
      }
    }
  }
}

// Builds a dataset from a schedule and one outcome code per match, in
// schedule order (round-major, then slot).
inline SessionDataset make_session(const GameDesign& design,
                                   const MatchingSchedule& schedule,
                                   std::span<const std::uint8_t> codes) {
  if (codes.size() != schedule.n_matches()) {
    throw InvalidArgument("outcome count does not match the schedule");
  }
  SessionDataset d;
  d.design = design;
  d.n_pairs = schedule.n_pairs();
  d.n_rounds = schedule.n_rounds();
  d.records.reserve(codes.size());
  std::size_t k = 0;
  for (int t = 0; t < schedule.n_rounds(); ++t) {
    for (int slot = 0; slot < schedule.n_pairs(); ++slot) {
      const Pairing& p = schedule.rounds[t][slot];
      d.records.push_back(
          {t + 1, slot, p.p1, p.p2, outcome_from_code(codes[k++]), false});
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Model parameters.

struct ModelParams {
  double epsilon0 = 0.0;  // initial tremble rate
  double alpha = 0.0;     // learning rate
  double delta = 0.0;     // misperception radius
  double pi_per = 0.5;    // perceived probability of world a

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline constexpr int kNumEpsilon = 34;
inline constexpr int kNumAlpha = 34;
inline constexpr int kNumDelta = 7;
inline constexpr int kNumPiPer = 7;
inline constexpr double kMaxDelta = 0.2;
inline constexpr double kPiPerFloor = 0.01;
inline constexpr double kPiPerCeil = 0.99;

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  }
  if (n > 1) v.back() = hi;
  return v;
}

struct GridIndex {
  int epsilon = 0;
  int alpha = 0;
  int delta = 0;
  int pi_per = 0;

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

// Uniform grid over (epsilon0, alpha, delta, pi_per). For each delta, pi_per
// takes 7 evenly spaced values on [pi - delta, pi + delta] clamped to
// [0.01, 0.99]; at delta = 0 all seven coincide with pi.
class ParamGrid {
 public:
  explicit ParamGrid(const GameDesign& design)
      : design_(design),
        epsilon_(linspace(0.0, 1.0, kNumEpsilon)),
        alpha_(linspace(0.0, 1.0, kNumAlpha)),
        delta_(linspace(0.0, kMaxDelta, kNumDelta)) {
    validate(design);
    pi_per_.reserve(kNumDelta);
    for (double d : delta_) {
      const double lo = std::max(design.prob_a - d, kPiPerFloor);
      const double hi = std::min(design.prob_a + d, kPiPerCeil);
      pi_per_.push_back(linspace(lo, hi, kNumPiPer));
    }
  }

  // Grid holding a single parameter combination; handy for tests.
  static ParamGrid single(const GameDesign& design, const ModelParams& p) {
    ParamGrid g(design);
    g.epsilon_ = {p.epsilon0};
    g.alpha_ = {p.alpha};
    g.delta_ = {p.delta};
    g.pi_per_ = {{p.pi_per}};
    return g;
  }

  const GameDesign& design() const { return design_; }
  const std::vector<double>& epsilon_values() const { return epsilon_; }
  const std::vector<double>& alpha_values() const { return alpha_; }
  const std::vector<double>& delta_values() const { return delta_; }
  const std::vector<double>& pi_per_values(int delta_index) const {
    return pi_per_.at(delta_index);
  }

  std::size_t size() const {
    return epsilon_.size() * alpha_.size() * delta_.size() *
           pi_per_.front().size();
  }

  GridIndex index_of(std::size_t linear) const {
    GridIndex g;
    const std::size_t np = pi_per_.front().size();
    g.pi_per = static_cast<int>(linear % np);
    linear /= np;
    g.delta = static_cast<int>(linear % delta_.size());
    linear /= delta_.size();
    g.alpha = static_cast<int>(linear % alpha_.size());
    g.epsilon = static_cast<int>(linear / alpha_.size());
    return g;
  }

  ModelParams at(std::size_t linear) const {
    const GridIndex g = index_of(linear);
    return {epsilon_[g.epsilon], alpha_[g.alpha], delta_[g.delta],
            pi_per_[g.delta][g.pi_per]};
  }

 private:
  GameDesign design_;
  std::vector<double> epsilon_;
  std::vector<double> alpha_;
  std::vector<double> delta_;
  std::vector<std::vector<double>> pi_per_;
};

}  // namespace optdesign

#endif  // OPTDESIGN_STOPGO_HPP
