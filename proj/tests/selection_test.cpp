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

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "optdesign/selection.hpp"
#include "optdesign/session_csv.hpp"

namespace optdesign {
namespace {

const GameDesign kDesign{3.0, 0.5};

SessionDataset simulated(ModelId m, int players, int rounds, std::uint64_t seed,
                         const GameDesign& design = kDesign) {
  const auto sched = perfect_stranger_schedule(players, rounds, seed);
  const ModelParams p{0.2, 0.5, 0.1, design.prob_a};
  return simulate_dataset(m, p, design, sched, seed);
}

// A match is dropped iff a chain of matches, each sharing a player with the
// next and played in a strictly later round, leads to it from a flagged match.
std::vector<bool> dropped_by_reachability(const SessionDataset& d) {
  const std::size_t n = d.records.size();
  std::vector<bool> dropped(n, false);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (d.records[i].bot_lineage) {
      dropped[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const auto& f = d.records[stack.back()];
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      const auto& g = d.records[j];
      const bool shares = g.p1 == f.p1 || g.p1 == f.p2 || g.p2 == f.p1 || g.p2 == f.p2;
      if (!dropped[j] && g.round > f.round && shares) {
        dropped[j] = true;
        stack.push_back(j);
      }
    }
  }
  return dropped;
}

TEST(Exclusion, NoFlagsIsIdentity) {
  const auto d = simulated(ModelId::kFictitious, 10, 5, 3);
  EXPECT_EQ(exclusion_filter(d).records, d.records);
}

TEST(Exclusion, MatchesReachabilityOracle) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto d = simulated(ModelId::kBayesNash, 12, 6, seed);
    Rng rng = make_rng(seed, "flags");
    for (auto& r : d.records) r.bot_lineage = uniform01(rng) < 0.05;
    const auto dropped = dropped_by_reachability(d);
    std::vector<MatchRecord> expect;
    for (std::size_t i = 0; i < d.records.size(); ++i) {
      if (!dropped[i]) expect.push_back(d.records[i]);
    }
    const auto out = exclusion_filter(d);
    ASSERT_EQ(out.records, expect) << "seed " << seed;
    EXPECT_EQ(exclusion_filter(out).records, out.records);
  }
}

TEST(Exclusion, AllFlaggedIsEmpty) {
  auto d = simulated(ModelId::kBayesNash, 6, 3, 2);
  for (auto& r : d.records) r.bot_lineage = true;
  EXPECT_TRUE(exclusion_filter(d).empty());
}

TEST(Exclusion, FirstRoundFlagSpreads) {
  // 6 players, slot 0 of round 1 flagged: both players are tainted, and in
  // round 2 they meet two fresh players, who are tainted for round 3.
  auto d = simulated(ModelId::kBayesNash, 6, 3, 0);
  d.records[0].bot_lineage = true;
  const auto out = exclusion_filter(d);
  // Round 1 keeps 2, round 2 keeps 1, round 3 keeps none.
  EXPECT_EQ(out.size(), 3u);
}

TEST(Odds, IdenticalModelsTie) {
  const auto d = simulated(ModelId::kBayesNash, 6, 3, 4);
  const std::array<ModelId, 2> models{ModelId::kBayesNash, ModelId::kBayesNash};
  const auto rep = likelihood_odds(d, models, Exec{1});
  EXPECT_TRUE(rep.ties);
  EXPECT_EQ(rep.best, 0u);
  EXPECT_EQ(rep.models[0].odds, 1.0);
  EXPECT_EQ(rep.models[1].odds, 1.0);
}

TEST(Odds, SingleModel) {
  const auto d = simulated(ModelId::kFictitious, 6, 3, 4);
  const std::array<ModelId, 1> models{ModelId::kFictitious};
  const auto rep = likelihood_odds(d, models, Exec{1});
  EXPECT_FALSE(rep.ties);
  EXPECT_EQ(rep.models[0].odds, 1.0);
  EXPECT_EQ(rep.matches_used, d.size());
}

TEST(Odds, ShiftInvariant) {
  const std::array<ModelId, 3> models{ModelId::kBayesNash, ModelId::kNoUpdate,
                                      ModelId::kRothErev};
  const std::array<double, 3> lls{-10.0, -12.5, -11.0};
  const std::array<double, 3> shifted{-1010.0, -1012.5, -1011.0};
  const auto a = odds_from_log_likelihoods(kDesign, 5, models, lls);
  const auto b = odds_from_log_likelihoods(kDesign, 5, models, shifted);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.models[i].odds, b.models[i].odds, 1e-12);
  EXPECT_EQ(a.best, 0u);
  EXPECT_NEAR(a.models[1].odds, std::exp(-2.5), 1e-15);
  double sum = 0.0;
  for (const auto& m : a.models) {
    EXPECT_GT(m.odds, 0.0);
    EXPECT_LE(m.odds, 1.0);
    sum += m.odds;
  }
  EXPECT_GE(sum, 1.0);
}

TEST(Odds, LogLikelihoodsAddAcrossSessions) {
  const auto s1 = simulated(ModelId::kBayesNash, 6, 3, 7);
  const auto s2 = simulated(ModelId::kBayesNash, 6, 3, 8);
  const std::array<ModelId, 2> models{ModelId::kBayesNash, ModelId::kFictitious};
  const std::vector<SessionDataset> both{s1, s2};
  const auto joint = likelihood_odds(both, models, Exec{1});
  const auto a = likelihood_odds(s1, models, Exec{1});
  const auto b = likelihood_odds(s2, models, Exec{1});
  EXPECT_EQ(joint.matches_used, s1.size() + s2.size());
  for (std::size_t m = 0; m < 2; ++m) {
    EXPECT_NEAR(joint.models[m].log_likelihood,
                a.models[m].log_likelihood + b.models[m].log_likelihood, 1e-9);
  }
  std::vector<SessionDataset> mixed{s1, simulated(ModelId::kBayesNash, 6, 3, 8, {2.0, 0.5})};
  EXPECT_THROW(likelihood_odds(mixed, models), InvalidArgument);
  EXPECT_THROW(likelihood_odds(SessionDataset{kDesign}, models), InvalidArgument);
}

TEST(Odds, JsonShape) {
  const auto d = simulated(ModelId::kBayesNash, 6, 3, 4);
  const std::array<ModelId, 2> models{ModelId::kBayesNash, ModelId::kRothErev};
  const auto j = to_json(likelihood_odds(d, models, Exec{1}));
  EXPECT_EQ(j["design"]["A"], 3.0);
  EXPECT_EQ(j["matches_used"], 9);
  EXPECT_EQ(j["models"][0]["id"], "bayes_nash");
  EXPECT_EQ(j["models"].size(), 2u);
  EXPECT_TRUE(j["ties"].is_boolean());
}

TEST(Bootstrap, BlockSubsampleShape) {
  const auto d = simulated(ModelId::kBayesNash, 10, 4, 5);
  for (std::size_t size = 1; size <= d.size(); ++size) {
    Rng rng = make_rng(size, "t");
    const auto sub = block_subsample(d, size, rng);
    ASSERT_EQ(sub.size(), size);
    // Whole slots, except one slot cut to its earliest rounds.
    std::map<int, int> per_slot;
    for (const auto& r : sub.records) ++per_slot[r.pair];
    int partial = 0;
    for (const auto& [slot, count] : per_slot) {
      if (count != d.n_rounds) ++partial;
      int expect_round = 1;
      for (const auto& r : sub.records) {
        if (r.pair == slot) EXPECT_EQ(r.round, expect_round++);
      }
    }
    EXPECT_LE(partial, 1);
    for (std::size_t i = 1; i < sub.size(); ++i) {
      EXPECT_LE(sub.records[i - 1].round, sub.records[i].round);
    }
  }
  Rng rng = make_rng(1, "t");
  EXPECT_THROW(block_subsample(d, d.size() + 1, rng), InvalidArgument);
}

TEST(Bootstrap, FullSizeMatchesOdds) {
  const auto d = simulated(ModelId::kFictitious, 6, 3, 6);
  const std::array<ModelId, 3> models{ModelId::kBayesNash, ModelId::kFictitious,
                                      ModelId::kRothErev};
  const auto curve = bootstrap_odds(d, models, {d.size()}, 1, 11, Exec{1});
  const auto rep = likelihood_odds(d, models, Exec{1});
  ASSERT_EQ(curve.samples.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_NEAR(curve.samples[m].odds, rep.models[m].odds, 1e-12);
    EXPECT_EQ(curve.summary[m].sd, 0.0);
  }
}

TEST(Bootstrap, ReproducibleAndThreadIndependent) {
  const auto d = simulated(ModelId::kBayesNash, 10, 3, 6);
  const std::array<ModelId, 2> models{ModelId::kBayesNash, ModelId::kNoUpdate};
  const auto a = bootstrap_odds(d, models, {5, 10}, 4, 3, Exec{1});
  const auto b = bootstrap_odds(d, models, {5, 10}, 4, 3, Exec{3});
  std::ostringstream sa, sb;
  write_bootstrap_csv(sa, a);
  write_bootstrap_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.samples.size(), 2u * 4u * 2u);
  EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')), "size,replicate,model,odds");
  EXPECT_THROW(bootstrap_odds(d, models, {0}, 4, 3), InvalidArgument);
  EXPECT_THROW(bootstrap_odds(d, models, {d.size() + 1}, 4, 3), InvalidArgument);
  EXPECT_THROW(bootstrap_odds(d, models, {5}, 0, 3), InvalidArgument);
}

TEST(Posterior, SumsToOne) {
  const auto d = simulated(ModelId::kBayesNash, 6, 3, 9);
  const ParamGrid grid(d.design);
  const auto post = parameter_posterior(d, ModelId::kBayesNash, grid, Exec{1});
  ASSERT_EQ(post.weights.size(), grid.size());
  double sum = 0.0;
  for (double w : post.weights) {
    EXPECT_GE(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
  for (double w : post.weights) EXPECT_LE(w, post.weights[post.mode]);
}

TEST(Posterior, UninformativeDataGivesUniform) {
  // In round 1 every roth_erev player chooses uniformly, whatever the
  // parameters, so single-round data carries no information about them.
  const auto d = simulated(ModelId::kRothErev, 6, 1, 9);
  const ParamGrid grid(d.design);
  const auto post = parameter_posterior(d, ModelId::kRothErev, grid, Exec{1});
  for (double w : post.weights) EXPECT_NEAR(w, 1.0 / grid.size(), 1e-15);
  EXPECT_EQ(post.mode, 0u);
  EXPECT_THROW(parameter_posterior(SessionDataset{kDesign}, ModelId::kRothErev, grid),
               InvalidArgument);
}

TEST(Posterior, CsvHeader) {
  const auto d = simulated(ModelId::kRothErev, 4, 1, 1);
  const ParamGrid grid(d.design);
  std::ostringstream os;
  write_posterior_csv(os, parameter_posterior(d, ModelId::kRothErev, grid, Exec{1}), grid);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "epsilon0,alpha,delta,pi_per,weight");
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), grid.size() + 1);
}

TEST(SessionCsv, RoundTrip) {
  auto d = simulated(ModelId::kFictitious, 8, 4, 12);
  d.records[3].bot_lineage = true;
  std::stringstream ss;
  write_session_csv(ss, d);
  const auto back = read_session_csv(ss, d.design);
  EXPECT_EQ(back.records, d.records);
  EXPECT_EQ(back.n_pairs, 4);
  EXPECT_EQ(back.n_rounds, 4);
}

void expect_parse_error(const std::string& body, std::size_t row, const std::string& column) {
  std::istringstream is(std::string(kSessionHeader) + "\n" + body);
  try {
    read_session_csv(is, kDesign);
    ADD_FAILURE() << "no error for: " << body;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), row) << body;
    EXPECT_EQ(e.column(), column) << body;
  }
}

TEST(SessionCsv, RejectsMalformedRows) {
  expect_parse_error("1,0,0,1,c,go,left,0\n", 2, "world");
  expect_parse_error("1,0,0,1,a,go,left,0\n1,1,2,3,a,run,left,0\n", 3, "p1_action");
  expect_parse_error("1,0,0,1,a,go,up,0\n", 2, "p2_action");
  expect_parse_error("1,0,0,1,a,go,left,yes\n", 2, "bot_lineage");
  expect_parse_error("x,0,0,1,a,go,left,0\n", 2, "round");
  expect_parse_error("1,0,0,1,a,go\n", 2, "*");
  expect_parse_error("2,0,0,1,a,go,left,0\n1,0,0,2,a,go,left,0\n", 3, "round");
  std::istringstream bad_header("round,pair\n");
  EXPECT_THROW(read_session_csv(bad_header, kDesign), ParseError);
  std::istringstream empty("");
  EXPECT_THROW(read_session_csv(empty, kDesign), ParseError);
}

}  // namespace
}  // namespace optdesign
