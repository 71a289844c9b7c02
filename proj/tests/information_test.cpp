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
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "optdesign/information.hpp"

namespace optdesign {
namespace {

LikelihoodTable table_of(std::vector<std::vector<double>> cols) {
  LikelihoodTable t;
  for (std::size_t x = 0; x < cols.front().size(); ++x) t.keys.push_back(std::to_string(x));
  t.likelihood = std::move(cols);
  return t;
}

TEST(KlOneSided, IdenticalModelsGiveZero) {
  const auto t = table_of({{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}});
  EXPECT_NEAR(kl_one_sided(t, ModelPrior::uniform(3), 0).value, 0.0, 1e-15);
  EXPECT_NEAR(average_information(t, ModelPrior::uniform(3)).value, 0.0, 1e-15);
}

TEST(KlOneSided, HandExample) {
  const auto t = table_of({{1.0, 0.0}, {0.5, 0.5}});
  const KlResult r = kl_one_sided(t, ModelPrior::uniform(2), 0);
  EXPECT_NEAR(r.value, std::log(2.0), 1e-15);
  EXPECT_FALSE(r.saturated);
}

TEST(KlOneSided, SaturationFlag) {
  const auto t = table_of({{0.5, 0.5}, {1.0, 0.0}});
  const KlResult r = kl_one_sided(t, ModelPrior::uniform(2), 0);
  EXPECT_TRUE(r.saturated);
  // Target mass 0.5 per row, competitor weight 0.5; row 2 is floored at 1e-300.
  EXPECT_NEAR(r.value, 0.5 * std::log(0.5 * 0.5 / 0.5) + 0.5 * std::log(0.5 * 0.5 / 1e-300), 1e-9);
}

TEST(KlOneSided, RowOrderInvariance) {
  const auto t = table_of({{0.1, 0.6, 0.3}, {0.4, 0.4, 0.2}, {0.3, 0.3, 0.4}});
  LikelihoodTable p = t;
  for (auto& col : p.likelihood) std::reverse(col.begin(), col.end());
  std::reverse(p.keys.begin(), p.keys.end());
  const ModelPrior prior{{0.5, 0.3, 0.2}};
  EXPECT_DOUBLE_EQ(kl_one_sided(t, prior, 1).value, kl_one_sided(p, prior, 1).value);
}

TEST(AverageInformation, SymmetricTwoModels) {
  const auto t = table_of({{0.7, 0.3}, {0.3, 0.7}});
  const ModelPrior prior = ModelPrior::uniform(2);
  const double i0 = kl_one_sided(t, prior, 0).value;
  const double i1 = kl_one_sided(t, prior, 1).value;
  EXPECT_NEAR(average_information(t, prior).value, 0.5 * (i0 + i1), 1e-15);
  EXPECT_NEAR(i0, 0.7 * std::log(0.7 / 0.3) + 0.3 * std::log(0.3 / 0.7), 1e-15);
}

TEST(AverageInformation, NeedsTwoModels) {
  const auto t = table_of({{1.0}});
  EXPECT_THROW(average_information(t, ModelPrior::uniform(1)), InvalidArgument);
  EXPECT_THROW(kl_one_sided(t, ModelPrior::uniform(1), 0), InvalidArgument);
}

TEST(Prior, Validation) {
  EXPECT_THROW(validate(ModelPrior{{0.5, 0.6}}, 2), InvalidArgument);
  EXPECT_THROW(validate(ModelPrior{{1.0}}, 2), InvalidArgument);
  EXPECT_THROW(validate(ModelPrior{{-0.5, 1.5}}, 2), InvalidArgument);
}

TEST(KlOneSided, NonNegativeOnRandomTables) {
  Rng rng = make_rng(21, "kl-tables");
  for (int k = 0; k < 1000; ++k) {
    const std::size_t models = 2 + uniform_index(rng, 3);
    const std::size_t rows = 1 + uniform_index(rng, 12);
    std::vector<std::vector<double>> cols(models, std::vector<double>(rows));
    for (auto& c : cols) {
      for (auto& v : c) v = uniform01(rng) < 0.2 ? 0.0 : uniform01(rng);
      double s = std::accumulate(c.begin(), c.end(), 0.0);
      if (s == 0.0) c[0] = s = 1.0;
      for (auto& v : c) v /= s;
    }
    std::vector<double> w(models);
    for (auto& v : w) v = 0.05 + uniform01(rng);
    const double ws = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= ws;
    const auto t = table_of(cols);
    for (std::size_t target = 0; target < models; ++target) {
      ASSERT_GE(kl_one_sided(t, {w}, target).value, -1e-9);
    }
    ASSERT_GE(average_information(t, {w}).value, -1e-9);
  }
}

const std::vector<ModelId> kThree = {ModelId::kBayesNash, ModelId::kNoUpdate,
                                     ModelId::kFictitious};

TEST(ExactTable, OneMatchHasEightRows) {
  const auto t = exact_table({3.33, 0.5}, kThree, default_schedule(1, 1));
  EXPECT_EQ(t.rows(), 8u);
}

TEST(ExactTable, MatchesBruteForceAndSumsToOne) {
  const GameDesign d{2.6, 0.45};
  const auto sched = default_schedule(2, 1);
  const std::vector<ModelId> models(kAllModels.begin(), kAllModels.end());
  const auto t = exact_table(d, models, sched);
  ASSERT_EQ(t.rows(), 64u);
  const ParamGrid g(d);
  for (std::size_t m = 0; m < models.size(); ++m) {
    double total = 0.0;
    for (std::size_t x = 0; x < 64; ++x) {
      const std::vector<std::uint8_t> codes = {static_cast<std::uint8_t>(x / 8),
                                               static_cast<std::uint8_t>(x % 8)};
      const double brute = dataset_likelihood(models[m], make_session(d, sched, codes), g);
      const auto it = std::find(t.keys.begin(), t.keys.end(), key_from_codes(codes));
      ASSERT_NE(it, t.keys.end());
      EXPECT_NEAR(t.likelihood[m][static_cast<std::size_t>(it - t.keys.begin())], brute, 1e-12);
      total += t.likelihood[m][static_cast<std::size_t>(it - t.keys.begin())];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(ExactInformation, IdenticalModelsAndCap) {
  const std::vector<ModelId> same = {ModelId::kNoUpdate, ModelId::kNoUpdate};
  const auto p = exact_information({3.0, 0.5}, same, ModelPrior::uniform(2), 2, 1,
                                   InfoObjective::one_sided(0));
  EXPECT_NEAR(p.value, 0.0, 1e-12);
  EXPECT_EQ(count_datasets(5, 1), 32768);
  EXPECT_THROW(exact_information({3.0, 0.5}, kThree, ModelPrior::uniform(3), 5, 1,
                                 InfoObjective::one_sided(0), 1000.0),
               EnumerationCapExceeded);
  EXPECT_THROW(exact_information({3.0, 0.5}, kThree, ModelPrior::uniform(3), 5, 3,
                                 InfoObjective::one_sided(0)),
               EnumerationCapExceeded);
}

TEST(SampledInformation, Reproducible) {
  const auto sched = default_schedule(3, 1);
  const auto a = sampled_information({2.5, 0.5}, kThree, ModelPrior::uniform(3), 2000, sched, 9,
                                     InfoObjective::one_sided(0), Exec{1});
  const auto b = sampled_information({2.5, 0.5}, kThree, ModelPrior::uniform(3), 2000, sched, 9,
                                     InfoObjective::one_sided(0), Exec{2});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.samples, 2000u);
  EXPECT_EQ(a.mode, InfoMode::kSampled);
}

TEST(SampledInformation, IdenticalModelsGiveZero) {
  const std::vector<ModelId> same = {ModelId::kBayesNash, ModelId::kBayesNash};
  for (std::size_t k : {1u, 50u}) {
    const auto p = sampled_information({2.5, 0.5}, same, ModelPrior::uniform(2), k,
                                       default_schedule(2, 1), 3, InfoObjective::one_sided(0));
    EXPECT_NEAR(p.value, 0.0, 1e-12);
    EXPECT_FALSE(p.saturated);
  }
}

TEST(SampledInformation, SampledTableColumnsAreFrequencies) {
  const auto t = sampled_table({3.0, 0.4}, kThree, 1234, default_schedule(2, 1), 5);
  for (const auto& col : t.likelihood) {
    EXPECT_NEAR(std::accumulate(col.begin(), col.end(), 0.0), 1.0, 1e-12);
    for (double v : col) {
      const double count = v * 1234;
      EXPECT_NEAR(count, std::round(count), 1e-9);
    }
  }
  EXPECT_TRUE(std::is_sorted(t.keys.begin(), t.keys.end()));
}

TEST(SampledInformation, VarianceShrinksWithK) {
  const auto sched = default_schedule(2, 1);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k : {100u, 1000u, 10000u}) {
    std::vector<double> v;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      v.push_back(sampled_information({3.33, 0.5}, kThree, ModelPrior::uniform(3), k, sched, seed,
                                      InfoObjective::one_sided(0), Exec{1})
                      .value);
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= v.size() - 1;
    EXPECT_LT(var, prev) << "K=" << k;
    prev = var;
  }
}

TEST(InfoPoint, CsvRow) {
  const InfoPoint p{{2.0, 0.5}, 0.25, InfoMode::kSampled, 10000, 7, false};
  EXPECT_EQ(info_csv_header(), "A,pi,value,mode,K,seed,saturated");
  EXPECT_EQ(to_csv_row(p), "2,0.5,0.25,sampled,10000,7,0");
}

TEST(Objective, CommonSeedAcrossDesigns) {
  ObjectiveConfig c;
  c.samples = 500;
  c.seed = 4;
  const InformationObjective f(c, Exec{1});
  const InfoPoint a = f({2.0, 0.5});
  EXPECT_EQ(a.seed, 4u);
  EXPECT_EQ(a.value, f({2.0, 0.5}).value);
}

}  // namespace
}  // namespace optdesign
