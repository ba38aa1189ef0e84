// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "rationale/common/error.hpp"
#include "rationale/common/text.hpp"
#include "rationale/explain/explain.hpp"
#include "rationale/trainer/metrics.hpp"
#include "support/fixtures.hpp"

using namespace rationale;
using rationale::testing::ConstantModel;
using rationale::testing::LinearBowModel;

namespace {

struct Oracle {
  std::vector<std::string> vocabulary;
  std::map<std::string, double> weights;
};

Oracle random_oracle(std::uint64_t seed, std::size_t size) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Oracle o;
  for (std::size_t i = 0; i < size; ++i) {
    o.vocabulary.push_back("w" + std::to_string(i));
    o.weights[o.vocabulary.back()] = dist(rng);
  }
  return o;
}

std::string random_sentence(const Oracle& o, std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, o.vocabulary.size() - 1);
  std::vector<std::string> words;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) words.push_back(o.vocabulary[pick(rng)]);
  return text::join(words);
}

}  // namespace

TEST(ExplanationConfig, Validation) {
  explain::ExplanationConfig c;
  EXPECT_NO_THROW(c.validate());
  c.theta = 1.5;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.num_perturbations = 5;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.kernel_width = 0.0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(ExplainLocal, ShapeAndProvenance) {
  LinearBowModel model({{"bad", 2.0}, {"good", -2.0}}, 0.0);
  const auto e = explain::explain_local(model, "a bad and good day");
  ASSERT_EQ(e.input_tokens.size(), 5u);
  ASSERT_EQ(e.scores_per_class.size(), 2u);
  ASSERT_EQ(e.highlighted.size(), 2u);
  for (const auto& row : e.scores_per_class) EXPECT_EQ(row.size(), 5u);
  EXPECT_EQ(e.config_used.num_perturbations, 1000);
  EXPECT_EQ(e.prediction.input_text, "a bad and good day");
  EXPECT_THROW(explain::explain_local(model, "   "), InputError);
}

// Property: highlighted sets are exactly the scores above theta.
TEST(ExplainLocal, HighlightConsistency) {
  const auto oracle = random_oracle(3, 30);
  LinearBowModel model(oracle.weights, 0.1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> theta(0.0, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    explain::ExplanationConfig config;
    config.theta = theta(rng);
    config.num_perturbations = 200;
    const auto e = explain::explain_local(model, random_sentence(oracle, rng, 2, 12), config);
    for (std::size_t c = 0; c < e.scores_per_class.size(); ++c) {
      std::vector<std::size_t> expected;
      for (std::size_t i = 0; i < e.scores_per_class[c].size(); ++i) {
        if (e.scores_per_class[c][i] > config.theta) expected.push_back(i);
      }
      EXPECT_EQ(e.highlighted[c], expected);
    }
  }
}

TEST(ExplainLocal, SeedDeterminism) {
  const auto oracle = random_oracle(4, 20);
  LinearBowModel model(oracle.weights, -0.2);
  explain::ExplanationConfig config;
  config.num_perturbations = 300;
  config.random_seed = 42;
  const std::string s = "w1 w2 w3 w4 w5 w6 w7";
  const auto a = explain::explain_local(model, s, config);
  const auto b = explain::explain_local(model, s, config);
  EXPECT_EQ(a.scores_per_class, b.scores_per_class);
  config.random_seed = 43;
  const auto c = explain::explain_local(model, s, config);
  EXPECT_NE(a.scores_per_class, c.scores_per_class);
}

TEST(ExplainLocal, ConstantModelHasZeroAttributions) {
  ConstantModel model({0.2, 0.5, 0.3});
  for (const std::string s : {"one", "one two", "a b c d e f g h"}) {
    const auto e = explain::explain_local(model, s);
    for (const auto& row : e.scores_per_class) {
      for (double v : row) EXPECT_NEAR(v, 0.0, 1e-8) << s;
    }
    for (const auto& h : e.highlighted) EXPECT_TRUE(h.empty());
  }
}

TEST(ExplainLocal, SingleTokenUsesBackoffDifference) {
  LinearBowModel model({{"bad", 1.5}}, -0.5);
  const auto e = explain::explain_local(model, "bad");
  const double p_full = model.positive_probability({"bad"});
  const double p_empty = model.positive_probability({});
  EXPECT_NEAR(e.scores_per_class[1][0], p_full - p_empty, 1e-12);
  EXPECT_NEAR(e.scores_per_class[0][0], p_empty - p_full, 1e-12);
}

// Property: sign agreement with exact leave-one-out deltas on linear bag-of-words models.
TEST(ExplainLocal, AgreesWithLeaveOneOutOracle) {
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const auto oracle = random_oracle(seed, 50);
    LinearBowModel model(oracle.weights, 0.0);
    std::mt19937_64 rng(seed);
    for (int s = 0; s < 10; ++s) {
      const auto sentence = random_sentence(oracle, rng, 4, 14);
      const auto words = text::split_words(sentence);
      const auto e = explain::explain_local(model, sentence);
      const double full = model.positive_probability(words);
      std::vector<double> deltas, scores;
      for (std::size_t i = 0; i < words.size(); ++i) {
        auto rest = words;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        const double delta = full - model.positive_probability(rest);
        deltas.push_back(delta);
        scores.push_back(e.scores_per_class[1][i]);
        if (std::abs(delta) > 0.01) {
          EXPECT_EQ(delta > 0, e.scores_per_class[1][i] > 0) << sentence << " token " << i;
        }
      }
      EXPECT_GE(trainer::spearman(scores, deltas), 0.8) << sentence;
    }
  }
}

TEST(Rehighlight, MatchesFreshExplanationAtNewTheta) {
  const auto oracle = random_oracle(6, 20);
  LinearBowModel model(oracle.weights, 0.0);
  explain::ExplanationConfig config;
  config.num_perturbations = 200;
  const std::string s = "w0 w3 w5 w8 w13";
  const auto base = explain::explain_local(model, s, config);
  for (double theta : {0.0, 0.02, 0.05, 0.2, 1.0}) {
    config.theta = theta;
    const auto fresh = explain::explain_local(model, s, config);
    const auto re = explain::rehighlight(base, theta);
    EXPECT_EQ(re.highlighted, fresh.highlighted);
    EXPECT_EQ(re.scores_per_class, base.scores_per_class);
    EXPECT_EQ(re.config_used.theta, theta);
  }
  EXPECT_THROW(explain::rehighlight(base, -0.1), ArgumentError);
  EXPECT_THROW(explain::rehighlight(base, 1.1), ArgumentError);
}

TEST(ExplainLocal, JsonRoundTrip) {
  LinearBowModel model({{"x", 1.0}}, 0.0);
  const auto e = explain::explain_local(model, "x y z");
  nlohmann::json j = e;
  const auto back = j.get<explain::LocalExplanation>();
  EXPECT_EQ(back.input_tokens, e.input_tokens);
  EXPECT_EQ(back.scores_per_class, e.scores_per_class);
  EXPECT_EQ(back.highlighted, e.highlighted);
  EXPECT_EQ(back.config_used.theta, e.config_used.theta);
  EXPECT_EQ(j.at("theta"), e.config_used.theta);
}

TEST(ExplainGlobal, RanksStandaloneUnigramsWithLexicographicTies) {
  LinearBowModel model({{"bad", 3.0}, {"awful", 3.0}, {"meh", 0.5}, {"good", -2.0}}, 0.0);
  const std::vector<std::string> texts{"good day", "bad day", "awful meh", "meh good"};
  const auto g = explain::explain_global(model, texts, 2, "d");
  ASSERT_EQ(g.per_class_top_unigrams.size(), 2u);
  const auto& positive = g.per_class_top_unigrams[1];
  ASSERT_EQ(positive.size(), 2u);
  EXPECT_EQ(positive[0].first, "awful");
  EXPECT_EQ(positive[1].first, "bad");
  EXPECT_DOUBLE_EQ(positive[0].second, model.positive_probability({"awful"}));
  EXPECT_EQ(g.per_class_top_unigrams[0][0].first, "good");
  EXPECT_THROW(explain::explain_global(model, texts, 0), ArgumentError);
  const auto all = explain::explain_global(model, texts, 100);
  EXPECT_EQ(all.per_class_top_unigrams[1].size(), 5u);
}

TEST(ExplainGlobal, DeterministicAndOrderInvariant) {
  const auto oracle = random_oracle(8, 40);
  LinearBowModel model(oracle.weights, 0.0);
  std::mt19937_64 rng(1);
  std::vector<std::string> texts;
  for (int i = 0; i < 30; ++i) texts.push_back(random_sentence(oracle, rng, 1, 6));
  const auto a = explain::explain_global(model, texts, 7);
  auto shuffled = texts;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto b = explain::explain_global(model, shuffled, 7);
  EXPECT_EQ(a.per_class_top_unigrams, b.per_class_top_unigrams);
  EXPECT_EQ(a.per_class_top_unigrams, explain::explain_global(model, texts, 7).per_class_top_unigrams);
}
