// Copyright 2026 The subtok Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "subtok/glove.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "subtok/corpus.h"
#include "subtok/error.h"
#include "test_util.h"

namespace subtok {
namespace {

using Strings = std::vector<std::string>;

TokenVocabulary vocab_of(const Strings& sentences) {
  return TokenVocabulary::from_counts(count_words(sentences));
}

double x_of(const CooccurrenceTable& t, const TokenVocabulary& v, const char* a, const char* b) {
  return t.get(*v.id(a), *v.id(b));
}

TEST(CooccurrenceTest, DistanceWeighting) {
  const Strings s = {"x y z"};
  const auto v = vocab_of(s);
  const auto t = build_cooccurrence(s, v, 15);
  EXPECT_DOUBLE_EQ(x_of(t, v, "x", "y"), 1.0);
  EXPECT_DOUBLE_EQ(x_of(t, v, "y", "z"), 1.0);
  EXPECT_DOUBLE_EQ(x_of(t, v, "x", "z"), 0.5);
  EXPECT_DOUBLE_EQ(x_of(t, v, "z", "x"), 0.5);
  EXPECT_DOUBLE_EQ(x_of(t, v, "x", "x"), 0.0);
}

TEST(CooccurrenceTest, SingleTokenAndSelfPair) {
  const Strings one = {"x"};
  EXPECT_TRUE(build_cooccurrence(one, vocab_of(one), 15).empty());
  const Strings two = {"x x"};
  const auto v = vocab_of(two);
  EXPECT_DOUBLE_EQ(x_of(build_cooccurrence(two, v, 15), v, "x", "x"), 2.0);
}

TEST(CooccurrenceTest, WindowLimitsDistance) {
  const Strings s = {"a b c d"};
  const auto v = vocab_of(s);
  const auto t = build_cooccurrence(s, v, 2);
  EXPECT_DOUBLE_EQ(x_of(t, v, "a", "c"), 0.5);
  EXPECT_DOUBLE_EQ(x_of(t, v, "a", "d"), 0.0);
}

TEST(CooccurrenceTest, UnknownTokensKeepTheirPosition) {
  TokenFrequencyTable counts;
  counts.add("a", 5);
  counts.add("b", 5);
  counts.add("rare", 1);
  const auto v = TokenVocabulary::from_counts(counts, 2);
  EXPECT_FALSE(v.id("rare").has_value());
  const Strings s = {"a rare b"};
  EXPECT_DOUBLE_EQ(x_of(build_cooccurrence(s, v, 15), v, "a", "b"), 0.5);
}

TEST(CooccurrenceTest, SymmetricAndPositive) {
  std::mt19937 rng(2);
  Strings sentences;
  for (int i = 0; i < 50; ++i) {
    std::string s;
    for (int k = 0; k < 12; ++k) s += std::string(1, "abcdef"[rng() % 6]) + " ";
    sentences.push_back(s);
  }
  const auto v = vocab_of(sentences);
  const auto t = build_cooccurrence(sentences, v, 4);
  for (const auto& e : t.entries()) {
    EXPECT_GT(e.x, 0.0);
    EXPECT_EQ(t.get(e.j, e.i), e.x);
  }
}

TEST(CooccurrenceTest, ShardMergeEqualsSinglePass) {
  const Strings sentences = {"a b c", "c b a a", "b b c a"};
  const auto v = vocab_of(sentences);
  auto ids = [&](const std::string& s) {
    std::vector<std::optional<std::uint32_t>> out;
    for (auto tok : split_whitespace(s)) out.push_back(v.id(tok));
    return out;
  };
  CooccurrenceBuilder left(3), right(3);
  left.add_sentence(ids(sentences[0]));
  right.add_sentence(ids(sentences[1]));
  right.add_sentence(ids(sentences[2]));
  left.merge(right);
  // Equal up to summation order.
  const auto merged = left.finish();
  const auto single = build_cooccurrence(sentences, v, 3);
  ASSERT_EQ(merged.size(), single.size());
  for (std::size_t k = 0; k < merged.size(); ++k) {
    EXPECT_EQ(merged.entries()[k].i, single.entries()[k].i);
    EXPECT_EQ(merged.entries()[k].j, single.entries()[k].j);
    EXPECT_NEAR(merged.entries()[k].x, single.entries()[k].x, 1e-12);
  }
}

TEST(CooccurrenceTest, BinaryRoundTrip) {
  const CooccurrenceTable t({{0, 0, 2.0}, {0, 1, 0.5}, {1, 0, 0.5}});
  std::stringstream ss;
  t.save(ss);
  EXPECT_EQ(ss.str().size(), 3u * 16u);
  EXPECT_EQ(CooccurrenceTable::load(ss), t);
}

TEST(GloveWeightTest, Values) {
  EXPECT_DOUBLE_EQ(glove_weight(100, 100, 0.75), 1.0);
  EXPECT_DOUBLE_EQ(glove_weight(200, 100, 0.75), 1.0);
  EXPECT_NEAR(glove_weight(50, 100, 0.75), std::pow(0.5, 0.75), 1e-15);
  EXPECT_NEAR(glove_weight(50, 100, 0.75), 0.5946, 1e-4);
  EXPECT_THROW(glove_weight(0, 100, 0.75), InputError);
}

TEST(TrainConfigTest, Validate) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 1.5;
  EXPECT_THROW(c.validate(), InputError);
  c = {};
  c.dim = 0;
  EXPECT_THROW(c.validate(), InputError);
  c = {};
  c.x_max = 0;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(LossGradTest, ZeroResidual) {
  EmbeddingSet p({"a", "b"}, 2);
  p.main(0)[0] = 1.0;
  p.context(1)[0] = 1.0;  // w . w~ = 1 = ln e
  TrainConfig cfg;
  cfg.x_max = 1.0;
  const auto lg = loss_and_grad({0, 1, std::exp(1.0)}, p, cfg);
  EXPECT_NEAR(lg.loss, 0.0, 1e-15);
  for (double g : lg.grad_main) EXPECT_NEAR(g, 0.0, 1e-15);
  for (double g : lg.grad_context) EXPECT_NEAR(g, 0.0, 1e-15);
  EXPECT_NEAR(lg.grad_bias, 0.0, 1e-15);
}

TEST(LossGradTest, ClosedForm) {
  EmbeddingSet p({"a", "b"}, 3);
  TrainConfig cfg;
  cfg.x_max = 1.0;  // f(e) = 1
  const auto lg = loss_and_grad({0, 1, std::exp(1.0)}, p, cfg);
  EXPECT_NEAR(lg.loss, 1.0, 1e-15);
  EXPECT_NEAR(lg.grad_bias, -2.0, 1e-15);
  EXPECT_NEAR(lg.grad_context_bias, -2.0, 1e-15);
}

TEST(LossGradTest, MatchesCentralDifferences) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  TrainConfig cfg;
  cfg.x_max = 10.0;
  const std::size_t dim = 6;
  const double h = 1e-5;
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
  };
  for (int trial = 0; trial < 100; ++trial) {
    EmbeddingSet p({"a", "b", "c"}, dim);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        p.main(i)[d] = u(rng);
        p.context(i)[d] = u(rng);
      }
      p.bias(i) = u(rng);
      p.context_bias(i) = u(rng);
    }
    const CooccurrenceEntry e{static_cast<std::uint32_t>(rng() % 3),
                              static_cast<std::uint32_t>(rng() % 3), 0.2 + 20 * (u(rng) + 0.5)};
    const auto lg = loss_and_grad(e, p, cfg);
    auto fd = [&](double& param) {
      const double keep = param;
      param = keep + h;
      const double up = loss_and_grad(e, p, cfg).loss;
      param = keep - h;
      const double down = loss_and_grad(e, p, cfg).loss;
      param = keep;
      return (up - down) / (2 * h);
    };
    if (e.i != e.j) {
      for (std::size_t d = 0; d < dim; ++d) {
        EXPECT_LT(rel(lg.grad_main[d], fd(p.main(e.i)[d])), 1e-4);
        EXPECT_LT(rel(lg.grad_context[d], fd(p.context(e.j)[d])), 1e-4);
      }
    }
    EXPECT_LT(rel(lg.grad_bias, fd(p.bias(e.i))), 1e-4);
    EXPECT_LT(rel(lg.grad_context_bias, fd(p.context_bias(e.j))), 1e-4);
  }
}

TEST(TrainGloveTest, SingleEntryConverges) {
  const CooccurrenceTable t({{0, 0, 5.0}});
  TrainConfig cfg;
  cfg.dim = 1;
  cfg.epochs = 2000;
  cfg.x_max = 5.0;
  std::vector<double> losses;
  train_glove(t, {"a"}, cfg, &losses);
  EXPECT_LT(losses.back(), 1e-6);
}

TEST(TrainGloveTest, ZeroEpochsKeepsInitialisation) {
  const CooccurrenceTable t({{0, 1, 1.0}, {1, 0, 1.0}});
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 0;
  EmbeddingSet init({"a", "b"}, 4);
  init.initialize(cfg.seed);
  EXPECT_EQ(train_glove(t, {"a", "b"}, cfg), init);
  for (std::size_t i = 0; i < 2; ++i) {
    for (double x : init.main(i)) EXPECT_LE(std::abs(x), 0.5 / 4);
    EXPECT_EQ(init.bias(i), 0.0);
  }
}

TEST(TrainGloveTest, CyclicCorpusLossDecreases) {
  auto stream = SentenceStream::open(testing_util::data_path("toy_cyclic.txt"), {},
                                     InputMode::kPretokenised);
  const auto sentences = stream.read_all();
  const auto v = vocab_of(sentences);
  EXPECT_EQ(v.size(), 5u);
  const auto t = build_cooccurrence(sentences, v, 15);
  TrainConfig cfg;
  cfg.dim = 10;
  cfg.epochs = 10;
  std::vector<double> losses;
  const auto emb = train_glove(t, v.tokens(), cfg, &losses);
  ASSERT_EQ(losses.size(), 10u);
  EXPECT_LT(losses[9], losses[0]);
  int non_monotone = 0;
  for (std::size_t e = 1; e < losses.size(); ++e) non_monotone += losses[e] > losses[e - 1];
  EXPECT_LE(non_monotone, 2);
  EXPECT_TRUE(emb.all_finite());
}

TEST(TrainGloveTest, DeterministicSingleThread) {
  const CooccurrenceTable t({{0, 1, 3.0}, {1, 0, 3.0}, {1, 2, 1.0}, {2, 1, 1.0}, {0, 0, 7.0}});
  TrainConfig cfg;
  cfg.dim = 5;
  cfg.epochs = 20;
  EXPECT_EQ(train_glove(t, {"a", "b", "c"}, cfg), train_glove(t, {"a", "b", "c"}, cfg));
}

TEST(TrainGloveTest, HogwildStaysFinite) {
  std::vector<CooccurrenceEntry> entries;
  for (std::uint32_t i = 0; i < 20; ++i) {
    for (std::uint32_t j = 0; j < 20; ++j) entries.push_back({i, j, 1.0 + (i * j) % 7});
  }
  Strings tokens;
  for (int i = 0; i < 20; ++i) tokens.push_back("t" + std::to_string(i));
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 5;
  cfg.threads = 4;
  EXPECT_TRUE(train_glove(CooccurrenceTable(entries), tokens, cfg).all_finite());
}

TEST(EmbeddingSetTest, ExportedIsSum) {
  EmbeddingSet p({"a"}, 2);
  p.main(0)[0] = 1.0;
  p.context(0)[0] = 2.0;
  p.context(0)[1] = -1.0;
  const auto t = p.exported();
  EXPECT_EQ(t.row(0)[0], 3.0);
  EXPECT_EQ(t.row(0)[1], -1.0);
}

}  // namespace
}  // namespace subtok
