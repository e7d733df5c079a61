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

#include "subtok/compose.h"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "subtok/error.h"
#include "subtok/eval.h"

namespace subtok {
namespace {

using Vec = std::vector<double>;

std::vector<double> sum_of(std::initializer_list<Vec> rows) {
  std::vector<std::span<const double>> spans;
  for (const auto& r : rows) spans.emplace_back(r);
  return compose_unweighted(spans);
}

Matrix matrix(const std::vector<Vec>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

TEST(ComposeUnweightedTest, Sums) {
  EXPECT_EQ(sum_of({{1, 0}, {0, 1}}), (Vec{1, 1}));
  EXPECT_EQ(sum_of({{2.5, -1}}), (Vec{2.5, -1}));
  EXPECT_EQ(sum_of({{1, 2}, {3, 4}, {-4, -6}}), (Vec{0, 0}));
  EXPECT_THROW(compose_unweighted({}), InputError);
}

TEST(SifWeightTest, Values) {
  EXPECT_EQ(sif_weight(0.0, 0.001), 1.0);
  EXPECT_EQ(sif_weight(0.001, 0.001), 0.5);
  EXPECT_NEAR(sif_weight(0.009, 0.001), 0.1, 1e-15);
}

TEST(ComposeSifTest, Examples) {
  const Vec v = {1.5, -2};
  const Vec neg = {-1.5, 2};
  EXPECT_EQ(compose_sif(std::vector<WeightedPiece>{{v, 0.0}}, 0.001), v);
  EXPECT_EQ(compose_sif(std::vector<WeightedPiece>{{v, 0.2}, {neg, 0.2}}, 0.001), (Vec{0, 0}));
  const Vec x = {2, 0};
  const Vec y = {0, 4};
  const auto out = compose_sif(std::vector<WeightedPiece>{{x, 0.001}, {y, 0.009}}, 0.001);
  EXPECT_NEAR(out[0], 1.0, 1e-15);
  EXPECT_NEAR(out[1], 0.4, 1e-12);
}

TEST(ComposeSifTest, PermutationInvariant) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec> vecs(1 + rng() % 6, Vec(4));
    for (auto& v : vecs) {
      for (auto& x : v) x = u(rng);
    }
    std::vector<WeightedPiece> pieces;
    for (const auto& v : vecs) pieces.push_back({v, (u(rng) + 1) / 20});
    auto shuffled = pieces;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto a = compose_sif(pieces, 0.001);
    const auto b = compose_sif(shuffled, 0.001);
    for (std::size_t d = 0; d < 4; ++d) EXPECT_NEAR(a[d], b[d], 1e-12);
  }
}

TEST(PrincipalComponentTest, RankOne) {
  const auto u = first_principal_component(matrix({{3, 4}, {3, 4}, {3, 4}}));
  EXPECT_NEAR(u[0], 0.6, 1e-12);
  EXPECT_NEAR(u[1], 0.8, 1e-12);
}

TEST(PrincipalComponentTest, SymmetricSpectrumIsDeterministic) {
  const auto m = matrix({{1, 0}, {0, 1}});
  const auto a = first_principal_component(m);
  const auto b = first_principal_component(m);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(std::hypot(a[0], a[1]), 1.0, 1e-12);
}

TEST(PrincipalComponentTest, DominantDirection) {
  std::vector<Vec> rows(100, Vec{1, 0});
  rows.push_back({0, 1});
  const auto u = first_principal_component(matrix(rows));
  EXPECT_NEAR(u[0], 1.0, 1e-3);
  EXPECT_NEAR(u[1], 0.0, 1e-3);
}

TEST(PrincipalComponentTest, DegenerateThrows) {
  EXPECT_THROW(first_principal_component(matrix({{0, 0}})), InputError);
  EXPECT_THROW(first_principal_component(Matrix{}), InputError);
}

TEST(PrincipalComponentTest, MatchesSvdOracle) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 3 + rng() % 20;
    const std::size_t cols = 2 + rng() % 8;
    Matrix m(rows, cols);
    Eigen::MatrixXd e(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        // A shared offset gives a clear spectral gap.
        m.row(i)[j] = e(i, j) = n(rng) + (j == 0 ? 3.0 : 0.0);
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeThinV);
    Eigen::VectorXd ref = svd.matrixV().col(0);
    Eigen::Index arg;
    ref.cwiseAbs().maxCoeff(&arg);
    if (ref(arg) < 0) ref = -ref;
    const auto u = first_principal_component(m);
    for (std::size_t j = 0; j < cols; ++j) EXPECT_NEAR(u[j], ref(j), 1e-6);
  }
}

TEST(RemovePcTest, ParallelRowsVanish) {
  const auto out = remove_first_pc(matrix({{3, 4}, {6, 8}, {-1.5, -2}}));
  for (double x : out.data) EXPECT_NEAR(x, 0.0, 1e-10);
}

TEST(RemovePcTest, OrthogonalRowUnchanged) {
  std::vector<Vec> rows(50, Vec{1, 0, 0});
  rows.push_back({0, 0.3, -0.2});
  const auto out = remove_first_pc(matrix(rows));
  EXPECT_NEAR(out.row(50)[1], 0.3, 1e-10);
  EXPECT_NEAR(out.row(50)[2], -0.2, 1e-10);
}

TEST(RemovePcTest, OutputOrthogonalToComponent) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  std::vector<Matrix> cases = {matrix({{1, 0}, {1, 1}})};
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(10, 5);
    for (auto& x : m.data) x = n(rng) * 10;
    cases.push_back(m);
  }
  for (const auto& m : cases) {
    const auto u = first_principal_component(m);
    const auto out = remove_first_pc(m);
    double scale = 0;
    for (double x : m.data) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < out.rows; ++i) {
      EXPECT_LE(std::abs(dot(out.row(i), u)), 1e-8 * std::max(1.0, scale));
    }
  }
}

TEST(RemovePcTest, SecondApplicationChangesLess) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0, 1);
  Matrix m(12, 4);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 4; ++j) m.row(i)[j] = n(rng) + (j == 1 ? 4 : 0);
  }
  auto change = [](const Matrix& a, const Matrix& b) {
    double s = 0;
    for (std::size_t k = 0; k < a.data.size(); ++k) s += std::pow(a.data[k] - b.data[k], 2);
    return std::sqrt(s);
  };
  const auto once = remove_first_pc(m);
  const auto twice = remove_first_pc(once);
  EXPECT_LT(change(once, twice), change(m, once));
}

TEST(ProbabilityTableTest, FromCounts) {
  TokenFrequencyTable counts;
  counts.add("a", 3);
  counts.add("b", 1);
  const auto p = SubwordProbabilityTable::from_counts(counts);
  EXPECT_DOUBLE_EQ(p.probability("a"), 0.75);
  EXPECT_DOUBLE_EQ(p.probability("zz"), 0.0);
  EXPECT_NEAR(p.mass(), 1.0, 1e-12);
}

TEST(MethodNameTest, RoundTrip) {
  for (auto m : {CompositionMethod::kUnweighted, CompositionMethod::kWeighted,
                 CompositionMethod::kWeightedPcRemoved}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_THROW(parse_method("mean"), InputError);
}

class ComposeWordsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    embeddings_ = VectorTable(2);
    embeddings_.add("x", Vec{2, 0});
    embeddings_.add("y", Vec{0, 4});
    TokenFrequencyTable counts;
    counts.add("x", 1);
    counts.add("y", 9);
    counts.add("other", 990);
    probs_ = SubwordProbabilityTable::from_counts(counts);
  }
  VectorTable embeddings_;
  SubwordProbabilityTable probs_;
};

TEST_F(ComposeWordsTest, UnweightedSinglePiece) {
  const std::vector<std::string> words = {"x"};
  const auto out = compose_words(words, WordTokenizer::pretokenised(), embeddings_, probs_, {});
  EXPECT_EQ(out.vectors.row(0)[0], 2.0);
  EXPECT_EQ(out.vectors.row(0)[1], 0.0);
}

TEST_F(ComposeWordsTest, WeightedTwoPieces) {
  const UnigramModel model({{"x", -1.0}, {"y", -1.0}, {"\xE2\x96\x81", -1.0}});
  VectorTable emb = embeddings_;
  emb.add("\xE2\x96\x81", Vec{0, 0});
  TokenFrequencyTable counts;
  counts.add("x", 1);
  counts.add("y", 9);
  counts.add("\xE2\x96\x81", 990);  // weight ~0.000001 on a zero vector
  const auto probs = SubwordProbabilityTable::from_counts(counts);
  const std::vector<std::string> words = {"xy"};
  const auto out = compose_words(words, WordTokenizer::unigram(model), emb, probs,
                                 {CompositionMethod::kWeighted, 0.001});
  EXPECT_NEAR(out.vectors.row(0)[0], 1.0, 1e-12);
  EXPECT_NEAR(out.vectors.row(0)[1], 0.4, 1e-12);
}

TEST_F(ComposeWordsTest, PcRemovedSingleWordIsZero) {
  const std::vector<std::string> words = {"x"};
  const auto out = compose_words(words, WordTokenizer::pretokenised(), embeddings_, probs_,
                                 {CompositionMethod::kWeightedPcRemoved, 0.001});
  for (double x : out.vectors.row(0)) EXPECT_NEAR(x, 0.0, 1e-12);
}

TEST_F(ComposeWordsTest, OovAndDuplicates) {
  const std::vector<std::string> words = {"x", "missing", "x"};
  const auto out = compose_words(words, WordTokenizer::pretokenised(), embeddings_, probs_, {});
  ASSERT_EQ(out.words.size(), 2u);
  EXPECT_FALSE(out.oov[*out.find("x")]);
  EXPECT_TRUE(out.oov[*out.find("missing")]);
  EXPECT_EQ(out.table().size(), 1u);
}

TEST(ComposeEqualProbabilityTest, RankingsMatchUnweighted) {
  std::mt19937 rng(12);
  std::normal_distribution<double> n(0, 1);
  const std::string letters = "abcdefgh";
  VectorTable emb(6);
  TokenFrequencyTable counts;
  for (char c : letters) {
    Vec v(6);
    for (auto& x : v) x = n(rng);
    emb.add(std::string(1, c), v);
    counts.add(std::string(1, c), 10);
  }
  const auto probs = SubwordProbabilityTable::from_counts(counts);
  BpeModel model({"a", "b", "c", "d", "e", "f", "g", "h"}, {});
  // Pieces are single letters; the end-of-word marker has no vector.
  // Words use distinct letters and distinct letter sets, so no two composed
  // vectors are parallel and rankings have no exact ties to break.
  std::vector<std::string> words;
  std::set<std::string> multisets;
  while (words.size() < 50) {
    std::string w;
    const int len = 1 + rng() % 4;
    for (int k = 0; k < len; ++k) w.push_back(letters[rng() % letters.size()]);
    std::string key = w;
    std::sort(key.begin(), key.end());
    if (std::adjacent_find(key.begin(), key.end()) != key.end()) continue;
    if (multisets.insert(key).second) words.push_back(w);
  }
  const auto tok = WordTokenizer::bpe(model);
  const auto plain = compose_words(words, tok, emb, probs, {CompositionMethod::kUnweighted});
  const auto sif = compose_words(words, tok, emb, probs, {CompositionMethod::kWeighted, 0.001});
  for (std::size_t q = 0; q < words.size(); ++q) {
    const auto a = nearest_neighbors(plain.table(), words[q], 49);
    const auto b = nearest_neighbors(sif.table(), words[q], 49);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].token, b[i].token) << words[q];
      EXPECT_NEAR(a[i].cosine, b[i].cosine, 1e-12);
    }
  }
}

}  // namespace
}  // namespace subtok
