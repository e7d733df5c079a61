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

#ifndef SUBTOK_EVAL_H_
#define SUBTOK_EVAL_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subtok/compose.h"
#include "subtok/vectors.h"

namespace subtok {

struct SimilarityRecord {
  std::string word1;
  std::string word2;
  double rating = 0.0;
  std::optional<std::string> pos;
};

// Word pairs with human ratings, read from
// "WORD1<TAB>WORD2<TAB>RATING[<TAB>POS]" lines. '#' lines are comments; a
// "# scale LO HI" comment declares the rating bounds (otherwise the
// observed min/max are used).
struct SimilarityDataset {
  std::string name;
  std::vector<SimilarityRecord> records;
  double scale_min = 0.0;
  double scale_max = 0.0;

  // Distinct words in first-appearance order.
  std::vector<std::string> words() const;

  // Throws InputError on malformed lines, duplicate unordered pairs or
  // out-of-scale ratings.
  static SimilarityDataset load(std::istream& in, std::string name);
  static SimilarityDataset load(const std::filesystem::path& path);
};

// Throws InputError("undefined cosine") if either vector is zero.
double cosine(std::span<const double> u, std::span<const double> v);

// Sample Pearson correlation. Needs >= 2 points and variance on both sides.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Pearson correlation of average (fractional) ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

// 1-based average ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

// 2sp / (s + p); 0 when either input or the sum is non-positive.
double harmonic_mean(double s, double p);

struct CorrelationScores {
  double spearman = 0.0;
  double pearson = 0.0;
  double harmonic = 0.0;
  std::size_t pairs_total = 0;
  std::size_t pairs_scored = 0;
};

struct EvalReport {
  double spearman = 0.0;
  double pearson = 0.0;
  double harmonic = 0.0;
  std::size_t pairs_total = 0;
  std::size_t pairs_scored = 0;
  std::map<std::string, CorrelationScores> per_category;
  // Categories without enough scorable pairs (or with undefined
  // correlation) are left out of per_category and listed here.
  std::vector<std::string> omitted_categories;
  std::optional<double> category_average;

  double coverage() const {
    return pairs_total == 0 ? 0.0 : static_cast<double>(pairs_scored) / pairs_total;
  }
};

// Correlates ratings with cosines. Pairs with a word missing from `vectors`
// (or a zero vector) are excluded and show up in the coverage counts.
// Throws InputError("insufficient coverage") with fewer than 2 scorable pairs.
EvalReport evaluate_similarity(const SimilarityDataset& dataset, const VectorTable& vectors);
EvalReport evaluate_similarity(const SimilarityDataset& dataset,
                               const WordEmbeddingMatrix& composed);

// As evaluate_similarity, plus per-category scores and their unweighted mean.
EvalReport evaluate_by_pos(const SimilarityDataset& dataset, const VectorTable& vectors);
EvalReport evaluate_by_pos(const SimilarityDataset& dataset, const WordEmbeddingMatrix& composed);

struct Neighbor {
  std::string token;
  double cosine = 0.0;
  bool operator==(const Neighbor&) const = default;
};

// Top-k other tokens by cosine, ties broken by token. Zero vectors are
// never candidates. Throws InputError for an unknown query.
std::vector<Neighbor> nearest_neighbors(const VectorTable& vectors, std::string_view query,
                                        std::size_t k);

// Ranks tokens d by cosine(b - a + c, d).
std::vector<Neighbor> solve_analogy(const VectorTable& vectors, std::string_view a,
                                    std::string_view b, std::string_view c, std::size_t k,
                                    bool exclude_queries);

// "key: value" lines.
void write_report(std::ostream& out, const EvalReport& report,
                  const std::map<std::string, std::string>& labels = {});
std::string report_csv_header();
std::string report_csv_row(const EvalReport& report, std::string_view dataset,
                           std::string_view tokenizer, std::string_view method);

}  // namespace subtok

#endif  // SUBTOK_EVAL_H_
