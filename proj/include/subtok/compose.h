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

#ifndef SUBTOK_COMPOSE_H_
#define SUBTOK_COMPOSE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "subtok/bpe.h"
#include "subtok/corpus.h"
#include "subtok/string_map.h"
#include "subtok/unigram.h"
#include "subtok/vectors.h"

namespace subtok {

// Unigram probability of each piece in a tokenised corpus.
class SubwordProbabilityTable {
 public:
  SubwordProbabilityTable() = default;
  static SubwordProbabilityTable from_counts(const TokenFrequencyTable& counts);

  // 0 for pieces never seen.
  double probability(std::string_view piece) const;
  std::size_t size() const { return probs_.size(); }
  double mass() const;

 private:
  StringMap<double> probs_;
};

enum class CompositionMethod { kUnweighted, kWeighted, kWeightedPcRemoved };

// "unweighted", "weighted", "weighted_pc_removed".
std::string_view method_name(CompositionMethod method);
CompositionMethod parse_method(std::string_view name);

struct CompositionConfig {
  CompositionMethod method = CompositionMethod::kUnweighted;
  double a = 0.001;  // SIF smoothing
};

struct WeightedPiece {
  std::span<const double> vector;
  double probability = 0.0;
};

// Element-wise sum. Throws InputError("no subwords") on an empty list.
std::vector<double> compose_unweighted(std::span<const std::span<const double>> pieces);

// a / (a + p)
double sif_weight(double p, double a);

// Sum of sif_weight(p_x, a) * x over the pieces.
std::vector<double> compose_sif(std::span<const WeightedPiece> pieces, double a);

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

// Unit-norm top right singular vector of the (uncentred) matrix by power
// iteration on M^T M, started from a fixed pseudo-random vector. Stops when
// successive estimates move less than 1e-10 or after 1000 iterations. The
// sign is chosen so the largest-magnitude entry is positive.
// Throws InputError("degenerate matrix") for an all-zero or empty matrix.
std::vector<double> first_principal_component(const Matrix& m);

// Each row e becomes e - (e . u) u with u the first principal component.
Matrix remove_first_pc(const Matrix& m);

// Splits a word into the pieces the embeddings were trained on.
class WordTokenizer {
 public:
  static WordTokenizer bpe(BpeModel model);
  static WordTokenizer unigram(UnigramModel model);
  // The word itself is the only piece (pre-tokenised corpora).
  static WordTokenizer pretokenised();

  // Throws UncoveredCharacterError for unigram models missing a character.
  std::vector<std::string> pieces(std::string_view word) const;

 private:
  std::variant<std::monostate, BpeModel, UnigramModel> model_;
};

struct WordEmbeddingMatrix {
  std::vector<std::string> words;
  std::vector<bool> oov;
  Matrix vectors;  // one row per word; OOV rows are zero
  CompositionConfig config;

  std::optional<std::size_t> find(std::string_view word) const;
  // Non-OOV rows only.
  VectorTable table() const;
};

// Tokenises each distinct word, looks up piece vectors (pieces missing from
// `embeddings` are skipped; a word with none left is OOV) and composes them.
// PC removal runs over the composed non-OOV rows of this word set.
WordEmbeddingMatrix compose_words(std::span<const std::string> words,
                                  const WordTokenizer& tokenizer, const VectorTable& embeddings,
                                  const SubwordProbabilityTable& probs,
                                  const CompositionConfig& config);

}  // namespace subtok

#endif  // SUBTOK_COMPOSE_H_
