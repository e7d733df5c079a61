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

#ifndef SUBTOK_GLOVE_H_
#define SUBTOK_GLOVE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "subtok/corpus.h"
#include "subtok/string_map.h"
#include "subtok/vectors.h"

namespace subtok {

// token <-> id, ids ordered by descending count then token.
class TokenVocabulary {
 public:
  TokenVocabulary() = default;
  explicit TokenVocabulary(std::vector<std::string> tokens);
  static TokenVocabulary from_counts(const TokenFrequencyTable& counts,
                                     std::uint64_t min_count = 1);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t id) const { return tokens_[id]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<std::uint32_t> id(std::string_view token) const;

 private:
  std::vector<std::string> tokens_;
  StringMap<std::uint32_t> index_;
};

struct CooccurrenceEntry {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double x = 0.0;
  bool operator==(const CooccurrenceEntry&) const = default;
};

// Symmetric sparse X_ij with every stored entry > 0, sorted by (i, j).
class CooccurrenceTable {
 public:
  CooccurrenceTable() = default;
  explicit CooccurrenceTable(std::vector<CooccurrenceEntry> entries);

  const std::vector<CooccurrenceEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  // 0 when absent.
  double get(std::uint32_t i, std::uint32_t j) const;
  // 1 + the largest id referenced.
  std::size_t id_bound() const;

  // Little-endian (u32 i, u32 j, f64 x) records.
  void save(std::ostream& out) const;
  static CooccurrenceTable load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static CooccurrenceTable load(const std::filesystem::path& path);

  bool operator==(const CooccurrenceTable&) const = default;

 private:
  std::vector<CooccurrenceEntry> entries_;
};

// Accumulates distance-weighted counts sentence by sentence. Partial
// builders over disjoint shards merge by addition.
class CooccurrenceBuilder {
 public:
  explicit CooccurrenceBuilder(std::size_t window);

  // Ids of one sentence; nullopt marks a dropped (unknown) token that still
  // occupies a position.
  void add_sentence(std::span<const std::optional<std::uint32_t>> ids);
  void merge(const CooccurrenceBuilder& other);
  CooccurrenceTable finish() const;

 private:
  void add(std::uint32_t i, std::uint32_t j, double w);

  std::size_t window_;
  std::unordered_map<std::uint64_t, double> cells_;
};

// For each pair within `window` positions, adds 1/distance to X_ij and X_ji.
CooccurrenceTable build_cooccurrence(std::span<const std::string> sentences,
                                     const TokenVocabulary& vocab, std::size_t window);

struct TrainConfig {
  std::size_t dim = 300;
  std::size_t window = 15;
  double x_max = 100.0;
  double alpha = 0.75;
  double learning_rate = 0.05;
  int epochs = 25;
  std::uint64_t seed = 1;
  // >1 enables lock-free parallel updates; results are then not reproducible.
  int threads = 1;

  // Throws InputError on out-of-range values.
  void validate() const;
};

// (x / x_max)^alpha below the cap, 1 above. Throws InputError for x <= 0.
double glove_weight(double x, double x_max, double alpha);

// Parameters being trained: main and context vectors plus their biases.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(std::vector<std::string> tokens, std::size_t dim);

  // Vectors uniform in [-0.5/D, 0.5/D], biases zero.
  void initialize(std::uint64_t seed);

  std::size_t size() const { return tokens_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::span<double> main(std::size_t i) { return {main_.data() + i * dim_, dim_}; }
  std::span<const double> main(std::size_t i) const { return {main_.data() + i * dim_, dim_}; }
  std::span<double> context(std::size_t i) { return {context_.data() + i * dim_, dim_}; }
  std::span<const double> context(std::size_t i) const {
    return {context_.data() + i * dim_, dim_};
  }
  double& bias(std::size_t i) { return bias_[i]; }
  double bias(std::size_t i) const { return bias_[i]; }
  double& context_bias(std::size_t i) { return context_bias_[i]; }
  double context_bias(std::size_t i) const { return context_bias_[i]; }

  // main + context, per token.
  VectorTable exported() const;

  bool all_finite() const;
  bool operator==(const EmbeddingSet&) const = default;

 private:
  std::vector<std::string> tokens_;
  std::size_t dim_ = 0;
  std::vector<double> main_;
  std::vector<double> context_;
  std::vector<double> bias_;
  std::vector<double> context_bias_;
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad_main;     // d loss / d w_i
  std::vector<double> grad_context;  // d loss / d w~_j
  double grad_bias = 0.0;            // d loss / d b_i
  double grad_context_bias = 0.0;    // d loss / d b~_j
};

// f(X_ij) * (w_i . w~_j + b_i + b~_j - ln X_ij)^2 and its exact gradient.
LossGrad loss_and_grad(const CooccurrenceEntry& entry, const EmbeddingSet& params,
                       const TrainConfig& config);

// AdaGrad over the entries, reshuffled every epoch from `config.seed`.
// `epoch_losses` receives the mean weighted loss of each epoch. Throws
// Error if a non-finite value appears.
EmbeddingSet train_glove(const CooccurrenceTable& table, std::vector<std::string> tokens,
                         const TrainConfig& config,
                         std::vector<double>* epoch_losses = nullptr);

}  // namespace subtok

#endif  // SUBTOK_GLOVE_H_
