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

#include <algorithm>
#include <cmath>
#include <random>

#include "subtok/error.h"

namespace subtok {

SubwordProbabilityTable SubwordProbabilityTable::from_counts(const TokenFrequencyTable& counts) {
  SubwordProbabilityTable table;
  const auto total = static_cast<double>(counts.total_count());
  for (const auto& [piece, count] : counts.entries()) {
    table.probs_.emplace(piece, static_cast<double>(count) / total);
  }
  return table;
}

double SubwordProbabilityTable::probability(std::string_view piece) const {
  auto it = probs_.find(piece);
  return it == probs_.end() ? 0.0 : it->second;
}

double SubwordProbabilityTable::mass() const {
  double s = 0.0;
  for (const auto& [piece, p] : probs_) s += p;
  return s;
}

std::string_view method_name(CompositionMethod method) {
  switch (method) {
    case CompositionMethod::kUnweighted:
      return "unweighted";
    case CompositionMethod::kWeighted:
      return "weighted";
    case CompositionMethod::kWeightedPcRemoved:
      return "weighted_pc_removed";
  }
  return "unknown";
}

CompositionMethod parse_method(std::string_view name) {
  if (name == "unweighted") return CompositionMethod::kUnweighted;
  if (name == "weighted") return CompositionMethod::kWeighted;
  if (name == "weighted_pc_removed") return CompositionMethod::kWeightedPcRemoved;
  throw InputError("unknown composition method: " + std::string(name));
}

std::vector<double> compose_unweighted(std::span<const std::span<const double>> pieces) {
  if (pieces.empty()) throw InputError("no subwords");
  std::vector<double> out(pieces.front().size(), 0.0);
  for (auto v : pieces) {
    if (v.size() != out.size()) throw InputError("subword vectors differ in dimension");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += v[k];
  }
  return out;
}

double sif_weight(double p, double a) { return a / (a + p); }

std::vector<double> compose_sif(std::span<const WeightedPiece> pieces, double a) {
  if (pieces.empty()) throw InputError("no subwords");
  if (!(a > 0.0)) throw InputError("SIF smoothing must be positive");
  std::vector<double> out(pieces.front().vector.size(), 0.0);
  for (const auto& piece : pieces) {
    if (piece.vector.size() != out.size()) {
      throw InputError("subword vectors differ in dimension");
    }
    if (!(piece.probability >= 0.0 && piece.probability <= 1.0)) {
      throw InputError("subword probability outside [0, 1]");
    }
    const double w = sif_weight(piece.probability, a);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * piece.vector[k];
  }
  return out;
}

namespace {

constexpr std::uint64_t kPowerIterationSeed = 0x5EEDC0FFEEULL;
constexpr int kMaxPowerIterations = 1000;
constexpr double kPowerIterationTolerance = 1e-10;

// y = M^T (M v)
void gram_apply(const Matrix& m, std::span<const double> v, std::vector<double>& y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto row = m.row(r);
    const double s = dot(row, v);
    for (std::size_t k = 0; k < m.cols; ++k) y[k] += s * row[k];
  }
}

}  // namespace

std::vector<double> first_principal_component(const Matrix& m) {
  if (m.rows == 0 || m.cols == 0 ||
      std::all_of(m.data.begin(), m.data.end(), [](double x) { return x == 0.0; })) {
    throw InputError("degenerate matrix");
  }
  std::mt19937_64 rng(kPowerIterationSeed);
  std::normal_distribution<double> gauss;
  std::vector<double> v(m.cols);
  for (auto& x : v) x = gauss(rng);
  double n = norm(v);
  for (auto& x : v) x /= n;

  std::vector<double> y(m.cols);
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    gram_apply(m, v, y);
    n = norm(y);
    if (n == 0.0) throw InputError("degenerate matrix");
    double same = 0.0;
    double flipped = 0.0;
    for (std::size_t k = 0; k < m.cols; ++k) {
      y[k] /= n;
      same += (y[k] - v[k]) * (y[k] - v[k]);
      flipped += (y[k] + v[k]) * (y[k] + v[k]);
    }
    v.swap(y);
    if (std::sqrt(std::min(same, flipped)) < kPowerIterationTolerance) break;
  }

  std::size_t peak = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (std::abs(v[k]) > std::abs(v[peak])) peak = k;
  }
  if (v[peak] < 0.0) {
    for (auto& x : v) x = -x;
  }
  return v;
}

Matrix remove_first_pc(const Matrix& m) {
  const auto u = first_principal_component(m);
  Matrix out = m;
  for (std::size_t r = 0; r < out.rows; ++r) {
    auto row = out.row(r);
    const double s = dot(row, u);
    for (std::size_t k = 0; k < out.cols; ++k) row[k] -= s * u[k];
  }
  return out;
}

WordTokenizer WordTokenizer::bpe(BpeModel model) {
  WordTokenizer t;
  t.model_ = std::move(model);
  return t;
}

WordTokenizer WordTokenizer::unigram(UnigramModel model) {
  WordTokenizer t;
  t.model_ = std::move(model);
  return t;
}

WordTokenizer WordTokenizer::pretokenised() { return WordTokenizer(); }

std::vector<std::string> WordTokenizer::pieces(std::string_view word) const {
  if (const auto* bpe = std::get_if<BpeModel>(&model_)) {
    const auto words = split_whitespace(word);
    return tokenize_sentence_bpe(*bpe, words);
  }
  if (const auto* uni = std::get_if<UnigramModel>(&model_)) {
    return encode_unigram(*uni, word);
  }
  return {std::string(word)};
}

std::optional<std::size_t> WordEmbeddingMatrix::find(std::string_view word) const {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == word) return i;
  }
  return std::nullopt;
}

VectorTable WordEmbeddingMatrix::table() const {
  VectorTable t(vectors.cols);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!oov[i]) t.add(words[i], vectors.row(i));
  }
  return t;
}

WordEmbeddingMatrix compose_words(std::span<const std::string> words,
                                  const WordTokenizer& tokenizer, const VectorTable& embeddings,
                                  const SubwordProbabilityTable& probs,
                                  const CompositionConfig& config) {
  WordEmbeddingMatrix out;
  out.config = config;
  StringSet seen;
  for (const auto& w : words) {
    if (seen.insert(w).second) out.words.push_back(w);
  }
  const std::size_t dim = embeddings.dim();
  out.vectors = Matrix(out.words.size(), dim);
  out.oov.assign(out.words.size(), false);

  std::vector<std::span<const double>> plain;
  std::vector<WeightedPiece> weighted;
  for (std::size_t r = 0; r < out.words.size(); ++r) {
    plain.clear();
    weighted.clear();
    std::vector<std::string> pieces;
    try {
      pieces = tokenizer.pieces(out.words[r]);
    } catch (const InputError&) {
      pieces.clear();
    }
    for (const auto& p : pieces) {
      if (auto id = embeddings.find(p)) {
        plain.push_back(embeddings.row(*id));
        weighted.push_back({embeddings.row(*id), probs.probability(p)});
      }
    }
    if (plain.empty()) {
      out.oov[r] = true;
      continue;
    }
    const auto v = config.method == CompositionMethod::kUnweighted
                       ? compose_unweighted(plain)
                       : compose_sif(weighted, config.a);
    std::copy(v.begin(), v.end(), out.vectors.row(r).begin());
  }

  if (config.method == CompositionMethod::kWeightedPcRemoved) {
    std::vector<std::size_t> live;
    for (std::size_t r = 0; r < out.words.size(); ++r) {
      if (!out.oov[r]) live.push_back(r);
    }
    if (!live.empty()) {
      Matrix m(live.size(), dim);
      for (std::size_t k = 0; k < live.size(); ++k) {
        std::ranges::copy(out.vectors.row(live[k]), m.row(k).begin());
      }
      const Matrix cleaned = remove_first_pc(m);
      for (std::size_t k = 0; k < live.size(); ++k) {
        std::ranges::copy(cleaned.row(k), out.vectors.row(live[k]).begin());
      }
    }
  }
  return out;
}

}  // namespace subtok
