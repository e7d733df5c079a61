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

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "subtok/error.h"

namespace subtok {

TokenVocabulary::TokenVocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<std::uint32_t>(i)).second) {
      throw InputError("duplicate vocabulary token: " + tokens_[i]);
    }
  }
}

TokenVocabulary TokenVocabulary::from_counts(const TokenFrequencyTable& counts,
                                             std::uint64_t min_count) {
  std::vector<std::string> tokens;
  for (auto& [token, count] : counts.sorted()) {
    if (count >= min_count) tokens.push_back(token);
  }
  return TokenVocabulary(std::move(tokens));
}

std::optional<std::uint32_t> TokenVocabulary::id(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CooccurrenceTable::CooccurrenceTable(std::vector<CooccurrenceEntry> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (!(entries_[k].x > 0.0) || !std::isfinite(entries_[k].x)) {
      throw InputError("co-occurrence entries must be positive and finite");
    }
    if (k > 0 && entries_[k].i == entries_[k - 1].i && entries_[k].j == entries_[k - 1].j) {
      throw InputError("duplicate co-occurrence entry");
    }
  }
}

double CooccurrenceTable::get(std::uint32_t i, std::uint32_t j) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), CooccurrenceEntry{i, j, 0.0},
                             [](const auto& a, const auto& b) {
                               return a.i != b.i ? a.i < b.i : a.j < b.j;
                             });
  if (it != entries_.end() && it->i == i && it->j == j) return it->x;
  return 0.0;
}

std::size_t CooccurrenceTable::id_bound() const {
  std::size_t bound = 0;
  for (const auto& e : entries_) bound = std::max<std::size_t>(bound, std::max(e.i, e.j) + 1);
  return bound;
}

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) return false;
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  std::memcpy(&value, bytes, sizeof(T));
  return true;
}

}  // namespace

void CooccurrenceTable::save(std::ostream& out) const {
  for (const auto& e : entries_) {
    put_le(out, e.i);
    put_le(out, e.j);
    put_le(out, e.x);
  }
}

CooccurrenceTable CooccurrenceTable::load(std::istream& in) {
  std::vector<CooccurrenceEntry> entries;
  CooccurrenceEntry e;
  while (get_le(in, e.i)) {
    if (!get_le(in, e.j) || !get_le(in, e.x)) {
      throw InputError("truncated co-occurrence record");
    }
    entries.push_back(e);
  }
  return CooccurrenceTable(std::move(entries));
}

void CooccurrenceTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  save(out);
}

CooccurrenceTable CooccurrenceTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open co-occurrence file: " + path.string());
  return load(in);
}

CooccurrenceBuilder::CooccurrenceBuilder(std::size_t window) : window_(window) {
  if (window_ < 1) throw InputError("window must be at least 1");
}

void CooccurrenceBuilder::add(std::uint32_t i, std::uint32_t j, double w) {
  cells_[(static_cast<std::uint64_t>(i) << 32) | j] += w;
}

void CooccurrenceBuilder::add_sentence(std::span<const std::optional<std::uint32_t>> ids) {
  for (std::size_t a = 0; a < ids.size(); ++a) {
    if (!ids[a]) continue;
    const std::size_t last = std::min(ids.size() - 1, a + window_);
    for (std::size_t b = a + 1; b <= last; ++b) {
      if (!ids[b]) continue;
      const double w = 1.0 / static_cast<double>(b - a);
      // Mirrored writes with identical addends keep X_ij == X_ji bitwise.
      add(*ids[a], *ids[b], w);
      add(*ids[b], *ids[a], w);
    }
  }
}

void CooccurrenceBuilder::merge(const CooccurrenceBuilder& other) {
  for (const auto& [key, x] : other.cells_) cells_[key] += x;
}

CooccurrenceTable CooccurrenceBuilder::finish() const {
  std::vector<CooccurrenceEntry> entries;
  entries.reserve(cells_.size());
  for (const auto& [key, x] : cells_) {
    entries.push_back({static_cast<std::uint32_t>(key >> 32),
                       static_cast<std::uint32_t>(key & 0xFFFFFFFFu), x});
  }
  return CooccurrenceTable(std::move(entries));
}

CooccurrenceTable build_cooccurrence(std::span<const std::string> sentences,
                                     const TokenVocabulary& vocab, std::size_t window) {
  CooccurrenceBuilder builder(window);
  std::vector<std::optional<std::uint32_t>> ids;
  for (const auto& s : sentences) {
    ids.clear();
    for (auto token : split_whitespace(s)) ids.push_back(vocab.id(token));
    builder.add_sentence(ids);
  }
  return builder.finish();
}

void TrainConfig::validate() const {
  if (dim < 1) throw InputError("dim must be >= 1");
  if (window < 1) throw InputError("window must be >= 1");
  if (!(x_max > 0.0)) throw InputError("x_max must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");
  if (!(learning_rate > 0.0)) throw InputError("learning rate must be > 0");
  if (epochs < 0) throw InputError("epochs must be >= 0");
  if (threads < 1) throw InputError("threads must be >= 1");
}

double glove_weight(double x, double x_max, double alpha) {
  if (!(x > 0.0)) throw InputError("co-occurrence weight needs x > 0");
  return x < x_max ? std::pow(x / x_max, alpha) : 1.0;
}

EmbeddingSet::EmbeddingSet(std::vector<std::string> tokens, std::size_t dim)
    : tokens_(std::move(tokens)),
      dim_(dim),
      main_(tokens_.size() * dim, 0.0),
      context_(tokens_.size() * dim, 0.0),
      bias_(tokens_.size(), 0.0),
      context_bias_(tokens_.size(), 0.0) {}

void EmbeddingSet::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double half = 0.5 / static_cast<double>(dim_);
  std::uniform_real_distribution<double> dist(-half, half);
  for (auto& v : main_) v = dist(rng);
  for (auto& v : context_) v = dist(rng);
  std::fill(bias_.begin(), bias_.end(), 0.0);
  std::fill(context_bias_.begin(), context_bias_.end(), 0.0);
}

VectorTable EmbeddingSet::exported() const {
  VectorTable table(dim_);
  std::vector<double> v(dim_);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    for (std::size_t k = 0; k < dim_; ++k) v[k] = main_[i * dim_ + k] + context_[i * dim_ + k];
    table.add(tokens_[i], v);
  }
  return table;
}

bool EmbeddingSet::all_finite() const {
  auto finite = [](const std::vector<double>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
  };
  return finite(main_) && finite(context_) && finite(bias_) && finite(context_bias_);
}

LossGrad loss_and_grad(const CooccurrenceEntry& entry, const EmbeddingSet& params,
                       const TrainConfig& config) {
  const auto w = params.main(entry.i);
  const auto c = params.context(entry.j);
  const double f = glove_weight(entry.x, config.x_max, config.alpha);
  const double residual =
      dot(w, c) + params.bias(entry.i) + params.context_bias(entry.j) - std::log(entry.x);
  const double g = 2.0 * f * residual;

  LossGrad out;
  out.loss = f * residual * residual;
  out.grad_main.resize(params.dim());
  out.grad_context.resize(params.dim());
  for (std::size_t k = 0; k < params.dim(); ++k) {
    out.grad_main[k] = g * c[k];
    out.grad_context[k] = g * w[k];
  }
  out.grad_bias = g;
  out.grad_context_bias = g;
  return out;
}

namespace {

template <bool Racy>
double load(const double& x) {
  if constexpr (Racy) {
    return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
  } else {
    return x;
  }
}

template <bool Racy>
void store(double& x, double v) {
  if constexpr (Racy) {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  } else {
    x = v;
  }
}

// AdaGrad accumulators, initialised to 1 so the first step is lr * g.
struct GradSquares {
  std::vector<double> main;
  std::vector<double> context;
  std::vector<double> bias;
  std::vector<double> context_bias;
};

template <bool Racy>
double sgd_step(const CooccurrenceEntry& e, EmbeddingSet& p, GradSquares& gs,
                const TrainConfig& cfg) {
  const std::size_t dim = p.dim();
  auto w = p.main(e.i);
  auto c = p.context(e.j);
  double* gw = gs.main.data() + e.i * dim;
  double* gc = gs.context.data() + e.j * dim;

  double inner = 0.0;
  for (std::size_t k = 0; k < dim; ++k) inner += load<Racy>(w[k]) * load<Racy>(c[k]);
  const double residual =
      inner + load<Racy>(p.bias(e.i)) + load<Racy>(p.context_bias(e.j)) - std::log(e.x);
  const double f = glove_weight(e.x, cfg.x_max, cfg.alpha);
  const double loss = f * residual * residual;
  if (!std::isfinite(loss)) return loss;
  const double g = 2.0 * f * residual;

  for (std::size_t k = 0; k < dim; ++k) {
    const double wk = load<Racy>(w[k]);
    const double ck = load<Racy>(c[k]);
    const double dw = g * ck;
    const double dc = g * wk;
    const double gwk = load<Racy>(gw[k]);
    const double gck = load<Racy>(gc[k]);
    store<Racy>(w[k], wk - cfg.learning_rate * dw / std::sqrt(gwk));
    store<Racy>(c[k], ck - cfg.learning_rate * dc / std::sqrt(gck));
    store<Racy>(gw[k], gwk + dw * dw);
    store<Racy>(gc[k], gck + dc * dc);
  }
  double& b = p.bias(e.i);
  double& bc = p.context_bias(e.j);
  const double gb = load<Racy>(gs.bias[e.i]);
  const double gbc = load<Racy>(gs.context_bias[e.j]);
  store<Racy>(b, load<Racy>(b) - cfg.learning_rate * g / std::sqrt(gb));
  store<Racy>(bc, load<Racy>(bc) - cfg.learning_rate * g / std::sqrt(gbc));
  store<Racy>(gs.bias[e.i], gb + g * g);
  store<Racy>(gs.context_bias[e.j], gbc + g * g);
  return loss;
}

[[noreturn]] void throw_non_finite(int epoch, const CooccurrenceEntry& e) {
  std::ostringstream msg;
  msg << "non-finite loss in epoch " << epoch + 1 << " at entry (" << e.i << ", " << e.j
      << ", x=" << e.x << "); try a lower learning rate";
  throw Error(msg.str());
}

}  // namespace

EmbeddingSet train_glove(const CooccurrenceTable& table, std::vector<std::string> tokens,
                         const TrainConfig& config, std::vector<double>* epoch_losses) {
  config.validate();
  if (table.empty()) throw InputError("empty co-occurrence table");
  if (table.id_bound() > tokens.size()) {
    throw InputError("co-occurrence ids exceed the vocabulary size");
  }

  EmbeddingSet params(std::move(tokens), config.dim);
  params.initialize(config.seed);
  const std::size_t v = params.size();
  GradSquares gs{std::vector<double>(v * config.dim, 1.0),
                 std::vector<double>(v * config.dim, 1.0), std::vector<double>(v, 1.0),
                 std::vector<double>(v, 1.0)};

  const auto& entries = table.entries();
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  if (epoch_losses) epoch_losses->clear();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    if (config.threads <= 1) {
      for (std::size_t k : order) {
        const double loss = sgd_step<false>(entries[k], params, gs, config);
        if (!std::isfinite(loss)) throw_non_finite(epoch, entries[k]);
        total += loss;
      }
    } else {
      const auto n = static_cast<std::size_t>(config.threads);
      std::vector<double> partial(n, 0.0);
      std::vector<std::ptrdiff_t> bad(n, -1);
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < n; ++t) {
        pool.emplace_back([&, t] {
          const std::size_t lo = order.size() * t / n;
          const std::size_t hi = order.size() * (t + 1) / n;
          for (std::size_t q = lo; q < hi; ++q) {
            const double loss = sgd_step<true>(entries[order[q]], params, gs, config);
            if (!std::isfinite(loss)) {
              bad[t] = static_cast<std::ptrdiff_t>(order[q]);
              return;
            }
            partial[t] += loss;
          }
        });
      }
      for (auto& th : pool) th.join();
      for (std::size_t t = 0; t < n; ++t) {
        if (bad[t] >= 0) throw_non_finite(epoch, entries[static_cast<std::size_t>(bad[t])]);
        total += partial[t];
      }
    }
    if (!params.all_finite()) throw Error("non-finite parameter after epoch " +
                                          std::to_string(epoch + 1));
    if (epoch_losses) epoch_losses->push_back(total / static_cast<double>(entries.size()));
  }
  return params;
}

}  // namespace subtok
