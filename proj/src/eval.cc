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

#include "subtok/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <utility>

#include "subtok/error.h"

namespace subtok {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& v) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::vector<std::string> SimilarityDataset::words() const {
  std::vector<std::string> out;
  StringSet seen;
  for (const auto& r : records) {
    for (const auto* w : {&r.word1, &r.word2}) {
      if (seen.insert(*w).second) out.push_back(*w);
    }
  }
  return out;
}

SimilarityDataset SimilarityDataset::load(std::istream& in, std::string name) {
  SimilarityDataset ds;
  ds.name = std::move(name);
  std::optional<std::pair<double, double>> declared;
  std::set<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with('#')) {
      const auto fields = split_whitespace(std::string_view(line).substr(1));
      double lo = 0.0;
      double hi = 0.0;
      if (fields.size() == 3 && fields[0] == "scale" && parse_double(fields[1], lo) &&
          parse_double(fields[2], hi)) {
        declared = {lo, hi};
      }
      continue;
    }
    const auto f = split_tabs(line);
    SimilarityRecord rec;
    if (f.size() < 3 || f.size() > 4 || f[0].empty() || f[1].empty() ||
        !parse_double(f[2], rec.rating)) {
      throw InputError("malformed dataset line " + std::to_string(line_no));
    }
    rec.word1 = f[0];
    rec.word2 = f[1];
    if (f.size() == 4 && !f[3].empty()) rec.pos = std::string(f[3]);
    auto key = std::minmax(rec.word1, rec.word2);
    if (!pairs.emplace(key.first, key.second).second) {
      throw InputError("duplicate pair on dataset line " + std::to_string(line_no));
    }
    ds.records.push_back(std::move(rec));
  }
  if (ds.records.empty()) throw InputError("dataset has no records");

  if (declared) {
    std::tie(ds.scale_min, ds.scale_max) = *declared;
    for (const auto& r : ds.records) {
      if (r.rating < ds.scale_min || r.rating > ds.scale_max) {
        throw InputError("rating outside the declared scale for " + r.word1 + "/" + r.word2);
      }
    }
  } else {
    auto [lo, hi] = std::minmax_element(ds.records.begin(), ds.records.end(),
                                        [](const auto& a, const auto& b) {
                                          return a.rating < b.rating;
                                        });
    ds.scale_min = lo->rating;
    ds.scale_max = hi->rating;
  }
  return ds;
}

SimilarityDataset SimilarityDataset::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dataset: " + path.string());
  return load(in, path.stem().string());
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InputError("cosine of vectors with different dimensions");
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw InputError("undefined cosine");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InputError("correlation inputs differ in length");
  if (xs.size() < 2) throw InputError("correlation needs at least 2 points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw InputError("correlation undefined for zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InputError("correlation inputs differ in length");
  if (xs.size() < 2) throw InputError("correlation needs at least 2 points");
  return pearson(average_ranks(xs), average_ranks(ys));
}

double harmonic_mean(double s, double p) {
  if (!(s > 0.0) || !(p > 0.0)) return 0.0;
  return 2.0 * s * p / (s + p);
}

namespace {

struct ScoredPairs {
  std::vector<double> ratings;
  std::vector<double> cosines;
  std::vector<std::optional<std::string>> pos;
};

ScoredPairs score_pairs(const SimilarityDataset& dataset, const VectorTable& vectors) {
  ScoredPairs out;
  for (const auto& r : dataset.records) {
    const auto i = vectors.find(r.word1);
    const auto j = vectors.find(r.word2);
    if (!i || !j) continue;
    const auto u = vectors.row(*i);
    const auto v = vectors.row(*j);
    if (norm(u) == 0.0 || norm(v) == 0.0) continue;
    out.ratings.push_back(r.rating);
    out.cosines.push_back(cosine(u, v));
    out.pos.push_back(r.pos);
  }
  return out;
}

CorrelationScores correlate(std::span<const double> ratings, std::span<const double> cosines) {
  CorrelationScores s;
  s.pairs_scored = ratings.size();
  if (ratings.size() < 2) throw InputError("insufficient coverage");
  s.spearman = spearman(ratings, cosines);
  s.pearson = pearson(ratings, cosines);
  s.harmonic = harmonic_mean(s.spearman, s.pearson);
  return s;
}

}  // namespace

EvalReport evaluate_similarity(const SimilarityDataset& dataset, const VectorTable& vectors) {
  const ScoredPairs scored = score_pairs(dataset, vectors);
  EvalReport report;
  report.pairs_total = dataset.records.size();
  report.pairs_scored = scored.ratings.size();
  const CorrelationScores s = correlate(scored.ratings, scored.cosines);
  report.spearman = s.spearman;
  report.pearson = s.pearson;
  report.harmonic = s.harmonic;
  return report;
}

EvalReport evaluate_similarity(const SimilarityDataset& dataset,
                               const WordEmbeddingMatrix& composed) {
  return evaluate_similarity(dataset, composed.table());
}

EvalReport evaluate_by_pos(const SimilarityDataset& dataset, const VectorTable& vectors) {
  EvalReport report = evaluate_similarity(dataset, vectors);

  std::map<std::string, std::size_t> totals;
  for (const auto& r : dataset.records) {
    if (r.pos) ++totals[*r.pos];
  }
  if (totals.empty()) throw InputError("dataset has no category tags");

  const ScoredPairs scored = score_pairs(dataset, vectors);
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (std::size_t k = 0; k < scored.ratings.size(); ++k) {
    if (!scored.pos[k]) continue;
    auto& [ratings, cosines] = groups[*scored.pos[k]];
    ratings.push_back(scored.ratings[k]);
    cosines.push_back(scored.cosines[k]);
  }

  double sum = 0.0;
  for (const auto& [category, total] : totals) {
    auto it = groups.find(category);
    if (it == groups.end()) {
      report.omitted_categories.push_back(category);
      continue;
    }
    try {
      CorrelationScores s = correlate(it->second.first, it->second.second);
      s.pairs_total = total;
      report.per_category.emplace(category, s);
      sum += s.harmonic;
    } catch (const InputError&) {
      report.omitted_categories.push_back(category);
    }
  }
  if (!report.per_category.empty()) {
    report.category_average = sum / static_cast<double>(report.per_category.size());
  }
  return report;
}

EvalReport evaluate_by_pos(const SimilarityDataset& dataset, const WordEmbeddingMatrix& composed) {
  return evaluate_by_pos(dataset, composed.table());
}

namespace {

std::vector<Neighbor> rank_against(const VectorTable& vectors, std::span<const double> target,
                                   std::size_t k, const StringSet& skip) {
  std::vector<Neighbor> all;
  all.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (skip.contains(vectors.label(i))) continue;
    const auto row = vectors.row(i);
    if (norm(row) == 0.0) continue;
    all.push_back({vectors.label(i), cosine(target, row)});
  }
  const std::size_t top = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(top), all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.cosine != b.cosine) return a.cosine > b.cosine;
                      return a.token < b.token;
                    });
  all.resize(top);
  return all;
}

std::size_t require(const VectorTable& vectors, std::string_view token) {
  auto id = vectors.find(token);
  if (!id) throw InputError("unknown token: " + std::string(token));
  return *id;
}

}  // namespace

std::vector<Neighbor> nearest_neighbors(const VectorTable& vectors, std::string_view query,
                                        std::size_t k) {
  if (k < 1) throw InputError("k must be >= 1");
  const auto q = vectors.row(require(vectors, query));
  if (norm(q) == 0.0) throw InputError("undefined cosine");
  return rank_against(vectors, q, k, StringSet{std::string(query)});
}

std::vector<Neighbor> solve_analogy(const VectorTable& vectors, std::string_view a,
                                    std::string_view b, std::string_view c, std::size_t k,
                                    bool exclude_queries) {
  if (k < 1) throw InputError("k must be >= 1");
  const auto va = vectors.row(require(vectors, a));
  const auto vb = vectors.row(require(vectors, b));
  const auto vc = vectors.row(require(vectors, c));
  std::vector<double> target(vectors.dim());
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = vb[i] - va[i] + vc[i];
  if (norm(target) == 0.0) throw InputError("undefined cosine");
  StringSet skip;
  if (exclude_queries) skip = {std::string(a), std::string(b), std::string(c)};
  return rank_against(vectors, target, k, skip);
}

void write_report(std::ostream& out, const EvalReport& report,
                  const std::map<std::string, std::string>& labels) {
  for (const auto& [key, value] : labels) out << key << ": " << value << '\n';
  out << "pairs_total: " << report.pairs_total << '\n';
  out << "pairs_scored: " << report.pairs_scored << '\n';
  out << "coverage: " << fixed6(report.coverage()) << '\n';
  out << "spearman: " << fixed6(report.spearman) << '\n';
  out << "pearson: " << fixed6(report.pearson) << '\n';
  out << "harmonic: " << fixed6(report.harmonic) << '\n';
  for (const auto& [category, s] : report.per_category) {
    out << "category." << category << ".pairs_scored: " << s.pairs_scored << '\n';
    out << "category." << category << ".spearman: " << fixed6(s.spearman) << '\n';
    out << "category." << category << ".pearson: " << fixed6(s.pearson) << '\n';
    out << "category." << category << ".harmonic: " << fixed6(s.harmonic) << '\n';
  }
  for (const auto& category : report.omitted_categories) {
    out << "category." << category << ".omitted: insufficient coverage\n";
  }
  if (report.category_average) {
    out << "category_average: " << fixed6(*report.category_average) << '\n';
  }
}

std::string report_csv_header() {
  return "dataset,tokenizer,method,pairs_total,pairs_scored,spearman,pearson,harmonic,"
         "category_average";
}

std::string report_csv_row(const EvalReport& report, std::string_view dataset,
                           std::string_view tokenizer, std::string_view method) {
  std::string row;
  row.append(dataset).append(",").append(tokenizer).append(",").append(method);
  row.append(",").append(std::to_string(report.pairs_total));
  row.append(",").append(std::to_string(report.pairs_scored));
  row.append(",").append(fixed6(report.spearman));
  row.append(",").append(fixed6(report.pearson));
  row.append(",").append(fixed6(report.harmonic));
  row.append(",");
  if (report.category_average) row.append(fixed6(*report.category_average));
  return row;
}

}  // namespace subtok
