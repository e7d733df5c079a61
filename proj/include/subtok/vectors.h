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

#ifndef SUBTOK_VECTORS_H_
#define SUBTOK_VECTORS_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subtok/string_map.h"

namespace subtok {

// Labelled dense vectors of one dimension, stored row-major.
class VectorTable {
 public:
  explicit VectorTable(std::size_t dim = 0) : dim_(dim) {}

  // Throws InputError on a duplicate label or a dimension mismatch.
  void add(std::string label, std::span<const double> values);

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return labels_.empty(); }

  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::optional<std::size_t> find(std::string_view label) const;

  bool operator==(const VectorTable& other) const {
    return dim_ == other.dim_ && labels_ == other.labels_ && data_ == other.data_;
  }

 private:
  std::size_t dim_;
  std::vector<std::string> labels_;
  std::vector<double> data_;
  StringMap<std::size_t> index_;
};

// "TOKEN v1 ... vD" per line, preceded by '#' comment lines and a "V D"
// header. Values use the shortest round-tripping decimal form.
void write_vectors(std::ostream& out, const VectorTable& table,
                   std::span<const std::string> comments = {});
void write_vectors(const std::filesystem::path& path, const VectorTable& table,
                   std::span<const std::string> comments = {});

// Accepts files with or without the "V D" header; skips '#' lines.
VectorTable read_vectors(std::istream& in);
VectorTable read_vectors(const std::filesystem::path& path);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

}  // namespace subtok

#endif  // SUBTOK_VECTORS_H_
