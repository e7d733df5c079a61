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

#include "subtok/vectors.h"

#include <charconv>
#include <cmath>
#include <fstream>

#include "subtok/corpus.h"
#include "subtok/error.h"

namespace subtok {

void VectorTable::add(std::string label, std::span<const double> values) {
  if (values.size() != dim_) {
    throw InputError("vector for '" + label + "' has dimension " +
                     std::to_string(values.size()) + ", expected " + std::to_string(dim_));
  }
  if (!index_.emplace(label, labels_.size()).second) {
    throw InputError("duplicate vector label: " + label);
  }
  labels_.push_back(std::move(label));
  data_.insert(data_.end(), values.begin(), values.end());
}

std::optional<std::size_t> VectorTable::find(std::string_view label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void write_vectors(std::ostream& out, const VectorTable& table,
                   std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[32];
  std::string line;
  for (std::size_t i = 0; i < table.size(); ++i) {
    line = table.label(i);
    for (double v : table.row(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      line.push_back(' ');
      line.append(buf, ptr);
    }
    line.push_back('\n');
    out << line;
  }
}

void write_vectors(const std::filesystem::path& path, const VectorTable& table,
                   std::span<const std::string> comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_vectors(out, table, comments);
  if (!out) throw Error("write failed: " + path.string());
}

namespace {

bool parse_double(std::string_view s, double& v) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& v) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

VectorTable read_vectors(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.starts_with('#')) continue;
    lines.push_back(std::move(line));
  }
  if (lines.empty()) return VectorTable(0);

  std::size_t first = 0;
  const auto head = split_whitespace(lines[0]);
  std::size_t n = 0;
  std::size_t d = 0;
  if (head.size() == 2 && parse_size(head[0], n) && parse_size(head[1], d) &&
      (lines.size() == 1 || split_whitespace(lines[1]).size() == d + 1)) {
    first = 1;
  }
  if (first == lines.size()) return VectorTable(d);

  const std::size_t dim = split_whitespace(lines[first]).size() - 1;
  VectorTable table(dim);
  std::vector<double> values(dim);
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto fields = split_whitespace(lines[i]);
    if (fields.size() != dim + 1) {
      throw InputError("vector line " + std::to_string(i + 1) + " has " +
                       std::to_string(fields.size() - 1) + " values, expected " +
                       std::to_string(dim));
    }
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_double(fields[k + 1], values[k])) {
        throw InputError("bad number on vector line " + std::to_string(i + 1));
      }
    }
    table.add(std::string(fields[0]), values);
  }
  return table;
}

VectorTable read_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open embeddings: " + path.string());
  return read_vectors(in);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace subtok
