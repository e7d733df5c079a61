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

#include "subtok/utf8.h"

namespace subtok::utf8 {

std::size_t char_len(char lead) {
  const auto c = static_cast<unsigned char>(lead);
  if (c < 0x80) return 1;
  if ((c & 0xE0) == 0xC0) return 2;
  if ((c & 0xF0) == 0xE0) return 3;
  if ((c & 0xF8) == 0xF0) return 4;
  return 1;
}

namespace {

std::size_t next_boundary(std::string_view text, std::size_t pos) {
  std::size_t len = char_len(text[pos]);
  if (pos + len > text.size()) return text.size();
  return pos + len;
}

}  // namespace

std::vector<std::string_view> split_chars(std::string_view text) {
  std::vector<std::string_view> out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t end = next_boundary(text, pos);
    out.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::vector<std::size_t> char_offsets(std::string_view text) {
  std::vector<std::size_t> out;
  out.reserve(text.size() + 1);
  std::size_t pos = 0;
  out.push_back(0);
  while (pos < text.size()) {
    pos = next_boundary(text, pos);
    out.push_back(pos);
  }
  return out;
}

std::size_t char_count(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < text.size(); pos = next_boundary(text, pos)) {
    ++n;
  }
  return n;
}

std::string_view prefix(std::string_view text, std::size_t n) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n && pos < text.size(); ++i) {
    pos = next_boundary(text, pos);
  }
  return text.substr(0, pos);
}

bool is_single_char(std::string_view text) {
  return !text.empty() && next_boundary(text, 0) == text.size();
}

}  // namespace subtok::utf8
