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

#ifndef SUBTOK_UTF8_H_
#define SUBTOK_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace subtok::utf8 {

// Byte length of the code point starting with `lead`. Malformed lead bytes
// are treated as one-byte characters so every input has a segmentation.
std::size_t char_len(char lead);

// Splits `text` into one view per code point.
std::vector<std::string_view> split_chars(std::string_view text);

// Byte offsets of every code point boundary, including 0 and text.size().
std::vector<std::size_t> char_offsets(std::string_view text);

std::size_t char_count(std::string_view text);

// The first `n` code points of `text` (all of it when shorter).
std::string_view prefix(std::string_view text, std::size_t n);

bool is_single_char(std::string_view text);

}  // namespace subtok::utf8

#endif  // SUBTOK_UTF8_H_
