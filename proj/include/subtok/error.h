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

#ifndef SUBTOK_ERROR_H_
#define SUBTOK_ERROR_H_

#include <stdexcept>
#include <string>

namespace subtok {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unreadable files, malformed records, unknown tokens.
// The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// A character with no vocabulary piece covering it.
class UncoveredCharacterError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace subtok

#endif  // SUBTOK_ERROR_H_
