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

#ifndef SUBTOK_CLI_H_
#define SUBTOK_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace subtok::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kUsageError = 2;

// Runs the command line `args` (args[0] is the program name) and returns
// the exit code. Subcommands: train-tokenizer, encode, cooccur,
// train-embeddings, eval, neighbors, analogy, bench. `--config FILE` reads
// flat key=value lines; flags given on the command line take precedence.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subtok::cli

#endif  // SUBTOK_CLI_H_
