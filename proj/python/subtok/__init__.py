# Copyright 2026 The subtok Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the subtok C++ library."""

import sys

from ._subtok import (
    BpeModel,
    Error,
    InputError,
    UnigramModel,
    cosine,
    evaluate_similarity,
    first_principal_component,
    glove_weight,
    harmonic_mean,
    nearest_neighbors,
    normalize,
    pearson,
    remove_first_pc,
    run_cli,
    sif_weight,
    spearman,
    train_bpe,
    train_glove,
    train_unigram,
)

__all__ = [
    "BpeModel",
    "Error",
    "InputError",
    "UnigramModel",
    "cosine",
    "evaluate_similarity",
    "first_principal_component",
    "glove_weight",
    "harmonic_mean",
    "nearest_neighbors",
    "normalize",
    "pearson",
    "remove_first_pc",
    "run_cli",
    "sif_weight",
    "spearman",
    "train_bpe",
    "train_glove",
    "train_unigram",
]


def main():
    """Console entry point mirroring the native `subtok` binary."""
    code, out, err = run_cli(sys.argv[1:])
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
