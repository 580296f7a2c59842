# Copyright 2020 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from src.tokenization.vocab import split_words


def word_set(text: str) -> frozenset:
    return frozenset(split_words(text))


def jaccard(a: str, b: str) -> float:
    """Word-set Jaccard similarity of two texts; two empty texts score 1.0."""
    return jaccard_sets(word_set(a), word_set(b))


def jaccard_sets(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    if not union:
        return 1.0
    return len(a & b) / union
