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

import collections
import re
from typing import Dict, Iterable, List, Sequence

from src.errors import DataError, UsageError

PAD, CLS, INT, SEP, UNK = "[PAD]", "[CLS]", "[INT]", "[SEP]", "[UNK]"
RESERVED_TOKENS = (PAD, CLS, INT, SEP, UNK)
PAD_ID, CLS_ID, INT_ID, SEP_ID, UNK_ID = range(len(RESERVED_TOKENS))

_WORD_PATTERN = re.compile(r"[^\W_]+")


def split_words(text: str) -> List[str]:
    """Lowercase ``text`` and split it on whitespace, punctuation and underscores."""
    return _WORD_PATTERN.findall(text.lower())


class Vocab:
    """Word-to-id mapping with the five reserved ids 0-4."""

    def __init__(self, words: Sequence[str]):
        self.id_to_token: List[str] = list(RESERVED_TOKENS)
        self.token_to_id: Dict[str, int] = {t: i for i, t in enumerate(RESERVED_TOKENS)}
        for word in words:
            if word in self.token_to_id:
                raise UsageError(f"Duplicate or reserved vocabulary entry `{word}`.")
            self.token_to_id[word] = len(self.id_to_token)
            self.id_to_token.append(word)

    def __len__(self):
        return len(self.id_to_token)

    def __contains__(self, token: str):
        return token in self.token_to_id

    def __eq__(self, other):
        return isinstance(other, Vocab) and self.id_to_token == other.id_to_token

    def token_id(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def encode_words(self, text: str) -> List[int]:
        return [self.token_id(w) for w in split_words(text)]

    def decode(self, ids: Iterable[int]) -> List[str]:
        return [self.id_to_token[i] for i in ids]

    def to_lines(self) -> List[str]:
        return [f"{token}\t{i}" for i, token in enumerate(self.id_to_token)]

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "Vocab":
        entries = []
        for line in lines:
            line = line.rstrip("\n")
            if not line:
                continue
            token, _, raw_id = line.partition("\t")
            try:
                entries.append((int(raw_id), token))
            except ValueError:
                raise DataError(f"Malformed vocab line: {line!r}")
        entries.sort()
        if [i for i, _ in entries] != list(range(len(entries))):
            raise DataError("Vocab ids must be contiguous from 0.")
        tokens = [t for _, t in entries]
        if tuple(tokens[: len(RESERVED_TOKENS)]) != RESERVED_TOKENS:
            raise DataError("Reserved tokens must occupy ids 0-4.")
        return cls(tokens[len(RESERVED_TOKENS) :])

    def save(self, path: str):
        with open(path, "w", encoding="utf-8") as f:
            f.write("".join(line + "\n" for line in self.to_lines()))

    @classmethod
    def load(cls, path: str) -> "Vocab":
        with open(path, encoding="utf-8") as f:
            return cls.from_lines(f)


def build_vocab(corpus: Iterable[str], min_count: int = 1) -> Vocab:
    """Collect words occurring at least ``min_count`` times, sorted for stable ids."""
    counts = collections.Counter()
    documents = 0
    for document in corpus:
        documents += 1
        counts.update(split_words(document))
    if not documents:
        raise UsageError("Cannot build a vocabulary from an empty corpus.")
    return Vocab(sorted(w for w, c in counts.items() if c >= min_count))
