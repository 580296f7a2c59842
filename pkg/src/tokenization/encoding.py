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

"""Permutation-invariant input encoding.

Every passage gets its own sequence ``[CLS] [INT] query [SEP] passage [SEP]``
whose position ids restart at zero, so nothing in a sequence reveals where
its passage sits in the candidate list.
"""

import dataclasses
from typing import Sequence, Tuple

import numpy as np

from src.errors import UsageError
from src.tokenization.vocab import CLS_ID, INT_ID, PAD_ID, SEP_ID, Vocab

MAX_QUERY_TOKENS = 32
MAX_PASSAGE_TOKENS = 256
CLS_POSITION = 0
INT_POSITION = 1


@dataclasses.dataclass(frozen=True)
class InputSequence:
    """One encoded query-passage pair.

    token_ids: vocabulary ids, padding uses [PAD].
    position_ids: 0, 1, 2, ... regardless of padding.
    mask: True for real tokens, False for padding.
    """

    token_ids: Tuple[int, ...]
    position_ids: Tuple[int, ...]
    mask: Tuple[bool, ...]

    def __len__(self):
        return len(self.token_ids)

    @property
    def unpadded_length(self) -> int:
        return sum(self.mask)

    def unpadded(self) -> "InputSequence":
        length = self.unpadded_length
        return InputSequence(
            self.token_ids[:length], self.position_ids[:length], self.mask[:length]
        )

    def padded(self, length: int) -> "InputSequence":
        extra = length - len(self)
        if extra < 0:
            raise UsageError(f"Cannot pad a sequence of {len(self)} to {length}.")
        return InputSequence(
            token_ids=self.token_ids + (PAD_ID,) * extra,
            position_ids=tuple(range(length)),
            mask=self.mask + (False,) * extra,
        )


@dataclasses.dataclass(frozen=True)
class EncodedBatch:
    """The k sequences of one query, padded to a common length.

    sequences: one InputSequence per passage, in storage order.
    passage_ids: external passage ids aligned with sequences.
    int_position: index of the [INT] token in every sequence.
    """

    sequences: Tuple[InputSequence, ...]
    passage_ids: Tuple[str, ...]
    int_position: int = INT_POSITION

    @property
    def k(self) -> int:
        return len(self.sequences)

    @property
    def length(self) -> int:
        return len(self.sequences[0])

    @property
    def token_ids(self) -> np.ndarray:
        return np.array([s.token_ids for s in self.sequences], dtype=np.int64)

    @property
    def position_ids(self) -> np.ndarray:
        return np.array([s.position_ids for s in self.sequences], dtype=np.int64)

    @property
    def mask(self) -> np.ndarray:
        return np.array([s.mask for s in self.sequences], dtype=bool)

    def permuted(self, order: Sequence[int]) -> "EncodedBatch":
        """Return the batch with sequence ``order[i]`` stored at index i."""
        if sorted(order) != list(range(self.k)):
            raise UsageError(f"{list(order)} is not a permutation of {self.k} items.")
        return EncodedBatch(
            sequences=tuple(self.sequences[i] for i in order),
            passage_ids=tuple(self.passage_ids[i] for i in order),
            int_position=self.int_position,
        )


def encode_pair(
    query: str,
    passage: str,
    vocab: Vocab,
    max_query_tokens: int = MAX_QUERY_TOKENS,
    max_passage_tokens: int = MAX_PASSAGE_TOKENS,
) -> InputSequence:
    # Head truncation: the leading tokens of each segment are kept.
    query_ids = vocab.encode_words(query)[:max_query_tokens]
    passage_ids = vocab.encode_words(passage)[:max_passage_tokens]
    ids = (CLS_ID, INT_ID, *query_ids, SEP_ID, *passage_ids, SEP_ID)
    return InputSequence(
        token_ids=ids,
        position_ids=tuple(range(len(ids))),
        mask=(True,) * len(ids),
    )


def encode_batch(
    query: str,
    passages: Sequence[Tuple[str, str]],
    vocab: Vocab,
    max_query_tokens: int = MAX_QUERY_TOKENS,
    max_passage_tokens: int = MAX_PASSAGE_TOKENS,
) -> EncodedBatch:
    """Encode ``(passage_id, text)`` pairs for one query and pad to the longest."""
    if not passages:
        raise UsageError("encode_batch needs at least one passage.")
    encoded = [
        encode_pair(query, text, vocab, max_query_tokens, max_passage_tokens)
        for _, text in passages
    ]
    length = max(len(s) for s in encoded)
    return EncodedBatch(
        sequences=tuple(s.padded(length) for s in encoded),
        passage_ids=tuple(pid for pid, _ in passages),
    )
