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

"""Attention-cost accounting for inter-passage attention.

With k sequences of padded length L, every layer that shares [INT] rows
builds k score matrices of L x (L + k - 1) entries per head. Concatenating
the k sequences into one input would instead build a single (kL) x (kL)
matrix.
"""

import collections
import dataclasses
from typing import Dict, List

from src.encoder.config import ModelConfig
from src.errors import UsageError


@dataclasses.dataclass(frozen=True)
class AttentionCost:
    """Score-matrix entries per layer and attention head."""

    set_encoder_entries: int
    concat_entries: int

    @property
    def ratio(self) -> float:
        return self.concat_entries / self.set_encoder_entries


def attention_cost(config: ModelConfig, k: int, L: int) -> AttentionCost:
    if k < 1 or L < 1:
        raise UsageError(f"attention_cost needs k >= 1 and L >= 1, got k={k}, L={L}.")
    return AttentionCost(
        set_encoder_entries=k * L * (L + k - 1),
        concat_entries=(k * L) ** 2,
    )


def expected_layer_entries(config: ModelConfig, k: int, L: int) -> List[int]:
    """Per-layer entries for ``config``, honouring interaction mode and layers."""
    return [
        k * L * (L + (k - 1 if config.interacts_at(layer) else 0))
        for layer in range(config.layers)
    ]


class AttentionCounter:
    """Collects the score-matrix entries ``encode`` builds, per layer and head."""

    def __init__(self):
        self._entries: Dict[int, int] = collections.defaultdict(int)

    def record(self, layer: int, entries: int):
        self._entries[layer] += entries

    def layer_entries(self) -> List[int]:
        if not self._entries:
            return []
        return [self._entries.get(i, 0) for i in range(max(self._entries) + 1)]

    def total(self) -> int:
        return sum(self._entries.values())

    def reset(self):
        self._entries.clear()
