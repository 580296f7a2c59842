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

import enum
from typing import Mapping, Sequence

import numpy as np

from src.errors import UsageError


class GainMode(enum.Enum):
    EXPONENTIAL = "exponential"
    LINEAR = "linear"


def gain(relevance: int, mode: GainMode = GainMode.EXPONENTIAL) -> float:
    if GainMode(mode) is GainMode.EXPONENTIAL:
        return float(2**relevance - 1)
    return float(relevance)


def discount(rank: int) -> float:
    """1 / log2(rank + 1) for a 1-based rank."""
    return 1.0 / np.log2(rank + 1)


def dcg(gains: Sequence[float]) -> float:
    return float(sum(g * discount(rank) for rank, g in enumerate(gains, start=1)))


def ndcg_at_k(
    ranking: Sequence[str],
    judgments: Mapping[str, int],
    k: int = 10,
    gain_mode: GainMode = GainMode.EXPONENTIAL,
) -> float:
    """nDCG@k of a ranked list of passage ids for one query.

    The ideal ordering sorts all judged passages, ranked or not. Returns 0
    when no judged passage is relevant.
    """
    if k < 1:
        raise UsageError(f"k must be at least 1, got {k}.")
    actual = dcg([gain(judgments.get(pid, 0), gain_mode) for pid in ranking[:k]])
    best = sorted(judgments.values(), reverse=True)[:k]
    ideal = dcg([gain(rel, gain_mode) for rel in best])
    if ideal == 0:
        return 0.0
    return actual / ideal
