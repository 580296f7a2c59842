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

import dataclasses
from typing import Optional, Sequence, Union

import numpy as np

from src.errors import UsageError
from src.numerics.tensor import Tensor

ScoresLike = Union[Tensor, np.ndarray, Sequence[float]]


def _values(scores: ScoresLike) -> np.ndarray:
    return scores.data if isinstance(scores, Tensor) else np.asarray(scores, float)


@dataclasses.dataclass(frozen=True)
class LabeledScores:
    """Model scores of k passages with their training targets.

    labels: relevance-like, higher means preferred.
    positive_index: the single labeled relevant passage, when there is one.
    cluster_ids: near-duplicate cluster of every passage.
    """

    scores: Sequence[float]
    labels: Sequence[float]
    positive_index: Optional[int] = None
    cluster_ids: Optional[Sequence[int]] = None

    def __post_init__(self):
        k = len(self.scores)
        if len(self.labels) != k:
            raise UsageError(f"{k} scores but {len(self.labels)} labels.")
        if self.cluster_ids is not None and len(self.cluster_ids) != k:
            raise UsageError(f"{k} scores but {len(self.cluster_ids)} cluster ids.")
        if self.positive_index is not None and not 0 <= self.positive_index < k:
            raise UsageError(f"positive_index {self.positive_index} out of range.")

    @property
    def k(self) -> int:
        return len(self.scores)

    def permuted(self, order: Sequence[int]) -> "LabeledScores":
        order = list(order)
        return LabeledScores(
            scores=[self.scores[i] for i in order],
            labels=[self.labels[i] for i in order],
            positive_index=(
                None
                if self.positive_index is None
                else order.index(self.positive_index)
            ),
            cluster_ids=(
                None
                if self.cluster_ids is None
                else [self.cluster_ids[i] for i in order]
            ),
        )


def labels_from_ranks(rank_positions: Sequence[int]) -> np.ndarray:
    """Turn 1-based teacher rank positions of k passages into labels k - rank."""
    ranks = np.asarray(rank_positions, dtype=np.int64)
    k = len(ranks)
    if sorted(ranks.tolist()) != list(range(1, k + 1)):
        raise UsageError("Teacher ranks must be a permutation of 1..k.")
    return (k - ranks).astype(np.float64)


def adjusted_labels(
    scores: ScoresLike, labels: Sequence[float], cluster_ids: Sequence[int]
) -> np.ndarray:
    """Zero the label of every passage outscored by a member of its own cluster.

    Equal scores do not count as outscoring, so tied cluster members keep
    their labels.
    """
    s = _values(scores)
    r = np.asarray(labels, dtype=np.float64)
    c = np.asarray(cluster_ids)
    if not len(s) == len(r) == len(c):
        raise UsageError("scores, labels and cluster_ids must have equal length.")
    same_cluster = c[:, None] == c[None, :]
    outscored = (same_cluster & (s[:, None] < s[None, :])).any(axis=1)
    return np.where(outscored, 0.0, r)
