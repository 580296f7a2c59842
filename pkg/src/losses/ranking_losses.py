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

"""Training objectives for the two fine-tuning stages.

Scores are 1-d tensors (one entry per passage); labels, indices and cluster
ids are plain data and never differentiated through.
"""

from typing import NamedTuple, Sequence

import numpy as np

from src.errors import UsageError
from src.losses.labels import ScoresLike, adjusted_labels
from src.numerics.tensor import Tensor

PROBABILITY_CLIP = 1e-12


def _as_vector(scores: ScoresLike) -> Tensor:
    scores = Tensor.ensure(scores)
    if scores.ndim != 1 or scores.size == 0:
        raise UsageError(f"Expected a non-empty vector of scores, got {scores.shape}.")
    return scores


def info_nce(scores: ScoresLike, positive_index: int) -> Tensor:
    """-log softmax(scores)[positive_index]."""
    scores = _as_vector(scores)
    if not 0 <= positive_index < scores.size:
        raise UsageError(f"positive_index {positive_index} out of range.")
    return -scores.log_softmax(axis=0)[positive_index]


def rank_net(scores: ScoresLike, labels: Sequence[float]) -> Tensor:
    """Sum of log(1 + exp(s_i - s_j)) over pairs where j is preferred (r_i < r_j)."""
    scores = _as_vector(scores)
    r = np.asarray(labels, dtype=np.float64)
    if r.shape != scores.shape:
        raise UsageError(f"{scores.size} scores but {r.size} labels.")
    worse, better = np.nonzero(r[:, None] < r[None, :])
    if not len(worse):
        # Keeps the result attached to the graph so backward() still works.
        return (scores * 0.0).sum()
    return (scores.take(worse) - scores.take(better)).softplus().sum()


def na_rank_net(
    scores: ScoresLike, labels: Sequence[float], cluster_ids: Sequence[int]
) -> Tensor:
    """RankNet on labels zeroed for passages outscored by a near-duplicate."""
    scores = _as_vector(scores)
    return rank_net(scores, adjusted_labels(scores, labels, cluster_ids))


class DuplicateAwareTerms(NamedTuple):
    info_nce: Tensor
    bce: Tensor

    @property
    def total(self) -> Tensor:
        return self.info_nce + self.bce


def binary_cross_entropy(probabilities: Tensor, targets: np.ndarray) -> Tensor:
    """Summed BCE with probabilities clipped to [1e-12, 1 - 1e-12]."""
    p = probabilities.clip(PROBABILITY_CLIP, 1.0 - PROBABILITY_CLIP)
    t = np.asarray(targets, dtype=np.float64)
    return -((p.log() * t) + ((1.0 - p).log() * (1.0 - t))).sum()


def da_info_nce_terms(
    scores: ScoresLike,
    dup_probs: ScoresLike,
    positive_index: int,
    duplicated_index: int,
    include_copy: bool = False,
) -> DuplicateAwareTerms:
    """InfoNCE and duplicate-detection BCE over k originals plus one copy.

    The copy of passage ``duplicated_index`` sits at index k (the last entry).
    By default the copy is left out of both terms; ``include_copy`` adds it to
    the InfoNCE denominator and gives it BCE target 1.
    """
    scores, dup_probs = _as_vector(scores), _as_vector(dup_probs)
    if scores.size != dup_probs.size or scores.size < 2:
        raise UsageError("Need k + 1 >= 2 scores and as many duplicate probabilities.")
    k = scores.size - 1
    if not 0 <= duplicated_index < k:
        raise UsageError(f"duplicated_index {duplicated_index} outside 0..{k - 1}.")
    if not 0 <= positive_index < k:
        raise UsageError(f"positive_index {positive_index} outside 0..{k - 1}.")
    targets = np.zeros(k + 1)
    targets[duplicated_index] = 1.0
    if include_copy:
        targets[k] = 1.0
        return DuplicateAwareTerms(
            info_nce(scores, positive_index), binary_cross_entropy(dup_probs, targets)
        )
    return DuplicateAwareTerms(
        info_nce(scores[:k], positive_index),
        binary_cross_entropy(dup_probs[:k], targets[:k]),
    )


def da_info_nce(
    scores: ScoresLike,
    dup_probs: ScoresLike,
    positive_index: int,
    duplicated_index: int,
    include_copy: bool = False,
) -> Tensor:
    return da_info_nce_terms(
        scores, dup_probs, positive_index, duplicated_index, include_copy
    ).total
