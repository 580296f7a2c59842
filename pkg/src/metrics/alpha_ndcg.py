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

"""Novelty-aware nDCG: every passage covers exactly one subtopic, its cluster.

Relevance is binarized at 1. A relevant passage covering a subtopic that
``c`` earlier relevant passages already covered gains ``(1 - alpha) ** c``.
"""

from typing import Dict, List, Mapping, Sequence

from src.errors import UsageError
from src.metrics.ndcg import dcg


def _subtopic(passage_id: str, subtopics: Mapping[str, int]):
    # Passages outside the map form a subtopic of their own.
    return subtopics.get(passage_id, ("unclustered", passage_id))


def _check_alpha(alpha: float):
    if not 0.0 <= alpha < 1.0:
        raise UsageError(f"alpha must lie in [0, 1), got {alpha}.")


def novelty_gains(
    ranking: Sequence[str],
    judgments: Mapping[str, int],
    subtopics: Mapping[str, int],
    alpha: float,
) -> List[float]:
    seen: Dict[object, int] = {}
    gains = []
    for pid in ranking:
        if judgments.get(pid, 0) < 1:
            gains.append(0.0)
            continue
        topic = _subtopic(pid, subtopics)
        count = seen.get(topic, 0)
        gains.append((1.0 - alpha) ** count)
        seen[topic] = count + 1
    return gains


def greedy_ideal(
    judgments: Mapping[str, int],
    subtopics: Mapping[str, int],
    alpha: float = 0.99,
    k: int = 10,
) -> List[str]:
    """Relevant passages in order of largest marginal gain, ties by passage id."""
    _check_alpha(alpha)
    remaining = sorted(pid for pid, rel in judgments.items() if rel >= 1)
    seen: Dict[object, int] = {}
    ideal = []
    while remaining and len(ideal) < k:
        best = max(
            remaining,
            key=lambda pid: (1.0 - alpha) ** seen.get(_subtopic(pid, subtopics), 0),
        )
        # max() keeps the first maximum, i.e. the smallest id.
        ideal.append(best)
        remaining.remove(best)
        topic = _subtopic(best, subtopics)
        seen[topic] = seen.get(topic, 0) + 1
    return ideal


def alpha_ndcg_at_k(
    ranking: Sequence[str],
    judgments: Mapping[str, int],
    subtopics: Mapping[str, int],
    k: int = 10,
    alpha: float = 0.99,
) -> float:
    _check_alpha(alpha)
    if k < 1:
        raise UsageError(f"k must be at least 1, got {k}.")
    best = greedy_ideal(judgments, subtopics, alpha, k)
    ideal = dcg(novelty_gains(best, judgments, subtopics, alpha))
    if ideal == 0:
        return 0.0
    return dcg(novelty_gains(ranking[:k], judgments, subtopics, alpha)) / ideal
