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
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.errors import DataError, UsageError


@dataclasses.dataclass(frozen=True)
class RankingInstance:
    """One query with its candidate passages.

    passages: ``(passage_id, text)`` pairs in storage order.
    labels: teacher labels, higher is better; None when not distilling.
    positive_index: the labeled relevant passage of a stage-1 instance.
    cluster_ids: near-duplicate cluster per passage.
    """

    query_id: str
    query: str
    passages: Tuple[Tuple[str, str], ...]
    labels: Optional[Tuple[float, ...]] = None
    positive_index: Optional[int] = None
    cluster_ids: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        k = len(self.passages)
        if not k:
            raise UsageError(f"Query {self.query_id} has no passages.")
        if self.labels is not None and len(self.labels) != k:
            raise UsageError(f"Query {self.query_id}: labels do not match k={k}.")
        if self.cluster_ids is not None and len(self.cluster_ids) != k:
            raise UsageError(f"Query {self.query_id}: cluster ids do not match k={k}.")
        if self.positive_index is not None and not 0 <= self.positive_index < k:
            raise UsageError(f"Query {self.query_id}: bad positive index.")

    @property
    def k(self) -> int:
        return len(self.passages)

    @property
    def passage_ids(self) -> List[str]:
        return [pid for pid, _ in self.passages]

    def subset(self, indices: Sequence[int]) -> "RankingInstance":
        """Keep the passages at ``indices``, in that order."""
        indices = list(indices)
        positive = None
        if self.positive_index is not None and self.positive_index in indices:
            positive = indices.index(self.positive_index)
        return RankingInstance(
            query_id=self.query_id,
            query=self.query,
            passages=tuple(self.passages[i] for i in indices),
            labels=(
                None if self.labels is None else tuple(self.labels[i] for i in indices)
            ),
            positive_index=positive,
            cluster_ids=(
                None
                if self.cluster_ids is None
                else tuple(self.cluster_ids[i] for i in indices)
            ),
        )


@dataclasses.dataclass(frozen=True)
class RunEntry:
    query_id: str
    passage_id: str
    rank: int
    score: float
    tag: str


def group_by_query(entries: Iterable[RunEntry]) -> Dict[str, List[RunEntry]]:
    """Entries per query id, each list ordered by rank."""
    grouped: Dict[str, List[RunEntry]] = {}
    for entry in entries:
        grouped.setdefault(entry.query_id, []).append(entry)
    for ranking in grouped.values():
        ranking.sort(key=lambda e: e.rank)
    return grouped


def check_ranking(ranking: Sequence[RunEntry]):
    """Ranks must run 1..n and scores must not increase with rank."""
    for position, entry in enumerate(ranking, start=1):
        if entry.rank != position:
            raise DataError(
                f"Query {entry.query_id}: rank {entry.rank} where {position} expected."
            )
        if position > 1 and entry.score > ranking[position - 2].score:
            raise DataError(
                f"Query {entry.query_id}: score increases at rank {position}."
            )
    pids = [e.passage_id for e in ranking]
    if len(set(pids)) != len(pids):
        raise DataError(f"Query {ranking[0].query_id}: duplicate passage ids.")


def rank_by_score(
    query_id: str, scored: Iterable[Tuple[str, float]], tag: str
) -> List[RunEntry]:
    """Sort by score descending, ties by passage id, and number from 1."""
    ordered = sorted(scored, key=lambda item: (-item[1], item[0]))
    return [
        RunEntry(query_id, pid, rank, float(score), tag)
        for rank, (pid, score) in enumerate(ordered, start=1)
    ]


def rankings_by_query(entries: Iterable[RunEntry]) -> Dict[str, List[str]]:
    """Passage ids in rank order, per query id."""
    return {
        qid: [e.passage_id for e in ranking]
        for qid, ranking in group_by_query(entries).items()
    }
