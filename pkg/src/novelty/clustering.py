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

"""Near-duplicate grouping of the passages of one ranking."""

import dataclasses
import enum
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from src.errors import UsageError
from src.novelty.jaccard import jaccard_sets, word_set

DEFAULT_THRESHOLD = 0.5


class Linkage(enum.Enum):
    COMPLETE = "complete"
    SINGLE = "single"
    AVERAGE = "average"


@dataclasses.dataclass(frozen=True)
class ClusterAssignment:
    """Passage id to cluster id for the passages of one query.

    Cluster ids are 0..n_clusters-1; every passage belongs to exactly one.
    """

    cluster_ids: Mapping[str, int]

    def __getitem__(self, passage_id: str) -> int:
        return self.cluster_ids[passage_id]

    def __contains__(self, passage_id: str) -> bool:
        return passage_id in self.cluster_ids

    def __len__(self):
        return len(self.cluster_ids)

    @property
    def num_clusters(self) -> int:
        return len(set(self.cluster_ids.values()))

    @property
    def sizes(self) -> Dict[int, int]:
        sizes: Dict[int, int] = {}
        for cluster in self.cluster_ids.values():
            sizes[cluster] = sizes.get(cluster, 0) + 1
        return sizes

    def members(self) -> Dict[int, List[str]]:
        groups: Dict[int, List[str]] = {}
        for pid, cluster in self.cluster_ids.items():
            groups.setdefault(cluster, []).append(pid)
        return {c: sorted(pids) for c, pids in groups.items()}

    def ids_for(self, passage_ids: Sequence[str]) -> List[int]:
        missing = [pid for pid in passage_ids if pid not in self.cluster_ids]
        if missing:
            raise UsageError(f"Passages without a cluster: {missing}")
        return [self.cluster_ids[pid] for pid in passage_ids]


def canonical_relabel(assignment: ClusterAssignment) -> ClusterAssignment:
    """Renumber clusters in the order of their smallest member id."""
    groups = sorted(assignment.members().values(), key=lambda pids: pids[0])
    return ClusterAssignment(
        {pid: label for label, pids in enumerate(groups) for pid in pids}
    )


def similarity_matrix(texts: Sequence[str]) -> np.ndarray:
    words = [word_set(t) for t in texts]
    n = len(words)
    sim = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            sim[i, j] = sim[j, i] = jaccard_sets(words[i], words[j])
    return sim


def agglomerate(
    similarity: np.ndarray,
    threshold: float = DEFAULT_THRESHOLD,
    linkage: Linkage = Linkage.COMPLETE,
) -> List[int]:
    """Agglomerative clustering on a symmetric similarity matrix.

    Repeatedly merges the two clusters with the highest linkage similarity
    while it is strictly above ``threshold``. Ties go to the smallest
    (i, j) pair, where a cluster is indexed by its smallest member.
    Returns a cluster label per row, numbered by first appearance.
    """
    linkage = Linkage(linkage)
    n = similarity.shape[0]
    link = np.array(similarity, dtype=np.float64)
    np.fill_diagonal(link, -np.inf)
    sizes = np.ones(n)
    parent = list(range(n))
    active = np.ones(n, dtype=bool)
    while active.sum() > 1:
        candidates = np.where(np.triu(np.ones((n, n), dtype=bool), 1), link, -np.inf)
        candidates[~active, :] = -np.inf
        candidates[:, ~active] = -np.inf
        flat = int(np.argmax(candidates))
        i, j = divmod(flat, n)
        if not candidates[i, j] > threshold:
            break
        if linkage is Linkage.COMPLETE:
            merged = np.minimum(link[i], link[j])
        elif linkage is Linkage.SINGLE:
            merged = np.maximum(link[i], link[j])
        else:
            merged = (sizes[i] * link[i] + sizes[j] * link[j]) / (sizes[i] + sizes[j])
        link[i, :] = link[:, i] = merged
        link[i, i] = -np.inf
        sizes[i] += sizes[j]
        active[j] = False
        parent = [i if p == j else p for p in parent]
    labels: Dict[int, int] = {}
    return [labels.setdefault(root, len(labels)) for root in parent]


def cluster_near_duplicates(
    passages: Sequence[Tuple[str, str]],
    threshold: float = DEFAULT_THRESHOLD,
    linkage: Linkage = Linkage.COMPLETE,
) -> ClusterAssignment:
    """Group ``(passage_id, text)`` pairs whose word Jaccard exceeds ``threshold``."""
    if not passages:
        raise UsageError("cluster_near_duplicates needs at least one passage.")
    ids = [pid for pid, _ in passages]
    if len(set(ids)) != len(ids):
        raise UsageError("Passage ids must be unique within a ranking.")
    labels = agglomerate(
        similarity_matrix([text for _, text in passages]), threshold, linkage
    )
    return ClusterAssignment(dict(zip(ids, labels)))
