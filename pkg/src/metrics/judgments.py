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

from typing import Dict, Iterator, List, Mapping, Tuple

from src.errors import DataError


class QrelSet:
    """Graded relevance judgments; unjudged pairs have relevance 0."""

    def __init__(self, judgments: Mapping[str, Mapping[str, int]] = None):
        self._judgments: Dict[str, Dict[str, int]] = {}
        for qid, rels in (judgments or {}).items():
            for pid, rel in rels.items():
                self.add(qid, pid, rel)

    def add(self, query_id: str, passage_id: str, relevance: int):
        if relevance < 0:
            raise DataError(f"Negative relevance for {query_id}/{passage_id}.")
        self._judgments.setdefault(query_id, {})[passage_id] = int(relevance)

    def relevance(self, query_id: str, passage_id: str) -> int:
        return self._judgments.get(query_id, {}).get(passage_id, 0)

    def for_query(self, query_id: str) -> Dict[str, int]:
        return dict(self._judgments.get(query_id, {}))

    @property
    def query_ids(self) -> List[str]:
        return sorted(self._judgments)

    def items(self) -> Iterator[Tuple[str, str, int]]:
        for qid in sorted(self._judgments):
            for pid, rel in sorted(self._judgments[qid].items()):
                yield qid, pid, rel

    def __len__(self):
        return sum(len(rels) for rels in self._judgments.values())

    def __eq__(self, other):
        return isinstance(other, QrelSet) and self._judgments == other._judgments


class SubtopicMap:
    """Subtopic (near-duplicate cluster) of judged passages, per query."""

    def __init__(self, subtopics: Mapping[str, Mapping[str, int]] = None):
        self._subtopics: Dict[str, Dict[str, int]] = {
            qid: dict(topics) for qid, topics in (subtopics or {}).items()
        }

    @classmethod
    def from_clusters(cls, clusters) -> "SubtopicMap":
        """Build from a ``query_id -> ClusterAssignment`` mapping."""
        return cls({qid: dict(a.cluster_ids) for qid, a in clusters.items()})

    def for_query(self, query_id: str) -> Dict[str, int]:
        return dict(self._subtopics.get(query_id, {}))

    def check_covers(self, qrels: QrelSet):
        for qid, pid, rel in qrels.items():
            if rel > 0 and pid not in self._subtopics.get(qid, {}):
                raise DataError(f"Relevant passage {qid}/{pid} has no subtopic.")
