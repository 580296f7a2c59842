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

"""Reading and writing ``query_id<TAB>passage_id<TAB>cluster_id`` files."""

from typing import Dict, Iterable, List, Mapping

from src.errors import DataError
from src.novelty.clustering import ClusterAssignment


def clusters_to_lines(clusters: Mapping[str, ClusterAssignment]) -> List[str]:
    lines = []
    for qid in sorted(clusters):
        for pid, cluster in sorted(clusters[qid].cluster_ids.items()):
            lines.append(f"{qid}\t{pid}\t{cluster}")
    return lines


def clusters_from_lines(lines: Iterable[str]) -> Dict[str, ClusterAssignment]:
    per_query: Dict[str, Dict[str, int]] = {}
    for number, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise DataError(f"Cluster line {number}: expected 3 fields, got {line!r}")
        qid, pid, cluster = fields
        try:
            cluster_id = int(cluster)
        except ValueError:
            raise DataError(f"Cluster line {number}: bad cluster id {cluster!r}")
        assignment = per_query.setdefault(qid, {})
        if pid in assignment:
            raise DataError(f"Cluster line {number}: {qid}/{pid} listed twice.")
        assignment[pid] = cluster_id
    return {qid: ClusterAssignment(ids) for qid, ids in per_query.items()}


def write_clusters(path: str, clusters: Mapping[str, ClusterAssignment]):
    with open(path, "w") as f:
        for line in clusters_to_lines(clusters):
            f.write(line + "\n")


def read_clusters(path: str) -> Dict[str, ClusterAssignment]:
    with open(path) as f:
        return clusters_from_lines(f)
