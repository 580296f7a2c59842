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

"""Line-oriented file formats of the re-ranking experiments.

run:      ``query_id Q0 passage_id rank score tag``, score with 6 decimals
qrels:    ``query_id 0 passage_id relevance``
corpus:   one JSON object per line with string fields ``id`` and ``text``
queries:  ``query_id<TAB>text``
clusters: ``query_id<TAB>passage_id<TAB>cluster_id``
"""

import dataclasses
import json
import logging
import os
from typing import Dict, Iterable, List, Mapping

from src.errors import DataError
from src.harness.instances import RunEntry, group_by_query
from src.metrics.judgments import QrelSet
from src.novelty.cluster_file import read_clusters, write_clusters
from src.novelty.clustering import ClusterAssignment

logger = logging.getLogger(__name__)

CORPUS_FILE = "corpus.jsonl"
QUERIES_FILE = "queries.tsv"
EVAL_QUERIES_FILE = "eval_queries.tsv"
QRELS_FILE = "qrels.txt"
CLUSTERS_FILE = "clusters.tsv"
FIRST_STAGE_FILE = "first_stage.run"
TEACHER_FILE = "teacher.run"


def format_run_entry(entry: RunEntry) -> str:
    return (
        f"{entry.query_id} Q0 {entry.passage_id} {entry.rank} "
        f"{entry.score:.6f} {entry.tag}"
    )


def run_to_lines(entries: Iterable[RunEntry]) -> List[str]:
    grouped = group_by_query(entries)
    return [
        format_run_entry(entry) for qid in sorted(grouped) for entry in grouped[qid]
    ]


def run_from_lines(lines: Iterable[str]) -> List[RunEntry]:
    entries = []
    for number, line in enumerate(lines, start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 6:
            raise DataError(f"Run line {number}: expected 6 fields, got {line!r}")
        qid, _, pid, rank, score, tag = fields
        try:
            entries.append(RunEntry(qid, pid, int(rank), float(score), tag))
        except ValueError:
            raise DataError(f"Run line {number}: bad rank or score in {line!r}")
    return entries


def qrels_to_lines(qrels: QrelSet) -> List[str]:
    return [f"{qid} 0 {pid} {rel}" for qid, pid, rel in qrels.items()]


def qrels_from_lines(lines: Iterable[str]) -> QrelSet:
    qrels = QrelSet()
    for number, line in enumerate(lines, start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 4:
            raise DataError(f"Qrels line {number}: expected 4 fields, got {line!r}")
        try:
            qrels.add(fields[0], fields[2], int(fields[3]))
        except ValueError:
            raise DataError(f"Qrels line {number}: bad relevance in {line!r}")
    return qrels


def corpus_to_lines(corpus: Mapping[str, str]) -> List[str]:
    return [
        json.dumps({"id": pid, "text": corpus[pid]}, sort_keys=True)
        for pid in sorted(corpus)
    ]


def corpus_from_lines(lines: Iterable[str]) -> Dict[str, str]:
    corpus = {}
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise DataError(f"Corpus line {number}: {e}")
        if not isinstance(record.get("id"), str) or not isinstance(
            record.get("text"), str
        ):
            raise DataError(f"Corpus line {number}: `id` and `text` must be strings.")
        corpus[record["id"]] = record["text"]
    return corpus


def queries_to_lines(queries: Mapping[str, str]) -> List[str]:
    return [f"{qid}\t{queries[qid]}" for qid in sorted(queries)]


def queries_from_lines(lines: Iterable[str]) -> Dict[str, str]:
    queries = {}
    for number, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        if "\t" not in line:
            raise DataError(f"Query line {number}: expected `id<TAB>text`.")
        qid, text = line.split("\t", 1)
        queries[qid] = text
    return queries


def _write_lines(path: str, lines: Iterable[str]):
    with open(path, "w") as f:
        for line in lines:
            f.write(line + "\n")


def _read_lines(path: str) -> List[str]:
    if not os.path.isfile(path):
        raise DataError(f"The file {path} is not existing.")
    with open(path) as f:
        return f.read().splitlines()


def write_run(path: str, entries: Iterable[RunEntry]):
    _write_lines(path, run_to_lines(entries))


def read_run(path: str) -> List[RunEntry]:
    return run_from_lines(_read_lines(path))


def write_qrels(path: str, qrels: QrelSet):
    _write_lines(path, qrels_to_lines(qrels))


def read_qrels(path: str) -> QrelSet:
    return qrels_from_lines(_read_lines(path))


def read_corpus(path: str) -> Dict[str, str]:
    return corpus_from_lines(_read_lines(path))


def read_queries(path: str) -> Dict[str, str]:
    return queries_from_lines(_read_lines(path))


@dataclasses.dataclass
class Collection:
    """A corpus with training and held-out queries and their judgments.

    first_stage: candidate rankings to re-rank.
    teacher: rankings whose positions become distillation labels.
    """

    corpus: Dict[str, str]
    queries: Dict[str, str]
    eval_queries: Dict[str, str]
    qrels: QrelSet
    clusters: Dict[str, ClusterAssignment]
    first_stage: List[RunEntry]
    teacher: List[RunEntry]

    def query_text(self, query_id: str) -> str:
        if query_id in self.queries:
            return self.queries[query_id]
        if query_id in self.eval_queries:
            return self.eval_queries[query_id]
        raise DataError(f"No query text for {query_id}.")

    def all_queries(self) -> Dict[str, str]:
        return {**self.queries, **self.eval_queries}

    def texts(self) -> List[str]:
        return [self.corpus[pid] for pid in sorted(self.corpus)] + [
            text for _, text in sorted(self.all_queries().items())
        ]


def write_collection(directory: str, collection: Collection):
    os.makedirs(directory, exist_ok=True)
    _write_lines(
        os.path.join(directory, CORPUS_FILE), corpus_to_lines(collection.corpus)
    )
    _write_lines(
        os.path.join(directory, QUERIES_FILE), queries_to_lines(collection.queries)
    )
    _write_lines(
        os.path.join(directory, EVAL_QUERIES_FILE),
        queries_to_lines(collection.eval_queries),
    )
    write_qrels(os.path.join(directory, QRELS_FILE), collection.qrels)
    write_clusters(os.path.join(directory, CLUSTERS_FILE), collection.clusters)
    write_run(os.path.join(directory, FIRST_STAGE_FILE), collection.first_stage)
    write_run(os.path.join(directory, TEACHER_FILE), collection.teacher)
    logger.info(
        "Wrote collection with %d passages to %s", len(collection.corpus), directory
    )


def load_collection(directory: str) -> Collection:
    if not os.path.isdir(directory):
        raise DataError(f"The directory {directory} is not existing.")
    clusters_path = os.path.join(directory, CLUSTERS_FILE)
    if not os.path.isfile(clusters_path):
        raise DataError(f"The file {clusters_path} is not existing.")
    teacher_path = os.path.join(directory, TEACHER_FILE)
    return Collection(
        corpus=read_corpus(os.path.join(directory, CORPUS_FILE)),
        queries=read_queries(os.path.join(directory, QUERIES_FILE)),
        eval_queries=read_queries(os.path.join(directory, EVAL_QUERIES_FILE)),
        qrels=read_qrels(os.path.join(directory, QRELS_FILE)),
        clusters=read_clusters(clusters_path),
        first_stage=read_run(os.path.join(directory, FIRST_STAGE_FILE)),
        teacher=read_run(teacher_path) if os.path.isfile(teacher_path) else [],
    )
