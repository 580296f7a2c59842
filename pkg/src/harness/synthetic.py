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

"""Synthetic retrieval collections with planted relevance and near-duplicates.

Every query owns a handful of topic words no other query uses. Its relevant
passage contains all of them, hard negatives half of them and random
negatives none; the rest of every passage is filler. A near-duplicate is
made from the relevant passage by swapping a few filler words.
"""

import dataclasses
import logging
from typing import Dict, List, Tuple

import numpy as np

from src.errors import ConfigError
from src.harness.formats import Collection
from src.harness.instances import RunEntry, rank_by_score
from src.metrics.judgments import QrelSet
from src.novelty.clustering import ClusterAssignment, canonical_relabel
from src.novelty.jaccard import jaccard, word_set

logger = logging.getLogger(__name__)

RELEVANT = 2
PARTIAL = 1
NON_RELEVANT = 0
FIRST_STAGE_TAG = "overlap"
TEACHER_TAG = "teacher"


@dataclasses.dataclass(frozen=True)
class SyntheticConfig:
    """Size and noise of a generated collection.

    num_queries / num_eval_queries: training and held-out queries.
    passages_per_query: candidates per query in the first-stage run.
    duplicate_rate: fraction of relevant passages that get a near-duplicate.
    noise_rate: probability of swapping each adjacent pair in the teacher run.
    """

    num_queries: int = 200
    passages_per_query: int = 20
    vocab_size: int = 4000
    passage_length: int = 24
    duplicate_rate: float = 0.0
    noise_rate: float = 0.1
    seed: int = 0
    num_eval_queries: int = 50
    topic_words: int = 4
    hard_negatives: int = 4

    def __post_init__(self):
        for name in ("duplicate_rate", "noise_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(
                    f"{name} must lie in [0, 1], got {getattr(self, name)}"
                )
        for name in ("num_queries", "passages_per_query", "vocab_size", "topic_words"):
            if getattr(self, name) < 1:
                raise ConfigError(
                    f"{name} must be positive, got {getattr(self, name)}"
                )
        if self.num_eval_queries < 0 or self.hard_negatives < 0:
            raise ConfigError("num_eval_queries and hard_negatives must be >= 0.")
        if self.passages_per_query < 2:
            raise ConfigError("passages_per_query must be at least 2.")
        if self.hard_negatives > self.passages_per_query - 1:
            raise ConfigError(
                f"{self.hard_negatives} hard negatives do not fit "
                f"{self.passages_per_query} passages per query."
            )
        random_negatives = self.passages_per_query - 1 - self.hard_negatives
        if self.duplicate_rate > 0 and random_negatives < 1:
            raise ConfigError(
                "Near-duplicates replace a random negative, but "
                f"{self.hard_negatives} hard negatives leave none among "
                f"{self.passages_per_query} passages per query."
            )
        if self.passage_length < self.topic_words + 3:
            raise ConfigError(
                f"passage_length {self.passage_length} leaves fewer than three "
                f"filler words next to {self.topic_words} topic words."
            )

    @property
    def total_queries(self) -> int:
        return self.num_queries + self.num_eval_queries


def substitutions(passage_length: int) -> int:
    # With n distinct words and s swapped, Jaccard is (n - s) / (n + s) > 1/2
    # as long as s < n / 3.
    return max(1, (passage_length - 1) // 6)


class _Generator:
    def __init__(self, config: SyntheticConfig):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        words = [f"w{i:05d}" for i in range(config.vocab_size)]
        topic_total = config.total_queries * config.topic_words
        filler_needed = 4 * config.passage_length
        if config.vocab_size < topic_total + filler_needed:
            raise ConfigError(
                f"vocab_size {config.vocab_size} is too small: {topic_total} topic "
                f"words and at least {filler_needed} filler words are needed."
            )
        self.topic_pool = words[:topic_total]
        self.filler = np.array(words[topic_total:])

    def _filler(self, count: int, exclude=frozenset()) -> List[str]:
        pool = [w for w in self.filler if w not in exclude] if exclude else self.filler
        return [str(w) for w in self.rng.choice(pool, size=count, replace=False)]

    def _passage(self, topic: List[str]) -> List[str]:
        words = list(topic) + self._filler(self.config.passage_length - len(topic))
        return [str(w) for w in self.rng.permutation(words)]

    def _near_duplicate(self, words: List[str], topic: List[str]) -> List[str]:
        fillers = [i for i, w in enumerate(words) if w not in topic]
        swap = self.rng.choice(fillers, size=substitutions(len(words)), replace=False)
        replacements = self._filler(len(swap), exclude=frozenset(words))
        variant = list(words)
        for position, word in zip(sorted(swap), replacements):
            variant[position] = word
        return variant

    def query(self, index: int):
        config = self.config
        qid = f"q{index:04d}"
        topic = self.topic_pool[
            index * config.topic_words : (index + 1) * config.topic_words
        ]
        half = max(1, config.topic_words // 2)
        relevant = self._passage(topic)
        drafts: List[Tuple[List[str], int, int]] = [(relevant, RELEVANT, 0)]
        for _ in range(config.hard_negatives):
            partial = [str(w) for w in self.rng.choice(topic, size=half, replace=False)]
            drafts.append((self._passage(partial), PARTIAL, len(drafts)))
        while len(drafts) < config.passages_per_query:
            drafts.append((self._passage([]), NON_RELEVANT, len(drafts)))
        if self.rng.random() < config.duplicate_rate:
            duplicate = self._near_duplicate(relevant, topic)
            if jaccard(" ".join(relevant), " ".join(duplicate)) <= 0.5:
                raise ConfigError(
                    f"passage_length {config.passage_length} is too short for "
                    "near-duplicates above Jaccard 0.5."
                )
            # The duplicate takes the slot of the last random negative.
            drafts[-1] = (duplicate, RELEVANT, 0)
        order = self.rng.permutation(len(drafts))
        passages, rels, clusters = {}, {}, {}
        for slot, draft_index in enumerate(order):
            words, rel, cluster = drafts[draft_index]
            pid = f"{qid}-p{slot:03d}"
            passages[pid] = " ".join(words)
            rels[pid] = rel
            clusters[pid] = cluster
        assignment = canonical_relabel(ClusterAssignment(clusters))
        return qid, " ".join(topic), passages, rels, assignment

    def first_stage(self, qid, query, passages) -> List[RunEntry]:
        query_words = word_set(query)
        scored = [
            (pid, float(len(query_words & word_set(text))))
            for pid, text in passages.items()
        ]
        return rank_by_score(qid, scored, FIRST_STAGE_TAG)

    def teacher(self, qid, first_stage: List[RunEntry], rels) -> List[RunEntry]:
        ordered = sorted(
            first_stage, key=lambda e: (-rels[e.passage_id], -e.score, e.passage_id)
        )
        pids = [e.passage_id for e in ordered]
        for i in range(len(pids) - 1):
            if self.rng.random() < self.config.noise_rate:
                pids[i], pids[i + 1] = pids[i + 1], pids[i]
        n = len(pids)
        return [
            RunEntry(qid, pid, rank, float(n - rank + 1), TEACHER_TAG)
            for rank, pid in enumerate(pids, start=1)
        ]


def generate_synthetic(config: SyntheticConfig) -> Collection:
    """Generate corpus, queries, qrels, clusters, first-stage and teacher runs."""
    generator = _Generator(config)
    corpus: Dict[str, str] = {}
    queries: Dict[str, str] = {}
    eval_queries: Dict[str, str] = {}
    qrels = QrelSet()
    clusters = {}
    first_stage: List[RunEntry] = []
    teacher: List[RunEntry] = []
    for index in range(config.total_queries):
        qid, query, passages, rels, assignment = generator.query(index)
        (queries if index < config.num_queries else eval_queries)[qid] = query
        corpus.update(passages)
        for pid, rel in rels.items():
            qrels.add(qid, pid, rel)
        clusters[qid] = assignment
        ranking = generator.first_stage(qid, query, passages)
        first_stage.extend(ranking)
        teacher.extend(generator.teacher(qid, ranking, rels))
    logger.info(
        "Generated %d queries (%d held out) over %d passages",
        config.total_queries,
        config.num_eval_queries,
        len(corpus),
    )
    return Collection(
        corpus, queries, eval_queries, qrels, clusters, first_stage, teacher
    )
