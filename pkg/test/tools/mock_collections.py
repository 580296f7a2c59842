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

from src.encoder.config import InteractionMode, ModelConfig
from src.encoder.model_io import SetEncoderModel
from src.encoder.params import init_params
from src.harness.formats import Collection
from src.harness.instances import RunEntry
from src.harness.synthetic import SyntheticConfig, generate_synthetic
from src.metrics.judgments import QrelSet
from src.novelty.clustering import ClusterAssignment
from src.tokenization.vocab import build_vocab


def make_synthetic(**overrides) -> Collection:
    values = dict(
        num_queries=12,
        num_eval_queries=4,
        passages_per_query=6,
        vocab_size=400,
        passage_length=12,
        topic_words=3,
        hard_negatives=2,
        seed=7,
    )
    values.update(overrides)
    return generate_synthetic(SyntheticConfig(**values))


def make_run(rankings, tag="base"):
    """Run entries from ``{query_id: [passage_id, ...]}`` in rank order."""
    entries = []
    for qid, pids in rankings.items():
        n = len(pids)
        entries.extend(
            RunEntry(qid, pid, rank, float(n - rank + 1), tag)
            for rank, pid in enumerate(pids, start=1)
        )
    return entries


def make_tiny_collection() -> Collection:
    """Two queries over hand-written passages, one duplicate pair in q1."""
    corpus = {
        "a": "alpha beta gamma delta",
        "b": "alpha beta gamma delta",
        "c": "epsilon zeta eta",
        "d": "alpha theta iota",
        "e": "kappa lambda mu",
    }
    first_stage = make_run({"q1": ["a", "b", "c"], "q2": ["d", "e"]}, "bm25")
    teacher = make_run({"q1": ["b", "a", "c"], "q2": ["d", "e"]}, "teacher")
    return Collection(
        corpus=corpus,
        queries={"q1": "alpha gamma"},
        eval_queries={"q2": "alpha theta"},
        qrels=QrelSet({"q1": {"a": 2, "b": 2, "c": 0}, "q2": {"d": 1}}),
        clusters={
            "q1": ClusterAssignment({"a": 0, "b": 0, "c": 1}),
            "q2": ClusterAssignment({"d": 0, "e": 1}),
        },
        first_stage=first_stage,
        teacher=teacher,
    )


def make_collection_model(
    collection: Collection,
    interaction_mode=InteractionMode.INT_TOKEN,
    seed: int = 0,
    **overrides,
) -> SetEncoderModel:
    """A tiny encoder whose vocabulary covers every word of ``collection``."""
    vocab = build_vocab(collection.texts())
    values = dict(
        vocab_size=len(vocab),
        layers=2,
        heads=2,
        model_dim=16,
        ffn_dim=32,
        interaction_mode=interaction_mode,
        init_seed=seed,
    )
    values.update(overrides)
    config = ModelConfig(**values)
    return SetEncoderModel(init_params(config, seed), config, vocab, "tiny")
