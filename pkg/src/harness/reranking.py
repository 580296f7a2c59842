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

import logging
from typing import List, Mapping, Sequence, Tuple

from src.encoder.model import score_relevance
from src.encoder.model_io import SetEncoderModel
from src.errors import DataError
from src.harness.instances import RunEntry, group_by_query, rank_by_score
from src.numerics.tensor import Tensor
from src.tokenization.encoding import encode_batch

logger = logging.getLogger(__name__)

DEFAULT_TOP_K = 100


def score_candidates(
    model: SetEncoderModel,
    query: str,
    candidates: Sequence[Tuple[str, str]],
    canonical: bool = True,
) -> List[Tuple[str, float]]:
    """Score ``(passage_id, text)`` candidates of one query in one forward pass.

    With ``canonical`` the candidates are sorted by passage id first, so the
    scores do not even depend on floating-point summation order.
    """
    if canonical:
        candidates = sorted(candidates)
    batch = encode_batch(query, candidates, model.vocab)
    with Tensor.no_grad():
        scores = score_relevance(model.params, batch, model.config).data
    return [(pid, float(s)) for pid, s in zip(batch.passage_ids, scores)]


def rerank(
    model: SetEncoderModel,
    run: Sequence[RunEntry],
    corpus: Mapping[str, str],
    queries: Mapping[str, str],
    top_k: int = DEFAULT_TOP_K,
    canonical: bool = True,
) -> List[RunEntry]:
    """Re-score the top_k passages of every query and sort them by score.

    Ties are broken by passage id. The tag column records the model name.
    """
    grouped = group_by_query(run)
    missing_queries = sorted(qid for qid in grouped if qid not in queries)
    if missing_queries:
        raise DataError(f"No query text for: {missing_queries}")
    missing = sorted(
        {
            e.passage_id
            for ranking in grouped.values()
            for e in ranking[:top_k]
            if e.passage_id not in corpus
        }
    )
    if missing:
        raise DataError(f"Passages missing from the corpus: {missing}")
    output: List[RunEntry] = []
    for qid in sorted(grouped):
        candidates = [
            (e.passage_id, corpus[e.passage_id]) for e in grouped[qid][:top_k]
        ]
        scored = score_candidates(model, queries[qid], candidates, canonical)
        output.extend(rank_by_score(qid, scored, model.name))
    logger.info("Re-ranked %d queries with %s", len(grouped), model.name)
    return output
