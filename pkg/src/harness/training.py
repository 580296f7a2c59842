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

"""Two-stage fine-tuning.

Stage 1 trains on one positive and sampled negatives per query with InfoNCE
or its duplicate-aware variant. Stage 2 distills teacher rankings of the
first-stage candidates with RankNet or its novelty-aware variant.
"""

import contextlib
import dataclasses
import enum
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.encoder.model import score_all, score_relevance
from src.encoder.model_io import SetEncoderModel
from src.errors import DataError, NumericDomainError, TrainingDivergedError
from src.harness.formats import Collection
from src.harness.instances import RankingInstance, rankings_by_query
from src.harness.options import TrainOptions
from src.harness.reranking import rerank
from src.losses.labels import labels_from_ranks
from src.losses.ranking_losses import da_info_nce_terms, info_nce, na_rank_net, rank_net
from src.metrics.evaluation import evaluate_run
from src.metrics.judgments import SubtopicMap
from src.metrics.report import metric_name
from src.novelty.augmentation import AugmentedInstance, inject_duplicate
from src.numerics.optim import AdamW
from src.numerics.tensor import Tensor
from src.tokenization.encoding import encode_batch

logger = logging.getLogger(__name__)

VALIDATION_DEPTH = 10


class Stage1Loss(enum.Enum):
    INFO_NCE = "info_nce"
    DA_INFO_NCE = "da_info_nce"


class Stage2Loss(enum.Enum):
    RANK_NET = "rank_net"
    NA_RANK_NET = "na_rank_net"


@dataclasses.dataclass
class TrainingResult:
    """The trained model and what happened on the way.

    loss_curve: mean batch loss of every step.
    heldout_bce: (step, mean held-out duplicate BCE per passage).
    validation: (step, held-out validation metric) after every epoch.
    """

    model: SetEncoderModel
    loss_curve: List[float]
    heldout_bce: List[Tuple[int, float]] = dataclasses.field(default_factory=list)
    validation: List[Tuple[int, float]] = dataclasses.field(default_factory=list)
    stopped_early: bool = False
    steps_run: int = 0


def stage1_instance(
    collection: Collection,
    query_id: str,
    candidates: Sequence[str],
    negatives: int,
    rng: np.random.Generator,
) -> Optional[RankingInstance]:
    """One positive plus up to ``negatives`` less relevant candidates, shuffled.

    The positive is the smallest id among the most relevant candidates.
    Returns None for queries without a relevant candidate or a negative.
    """
    rels = collection.qrels.for_query(query_id)
    best = max(rels.get(pid, 0) for pid in candidates)
    if best < 1:
        return None
    positive = min(pid for pid in candidates if rels.get(pid, 0) == best)
    pool = [pid for pid in candidates if rels.get(pid, 0) < best]
    if not pool:
        return None
    chosen = rng.choice(len(pool), size=min(negatives, len(pool)), replace=False)
    pids = [positive] + [pool[i] for i in chosen]
    instance = RankingInstance(
        query_id=query_id,
        query=collection.query_text(query_id),
        passages=tuple((pid, collection.corpus[pid]) for pid in pids),
        labels=tuple(float(rels.get(pid, 0)) for pid in pids),
        positive_index=0,
        cluster_ids=_cluster_ids(collection, query_id, pids),
    )
    return instance.subset(rng.permutation(len(pids)))


def stage2_instance(
    collection: Collection,
    query_id: str,
    candidates: Sequence[str],
    teacher_ranking: Sequence[str],
) -> RankingInstance:
    """First-stage candidates labeled by their teacher position (k - rank)."""
    ranked = [pid for pid in teacher_ranking if pid in set(candidates)]
    if len(ranked) != len(candidates):
        unranked = sorted(set(candidates) - set(ranked))
        raise DataError(f"Query {query_id}: teacher run lacks {unranked}")
    position = {pid: rank for rank, pid in enumerate(ranked, start=1)}
    labels = labels_from_ranks([position[pid] for pid in candidates])
    return RankingInstance(
        query_id=query_id,
        query=collection.query_text(query_id),
        passages=tuple((pid, collection.corpus[pid]) for pid in candidates),
        labels=tuple(labels.tolist()),
        cluster_ids=_cluster_ids(collection, query_id, candidates),
    )


def _cluster_ids(collection: Collection, query_id: str, pids: Sequence[str]):
    # Passages without a recorded cluster are their own near-duplicate group.
    assignment = collection.clusters.get(query_id)
    known = {} if assignment is None else assignment.cluster_ids
    fresh = max(known.values(), default=-1) + 1
    ids = []
    for pid in pids:
        if pid in known:
            ids.append(known[pid])
        else:
            ids.append(fresh)
            fresh += 1
    return tuple(ids)


def _encode(model: SetEncoderModel, instance: RankingInstance):
    return encode_batch(instance.query, instance.passages, model.vocab)


def _check_finite(step: int, loss: Tensor) -> float:
    value = loss.item()
    if not np.isfinite(value):
        raise TrainingDivergedError(step, f"loss is {value}")
    return value


@contextlib.contextmanager
def _diverges_at(step: int):
    # Non-finite activations surface as NumericDomainError in the forward pass.
    try:
        yield
    except NumericDomainError as e:
        raise TrainingDivergedError(step, str(e)) from e


def _duplicate_aware_terms(
    model: SetEncoderModel, augmented: AugmentedInstance, include_copy: bool
):
    scores, probs = score_all(
        model.params, _encode(model, augmented.instance), model.config
    )
    return da_info_nce_terms(
        scores,
        probs,
        augmented.instance.positive_index,
        augmented.duplicated_index,
        include_copy,
    )


class _Trainer:
    def __init__(self, collection: Collection, model: SetEncoderModel, options):
        self.collection = collection
        self.options = options
        self.model = dataclasses.replace(model, params=model.params.copy())
        self.rng = np.random.default_rng(options.seed)
        self.optimizer = AdamW(
            self.model.params.named_parameters(),
            learning_rate=options.learning_rate,
            weight_decay=options.weight_decay,
        )
        self.candidates = rankings_by_query(collection.first_stage)

    def step(self, step: int, losses: List[Tensor]) -> float:
        self.optimizer.zero_grad()
        total = Tensor.stack(losses).sum() / len(losses)
        value = _check_finite(step, total)
        if total.requires_grad:
            total.backward()
            self.optimizer.step()
        return value


def train_stage1(
    collection: Collection,
    model: SetEncoderModel,
    options: TrainOptions,
    loss: Stage1Loss = Stage1Loss.INFO_NCE,
) -> TrainingResult:
    """Contrastive fine-tuning for at most ``options.max_steps`` steps.

    With da_info_nce every step appends a copy of a random passage to each
    instance, and training stops early once the held-out duplicate BCE stayed
    below ``bce_threshold`` for ``patience_steps`` steps (after
    ``min_steps``).
    """
    loss = Stage1Loss(loss)
    trainer = _Trainer(collection, model, options)
    usable = _stage1_queries(trainer, sorted(collection.queries))
    if not usable:
        raise DataError(
            "No training query has a relevant and a non-relevant candidate."
        )
    duplicate_aware = loss is Stage1Loss.DA_INFO_NCE
    heldout = _heldout_instances(trainer) if duplicate_aware else []
    result = TrainingResult(trainer.model, [])
    below_since = None
    for step in range(1, options.max_steps + 1):
        picks = trainer.rng.choice(
            len(usable), size=min(options.batch_size, len(usable)), replace=False
        )
        instances = [
            stage1_instance(
                collection,
                usable[i],
                trainer.candidates[usable[i]],
                options.negatives,
                trainer.rng,
            )
            for i in picks
        ]
        with _diverges_at(step):
            losses = []
            for instance in instances:
                if duplicate_aware:
                    augmented = inject_duplicate(instance, trainer.rng)
                    terms = _duplicate_aware_terms(
                        trainer.model, augmented, options.include_copy
                    )
                    losses.append(terms.total)
                else:
                    scores = score_relevance(
                        trainer.model.params,
                        _encode(trainer.model, instance),
                        model.config,
                    )
                    losses.append(info_nce(scores, instance.positive_index))
            result.loss_curve.append(trainer.step(step, losses))
        result.steps_run = step
        if step % options.eval_every and step != options.max_steps:
            continue
        if not duplicate_aware:
            logger.info("stage 1 step %d: loss %.4f", step, result.loss_curve[-1])
            continue
        bce = heldout_bce(trainer.model, heldout, options.include_copy)
        result.heldout_bce.append((step, bce))
        logger.info(
            "stage 1 step %d: loss %.4f, held-out duplicate BCE %.4f",
            step,
            result.loss_curve[-1],
            bce,
        )
        if bce >= options.bce_threshold:
            below_since = None
            continue
        below_since = step if below_since is None else below_since
        if step - below_since >= options.patience_steps and step >= options.min_steps:
            logger.info(
                "Stopping at step %d: duplicate BCE below %g since step %d",
                step,
                options.bce_threshold,
                below_since,
            )
            result.stopped_early = True
            break
    return result


def _stage1_queries(trainer: _Trainer, query_ids: Sequence[str]) -> List[str]:
    # Queries whose candidates hold a positive and at least one negative.
    probe = np.random.default_rng(0)
    usable = []
    for qid in query_ids:
        if qid not in trainer.candidates:
            continue
        instance = stage1_instance(
            trainer.collection, qid, trainer.candidates[qid], 1, probe
        )
        if instance is not None:
            usable.append(qid)
    return usable


def _heldout_instances(trainer: _Trainer) -> List[AugmentedInstance]:
    options = trainer.options
    query_ids = _stage1_queries(trainer, sorted(trainer.collection.eval_queries))
    if not query_ids:
        logger.warning(
            "No held-out queries; monitoring duplicate BCE on training data."
        )
        query_ids = _stage1_queries(trainer, sorted(trainer.collection.queries))
    rng = np.random.default_rng(options.seed + 1)
    instances = []
    for qid in query_ids[: options.heldout_queries]:
        instance = stage1_instance(
            trainer.collection, qid, trainer.candidates[qid], options.negatives, rng
        )
        instances.append(inject_duplicate(instance, rng))
    return instances


def heldout_bce(
    model: SetEncoderModel,
    instances: Sequence[AugmentedInstance],
    include_copy: bool = False,
) -> float:
    """Mean duplicate-detection BCE per scored passage over ``instances``."""
    total, count = 0.0, 0
    with Tensor.no_grad():
        for augmented in instances:
            terms = _duplicate_aware_terms(model, augmented, include_copy)
            total += terms.bce.item()
            count += augmented.k + (1 if include_copy else 0)
    return total / count


def train_stage2(
    collection: Collection,
    model: SetEncoderModel,
    options: TrainOptions,
    loss: Stage2Loss = Stage2Loss.RANK_NET,
) -> TrainingResult:
    """Listwise distillation of the teacher run over ``options.epochs`` epochs.

    When a validation metric is set and held-out queries exist, the
    parameters of the epoch with the best held-out value are returned.
    """
    loss = Stage2Loss(loss)
    trainer = _Trainer(collection, model, options)
    instances = _stage2_instances(collection, collection.queries, options)
    if not instances:
        raise DataError("No training query has both first-stage and teacher rankings.")
    query_ids = sorted(instances)
    validate = options.validation_metric is not None and any(
        qid in trainer.candidates for qid in collection.eval_queries
    )
    result = TrainingResult(trainer.model, [])
    best_value, best_params = None, None
    step = 0
    for epoch in range(1, options.epochs + 1):
        order = [query_ids[i] for i in trainer.rng.permutation(len(query_ids))]
        for start in range(0, len(order), options.batch_size):
            step += 1
            with _diverges_at(step):
                losses = []
                for qid in order[start : start + options.batch_size]:
                    losses.append(_stage2_loss(trainer.model, instances[qid], loss))
                result.loss_curve.append(trainer.step(step, losses))
            if step % options.eval_every == 0:
                logger.info("stage 2 step %d: loss %.4f", step, result.loss_curve[-1])
        result.steps_run = step
        if not validate:
            continue
        value = validation_score(collection, trainer.model, options)
        result.validation.append((step, value))
        logger.info(
            "stage 2 epoch %d: held-out %s %.4f",
            epoch,
            metric_name(options.validation_metric, VALIDATION_DEPTH),
            value,
        )
        if best_value is None or value > best_value:
            best_value, best_params = value, trainer.model.params.copy()
    if best_params is not None:
        result.model = dataclasses.replace(trainer.model, params=best_params)
    return result


def _stage2_instances(
    collection: Collection, query_ids, options: TrainOptions
) -> Dict[str, RankingInstance]:
    # Queries with a teacher ranking and at least two first-stage candidates.
    candidates = rankings_by_query(collection.first_stage)
    teacher = rankings_by_query(collection.teacher)
    instances: Dict[str, RankingInstance] = {}
    for qid in sorted(query_ids):
        if qid in candidates and qid in teacher:
            pids = candidates[qid][: options.passages_per_query]
            if len(pids) > 1:
                instances[qid] = stage2_instance(collection, qid, pids, teacher[qid])
    return instances


def _stage2_loss(
    model: SetEncoderModel, instance: RankingInstance, loss: Stage2Loss
) -> Tensor:
    scores = score_relevance(model.params, _encode(model, instance), model.config)
    if loss is Stage2Loss.RANK_NET:
        return rank_net(scores, instance.labels)
    return na_rank_net(scores, instance.labels, instance.cluster_ids)


def heldout_rank_loss(
    collection: Collection,
    model: SetEncoderModel,
    options: TrainOptions,
    loss: Stage2Loss = Stage2Loss.RANK_NET,
) -> float:
    """Mean stage-2 loss per held-out query against the teacher run."""
    loss = Stage2Loss(loss)
    instances = _stage2_instances(collection, collection.eval_queries, options)
    if not instances:
        raise DataError("No held-out query has first-stage and teacher rankings.")
    with Tensor.no_grad():
        total = sum(
            _stage2_loss(model, instance, loss).item()
            for instance in instances.values()
        )
    return total / len(instances)


def validation_score(
    collection: Collection, model: SetEncoderModel, options: TrainOptions
) -> float:
    """Mean validation metric@10 of re-ranking the held-out first-stage lists."""
    held_out = set(collection.eval_queries)
    run = [e for e in collection.first_stage if e.query_id in held_out]
    reranked = rerank(
        model,
        run,
        collection.corpus,
        collection.eval_queries,
        top_k=options.passages_per_query,
    )
    report = evaluate_run(
        rankings_by_query(reranked),
        collection.qrels,
        options.validation_metric,
        k=VALIDATION_DEPTH,
        subtopics=SubtopicMap.from_clusters(collection.clusters),
    )
    return report.aggregate(metric_name(options.validation_metric, VALIDATION_DEPTH))
