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

from typing import Mapping, Optional, Sequence

from src.errors import DataError, UsageError
from src.metrics.alpha_ndcg import alpha_ndcg_at_k
from src.metrics.judgments import QrelSet, SubtopicMap
from src.metrics.ndcg import GainMode, ndcg_at_k
from src.metrics.report import ALL_QUERIES, Metric, MetricReport, metric_name


def evaluate_run(
    rankings: Mapping[str, Sequence[str]],
    qrels: QrelSet,
    metric: Metric = Metric.NDCG,
    k: int = 10,
    alpha: float = 0.99,
    subtopics: Optional[SubtopicMap] = None,
    gain_mode: GainMode = GainMode.EXPONENTIAL,
    report: Optional[MetricReport] = None,
) -> MetricReport:
    """Score every ranked query and append the micro-average as query ``all``.

    rankings: passage ids in rank order, per query id.
    """
    metric = Metric(metric)
    if metric is Metric.ALPHA_NDCG and subtopics is None:
        raise UsageError("alpha-ndcg needs a subtopic map.")
    if ALL_QUERIES in rankings:
        raise DataError(f"`{ALL_QUERIES}` is reserved and cannot be a query id.")
    report = report if report is not None else MetricReport()
    name = metric_name(metric, k)
    total = 0.0
    for qid in sorted(rankings):
        judgments = qrels.for_query(qid)
        if metric is Metric.NDCG:
            value = ndcg_at_k(rankings[qid], judgments, k, gain_mode)
        else:
            value = alpha_ndcg_at_k(
                rankings[qid], judgments, subtopics.for_query(qid), k, alpha
            )
        report.add_record(qid, name, value)
        total += value
    if rankings:
        report.add_record(ALL_QUERIES, name, total / len(rankings))
    return report
