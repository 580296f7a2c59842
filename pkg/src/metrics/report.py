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

import enum
from typing import Dict, List, Optional

ALL_QUERIES = "all"


class Metric(enum.Enum):
    NDCG = "ndcg"
    ALPHA_NDCG = "alpha-ndcg"


def metric_name(metric: Metric, k: int) -> str:
    return f"{Metric(metric).value}@{k}"


class MetricRecord:
    def __init__(self, query_id: str, metric: str, value: float):
        self.query_id = query_id
        self.metric = metric
        self.value = value

    def to_dict(self):
        return {"query_id": self.query_id, "metric": self.metric, "value": self.value}

    def to_line(self) -> str:
        return f"{self.query_id}\t{self.metric}\t{self.value:.6f}"


class MetricReport:
    """Per-query metric values plus one aggregate row per metric."""

    def __init__(self):
        self.records: List[MetricRecord] = []

    def add_record(self, query_id: str, metric: str, value: float):
        self.records.append(MetricRecord(query_id, metric, float(value)))

    def get_all_records(self) -> List[MetricRecord]:
        return self.records

    def get_query_records(self) -> List[MetricRecord]:
        return [r for r in self.records if r.query_id != ALL_QUERIES]

    def aggregate(self, metric: str) -> Optional[float]:
        for record in self.records:
            if record.query_id == ALL_QUERIES and record.metric == metric:
                return record.value
        return None

    def values(self, metric: str) -> Dict[str, float]:
        return {
            r.query_id: r.value for r in self.get_query_records() if r.metric == metric
        }

    def _sorted(self) -> List[MetricRecord]:
        # Query rows by query id, then the aggregate rows.
        return sorted(
            self.records,
            key=lambda r: (r.query_id == ALL_QUERIES, r.query_id, r.metric),
        )

    def to_dict_arr(self):
        return [record.to_dict() for record in self._sorted()]

    def to_lines(self) -> List[str]:
        return [record.to_line() for record in self._sorted()]

    def to_human_readable_message(self) -> str:
        output_message = ""
        for record in self._sorted():
            if record.query_id == ALL_QUERIES:
                count = len(self.values(record.metric))
                output_message += (
                    f"{record.metric} over {count} queries: {record.value:.4f}\n"
                )
        return output_message
