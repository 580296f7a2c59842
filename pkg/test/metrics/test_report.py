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

import unittest

from src.metrics.report import ALL_QUERIES, Metric, MetricReport, metric_name


class MetricReportTest(unittest.TestCase):
    def setUp(self):
        self.report = MetricReport()
        self.report.add_record(ALL_QUERIES, "ndcg@10", 0.5)
        self.report.add_record("q2", "ndcg@10", 0.25)
        self.report.add_record("q1", "ndcg@10", 0.75)

    def test_metric_name(self):
        self.assertEqual(metric_name(Metric.ALPHA_NDCG, 10), "alpha-ndcg@10")
        self.assertEqual(metric_name("ndcg", 5), "ndcg@5")

    def test_aggregate_and_values(self):
        self.assertEqual(self.report.aggregate("ndcg@10"), 0.5)
        self.assertIsNone(self.report.aggregate("alpha-ndcg@10"))
        self.assertEqual(self.report.values("ndcg@10"), {"q1": 0.75, "q2": 0.25})
        self.assertEqual(len(self.report.get_query_records()), 2)
        self.assertEqual(len(self.report.get_all_records()), 3)

    def test_lines_put_aggregate_last(self):
        self.assertEqual(
            self.report.to_lines(),
            [
                "q1\tndcg@10\t0.750000",
                "q2\tndcg@10\t0.250000",
                "all\tndcg@10\t0.500000",
            ],
        )

    def test_dict_arr(self):
        self.assertEqual(
            self.report.to_dict_arr()[0],
            {"query_id": "q1", "metric": "ndcg@10", "value": 0.75},
        )

    def test_human_readable_message(self):
        self.assertEqual(
            self.report.to_human_readable_message(),
            "ndcg@10 over 2 queries: 0.5000\n",
        )


if __name__ == "__main__":
    unittest.main()
