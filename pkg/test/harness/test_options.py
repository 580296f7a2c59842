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

import os
import unittest
from unittest import mock

from src.errors import ConfigError
from src.harness.options import EvalOptions, TrainOptions
from src.metrics.ndcg import GainMode
from src.metrics.report import Metric


class TrainOptionsTest(unittest.TestCase):
    def test_defaults(self):
        opts = TrainOptions()
        self.assertEqual(opts.learning_rate, 1e-3)
        self.assertEqual(opts.bce_threshold, 0.05)
        self.assertEqual(opts.validation_metric, Metric.ALPHA_NDCG)
        self.assertFalse(opts.include_copy)
        self.assertEqual(opts.to_dict()["validation_metric"], "alpha-ndcg")

    def test_validation_can_be_disabled(self):
        opts = TrainOptions(validation_metric=None)
        self.assertIsNone(opts.validation_metric)
        self.assertIsNone(opts.to_dict()["validation_metric"])

    def test_invalid_values(self):
        for kwargs in (
            dict(learning_rate=0.0),
            dict(batch_size=0),
            dict(max_steps=-1),
            dict(min_steps=5, max_steps=2),
            dict(bce_threshold=1.5),
            dict(passages_per_query=101),
            dict(passages_per_query=1),
            dict(validation_metric="map"),
        ):
            with self.assertRaises(ConfigError):
                TrainOptions(**kwargs)


class EvalOptionsTest(unittest.TestCase):
    def test_defaults(self):
        opts = EvalOptions()
        self.assertEqual(opts.metric, Metric.NDCG)
        self.assertEqual(opts.k, 10)
        self.assertEqual(opts.gain_mode, GainMode.EXPONENTIAL)
        self.assertFalse(opts.human_readable_message)
        # Use default json path if not set.
        self.assertEqual(
            opts.output_json_path, os.path.join(os.getcwd(), "metrics.json")
        )
        self.assertIsNone(opts.output_report_path)

    def test_custom_paths(self):
        with mock.patch("os.path.isdir") as mocked_isdir:
            mocked_isdir.return_value = True
            opts = EvalOptions(
                metric="alpha-ndcg",
                output_json_path="out/metrics.json",
                output_report_path="out/report.tsv",
            )
        self.assertEqual(opts.metric, Metric.ALPHA_NDCG)
        self.assertEqual(opts.output_json_path, "out/metrics.json")
        self.assertEqual(opts.output_report_path, "out/report.tsv")

    def test_missing_output_directory(self):
        with self.assertRaises(ConfigError):
            EvalOptions(output_json_path="no/such/dir/metrics.json")

    def test_invalid_values(self):
        for kwargs in (
            dict(metric="map"),
            dict(gain_mode="cubic"),
            dict(k=0),
            dict(alpha=1.0),
        ):
            with self.assertRaises(ConfigError):
                EvalOptions(**kwargs)


if __name__ == "__main__":
    unittest.main()
