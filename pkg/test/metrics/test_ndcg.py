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

import math
import unittest

from src.errors import UsageError
from src.metrics.ndcg import GainMode, dcg, gain, ndcg_at_k


class NdcgTest(unittest.TestCase):
    def test_hand_computed(self):
        judgments = {"a": 0, "b": 2, "c": 1}
        self.assertAlmostEqual(ndcg_at_k(["a", "b", "c"], judgments, k=3), 0.6590, 4)

    def test_ideal_ranking_scores_one(self):
        judgments = {"a": 3, "b": 1, "c": 0}
        self.assertAlmostEqual(ndcg_at_k(["a", "b", "c"], judgments, k=10), 1.0)

    def test_ideal_includes_unranked_passages(self):
        # "b" is judged but missing from the ranking.
        judgments = {"a": 1, "b": 1}
        expected = 1.0 / (1.0 + 1.0 / math.log2(3))
        self.assertAlmostEqual(ndcg_at_k(["a", "x"], judgments, k=2), expected)

    def test_cutoff(self):
        judgments = {"a": 0, "b": 1}
        self.assertEqual(ndcg_at_k(["a", "b"], judgments, k=1), 0.0)

    def test_no_relevant_passages(self):
        self.assertEqual(ndcg_at_k(["a"], {"a": 0}, k=10), 0.0)
        self.assertEqual(ndcg_at_k(["a"], {}, k=10), 0.0)

    def test_linear_gain(self):
        self.assertEqual(gain(2, GainMode.LINEAR), 2.0)
        self.assertEqual(gain(2, GainMode.EXPONENTIAL), 3.0)
        judgments = {"a": 0, "b": 2, "c": 1}
        expected = dcg([0, 2, 1]) / dcg([2, 1, 0])
        self.assertAlmostEqual(
            ndcg_at_k(["a", "b", "c"], judgments, 3, GainMode.LINEAR), expected
        )

    def test_bad_k(self):
        with self.assertRaises(UsageError):
            ndcg_at_k(["a"], {"a": 1}, k=0)


if __name__ == "__main__":
    unittest.main()
