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

from src.errors import DataError, UsageError
from src.harness.instances import (
    RankingInstance,
    RunEntry,
    check_ranking,
    group_by_query,
    rank_by_score,
    rankings_by_query,
)


class RankingInstanceTest(unittest.TestCase):
    def setUp(self):
        self.instance = RankingInstance(
            query_id="q",
            query="query",
            passages=(("a", "x"), ("b", "y"), ("c", "z")),
            labels=(2.0, 1.0, 0.0),
            positive_index=1,
            cluster_ids=(0, 1, 1),
        )

    def test_subset_follows_positive(self):
        subset = self.instance.subset([2, 1])
        self.assertEqual(subset.passage_ids, ["c", "b"])
        self.assertEqual(subset.labels, (0.0, 1.0))
        self.assertEqual(subset.positive_index, 1)
        self.assertEqual(subset.cluster_ids, (1, 1))
        self.assertIsNone(self.instance.subset([0]).positive_index)

    def test_validation(self):
        with self.assertRaises(UsageError):
            RankingInstance("q", "query", ())
        with self.assertRaises(UsageError):
            RankingInstance("q", "query", (("a", "x"),), labels=(1.0, 2.0))
        with self.assertRaises(UsageError):
            RankingInstance("q", "query", (("a", "x"),), positive_index=1)


class RankingHelpersTest(unittest.TestCase):
    def test_rank_by_score_breaks_ties_by_id(self):
        entries = rank_by_score("q", [("b", 1.0), ("c", 2.0), ("a", 1.0)], "t")
        self.assertEqual([e.passage_id for e in entries], ["c", "a", "b"])
        self.assertEqual([e.rank for e in entries], [1, 2, 3])
        check_ranking(entries)

    def test_group_by_query_sorts_by_rank(self):
        entries = [RunEntry("q", "b", 2, 1.0, "t"), RunEntry("q", "a", 1, 2.0, "t")]
        self.assertEqual(rankings_by_query(entries), {"q": ["a", "b"]})
        self.assertEqual(group_by_query(entries)["q"][0].rank, 1)

    def test_check_ranking(self):
        with self.assertRaises(DataError):
            check_ranking([RunEntry("q", "a", 2, 1.0, "t")])
        with self.assertRaises(DataError):
            check_ranking(
                [RunEntry("q", "a", 1, 1.0, "t"), RunEntry("q", "b", 2, 2.0, "t")]
            )
        with self.assertRaises(DataError):
            check_ranking(
                [RunEntry("q", "a", 1, 1.0, "t"), RunEntry("q", "a", 2, 1.0, "t")]
            )


if __name__ == "__main__":
    unittest.main()
