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
import tempfile
import unittest

from src.errors import DataError
from src.novelty.cluster_file import (
    clusters_from_lines,
    clusters_to_lines,
    read_clusters,
    write_clusters,
)
from src.novelty.clustering import ClusterAssignment


class ClusterFileTest(unittest.TestCase):
    def test_lines_are_sorted(self):
        clusters = {
            "q2": ClusterAssignment({"z": 0}),
            "q1": ClusterAssignment({"b": 1, "a": 0}),
        }
        self.assertEqual(
            clusters_to_lines(clusters), ["q1\ta\t0", "q1\tb\t1", "q2\tz\t0"]
        )

    def test_parse(self):
        clusters = clusters_from_lines(["q1\ta\t0\n", "\n", "q1\tb\t0\n", "q2\tc\t3"])
        self.assertEqual(clusters["q1"].cluster_ids, {"a": 0, "b": 0})
        self.assertEqual(clusters["q2"]["c"], 3)

    def test_bad_lines(self):
        with self.assertRaises(DataError):
            clusters_from_lines(["q1\ta"])
        with self.assertRaises(DataError):
            clusters_from_lines(["q1\ta\tx"])
        with self.assertRaises(DataError):
            clusters_from_lines(["q1\ta\t0", "q1\ta\t1"])

    def test_file_round_trip(self):
        clusters = {"q1": ClusterAssignment({"a": 0, "b": 1, "c": 0})}
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "clusters.tsv")
            write_clusters(path, clusters)
            self.assertEqual(read_clusters(path), clusters)


if __name__ == "__main__":
    unittest.main()
