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

from typing import List, Sequence

import numpy as np

from src.errors import DataError
from src.harness.instances import RunEntry, group_by_query

DEFAULT_DEPTH = 100


def rank_change_matrix(
    run_before: Sequence[RunEntry],
    run_after: Sequence[RunEntry],
    depth: int = DEFAULT_DEPTH,
) -> np.ndarray:
    """Entry (i, j): share of queries moving the passage at input rank i + 1
    to output rank j + 1.
    """
    before, after = group_by_query(run_before), group_by_query(run_after)
    if set(before) != set(after):
        raise DataError(
            f"Runs cover different queries: {sorted(set(before) ^ set(after))}"
        )
    matrix = np.zeros((depth, depth))
    for qid in sorted(before):
        output_rank = {e.passage_id: e.rank for e in after[qid]}
        if set(output_rank) != {e.passage_id for e in before[qid]}:
            raise DataError(f"Query {qid}: the runs rank different passages.")
        for entry in before[qid]:
            j = output_rank[entry.passage_id]
            if entry.rank <= depth and j <= depth:
                matrix[entry.rank - 1, j - 1] += 1.0
    if before:
        matrix /= len(before)
    return matrix


def matrix_to_csv_lines(matrix: np.ndarray) -> List[str]:
    """Header row and first column hold the 1-based ranks."""
    depth = matrix.shape[0]
    lines = ["rank," + ",".join(str(j) for j in range(1, depth + 1))]
    for i in range(depth):
        lines.append(f"{i + 1}," + ",".join(f"{v:.6f}" for v in matrix[i]))
    return lines


def write_rank_changes(path: str, matrix: np.ndarray):
    with open(path, "w") as f:
        for line in matrix_to_csv_lines(matrix):
            f.write(line + "\n")
