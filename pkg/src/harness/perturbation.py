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
from typing import List, Sequence

import numpy as np

from src.harness.instances import RunEntry, group_by_query
from src.metrics.judgments import QrelSet


class PerturbMode(enum.Enum):
    ORIGINAL = "original"
    RANDOM = "random"
    IDEAL = "ideal"
    REVERSE_IDEAL = "reverse_ideal"


def perturb(
    run: Sequence[RunEntry], mode: PerturbMode, qrels: QrelSet, seed: int = 0
) -> List[RunEntry]:
    """Reorder every query's ranking and renumber it.

    random: one generator seeded with ``seed`` shuffles queries in id order.
    ideal: relevance descending, ties by original rank; unjudged count as 0.
    reverse_ideal: the ideal order reversed.
    Scores become n - rank + 1 and the tag gets the mode as suffix.
    """
    mode = PerturbMode(mode)
    rng = np.random.default_rng(seed)
    suffix = f"-{mode.value}"
    output = []
    for qid, ranking in sorted(group_by_query(run).items()):
        if mode is PerturbMode.RANDOM:
            ranking = [ranking[i] for i in rng.permutation(len(ranking))]
        elif mode is not PerturbMode.ORIGINAL:
            ranking = sorted(
                ranking, key=lambda e: (-qrels.relevance(qid, e.passage_id), e.rank)
            )
            if mode is PerturbMode.REVERSE_IDEAL:
                ranking.reverse()
        n = len(ranking)
        output.extend(
            RunEntry(qid, e.passage_id, rank, float(n - rank + 1), e.tag + suffix)
            for rank, e in enumerate(ranking, start=1)
        )
    return output
