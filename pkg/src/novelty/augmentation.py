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

import dataclasses
from typing import Union

import numpy as np

from src.harness.instances import RankingInstance

COPY_SUFFIX = "#copy"


@dataclasses.dataclass(frozen=True)
class AugmentedInstance:
    """An instance whose last passage copies the one at duplicated_index."""

    instance: RankingInstance
    duplicated_index: int

    @property
    def k(self) -> int:
        """Number of original passages, excluding the copy."""
        return self.instance.k - 1


def inject_duplicate(
    instance: RankingInstance, rng_seed: Union[int, np.random.Generator]
) -> AugmentedInstance:
    """Append a verbatim copy of a uniformly sampled passage.

    The copy gets the id ``<passage_id>#copy`` and inherits the label and
    cluster of its original.
    """
    rng = np.random.default_rng(rng_seed)
    index = int(rng.integers(instance.k))
    pid, text = instance.passages[index]
    labels = instance.labels
    clusters = instance.cluster_ids
    augmented = dataclasses.replace(
        instance,
        passages=instance.passages + ((pid + COPY_SUFFIX, text),),
        labels=None if labels is None else labels + (labels[index],),
        cluster_ids=None if clusters is None else clusters + (clusters[index],),
    )
    return AugmentedInstance(augmented, index)
