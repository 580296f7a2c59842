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
from typing import Callable, List, Mapping, Tuple

import numpy as np

from src.numerics.tensor import Tensor


@dataclasses.dataclass
class GradientMismatch:
    name: str
    index: Tuple[int, ...]
    analytic: float
    numeric: float


@dataclasses.dataclass
class GradientCheckResult:
    checked: int
    mismatches: List[GradientMismatch]
    max_abs_error: float

    @property
    def ok(self) -> bool:
        return not self.mismatches


def gradient_check(
    loss_fn: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    step: float = 1e-5,
    rtol: float = 1e-4,
    atol: float = 1e-7,
) -> GradientCheckResult:
    """Compare autodiff gradients against central finite differences.

    An entry passes when |analytic - numeric| <= atol or when the error is at
    most rtol times the larger magnitude of the two.
    """
    for param in params.values():
        param.zero_grad()
    loss_fn().backward()
    analytic = {
        name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
        for name, p in params.items()
    }
    mismatches, checked, worst = [], 0, 0.0
    with Tensor.no_grad():
        for name, param in params.items():
            original = param.data
            for index in np.ndindex(*original.shape):
                shifted = original.copy()
                shifted[index] = original[index] + step
                param.data = shifted
                upper = loss_fn().item()
                shifted = original.copy()
                shifted[index] = original[index] - step
                param.data = shifted
                lower = loss_fn().item()
                param.data = original
                numeric = (upper - lower) / (2.0 * step)
                exact = float(analytic[name][index])
                error = abs(exact - numeric)
                worst = max(worst, error)
                checked += 1
                if error > atol and error > rtol * max(abs(exact), abs(numeric)):
                    mismatches.append(GradientMismatch(name, index, exact, numeric))
    return GradientCheckResult(checked, mismatches, worst)
