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
import logging
from typing import Dict, Mapping, Optional

import numpy as np

from src.errors import ConfigError, UsageError
from src.numerics.tensor import Tensor

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class OptimizerState:
    """AdamW moment estimates and hyperparameters.

    first_moment / second_moment: one buffer per parameter name, shaped like
                                  the parameter.
    step_count: number of completed steps.
    """

    first_moment: Dict[str, np.ndarray]
    second_moment: Dict[str, np.ndarray]
    step_count: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.01

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ConfigError(f"Invalid learning rate: {self.learning_rate}")
        if not 0.0 <= self.beta1 < 1.0 or not 0.0 <= self.beta2 < 1.0:
            raise ConfigError(f"Invalid betas: ({self.beta1}, {self.beta2})")
        if self.epsilon < 0 or self.weight_decay < 0:
            raise ConfigError("epsilon and weight_decay must be non-negative.")

    @classmethod
    def for_params(cls, params: Mapping[str, Tensor], **hyperparameters):
        return cls(
            first_moment={n: np.zeros_like(p.data) for n, p in params.items()},
            second_moment={n: np.zeros_like(p.data) for n, p in params.items()},
            **hyperparameters,
        )


def adamw_step(
    params: Mapping[str, Tensor],
    state: OptimizerState,
    grads: Optional[Mapping[str, np.ndarray]] = None,
) -> OptimizerState:
    """Apply one AdamW update with decoupled weight decay.

    Gradients are read from ``grads`` when given, otherwise from each
    parameter's ``grad`` buffer. Parameter arrays are replaced, never
    written in place.
    """
    if grads is None:
        grads = {name: p.grad for name, p in params.items()}
    missing = [name for name in params if grads.get(name) is None]
    if missing:
        raise UsageError(f"Missing gradients for parameters: {missing}")
    state.step_count += 1
    t = state.step_count
    lr, b1, b2 = state.learning_rate, state.beta1, state.beta2
    for name, param in params.items():
        g = grads[name]
        m, v = state.first_moment.get(name), state.second_moment.get(name)
        if m is None or m.shape != param.shape or v.shape != param.shape:
            raise UsageError(f"Optimizer state does not match parameter `{name}`.")
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        state.first_moment[name], state.second_moment[name] = m, v
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        decayed = param.data * (1.0 - lr * state.weight_decay)
        param.data = decayed - lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return state


class AdamW:
    """Stateful wrapper around ``adamw_step`` for training loops."""

    def __init__(
        self,
        params: Mapping[str, Tensor],
        learning_rate: float = 1e-3,
        betas=(0.9, 0.999),
        epsilon: float = 1e-8,
        weight_decay: float = 0.01,
    ):
        self.params = params
        self.state = OptimizerState.for_params(
            params,
            learning_rate=learning_rate,
            beta1=betas[0],
            beta2=betas[1],
            epsilon=epsilon,
            weight_decay=weight_decay,
        )
        logger.debug(
            "AdamW over %d tensors: lr=%g betas=%s wd=%g",
            len(params),
            learning_rate,
            betas,
            weight_decay,
        )

    def step(self):
        # Tensors outside the loss graph (e.g. an unused head) are skipped.
        active = {n: p for n, p in self.params.items() if p.grad is not None}
        adamw_step(active, self.state)

    def zero_grad(self):
        for param in self.params.values():
            param.zero_grad()
