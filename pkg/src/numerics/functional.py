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

import numpy as np

from src.errors import ShapeError, UsageError
from src.numerics.tensor import MASKED_SCORE, Tensor


def stable_softmax(x: Tensor, axis: int = -1) -> Tensor:
    """Softmax along ``axis`` with the maximum subtracted first."""
    if not -x.ndim <= axis < x.ndim:
        raise ShapeError(f"Axis {axis} is out of range for shape {x.shape}.")
    return x.softmax(axis=axis)


def attention(Q: Tensor, K: Tensor, V: Tensor, mask, head_dim: int) -> Tensor:
    """Scaled dot-product attention, softmax(QK^T / sqrt(head_dim)) V.

    Q: (..., Lq, d), K: (..., Lk, d), V: (..., Lk, dv).
    mask: booleans broadcastable to the (..., Lq, Lk) score matrix, True where
          attention is allowed. Masked keys receive exactly zero weight.
    """
    if head_dim <= 0:
        raise UsageError(f"head_dim must be positive, got {head_dim}.")
    if Q.shape[-1] != K.shape[-1]:
        raise ShapeError(f"Query width {Q.shape[-1]} != key width {K.shape[-1]}.")
    if K.shape[-2] != V.shape[-2]:
        raise ShapeError(f"{K.shape[-2]} keys but {V.shape[-2]} values.")
    scores = (Q @ K.swapaxes(-1, -2)) * (1.0 / math.sqrt(head_dim))
    mask = np.asarray(mask, dtype=bool)
    try:
        broadcast = np.broadcast_shapes(mask.shape, scores.shape)
    except ValueError as e:
        raise ShapeError(
            f"Mask of shape {mask.shape} does not match scores {scores.shape}."
        ) from e
    if broadcast != scores.shape:
        raise ShapeError(
            f"Mask of shape {mask.shape} does not match scores {scores.shape}."
        )
    weights = scores.masked_fill(~mask, MASKED_SCORE).softmax(axis=-1)
    return weights @ V


def layer_norm(x: Tensor, scale: Tensor, offset: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize over the last axis, then apply the learned scale and offset."""
    centered = x - x.mean(axis=-1, keepdims=True)
    variance = (centered * centered).mean(axis=-1, keepdims=True)
    return centered / (variance + eps) ** 0.5 * scale + offset


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    return x @ weight + bias
