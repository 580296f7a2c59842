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

import collections
from typing import Dict, Iterator, Mapping, Tuple

import numpy as np

from src.encoder.config import ModelConfig
from src.errors import ConfigError, NumericDomainError
from src.numerics.tensor import Tensor

_ATTENTION = ("wq", "wk", "wv", "wo")


class ModelParams:
    """Named parameter tensors of the encoder, in a fixed order.

    Names follow ``embeddings.*``, ``layers.<i>.*``, ``relevance_head.*`` and
    ``duplicate_head.*``; the order is the checkpoint record order.
    """

    def __init__(self, tensors: "collections.OrderedDict[str, Tensor]"):
        self.tensors = tensors

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def __len__(self):
        return len(self.tensors)

    def items(self):
        return self.tensors.items()

    def named_parameters(self) -> Mapping[str, Tensor]:
        return self.tensors

    def layer(self, index: int, name: str) -> Tensor:
        return self.tensors[f"layers.{index}.{name}"]

    def arrays(self) -> "collections.OrderedDict[str, np.ndarray]":
        return collections.OrderedDict((n, t.data.copy()) for n, t in self.items())

    def copy(self) -> "ModelParams":
        return ModelParams.from_arrays(self.arrays())

    def count(self) -> int:
        return sum(t.size for t in self.tensors.values())

    def zero_grad(self):
        for tensor in self.tensors.values():
            tensor.zero_grad()

    @classmethod
    def from_arrays(cls, arrays: Mapping[str, np.ndarray]) -> "ModelParams":
        tensors = collections.OrderedDict()
        for name, array in arrays.items():
            if not np.all(np.isfinite(array)):
                raise NumericDomainError(f"Parameter `{name}` holds non-finite values.")
            tensors[name] = Tensor(array, requires_grad=True, name=name)
        return cls(tensors)

    def check_shapes(self, config: ModelConfig):
        expected = parameter_shapes(config)
        actual = {n: t.shape for n, t in self.items()}
        if list(expected) != list(actual) or dict(expected) != actual:
            raise ConfigError("Parameters do not match the model config.")


def parameter_shapes(config: ModelConfig) -> "collections.OrderedDict[str, Tuple]":
    d, f = config.model_dim, config.ffn_dim
    shapes = collections.OrderedDict()
    shapes["embeddings.token"] = (config.vocab_size, d)
    shapes["embeddings.position"] = (config.max_positions, d)
    shapes["embeddings.norm.scale"] = (d,)
    shapes["embeddings.norm.offset"] = (d,)
    for i in range(config.layers):
        prefix = f"layers.{i}"
        for w in _ATTENTION:
            shapes[f"{prefix}.attention.{w}"] = (d, d)
            shapes[f"{prefix}.attention.b{w[1]}"] = (d,)
        shapes[f"{prefix}.attention_norm.scale"] = (d,)
        shapes[f"{prefix}.attention_norm.offset"] = (d,)
        shapes[f"{prefix}.ffn.w1"] = (d, f)
        shapes[f"{prefix}.ffn.b1"] = (f,)
        shapes[f"{prefix}.ffn.w2"] = (f, d)
        shapes[f"{prefix}.ffn.b2"] = (d,)
        shapes[f"{prefix}.ffn_norm.scale"] = (d,)
        shapes[f"{prefix}.ffn_norm.offset"] = (d,)
    for head in ("relevance_head", "duplicate_head"):
        shapes[f"{head}.weight"] = (d, 1)
        shapes[f"{head}.bias"] = (1,)
    return shapes


def _fan_in(name: str, shape: Tuple[int, ...], config: ModelConfig) -> int:
    if name.startswith("embeddings."):
        return config.model_dim
    if name.endswith("ffn.b2"):
        return config.ffn_dim
    # Weight matrices are stored (in, out); biases share their matrix's fan-in.
    return shape[0] if len(shape) == 2 else config.model_dim


def init_params(config: ModelConfig, seed: int = None) -> ModelParams:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights; LayerNorm scale 1, offset 0."""
    rng = np.random.default_rng(config.init_seed if seed is None else seed)
    arrays: Dict[str, np.ndarray] = collections.OrderedDict()
    for name, shape in parameter_shapes(config).items():
        if name.endswith("norm.scale"):
            arrays[name] = np.ones(shape)
        elif name.endswith("norm.offset"):
            arrays[name] = np.zeros(shape)
        else:
            bound = 1.0 / np.sqrt(_fan_in(name, shape, config))
            arrays[name] = rng.uniform(-bound, bound, size=shape)
    return ModelParams.from_arrays(arrays)
