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
import enum
from typing import Any, Dict, Optional, Tuple

from src.errors import ConfigError
from src.tokenization.encoding import MAX_PASSAGE_TOKENS, MAX_QUERY_TOKENS


class InteractionMode(enum.Enum):
    # Foreign [INT] rows are appended to every sequence's keys and values.
    INT_TOKEN = "int_token"
    # Ablation: the [CLS] rows are shared instead.
    CLS_TOKEN = "cls_token"
    # Pointwise cross-encoder, no cross-sequence path.
    NONE = "none"


@dataclasses.dataclass(frozen=True)
class ModelConfig:
    """Shape and behaviour of the encoder.

    interaction_layers: indices of the layers that apply inter-passage
                        attention; None means every layer.
    init_seed: seed for parameter initialization.
    """

    vocab_size: int
    layers: int = 2
    heads: int = 4
    model_dim: int = 64
    ffn_dim: int = 256
    max_positions: int = MAX_QUERY_TOKENS + MAX_PASSAGE_TOKENS + 4
    dropout_rate: float = 0.0
    interaction_mode: InteractionMode = InteractionMode.INT_TOKEN
    interaction_layers: Optional[Tuple[int, ...]] = None
    layer_norm_eps: float = 1e-5
    init_seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(
                self, "interaction_mode", InteractionMode(self.interaction_mode)
            )
        except ValueError:
            raise ConfigError(f"Unknown interaction mode `{self.interaction_mode}`.")
        if self.interaction_layers is not None:
            object.__setattr__(
                self, "interaction_layers", tuple(sorted(set(self.interaction_layers)))
            )
            if any(not 0 <= i < self.layers for i in self.interaction_layers):
                raise ConfigError(
                    f"interaction_layers {self.interaction_layers} outside "
                    f"0..{self.layers - 1}."
                )
        for name in ("vocab_size", "layers", "heads", "model_dim", "ffn_dim"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive.")
        if self.model_dim % self.heads:
            raise ConfigError(
                f"model_dim {self.model_dim} is not divisible by heads {self.heads}."
            )
        if self.max_positions < 5:
            raise ConfigError("max_positions cannot hold the special tokens.")
        # Dropout is not implemented.
        if self.dropout_rate != 0.0:
            raise ConfigError("Only dropout_rate=0 is supported.")

    @property
    def head_dim(self) -> int:
        return self.model_dim // self.heads

    def interacts_at(self, layer: int) -> bool:
        if self.interaction_mode is InteractionMode.NONE:
            return False
        return self.interaction_layers is None or layer in self.interaction_layers

    def to_dict(self) -> Dict[str, Any]:
        values = dataclasses.asdict(self)
        values["interaction_mode"] = self.interaction_mode.value
        if self.interaction_layers is not None:
            values["interaction_layers"] = list(self.interaction_layers)
        return values

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "ModelConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"Unknown model config keys: {sorted(unknown)}")
        values = dict(values)
        if values.get("interaction_layers") is not None:
            values["interaction_layers"] = tuple(values["interaction_layers"])
        return cls(**values)
