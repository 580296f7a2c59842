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

"""Set-Encoder forward pass.

Each passage is encoded in its own sequence. In layers with inter-passage
attention, the key and value rows of the [INT] token (or [CLS] in the
ablation) of every other sequence are appended to a sequence's own keys and
values, so information flows between passages only through those rows. The
appended rows carry no information about storage order, which makes the
scores equivariant under permutations of the passages.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.encoder.config import InteractionMode, ModelConfig
from src.encoder.cost import AttentionCounter
from src.encoder.params import ModelParams
from src.errors import ConfigError, ShapeError
from src.numerics.functional import attention, layer_norm, linear
from src.numerics.tensor import Tensor
from src.tokenization.encoding import CLS_POSITION, INT_POSITION, EncodedBatch


def interaction_index(k: int, rng: np.random.Generator = None) -> np.ndarray:
    """Row i lists the sequences j != i whose rows sequence i receives.

    Storage order by default; ``rng`` shuffles every row independently.
    """
    index = np.array(
        [[j for j in range(k) if j != i] for i in range(k)], dtype=np.int64
    ).reshape(k, k - 1)
    if rng is not None:
        index = np.array([rng.permutation(row) for row in index]).reshape(k, k - 1)
    return index


def _append_foreign_rows(
    tensor: Tensor, position: int, index: np.ndarray
) -> Tensor:
    # tensor: (k, ..., L, dh). Rows at `position` of the sequences listed in
    # `index` are concatenated after each sequence's own L rows.
    rows = tensor[(slice(None),) * (tensor.ndim - 2) + (position,)]
    foreign = rows.take(index)
    ndim = foreign.ndim
    axes = (0,) + tuple(range(2, ndim - 1)) + (1, ndim - 1)
    return Tensor.concat([tensor, foreign.transpose(axes)], axis=-2)


def augment_keys_values(
    K_per_seq: Sequence[Tensor],
    V_per_seq: Sequence[Tensor],
    int_position: int = INT_POSITION,
    rng: np.random.Generator = None,
) -> List[Tuple[Tensor, Tensor]]:
    """Return [K_i | [INT] rows of K_j, j != i] and the same for V, per sequence.

    Every K and V must have the same shape (..., L, d) with the token axis
    second to last.
    """
    if not K_per_seq or len(K_per_seq) != len(V_per_seq):
        raise ShapeError("Need one value tensor per key tensor.")
    shapes = {t.shape for t in K_per_seq} | {t.shape for t in V_per_seq}
    if len(shapes) != 1:
        raise ShapeError(f"Key/value shapes differ across sequences: {shapes}")
    length = K_per_seq[0].shape[-2]
    if not 0 <= int_position < length:
        raise ShapeError(f"int_position {int_position} outside 0..{length - 1}.")
    k = len(K_per_seq)
    index = interaction_index(k, rng)
    keys = _append_foreign_rows(Tensor.stack(K_per_seq), int_position, index)
    values = _append_foreign_rows(Tensor.stack(V_per_seq), int_position, index)
    return [(keys[i], values[i]) for i in range(k)]


def _check_batch(batch: EncodedBatch, config: ModelConfig):
    if batch.length > config.max_positions:
        raise ConfigError(
            f"Sequence length {batch.length} exceeds max_positions "
            f"{config.max_positions}."
        )
    if batch.token_ids.max() >= config.vocab_size:
        raise ConfigError("Token ids exceed the configured vocab_size.")


def _interaction_site(config: ModelConfig) -> int:
    if config.interaction_mode is InteractionMode.CLS_TOKEN:
        return CLS_POSITION
    return INT_POSITION


def _encoder_layer(
    params: ModelParams,
    x: Tensor,
    mask: np.ndarray,
    layer: int,
    config: ModelConfig,
    index: Optional[np.ndarray],
    counter: Optional[AttentionCounter],
) -> Tensor:
    k, L, d = x.shape
    heads, head_dim = config.heads, config.head_dim

    def project(name):
        w = params.layer(layer, f"attention.w{name}")
        b = params.layer(layer, f"attention.b{name}")
        return linear(x, w, b).reshape(k, L, heads, head_dim).transpose(0, 2, 1, 3)

    queries, keys, values = project("q"), project("k"), project("v")
    key_mask = mask
    if index is not None:
        site = _interaction_site(config)
        keys = _append_foreign_rows(keys, site, index)
        values = _append_foreign_rows(values, site, index)
        key_mask = np.concatenate([mask, mask[:, site][index]], axis=1)
    if counter is not None:
        counter.record(layer, k * L * keys.shape[-2])
    context = attention(queries, keys, values, key_mask[:, None, None, :], head_dim)
    context = context.transpose(0, 2, 1, 3).reshape(k, L, d)
    attended = linear(
        context,
        params.layer(layer, "attention.wo"),
        params.layer(layer, "attention.bo"),
    )
    x = layer_norm(
        x + attended,
        params.layer(layer, "attention_norm.scale"),
        params.layer(layer, "attention_norm.offset"),
        config.layer_norm_eps,
    )
    hidden = linear(x, params.layer(layer, "ffn.w1"), params.layer(layer, "ffn.b1"))
    ffn = linear(
        hidden.gelu(), params.layer(layer, "ffn.w2"), params.layer(layer, "ffn.b2")
    )
    return layer_norm(
        x + ffn,
        params.layer(layer, "ffn_norm.scale"),
        params.layer(layer, "ffn_norm.offset"),
        config.layer_norm_eps,
    )


def encode(
    params: ModelParams,
    batch: EncodedBatch,
    config: ModelConfig,
    counter: AttentionCounter = None,
    rng: np.random.Generator = None,
) -> Tensor:
    """Final hidden states, shaped (k, L, model_dim).

    counter: optional diagnostics collector for attention score entries.
    rng: shuffles the order of appended rows; the output does not depend on it.
    """
    _check_batch(batch, config)
    mask = batch.mask
    x = params["embeddings.token"].take(batch.token_ids) + params[
        "embeddings.position"
    ].take(batch.position_ids)
    x = layer_norm(
        x,
        params["embeddings.norm.scale"],
        params["embeddings.norm.offset"],
        config.layer_norm_eps,
    )
    index = interaction_index(batch.k, rng)
    for layer in range(config.layers):
        x = _encoder_layer(
            params,
            x,
            mask,
            layer,
            config,
            index if config.interacts_at(layer) else None,
            counter,
        )
    return x


def _head(params: ModelParams, name: str, hidden: Tensor) -> Tensor:
    cls = hidden[:, CLS_POSITION, :]
    return linear(cls, params[f"{name}.weight"], params[f"{name}.bias"]).reshape(-1)


def score_relevance(
    params: ModelParams, batch: EncodedBatch, config: ModelConfig, **kwargs
) -> Tensor:
    """One relevance score per passage, read from its final [CLS] embedding."""
    return _head(params, "relevance_head", encode(params, batch, config, **kwargs))


def score_duplicates(
    params: ModelParams, batch: EncodedBatch, config: ModelConfig, **kwargs
) -> Tensor:
    """Probability, per passage, that it duplicates another passage of the set."""
    hidden = encode(params, batch, config, **kwargs)
    return _head(params, "duplicate_head", hidden).sigmoid()


def score_all(
    params: ModelParams, batch: EncodedBatch, config: ModelConfig, **kwargs
) -> Tuple[Tensor, Tensor]:
    """Relevance scores and duplicate probabilities from a single forward pass."""
    hidden = encode(params, batch, config, **kwargs)
    return (
        _head(params, "relevance_head", hidden),
        _head(params, "duplicate_head", hidden).sigmoid(),
    )


def score_pointwise(
    params: ModelParams, batch: EncodedBatch, config: ModelConfig
) -> np.ndarray:
    """Score every sequence on its own, without padding or other passages."""
    scores = []
    for sequence, passage_id in zip(batch.sequences, batch.passage_ids):
        single = EncodedBatch(
            sequences=(sequence.unpadded(),),
            passage_ids=(passage_id,),
        )
        scores.append(score_relevance(params, single, config).data[0])
    return np.array(scores)
