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

import numpy as np

from src.encoder.config import InteractionMode, ModelConfig
from src.encoder.model_io import SetEncoderModel
from src.encoder.params import init_params
from src.tokenization.encoding import EncodedBatch, encode_batch
from src.tokenization.vocab import Vocab

WORDS = [f"t{i:02d}" for i in range(40)]


def make_vocab() -> Vocab:
    return Vocab(WORDS)


def make_config(
    interaction_mode=InteractionMode.INT_TOKEN, seed: int = 0, **overrides
) -> ModelConfig:
    values = dict(
        vocab_size=len(make_vocab()),
        layers=2,
        heads=2,
        model_dim=16,
        ffn_dim=32,
        max_positions=64,
        interaction_mode=interaction_mode,
        init_seed=seed,
    )
    values.update(overrides)
    return ModelConfig(**values)


def make_model(
    interaction_mode=InteractionMode.INT_TOKEN, seed: int = 0, **overrides
) -> SetEncoderModel:
    config = make_config(interaction_mode, seed, **overrides)
    return SetEncoderModel(init_params(config), config, make_vocab(), "tiny")


def random_text(rng: np.random.Generator, low: int = 1, high: int = 8) -> str:
    length = int(rng.integers(low, high + 1))
    return " ".join(rng.choice(WORDS, size=length))


def make_batch(rng: np.random.Generator, k: int) -> EncodedBatch:
    """k random passages of varying length for one random query."""
    passages = [(f"p{i}", random_text(rng)) for i in range(k)]
    return encode_batch(random_text(rng, 1, 4), passages, make_vocab())
