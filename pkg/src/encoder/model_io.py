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
import os

from src.encoder.config import ModelConfig
from src.encoder.params import ModelParams
from src.errors import DataError
from src.numerics.checkpoint import load_checkpoint, save_checkpoint
from src.tokenization.vocab import Vocab

logger = logging.getLogger(__name__)

VOCAB_SUFFIX = ".vocab"


@dataclasses.dataclass
class SetEncoderModel:
    """Everything needed to score passages: parameters, shape and vocabulary.

    name: recorded in the tag column of the runs this model produces.
    """

    params: ModelParams
    config: ModelConfig
    vocab: Vocab
    name: str = "set-encoder"


def vocab_path(checkpoint_path: str) -> str:
    return checkpoint_path + VOCAB_SUFFIX


def save_model(path: str, model: SetEncoderModel):
    """Write the checkpoint to ``path`` and the vocab to ``path + '.vocab'``."""
    save_checkpoint(
        path,
        model.params.arrays(),
        {"config": model.config.to_dict(), "name": model.name},
    )
    model.vocab.save(vocab_path(path))


def load_model(path: str) -> SetEncoderModel:
    if not os.path.isfile(vocab_path(path)):
        raise DataError(f"The vocab file {vocab_path(path)} is not existing.")
    arrays, metadata = load_checkpoint(path)
    if "config" not in metadata:
        raise DataError(f"Checkpoint {path} carries no model config.")
    config = ModelConfig.from_dict(metadata["config"])
    params = ModelParams.from_arrays(arrays)
    params.check_shapes(config)
    vocab = Vocab.load(vocab_path(path))
    if len(vocab) != config.vocab_size:
        raise DataError(
            f"Vocab has {len(vocab)} entries, the model expects {config.vocab_size}."
        )
    logger.info(
        "Loaded %s (%d parameters) from %s", metadata.get("name"), params.count(), path
    )
    return SetEncoderModel(params, config, vocab, metadata.get("name", "set-encoder"))
