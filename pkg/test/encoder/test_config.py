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

import unittest

from src.encoder.config import InteractionMode, ModelConfig
from src.errors import ConfigError


class ModelConfigTest(unittest.TestCase):
    def test_defaults(self):
        config = ModelConfig(vocab_size=10)
        self.assertEqual(config.head_dim, 16)
        self.assertIs(config.interaction_mode, InteractionMode.INT_TOKEN)
        self.assertTrue(all(config.interacts_at(i) for i in range(config.layers)))

    def test_mode_from_string(self):
        config = ModelConfig(vocab_size=10, interaction_mode="cls_token")
        self.assertIs(config.interaction_mode, InteractionMode.CLS_TOKEN)
        with self.assertRaises(ConfigError):
            ModelConfig(vocab_size=10, interaction_mode="sideways")

    def test_none_mode_never_interacts(self):
        config = ModelConfig(vocab_size=10, interaction_mode=InteractionMode.NONE)
        self.assertFalse(any(config.interacts_at(i) for i in range(config.layers)))

    def test_interaction_layers(self):
        config = ModelConfig(vocab_size=10, layers=3, interaction_layers=[2, 0, 2])
        self.assertEqual(config.interaction_layers, (0, 2))
        self.assertFalse(config.interacts_at(1))
        with self.assertRaises(ConfigError):
            ModelConfig(vocab_size=10, layers=2, interaction_layers=[2])

    def test_invalid_values(self):
        with self.assertRaises(ConfigError):
            ModelConfig(vocab_size=10, model_dim=30, heads=4)
        with self.assertRaises(ConfigError):
            ModelConfig(vocab_size=0)
        with self.assertRaises(ConfigError):
            ModelConfig(vocab_size=10, dropout_rate=0.1)

    def test_dict_round_trip(self):
        config = ModelConfig(
            vocab_size=10, interaction_mode="none", interaction_layers=(1,)
        )
        values = config.to_dict()
        self.assertEqual(values["interaction_mode"], "none")
        self.assertEqual(ModelConfig.from_dict(values), config)
        with self.assertRaises(ConfigError):
            ModelConfig.from_dict({"vocab_size": 10, "colour": "red"})


if __name__ == "__main__":
    unittest.main()
