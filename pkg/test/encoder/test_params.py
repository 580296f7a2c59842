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

import numpy as np

from src.encoder.params import ModelParams, init_params, parameter_shapes
from src.errors import ConfigError, NumericDomainError
from test.tools.mock_models import make_config


class ParamsTest(unittest.TestCase):
    def test_shapes_follow_config(self):
        config = make_config()
        params = init_params(config)
        params.check_shapes(config)
        self.assertEqual(params["embeddings.token"].shape, (config.vocab_size, 16))
        self.assertEqual(params.layer(1, "ffn.w1").shape, (16, 32))
        self.assertEqual(params["duplicate_head.weight"].shape, (16, 1))
        self.assertEqual(
            params.count(),
            sum(int(np.prod(s)) for s in parameter_shapes(config).values()),
        )

    def test_init_is_seeded(self):
        config = make_config()
        a, b = init_params(config), init_params(config)
        c = init_params(config, seed=1)
        for name in a:
            np.testing.assert_array_equal(a[name].data, b[name].data)
        self.assertFalse(
            np.array_equal(a["embeddings.token"].data, c["embeddings.token"].data)
        )

    def test_layer_norm_init(self):
        params = init_params(make_config())
        np.testing.assert_array_equal(params.layer(0, "attention_norm.scale").data, 1.0)
        np.testing.assert_array_equal(params["embeddings.norm.offset"].data, 0.0)

    def test_copy_is_independent(self):
        params = init_params(make_config())
        copy = params.copy()
        copy["relevance_head.bias"].data = np.array([5.0])
        self.assertNotEqual(params["relevance_head.bias"].data[0], 5.0)
        self.assertTrue(copy["relevance_head.bias"].requires_grad)

    def test_check_shapes_mismatch(self):
        params = init_params(make_config())
        with self.assertRaises(ConfigError):
            params.check_shapes(make_config(model_dim=8))

    def test_rejects_non_finite(self):
        with self.assertRaises(NumericDomainError):
            ModelParams.from_arrays({"w": np.array([np.inf])})


if __name__ == "__main__":
    unittest.main()
