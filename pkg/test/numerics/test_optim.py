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

from src.errors import ConfigError, UsageError
from src.numerics.optim import AdamW, OptimizerState, adamw_step
from src.numerics.tensor import Tensor


class OptimTest(unittest.TestCase):
    def test_first_step_moves_by_learning_rate(self):
        # With bias correction the first update is lr * sign(g).
        p = Tensor([1.0, -1.0], requires_grad=True)
        state = OptimizerState.for_params({"p": p}, learning_rate=0.1, weight_decay=0)
        adamw_step({"p": p}, state, {"p": np.array([0.5, -2.0])})
        np.testing.assert_allclose(p.data, [0.9, -0.9], atol=1e-6)
        self.assertEqual(state.step_count, 1)

    def test_decoupled_weight_decay(self):
        p = Tensor([2.0], requires_grad=True)
        state = OptimizerState.for_params({"p": p}, learning_rate=0.1, weight_decay=0.5)
        adamw_step({"p": p}, state, {"p": np.array([0.0])})
        np.testing.assert_allclose(p.data, [2.0 * (1 - 0.05)])

    def test_missing_gradient(self):
        p = Tensor([1.0], requires_grad=True)
        state = OptimizerState.for_params({"p": p})
        with self.assertRaises(UsageError):
            adamw_step({"p": p}, state)

    def test_invalid_hyperparameters(self):
        with self.assertRaises(ConfigError):
            OptimizerState({}, {}, learning_rate=-1.0)
        with self.assertRaises(ConfigError):
            OptimizerState({}, {}, beta1=1.0)

    def test_minimizes_quadratic(self):
        p = Tensor([5.0, -3.0], requires_grad=True)
        optimizer = AdamW({"p": p}, learning_rate=0.1, weight_decay=0.0)
        for _ in range(300):
            optimizer.zero_grad()
            (p * p).sum().backward()
            optimizer.step()
        self.assertLess(np.abs(p.data).max(), 0.5)

    def test_skips_parameters_without_gradient(self):
        used = Tensor([1.0], requires_grad=True)
        unused = Tensor([1.0], requires_grad=True)
        optimizer = AdamW({"used": used, "unused": unused}, learning_rate=0.1)
        (used * 2.0).sum().backward()
        optimizer.step()
        np.testing.assert_array_equal(unused.data, [1.0])
        self.assertLess(used.data[0], 1.0)


if __name__ == "__main__":
    unittest.main()
