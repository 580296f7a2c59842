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

from src.errors import NumericDomainError, ShapeError, UsageError
from src.numerics.tensor import Tensor


class TensorTest(unittest.TestCase):
    def test_add_broadcast_gradient(self):
        a = Tensor(np.ones((2, 3)), requires_grad=True)
        b = Tensor(np.arange(3.0), requires_grad=True)
        (a + b).sum().backward()
        np.testing.assert_array_equal(a.grad, np.ones((2, 3)))
        np.testing.assert_array_equal(b.grad, [2.0, 2.0, 2.0])

    def test_matmul_gradient(self):
        a = Tensor([[1.0, 2.0], [3.0, 4.0]], requires_grad=True)
        b = Tensor([[1.0], [1.0]], requires_grad=True)
        (a @ b).sum().backward()
        np.testing.assert_array_equal(a.grad, [[1.0, 1.0], [1.0, 1.0]])
        np.testing.assert_array_equal(b.grad, [[4.0], [6.0]])

    def test_matmul_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            Tensor(np.ones((2, 3))) @ Tensor(np.ones((2, 3)))

    def test_backward_accumulates(self):
        x = Tensor([2.0], requires_grad=True)
        (x * x).sum().backward()
        (x * x).sum().backward()
        np.testing.assert_array_equal(x.grad, [8.0])

    def test_backward_needs_scalar(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        with self.assertRaises(UsageError):
            (x * 2.0).backward()

    def test_backward_needs_graph(self):
        with self.assertRaises(UsageError):
            Tensor([1.0]).sum().backward()

    def test_shared_subexpression(self):
        x = Tensor([3.0], requires_grad=True)
        y = x * 2.0
        (y * y + y).sum().backward()
        # d/dx (4x^2 + 2x) = 8x + 2
        np.testing.assert_allclose(x.grad, [26.0])

    def test_no_grad(self):
        x = Tensor([1.0], requires_grad=True)
        with Tensor.no_grad():
            y = x * 3.0
        self.assertFalse(y.requires_grad)
        self.assertTrue((x * 3.0).requires_grad)

    def test_log_domain(self):
        with self.assertRaises(NumericDomainError):
            Tensor([0.0, 1.0]).log()

    def test_softmax_rejects_non_finite(self):
        with self.assertRaises(NumericDomainError):
            Tensor([np.nan, 1.0]).softmax()

    def test_softmax_is_stable(self):
        out = Tensor([1000.0, 1000.0]).softmax()
        np.testing.assert_allclose(out.data, [0.5, 0.5])

    def test_log_softmax_matches_log_of_softmax(self):
        x = Tensor([0.3, -1.2, 2.5])
        np.testing.assert_allclose(
            x.log_softmax().data, np.log(x.softmax().data), atol=1e-12
        )

    def test_softplus_large_inputs(self):
        out = Tensor([-800.0, 0.0, 800.0]).softplus()
        np.testing.assert_allclose(out.data, [0.0, np.log(2.0), 800.0])

    def test_sigmoid_extremes(self):
        out = Tensor([-800.0, 800.0]).sigmoid()
        np.testing.assert_allclose(out.data, [0.0, 1.0])

    def test_take_gradient_scatters(self):
        x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
        x.take([0, 0, 2]).sum().backward()
        np.testing.assert_array_equal(x.grad, [2.0, 0.0, 1.0])

    def test_take_out_of_range(self):
        with self.assertRaises(ShapeError):
            Tensor([1.0, 2.0]).take([2])

    def test_getitem_gradient(self):
        x = Tensor(np.arange(6.0).reshape(2, 3), requires_grad=True)
        x[:, 1].sum().backward()
        np.testing.assert_array_equal(x.grad, [[0, 1, 0], [0, 1, 0]])

    def test_concat_and_stack_gradients(self):
        a = Tensor([1.0, 2.0], requires_grad=True)
        b = Tensor([3.0], requires_grad=True)
        (Tensor.concat([a, b]) * Tensor([1.0, 2.0, 3.0])).sum().backward()
        np.testing.assert_array_equal(a.grad, [1.0, 2.0])
        np.testing.assert_array_equal(b.grad, [3.0])
        c = Tensor([1.0, 1.0], requires_grad=True)
        Tensor.stack([c, c]).sum().backward()
        np.testing.assert_array_equal(c.grad, [2.0, 2.0])

    def test_masked_fill(self):
        x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
        x.masked_fill(np.array([False, True, False]), -5.0).sum().backward()
        np.testing.assert_array_equal(x.grad, [1.0, 0.0, 1.0])

    def test_masked_fill_shape(self):
        with self.assertRaises(ShapeError):
            Tensor([1.0, 2.0]).masked_fill(np.ones((2, 2), dtype=bool), 0.0)

    def test_item(self):
        self.assertEqual(Tensor([[4.0]]).item(), 4.0)
        with self.assertRaises(UsageError):
            Tensor([1.0, 2.0]).item()

    def test_reshape_and_transpose_gradients(self):
        x = Tensor(np.arange(6.0), requires_grad=True)
        y = x.reshape(2, 3).transpose(1, 0)
        (y * Tensor(np.arange(6.0).reshape(3, 2))).sum().backward()
        np.testing.assert_array_equal(x.grad, [0, 2, 4, 1, 3, 5])


if __name__ == "__main__":
    unittest.main()
