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

"""Dense float64 tensors with reverse-mode automatic differentiation.

Every differentiable operation records its parents and a gradient function
that maps the gradient of its output to the gradients of its parents. Calling
``backward`` on a scalar walks the recorded graph in reverse topological order
and accumulates gradients into the leaf tensors that require them.
"""

import contextlib
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np

from src.errors import NumericDomainError, ShapeError, UsageError

GradFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

# Fill value for masked attention scores. Finite, so softmax inputs stay in
# the checked domain, and small enough that exp() underflows to exactly 0.
MASKED_SCORE = -1e300


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    # Sum the gradient over the axes numpy broadcasting expanded.
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _normalize_axes(axis, ndim: int) -> Tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    axes = axis if isinstance(axis, tuple) else (axis,)
    normalized = []
    for a in axes:
        if not -ndim <= a < ndim:
            raise ShapeError(f"Axis {a} is out of range for {ndim} dimensions.")
        normalized.append(a % ndim)
    return tuple(sorted(normalized))


class Tensor:
    """An n-dimensional float64 array that can take part in autodiff.

    data: the values, a numpy array in row-major order.
    grad: accumulated gradient with the shape of data, or None before the
          first backward pass reaches this tensor.
    requires_grad: whether gradients flow into this tensor.
    """

    _grad_enabled = True

    def __init__(self, data, requires_grad: bool = False, name: str = ""):
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: Tuple["Tensor", ...] = ()
        self._grad_fn: Optional[GradFn] = None

    @classmethod
    def _from_op(
        cls, data: np.ndarray, parents: Sequence["Tensor"], grad_fn: GradFn
    ) -> "Tensor":
        out = cls.__new__(cls)
        out.data = np.asarray(data, dtype=np.float64)
        out.grad = None
        out.name = ""
        tracked = cls._grad_enabled and any(p.requires_grad for p in parents)
        out.requires_grad = tracked
        out._parents = tuple(parents) if tracked else ()
        out._grad_fn = grad_fn if tracked else None
        return out

    @staticmethod
    @contextlib.contextmanager
    def no_grad() -> Iterator[None]:
        """Disable graph recording, e.g. for inference."""
        previous = Tensor._grad_enabled
        Tensor._grad_enabled = False
        try:
            yield
        finally:
            Tensor._grad_enabled = previous

    @staticmethod
    def ensure(value) -> "Tensor":
        return value if isinstance(value, Tensor) else Tensor(value)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise UsageError(f"item() needs a single value, got shape {self.shape}.")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # Elementwise arithmetic.

    def __add__(self, other) -> "Tensor":
        other = Tensor.ensure(other)
        a_shape, b_shape = self.shape, other.shape
        return Tensor._from_op(
            self.data + other.data,
            (self, other),
            lambda g: (_unbroadcast(g, a_shape), _unbroadcast(g, b_shape)),
        )

    __radd__ = __add__

    def __neg__(self) -> "Tensor":
        return Tensor._from_op(-self.data, (self,), lambda g: (-g,))

    def __sub__(self, other) -> "Tensor":
        return self + (-Tensor.ensure(other))

    def __rsub__(self, other) -> "Tensor":
        return Tensor.ensure(other) + (-self)

    def __mul__(self, other) -> "Tensor":
        other = Tensor.ensure(other)
        a, b = self.data, other.data
        return Tensor._from_op(
            a * b,
            (self, other),
            lambda g: (_unbroadcast(g * b, a.shape), _unbroadcast(g * a, b.shape)),
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Tensor":
        other = Tensor.ensure(other)
        a, b = self.data, other.data
        return Tensor._from_op(
            a / b,
            (self, other),
            lambda g: (
                _unbroadcast(g / b, a.shape),
                _unbroadcast(-g * a / (b * b), b.shape),
            ),
        )

    def __rtruediv__(self, other) -> "Tensor":
        return Tensor.ensure(other) / self

    def __pow__(self, exponent: float) -> "Tensor":
        a = self.data
        return Tensor._from_op(
            a**exponent,
            (self,),
            lambda g: (g * exponent * a ** (exponent - 1),),
        )

    def __matmul__(self, other) -> "Tensor":
        other = Tensor.ensure(other)
        a, b = self.data, other.data
        if a.ndim < 2 or b.ndim < 2:
            raise ShapeError("matmul operands need at least two dimensions.")
        if a.shape[-1] != b.shape[-2]:
            raise ShapeError(f"Cannot multiply shapes {a.shape} and {b.shape}.")

        def grad_fn(g):
            grad_a = g @ np.swapaxes(b, -1, -2)
            grad_b = np.swapaxes(a, -1, -2) @ g
            return _unbroadcast(grad_a, a.shape), _unbroadcast(grad_b, b.shape)

        return Tensor._from_op(a @ b, (self, other), grad_fn)

    # Reductions and shape manipulation.

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        shape = self.shape
        axes = _normalize_axes(axis, self.ndim)

        def grad_fn(g):
            if not keepdims:
                g = np.expand_dims(g, axes)
            return (np.broadcast_to(g, shape),)

        return Tensor._from_op(
            self.data.sum(axis=axes, keepdims=keepdims), (self,), grad_fn
        )

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        axes = _normalize_axes(axis, self.ndim)
        count = int(np.prod([self.shape[a] for a in axes])) if axes else 1
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    def max(self, axis: int, keepdims: bool = False) -> np.ndarray:
        # Non-differentiable; used only for numerical shifts.
        return self.data.max(axis=axis, keepdims=keepdims)

    def reshape(self, *shape) -> "Tensor":
        original = self.shape
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        try:
            data = self.data.reshape(shape)
        except ValueError as e:
            raise ShapeError(str(e)) from e
        return Tensor._from_op(data, (self,), lambda g: (g.reshape(original),))

    def transpose(self, *axes) -> "Tensor":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        inverse = tuple(np.argsort(axes))
        return Tensor._from_op(
            self.data.transpose(axes), (self,), lambda g: (g.transpose(inverse),)
        )

    def swapaxes(self, axis1: int, axis2: int) -> "Tensor":
        return Tensor._from_op(
            np.swapaxes(self.data, axis1, axis2),
            (self,),
            lambda g: (np.swapaxes(g, axis1, axis2),),
        )

    def __getitem__(self, key) -> "Tensor":
        shape = self.shape

        def grad_fn(g):
            grad = np.zeros(shape)
            np.add.at(grad, key, g)
            return (grad,)

        return Tensor._from_op(self.data[key], (self,), grad_fn)

    def take(self, indices) -> "Tensor":
        """Gather entries along the first axis; indices may have any shape."""
        indices = np.asarray(indices, dtype=np.int64)
        shape = self.shape
        if indices.size and (indices.min() < 0 or indices.max() >= shape[0]):
            raise ShapeError(f"Index out of range for first axis of size {shape[0]}.")

        def grad_fn(g):
            grad = np.zeros(shape)
            np.add.at(grad, indices, g)
            return (grad,)

        return Tensor._from_op(np.take(self.data, indices, axis=0), (self,), grad_fn)

    @staticmethod
    def concat(tensors: Sequence["Tensor"], axis: int = 0) -> "Tensor":
        tensors = [Tensor.ensure(t) for t in tensors]
        try:
            data = np.concatenate([t.data for t in tensors], axis=axis)
        except ValueError as e:
            raise ShapeError(str(e)) from e
        boundaries = np.cumsum([t.shape[axis] for t in tensors])[:-1]
        return Tensor._from_op(
            data,
            tensors,
            lambda g: tuple(np.split(g, boundaries, axis=axis)),
        )

    @staticmethod
    def stack(tensors: Sequence["Tensor"], axis: int = 0) -> "Tensor":
        tensors = [Tensor.ensure(t) for t in tensors]
        try:
            data = np.stack([t.data for t in tensors], axis=axis)
        except ValueError as e:
            raise ShapeError(str(e)) from e
        return Tensor._from_op(
            data,
            tensors,
            lambda g: tuple(
                np.squeeze(part, axis=axis)
                for part in np.split(g, len(tensors), axis=axis)
            ),
        )

    # Elementwise functions.

    def exp(self) -> "Tensor":
        out = np.exp(self.data)
        return Tensor._from_op(out, (self,), lambda g: (g * out,))

    def log(self) -> "Tensor":
        a = self.data
        if np.any(a <= 0):
            raise NumericDomainError("log of a non-positive value.")
        return Tensor._from_op(np.log(a), (self,), lambda g: (g / a,))

    def tanh(self) -> "Tensor":
        out = np.tanh(self.data)
        return Tensor._from_op(out, (self,), lambda g: (g * (1.0 - out * out),))

    def sigmoid(self) -> "Tensor":
        a = self.data
        e = np.exp(-np.abs(a))
        out = np.where(a >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
        return Tensor._from_op(out, (self,), lambda g: (g * out * (1.0 - out),))

    def softplus(self) -> "Tensor":
        """log(1 + exp(x)), evaluated without overflow."""
        a = self.data
        e = np.exp(-np.abs(a))
        slope = np.where(a >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
        return Tensor._from_op(
            np.maximum(a, 0.0) + np.log1p(e), (self,), lambda g: (g * slope,)
        )

    def gelu(self) -> "Tensor":
        """GELU with the tanh approximation."""
        a = self.data
        c = np.sqrt(2.0 / np.pi)
        inner = c * (a + 0.044715 * a**3)
        t = np.tanh(inner)
        slope = 0.5 * (1.0 + t) + 0.5 * a * (1.0 - t * t) * c * (
            1.0 + 3 * 0.044715 * a * a
        )
        return Tensor._from_op(0.5 * a * (1.0 + t), (self,), lambda g: (g * slope,))

    def clip(self, low: float, high: float) -> "Tensor":
        a = self.data
        inside = (a >= low) & (a <= high)
        return Tensor._from_op(np.clip(a, low, high), (self,), lambda g: (g * inside,))

    def masked_fill(self, mask, value: float) -> "Tensor":
        """Replace entries where ``mask`` is True by ``value``."""
        mask = np.asarray(mask, dtype=bool)
        try:
            out = np.where(mask, value, self.data)
        except ValueError as e:
            raise ShapeError(str(e)) from e
        if out.shape != self.shape:
            raise ShapeError(f"Mask of shape {mask.shape} does not fit {self.shape}.")
        return Tensor._from_op(out, (self,), lambda g: (np.where(mask, 0.0, g),))

    def _check_finite(self, op: str):
        if not np.all(np.isfinite(self.data)):
            raise NumericDomainError(f"{op} received non-finite values.")

    def softmax(self, axis: int = -1) -> "Tensor":
        self._check_finite("softmax")
        shifted = self.data - self.data.max(axis=axis, keepdims=True)
        e = np.exp(shifted)
        out = e / e.sum(axis=axis, keepdims=True)
        return Tensor._from_op(
            out,
            (self,),
            lambda g: (out * (g - (g * out).sum(axis=axis, keepdims=True)),),
        )

    def log_softmax(self, axis: int = -1) -> "Tensor":
        self._check_finite("log_softmax")
        shifted = self.data - self.data.max(axis=axis, keepdims=True)
        out = shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
        return Tensor._from_op(
            out,
            (self,),
            lambda g: (g - np.exp(out) * g.sum(axis=axis, keepdims=True),),
        )

    # Differentiation.

    def backward(self):
        """Accumulate d(self)/d(leaf) into ``grad`` of every leaf requiring it."""
        if self.data.size != 1:
            raise UsageError(
                f"backward() needs a scalar loss, got shape {self.shape}."
            )
        if not self.requires_grad:
            raise UsageError("The loss does not depend on any tensor requiring grad.")
        grads = {id(self): np.ones_like(self.data)}
        for node in reversed(_topological_order(self)):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._grad_fn is None:
                if node.requires_grad:
                    node.grad = np.array(g) if node.grad is None else node.grad + g
                continue
            for parent, parent_grad in zip(node._parents, node._grad_fn(g)):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + parent_grad
                else:
                    grads[key] = parent_grad


def _topological_order(root: Tensor):
    # Iterative post-order DFS: parents always precede their children.
    order, visited = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        stack.extend((p, False) for p in node._parents if id(p) not in visited)
    return order


def zero_grad(tensors) -> None:
    for tensor in tensors:
        tensor.zero_grad()

