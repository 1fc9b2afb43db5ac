"""Minimal reverse-mode automatic differentiation over dense float64 arrays.

Implements exactly the operations the GGNN needs: matrix multiply,
elementwise add/sub/hadamard, sigmoid, tanh, row softmax, neighbor
scatter-sum and a full-sum reduction, plus an Adam optimizer.  Every op
checks its output for NaN/Inf so numerical blow-ups fail loudly.
"""

import numpy as np
import scipy.sparse as sp


class AutodiffError(Exception):
    pass


class ShapeMismatch(AutodiffError):
    pass


class NonFiniteValue(AutodiffError):
    pass


class DisconnectedGraph(AutodiffError):
    pass


def _check_finite(arr, op):
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"non-finite values produced by '{op}'")


class Tensor:
    """A dense float64 array node in the computation graph."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "_op")

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None, _op="leaf"):
        self.data = np.asarray(data, dtype=np.float64)
        _check_finite(self.data, _op)
        self.grad = None
        self.requires_grad = bool(requires_grad) or any(p.requires_grad for p in _parents)
        self._parents = _parents
        self._backward = _backward
        self._op = _op

    @property
    def shape(self):
        return self.data.shape

    def item(self):
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, op={self._op!r}, requires_grad={self.requires_grad})"

    # operator sugar
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def backward(self):
        """Populate .grad on every reachable tensor from this scalar loss."""
        if self.data.shape != ():
            raise AutodiffError("backward() requires a scalar loss")
        if not self.requires_grad:
            raise DisconnectedGraph("loss does not depend on any trainable tensor")

        # iterative topological order (reverse post-order DFS)
        topo = []
        visited = set()
        stack = [(self, iter(self._parents))]
        visited.add(id(self))
        while stack:
            node, it = stack[-1]
            advanced = False
            for parent in it:
                if id(parent) not in visited and parent.requires_grad:
                    visited.add(id(parent))
                    stack.append((parent, iter(parent._parents)))
                    advanced = True
                    break
            if not advanced:
                topo.append(node)
                stack.pop()

        self.grad = np.ones((), dtype=np.float64)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)


def _accumulate(tensor, grad):
    if tensor.requires_grad:
        tensor.grad = grad if tensor.grad is None else tensor.grad + grad


def _as_tensor(x):
    if isinstance(x, Tensor):
        return x
    return Tensor(x)


def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeMismatch(f"matmul: {a.data.shape} @ {b.data.shape}")
    out = Tensor(a.data @ b.data, _parents=(a, b), _op="matmul")

    def backward(g):
        _accumulate(a, g @ b.data.T)
        _accumulate(b, a.data.T @ g)

    out._backward = backward
    return out


def add(a, b):
    """Elementwise add; also supports (N, d) + (d,) row-bias broadcasting."""
    a, b = _as_tensor(a), _as_tensor(b)
    bias = a.data.ndim == 2 and b.data.ndim == 1 and a.data.shape[1] == b.data.shape[0]
    if not bias and a.data.shape != b.data.shape:
        raise ShapeMismatch(f"add: {a.data.shape} + {b.data.shape}")
    out = Tensor(a.data + b.data, _parents=(a, b), _op="add")

    def backward(g):
        _accumulate(a, g)
        _accumulate(b, g.sum(axis=0) if bias else g)

    out._backward = backward
    return out


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    if a.data.shape != b.data.shape:
        raise ShapeMismatch(f"sub: {a.data.shape} - {b.data.shape}")
    out = Tensor(a.data - b.data, _parents=(a, b), _op="sub")

    def backward(g):
        _accumulate(a, g)
        _accumulate(b, -g)

    out._backward = backward
    return out


def mul(a, b):
    """Hadamard product of same-shape tensors, or tensor * python scalar."""
    a = _as_tensor(a)
    if isinstance(b, (int, float)):
        s = float(b)
        out = Tensor(a.data * s, _parents=(a,), _op="scale")

        def backward(g):
            _accumulate(a, g * s)

        out._backward = backward
        return out

    b = _as_tensor(b)
    if a.data.shape != b.data.shape:
        raise ShapeMismatch(f"hadamard: {a.data.shape} * {b.data.shape}")
    out = Tensor(a.data * b.data, _parents=(a, b), _op="hadamard")

    def backward(g):
        _accumulate(a, g * b.data)
        _accumulate(b, g * a.data)

    out._backward = backward
    return out


def sigmoid(a):
    a = _as_tensor(a)
    y = 1.0 / (1.0 + np.exp(-a.data))
    out = Tensor(y, _parents=(a,), _op="sigmoid")

    def backward(g):
        _accumulate(a, g * y * (1.0 - y))

    out._backward = backward
    return out


def tanh(a):
    a = _as_tensor(a)
    y = np.tanh(a.data)
    out = Tensor(y, _parents=(a,), _op="tanh")

    def backward(g):
        _accumulate(a, g * (1.0 - y * y))

    out._backward = backward
    return out


def softmax_rows(a):
    """Row-wise softmax of a 2-D tensor."""
    a = _as_tensor(a)
    if a.data.ndim != 2:
        raise ShapeMismatch(f"softmax_rows expects 2-D input, got {a.data.shape}")
    z = a.data - a.data.max(axis=1, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=1, keepdims=True)
    out = Tensor(y, _parents=(a,), _op="softmax_rows")

    def backward(g):
        dot = (g * y).sum(axis=1, keepdims=True)
        _accumulate(a, y * (g - dot))

    out._backward = backward
    return out


def scatter_sum(x, adjacency):
    """Sum the rows of x over each node's neighborhood: out[n] = sum_m A[n,m] x[m].

    adjacency is a constant (numpy array or scipy sparse matrix); it carries
    no gradient.  The backward pass is the same scatter on the transposed
    adjacency (the adjoint of the forward map).
    """
    x = _as_tensor(x)
    if sp.issparse(adjacency):
        adj = adjacency.astype(np.float64)
        adj_t = adj.T.tocsr()
    else:
        adj = np.asarray(adjacency, dtype=np.float64)
        adj_t = adj.T
    if adj.shape[1] != x.data.shape[0]:
        raise ShapeMismatch(f"scatter_sum: adjacency {adj.shape} vs rows {x.data.shape}")
    out = Tensor(adj @ x.data, _parents=(x,), _op="scatter_sum")

    def backward(g):
        _accumulate(x, adj_t @ g)

    out._backward = backward
    return out


def tensor_sum(a):
    """Sum of all entries, as a scalar tensor."""
    a = _as_tensor(a)
    out = Tensor(a.data.sum(), _parents=(a,), _op="sum")

    def backward(g):
        _accumulate(a, np.broadcast_to(g, a.data.shape).copy() if a.data.shape else g)

    out._backward = backward
    return out


class Adam:
    """Adam with bias correction; moments are shaped like their parameters."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def step(self):
        self.t += 1
        for i, p in enumerate(self.params):
            g = p.grad if p.grad is not None else np.zeros_like(p.data)
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / (1.0 - self.beta1 ** self.t)
            v_hat = self.v[i] / (1.0 - self.beta2 ** self.t)
            p.data = p.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
