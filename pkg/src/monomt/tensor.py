"""Dense float64 tensors with reverse-mode autodiff and Adam.

Scalars, vectors and matrices only; no broadcasting except row-wise bias
addition and per-row scaling, which are explicit primitives. Operations
executed inside a ``with Tape():`` block are recorded in execution order;
``Tape.backward`` replays the record in reverse. Without an active tape,
primitives just compute values (inference mode).
"""

from __future__ import annotations

import struct
import threading

import numpy as np

_LOCAL = threading.local()


def _tape_stack() -> list:
    if not hasattr(_LOCAL, "stack"):
        _LOCAL.stack = []
    return _LOCAL.stack


def active_tape():
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tensor:
    """A dense float64 array plus an optional gradient of the same shape."""

    __slots__ = ("data", "grad", "requires_grad", "name", "_tracked")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.name = name
        self._tracked = requires_grad

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def zero_grad(self) -> None:
        self.grad = None

    def _accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64)
        else:
            self.grad += g

    def __repr__(self) -> str:
        tag = self.name or "tensor"
        return f"Tensor({tag}, shape={self.data.shape}, requires_grad={self.requires_grad})"


def constant(data, name: str | None = None) -> Tensor:
    """A tensor that never receives gradient (masks, literals)."""
    return Tensor(data, requires_grad=False, name=name)


def parameter(data, name: str | None = None) -> Tensor:
    return Tensor(data, requires_grad=True, name=name)


class Tape:
    """Ordered record of primitive applications for reverse-mode backward."""

    def __init__(self):
        self.ops: list[tuple[Tensor, tuple[Tensor, ...], object]] = []

    def __enter__(self) -> "Tape":
        _tape_stack().append(self)
        return self

    def __exit__(self, *exc) -> None:
        _tape_stack().pop()

    def _record(self, out: Tensor, parents: tuple[Tensor, ...], bwd) -> None:
        out._tracked = True
        self.ops.append((out, parents, bwd))

    def backward(self, loss: Tensor) -> None:
        """Accumulate d(loss)/dp into ``grad`` of every tracked tensor."""
        if loss.data.shape != ():
            raise ValueError(f"backward needs a scalar loss, got shape {loss.data.shape}")
        loss._accumulate(np.ones((), dtype=np.float64))
        for out, parents, bwd in reversed(self.ops):
            if out.grad is None:
                continue
            grads = bwd(out.grad)
            for parent, g in zip(parents, grads):
                if g is not None:
                    parent._accumulate(g)


def _maybe_record(out: Tensor, parents: tuple[Tensor, ...], bwd) -> Tensor:
    tape = active_tape()
    if tape is not None and any(p._tracked for p in parents):
        tape._record(out, parents, bwd)
    return out


def _shape_error(op: str, *tensors: Tensor) -> ValueError:
    shapes = ", ".join(str(t.data.shape) for t in tensors)
    return ValueError(f"{op}: incompatible shapes {shapes}")


# ---------------------------------------------------------------------------
# primitives


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise _shape_error("matmul", a, b)
    out = Tensor(a.data @ b.data)

    def bwd(g):
        return (
            g @ b.data.T if a._tracked else None,
            a.data.T @ g if b._tracked else None,
        )

    return _maybe_record(out, (a, b), bwd)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise addition; also (B, D) + (D,) row-wise bias."""
    bias = a.data.ndim == 2 and b.data.ndim == 1 and a.data.shape[1] == b.data.shape[0]
    if not bias and a.data.shape != b.data.shape:
        raise _shape_error("add", a, b)
    out = Tensor(a.data + b.data)

    def bwd(g):
        ga = g if a._tracked else None
        if not b._tracked:
            gb = None
        elif bias:
            gb = g.sum(axis=0)
        else:
            gb = g
        return ga, gb

    return _maybe_record(out, (a, b), bwd)


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise _shape_error("mul", a, b)
    out = Tensor(a.data * b.data)

    def bwd(g):
        return (
            g * b.data if a._tracked else None,
            g * a.data if b._tracked else None,
        )

    return _maybe_record(out, (a, b), bwd)


def scale(x: Tensor, c: float) -> Tensor:
    out = Tensor(x.data * c)
    return _maybe_record(out, (x,), lambda g: (g * c,))


def add_scalar(x: Tensor, c: float) -> Tensor:
    out = Tensor(x.data + c)
    return _maybe_record(out, (x,), lambda g: (g,))


def scale_rows(v: Tensor, m: Tensor) -> Tensor:
    """Multiply row i of matrix ``m`` by ``v[i, 0]``; v has shape (B, 1)."""
    if v.data.ndim != 2 or v.data.shape[1] != 1 or m.data.ndim != 2 or v.data.shape[0] != m.data.shape[0]:
        raise _shape_error("scale_rows", v, m)
    out = Tensor(v.data * m.data)

    def bwd(g):
        gv = (g * m.data).sum(axis=1, keepdims=True) if v._tracked else None
        gm = g * v.data if m._tracked else None
        return gv, gm

    return _maybe_record(out, (v, m), bwd)


def concat(tensors: list[Tensor] | tuple[Tensor, ...], axis: int = 1) -> Tensor:
    if not tensors:
        raise ValueError("concat of empty list")
    if any(t.data.ndim != 2 for t in tensors):
        raise _shape_error("concat", *tensors)
    out = Tensor(np.concatenate([t.data for t in tensors], axis=axis))
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def bwd(g):
        pieces = []
        for t, a, b in zip(tensors, offsets[:-1], offsets[1:]):
            if not t._tracked:
                pieces.append(None)
            elif axis == 0:
                pieces.append(g[a:b, :])
            else:
                pieces.append(g[:, a:b])
        return tuple(pieces)

    return _maybe_record(out, tuple(tensors), bwd)


def tslice(x: Tensor, start: int, stop: int, axis: int = 1) -> Tensor:
    if x.data.ndim != 2:
        raise _shape_error("tslice", x)
    out = Tensor(x.data[start:stop, :] if axis == 0 else x.data[:, start:stop])

    def bwd(g):
        gx = np.zeros_like(x.data)
        if axis == 0:
            gx[start:stop, :] = g
        else:
            gx[:, start:stop] = g
        return (gx,)

    return _maybe_record(out, (x,), bwd)


def tanh(x: Tensor) -> Tensor:
    y = np.tanh(x.data)
    out = Tensor(y)
    return _maybe_record(out, (x,), lambda g: (g * (1.0 - y * y),))


def sigmoid(x: Tensor) -> Tensor:
    y = np.exp(-np.logaddexp(0.0, -x.data))  # stable 1 / (1 + exp(-x))
    out = Tensor(y)
    return _maybe_record(out, (x,), lambda g: (g * y * (1.0 - y),))


def log(x: Tensor) -> Tensor:
    out = Tensor(np.log(x.data))
    return _maybe_record(out, (x,), lambda g: (g / x.data,))


def clip(x: Tensor, lo: float, hi: float) -> Tensor:
    y = np.clip(x.data, lo, hi)
    inside = (x.data > lo) & (x.data < hi)
    out = Tensor(y)
    return _maybe_record(out, (x,), lambda g: (g * inside,))


def softmax_rows(x: Tensor) -> Tensor:
    if x.data.ndim != 2:
        raise _shape_error("softmax_rows", x)
    z = x.data - x.data.max(axis=1, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=1, keepdims=True)
    out = Tensor(y)

    def bwd(g):
        dot = (g * y).sum(axis=1, keepdims=True)
        return (y * (g - dot),)

    return _maybe_record(out, (x,), bwd)


def embedding_lookup(table: Tensor, ids: np.ndarray) -> Tensor:
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1 or table.data.ndim != 2:
        raise _shape_error("embedding_lookup", table)
    if ids.size and (ids.min() < 0 or ids.max() >= table.data.shape[0]):
        raise ValueError(
            f"embedding_lookup: id out of range 0..{table.data.shape[0] - 1}"
        )
    out = Tensor(table.data[ids])

    def bwd(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, ids, g)
        return (gt,)

    return _maybe_record(out, (table,), bwd)


def mean(x: Tensor) -> Tensor:
    n = x.data.size
    out = Tensor(np.asarray(x.data.mean()))
    return _maybe_record(out, (x,), lambda g: (np.full_like(x.data, g / n),))


def tsum(x: Tensor) -> Tensor:
    out = Tensor(np.asarray(x.data.sum()))
    return _maybe_record(out, (x,), lambda g: (np.full_like(x.data, g),))


def log_softmax_rows(data: np.ndarray) -> np.ndarray:
    """Plain numpy helper (no tape) shared by cross_entropy and scoring."""
    z = data - data.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def cross_entropy(logits: Tensor, ids: np.ndarray, weights: np.ndarray | None = None) -> Tensor:
    """Weighted sum of -log softmax(logits)[i, ids[i]] over rows.

    ``weights`` defaults to all ones; padding rows pass weight 0.
    """
    ids = np.asarray(ids, dtype=np.int64)
    if logits.data.ndim != 2 or ids.ndim != 1 or ids.shape[0] != logits.data.shape[0]:
        raise _shape_error("cross_entropy", logits)
    if ids.size and (ids.min() < 0 or ids.max() >= logits.data.shape[1]):
        raise ValueError(f"cross_entropy: target id out of range 0..{logits.data.shape[1] - 1}")
    w = np.ones(ids.shape[0]) if weights is None else np.asarray(weights, dtype=np.float64)
    logp = log_softmax_rows(logits.data)
    rows = np.arange(ids.shape[0])
    nll = -logp[rows, ids]
    out = Tensor(np.asarray((w * nll).sum()))

    def bwd(g):
        soft = np.exp(logp)
        gl = soft * w[:, None]
        gl[rows, ids] -= w
        return (gl * g,)

    return _maybe_record(out, (logits,), bwd)


def one_minus(x: Tensor) -> Tensor:
    return add_scalar(scale(x, -1.0), 1.0)


def tile_rows(x: Tensor, k: int) -> Tensor:
    """Stack k copies of a (B, D) matrix into (k*B, D)."""
    if x.data.ndim != 2:
        raise _shape_error("tile_rows", x)
    b = x.data.shape[0]
    out = Tensor(np.tile(x.data, (k, 1)))

    def bwd(g):
        return (g.reshape(k, b, -1).sum(axis=0),)

    return _maybe_record(out, (x,), bwd)


def block_sum(x: Tensor, k: int) -> Tensor:
    """Sum k stacked (B, D) blocks of a (k*B, D) matrix into (B, D)."""
    if x.data.ndim != 2 or x.data.shape[0] % k:
        raise _shape_error("block_sum", x)
    b = x.data.shape[0] // k
    out = Tensor(x.data.reshape(k, b, -1).sum(axis=0))
    return _maybe_record(out, (x,), lambda g: (np.tile(g, (k, 1)),))


def stack_to_columns(x: Tensor, k: int) -> Tensor:
    """Rearrange a (k*B, 1) stack of per-block columns into (B, k)."""
    if x.data.ndim != 2 or x.data.shape[1] != 1 or x.data.shape[0] % k:
        raise _shape_error("stack_to_columns", x)
    b = x.data.shape[0] // k
    out = Tensor(np.ascontiguousarray(x.data.reshape(k, b).T))
    return _maybe_record(out, (x,), lambda g: (g.T.reshape(k * b, 1),))


def columns_to_stack(x: Tensor) -> Tensor:
    """Inverse of stack_to_columns: (B, k) into a (k*B, 1) stack."""
    if x.data.ndim != 2:
        raise _shape_error("columns_to_stack", x)
    b, k = x.data.shape
    out = Tensor(np.ascontiguousarray(x.data.T).reshape(k * b, 1))
    return _maybe_record(out, (x,), lambda g: (np.ascontiguousarray(g.reshape(k, b).T),))


# ---------------------------------------------------------------------------
# Adam


class AdamState:
    """First/second moment estimates keyed by parameter name, plus step count."""

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}


def adam_step(params: dict[str, Tensor], state: AdamState) -> None:
    """One bias-corrected Adam update on every parameter with a gradient.

    Parameters without a gradient (frozen, or untouched by the loss) are
    skipped entirely and their moments are left as-is.
    """
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** state.t
    correction2 = 1.0 - b2 ** state.t
    for name, p in params.items():
        if p.grad is None:
            continue
        if p.grad.shape != p.data.shape:
            raise ValueError(f"adam_step: grad shape {p.grad.shape} != param shape {p.data.shape}")
        m = state.m.setdefault(name, np.zeros_like(p.data))
        v = state.v.setdefault(name, np.zeros_like(p.data))
        m *= b1
        m += (1.0 - b1) * p.grad
        v *= b2
        v += (1.0 - b2) * p.grad * p.grad
        m_hat = m / correction1
        v_hat = v / correction2
        p.data -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


# ---------------------------------------------------------------------------
# parameter serialization (versioned binary)

_MAGIC = b"MTPB"
_VERSION = 1


def save_params(path, named: dict[str, np.ndarray]) -> None:
    """Write named float64 arrays: magic, version, then (name, shape, data)."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<I", len(named)))
        for name in sorted(named):
            arr = np.ascontiguousarray(named[name], dtype=np.float64)
            raw = name.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<B", arr.ndim))
            for d in arr.shape:
                fh.write(struct.pack("<I", d))
            fh.write(arr.astype("<f8").tobytes())


def load_params(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"bad parameter file magic {magic!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != _VERSION:
            raise ValueError(f"unsupported parameter format version {version}")
        (count,) = struct.unpack("<I", fh.read(4))
        out: dict[str, np.ndarray] = {}
        for _ in range(count):
            (nlen,) = struct.unpack("<H", fh.read(2))
            name = fh.read(nlen).decode("utf-8")
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = tuple(struct.unpack("<I", fh.read(4))[0] for _ in range(ndim))
            n = int(np.prod(shape)) if shape else 1
            arr = np.frombuffer(fh.read(8 * n), dtype="<f8").reshape(shape).copy()
            out[name] = arr
    return out
