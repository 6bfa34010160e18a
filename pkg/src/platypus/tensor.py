"""Dense tensors with reverse-mode differentiation.

A Tensor wraps a row-major numpy buffer (f32 or f64) plus an optional
gradient. Primitives record a dynamic tape: each result keeps references
to its parents and a closure computing parent gradients from its own.
`backward` walks the tape in reverse topological order.

Index-valued inputs (embedding ids, cross-entropy targets) are plain
integer numpy arrays; they are never differentiated.

The finite-difference harness at the bottom is the independent oracle for
every primitive's backward rule.
"""

import math
from contextlib import contextmanager

import numpy as np
from scipy.special import erf

DTYPES = {"f32": np.float32, "f64": np.float64}
_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)
LOG_FLOOR = 1e-12

_grad_enabled = True


@contextmanager
def no_grad():
    """Disable tape recording (inference / data paths)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    """Dense n-d value, optionally tracked on the autodiff tape."""

    __slots__ = ("data", "requires_grad", "grad", "_parents", "_vjp", "op")

    def __init__(self, data, dtype=None, requires_grad=False):
        arr = np.asarray(data)
        if dtype is not None:
            arr = arr.astype(dtype, copy=False)
        elif arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float32)
        self.data = np.ascontiguousarray(arr)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self._parents = ()
        self._vjp = None
        self.op = "leaf"

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    def item(self):
        return self.data.item()

    def zero_grad(self):
        self.grad = None

    def detach(self):
        return Tensor(self.data, requires_grad=False)

    def backward(self, leaves=()):
        backward(self, leaves=leaves)

    def __repr__(self):
        return f"Tensor(op={self.op}, shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    # Small amount of operator sugar for readable model code.
    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __matmul__(self, other):
        return matmul(self, other)


def _as_tensor(x, like=None):
    if isinstance(x, Tensor):
        return x
    dtype = like.dtype if like is not None else np.float32
    return Tensor(np.asarray(x, dtype=dtype))


def _result(data, parents, vjp, op):
    """Build an op result; record the tape only when grad tracking is on."""
    out = Tensor.__new__(Tensor)
    out.data = data
    out.grad = None
    out.op = op
    if _grad_enabled and any(p is not None and p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(p for p in parents if p is not None)
        # vjp returns grads aligned with the *full* parents tuple
        out._vjp = (vjp, parents)
    else:
        out.requires_grad = False
        out._parents = ()
        out._vjp = None
    return out


def _check_float(name, *tensors):
    dt = tensors[0].data.dtype
    for t in tensors:
        if t.data.dtype != dt:
            raise ValueError(f"{name}: mixed dtypes {tensors[0].data.dtype} and {t.data.dtype}")
    return dt


def _unbroadcast(grad, shape):
    """Sum a broadcasted gradient back down to `shape`."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _norm_axis(axis, ndim, name):
    if not isinstance(axis, (int, np.integer)):
        raise ValueError(f"{name}: axis must be an int, got {axis!r}")
    if not -ndim <= axis < ndim:
        raise ValueError(f"{name}: axis {axis} out of range for {ndim} dims")
    return axis % ndim


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------

def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _check_float("matmul", a, b)
    if a.data.ndim < 2 or b.data.ndim < 2:
        raise ValueError(f"matmul: need >=2-d operands, got {a.shape} and {b.shape}")
    if a.data.shape[-1] != b.data.shape[-2]:
        raise ValueError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    out = np.matmul(a.data, b.data)

    def vjp(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(ga, a.data.shape), _unbroadcast(gb, b.data.shape)

    return _result(out, (a, b), vjp, "matmul")


def add(a, b):
    a = _as_tensor(a)
    b = _as_tensor(b, like=a)
    _check_float("add", a, b)
    try:
        out = a.data + b.data
    except ValueError:
        raise ValueError(f"add: shapes {a.shape} and {b.shape} do not broadcast")

    def vjp(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return _result(out, (a, b), vjp, "add")


def mul(a, b):
    a = _as_tensor(a)
    b = _as_tensor(b, like=a)
    _check_float("mul", a, b)
    try:
        out = a.data * b.data
    except ValueError:
        raise ValueError(f"mul: shapes {a.shape} and {b.shape} do not broadcast")

    def vjp(g):
        return _unbroadcast(g * b.data, a.data.shape), _unbroadcast(g * a.data, b.data.shape)

    return _result(out, (a, b), vjp, "mul")


def softmax(x, axis):
    x = _as_tensor(x)
    ax = _norm_axis(axis, x.data.ndim, "softmax")
    z = x.data - x.data.max(axis=ax, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=ax, keepdims=True)

    def vjp(g):
        inner = (g * y).sum(axis=ax, keepdims=True)
        return (y * (g - inner),)

    return _result(y, (x,), vjp, "softmax")


def layer_norm(x, axis=-1, eps=1e-5):
    """Normalize along one axis to zero mean / unit variance (no affine)."""
    x = _as_tensor(x)
    ax = _norm_axis(axis, x.data.ndim, "layer_norm")
    mu = x.data.mean(axis=ax, keepdims=True)
    var = x.data.var(axis=ax, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv

    def vjp(g):
        gm = g.mean(axis=ax, keepdims=True)
        gxm = (g * xhat).mean(axis=ax, keepdims=True)
        return (inv * (g - gm - xhat * gxm),)

    return _result(xhat.astype(x.data.dtype, copy=False), (x,), vjp, "layer_norm")


def gelu(x):
    x = _as_tensor(x)
    xd = x.data
    phi = 0.5 * (1.0 + erf(xd * _INV_SQRT2))
    out = (xd * phi).astype(xd.dtype, copy=False)

    def vjp(g):
        pdf = np.exp(-0.5 * xd * xd) * _INV_SQRT2PI
        return ((g * (phi + xd * pdf)).astype(xd.dtype, copy=False),)

    return _result(out, (x,), vjp, "gelu")


def embedding_lookup(table, ids):
    table = _as_tensor(table)
    idx = np.asarray(ids)
    if not np.issubdtype(idx.dtype, np.integer):
        raise ValueError(f"embedding_lookup: ids must be integers, got {idx.dtype}")
    if idx.size and (idx.min() < 0 or idx.max() >= table.data.shape[0]):
        raise ValueError(
            f"embedding_lookup: id out of range [0, {table.data.shape[0]}) in {idx.ravel()[:8]}")
    out = table.data[idx]

    def vjp(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, idx, g)
        return (gt,)

    return _result(out, (table,), vjp, "embedding_lookup")


def concat(tensors, axis=0):
    tensors = [_as_tensor(t) for t in tensors]
    if not tensors:
        raise ValueError("concat: need at least one input")
    _check_float("concat", *tensors)
    ax = _norm_axis(axis, tensors[0].data.ndim, "concat")
    out = np.concatenate([t.data for t in tensors], axis=ax)
    sizes = [t.data.shape[ax] for t in tensors]

    def vjp(g):
        pieces = np.split(g, np.cumsum(sizes)[:-1], axis=ax)
        return tuple(pieces)

    return _result(out, tuple(tensors), vjp, "concat")


def slice_(x, key):
    """Basic (slice/int) indexing. Backward scatters into zeros."""
    x = _as_tensor(x)
    out = x.data[key]

    def vjp(g):
        gx = np.zeros_like(x.data)
        gx[key] = g
        return (gx,)

    return _result(np.ascontiguousarray(out), (x,), vjp, "slice")


def reshape(x, shape):
    x = _as_tensor(x)
    out = x.data.reshape(shape)

    def vjp(g):
        return (g.reshape(x.data.shape),)

    return _result(out, (x,), vjp, "reshape")


def transpose(x, axes):
    x = _as_tensor(x)
    axes = tuple(axes)
    out = np.transpose(x.data, axes)
    inv = np.argsort(axes)

    def vjp(g):
        return (np.transpose(g, inv),)

    return _result(np.ascontiguousarray(out), (x,), vjp, "transpose")


def conv_patchify(x, w, b=None):
    """Non-overlapping patch embedding.

    x: [B, H, W, C] (or [H, W, C]) with H, W divisible by the patch size p;
    w: [p, p, C, F]; b: [F]. Returns [B, H/p, W/p, F].
    """
    x, w = _as_tensor(x), _as_tensor(w)
    squeeze = x.data.ndim == 3
    xd = x.data[None] if squeeze else x.data
    if xd.ndim != 4 or w.data.ndim != 4:
        raise ValueError(f"conv_patchify: expected image [B,H,W,C] and kernel [p,p,C,F], got {x.shape} and {w.shape}")
    B, H, W, C = xd.shape
    p, p2, Cw, F = w.data.shape
    if p != p2 or Cw != C:
        raise ValueError(f"conv_patchify: kernel {w.shape} does not match image {x.shape}")
    if H == 0 or W == 0:
        raise ValueError("conv_patchify: empty image")
    if H % p or W % p:
        raise ValueError(f"conv_patchify: extents {H}x{W} not divisible by patch size {p}")
    Hp, Wp = H // p, W // p
    cols = xd.reshape(B, Hp, p, Wp, p, C).transpose(0, 1, 3, 2, 4, 5).reshape(B, Hp, Wp, p * p * C)
    wf = w.data.reshape(p * p * C, F)
    out = cols @ wf
    if b is not None:
        b = _as_tensor(b, like=x)
        out = out + b.data
    if squeeze:
        out = out[0]

    def vjp(g):
        gd = g[None] if squeeze else g
        gcols = gd @ wf.T
        gx = gcols.reshape(B, Hp, Wp, p, p, C).transpose(0, 1, 3, 2, 4, 5).reshape(B, H, W, C)
        if squeeze:
            gx = gx[0]
        gw = (cols.reshape(-1, p * p * C).T @ gd.reshape(-1, F)).reshape(w.data.shape)
        if b is None:
            return gx, gw
        return gx, gw, gd.sum(axis=(0, 1, 2))

    parents = (x, w) if b is None else (x, w, b)
    return _result(np.ascontiguousarray(out), parents, vjp, "conv_patchify")


def cross_entropy(logits, targets, ignore_index=-1):
    """Mean next-token cross-entropy over non-ignored positions.

    logits: [N, V]; targets: [N] ints. An all-ignored batch yields exactly
    0 with zero gradient.
    """
    logits = _as_tensor(logits)
    t = np.asarray(targets)
    if logits.data.ndim != 2:
        raise ValueError(f"cross_entropy: logits must be [N, V], got {logits.shape}")
    if t.ndim != 1 or t.shape[0] != logits.data.shape[0]:
        raise ValueError(f"cross_entropy: targets {t.shape} do not match logits {logits.shape}")
    if not np.issubdtype(t.dtype, np.integer):
        raise ValueError(f"cross_entropy: targets must be integers, got {t.dtype}")
    N, V = logits.data.shape
    keep = t != ignore_index
    n = int(keep.sum())
    tc = np.where(keep, t, 0)
    if tc.size and (tc.min() < 0 or tc.max() >= V):
        raise ValueError(f"cross_entropy: target id out of range [0, {V})")
    z = logits.data - logits.data.max(axis=1, keepdims=True)
    lse = np.log(np.maximum(np.exp(z).sum(axis=1, keepdims=True), LOG_FLOOR))
    logp = z - lse
    per = -logp[np.arange(N), tc]
    loss = (per * keep).sum() / n if n else 0.0
    out = np.asarray(loss, dtype=logits.data.dtype)

    def vjp(g):
        if n == 0:
            return (np.zeros_like(logits.data),)
        p = np.exp(logp)
        p[np.arange(N), tc] -= 1.0
        p *= (keep / n)[:, None]
        return ((g * p).astype(logits.data.dtype, copy=False),)

    return _result(out, (logits,), vjp, "cross_entropy")


def reduce_sum(x, axis=None, keepdims=False):
    x = _as_tensor(x)
    out = x.data.sum(axis=axis, keepdims=keepdims)

    def vjp(g):
        g = np.asarray(g)
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.data.shape).astype(x.data.dtype, copy=False),)

    return _result(np.asarray(out, dtype=x.data.dtype), (x,), vjp, "sum")


def mean(x, axis=None, keepdims=False):
    x = _as_tensor(x)
    denom = x.data.size if axis is None else x.data.shape[axis]
    return mul(reduce_sum(x, axis=axis, keepdims=keepdims), np.asarray(1.0 / denom, dtype=x.data.dtype))


def roll(x, shifts, axes):
    x = _as_tensor(x)
    out = np.roll(x.data, shifts, axis=axes)

    def vjp(g):
        neg = tuple(-s for s in shifts) if isinstance(shifts, (tuple, list)) else -shifts
        return (np.roll(g, neg, axis=axes),)

    return _result(out, (x,), vjp, "roll")


def upsample2x(x):
    """Nearest-neighbor 2x upsampling of [B, H, W, C] (or [H, W, C])."""
    x = _as_tensor(x)
    squeeze = x.data.ndim == 3
    xd = x.data[None] if squeeze else x.data
    B, H, W, C = xd.shape
    out = xd.repeat(2, axis=1).repeat(2, axis=2)
    if squeeze:
        out = out[0]

    def vjp(g):
        gd = g[None] if squeeze else g
        gx = gd.reshape(B, H, 2, W, 2, C).sum(axis=(2, 4))
        return (gx[0] if squeeze else gx,)

    return _result(out, (x,), vjp, "upsample2x")


def conv2d_3x3(x, w, b=None):
    """3x3 stride-1 same-padding convolution (FPN smoothing).

    x: [B, H, W, Cin] (or [H, W, Cin]); w: [3, 3, Cin, F]; b: [F].
    """
    x, w = _as_tensor(x), _as_tensor(w)
    squeeze = x.data.ndim == 3
    xd = x.data[None] if squeeze else x.data
    if w.data.shape[:2] != (3, 3) or w.data.shape[2] != xd.shape[3]:
        raise ValueError(f"conv2d_3x3: kernel {w.shape} does not match input {x.shape}")
    B, H, W, C = xd.shape
    F = w.data.shape[3]
    xp = np.pad(xd, ((0, 0), (1, 1), (1, 1), (0, 0)))
    out = np.zeros((B, H, W, F), dtype=xd.dtype)
    for dy in range(3):
        for dx in range(3):
            out += xp[:, dy:dy + H, dx:dx + W, :] @ w.data[dy, dx]
    if b is not None:
        b = _as_tensor(b, like=x)
        out = out + b.data
    if squeeze:
        out = out[0]

    def vjp(g):
        gd = g[None] if squeeze else g
        gxp = np.zeros_like(xp)
        gw = np.zeros_like(w.data)
        for dy in range(3):
            for dx in range(3):
                gxp[:, dy:dy + H, dx:dx + W, :] += gd @ w.data[dy, dx].T
                gw[dy, dx] = np.tensordot(xp[:, dy:dy + H, dx:dx + W, :], gd, axes=([0, 1, 2], [0, 1, 2]))
        gx = gxp[:, 1:1 + H, 1:1 + W, :]
        if squeeze:
            gx = gx[0]
        if b is None:
            return gx, gw
        return gx, gw, gd.sum(axis=(0, 1, 2))

    parents = (x, w) if b is None else (x, w, b)
    return _result(out, parents, vjp, "conv2d_3x3")


PRIMITIVES = {
    "matmul": matmul,
    "add": add,
    "mul": mul,
    "softmax": softmax,
    "layer_norm": layer_norm,
    "gelu": gelu,
    "embedding_lookup": embedding_lookup,
    "concat": concat,
    "slice": slice_,
    "reshape": reshape,
    "transpose": transpose,
    "conv_patchify": conv_patchify,
    "cross_entropy": cross_entropy,
    # extras used by the model; same tape/oracle machinery
    "sum": reduce_sum,
    "mean": mean,
    "roll": roll,
    "upsample2x": upsample2x,
    "conv2d_3x3": conv2d_3x3,
}


def apply_primitive(kind, *inputs, **kwargs):
    """Apply a primitive by name; see PRIMITIVES for the supported kinds."""
    try:
        fn = PRIMITIVES[kind]
    except KeyError:
        raise ValueError(f"unknown primitive kind {kind!r}; known: {sorted(PRIMITIVES)}")
    return fn(*inputs, **kwargs)


# ---------------------------------------------------------------------------
# Backward pass
# ---------------------------------------------------------------------------

class Graph:
    """Topologically ordered view of the tape below one output tensor."""

    def __init__(self, nodes, leaves):
        self.nodes = nodes      # op results, parents before children
        self.leaves = leaves    # tensors with no parents

    @classmethod
    def from_output(cls, out):
        order, leaves, seen = [], [], set()
        stack = [(out, False)]
        while stack:
            t, expanded = stack.pop()
            if expanded:
                order.append(t)
                continue
            if id(t) in seen:
                continue
            seen.add(id(t))
            if t._parents:
                stack.append((t, True))
                for p in t._parents:
                    stack.append((p, False))
            else:
                leaves.append(t)
        return cls(order, leaves)


def backward(loss, leaves=()):
    """Populate .grad on every requires_grad leaf reachable from `loss`.

    Leaves listed in `leaves` but not on any path to the loss receive
    exact zeros.
    """
    if not isinstance(loss, Tensor):
        raise ValueError("backward: loss must be a Tensor")
    if loss.data.ndim != 0 and loss.data.size != 1:
        raise ValueError(f"backward: loss must be scalar, got shape {loss.shape}")
    graph = Graph.from_output(loss)
    grads = {id(loss): np.ones_like(loss.data)}
    for node in reversed(graph.nodes):
        g = grads.pop(id(node), None)
        if g is None or node._vjp is None:
            continue
        vjp, parents = node._vjp
        pgrads = vjp(g)
        for p, pg in zip(parents, pgrads):
            if p is None or pg is None or not (p.requires_grad or p._parents):
                continue
            key = id(p)
            if key in grads:
                grads[key] = grads[key] + pg
            else:
                grads[key] = pg
    for t in graph.leaves:
        if t.requires_grad:
            g = grads.get(id(t))
            acc = np.zeros_like(t.data) if g is None else np.asarray(g, dtype=t.data.dtype)
            t.grad = acc if t.grad is None else t.grad + acc
    for t in leaves:
        if t.requires_grad and t.grad is None:
            t.grad = np.zeros_like(t.data)


# ---------------------------------------------------------------------------
# Finite-difference oracle
# ---------------------------------------------------------------------------

def _fd_case(kind, shapes, rng, dtype):
    """Build (inputs, kwargs, differentiable-input names) for one kind."""
    def rand(shape):
        return Tensor(rng.uniform(-2.0, 2.0, size=shape), dtype=dtype, requires_grad=True)

    kwargs = {}
    if kind == "matmul":
        a, b = rand(shapes[0]), rand(shapes[1])
        return [a, b], kwargs, {"a": a, "b": b}
    if kind in ("add", "mul"):
        a, b = rand(shapes[0]), rand(shapes[1])
        return [a, b], kwargs, {"a": a, "b": b}
    if kind in ("softmax", "layer_norm"):
        x = rand(shapes[0])
        kwargs["axis"] = len(shapes[0]) - 1
        return [x], kwargs, {"x": x}
    if kind in ("gelu", "reshape", "transpose", "slice", "sum", "upsample2x", "roll"):
        x = rand(shapes[0])
        if kind == "reshape":
            kwargs["shape"] = (int(np.prod(shapes[0])),)
        elif kind == "transpose":
            kwargs["axes"] = tuple(reversed(range(len(shapes[0]))))
        elif kind == "slice":
            kwargs["key"] = tuple(slice(0, max(1, s - 1)) for s in shapes[0])
        elif kind == "roll":
            kwargs["shifts"], kwargs["axes"] = (1,), (0,)
        return [x], kwargs, {"x": x}
    if kind == "embedding_lookup":
        table = rand(shapes[0])
        ids = rng.integers(0, shapes[0][0], size=shapes[1])
        return [table, ids], kwargs, {"table": table}
    if kind == "concat":
        parts = [rand(s) for s in shapes]
        return [parts], {"axis": 0}, {f"t{i}": t for i, t in enumerate(parts)}
    if kind == "conv_patchify":
        x, w, b = rand(shapes[0]), rand(shapes[1]), rand(shapes[2])
        return [x, w, b], kwargs, {"x": x, "w": w, "b": b}
    if kind == "conv2d_3x3":
        x, w, b = rand(shapes[0]), rand(shapes[1]), rand(shapes[2])
        return [x, w, b], kwargs, {"x": x, "w": w, "b": b}
    if kind == "cross_entropy":
        logits = rand(shapes[0])
        targets = rng.integers(0, shapes[0][1], size=shapes[0][0])
        return [logits, targets], {"ignore_index": -1}, {"logits": logits}
    raise ValueError(f"finite_diff_check: no case builder for kind {kind!r}")


def finite_diff_check(kind, shapes, seed=0, eps=1e-5, dtype=np.float64):
    """Compare backward gradients against central differences.

    Returns {input_name: max relative error}, with relative error measured
    as |a - b| / max(|a|, |b|, 1e-8). Inputs are random with |x| <= 2.
    """
    if not 0 < eps <= 1e-2:
        raise ValueError(f"finite_diff_check: eps must be in (0, 1e-2], got {eps}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    inputs, kwargs, diff = _fd_case(kind, shapes, rng, dtype)
    fn = PRIMITIVES[kind]

    def fwd():
        return fn(*inputs, **kwargs)

    out = fwd()
    weights = rng.standard_normal(out.data.shape)

    def loss_value():
        with no_grad():
            return float((fwd().data * weights).sum())

    loss = reduce_sum(mul(out, Tensor(weights, dtype=dtype)))
    for t in diff.values():
        t.zero_grad()
    backward(loss, leaves=list(diff.values()))

    report = {}
    for name, t in diff.items():
        flat = t.data.reshape(-1)
        num = np.zeros_like(flat)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            hi = loss_value()
            flat[i] = orig - eps
            lo = loss_value()
            flat[i] = orig
            num[i] = (hi - lo) / (2 * eps)
        ana = t.grad.reshape(-1)
        denom = np.maximum(np.maximum(np.abs(ana), np.abs(num)), 1e-8)
        report[name] = float(np.max(np.abs(ana - num) / denom)) if flat.size else 0.0
    return report
