"""Layers built from tensor primitives: parameter tracking, linear maps,
layer norm with affine, and multi-head attention."""

import math

import numpy as np

from . import tensor as T
from .tensor import Tensor


def trunc_normal(rng, shape, std=0.02, dtype=np.float32):
    """Truncated-normal init: normal draws clipped at 2 sigma."""
    return np.clip(rng.normal(0.0, std, size=shape), -2 * std, 2 * std).astype(dtype)


class Module:
    """Minimal parameter container; children discovered via attributes."""

    def named_parameters(self, prefix=""):
        for name, value in vars(self).items():
            key = f"{prefix}{name}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield key, value
            elif isinstance(value, Module):
                yield from value.named_parameters(prefix=f"{key}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(prefix=f"{key}.{i}.")
                    elif isinstance(item, Tensor) and item.requires_grad:
                        yield f"{key}.{i}", item

    def parameters(self):
        return [p for _, p in self.named_parameters()]


class Linear(Module):
    def __init__(self, rng, d_in, d_out, bias=True):
        self.weight = Tensor(trunc_normal(rng, (d_in, d_out)), requires_grad=True)
        self.bias = Tensor(np.zeros(d_out, dtype=np.float32), requires_grad=True) if bias else None

    def __call__(self, x):
        out = T.matmul(x, self.weight)
        if self.bias is not None:
            out = T.add(out, self.bias)
        return out


class LayerNorm(Module):
    """Last-axis normalization with learned gain and bias."""

    def __init__(self, d):
        self.gain = Tensor(np.ones(d, dtype=np.float32), requires_grad=True)
        self.shift = Tensor(np.zeros(d, dtype=np.float32), requires_grad=True)

    def __call__(self, x):
        return T.add(T.mul(T.layer_norm(x, axis=-1), self.gain), self.shift)


class Embedding(Module):
    def __init__(self, rng, n, d):
        self.table = Tensor(trunc_normal(rng, (n, d)), requires_grad=True)

    def __call__(self, ids):
        return T.embedding_lookup(self.table, np.asarray(ids))


class FeedForward(Module):
    """Two-layer GELU MLP (hidden = ratio * d)."""

    def __init__(self, rng, d, ratio=4):
        self.fc1 = Linear(rng, d, ratio * d)
        self.fc2 = Linear(rng, ratio * d, d)

    def __call__(self, x):
        return self.fc2(T.gelu(self.fc1(x)))


def split_heads(x, heads):
    """[..., N, d] -> [..., heads, N, d/heads]"""
    *lead, n, d = x.shape
    x = T.reshape(x, (*lead, n, heads, d // heads))
    perm = list(range(len(lead))) + [len(lead) + 1, len(lead), len(lead) + 2]
    return T.transpose(x, perm)


def merge_heads(x):
    """[..., heads, N, dh] -> [..., N, heads*dh]"""
    *lead, h, n, dh = x.shape
    perm = list(range(len(lead))) + [len(lead) + 1, len(lead), len(lead) + 2]
    return T.reshape(T.transpose(x, perm), (*lead, n, h * dh))


def attend(q, k, v, heads, mask=None):
    """Scaled dot-product attention over the last two axes.

    q: [..., Nq, d]; k, v: [..., Nk, d]; mask: additive bias broadcastable
    to [..., heads, Nq, Nk] (use large negatives to forbid positions).
    """
    dh = q.shape[-1] // heads
    qh = split_heads(q, heads)
    kh = split_heads(k, heads)
    vh = split_heads(v, heads)
    scores = T.mul(T.matmul(qh, T.transpose(kh, list(range(qh.data.ndim - 2)) + [qh.data.ndim - 1, qh.data.ndim - 2])),
                   np.asarray(1.0 / math.sqrt(dh), dtype=q.dtype))
    if mask is not None:
        scores = T.add(scores, mask)
    attn = T.softmax(scores, axis=-1)
    return merge_heads(T.matmul(attn, vh))


class MultiHeadAttention(Module):
    """Projections for attention; query and key/value sources may differ."""

    def __init__(self, rng, d, heads):
        if d % heads:
            raise ValueError(f"attention width {d} not divisible by {heads} heads")
        self.heads = heads
        self.wq = Linear(rng, d, d)
        self.wk = Linear(rng, d, d)
        self.wv = Linear(rng, d, d)
        self.wo = Linear(rng, d, d)

    def __call__(self, q_src, kv_src=None, mask=None, kv=None):
        """kv: optional precomputed (k, v) tensors (shared memory reuse)."""
        q = self.wq(q_src)
        if kv is None:
            kv_src = q_src if kv_src is None else kv_src
            kv = (self.wk(kv_src), self.wv(kv_src))
        k, v = kv
        return self.wo(attend(q, k, v, self.heads, mask=mask))

    def project_kv(self, kv_src):
        return self.wk(kv_src), self.wv(kv_src)


NEG_INF = -1e9  # finite mask bias; keeps every primitive NaN/Inf-free
