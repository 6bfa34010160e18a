"""Autoregressive recognition decoder: causal self-attention over the
token prefix, cross-attention over visual + prompt memory."""

import numpy as np

from . import tensor as T
from .nn import (Module, Linear, LayerNorm, FeedForward, MultiHeadAttention,
                 Embedding, NEG_INF)
from .tensor import Tensor
from .vocab import BOS, EOS, PAD


class DecoderLayer(Module):
    def __init__(self, rng, d, heads):
        self.norm1 = LayerNorm(d)
        self.self_attn = MultiHeadAttention(rng, d, heads)
        self.norm2 = LayerNorm(d)
        self.cross_attn = MultiHeadAttention(rng, d, heads)
        self.norm3 = LayerNorm(d)
        self.mlp = FeedForward(rng, d)


class TextDecoder(Module):
    def __init__(self, rng, cfg):
        self.cfg = cfg
        d = cfg.embed_dim
        self.token_embed = Embedding(rng, cfg.vocab_size, d)
        self.pos_embed = Embedding(rng, cfg.max_decode_len, d)
        self.layers = [DecoderLayer(rng, d, cfg.decoder_heads) for _ in range(cfg.decoder_layers)]
        self.final_norm = LayerNorm(d)
        self.out_proj = Linear(rng, d, cfg.vocab_size)

    def _causal_mask(self, t):
        m = np.triu(np.full((t, t), NEG_INF, dtype=np.float32), k=1)
        return Tensor(m)

    def memory_kv(self, visual):
        """Per-layer (k, v) projections of the visual tokens, computed once
        and shared by every query that reads the same image."""
        return [layer.cross_attn.project_kv(visual) for layer in self.layers]

    def forward(self, prefix_ids, visual_kv, mem_mask, prompt_tokens=None, prompt_mask=None):
        """Logits over the next token at each prefix position.

        prefix_ids: [B, T] ints (BOS-led); visual_kv: list of per-layer
        (k, v) with shape [B, L, d]; mem_mask: [B, 1, 1, L(+K)] additive;
        prompt_tokens: optional [B, K, d] appended to the memory.
        """
        b, t = np.asarray(prefix_ids).shape
        if t > self.cfg.max_decode_len:
            raise ValueError(f"prefix length {t} exceeds max_decode_len {self.cfg.max_decode_len}")
        x = T.add(self.token_embed(prefix_ids), self.pos_embed(np.arange(t)))
        causal = self._causal_mask(t)
        for layer, kv in zip(self.layers, visual_kv):
            h = layer.norm1(x)
            x = T.add(x, layer.self_attn(h, mask=causal))
            h = layer.norm2(x)
            k, v = kv
            if prompt_tokens is not None:
                pk, pv = layer.cross_attn.project_kv(prompt_tokens)
                k = T.concat([k, pk], axis=1)
                v = T.concat([v, pv], axis=1)
            x = T.add(x, layer.cross_attn(h, kv=(k, v), mask=mem_mask))
            x = T.add(x, layer.mlp(layer.norm3(x)))
        return self.out_proj(self.final_norm(x))


def greedy_decode(step_fn, max_len, batch=1):
    """Argmax decoding loop over a prefix-extension callback.

    step_fn(prefix_ids [B, T]) must return logits [B, T, V]; ties break
    toward the lowest id (numpy argmax convention). Returns per-sequence
    id lists ending at EOS (exclusive) or max_len.
    """
    prefix = np.full((batch, 1), BOS, dtype=np.int64)
    done = np.zeros(batch, dtype=bool)
    with T.no_grad():
        for _ in range(max_len):
            logits = step_fn(prefix)
            nxt = np.argmax(logits.data[:, -1, :], axis=-1)
            nxt = np.where(done, PAD, nxt)
            prefix = np.concatenate([prefix, nxt[:, None]], axis=1)
            done |= (nxt == EOS)
            if done.all():
                break
    out = []
    for row in prefix:
        ids = []
        for tid in row[1:]:
            if tid in (EOS, PAD):
                break
            ids.append(int(tid))
        out.append(ids)
    return out


def teacher_forced_loss(logits, targets, counts=False):
    """Mean cross-entropy of next-token prediction over non-PAD positions.

    logits: [B, T, V] for prefix target[:, :-1]; targets: [B, T+1] padded
    id matrix whose rows end with EOS before any padding.
    """
    t = np.asarray(targets)
    if t.ndim != 2 or t.shape[1] < 2:
        raise ValueError(f"targets must be [B, T+1] with T >= 1, got {t.shape}")
    flat = T.reshape(logits, (logits.shape[0] * logits.shape[1], logits.shape[2]))
    labels = t[:, 1:].reshape(-1)
    loss = T.cross_entropy(flat, labels, ignore_index=PAD)
    if counts:
        return loss, int((labels != PAD).sum())
    return loss


def pad_targets(sequences, pad_to=None):
    """Stack ragged id lists into a PAD-filled [B, T_max] matrix."""
    n = max(len(s) for s in sequences)
    if pad_to is not None:
        n = max(n, pad_to)
    out = np.full((len(sequences), n), PAD, dtype=np.int64)
    for i, s in enumerate(sequences):
        out[i, :len(s)] = s
    return out
