"""Prompt encoding: categorical task embeddings plus point / quadrilateral
box embeddings, each formed as positional encoding + learned table row."""

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .nn import Module, trunc_normal
from .tensor import Tensor
from .tasking import CATEGORIES, WRITINGS, GRANULARITIES

CATEGORICAL_ANCHOR = (0.5, 0.5)   # PE argument for non-spatial prompts
CORNER_ORDER = ["TL", "TR", "BR", "BL"]


class PositionalEncoder:
    """Random-Fourier features of normalized (x, y) coordinates.

    Frequencies are a fixed seeded Gaussian draw (sigma = scale); the map
    is deterministic and smooth, and identical coordinates always encode
    identically.
    """

    def __init__(self, d, seed, scale=1.0):
        if d % 2:
            raise ValueError("positional encoding width must be even")
        rng = np.random.Generator(np.random.Philox(key=seed))
        self.freq = rng.normal(0.0, scale, size=(d // 2, 2)).astype(np.float32)
        self.d = d

    def encode(self, coords):
        """coords: [..., 2] in [0,1]^2 -> [..., d] numpy array."""
        c = np.asarray(coords, dtype=np.float32)
        proj = 2.0 * np.pi * (c @ self.freq.T)
        return np.concatenate([np.sin(proj), np.cos(proj)], axis=-1)


@dataclass
class PromptSet:
    """Encoded prompt token sequence: 3 categorical rows, then 0/1/4
    spatial rows; K in {3, 4, 7}."""

    tokens: Tensor               # [K, d]
    kind: str                    # none | point | quad

    def __post_init__(self):
        expected = {"none": 3, "point": 4, "quad": 7}
        if self.kind not in expected:
            raise ValueError(f"unknown prompt kind {self.kind!r}")
        if self.tokens.shape[0] != expected[self.kind]:
            raise ValueError(
                f"prompt kind {self.kind} needs {expected[self.kind]} tokens, got {self.tokens.shape[0]}")


class PromptEncoder(Module):
    """Learned tables for categorical, point and box-corner prompts."""

    def __init__(self, rng, d, pe):
        self.pe = pe
        self.category_table = Tensor(trunc_normal(rng, (len(CATEGORIES), d)), requires_grad=True)
        self.writing_table = Tensor(trunc_normal(rng, (len(WRITINGS), d)), requires_grad=True)
        self.granularity_table = Tensor(trunc_normal(rng, (len(GRANULARITIES), d)), requires_grad=True)
        self.point_table = Tensor(trunc_normal(rng, (1, d)), requires_grad=True)
        self.corner_table = Tensor(trunc_normal(rng, (4, d)), requires_grad=True)

    def _table(self, kind):
        tables = {
            "category": self.category_table,
            "writing": self.writing_table,
            "granularity": self.granularity_table,
        }
        if kind not in tables:
            raise ValueError(f"unknown categorical kind {kind!r}")
        return tables[kind]

    def encode_categorical(self, kind, value):
        """PE(anchor) + table[value]; `value` may name the unspecified row."""
        table = self._table(kind)
        if not 0 <= value < table.shape[0]:
            raise ValueError(f"{kind} index {value} out of range [0, {table.shape[0]})")
        anchor = self.pe.encode(np.array(CATEGORICAL_ANCHOR))
        row = T.embedding_lookup(table, np.array([value]))
        return T.reshape(T.add(row, Tensor(anchor[None, :])), (table.shape[1],))

    def encode_point(self, x, y, image_size):
        w, h = image_size
        if not 0 <= x <= w:
            raise ValueError(f"point x={x} outside image width [0, {w}]")
        if not 0 <= y <= h:
            raise ValueError(f"point y={y} outside image height [0, {h}]")
        pe = self.pe.encode(np.array([x / w, y / h]))
        row = T.embedding_lookup(self.point_table, np.array([0]))
        return T.reshape(T.add(row, Tensor(pe[None, :])), (self.point_table.shape[1],))

    def encode_quad(self, corners, image_size):
        """corners: 4 (x, y) pairs in TL, TR, BR, BL order -> [4, d]."""
        q = np.asarray(corners, dtype=np.float64)
        if q.shape != (4, 2):
            raise ValueError(f"quad prompt requires exactly 4 corners, got shape {q.shape}")
        w, h = image_size
        q = np.clip(q, [0, 0], [w, h])
        pe = self.pe.encode(q / np.array([w, h], dtype=np.float64))
        rows = T.embedding_lookup(self.corner_table, np.arange(4))
        return T.add(rows, Tensor(pe.astype(np.float32)))

    def assemble_prompt_sequence(self, task, spatial=None, image_size=None):
        """Categorical tokens in (category, writing, granularity) order,
        then the optional spatial rows; `spatial` is None, ("point", (x, y))
        or ("quad", corners)."""
        rows = [
            T.reshape(self.encode_categorical("category", task.category_index), (1, -1)),
            T.reshape(self.encode_categorical("writing", task.writing_index), (1, -1)),
            T.reshape(self.encode_categorical("granularity", task.granularity_index), (1, -1)),
        ]
        kind = "none"
        if spatial is not None:
            if image_size is None:
                raise ValueError("spatial prompts need image_size for normalization")
            tag, payload = spatial
            if tag == "point":
                rows.append(T.reshape(self.encode_point(payload[0], payload[1], image_size), (1, -1)))
                kind = "point"
            elif tag == "quad":
                rows.append(self.encode_quad(payload, image_size))
                kind = "quad"
            else:
                raise ValueError(f"unknown spatial prompt {tag!r}")
        return PromptSet(tokens=T.concat(rows, axis=0), kind=kind)
