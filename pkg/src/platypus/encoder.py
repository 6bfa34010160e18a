"""Windowed-attention image encoder with top-down feature fusion.

Layout: a patch-embedding stem at stride `patch_size`, then stages that
each downsample 2x before their attention blocks, so stage i runs at
stride patch_size * 2**(i+1). The fusion network projects every stage to
`embed_dim`, upsamples coarse maps top-down, sums, smooths with a 3x3
convolution, and flattens the finest map row-major into the visual token
sequence.
"""

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .nn import (Module, Linear, LayerNorm, FeedForward, MultiHeadAttention,
                 trunc_normal, NEG_INF)
from .tensor import Tensor


def pad_to_multiple(image, multiple):
    """Zero-pad [H, W, 3] (or [B, H, W, 3]) on bottom/right to a multiple."""
    arr = np.asarray(image, dtype=np.float32)
    h, w = arr.shape[-3], arr.shape[-2]
    if h == 0 or w == 0:
        raise ValueError("empty image")
    ph = (-h) % multiple
    pw = (-w) % multiple
    if ph == 0 and pw == 0:
        return arr
    pad = [(0, ph), (0, pw), (0, 0)]
    if arr.ndim == 4:
        pad = [(0, 0)] + pad
    return np.pad(arr, pad)


def _pad_hw(x, ph, pw):
    """Zero-pad a [B, H, W, C] tensor on bottom/right via concat."""
    if ph:
        z = Tensor(np.zeros((x.shape[0], ph, x.shape[2], x.shape[3]), dtype=np.float32))
        x = T.concat([x, z], axis=1)
    if pw:
        z = Tensor(np.zeros((x.shape[0], x.shape[1], pw, x.shape[3]), dtype=np.float32))
        x = T.concat([x, z], axis=2)
    return x


def window_partition(x, w):
    """[B, H, W, C] -> [B*nh*nw, w*w, C]; H, W must divide w."""
    b, h, wd, c = x.shape
    nh, nw = h // w, wd // w
    x = T.reshape(x, (b, nh, w, nw, w, c))
    x = T.transpose(x, (0, 1, 3, 2, 4, 5))
    return T.reshape(x, (b * nh * nw, w * w, c)), (nh, nw)


def window_unpartition(x, w, grid, b, c):
    nh, nw = grid
    x = T.reshape(x, (b, nh, nw, w, w, c))
    x = T.transpose(x, (0, 1, 3, 2, 4, 5))
    return T.reshape(x, (b, nh * w, nw * w, c))


def _shift_region_ids(h, w, win, shift):
    """Swin-style region labels; windows may only mix equal labels."""
    ids = np.zeros((h, w), dtype=np.int64)
    n = 0
    h_slices = (slice(0, -win), slice(-win, -shift), slice(-shift, None))
    w_slices = (slice(0, -win), slice(-win, -shift), slice(-shift, None))
    for hs in h_slices:
        for ws in w_slices:
            ids[hs, ws] = n
            n += 1
    return ids


class WindowBlock(Module):
    """Window-local self-attention + MLP with residuals; the shifted
    variant rolls by window/2 and masks cross-window pairs."""

    def __init__(self, rng, dim, heads, window, shifted):
        self.window = window
        self.shifted = shifted
        self.norm1 = LayerNorm(dim)
        self.attn = MultiHeadAttention(rng, dim, heads)
        self.norm2 = LayerNorm(dim)
        self.mlp = FeedForward(rng, dim)

    def __call__(self, x, valid=None):
        b, h, w, c = x.shape
        win = min(self.window, h, w)   # clamp: degenerate global attention
        shift = win // 2 if (self.shifted and win > 1) else 0

        shortcut = x
        x = self.norm1(x)
        vmap = valid if valid is not None else np.ones((b, h, w), dtype=bool)
        if shift:
            x = T.roll(x, (-shift, -shift), axes=(1, 2))
            vmap = np.roll(vmap, (-shift, -shift), axis=(1, 2))

        ph, pw = (-h) % win, (-w) % win
        hp, wp = h + ph, w + pw
        if ph or pw:
            x = _pad_hw(x, ph, pw)
            vmap = np.pad(vmap, ((0, 0), (0, ph), (0, pw)))
        xw, grid = window_partition(x, win)
        nwin = grid[0] * grid[1]

        # key-side mask: padded/invalid cells never attended to
        vw = vmap.reshape(b, grid[0], win, grid[1], win).transpose(0, 1, 3, 2, 4)
        vw = vw.reshape(b * nwin, win * win)
        mask = None
        if not vw.all():
            mask = np.where(vw, 0.0, NEG_INF).astype(np.float32)[:, None, None, :]
        if shift:
            ids = _shift_region_ids(hp, wp, win, shift)
            idw = ids.reshape(grid[0], win, grid[1], win).transpose(0, 2, 1, 3).reshape(nwin, win * win)
            cross = (idw[:, :, None] != idw[:, None, :])
            smask = np.tile(np.where(cross, NEG_INF, 0.0).astype(np.float32)[:, None, :, :],
                            (b, 1, 1, 1))
            mask = smask if mask is None else mask + smask

        xw = self.attn(xw, mask=None if mask is None else Tensor(mask))
        x = window_unpartition(xw, win, grid, b, c)
        if ph or pw:
            x = T.slice_(x, (slice(None), slice(0, h), slice(0, w), slice(None)))
        if shift:
            x = T.roll(x, (shift, shift), axes=(1, 2))
        x = T.add(shortcut, x)
        return T.add(x, self.mlp(self.norm2(x)))


class PatchMerge(Module):
    """2x downsampling: 2x2 neighborhood concat, then norm + projection."""

    def __init__(self, rng, dim_in, dim_out):
        self.norm = LayerNorm(4 * dim_in)
        self.reduce = Linear(rng, 4 * dim_in, dim_out, bias=False)

    def __call__(self, x):
        b, h, w, c = x.shape
        x = _pad_hw(x, h % 2, w % 2)
        hp, wp = x.shape[1], x.shape[2]
        x = T.reshape(x, (b, hp // 2, 2, wp // 2, 2, c))
        x = T.transpose(x, (0, 1, 3, 2, 4, 5))
        x = T.reshape(x, (b, hp // 2, wp // 2, 4 * c))
        return self.reduce(self.norm(x))


class FeaturePyramid(Module):
    """Lateral projections + nearest-neighbor top-down fusion + smoothing."""

    def __init__(self, rng, stage_dims, out_dim):
        self.laterals = [Linear(rng, d, out_dim, bias=False) for d in stage_dims]
        self.smooth_w = Tensor(trunc_normal(rng, (3, 3, out_dim, out_dim)), requires_grad=True)
        self.smooth_b = Tensor(np.zeros(out_dim, dtype=np.float32), requires_grad=True)

    def __call__(self, stage_maps):
        if len(stage_maps) != len(self.laterals):
            raise ValueError(f"expected {len(self.laterals)} stage maps, got {len(stage_maps)}")
        for fine, coarse in zip(stage_maps, stage_maps[1:]):
            if not (fine.shape[1] >= coarse.shape[1] and fine.shape[2] >= coarse.shape[2]):
                raise ValueError(
                    f"stage maps must be ordered fine->coarse, got {fine.shape} before {coarse.shape}")
        lats = [lat(m) for lat, m in zip(self.laterals, stage_maps)]
        acc = lats[-1]
        for lat in reversed(lats[:-1]):
            up = T.upsample2x(acc)
            if up.shape[1] != lat.shape[1] or up.shape[2] != lat.shape[2]:
                up = T.slice_(up, (slice(None), slice(0, lat.shape[1]), slice(0, lat.shape[2]), slice(None)))
            acc = T.add(lat, up)
        return T.conv2d_3x3(acc, self.smooth_w, self.smooth_b)


@dataclass
class VisualTokens:
    """Flattened fused feature map for one image."""

    tokens: Tensor               # [L, d]
    positions: np.ndarray        # [L, 2] normalized (x, y) centers in (0,1)^2
    stride: int                  # pixels per token
    valid: np.ndarray            # [L] bool; False marks padded-region tokens


class ImageEncoder(Module):
    def __init__(self, rng, cfg):
        self.cfg = cfg
        p = cfg.patch_size
        self.patch_w = Tensor(trunc_normal(rng, (p, p, 3, cfg.stem_dim)), requires_grad=True)
        self.patch_b = Tensor(np.zeros(cfg.stem_dim, dtype=np.float32), requires_grad=True)
        dims = cfg.stage_dims
        self.merges = []
        self.stages = []
        prev = cfg.stem_dim
        for i, stage in enumerate(cfg.encoder_stages):
            self.merges.append(PatchMerge(rng, prev, dims[i]))
            blocks = [WindowBlock(rng, dims[i], stage.heads, stage.window, shifted=(j % 2 == 1))
                      for j in range(stage.blocks)]
            self.stages.append(blocks)
            prev = dims[i]
        self.fpn = FeaturePyramid(rng, dims, cfg.fpn_out_dim)

    def patch_embed(self, images):
        """[B, H, W, 3] (padded) -> stage-0 map [B, H/p, W/p, stem_dim]."""
        x = images if isinstance(images, Tensor) else Tensor(images)
        return T.conv_patchify(x, self.patch_w, self.patch_b)

    def _stage_valid(self, b_sizes, h, w, stride):
        valid = np.zeros((len(b_sizes), h, w), dtype=bool)
        for i, (uw, uh) in enumerate(b_sizes):
            valid[i, :max(1, -(-uh // stride)), :max(1, -(-uw // stride))] = True
        return valid

    def encode_batch(self, images, sizes):
        """Encode a padded batch.

        images: [B, H, W, 3] with H, W divisible by pad_multiple;
        sizes: per-image unpadded (w, h).
        Returns (tokens [B, L, d], positions [B, L, 2], valid [B, L], stride).
        """
        cfg = self.cfg
        x = self.patch_embed(images)
        maps = []
        stride = cfg.patch_size
        for merge, blocks in zip(self.merges, self.stages):
            x = merge(x)
            stride *= 2
            vmap = self._stage_valid(sizes, x.shape[1], x.shape[2], stride)
            for block in blocks:
                x = block(x, valid=vmap)
            maps.append(x)
        fused = self.fpn(maps)
        b, fh, fw, d = fused.shape
        fstride = cfg.fused_stride
        tokens = T.reshape(fused, (b, fh * fw, d))

        gx, gy = np.meshgrid(np.arange(fw), np.arange(fh))
        positions = np.zeros((b, fh * fw, 2), dtype=np.float32)
        valid = np.zeros((b, fh * fw), dtype=bool)
        for i, (uw, uh) in enumerate(sizes):
            px = (gx.ravel() + 0.5) * fstride / uw
            py = (gy.ravel() + 0.5) * fstride / uh
            positions[i, :, 0] = np.clip(px, 1e-6, 1 - 1e-6)
            positions[i, :, 1] = np.clip(py, 1e-6, 1 - 1e-6)
            valid[i] = (gx.ravel() * fstride < uw) & (gy.ravel() * fstride < uh)
        return tokens, positions, valid, fstride

    def encode_image(self, image):
        """[H, W, 3] in [0,1] -> VisualTokens."""
        img = np.asarray(image, dtype=np.float32)
        if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] == 0 or img.shape[1] == 0:
            raise ValueError(f"expected nonempty [H, W, 3] image, got {img.shape}")
        cap = max(self.cfg.max_image_long_side_full, self.cfg.max_image_long_side_cropped)
        if max(img.shape[0], img.shape[1]) > cap:
            raise ValueError(
                f"image long side {max(img.shape[:2])} exceeds configured cap {cap}; resize first")
        h, w = img.shape[:2]
        padded = pad_to_multiple(img, self.cfg.pad_multiple)
        tokens, positions, valid, stride = self.encode_batch(padded[None], [(w, h)])
        return VisualTokens(tokens=T.reshape(tokens, tokens.shape[1:]),
                            positions=positions[0], stride=stride, valid=valid[0])
