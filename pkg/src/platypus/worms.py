"""Synthetic text-reading corpus: renders the four image categories with
word and line annotations, applies training augmentations, and reads /
writes JSON-lines manifests.

Rendering uses only the embedded bitmap font and integer raster math, so
a fixed seed reproduces every image byte-for-byte on any platform.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from . import imageops as iops
from .fontdata import GLYPHS, GLYPH_HEIGHT, GLYPH_BASELINE
from .tasking import SampleAnnotation, TextInstance
from . import rng as R

LOWER = "abcdefghijklmnopqrstuvwxyz"
UPPER = LOWER.upper()
DIGITS = "0123456789"
FORMULA_ATOMS = DIGITS + "abcnxyz"

SUPERSCRIPT_RAISE = 5   # rows (per unit scale) a superscript baseline rises
SUBSCRIPT_DROP = 3      # rows a subscript baseline drops
FRACTION_AXIS = 4       # rows above the baseline where the rule sits

SCENE_PALETTE = [
    ((236, 240, 241), (44, 62, 80)),
    ((250, 235, 215), (120, 40, 31)),
    ((213, 245, 227), (11, 83, 69)),
    ((214, 234, 248), (21, 67, 96)),
    ((40, 55, 71), (244, 246, 247)),
    ((74, 35, 90), (250, 219, 216)),
]
DOC_PALETTE = [((255, 255, 255), (20, 20, 20)), ((248, 246, 238), (35, 30, 25))]


# ---------------------------------------------------------------------------
# Glyph rasterization
# ---------------------------------------------------------------------------

def _glyph_mask(ch, scale):
    width, rows = GLYPHS.get(ch, GLYPHS["?"])
    bits = np.zeros((GLYPH_HEIGHT, width), dtype=np.uint8)
    for r, rowbits in enumerate(rows):
        for c in range(width):
            if rowbits >> c & 1:
                bits[r, c] = 1
    if scale > 1:
        bits = np.kron(bits, np.ones((scale, scale), dtype=np.uint8))
    return bits


def _thicken(mask):
    out = mask.copy()
    out[:, 1:] |= mask[:, :-1]
    out[1:, :] |= mask[:-1, :]
    return out


def _shear_rows(mask, slant):
    """Shift each row right proportionally to its height above the bottom."""
    h, w = mask.shape
    max_shift = int(round(abs(slant) * h))
    if max_shift == 0:
        return mask
    out = np.zeros((h, w + max_shift), dtype=np.uint8)
    for r in range(h):
        shift = int(round(slant * (h - 1 - r)))
        shift = max(0, min(max_shift, shift))
        out[r, shift:shift + w] |= mask[r]
    return out


def render_text_mask(text, scale, style="printed", rng=None):
    """Rasterize one line of text.

    Returns (mask uint8 [h, w], char_extents list of (x0, x1) per char).
    The handwritten style jitters each glyph vertically, slants it, and
    occasionally thickens strokes; all offsets come from `rng`.
    """
    if not text:
        raise ValueError("cannot render empty text")
    hand = style == "handwritten"
    slack = 2 * scale if hand else 0
    height = GLYPH_HEIGHT * scale + 2 * slack
    pieces = []
    x = 0
    extents = []
    gap = max(1, scale)
    for ch in text:
        g = _glyph_mask(ch, scale)
        dy = slack
        if hand and rng is not None:
            g = _shear_rows(g, rng.uniform(0.08, 0.3))
            dy = slack + int(rng.integers(-slack, slack + 1)) if slack else 0
            if rng.random() < 0.35:
                g = _thicken(g)
        pieces.append((x, dy, g))
        extents.append((x, x + g.shape[1]))
        x += g.shape[1] + gap
    width = max(x - gap, 1)
    mask = np.zeros((height, width), dtype=np.uint8)
    for px, py, g in pieces:
        gh, gw = g.shape
        py = max(0, min(py, height - gh))
        mask[py:py + gh, px:px + gw] |= g
    return mask, extents


# ---------------------------------------------------------------------------
# Formula layout (toy grammar)
# ---------------------------------------------------------------------------

def gen_formula(rng, depth=0, max_depth=2):
    """Random expression AST over digits/letters, +,-,=, fractions and
    super/subscripts. Nodes: atom / frac / sup / sub / seq."""
    def atom():
        return ("atom", FORMULA_ATOMS[int(rng.integers(len(FORMULA_ATOMS)))])

    def term():
        roll = rng.random()
        if depth < max_depth and roll < 0.25:
            return ("frac", gen_formula(rng, depth + 1, max_depth),
                    gen_formula(rng, depth + 1, max_depth))
        if roll < 0.45:
            return ("sup", atom(), atom())
        if roll < 0.6:
            return ("sub", atom(), atom())
        return atom()

    parts = [term()]
    for _ in range(int(rng.integers(0, 3 if depth == 0 else 2))):
        op = "+-="[int(rng.integers(3 if depth == 0 else 2))]
        parts.extend([("atom", op), term()])
    return ("seq", parts) if len(parts) > 1 else parts[0]


def formula_to_string(node):
    kind = node[0]
    if kind == "atom":
        return node[1]
    if kind == "frac":
        return "\\frac{" + formula_to_string(node[1]) + "}{" + formula_to_string(node[2]) + "}"
    if kind == "sup":
        return formula_to_string(node[1]) + "^{" + formula_to_string(node[2]) + "}"
    if kind == "sub":
        return formula_to_string(node[1]) + "_{" + formula_to_string(node[2]) + "}"
    return "".join(formula_to_string(p) for p in node[1])


def _hcat(boxes, gap):
    """Concatenate (mask, baseline) boxes along a shared baseline."""
    above = max(b for _, b in boxes)
    below = max(m.shape[0] - b for m, b in boxes)
    width = sum(m.shape[1] for m, _ in boxes) + gap * (len(boxes) - 1)
    out = np.zeros((above + below, width), dtype=np.uint8)
    x = 0
    for m, b in boxes:
        out[above - b:above - b + m.shape[0], x:x + m.shape[1]] |= m
        x += m.shape[1] + gap
    return out, above


def formula_to_box(node, scale, rng=None):
    """Recursive layout; returns (mask, baseline row)."""
    kind = node[0]
    if kind == "atom":
        return _glyph_mask(node[1], scale), GLYPH_BASELINE * scale
    if kind == "seq":
        return _hcat([formula_to_box(p, scale, rng) for p in node[1]], gap=scale)
    if kind == "frac":
        num, _ = formula_to_box(node[1], scale, rng)
        den, _ = formula_to_box(node[2], scale, rng)
        rule_t = scale
        vgap = scale
        width = max(num.shape[1], den.shape[1]) + 2 * scale
        h = num.shape[0] + den.shape[0] + rule_t + 2 * vgap
        out = np.zeros((h, width), dtype=np.uint8)
        out[:num.shape[0], (width - num.shape[1]) // 2:][:, :num.shape[1]] |= num
        rule_y = num.shape[0] + vgap
        out[rule_y:rule_y + rule_t, :] = 1
        out[rule_y + rule_t + vgap:, (width - den.shape[1]) // 2:][:, :den.shape[1]] |= den
        return out, rule_y + rule_t // 2 + FRACTION_AXIS * scale
    if kind in ("sup", "sub"):
        base, bb = formula_to_box(node[1], scale, rng)
        script, sb = formula_to_box(node[2], scale, rng)
        offset = -SUPERSCRIPT_RAISE * scale if kind == "sup" else SUBSCRIPT_DROP * scale
        above = max(bb, sb - offset)
        below = max(base.shape[0] - bb, script.shape[0] - sb + offset)
        out = np.zeros((above + below, base.shape[1] + script.shape[1] + scale), dtype=np.uint8)
        out[above - bb:above - bb + base.shape[0], :base.shape[1]] |= base
        sy = above - (sb - offset)
        out[sy:sy + script.shape[0], base.shape[1] + scale:] |= script
        return out, above
    raise ValueError(f"unknown formula node {kind!r}")


# ---------------------------------------------------------------------------
# Sample rendering
# ---------------------------------------------------------------------------

@dataclass
class SceneSpec:
    """Layout recipe for one full-image category."""

    category: str = "scene_full"
    canvas_range: tuple = ((224, 288), (224, 288))     # (w_lo, w_hi), (h_lo, h_hi)
    line_count: tuple = (3, 6)
    words_per_line: tuple = (1, 3)
    word_len: tuple = (2, 7)
    font_scale: tuple = (1, 3)
    rotation_range: tuple = (-10, 10)
    writing: str = "printed"
    iou_cap: float = 0.05
    margin: int = 3


def scene_spec_for(category, writing="printed"):
    if category == "document_full":
        return SceneSpec(category="document_full", canvas_range=((256, 320), (256, 320)),
                         line_count=(4, 8), words_per_line=(2, 4), font_scale=(1, 2),
                         rotation_range=(0, 0), writing=writing)
    return SceneSpec(category=category, writing=writing)


def rand_word(rng, lo=2, hi=7):
    n = int(rng.integers(lo, hi + 1))
    roll = rng.random()
    if roll < 0.55:
        charset = LOWER
    elif roll < 0.8:
        charset = UPPER
    else:
        charset = DIGITS
    return "".join(charset[int(rng.integers(len(charset)))] for _ in range(n))


def _boxes_overlap(a, b, margin):
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b
    return not (ax1 + margin <= bx0 or bx1 + margin <= ax0
                or ay1 + margin <= by0 or by1 + margin <= ay0)


def _rotate_mask(mask, theta_deg):
    """Nearest-neighbor mask rotation; returns (mask, forward matrix)."""
    mat, ow, oh = iops.rotation_with_expand(mask.shape[1], mask.shape[0], theta_deg)
    inv = np.linalg.inv(mat)
    gy, gx = np.mgrid[0:oh, 0:ow]
    pts = np.stack([gx, gy, np.ones_like(gx)], axis=-1) @ inv.T
    xs = np.round(pts[..., 0]).astype(np.int64)
    ys = np.round(pts[..., 1]).astype(np.int64)
    ok = (xs >= 0) & (xs < mask.shape[1]) & (ys >= 0) & (ys < mask.shape[0])
    out = np.zeros((oh, ow), dtype=np.uint8)
    out[ok] = mask[ys[ok], xs[ok]]
    return out, mat


def render_full_scene(spec, rng, sample_id="sample"):
    """One full image plus word- and line-level instances.

    Placement retries a bounded number of times; on failure the line is
    skipped, so images never contain overlapping instances.
    """
    (w_lo, w_hi), (h_lo, h_hi) = spec.canvas_range
    width = int(rng.integers(w_lo, w_hi + 1))
    height = int(rng.integers(h_lo, h_hi + 1))
    palette = DOC_PALETTE if spec.category == "document_full" else SCENE_PALETTE
    bg, fg = palette[int(rng.integers(len(palette)))]
    canvas = np.empty((height, width, 3), dtype=np.uint8)
    canvas[:] = bg

    words, lines, placed = [], [], []
    doc_y = int(rng.integers(8, 20))
    n_lines = int(rng.integers(spec.line_count[0], spec.line_count[1] + 1))
    for _ in range(n_lines):
        texts = [rand_word(rng, *spec.word_len)
                 for _ in range(int(rng.integers(spec.words_per_line[0], spec.words_per_line[1] + 1)))]
        scale = int(rng.integers(spec.font_scale[0], spec.font_scale[1] + 1))
        masks = [render_text_mask(t, scale, spec.writing, rng)[0] for t in texts]
        gap = 3 * scale
        line_h = max(m.shape[0] for m in masks)
        line_w = sum(m.shape[1] for m in masks) + gap * (len(masks) - 1)
        line_mask = np.zeros((line_h, line_w), dtype=np.uint8)
        word_boxes = []
        x = 0
        for m in masks:
            y = (line_h - m.shape[0]) // 2
            line_mask[y:y + m.shape[0], x:x + m.shape[1]] |= m
            word_boxes.append((x, y, x + m.shape[1], y + m.shape[0]))
            x += m.shape[1] + gap

        theta = 0.0
        mat = np.eye(3)
        if spec.rotation_range != (0, 0):
            theta = float(rng.uniform(*spec.rotation_range))
            if abs(theta) > 0.5:
                line_mask, mat = _rotate_mask(line_mask, theta)

        lh, lw = line_mask.shape
        if lw >= width - 2 * spec.margin or lh >= height - 2 * spec.margin:
            continue
        pos = None
        for _ in range(40):
            if spec.category == "document_full":
                px = int(rng.integers(spec.margin, max(spec.margin + 1, width - lw - spec.margin)))
                py = doc_y
                if py + lh + spec.margin >= height:
                    break
            else:
                px = int(rng.integers(spec.margin, width - lw - spec.margin))
                py = int(rng.integers(spec.margin, height - lh - spec.margin))
            cand = (px, py, px + lw, py + lh)
            if not any(_boxes_overlap(cand, p, spec.margin) for p in placed):
                pos = (px, py)
                break
        if pos is None:
            continue
        px, py = pos
        placed.append((px, py, px + lw, py + lh))
        if spec.category == "document_full":
            doc_y = py + lh + int(rng.integers(4, 12))
        region = canvas[py:py + lh, px:px + lw]
        region[line_mask.astype(bool)] = fg

        offset = np.array([px, py], dtype=np.float64)

        # polygon corners: original (unrotated) extents pushed through mat, then shifted
        def quad_for(x0, y0, x1, y1):
            pts = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=np.float64)
            return iops.transform_points(mat, pts) + offset

        src_w = sum(m.shape[1] for m in masks) + gap * (len(masks) - 1)
        src_h = line_h
        lines.append(TextInstance(quad_for(0, 0, src_w, src_h), " ".join(texts), "line"))
        for t, (x0, y0, x1, y1) in zip(texts, word_boxes):
            words.append(TextInstance(quad_for(x0, y0, x1, y1), t, "word"))

    ann = SampleAnnotation(sample_id, (width, height), spec.category, spec.writing,
                           words=words, lines=lines)
    return canvas.astype(np.float32) / 255.0, ann


def render_cropped(category, rng, writing=None, sample_id="crop"):
    """Single cropped sample; returns (image, transcription, writing)."""
    if category == "cropped_formula":
        ast = gen_formula(rng)
        text = formula_to_string(ast)
        mask, _ = formula_to_box(ast, scale=2, rng=rng)
        writing = "unspecified"
    elif category == "cropped_text":
        if writing is None:
            writing = "handwritten" if rng.random() < 0.5 else "printed"
        if rng.random() < 0.3:
            text = " ".join(rand_word(rng) for _ in range(int(rng.integers(2, 4))))
        else:
            text = rand_word(rng)
        mask, _ = render_text_mask(text, int(rng.integers(2, 4)), writing, rng)
    else:
        raise ValueError(f"render_cropped: unknown category {category!r}")
    if not text:
        raise ValueError("empty transcription")
    m = int(rng.integers(3, 9))
    h, w = mask.shape
    shade = int(rng.integers(225, 256))
    ink = int(rng.integers(0, 56))
    canvas = np.full((h + 2 * m, w + 2 * m, 3), shade, dtype=np.uint8)
    canvas[m:m + h, m:m + w][mask.astype(bool)] = ink
    return canvas.astype(np.float32) / 255.0, text, writing


# ---------------------------------------------------------------------------
# Augmentation
# ---------------------------------------------------------------------------

def _poly_inside(poly, x0, y0, x1, y1):
    return (poly[:, 0] >= x0).all() and (poly[:, 0] <= x1).all() \
        and (poly[:, 1] >= y0).all() and (poly[:, 1] <= y1).all()


def augment_full(image, annotation, rng, rotation=(-90, 90), scale=(0.7, 1.3),
                 crop_frac=(0.6, 1.0), jitter=0.15):
    """Instance-aware crop + rotation + isotropic scale + color jitter.

    Instances cut by the crop are dropped; a crop that would keep nothing
    is retried, then abandoned (identity crop). Polygon vertices ride the
    same transforms as the pixels.
    """
    img = np.asarray(image, dtype=np.float32)
    h, w = img.shape[:2]
    words, lines = annotation.words, annotation.lines

    for _ in range(10):
        cw = int(w * rng.uniform(*crop_frac))
        ch = int(h * rng.uniform(*crop_frac))
        cx = int(rng.integers(0, w - cw + 1))
        cy = int(rng.integers(0, h - ch + 1))
        kept_w = [t for t in words if _poly_inside(t.polygon, cx, cy, cx + cw, cy + ch)]
        kept_l = [t for t in lines if _poly_inside(t.polygon, cx, cy, cx + cw, cy + ch)]
        if kept_w or kept_l or not (words or lines):
            img = img[cy:cy + ch, cx:cx + cw]
            words = [TextInstance(t.polygon - [cx, cy], t.text, t.level) for t in kept_w]
            lines = [TextInstance(t.polygon - [cx, cy], t.text, t.level) for t in kept_l]
            h, w = ch, cw
            break

    theta = float(rng.uniform(*rotation))
    mat, ow, oh = iops.rotation_with_expand(w, h, theta)
    img = iops.warp_homography(img, mat, oh, ow, fill=float(img.mean()))
    words = [TextInstance(iops.transform_points(mat, t.polygon), t.text, t.level) for t in words]
    lines = [TextInstance(iops.transform_points(mat, t.polygon), t.text, t.level) for t in lines]
    h, w = oh, ow

    s = float(rng.uniform(*scale))
    nh, nw = max(8, round(h * s)), max(8, round(w * s))
    img = iops.resize_bilinear(img, nh, nw)
    sx, sy = nw / w, nh / h

    def rescale(t):
        p = t.polygon * [sx, sy]
        p[:, 0] = np.clip(p[:, 0], 0, nw)
        p[:, 1] = np.clip(p[:, 1], 0, nh)
        return TextInstance(p, t.text, t.level)

    words = [rescale(t) for t in words]
    lines = [rescale(t) for t in lines]
    img = iops.color_jitter(img, rng, jitter)
    out = SampleAnnotation(annotation.sample_id, (nw, nh), annotation.category,
                           annotation.writing, words=words, lines=lines,
                           image_path=annotation.image_path)
    return img, out


def augment_cropped(image, rng, long_side, max_perspective=0.1, max_rotation=15.0,
                    max_blur=1.5, max_noise=10.0 / 255.0):
    """Perspective/affine distortion, blur, noise, small rotation, then
    resize so the longer edge matches `long_side`."""
    img = np.asarray(image, dtype=np.float32)
    h, w = img.shape[:2]
    fill = float(img[0, 0].mean())

    dx = rng.uniform(-max_perspective, max_perspective, size=4) * w
    dy = rng.uniform(-max_perspective, max_perspective, size=4) * h
    src = np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)
    dst = src + np.stack([dx, dy], axis=1)
    dst -= dst.min(axis=0)
    ow, oh = max(4, int(dst[:, 0].max())), max(4, int(dst[:, 1].max()))
    if max_perspective > 0:
        img = iops.warp_homography(img, iops.homography_from_corners(src, dst), oh, ow, fill=fill)

    theta = float(rng.uniform(-max_rotation, max_rotation))
    if abs(theta) > 1e-6:
        mat, ow, oh = iops.rotation_with_expand(img.shape[1], img.shape[0], theta)
        img = iops.warp_homography(img, mat, oh, ow, fill=fill)

    img = iops.gaussian_blur(img, float(rng.uniform(0.0, max_blur)))
    img = iops.add_noise(img, rng, float(rng.uniform(0.0, max_noise)))
    img, _, _ = iops.resize_long_side(img, long_side)
    return np.clip(img, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Manifests
# ---------------------------------------------------------------------------

class ManifestError(ValueError):
    pass


def _instance_json(t):
    return {"polygon": [[round(float(x), 2), round(float(y), 2)] for x, y in t.polygon],
            "text": t.text}


def write_manifest(annotations, path):
    with open(path, "w") as f:
        for ann in annotations:
            rec = {
                "id": ann.sample_id,
                "image_path": ann.image_path,
                "width": ann.image_size[0],
                "height": ann.image_size[1],
                "category": ann.category,
                "writing": ann.writing,
                "words": [_instance_json(t) for t in ann.words],
                "lines": [_instance_json(t) for t in ann.lines],
            }
            f.write(json.dumps(rec) + "\n")
    return path


REQUIRED_KEYS = ("id", "image_path", "width", "height", "category", "writing", "words", "lines")


def read_manifest(path):
    """Parse and validate a manifest; raises ManifestError with the line
    number for malformed records and the record id for bad polygons."""
    out = []
    base = os.path.dirname(os.path.abspath(path))
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as e:
                raise ManifestError(f"{path}: line {lineno}: invalid JSON: {e}") from e
            missing = [k for k in REQUIRED_KEYS if k not in rec]
            if missing:
                raise ManifestError(f"{path}: line {lineno}: missing keys {missing}")
            w, h = rec["width"], rec["height"]
            words, lines = [], []
            for kind, bucket in (("words", words), ("lines", lines)):
                for item in rec[kind]:
                    poly = np.asarray(item["polygon"], dtype=np.float64)
                    if poly.ndim != 2 or poly.shape[1] != 2:
                        raise ManifestError(f"record {rec['id']!r}: bad polygon shape {poly.shape}")
                    if (poly[:, 0] < -0.51).any() or (poly[:, 0] > w + 0.51).any() \
                            or (poly[:, 1] < -0.51).any() or (poly[:, 1] > h + 0.51).any():
                        raise ManifestError(
                            f"record {rec['id']!r}: polygon outside {w}x{h} bounds")
                    bucket.append(TextInstance(np.clip(poly, [0, 0], [w, h]),
                                               item["text"], kind[:-1]))
            img_path = rec["image_path"]
            if not os.path.isabs(img_path):
                img_path = os.path.join(base, img_path)
            out.append(SampleAnnotation(rec["id"], (w, h), rec["category"], rec["writing"],
                                        words=words, lines=lines, image_path=img_path))
    return out


def validate_manifest(path):
    """Structural validation report: parse errors, missing image files."""
    report = {"records": 0, "errors": [], "missing_images": []}
    try:
        annotations = read_manifest(path)
    except ManifestError as e:
        report["errors"].append(str(e))
        return report
    report["records"] = len(annotations)
    for ann in annotations:
        if not os.path.exists(ann.image_path):
            report["missing_images"].append(ann.sample_id)
    return report


# ---------------------------------------------------------------------------
# Corpus generation
# ---------------------------------------------------------------------------

DEFAULT_COUNTS = {"scene_full": 400, "document_full": 150, "cropped_text": 500,
                  "cropped_formula": 250}


def _crop_annotation(sample_id, image, text, category, writing, image_path):
    h, w = image.shape[:2]
    quad = np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)
    level = "word" if " " not in text else "line"
    inst = TextInstance(quad, text, level)
    return SampleAnnotation(sample_id, (w, h), category, writing,
                            words=[inst] if level == "word" else [],
                            lines=[inst] if level == "line" else [],
                            image_path=image_path)


def generate_corpus(out_dir, counts=None, seed=0, manifest_name="manifest.jsonl",
                    handwritten_scene_frac=0.25):
    """Render a corpus into out_dir/images and write a manifest.

    Per-sample RNG streams are keyed by (seed, category, index), so any
    subset regenerates identically regardless of generation order.
    """
    counts = counts or DEFAULT_COUNTS
    img_dir = os.path.join(out_dir, "images")
    os.makedirs(img_dir, exist_ok=True)
    annotations = []
    for category, n in counts.items():
        for i in range(n):
            srng = R.split(seed, "sample", category, i)
            sample_id = f"{category}_{i:06d}"
            rel = os.path.join("images", sample_id + ".png")
            path = os.path.join(out_dir, rel)
            if category in ("scene_full", "document_full"):
                writing = "handwritten" if srng.random() < handwritten_scene_frac else "printed"
                spec = scene_spec_for(category, writing)
                img, ann = render_full_scene(spec, srng, sample_id)
                ann.image_path = rel
            else:
                img, text, writing = render_cropped(category, srng, sample_id=sample_id)
                ann = _crop_annotation(sample_id, img, text, category, writing, rel)
            iops.save_image(img, path)
            annotations.append(ann)
    manifest_path = os.path.join(out_dir, manifest_name)
    write_manifest(annotations, manifest_path)
    return manifest_path
