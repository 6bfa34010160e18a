"""Task framing: scenario/category/writing/granularity, ground-truth
serialization, and the training-time prompt sampling rules."""

from dataclasses import dataclass, field

import numpy as np

from .vocab import Vocab, BOS, EOS, SEP

SCENARIOS = ["RAT", "PPR", "BPR"]
CATEGORIES = ["scene_full", "document_full", "cropped_text", "cropped_formula", "unspecified"]
WRITINGS = ["printed", "handwritten", "unspecified"]
GRANULARITIES = ["word", "line", "unspecified"]

FULL_CATEGORIES = ("scene_full", "document_full")
CROPPED_CATEGORIES = ("cropped_text", "cropped_formula")


@dataclass(frozen=True)
class TaskSpec:
    """One decoding query's categorical framing; fields may be 'unspecified'."""

    scenario: str = "RAT"
    category: str = "unspecified"
    writing: str = "unspecified"
    granularity: str = "unspecified"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if self.writing not in WRITINGS:
            raise ValueError(f"unknown writing type {self.writing!r}")
        if self.granularity not in GRANULARITIES:
            raise ValueError(f"unknown granularity {self.granularity!r}")
        if self.category in CROPPED_CATEGORIES:
            if self.scenario != "RAT":
                raise ValueError(f"cropped categories support only RAT, got {self.scenario}")
            if self.granularity != "unspecified":
                raise ValueError("cropped categories carry granularity 'unspecified'")

    @property
    def category_index(self):
        return CATEGORIES.index(self.category)

    @property
    def writing_index(self):
        return WRITINGS.index(self.writing)

    @property
    def granularity_index(self):
        return GRANULARITIES.index(self.granularity)


def _segments_intersect(p1, p2, p3, p4):
    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    d1 = cross(p3, p4, p1)
    d2 = cross(p3, p4, p2)
    d3 = cross(p1, p2, p3)
    d4 = cross(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def polygon_is_simple(polygon):
    """True when no two non-adjacent edges properly intersect."""
    pts = np.asarray(polygon, dtype=np.float64)
    n = len(pts)
    for i in range(n):
        a1, a2 = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_intersect(a1, a2, pts[j], pts[(j + 1) % n]):
                return False
    return True


@dataclass
class TextInstance:
    """One annotated text entity: polygon, transcription, granularity level."""

    polygon: np.ndarray          # [N, 2] float (x, y), N >= 3
    text: str
    level: str                   # "word" | "line"

    def __post_init__(self):
        self.polygon = np.asarray(self.polygon, dtype=np.float64)
        if self.polygon.ndim != 2 or self.polygon.shape[0] < 3 or self.polygon.shape[1] != 2:
            raise ValueError(f"polygon must be [N>=3, 2], got {self.polygon.shape}")
        if not self.text:
            raise ValueError("transcription must be nonempty")
        if self.level not in ("word", "line"):
            raise ValueError(f"level must be word|line, got {self.level!r}")
        if self.level == "word" and any(c.isspace() for c in self.text):
            raise ValueError(f"word-level instance contains whitespace: {self.text!r}")
        if not polygon_is_simple(self.polygon):
            raise ValueError("polygon is self-intersecting")

    def bbox(self):
        """(x0, y0, x1, y1) axis-aligned bounds."""
        return (float(self.polygon[:, 0].min()), float(self.polygon[:, 1].min()),
                float(self.polygon[:, 0].max()), float(self.polygon[:, 1].max()))

    def center(self):
        x0, y0, x1, y1 = self.bbox()
        return ((x0 + x1) / 2, (y0 + y1) / 2)

    def centroid(self):
        """Area-weighted polygon centroid (shoelace); falls back to the
        vertex mean for degenerate (zero-area) polygons."""
        p = self.polygon
        x, y = p[:, 0], p[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        area = cross.sum() / 2.0
        if abs(area) < 1e-12:
            return (float(x.mean()), float(y.mean()))
        cx = ((x + xn) * cross).sum() / (6.0 * area)
        cy = ((y + yn) * cross).sum() / (6.0 * area)
        return (float(cx), float(cy))

    def contains(self, x, y):
        """Even-odd point-in-polygon test."""
        p = self.polygon
        inside = False
        j = len(p) - 1
        for i in range(len(p)):
            xi, yi = p[i]
            xj, yj = p[j]
            if (yi > y) != (yj > y) and x < (xj - xi) * (y - yi) / (yj - yi) + xi:
                inside = not inside
            j = i
        return inside


@dataclass
class SampleAnnotation:
    """Per-image annotation; cropped samples carry one crop-covering instance."""

    sample_id: str
    image_size: tuple            # (W, H) pixels
    category: str
    writing: str
    words: list = field(default_factory=list)
    lines: list = field(default_factory=list)
    image_path: str = ""

    def instances(self, granularity):
        if granularity == "word":
            return self.words
        if granularity == "line":
            return self.lines
        return self.words or self.lines

    def available_granularities(self):
        out = []
        if self.words:
            out.append("word")
        if self.lines:
            out.append("line")
        return out

    @property
    def is_full(self):
        return self.category in FULL_CATEGORIES


def reading_order(instances):
    """Total order for serialization: center y, ties by center x, then text."""
    return sorted(instances, key=lambda t: (round(t.center()[1], 6), round(t.center()[0], 6), t.text))


def build_rat_target(instances, granularity, vocab=None):
    """Serialize instances (reading order, SEP-joined) into token ids.

    Returns (ids, unknown_count); unknown units become UNK and are counted.
    """
    vocab = vocab or Vocab.default()
    ids = [BOS]
    unknown = 0
    for i, inst in enumerate(reading_order(instances)):
        if i:
            ids.append(SEP)
        body, unk = vocab.tokenize(inst.text, add_markers=False)
        ids.extend(body)
        unknown += unk
    ids.append(EOS)
    return ids, unknown


def tokenize(text, vocab=None, add_markers=True):
    return (vocab or Vocab.default()).tokenize(text, add_markers=add_markers)


def detokenize(ids, vocab=None, sep_joiner="\n"):
    return (vocab or Vocab.default()).detokenize(ids, sep_joiner=sep_joiner)


def sample_point_prompt(instance, rng):
    """Uniform point over the instance's axis-aligned bounding box."""
    x0, y0, x1, y1 = instance.bbox()
    if x1 <= x0 and y1 <= y0:
        return (x0, y0)
    return (float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))


def perturb_box(quad, rng, image_size, noise_frac=0.1, noise_cap=20.0):
    """Jitter each corner by uniform noise bounded by min(frac*extent, cap),
    per axis, then clamp into the image."""
    q = np.asarray(quad, dtype=np.float64)
    if q.shape != (4, 2):
        raise ValueError(f"quad must be [4, 2], got {q.shape}")
    w_extent = q[:, 0].max() - q[:, 0].min()
    h_extent = q[:, 1].max() - q[:, 1].min()
    mx = min(noise_frac * w_extent, noise_cap)
    my = min(noise_frac * h_extent, noise_cap)
    out = q.copy()
    out[:, 0] += rng.uniform(-mx, mx, size=4)
    out[:, 1] += rng.uniform(-my, my, size=4)
    out[:, 0] = np.clip(out[:, 0], 0, image_size[0])
    out[:, 1] = np.clip(out[:, 1], 0, image_size[1])
    return out


def full_image_quad(image_size):
    w, h = image_size
    return np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)


def bbox_quad(instance):
    """Axis-aligned rectangle corners in TL, TR, BR, BL order."""
    x0, y0, x1, y1 = instance.bbox()
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=np.float64)


def instance_for_point(annotation, point, granularity):
    """The instance a point prompt refers to: containment first, then
    nearest center; ties resolved by reading order."""
    pool = annotation.instances(granularity)
    if not pool:
        return None
    ordered = reading_order(pool)
    for inst in ordered:
        if inst.contains(*point):
            return inst
    dists = [(inst.center()[0] - point[0]) ** 2 + (inst.center()[1] - point[1]) ** 2
             for inst in ordered]
    return ordered[int(np.argmin(dists))]


@dataclass
class TrainQuery:
    """One decoding query sampled for training."""

    task: TaskSpec
    spatial: tuple               # None | ("point", (x, y)) | ("quad", [4,2] array)
    target_ids: list


def _maybe_drop(value, unspecified, rng, p):
    if p > 0 and rng.random() < p:
        return unspecified
    return value


def select_training_prompts(annotation, rng, cap=8, vocab=None, prompt_dropout=0.0):
    """Sample the per-image query set: one RAT query plus up to `cap`
    point/box queries over distinct instances.

    The RAT spatial prompt alternates between the origin point and the
    full-image box (both conventions are exercised); spatial queries pick
    point vs box 50/50 and granularity is drawn at random when both word
    and line annotations exist.
    """
    vocab = vocab or Vocab.default()
    avail = annotation.available_granularities()
    queries = []

    def fields(granularity):
        return dict(
            category=_maybe_drop(annotation.category, "unspecified", rng, prompt_dropout),
            writing=_maybe_drop(annotation.writing, "unspecified", rng, prompt_dropout),
            granularity=_maybe_drop(granularity, "unspecified", rng, prompt_dropout),
        )

    # image-level RAT query
    rat_gran = str(rng.choice(avail)) if avail else "word"
    rat_instances = annotation.instances(rat_gran)
    rat_ids, _ = build_rat_target(rat_instances, rat_gran, vocab)
    if rng.random() < 0.5:
        spatial = ("point", (0.0, 0.0))
    else:
        spatial = ("quad", full_image_quad(annotation.image_size))
    queries.append(TrainQuery(TaskSpec(scenario="RAT", **fields(rat_gran)), spatial, rat_ids))

    if not avail:
        return queries

    # per-instance point/box queries, no instance repeated
    remaining = {g: list(annotation.instances(g)) for g in avail}
    total = sum(len(v) for v in remaining.values())
    for _ in range(min(cap, total)):
        open_grans = [g for g in avail if remaining[g]]
        g = str(rng.choice(open_grans))
        pool = remaining[g]
        inst = pool.pop(int(rng.integers(len(pool))))
        ids, _ = vocab.tokenize(inst.text)
        if rng.random() < 0.5:
            point = sample_point_prompt(inst, rng)
            target = instance_for_point(annotation, point, g) or inst
            if target is not inst:
                ids, _ = vocab.tokenize(target.text)
            queries.append(TrainQuery(TaskSpec(scenario="PPR", **fields(g)), ("point", point), ids))
        else:
            quad = perturb_box(bbox_quad(inst), rng, annotation.image_size)
            queries.append(TrainQuery(TaskSpec(scenario="BPR", **fields(g)), ("quad", quad), ids))
    return queries


def default_inference_prompts(scenario, annotation=None, image_size=None, granularity="word"):
    """Per-scenario evaluation prompts.

    RAT needs only the image size and yields one full-image box query;
    PPR/BPR need annotations and yield one query per instance, paired with
    that instance as ground truth.
    """
    if scenario == "RAT":
        size = image_size or (annotation.image_size if annotation else None)
        if size is None:
            raise ValueError("RAT prompts need an image size")
        return [(None, ("quad", full_image_quad(size)))]
    if annotation is None:
        raise ValueError(f"{scenario} requires annotations")
    pool = annotation.instances(granularity)
    if not pool:
        raise ValueError(f"{scenario} requires annotations at granularity {granularity!r}")
    out = []
    for inst in reading_order(pool):
        if scenario == "PPR":
            out.append((inst, ("point", inst.centroid())))
        elif scenario == "BPR":
            out.append((inst, ("quad", bbox_quad(inst))))
        else:
            raise ValueError(f"unknown scenario {scenario!r}")
    return out
