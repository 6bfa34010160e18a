"""Image resampling and photometric helpers (float32 images in [0,1])."""

import math

import numpy as np


def resize_bilinear(img, out_h, out_w):
    img = np.asarray(img, dtype=np.float32)
    h, w = img.shape[:2]
    if (out_h, out_w) == (h, w):
        return img.copy()
    ys = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    ys = np.clip(ys, 0, h - 1)
    xs = np.clip(xs, 0, w - 1)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (ys - y0).astype(np.float32)[:, None, None]
    wx = (xs - x0).astype(np.float32)[None, :, None]
    top = img[y0][:, x0] * (1 - wx) + img[y0][:, x1] * wx
    bot = img[y1][:, x0] * (1 - wx) + img[y1][:, x1] * wx
    return top * (1 - wy) + bot * wy


def resize_long_side(img, target):
    """Resize so the longer edge equals `target` (aspect preserved).

    Returns (image, sx, sy): the per-axis coordinate scale factors.
    """
    h, w = img.shape[:2]
    long_side = max(h, w)
    if long_side == target:
        return np.asarray(img, dtype=np.float32), 1.0, 1.0
    s = target / long_side
    oh, ow = max(1, round(h * s)), max(1, round(w * s))
    return resize_bilinear(img, oh, ow), ow / w, oh / h


def _sample_bilinear(img, xs, ys, fill):
    h, w = img.shape[:2]
    inside = (xs >= -0.5) & (xs <= w - 0.5) & (ys >= -0.5) & (ys <= h - 0.5)
    xc = np.clip(xs, 0, w - 1)
    yc = np.clip(ys, 0, h - 1)
    x0 = np.floor(xc).astype(np.int64)
    y0 = np.floor(yc).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (xc - x0).astype(np.float32)[..., None]
    fy = (yc - y0).astype(np.float32)[..., None]
    out = (img[y0, x0] * (1 - fx) * (1 - fy) + img[y0, x1] * fx * (1 - fy)
           + img[y1, x0] * (1 - fx) * fy + img[y1, x1] * fx * fy)
    out[~inside] = fill
    return out.astype(np.float32)


def warp_homography(img, hmat, out_h, out_w, fill=1.0):
    """Sample `img` through the inverse of forward homography `hmat`."""
    inv = np.linalg.inv(hmat)
    gy, gx = np.mgrid[0:out_h, 0:out_w]
    ones = np.ones_like(gx)
    pts = np.stack([gx, gy, ones], axis=-1).astype(np.float64) @ inv.T
    xs = pts[..., 0] / pts[..., 2]
    ys = pts[..., 1] / pts[..., 2]
    return _sample_bilinear(img, xs, ys, fill)


def transform_points(mat, pts):
    """Apply a 3x3 homography to [N, 2] points."""
    p = np.asarray(pts, dtype=np.float64)
    h = np.concatenate([p, np.ones((len(p), 1))], axis=1) @ mat.T
    return h[:, :2] / h[:, 2:3]


def rotation_with_expand(w, h, theta_deg):
    """Forward affine rotating about the center and shifting into a canvas
    that contains the whole rotated image. Returns (matrix, out_w, out_h)."""
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    cx, cy = w / 2.0, h / 2.0
    corners = np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)
    rot = np.array([[c, -s], [s, c]])
    moved = (corners - [cx, cy]) @ rot.T + [cx, cy]
    minx, miny = moved.min(axis=0)
    maxx, maxy = moved.max(axis=0)
    out_w = max(1, int(math.ceil(maxx - minx)))
    out_h = max(1, int(math.ceil(maxy - miny)))
    mat = np.array([
        [c, -s, cx - c * cx + s * cy - minx],
        [s, c, cy - s * cx - c * cy - miny],
        [0, 0, 1.0],
    ])
    return mat, out_w, out_h


def homography_from_corners(src, dst):
    """3x3 map sending 4 src corners onto 4 dst corners."""
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i, ((x, y), (u, v)) in enumerate(zip(src, dst)):
        a[2 * i] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        a[2 * i + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        b[2 * i] = u
        b[2 * i + 1] = v
    coeffs = np.linalg.solve(a, b)
    return np.append(coeffs, 1.0).reshape(3, 3)


def gaussian_blur(img, sigma):
    if sigma <= 0:
        return np.asarray(img, dtype=np.float32)
    r = int(math.ceil(3 * sigma))
    xs = np.arange(-r, r + 1)
    k = np.exp(-0.5 * (xs / sigma) ** 2).astype(np.float32)
    k /= k.sum()
    out = np.asarray(img, dtype=np.float32)
    pad = np.pad(out, ((r, r), (0, 0), (0, 0)), mode="edge")
    out = sum(k[i] * pad[i:i + out.shape[0]] for i in range(2 * r + 1))
    pad = np.pad(out, ((0, 0), (r, r), (0, 0)), mode="edge")
    out = sum(k[i] * pad[:, i:i + out.shape[1]] for i in range(2 * r + 1))
    return out.astype(np.float32)


def color_jitter(img, rng, strength=0.2):
    scale = rng.uniform(1 - strength, 1 + strength, size=3).astype(np.float32)
    shift = rng.uniform(-strength / 2, strength / 2, size=3).astype(np.float32)
    return np.clip(img * scale + shift, 0.0, 1.0).astype(np.float32)


def add_noise(img, rng, sigma):
    if sigma <= 0:
        return np.asarray(img, dtype=np.float32)
    noise = rng.normal(0.0, sigma, size=img.shape).astype(np.float32)
    return np.clip(img + noise, 0.0, 1.0).astype(np.float32)


def load_image(path):
    """PNG/JPEG file -> float32 [H, W, 3] in [0,1]."""
    from PIL import Image
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32)
    return arr / 255.0


def save_image(img, path):
    """float32 [H, W, 3] in [0,1] -> 8-bit RGB PNG."""
    from PIL import Image
    arr = np.clip(np.asarray(img) * 255.0, 0, 255).astype(np.uint8)
    Image.fromarray(arr, "RGB").save(path)
