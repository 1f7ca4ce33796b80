"""Binary P6 pixmap rendering of attractors.

Two modes: ``cylinders`` fills the depth-n images of a seed polygon,
``chaos`` plots chaos-game sample points.  The pixel path is plain float
arithmetic plus floor rounding, so identical inputs give bit-identical
images; P6 needs no image library and hashes cleanly in golden tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import UnsupportedDepth
from .ifs import BernoulliWeights, IfsSystem, Polygon, compose_word

CYLINDER_WORD_CAP = 200_000

# per-first-symbol fill colors, cycled when the alphabet is larger
PALETTE = (
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (214, 39, 40),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (127, 127, 127),
)
BACKGROUND = (255, 255, 255)


@dataclass(frozen=True)
class RenderSpec:
    """Raster geometry and drawing mode."""

    width: int = 512
    height: int = 512
    viewport: Tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)  # x0 y0 x1 y1
    mode: str = "cylinders"
    depth: int = 5  # cylinders mode
    count: int = 100_000  # chaos mode
    seed: int = 0

    def __post_init__(self):
        if not (16 <= self.width <= 8192 and 16 <= self.height <= 8192):
            raise ValueError("width and height must lie in [16, 8192]")
        x0, y0, x1, y1 = self.viewport
        if not (x1 > x0 and y1 > y0):
            raise ValueError("viewport must be non-degenerate")
        if self.mode not in ("cylinders", "chaos"):
            raise ValueError("mode must be 'cylinders' or 'chaos'")


def default_viewport(polygon: Optional[Polygon], sys: IfsSystem, pad: float = 0.05):
    if polygon is not None:
        x0, y0, x1, y1 = polygon.bounding_box()
    else:
        r = sys.bounding_radius
        x0, y0, x1, y1 = -r, -r, r, r
    dx, dy = (x1 - x0) * pad, (y1 - y0) * pad
    return (x0 - dx, y0 - dy, x1 + dx, y1 + dy)


def _pixel_grid(spec: RenderSpec):
    img = np.empty((spec.height, spec.width, 3), dtype=np.uint8)
    img[:, :] = BACKGROUND
    return img


def _fill_convex(img, spec: RenderSpec, vertices, color):
    """Scanline fill of a convex polygon given in plane coordinates."""
    x0, y0, x1, y1 = spec.viewport
    w, h = spec.width, spec.height
    # plane -> pixel coordinates (column float, row float)
    cols = [(vx - x0) / (x1 - x0) * w for vx, vy in vertices]
    rows = [(y1 - vy) / (y1 - y0) * h for vx, vy in vertices]
    r_lo = max(0, int(math.floor(min(rows))))
    r_hi = min(h - 1, int(math.ceil(max(rows))))
    n = len(vertices)
    for r in range(r_lo, r_hi + 1):
        yc = r + 0.5
        xs = []
        for i in range(n):
            ra, ca = rows[i], cols[i]
            rb, cb = rows[(i + 1) % n], cols[(i + 1) % n]
            if (ra <= yc < rb) or (rb <= yc < ra):
                tpar = (yc - ra) / (rb - ra)
                xs.append(ca + tpar * (cb - ca))
        if len(xs) < 2:
            continue
        lo, hi = min(xs), max(xs)
        c_lo = max(0, int(math.floor(lo + 0.5)))
        c_hi = min(w - 1, int(math.floor(hi - 0.5)))
        if c_hi >= c_lo:
            img[r, c_lo : c_hi + 1] = color
        elif hi - lo > 0:  # thinner than a pixel: mark the center column
            c = int(math.floor((lo + hi) / 2))
            if 0 <= c < w:
                img[r, c] = color


def render_cylinders(
    sys: IfsSystem, spec: RenderSpec, polygon: Optional[Polygon] = None
) -> np.ndarray:
    """Fill the depth-n images of the seed polygon, colored by first symbol."""
    if spec.depth < 1:
        raise ValueError("cylinders mode needs depth >= 1")
    if sys.n ** spec.depth > CYLINDER_WORD_CAP:
        raise UnsupportedDepth(
            f"{sys.n}^{spec.depth} cylinder polygons exceed cap {CYLINDER_WORD_CAP}"
        )
    if polygon is None:
        r = sys.bounding_radius
        polygon = Polygon(((-r, -r), (r, -r), (r, r), (-r, r)))
    polygon = polygon.to_float()
    img = _pixel_grid(spec)
    float_sys = IfsSystem(tuple(f.to_float() for f in sys.maps))
    words = [(i,) for i in range(1, sys.n + 1)]
    for _ in range(spec.depth - 1):
        words = [w + (i,) for w in words for i in range(1, sys.n + 1)]
    for w in words:
        poly = polygon.transform(compose_word(float_sys, w))
        _fill_convex(img, spec, poly.vertices, PALETTE[(w[0] - 1) % len(PALETTE)])
    return img


def render_chaos(
    sys: IfsSystem,
    spec: RenderSpec,
    weights: Optional[BernoulliWeights] = None,
    burn_in: int = 100,
) -> np.ndarray:
    """Chaos game: iterate randomly chosen maps and plot the orbit."""
    if weights is None:
        weights = BernoulliWeights.uniform(sys.n)
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    syms = rng.choice(sys.n, size=spec.count + burn_in, p=weights.as_array)
    img = _pixel_grid(spec)
    x0, y0, x1, y1 = spec.viewport
    w, h = spec.width, spec.height
    fx, fy = (float(c) for c in sys.maps[0].fixed_point())
    px, py = fx, fy
    A = sys.linear_array
    t = sys.translation_array
    for k, s in enumerate(syms):
        px, py = (
            A[s, 0, 0] * px + A[s, 0, 1] * py + t[s, 0],
            A[s, 1, 0] * px + A[s, 1, 1] * py + t[s, 1],
        )
        if k < burn_in:
            continue
        col = int((px - x0) / (x1 - x0) * w)
        row = int((y1 - py) / (y1 - y0) * h)
        if 0 <= col < w and 0 <= row < h:
            img[row, col] = PALETTE[int(s) % len(PALETTE)]
    return img


def write_p6(path: str, img: np.ndarray) -> None:
    h, w, _ = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def render_to_file(
    sys: IfsSystem,
    spec: RenderSpec,
    path: str,
    polygon: Optional[Polygon] = None,
    weights: Optional[BernoulliWeights] = None,
) -> None:
    if spec.mode == "cylinders":
        img = render_cylinders(sys, spec, polygon=polygon)
    else:
        img = render_chaos(sys, spec, weights=weights)
    write_p6(path, img)
