"""IFS data model: affine maps, words, the natural projection, measure
sampling, the strong-separation checker, and the config file format.

Geometry predicates run exactly when all inputs are rational (the parser
keeps every number as a ``Fraction``), so touching configurations are
classified as separation failures rather than round-off noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import BadSymbol, NonConvexPolygon, ParseError
from .linalg2 import Mat2, operator_norm

Vec2 = tuple  # (x, y) pairs of float or Fraction


# ---------------------------------------------------------------------------
# Affine maps and systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineMap:
    """f(x) = A x + t with A contracting and nonsingular."""

    linear: Mat2
    translation: Vec2

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap(Mat2.identity(), (0.0, 0.0))

    def apply(self, p: Vec2) -> Vec2:
        x, y = self.linear.apply(p)
        return (x + self.translation[0], y + self.translation[1])

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        lin = self.linear @ other.linear
        tx, ty = self.linear.apply(other.translation)
        return AffineMap(lin, (tx + self.translation[0], ty + self.translation[1]))

    def fixed_point(self) -> Vec2:
        """Solve (I - A) x = t; unique since A is contracting."""
        a = self.linear
        one = Fraction(1) if a.is_rational() else 1.0
        m = Mat2(one - a.a11, -a.a12, -a.a21, one - a.a22)
        return m.inverse().apply(self.translation)

    def to_float(self) -> "AffineMap":
        return AffineMap(
            self.linear.to_float(),
            (float(self.translation[0]), float(self.translation[1])),
        )


@dataclass(frozen=True)
class IfsSystem:
    """Ordered list of affine contractions; symbols are 1..N."""

    maps: tuple
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) < 1:
            raise ValueError("an IFS needs at least one map")
        for k, f in enumerate(self.maps):
            d = abs(float(f.linear.det))
            if d == 0.0:
                raise ValueError(f"map {k + 1} is singular")
            if operator_norm(f.linear) >= 1.0:
                raise ValueError(f"map {k + 1} is not a contraction")

    @property
    def n(self) -> int:
        return len(self.maps)

    def map_for(self, symbol: int) -> AffineMap:
        if not 1 <= symbol <= self.n:
            raise BadSymbol(f"symbol {symbol} outside 1..{self.n}")
        return self.maps[symbol - 1]

    def is_triangular(self) -> bool:
        return all(f.linear.is_lower_triangular() for f in self.maps)

    def is_rational(self) -> bool:
        return all(
            f.linear.is_rational()
            and all(isinstance(c, (Fraction, int)) for c in f.translation)
            for f in self.maps
        )

    @cached_property
    def linear_array(self) -> np.ndarray:
        return np.array(
            [[[f.linear.a11, f.linear.a12], [f.linear.a21, f.linear.a22]] for f in self.maps],
            dtype=float,
        )

    @cached_property
    def translation_array(self) -> np.ndarray:
        return np.array([f.translation for f in self.maps], dtype=float)

    @cached_property
    def max_norm(self) -> float:
        return max(operator_norm(f.linear) for f in self.maps)

    @cached_property
    def bounding_radius(self) -> float:
        """Radius R with |f_i(x)| <= R whenever |x| <= R; covers the attractor."""
        tmax = max(math.hypot(*map(float, f.translation)) for f in self.maps)
        return tmax / (1.0 - self.max_norm) if tmax > 0 else 1.0


@dataclass(frozen=True)
class BernoulliWeights:
    """Strictly positive probability vector over the symbols."""

    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(self.p))
        if any(float(x) <= 0 for x in self.p):
            raise ValueError("weights must be strictly positive")
        if abs(sum(float(x) for x in self.p) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    @staticmethod
    def uniform(n: int) -> "BernoulliWeights":
        return BernoulliWeights((Fraction(1, n),) * n)

    def __len__(self):
        return len(self.p)

    @cached_property
    def as_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.p])


def validate_word(sys: IfsSystem, word: Sequence[int]) -> None:
    for s in word:
        if not 1 <= s <= sys.n:
            raise BadSymbol(f"symbol {s} outside 1..{sys.n}")


def compose_word(sys: IfsSystem, word: Sequence[int]) -> AffineMap:
    """f_w = f_{w_1} o ... o f_{w_n}; the empty word gives the identity.

    Folds the system maps directly (no identity factor) so rational systems
    compose exactly.
    """
    validate_word(sys, word)
    if not word:
        return AffineMap.identity()
    out = sys.maps[word[-1] - 1]
    for s in reversed(word[:-1]):
        out = sys.maps[s - 1].compose(out)
    return out


class ProjectedPoint(NamedTuple):
    point: Vec2
    error_bound: float  # distance to the true infinite-word limit


def word_log_norm(sys: IfsSystem, word: Sequence[int]) -> float:
    """log alpha1 of the composed product A_{w_1} ... A_{w_n}.

    Accumulated in float with periodic rescaling so arbitrarily deep words
    never underflow.
    """
    validate_word(sys, word)
    prod = Mat2.identity()
    logscale = 0.0
    for k, s in enumerate(word):
        prod = prod @ sys.maps[s - 1].linear.to_float()
        if (k + 1) % 32 == 0:
            m = max(abs(e) for e in prod.entries())
            prod = prod.scaled(1.0 / m)
            logscale += math.log(m)
    return logscale + math.log(operator_norm(prod))


def natural_projection(sys: IfsSystem, word: Sequence[int], seed: Vec2 = (0.0, 0.0)) -> ProjectedPoint:
    """Finite truncation f_w(seed) of the natural projection.

    The reported bound is alpha1(A_w) * diam of the invariant disk, which
    dominates the distance to the limit point of any extension of ``word``.
    """
    if len(word) < 1:
        raise ValueError("natural_projection needs a non-empty word")
    validate_word(sys, word)
    x, y = float(seed[0]), float(seed[1])
    for s in reversed(word):
        f = sys.maps[s - 1]
        a = f.linear
        nx = float(a.a11) * x + float(a.a12) * y + float(f.translation[0])
        ny = float(a.a21) * x + float(a.a22) * y + float(f.translation[1])
        x, y = nx, ny
    bound = math.exp(word_log_norm(sys, word)) * 2.0 * sys.bounding_radius
    return ProjectedPoint((x, y), bound)


def sample_measure(
    sys: IfsSystem,
    weights: BernoulliWeights,
    depth: int,
    count: int,
    rng_seed: int,
    seed_point: Vec2 = (0.0, 0.0),
) -> np.ndarray:
    """``count`` draws of f_w(seed_point) with w ~ weights^depth, as (count, 2).

    Philox is counter-based, so the stream is reproducible bit-for-bit and can
    be partitioned by sample index without changing values.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    if len(weights) != sys.n:
        raise ValueError("weights length does not match the system")
    rng = np.random.Generator(np.random.Philox(key=rng_seed))
    syms = rng.choice(sys.n, size=(count, depth), p=weights.as_array)
    A = sys.linear_array
    t = sys.translation_array
    a11, a12, a21, a22 = A[:, 0, 0], A[:, 0, 1], A[:, 1, 0], A[:, 1, 1]
    tx, ty = t[:, 0], t[:, 1]
    x = np.full(count, float(seed_point[0]))
    y = np.full(count, float(seed_point[1]))
    for k in range(depth - 1, -1, -1):
        i = syms[:, k]
        x, y = a11[i] * x + a12[i] * y + tx[i], a21[i] * x + a22[i] * y + ty[i]
    return np.column_stack([x, y])


# ---------------------------------------------------------------------------
# Convex polygons and the strong separation condition
# ---------------------------------------------------------------------------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Polygon:
    """Convex polygon; vertices are canonicalized to counterclockwise order."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(v) for v in self.vertices)
        if len(verts) < 3:
            raise NonConvexPolygon("polygon needs at least 3 vertices")
        area2 = sum(
            verts[i][0] * verts[(i + 1) % len(verts)][1]
            - verts[(i + 1) % len(verts)][0] * verts[i][1]
            for i in range(len(verts))
        )
        if area2 == 0:
            raise NonConvexPolygon("polygon is degenerate")
        if area2 < 0:
            verts = tuple(reversed(verts))
        n = len(verts)
        for i in range(n):
            c = _cross(verts[i], verts[(i + 1) % n], verts[(i + 2) % n])
            if c < 0:
                raise NonConvexPolygon(f"reflex corner at vertex {(i + 1) % n}")
        object.__setattr__(self, "vertices", verts)

    def __len__(self):
        return len(self.vertices)

    def edges(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def is_rational(self) -> bool:
        return all(
            isinstance(c, (Fraction, int)) for v in self.vertices for c in v
        )

    def centroid(self) -> Vec2:
        n = len(self.vertices)
        sx = sum(v[0] for v in self.vertices)
        sy = sum(v[1] for v in self.vertices)
        return (sx / n, sy / n)

    def to_float(self) -> "Polygon":
        return Polygon(tuple((float(x), float(y)) for x, y in self.vertices))

    def transform(self, f: AffineMap) -> "Polygon":
        return Polygon(tuple(f.apply(v) for v in self.vertices))

    def bounding_box(self):
        xs = [float(v[0]) for v in self.vertices]
        ys = [float(v[1]) for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


def _project_interval(poly: Polygon, axis):
    dots = [v[0] * axis[0] + v[1] * axis[1] for v in poly.vertices]
    return min(dots), max(dots)


def polygons_disjoint(p: Polygon, q: Polygon) -> bool:
    """Separating axis test over the edge normals of both polygons."""
    for poly in (p, q):
        for (a, b) in poly.edges():
            axis = (b[1] - a[1], a[0] - b[0])  # outward-ish normal, unnormalized
            pmin, pmax = _project_interval(p, axis)
            qmin, qmax = _project_interval(q, axis)
            if pmax < qmin or qmax < pmin:
                return True
    return False


def _point_segment_dist2(pt, a, b):
    """Squared distance point-to-segment; exact on rational input."""
    abx, aby = b[0] - a[0], b[1] - a[1]
    apx, apy = pt[0] - a[0], pt[1] - a[1]
    denom = abx * abx + aby * aby
    if denom == 0:
        return apx * apx + apy * apy
    tnum = apx * abx + apy * aby
    if tnum <= 0:
        return apx * apx + apy * apy
    if tnum >= denom:
        dx, dy = pt[0] - b[0], pt[1] - b[1]
        return dx * dx + dy * dy
    # foot inside the segment: dist^2 = cross^2 / |ab|^2
    cr = apx * aby - apy * abx
    return cr * cr / denom


def polygon_distance2(p: Polygon, q: Polygon):
    """Squared Euclidean distance between convex polygons (0 if they meet)."""
    if not polygons_disjoint(p, q):
        return 0
    best = None
    for poly_a, poly_b in ((p, q), (q, p)):
        for v in poly_a.vertices:
            for (a, b) in poly_b.edges():
                d2 = _point_segment_dist2(v, a, b)
                if best is None or d2 < best:
                    best = d2
    return best


@dataclass(frozen=True)
class SscReport:
    """Outcome of the strong separation check against an open polygon."""

    holds: bool
    kappa: float  # min pairwise distance between image polygons
    margin: float  # min distance from image polygons to the boundary of O
    witness: Optional[str] = None

    def __str__(self):
        head = "holds" if self.holds else "fails"
        s = f"SSC {head}: kappa={self.kappa:.6g} margin={self.margin:.6g}"
        if self.witness:
            s += f" ({self.witness})"
        return s


def check_ssc(
    sys: IfsSystem,
    polygon: Polygon,
    tolerance=1e-9,
    exact: Optional[bool] = None,
) -> SscReport:
    """Check f_i(closure(O)) inside O with pairwise disjoint images.

    ``holds`` requires every image polygon strictly inside ``polygon`` with
    boundary clearance > tolerance, and image polygons pairwise separated by
    more than tolerance.  With rational input (the default for parsed
    configs) all comparisons are exact, so touching images fail cleanly.
    """
    if exact is None:
        exact = sys.is_rational() and polygon.is_rational()
    if not exact:
        polygon = polygon.to_float()
        sys_maps = [f.to_float() for f in sys.maps]
    else:
        sys_maps = list(sys.maps)

    images = [polygon.transform(f) for f in sys_maps]
    tol = Fraction(tolerance) if exact else float(tolerance)
    tol2 = tol * tol

    # (a) containment with margin.  For an interior point of a convex polygon
    # the boundary distance is the min over edges of the distance to the edge
    # line, and that min over a convex image polygon is attained at an image
    # vertex.  sign(d) * d^2 is monotone in the signed distance d, so the
    # minimum can be taken exactly on rational input.
    margin_sd2 = None  # signed squared line distance; negative = outside
    margin_witness = None
    for i, img in enumerate(images):
        for (a, b) in polygon.edges():
            ex, ey = b[0] - a[0], b[1] - a[1]
            elen2 = ex * ex + ey * ey
            for v in img.vertices:
                cr = _cross(a, b, v)  # > 0 strictly inside (ccw polygon)
                sd2 = cr * cr / elen2
                if cr < 0:
                    sd2 = -sd2
                if margin_sd2 is None or sd2 < margin_sd2:
                    margin_sd2 = sd2
                    if cr <= 0:
                        margin_witness = f"image {i + 1} vertex {v} not interior to O"
    margin = math.copysign(math.sqrt(abs(float(margin_sd2))), float(margin_sd2))

    # (b) pairwise disjointness with gap
    kappa2 = None
    pair_witness = None
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            d2 = polygon_distance2(images[i], images[j])
            if kappa2 is None or d2 < kappa2:
                kappa2 = d2
                pair_witness = f"images {i + 1} and {j + 1} within tolerance"
    kappa = math.sqrt(float(kappa2)) if kappa2 is not None else math.inf

    contained = margin_sd2 > tol2
    separated = kappa2 is None or kappa2 > tol2
    holds = bool(contained and separated)
    witness = None
    if not holds:
        witness = margin_witness if not contained else pair_witness
        if witness is None:
            witness = "containment margin within tolerance"
    return SscReport(holds=holds, kappa=kappa, margin=margin, witness=witness)


# ---------------------------------------------------------------------------
# Config file format
# ---------------------------------------------------------------------------
#
#   # comments and blank lines are ignored
#   label <name>
#   map a11 a12 a21 a22 t1 t2        (one row per map, N rows)
#   weights p1 ... pN                (optional)
#   polygon x y                      (optional, one row per vertex, >= 3 rows)
#
# Numbers are decimals or rationals "p/q"; everything is kept exact.


class ParsedSystem(NamedTuple):
    system: IfsSystem
    weights: Optional[BernoulliWeights]
    polygon: Optional[Polygon]


def _parse_number(token: str, lineno: int):
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number {token!r}", line=lineno) from None


def parse_system(text: str) -> ParsedSystem:
    label = None
    rows = []
    weights_row = None
    poly_rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key, args = parts[0].lower(), parts[1:]
        if key == "label":
            if not args:
                raise ParseError("label needs a value", line=lineno)
            label = " ".join(args)
        elif key == "map":
            if len(args) != 6:
                raise ParseError(
                    f"map row needs 6 numbers (a11 a12 a21 a22 t1 t2), got {len(args)}",
                    line=lineno,
                )
            rows.append(tuple(_parse_number(tok, lineno) for tok in args))
        elif key == "weights":
            if weights_row is not None:
                raise ParseError("duplicate weights row", line=lineno)
            weights_row = (lineno, [_parse_number(tok, lineno) for tok in args])
        elif key == "polygon":
            if len(args) != 2:
                raise ParseError("polygon row needs 2 numbers (x y)", line=lineno)
            poly_rows.append(tuple(_parse_number(tok, lineno) for tok in args))
        else:
            raise ParseError(f"unknown directive {key!r}", line=lineno)

    if not rows:
        raise ParseError("config has no map rows")
    maps = tuple(
        AffineMap(Mat2(r[0], r[1], r[2], r[3]), (r[4], r[5])) for r in rows
    )
    try:
        system = IfsSystem(maps, label=label)
    except ValueError as e:
        raise ParseError(str(e)) from None

    weights = None
    if weights_row is not None:
        lineno, vals = weights_row
        if len(vals) != len(maps):
            raise ParseError(
                f"weights row has {len(vals)} entries for {len(maps)} maps", line=lineno
            )
        try:
            weights = BernoulliWeights(tuple(vals))
        except ValueError as e:
            raise ParseError(str(e), line=lineno) from None

    poly = None
    if poly_rows:
        try:
            poly = Polygon(tuple(poly_rows))
        except NonConvexPolygon as e:
            raise ParseError(f"bad polygon: {e}") from None
    return ParsedSystem(system, weights, poly)


def _format_number(x) -> str:
    if isinstance(x, (Fraction, int)):
        f = Fraction(x)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    return repr(float(x))


def serialize_system(
    sys: IfsSystem,
    weights: Optional[BernoulliWeights] = None,
    polygon: Optional[Polygon] = None,
) -> str:
    lines = []
    if sys.label:
        lines.append(f"label {sys.label}")
    for f in sys.maps:
        a = f.linear
        nums = (a.a11, a.a12, a.a21, a.a22, f.translation[0], f.translation[1])
        lines.append("map " + " ".join(_format_number(x) for x in nums))
    if weights is not None:
        lines.append("weights " + " ".join(_format_number(x) for x in weights.p))
    if polygon is not None:
        for v in polygon.vertices:
            lines.append(f"polygon {_format_number(v[0])} {_format_number(v[1])}")
    return "\n".join(lines) + "\n"
