"""Dominated-splitting certification and the invariant direction fields.

Certification runs three routes in precedence order: the exact triangular
criterion, the exact positivity criterion, then a numeric multicone
invariance check (user-supplied cone or a best-effort proposal).  A failed
numeric route yields Unknown, never Refuted; the only refutations are exact
obstructions (a generator with equal singular values keeps the ratio
alpha1/alpha2 at one along its own powers).

Direction fields: e_ss depends on the forward word and is computed either by
iterating inverse matrices (generic) or by the explicit slope series for
lower-triangular systems with dominant second diagonal; e_s mirrors this with
forward products over the past word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NotCertified, NotTriangular, PrefixTooShort
from .ifs import BernoulliWeights, IfsSystem, validate_word
from .linalg2 import (
    Mat2,
    ProjArc,
    ProjPoint,
    angle_gap,
    arc_image,
    proj_act,
    proj_metric,
    singular_values,
)

ITERATION_CAP = 10_000
DEFAULT_TOL = 1e-12
_STREAM_OFFSET = 0x9E3779B9  # separates derived RNG streams


@dataclass(frozen=True)
class Multicone:
    """Finite disjoint union of closed angular arcs with total measure < pi."""

    arcs: tuple

    def __post_init__(self):
        arcs = tuple(self.arcs)
        if not arcs:
            raise ValueError("multicone needs at least one arc")
        if sum(a.length for a in arcs) >= math.pi:
            raise ValueError("multicone must have total measure < pi")
        order = sorted(arcs, key=lambda a: a.start.theta)
        for i, a in enumerate(order):
            for b in order[i + 1 :]:
                if a.intersects(b):  # closed arcs, so touching endpoints fail too
                    raise ValueError("multicone arcs must be disjoint with positive gaps")
        object.__setattr__(self, "arcs", tuple(order))

    @staticmethod
    def single(arc: ProjArc) -> "Multicone":
        return Multicone((arc,))

    def contains(self, p: ProjPoint) -> bool:
        return any(a.contains(p) for a in self.arcs)

    def containing_arc(self, p: ProjPoint) -> Optional[ProjArc]:
        for a in self.arcs:
            if a.contains(p):
                return a
        return None

    def complement(self) -> "Multicone":
        """Closure of the complement: the gap arcs between the components."""
        arcs = []
        n = len(self.arcs)
        for i in range(n):
            a = self.arcs[i]
            b = self.arcs[(i + 1) % n]
            arcs.append(ProjArc(a.end, b.start))
        return Multicone(tuple(arcs))

    def seed_point(self) -> ProjPoint:
        return self.arcs[0].midpoint


@dataclass(frozen=True)
class SplitReport:
    """Outcome of dominated-splitting certification."""

    verdict: str  # Certified | Refuted | Unknown
    method: Optional[str] = None  # Triangular | Positivity | MulticoneCheck
    multicone: Optional[Multicone] = None  # certifying forward multicone
    margin: float = 0.0  # min angular clearance of the invariance check
    triangular: Optional[str] = None  # ADominant | CDominant when applicable

    @property
    def certified(self) -> bool:
        return self.verdict == "Certified"


def check_triangular_split(sys: IfsSystem) -> str:
    """Sufficient triangular criterion: ADominant, CDominant or None.

    Exact on rational entries; any tie |a_i| = |c_i| yields None.
    """
    for k, f in enumerate(sys.maps):
        if not f.linear.is_lower_triangular():
            raise NotTriangular(f"map {k + 1} has a nonzero upper-right entry")
    a_dom = all(abs(f.linear.a11) > abs(f.linear.a22) for f in sys.maps)
    c_dom = all(abs(f.linear.a11) < abs(f.linear.a22) for f in sys.maps)
    if a_dom:
        return "ADominant"
    if c_dom:
        return "CDominant"
    return "None"


def triangular_forward_cone(sys: IfsSystem, case: str) -> Multicone:
    """Explicit forward-invariant arc for a dominated triangular family.

    ADominant: slopes contract toward the e_s series, so a symmetric slope
    band |slope| <= K is invariant once K beats max|b/a| / (1 - max|c/a|).
    CDominant: slopes expand toward the vertical, so the band around the
    y-axis |slope| >= T is invariant once T beats max |b| / (|c| - |a|).
    """
    if case == "ADominant":
        k0 = 0.0
        r = 0.0
        for f in sys.maps:
            a, b, c = (abs(float(x)) for x in (f.linear.a11, f.linear.a21, f.linear.a22))
            k0 = max(k0, b / a)
            r = max(r, c / a)
        bound = k0 / (1.0 - r)
        k = max(bound * 1.001 + 1e-9, 0.01)
        half = math.atan(k)
        return Multicone.single(ProjArc.from_angles(-half, half))
    if case == "CDominant":
        t0 = 0.0
        for f in sys.maps:
            a, b, c = (abs(float(x)) for x in (f.linear.a11, f.linear.a21, f.linear.a22))
            t0 = max(t0, b / (c - a))
        t = max(t0 * 1.001 + 1e-9, 1.0)
        cut = math.atan(t)
        return Multicone.single(ProjArc.from_angles(cut, math.pi - cut))
    raise ValueError(f"no cone for triangular case {case!r}")


def _sign_consistent(m: Mat2) -> bool:
    e = [float(x) for x in m.entries()]
    return all(x > 0 for x in e) or all(x < 0 for x in e)


def _is_similarity(m: Mat2) -> bool:
    """Exact test for alpha1 == alpha2 (M M^T a multiple of the identity)."""
    a, b, c, d = m.entries()
    return a * a + b * b == c * c + d * d and a * c + b * d == 0


def check_multicone_invariance(sys: IfsSystem, m: Multicone, margin: float = 0.0) -> SplitReport:
    """Certified iff every generator maps every arc strictly inside the cone
    with angular clearance >= margin; reports the minimal clearance."""
    clearance = math.inf
    for f in sys.maps:
        for arc in m.arcs:
            img = arc_image(f.linear, arc)
            host = m.containing_arc(img.start)
            if host is None:
                return SplitReport("Refuted", method="MulticoneCheck", multicone=m,
                                   margin=-math.inf)
            off = angle_gap(host.start.theta, img.start.theta)
            tail = host.length - (off + img.length)
            if tail < 0:
                return SplitReport("Refuted", method="MulticoneCheck", multicone=m,
                                   margin=-math.inf)
            clearance = min(clearance, off, tail)
    verdict = "Certified" if clearance >= margin and clearance > 0 else "Refuted"
    return SplitReport(verdict, method="MulticoneCheck", multicone=m, margin=clearance)


def propose_multicone(sys: IfsSystem, inflate: float = 0.01, rounds: int = 60) -> Optional[Multicone]:
    """Best-effort forward multicone: fatten sampled attracting directions and
    absorb their images until invariant or hopeless."""
    rng = np.random.Generator(np.random.Philox(key=1234567))
    angles = []
    for f in sys.maps:
        p = ProjPoint(0.3)
        angles.append(proj_act(f.linear, p).theta)
    for _ in range(160):
        depth = int(rng.integers(8, 30))
        word = rng.integers(0, sys.n, size=depth)
        mat = Mat2.identity()
        for s in word:
            mat = sys.maps[int(s)].linear.to_float() @ mat
            mx = max(abs(e) for e in mat.entries())
            mat = mat.scaled(1.0 / mx)
        # long products are numerically rank one; map a generic vector rather
        # than going through the nonsingular projective action
        x, y = mat.apply(ProjPoint(rng.uniform(0, math.pi)).to_vector())
        if x != 0.0 or y != 0.0:
            angles.append(ProjPoint.from_vector(x, y).theta)

    arcs = [ProjArc.around(t, inflate) for t in sorted(set(angles))]
    arcs = _merge_arcs(arcs)
    if arcs is None:
        return None
    for _ in range(rounds):
        try:
            cone = Multicone(tuple(arcs))
        except ValueError:
            return None
        report = check_multicone_invariance(sys, cone, margin=inflate / 4)
        if report.certified:
            return cone
        new_arcs = list(arcs)
        for f in sys.maps:
            for arc in arcs:
                img = arc_image(f.linear, arc)
                new_arcs.append(ProjArc.around(img.midpoint.theta, img.length / 2 + inflate))
        arcs = _merge_arcs(new_arcs)
        if arcs is None or sum(a.length for a in arcs) >= math.pi - 0.05:
            return None
    return None


def _merge_arcs(arcs):
    """Union of circular arcs, merged while any pair touches; None if the
    union degenerates toward the full circle."""
    work = list(arcs)
    changed = True
    while changed:
        changed = False
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                u = _union_two(work[i], work[j])
                if u is NotImplemented:
                    continue
                if u is None:
                    return None
                work[j] = u
                del work[i]
                changed = True
                break
            if changed:
                break
    return work


def _union_two(a: ProjArc, b: ProjArc):
    """Union arc if a and b touch or overlap; NotImplemented when disjoint;
    None when the union would cover the whole circle."""
    off_b = angle_gap(a.start.theta, b.start.theta)
    off_a = angle_gap(b.start.theta, a.start.theta)
    if off_b <= a.length:  # b starts inside a
        end = max(a.length, off_b + b.length)
        if end >= math.pi:
            return None
        return ProjArc.from_angles(a.start.theta, a.start.theta + end)
    if off_a <= b.length:  # a starts inside b
        end = max(b.length, off_a + a.length)
        if end >= math.pi:
            return None
        return ProjArc.from_angles(b.start.theta, b.start.theta + end)
    return NotImplemented


def certify(sys: IfsSystem, multicone: Optional[Multicone] = None, margin: float = 0.0) -> SplitReport:
    """Dominated-splitting certification with route precedence
    triangular > positivity > multicone (user, then auto proposal)."""
    for f in sys.maps:
        if _is_similarity(f.linear):
            return SplitReport("Refuted", method=None, margin=-math.inf)
    try:
        case = check_triangular_split(sys)
    except NotTriangular:
        case = None
    if case in ("ADominant", "CDominant"):
        cone = triangular_forward_cone(sys, case)
        checked = check_multicone_invariance(sys, cone, margin=0.0)
        return SplitReport("Certified", method="Triangular", multicone=cone,
                           margin=checked.margin, triangular=case)
    if all(_sign_consistent(f.linear) for f in sys.maps):
        cone = Multicone.single(ProjArc.from_angles(0.0, math.pi / 2))
        checked = check_multicone_invariance(sys, cone, margin=0.0)
        if checked.certified:
            return SplitReport("Certified", method="Positivity", multicone=cone,
                               margin=checked.margin)
    if multicone is not None:
        checked = check_multicone_invariance(sys, multicone, margin=margin)
        if checked.certified:
            return checked
        return SplitReport("Unknown", method="MulticoneCheck", multicone=multicone,
                           margin=checked.margin)
    cone = propose_multicone(sys)
    if cone is not None:
        checked = check_multicone_invariance(sys, cone, margin=0.0)
        if checked.certified:
            return checked
    return SplitReport("Unknown")


def _require_certified(sys: IfsSystem, split: Optional[SplitReport]) -> SplitReport:
    if split is None:
        split = certify(sys)
    if not split.certified:
        raise NotCertified(f"dominated splitting not certified (verdict {split.verdict})")
    return split


def _triangular_ratios(sys: IfsSystem):
    A = sys.linear_array
    return A[:, 0, 0], A[:, 1, 0], A[:, 1, 1]  # a, b, c


def _series_tail_bound(prefactor: float, bc_max: float, r: float) -> float:
    return bc_max * abs(prefactor) / (1.0 - r)


def strong_stable_direction(
    sys: IfsSystem,
    prefix: Sequence[int],
    tol: float = DEFAULT_TOL,
    backward_cone: Optional[Multicone] = None,
    split: Optional[SplitReport] = None,
    method: str = "auto",
) -> ProjPoint:
    """Strong-stable direction e_ss for a one-sided forward word.

    ``method``: "auto" picks the exact triangular shortcuts when available,
    "series" forces the slope series (triangular c-dominant only), "iterate"
    forces inverse-matrix iteration.  Raises PrefixTooShort when the word is
    consumed before the tail bound drops below ``tol``.
    """
    split = _require_certified(sys, split)
    validate_word(sys, prefix)
    case = split.triangular
    if method == "auto" and case == "ADominant":
        return ProjPoint(math.pi / 2)
    if method in ("auto", "series") and case == "CDominant":
        a, b, c = _triangular_ratios(sys)
        r = float(np.max(np.abs(a / c)))
        bc_max = float(np.max(np.abs(b / c)))
        slope = 0.0
        pref = 1.0
        for s in prefix:
            i = s - 1
            slope -= (b[i] / c[i]) * pref
            pref *= a[i] / c[i]
            if _series_tail_bound(pref, bc_max, r) < tol:
                return ProjPoint.from_slope(slope)
        raise PrefixTooShort(
            f"series tail bound {_series_tail_bound(pref, bc_max, r):.3g} above tol {tol}"
        )
    if method == "series":
        raise NotTriangular("slope series needs a lower-triangular c-dominant system")
    return _iterate_direction(
        sys, prefix, tol, cone=backward_cone or _backward_cone(split), inverse=True
    )


def stable_direction(
    sys: IfsSystem,
    suffix: Sequence[int],
    tol: float = DEFAULT_TOL,
    forward_cone: Optional[Multicone] = None,
    split: Optional[SplitReport] = None,
    method: str = "auto",
) -> ProjPoint:
    """Stable direction e_s for a one-sided past word (oldest symbol first).

    Mirror of :func:`strong_stable_direction` with forward products; the
    triangular shortcuts swap roles (c-dominant pins e_s to the y-axis).
    """
    split = _require_certified(sys, split)
    validate_word(sys, suffix)
    case = split.triangular
    if method == "auto" and case == "CDominant":
        return ProjPoint(math.pi / 2)
    if method in ("auto", "series") and case == "ADominant":
        a, b, c = _triangular_ratios(sys)
        r = float(np.max(np.abs(c / a)))
        ba_max = float(np.max(np.abs(b / a)))
        slope = 0.0
        pref = 1.0
        for s in reversed(suffix):  # most recent past symbol first
            i = s - 1
            slope += (b[i] / a[i]) * pref
            pref *= c[i] / a[i]
            if _series_tail_bound(pref, ba_max, r) < tol:
                return ProjPoint.from_slope(slope)
        raise PrefixTooShort(
            f"series tail bound {_series_tail_bound(pref, ba_max, r):.3g} above tol {tol}"
        )
    if method == "series":
        raise NotTriangular("slope series needs a lower-triangular a-dominant system")
    return _iterate_direction(
        sys, tuple(reversed(suffix)), tol, cone=forward_cone or split.multicone,
        inverse=False,
    )


def _backward_cone(split: SplitReport) -> Optional[Multicone]:
    if split.multicone is None:
        return None
    return split.multicone.complement()


def _iterate_direction(sys, word, tol, cone, inverse):
    """Nested-image iteration: right-multiply the running product by the next
    (inverse) matrix and stop when the image of the reference arc has
    projective diameter below tol."""
    if cone is not None:
        ref_arc = cone.arcs[0]
        seeds = None
    else:
        ref_arc = None
        seeds = (ProjPoint(0.4), ProjPoint(0.4 + math.pi / 2))
    prod = Mat2.identity()
    prev = None
    if len(word) > ITERATION_CAP:
        word = word[:ITERATION_CAP]
    for s in word:
        m = sys.maps[s - 1].linear.to_float()
        prod = prod @ (m.inverse() if inverse else m)
        mx = max(abs(e) for e in prod.entries())
        prod = prod.scaled(1.0 / mx)
        if ref_arc is not None:
            img = arc_image(prod, ref_arc)
            if math.sin(img.length) < tol and img.length < 0.1:
                return img.midpoint
        else:
            pts = [proj_act(prod, p) for p in seeds]
            if prev is not None:
                incs = [proj_metric(a, b) for a, b in zip(pts, prev)]
                agree = proj_metric(pts[0], pts[1])
                if max(incs) < tol and agree < 10 * tol:
                    return pts[0]
            prev = pts
    raise PrefixTooShort(f"no convergence to tol {tol} within {len(word)} symbols")


def default_direction_depth(
    sys: IfsSystem, split: SplitReport, tol: float = 1e-9, field: str = "ss"
) -> int:
    """Word depth whose geometric tail bound for the direction iteration is
    below tol; heuristic contraction rate outside the triangular cases.

    ``field`` picks the target: "ss" needs depth along the future word,
    "s" along the past word; in the triangular cases one of the two fields
    is constant and needs depth one.
    """
    if split.triangular is not None:
        constant_case = "ADominant" if field == "ss" else "CDominant"
        if split.triangular == constant_case:
            return 1
        a, b, c = _triangular_ratios(sys)
        r = float(np.max(np.abs(a / c))) if field == "ss" else float(np.max(np.abs(c / a)))
    else:
        r = max(
            singular_values(f.linear).alpha2 / singular_values(f.linear).alpha1
            for f in sys.maps
        )
        r = min(max(r, 1e-6), 0.97)
    return int(min(max(math.ceil(math.log(tol) / math.log(r)), 8), 400))


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed + _STREAM_OFFSET * stream) % (1 << 64)))


def sample_nu_ss(
    sys: IfsSystem,
    weights: BernoulliWeights,
    depth: Optional[int],
    count: int,
    rng_seed: int,
    split: Optional[SplitReport] = None,
):
    """``count`` i.i.d. draws of e_ss(w), w ~ weights^depth, as ProjPoints."""
    return [ProjPoint(t) for t in sample_nu_ss_angles(sys, weights, depth, count, rng_seed, split)]


def sample_nu_ss_angles(
    sys: IfsSystem,
    weights: BernoulliWeights,
    depth: Optional[int],
    count: int,
    rng_seed: int,
    split: Optional[SplitReport] = None,
) -> np.ndarray:
    """Vectorized angle samples of the strong-stable direction distribution."""
    split = _require_certified(sys, split)
    if count < 1:
        raise ValueError("count must be >= 1")
    if depth is None:
        depth = default_direction_depth(sys, split)
    if split.triangular == "ADominant":
        return np.full(count, math.pi / 2)
    rng = _rng(rng_seed)
    syms = rng.choice(sys.n, size=(count, depth), p=weights.as_array)
    if split.triangular == "CDominant":
        a, b, c = _triangular_ratios(sys)
        bc = b / c
        ac = a / c
        slopes = np.zeros(count)
        pref = np.ones(count)
        for k in range(depth):
            i = syms[:, k]
            slopes -= bc[i] * pref
            pref = pref * ac[i]
        return np.mod(np.arctan(slopes), math.pi)
    # generic route: batched inverse products applied to the backward seed
    cone = _backward_cone(split)
    seed_theta = cone.seed_point().theta if cone is not None else 0.4
    A = sys.linear_array
    dets = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
    inv = np.empty_like(A)
    inv[:, 0, 0] = A[:, 1, 1] / dets
    inv[:, 0, 1] = -A[:, 0, 1] / dets
    inv[:, 1, 0] = -A[:, 1, 0] / dets
    inv[:, 1, 1] = A[:, 0, 0] / dets
    p11 = np.ones(count)
    p12 = np.zeros(count)
    p21 = np.zeros(count)
    p22 = np.ones(count)
    for k in range(depth):
        i = syms[:, k]
        b11, b12, b21, b22 = inv[i, 0, 0], inv[i, 0, 1], inv[i, 1, 0], inv[i, 1, 1]
        n11 = p11 * b11 + p12 * b21
        n12 = p11 * b12 + p12 * b22
        n21 = p21 * b11 + p22 * b21
        n22 = p21 * b12 + p22 * b22
        scale = np.maximum(np.maximum(np.abs(n11), np.abs(n12)),
                           np.maximum(np.abs(n21), np.abs(n22)))
        p11, p12, p21, p22 = n11 / scale, n12 / scale, n21 / scale, n22 / scale
    vx, vy = math.cos(seed_theta), math.sin(seed_theta)
    wx = p11 * vx + p12 * vy
    wy = p21 * vx + p22 * vy
    return np.mod(np.arctan2(wy, wx), math.pi)


def sample_e_s_angles(
    sys: IfsSystem,
    weights: BernoulliWeights,
    depth: Optional[int],
    count: int,
    rng_seed: int,
    split: Optional[SplitReport] = None,
) -> np.ndarray:
    """Vectorized angle samples of the stable-direction distribution over
    random past words."""
    split = _require_certified(sys, split)
    if depth is None:
        depth = default_direction_depth(sys, split, field="s")
    if split.triangular == "CDominant":
        return np.full(count, math.pi / 2)
    rng = _rng(rng_seed, stream=1)
    syms = rng.choice(sys.n, size=(count, depth), p=weights.as_array)
    if split.triangular == "ADominant":
        a, b, c = _triangular_ratios(sys)
        ba = b / a
        ca = c / a
        slopes = np.zeros(count)
        pref = np.ones(count)
        for k in range(depth):  # column k is the k-th symbol into the past
            i = syms[:, k]
            slopes += ba[i] * pref
            pref = pref * ca[i]
        return np.mod(np.arctan(slopes), math.pi)
    cone = split.multicone
    seed_theta = cone.seed_point().theta if cone is not None else 1.1
    A = sys.linear_array
    p11 = np.ones(count)
    p12 = np.zeros(count)
    p21 = np.zeros(count)
    p22 = np.ones(count)
    for k in range(depth):
        i = syms[:, k]
        b11, b12, b21, b22 = A[i, 0, 0], A[i, 0, 1], A[i, 1, 0], A[i, 1, 1]
        n11 = p11 * b11 + p12 * b21
        n12 = p11 * b12 + p12 * b22
        n21 = p21 * b11 + p22 * b21
        n22 = p21 * b12 + p22 * b22
        scale = np.maximum(np.maximum(np.abs(n11), np.abs(n12)),
                           np.maximum(np.abs(n21), np.abs(n22)))
        p11, p12, p21, p22 = n11 / scale, n12 / scale, n21 / scale, n22 / scale
    vx, vy = math.cos(seed_theta), math.sin(seed_theta)
    wx = p11 * vx + p12 * vy
    wy = p21 * vx + p22 * vy
    return np.mod(np.arctan2(wy, wx), math.pi)


def min_angle_separation(
    sys: IfsSystem,
    weights: BernoulliWeights,
    depth: Optional[int],
    count: int,
    rng_seed: int,
    split: Optional[SplitReport] = None,
) -> float:
    """Empirical min of |sin(e_s - e_ss)| over sampled pairs of past/future
    words; positive under dominated splitting."""
    split = _require_certified(sys, split)
    ss = np.sort(sample_nu_ss_angles(sys, weights, depth, count, rng_seed, split))
    es = np.sort(sample_e_s_angles(sys, weights, depth, count, rng_seed, split))
    # min over all pairs of the circular angular gap (period pi), via merge
    idx = np.searchsorted(ss, es)
    best = math.pi
    n = len(ss)
    for j, e in enumerate(es):
        for i in (idx[j] - 1, idx[j] % n):
            d = abs(e - ss[i % n])
            d = min(d, math.pi - d)
            best = min(best, d)
    return math.sin(best)
