"""Separation quantities Delta_n for self-similar IFSs on the line.

Delta_n is the minimum distance between the translation parts of distinct
depth-n compositions sharing an exact contraction ratio (+inf when every
ratio class is a singleton, 0 on an exact overlap).  Rational arithmetic is
mandatory for verdicts: Delta_n must distinguish 0 from 1e-300, which floats
cannot.  Float input still yields rate diagnostics, verdict Inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .errors import EnumerationTooLarge

DEFAULT_CAP = 2_000_000

# float-mode ratio grouping quantum (diagnostics only)
_QUANT = 1e-12


@dataclass(frozen=True)
class LineIfs:
    """Self-similar maps g_i(x) = beta_i * x + gamma_i on the real line."""

    maps: tuple  # ((beta, gamma), ...)

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(tuple(m) for m in self.maps))
        if len(self.maps) < 1:
            raise ValueError("LineIfs needs at least one map")
        for k, (beta, _gamma) in enumerate(self.maps):
            if not 0 < abs(float(beta)) < 1:
                raise ValueError(f"map {k + 1}: contraction must satisfy 0 < |beta| < 1")

    @property
    def n(self) -> int:
        return len(self.maps)

    def is_rational(self) -> bool:
        return all(
            isinstance(b, (Fraction, int)) and isinstance(g, (Fraction, int))
            for b, g in self.maps
        )

    def merged_duplicates(self, weights: Optional[Sequence] = None):
        """Collapse exactly identical maps, summing their weights.

        The push-forward measure only sees the map multiset, so duplicate
        maps must be merged before any separation or dimension reasoning.
        """
        if weights is None:
            weights = [Fraction(1, self.n)] * self.n
        seen = {}
        order = []
        for (b, g), w in zip(self.maps, weights):
            key = (b, g)
            if key in seen:
                seen[key] += w
            else:
                seen[key] = w
                order.append(key)
        merged = LineIfs(tuple(order))
        return merged, tuple(seen[k] for k in order)

    def hull(self) -> Tuple[float, float]:
        """Interval hull of the attractor (smallest invariant interval)."""
        fixed = [float(g) / (1.0 - float(b)) for b, g in self.maps]
        lo, hi = min(fixed), max(fixed)
        # grow until invariant: affine images of [lo,hi] stay inside
        for _ in range(256):
            new_lo, new_hi = lo, hi
            for b, g in self.maps:
                bf, gf = float(b), float(g)
                a1, a2 = bf * lo + gf, bf * hi + gf
                new_lo = min(new_lo, a1, a2)
                new_hi = max(new_hi, a1, a2)
            if new_lo == lo and new_hi == hi:
                break
            lo, hi = new_lo, new_hi
        return lo, hi


@dataclass(frozen=True)
class DeltaReport:
    """Delta_n table with the finite-depth trend verdict."""

    rows: tuple  # ((n, delta_n, rate), ...); delta_n exact Fraction, inf, or float
    verdict: str  # TrendBounded | ExactOverlap | Inconclusive

    def __str__(self):
        lines = [f"n={n} delta={d} rate={r}" for n, d, r in self.rows]
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def _compositions(ifs: LineIfs, n: int, cap: int):
    """All (ratio, translation) pairs of depth-n compositions.

    Translations obey g_(uv)(0) = g_u(g_v(0)) exactly; the enumeration
    appends symbols on the right, so level k+1 entries are
    (beta_w * beta_i, g_w(gamma_i)).
    """
    total = ifs.n ** n
    if total > cap:
        raise EnumerationTooLarge(f"{ifs.n}^{n} = {total} exceeds cap {cap}")
    level = [(b, g) for b, g in ifs.maps]
    for _ in range(n - 1):
        nxt = []
        for (bw, gw) in level:
            for (b, g) in ifs.maps:
                nxt.append((bw * b, bw * g + gw))
        level = nxt
    return level


def delta_n(ifs: LineIfs, n: int, cap: int = DEFAULT_CAP):
    """Exact Delta_n: min gap of same-ratio translations over distinct words.

    Returns a Fraction (or float for float input) or math.inf when every
    ratio group is a singleton.  Zero means two distinct words induce the
    same map.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    exact = ifs.is_rational()
    comps = _compositions(ifs, n, cap)
    groups = {}
    for beta, gamma in comps:
        if exact:
            key = beta
        else:
            key = round(math.log(abs(float(beta))) / _QUANT)
        groups.setdefault(key, []).append(gamma)
    best = None
    for vals in groups.values():
        if len(vals) < 2:
            continue
        vals.sort()
        for a, b in zip(vals, vals[1:]):
            gap = b - a
            if best is None or gap < best:
                best = gap
            if best == 0:
                return best
    return math.inf if best is None else best


def hochman_rate(ifs: LineIfs, n_max: int, cap: int = DEFAULT_CAP) -> DeltaReport:
    """Delta_n rows for n = 1..n_max with a finite-depth trend verdict.

    TrendBounded when every rate -(1/n) log Delta_n stays below
    1.5 * (-log min |beta|) and no exact overlap occurred; verdicts are
    heuristics about the inspected depths, never proofs of the limit
    condition.  Float input is always Inconclusive (unless overlapping).
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    exact = ifs.is_rational()
    bound = 1.5 * max(-math.log(abs(float(b))) for b, _ in ifs.maps)
    rows = []
    overlap = False
    rates_ok = True
    for n in range(1, n_max + 1):
        d = delta_n(ifs, n, cap=cap)
        if d == math.inf:
            rate = -math.inf
        elif d == 0:
            rate = math.inf
            overlap = True
        else:
            rate = -math.log(float(d)) / n
            if rate > bound:
                rates_ok = False
        rows.append((n, d, rate))
        if overlap:
            break
    if overlap:
        verdict = "ExactOverlap"
    elif exact and rates_ok:
        verdict = "TrendBounded"
    else:
        verdict = "Inconclusive"
    return DeltaReport(rows=tuple(rows), verdict=verdict)
