"""Subadditive pressure: finite-n approximants, root isolation, and the
exact closed forms for lower-triangular families.

Word enumeration is level-by-level in lexicographic (leading-symbol-block)
order with per-word renormalization, so results are deterministic and no
product ever under- or overflows.  Finite-n roots certify the true root from
above: submultiplicativity of the singular value function makes the
approximants decrease along doubling depths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import EnumerationTooLarge, NegativeExponent, NoDomination, NoSignChange
from .ifs import IfsSystem
from .splitting import check_triangular_split

DEFAULT_CAP = 20_000_000
DEFAULT_SCHEDULE = (2, 4, 8, 12)
ROOT_BRACKET = (0.0, 4.0)
BISECT_TOL = 1e-12


@dataclass(frozen=True)
class RootEstimate:
    """Certified-from-above pressure root data along a depth schedule.

    ``s_upper`` is certified (finite-depth roots bound the true root from
    above); ``s_extrapolated`` removes the leading 1/n bias from the last two
    depths and is a heuristic estimate, never a certified bound.
    """

    s_upper: float  # root at the largest depth: upper bound for the true root
    history: tuple  # ((n, root_n), ...)
    converged: bool
    tol: float

    @property
    def s_extrapolated(self) -> float:
        if len(self.history) < 2:
            return self.s_upper
        (n1, r1), (n2, r2) = self.history[-2], self.history[-1]
        return (n2 * r2 - n1 * r1) / (n2 - n1)

    def __str__(self):
        rows = " ".join(f"{n}:{r:.10g}" for n, r in self.history)
        return f"root<= {self.s_upper:.12g} (converged={self.converged}; {rows})"


def word_log_singulars(sys: IfsSystem, n: int, cap: int = DEFAULT_CAP) -> Tuple[np.ndarray, np.ndarray]:
    """log alpha1 and log alpha2 for every length-n product, word-indexed in
    lexicographic order with the leading symbol as the slowest digit.

    Products are renormalized per word (log scale carried separately) and
    log alpha2 is recovered from the exact per-symbol log-determinant sum,
    so deep strongly-dominated products lose no precision.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    total = sys.n ** n
    if total > cap:
        raise EnumerationTooLarge(f"{sys.n}^{n} = {total} exceeds cap {cap}")
    A = sys.linear_array
    sym_logdet = np.log(np.abs(A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]))

    e11, e12 = A[:, 0, 0].copy(), A[:, 0, 1].copy()
    e21, e22 = A[:, 1, 0].copy(), A[:, 1, 1].copy()
    logscale = np.zeros(sys.n)
    logdet = sym_logdet.copy()
    for _ in range(n - 1):
        k = e11.shape[0]
        new11 = np.empty(sys.n * k)
        new12 = np.empty(sys.n * k)
        new21 = np.empty(sys.n * k)
        new22 = np.empty(sys.n * k)
        new_scale = np.empty(sys.n * k)
        new_det = np.empty(sys.n * k)
        for i in range(sys.n):  # leading symbol block: A_i times every word
            a11, a12, a21, a22 = A[i, 0, 0], A[i, 0, 1], A[i, 1, 0], A[i, 1, 1]
            sl = slice(i * k, (i + 1) * k)
            new11[sl] = a11 * e11 + a12 * e21
            new12[sl] = a11 * e12 + a12 * e22
            new21[sl] = a21 * e11 + a22 * e21
            new22[sl] = a21 * e12 + a22 * e22
            new_scale[sl] = logscale
            new_det[sl] = logdet + sym_logdet[i]
        m = np.maximum(np.maximum(np.abs(new11), np.abs(new12)),
                       np.maximum(np.abs(new21), np.abs(new22)))
        e11, e12, e21, e22 = new11 / m, new12 / m, new21 / m, new22 / m
        logscale = new_scale + np.log(m)
        logdet = new_det

    t = e11 * e11 + e12 * e12 + e21 * e21 + e22 * e22
    dn = e11 * e22 - e12 * e21
    disc = np.maximum(t * t - 4.0 * dn * dn, 0.0)
    log_a1 = logscale + 0.5 * np.log((t + np.sqrt(disc)) / 2.0)
    log_a2 = logdet - log_a1
    return log_a1, log_a2


def phi_log_values(log_a1: np.ndarray, log_a2: np.ndarray, s: float) -> np.ndarray:
    """log phi^s per word from the stored log singular values."""
    if s < 0:
        raise NegativeExponent(f"s = {s} < 0")
    if s <= 1:
        return s * log_a1
    if s <= 2:
        return log_a1 + (s - 1.0) * log_a2
    return (s / 2.0) * (log_a1 + log_a2)


def _logsumexp(v: np.ndarray) -> float:
    m = float(np.max(v))
    return m + math.log(float(np.sum(np.exp(v - m))))


def pressure_n(sys: IfsSystem, s: float, n: int, cap: int = DEFAULT_CAP) -> float:
    """Finite-depth pressure (1/n) log sum over |w| = n of phi^s(A_w)."""
    log_a1, log_a2 = word_log_singulars(sys, n, cap=cap)
    return _logsumexp(phi_log_values(log_a1, log_a2, s)) / n


def _bisect_root(fn: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Root of a strictly decreasing function by plain bisection."""
    flo = fn(lo)
    if flo <= 0.0:
        return lo
    fhi = fn(hi)
    if fhi > 0.0:
        raise NoSignChange(
            f"pressure still positive at s = {hi}; not a contracting system?"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def adjusted_schedule(sys: IfsSystem, schedule: Sequence[int], cap: int = DEFAULT_CAP):
    """Drop depths whose enumeration exceeds the cap; always keep one depth."""
    kept = [n for n in schedule if sys.n ** n <= cap]
    if not kept:
        n = 1
        while sys.n ** (n + 1) <= cap:
            n += 1
        kept = [n]
    return tuple(kept)


def pressure_root(
    sys: IfsSystem,
    n_schedule: Optional[Sequence[int]] = None,
    tol: float = BISECT_TOL,
    cap: int = DEFAULT_CAP,
) -> RootEstimate:
    """Roots of the finite-depth pressures along an increasing schedule.

    Each root is found by bisection on [0, 4] to width ``tol``; the final
    root is an upper bound for the true pressure root.  ``converged`` is the
    stopping heuristic |last - previous| < 10 tol, not a proof.
    """
    if n_schedule is None:
        n_schedule = DEFAULT_SCHEDULE
    n_schedule = adjusted_schedule(sys, n_schedule, cap)
    if not n_schedule or any(b <= a for a, b in zip(n_schedule, n_schedule[1:])):
        raise ValueError("schedule must be non-empty and strictly increasing")
    history = []
    for n in n_schedule:
        log_a1, log_a2 = word_log_singulars(sys, n, cap=cap)

        def fn(s: float, _a1=log_a1, _a2=log_a2, _n=n) -> float:
            return _logsumexp(phi_log_values(_a1, _a2, s)) / _n

        history.append((n, _bisect_root(fn, *ROOT_BRACKET, tol)))
    converged = len(history) >= 2 and abs(history[-1][1] - history[-2][1]) < 10 * tol
    return RootEstimate(
        s_upper=history[-1][1], history=tuple(history), converged=converged, tol=tol
    )


# ---------------------------------------------------------------------------
# Lower-triangular closed forms
# ---------------------------------------------------------------------------


def _abs_diagonals(sys: IfsSystem):
    check_triangular_split(sys)  # raises NotTriangular when not applicable
    A = sys.linear_array
    return np.abs(A[:, 0, 0]), np.abs(A[:, 1, 1])


def triangular_pressure(sys: IfsSystem, s: float) -> float:
    """Exact piecewise pressure for lower-triangular linear parts."""
    if s < 0:
        raise NegativeExponent(f"s = {s} < 0")
    a, c = _abs_diagonals(sys)
    if s < 1:
        return math.log(max(float(np.sum(a ** s)), float(np.sum(c ** s))))
    if s < 2:
        return math.log(
            max(float(np.sum(a * c ** (s - 1))), float(np.sum(c * a ** (s - 1))))
        )
    return math.log(float(np.sum((a * c) ** (s / 2.0))))


def _solve_sum_equals_one(fn: Callable[[float], float], tol: float = 1e-12) -> float:
    """Unique root of a strictly decreasing sum-function minus one."""
    lo, hi = 0.0, 1.0
    while fn(hi) > 1.0:
        hi *= 2.0
        if hi > 1e6:
            raise NoSignChange("sum never drops below one; entries not contracting?")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def triangular_roots(sys: IfsSystem) -> Tuple[float, float]:
    """The two moran-type roots (s1, s2) of the dominated triangular family.

    A-dominant: sum |a_i|^s1 = 1 and sum |a_i| |c_i|^(s2-1) = 1;
    c-dominant swaps the roles of a and c.  min(s1, s2) is the pressure root
    whenever it lies below 2 (see :func:`triangular_pressure_root`).
    """
    a, c = _abs_diagonals(sys)
    case = check_triangular_split(sys)
    if case == "None":
        raise NoDomination("need |a_i|>|c_i| for all i or |a_i|<|c_i| for all i")
    if case == "CDominant":
        a, c = c, a
    s1 = _solve_sum_equals_one(lambda s: float(np.sum(a ** s)))
    s2 = _solve_sum_equals_one(lambda s: float(np.sum(a * c ** (s - 1.0))))
    return s1, s2


def triangular_pressure_root(sys: IfsSystem) -> float:
    """Exact root of the triangular pressure closed form.

    min(s1, s2) while that lies in the first two branches; beyond 2 the root
    solves sum (|a_i| |c_i|)^(s/2) = 1 instead.
    """
    s1, s2 = triangular_roots(sys)
    root = min(s1, s2)
    if root < 2.0:
        return root
    a, c = _abs_diagonals(sys)
    return _solve_sum_equals_one(lambda s: float(np.sum((a * c) ** (s / 2.0))))
