"""Small exact linear algebra: 2x2 matrices, singular values, the projective line.

Entries may be floats or ``fractions.Fraction``; products, determinants and
triangular predicates stay exact on rational input.  Anything involving a
square root (singular values, angles) is computed in float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import NegativeExponent, SingularMatrix

# |det| below this is treated as singular: keeps inverse norms finite.
DET_FLOOR = 1e-300

Scalar = "float | Fraction"


@dataclass(frozen=True)
class Mat2:
    """2x2 real matrix [[a11, a12], [a21, a22]]."""

    a11: object
    a12: object
    a21: object
    a22: object

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def diagonal(a, c) -> "Mat2":
        return Mat2(a, 0, 0, c)

    @staticmethod
    def lower_triangular(a, b, c) -> "Mat2":
        """[[a, 0], [b, c]] -- the shape used throughout the triangular theory."""
        return Mat2(a, 0, b, c)

    @staticmethod
    def rotation(phi: float) -> "Mat2":
        return Mat2(math.cos(phi), -math.sin(phi), math.sin(phi), math.cos(phi))

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def trace(self):
        return self.a11 + self.a22

    def entries(self):
        return (self.a11, self.a12, self.a21, self.a22)

    def is_lower_triangular(self) -> bool:
        return self.a12 == 0

    def to_float(self) -> "Mat2":
        return Mat2(float(self.a11), float(self.a12), float(self.a21), float(self.a22))

    def is_rational(self) -> bool:
        return all(isinstance(e, (Fraction, int)) for e in self.entries())

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def apply(self, v):
        x, y = v
        return (self.a11 * x + self.a12 * y, self.a21 * x + self.a22 * y)

    def scaled(self, s) -> "Mat2":
        return Mat2(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)

    def transpose(self) -> "Mat2":
        return Mat2(self.a11, self.a21, self.a12, self.a22)

    def inverse(self) -> "Mat2":
        d = self.det
        if abs(d) < DET_FLOOR:
            raise SingularMatrix(f"|det| = {abs(d)} below floor {DET_FLOOR}")
        if isinstance(d, Fraction) or (
            isinstance(d, int) and self.is_rational()
        ):
            inv = Fraction(1, 1) / d
        else:
            inv = 1.0 / d
        return Mat2(self.a22 * inv, -self.a12 * inv, -self.a21 * inv, self.a11 * inv)


class SingularPair(NamedTuple):
    """Ordered singular values alpha1 >= alpha2 > 0 of a nonsingular matrix."""

    alpha1: float
    alpha2: float


def singular_values(m: Mat2) -> SingularPair:
    """Closed-form singular values of a nonsingular 2x2 matrix.

    alpha1^2 is the larger eigenvalue of M M^T:
    alpha1^2 = (T + sqrt(T^2 - 4 D^2)) / 2 with T = tr(M M^T), D = det M.
    alpha2 is recovered from alpha1 * alpha2 = |D| so the product identity is
    exact; the inner sqrt argument is clamped at 0 against round-off.
    """
    a, b, c, d = (float(e) for e in m.entries())
    det = a * d - b * c
    if abs(det) < DET_FLOOR:
        raise SingularMatrix(f"|det| = {abs(det)} below floor {DET_FLOOR}")
    t = a * a + b * b + c * c + d * d
    disc = t * t - 4.0 * det * det
    if disc < 0.0:
        disc = 0.0
    alpha1 = math.sqrt((t + math.sqrt(disc)) / 2.0)
    alpha2 = abs(det) / alpha1
    return SingularPair(alpha1, alpha2)


def operator_norm(m: Mat2) -> float:
    a, b, c, d = (float(e) for e in m.entries())
    t = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = max(t * t - 4.0 * det * det, 0.0)
    return math.sqrt((t + math.sqrt(disc)) / 2.0)


def phi_s(m: Mat2, s: float) -> float:
    """Singular value function phi^s driving the subadditive pressure.

    alpha1^s on [0,1], alpha1 * alpha2^(s-1) on (1,2], (alpha1*alpha2)^(s/2)
    beyond; continuous at the breakpoints.
    """
    if s < 0:
        raise NegativeExponent(f"s = {s} < 0")
    a1, a2 = singular_values(m)
    if s <= 1:
        return a1 ** s
    if s <= 2:
        return a1 * a2 ** (s - 1.0)
    return (a1 * a2) ** (s / 2.0)


# ---------------------------------------------------------------------------
# Projective line P^1: directions as canonical angles in [0, pi).
# ---------------------------------------------------------------------------


def _canonical_angle(theta: float) -> float:
    t = math.fmod(theta, math.pi)
    if t < 0.0:
        t += math.pi
    if t >= math.pi:  # fmod round-off at the seam
        t -= math.pi
    return t


@dataclass(frozen=True)
class ProjPoint:
    """A direction line through the origin, stored as its angle in [0, pi)."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _canonical_angle(float(self.theta)))

    @staticmethod
    def from_vector(x: float, y: float) -> "ProjPoint":
        if x == 0.0 and y == 0.0:
            raise ValueError("zero vector has no direction")
        return ProjPoint(math.atan2(y, x))

    @staticmethod
    def from_slope(slope: float) -> "ProjPoint":
        """Direction of the vector (1, slope)."""
        return ProjPoint(math.atan(slope))

    def to_vector(self):
        return (math.cos(self.theta), math.sin(self.theta))

    def slope(self) -> float:
        """y/x slope; +inf for the vertical direction."""
        c = math.cos(self.theta)
        if c == 0.0:
            return math.inf
        return math.tan(self.theta)


def proj_act(m: Mat2, p: ProjPoint) -> ProjPoint:
    """Image of the direction p under the linear map m, as a direction."""
    if abs(float(m.det)) < DET_FLOOR:
        raise SingularMatrix("projective action needs a nonsingular matrix")
    x, y = p.to_vector()
    mf = m.to_float()
    wx = mf.a11 * x + mf.a12 * y
    wy = mf.a21 * x + mf.a22 * y
    return ProjPoint.from_vector(wx, wy)


def proj_metric(p1: ProjPoint, p2: ProjPoint) -> float:
    """|sin(theta1 - theta2)|: symmetric, zero iff the directions coincide."""
    return abs(math.sin(p1.theta - p2.theta))


def angle_gap(a: float, b: float) -> float:
    """Counterclockwise angular distance from a to b on the period-pi circle."""
    return _canonical_angle(b - a)


@dataclass(frozen=True)
class ProjArc:
    """Closed angular arc on P^1, counterclockwise from start to end.

    Length is the ccw gap (end - start) mod pi and must lie in (0, pi).
    """

    start: ProjPoint
    end: ProjPoint

    def __post_init__(self):
        if not 0.0 < self.length < math.pi:
            raise ValueError(
                f"arc length {self.length} outside (0, pi); endpoints must differ"
            )

    @staticmethod
    def from_angles(start: float, end: float) -> "ProjArc":
        return ProjArc(ProjPoint(start), ProjPoint(end))

    @staticmethod
    def around(center: float, half_width: float) -> "ProjArc":
        return ProjArc.from_angles(center - half_width, center + half_width)

    @property
    def length(self) -> float:
        return angle_gap(self.start.theta, self.end.theta)

    @property
    def midpoint(self) -> ProjPoint:
        return ProjPoint(self.start.theta + 0.5 * self.length)

    def contains(self, p: ProjPoint, margin: float = 0.0) -> bool:
        """True if p lies on the arc, at angular distance >= margin from both ends."""
        off = angle_gap(self.start.theta, p.theta)
        return margin <= off <= self.length - margin

    def clearance(self, p: ProjPoint) -> float:
        """Min angular distance from p to the arc endpoints; negative if outside."""
        off = angle_gap(self.start.theta, p.theta)
        if off <= self.length:
            return min(off, self.length - off)
        # outside: distance to the nearer endpoint, negated
        return -min(off - self.length, math.pi - off)

    def intersects(self, other: "ProjArc") -> bool:
        return (
            self.contains(other.start)
            or self.contains(other.end)
            or other.contains(self.start)
            or other.contains(self.end)
        )


def arc_image(m: Mat2, arc: ProjArc) -> ProjArc:
    """Image arc of a closed arc under a nonsingular linear map.

    Endpoints map to endpoints; which of the two candidate arcs is the image
    is decided by requiring the image of the arc midpoint to lie inside.
    """
    p1 = proj_act(m, arc.start)
    p2 = proj_act(m, arc.end)
    mid = proj_act(m, arc.midpoint)
    cand = ProjArc(p1, p2)
    if cand.contains(mid):
        return cand
    return ProjArc(p2, p1)
