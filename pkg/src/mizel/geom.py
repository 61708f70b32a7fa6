"""Planar primitives with an explicit tolerance context.

Points, circles and rectangles are immutable values. Predicates take a
:class:`ToleranceContext`; when none is given, one is derived from the
diameter of the inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateTriple, GeometryError, InvalidRectangle, NotRightAngle

DEFAULT_REL_EPS = 1e-9
DEFAULT_EPS_ANGLE = 1e-9


@dataclass(frozen=True, slots=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        x, y = float(self.x), float(self.y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GeometryError(f"non-finite point ({x}, {y})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __iter__(self):
        yield self.x
        yield self.y

    def __add__(self, other):
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Point2(self.x - other.x, self.y - other.y)

    def __mul__(self, k):
        return Point2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other) -> float:
        return self.x * other.y - self.y * other.x

    @property
    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def as_point(p) -> Point2:
    return p if isinstance(p, Point2) else Point2(*p)


@dataclass(frozen=True)
class ToleranceContext:
    """Absolute tolerances anchored to the diameter of the working set."""

    eps_geom: float
    eps_angle: float
    scale: float

    def __post_init__(self):
        if not (self.eps_geom > 0 and self.eps_angle > 0 and self.scale > 0):
            raise GeometryError("tolerances and scale must be positive")
        if not self.eps_geom < self.scale:
            raise GeometryError("eps_geom must be below the working scale")

    @classmethod
    def for_scale(cls, scale: float, rel_eps: float = DEFAULT_REL_EPS,
                  eps_angle: float = DEFAULT_EPS_ANGLE) -> "ToleranceContext":
        return cls(eps_geom=rel_eps * scale, eps_angle=eps_angle, scale=scale)

    @classmethod
    def for_points(cls, points, **kw) -> "ToleranceContext":
        pts = np.asarray([tuple(p) for p in points], dtype=float)
        scale = float(np.max(np.ptp(pts, axis=0))) if len(pts) > 1 else 0.0
        return cls.for_scale(scale if scale > 0 else 1.0, **kw)

    def scaled(self, lam: float) -> "ToleranceContext":
        return ToleranceContext(self.eps_geom * lam, self.eps_angle, self.scale * lam)


@dataclass(frozen=True)
class Circle:
    center: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise GeometryError(f"circle radius must be positive and finite, got {r}")
        object.__setattr__(self, "radius", r)

    def point_at(self, theta: float) -> Point2:
        return Point2(self.center.x + self.radius * math.cos(theta),
                      self.center.y + self.radius * math.sin(theta))

    def signed_distance(self, p) -> float:
        p = as_point(p)
        return p.distance_to(self.center) - self.radius


class RectangleMetrics(NamedTuple):
    diagonal: float
    short: float
    long: float
    aspect: float


@dataclass(frozen=True)
class Rectangle:
    """Four vertices in cyclic order. Validity is checked by :func:`rectangle_metrics`."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(as_point(v) for v in self.vertices)
        if len(vs) != 4:
            raise InvalidRectangle("a rectangle has four vertices")
        object.__setattr__(self, "vertices", vs)

    @classmethod
    def from_center(cls, center, phi: float, w: float, h: float) -> "Rectangle":
        c = as_point(center)
        u = Point2(math.cos(phi), math.sin(phi))
        v = Point2(-math.sin(phi), math.cos(phi))
        hw, hh = 0.5 * w, 0.5 * h
        return cls((c - u * hw - v * hh, c + u * hw - v * hh,
                    c + u * hw + v * hh, c - u * hw + v * hh))


def _default_tol(points) -> ToleranceContext:
    return ToleranceContext.for_points(points)


def right_angle_deviation(a, b, c) -> float:
    """|angle abc - pi/2| in radians."""
    u, v = a - b, c - b
    return abs(math.atan2(abs(u.cross(v)), u.dot(v)) - 0.5 * math.pi)


def complete_rectangle(a, b, c, tol: ToleranceContext | None = None) -> Point2:
    """Fourth vertex of the rectangle with the right angle at ``b``."""
    a, b, c = as_point(a), as_point(b), as_point(c)
    tol = tol or _default_tol((a, b, c))
    if min(a.distance_to(b), b.distance_to(c), a.distance_to(c)) <= tol.eps_geom:
        raise DegenerateTriple(f"coincident vertices among {a}, {b}, {c}")
    dev = right_angle_deviation(a, b, c)
    if dev > tol.eps_angle:
        raise NotRightAngle(f"angle at b deviates from pi/2 by {dev:.3g} rad")
    return Point2(a.x + c.x - b.x, a.y + c.y - b.y)


def is_rectangle(a, b, c, d, tol: ToleranceContext | None = None) -> bool:
    pts = [as_point(p) for p in (a, b, c, d)]
    tol = tol or _default_tol(pts)
    eg = tol.eps_geom
    sides = [pts[i].distance_to(pts[(i + 1) % 4]) for i in range(4)]
    if min(sides) <= eg:
        return False
    if abs(sides[0] - sides[2]) > eg or abs(sides[1] - sides[3]) > eg:
        return False
    for i in range(4):
        if right_angle_deviation(pts[i - 1], pts[i], pts[(i + 1) % 4]) > tol.eps_angle:
            return False
    d1, d2 = pts[0].distance_to(pts[2]), pts[1].distance_to(pts[3])
    if abs(d1 - d2) > eg:
        return False
    m1 = (pts[0] + pts[2]) * 0.5
    m2 = (pts[1] + pts[3]) * 0.5
    return m1.distance_to(m2) <= eg


def rectangle_metrics(r: Rectangle, tol: ToleranceContext | None = None) -> RectangleMetrics:
    a, b, c, d = r.vertices
    if not is_rectangle(a, b, c, d, tol):
        raise InvalidRectangle("vertices do not form a rectangle within tolerance")
    s1, s2 = a.distance_to(b), b.distance_to(c)
    short, long_ = min(s1, s2), max(s1, s2)
    diag = 0.5 * (a.distance_to(c) + b.distance_to(d))
    return RectangleMetrics(diag, short, long_, short / long_)


# -- circle/circle intersection ------------------------------------------------

@dataclass(frozen=True)
class Disjoint:
    count = 0


@dataclass(frozen=True)
class Tangent:
    point: Point2
    count = 1


@dataclass(frozen=True)
class Two:
    p: Point2
    q: Point2
    count = 2


@dataclass(frozen=True)
class Coincident:
    count = math.inf


IntersectionResult = Disjoint | Tangent | Two | Coincident


def circle_circle_intersect(c1: Circle, c2: Circle,
                            tol: ToleranceContext | None = None) -> IntersectionResult:
    """Classify the intersection of two circles.

    Tangency is a band of half-width ``eps_geom`` around ``r1 + r2`` and
    ``|r1 - r2|``, so nearly-touching circles report a single point.
    """
    if tol is None:
        tol = ToleranceContext.for_scale(2 * max(c1.radius, c2.radius)
                                         + c1.center.distance_to(c2.center))
    eg = tol.eps_geom
    dx, dy = c2.center.x - c1.center.x, c2.center.y - c1.center.y
    dist = math.hypot(dx, dy)
    r1, r2 = c1.radius, c2.radius
    if dist <= eg:
        return Coincident() if abs(r1 - r2) <= eg else Disjoint()
    ux, uy = dx / dist, dy / dist
    if abs(dist - (r1 + r2)) <= eg:
        # external tangency: average the two candidate points
        p1 = (c1.center.x + r1 * ux, c1.center.y + r1 * uy)
        p2 = (c2.center.x - r2 * ux, c2.center.y - r2 * uy)
        return Tangent(Point2(0.5 * (p1[0] + p2[0]), 0.5 * (p1[1] + p2[1])))
    if abs(dist - abs(r1 - r2)) <= eg:
        s = 1.0 if r1 >= r2 else -1.0
        p1 = (c1.center.x + s * r1 * ux, c1.center.y + s * r1 * uy)
        p2 = (c2.center.x + s * r2 * ux, c2.center.y + s * r2 * uy)
        return Tangent(Point2(0.5 * (p1[0] + p2[0]), 0.5 * (p1[1] + p2[1])))
    if dist > r1 + r2 or dist < abs(r1 - r2):
        return Disjoint()
    along = (dist * dist + r1 * r1 - r2 * r2) / (2 * dist)
    h = math.sqrt(max(r1 * r1 - along * along, 0.0))
    mx, my = c1.center.x + along * ux, c1.center.y + along * uy
    return Two(Point2(mx - h * uy, my + h * ux), Point2(mx + h * uy, my - h * ux))


def points_array(points: Sequence) -> np.ndarray:
    """Coerce a sequence of points (or an (n, 2) array) to a float array."""
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        arr = np.array([tuple(p) for p in points], dtype=float).reshape(-1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError("expected an (n, 2) array of points")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("non-finite coordinates")
    return arr
