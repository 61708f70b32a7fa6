"""Closed sampled curves, support-function bodies and curve generators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .errors import BadParameter, ConvexityViolation, GeometryError, NotConvex
from .geom import DEFAULT_EPS_ANGLE, Point2, ToleranceContext, as_point, points_array

TWO_PI = 2.0 * math.pi


# -- point-to-polyline distance ------------------------------------------------

def _segment_distance(q, a, b):
    """Row-wise distance from q[k] to segment a[k]b[k]."""
    ab = b - a
    aq = q - a
    den = np.einsum("ij,ij->i", ab, ab)
    t = np.where(den > 0, np.einsum("ij,ij->i", aq, ab) / np.where(den > 0, den, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    foot = a + t[:, None] * ab
    return np.hypot(*(q - foot).T)


class Polyline:
    """Open or closed polyline with exact point-to-polyline distances.

    A query first examines the segments incident to its k nearest vertices.
    Any other segment has both endpoints at least d_k (the k-th vertex
    distance) away, hence lies at least d_k - L/2 away for longest segment
    L; a candidate minimum below that bound is the exact answer. The rest
    fall back to a wider ball search.
    """

    K_NEAREST = 8

    def __init__(self, points, closed: bool = True):
        from scipy.spatial import cKDTree
        self.points = points_array(points)
        self.closed = bool(closed)
        if len(self.points) < 2:
            raise GeometryError("a polyline needs at least two points")
        if self.closed:
            self.a, self.b = self.points, np.roll(self.points, -1, axis=0)
        else:
            self.a, self.b = self.points[:-1], self.points[1:]
        self.max_segment = float(np.hypot(*(self.b - self.a).T).max())
        self._tree = cKDTree(self.points)

    def __call__(self, queries) -> np.ndarray:
        return self.distance(queries)

    def _incident(self, verts):
        nseg = len(self.a)
        if self.closed:
            return verts, (verts - 1) % nseg
        return np.minimum(verts, nseg - 1), np.maximum(verts - 1, 0)

    def distance(self, queries, hint: float | None = None) -> np.ndarray:
        """Exact distances; ``hint`` is accepted for interface symmetry."""
        q = points_array(queries)
        out = np.empty(len(q))
        k = min(self.K_NEAREST, len(self.points))
        for s in range(0, len(q), 1 << 16):
            blk = q[s:s + (1 << 16)]
            dk, vk = self._tree.query(blk, k=k)
            dk, vk = dk.reshape(len(blk), k), vk.reshape(len(blk), k)
            s1, s2 = self._incident(vk)
            segs = np.concatenate([s1, s2], axis=1)
            qq = np.repeat(blk, 2 * k, axis=0)
            d = _segment_distance(qq, self.a[segs.ravel()], self.b[segs.ravel()])
            best = d.reshape(len(blk), 2 * k).min(axis=1)
            if k < len(self.points):
                unsure = np.nonzero(best > dk[:, -1] - 0.5 * self.max_segment)[0]
                if len(unsure):
                    best[unsure] = self._far_distance(blk[unsure])
            out[s:s + len(blk)] = best
        return out

    def _far_distance(self, q):
        # the nearest segment has an endpoint within (nearest vertex distance + max segment)
        dv, _ = self._tree.query(q)
        balls = self._tree.query_ball_point(q, dv + self.max_segment)
        counts = np.array([len(b) for b in balls])
        verts = np.concatenate([np.asarray(b, dtype=np.int64) for b in balls])
        qi = np.repeat(np.arange(len(q)), counts)
        s1, s2 = self._incident(verts)
        segs = np.concatenate([s1, s2])
        qi = np.concatenate([qi, qi])
        d = _segment_distance(q[qi], self.a[segs], self.b[segs])
        out = np.full(len(q), np.inf)
        np.minimum.at(out, qi, d)
        return out


# -- sampled closed curves ---------------------------------------------------

class TangentFrame(NamedTuple):
    point: Point2
    tangent: tuple
    inner_normal: tuple


def signed_area(points) -> float:
    p = points_array(points)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _finite_difference_tangents(points):
    t = np.roll(points, -1, axis=0) - np.roll(points, 1, axis=0)
    return t / np.hypot(*t.T)[:, None]


class SampledCurve:
    """Closed counterclockwise polyline with a unit tangent per vertex.

    Clockwise input is reversed on construction (tangents are reversed and
    negated with it). ``tangents`` defaults to normalized central
    differences; generators pass analytic ones. ``body`` optionally records
    the support function the curve was built from.
    """

    def __init__(self, points, tangents=None, body: "SupportBody | None" = None,
                 tol: ToleranceContext | None = None):
        pts = points_array(points)
        if len(pts) < 8:
            raise BadParameter(f"a sampled curve needs n >= 8 points, got {len(pts)}")
        tan = None if tangents is None else np.array(tangents, dtype=float)
        area = signed_area(pts)
        if area < 0:
            pts = pts[::-1].copy()
            tan = None if tan is None else -tan[::-1]
            area = -area
        if not area > 0:
            raise GeometryError("curve encloses no area")
        self.tol = tol or ToleranceContext.for_points(pts)
        edges = np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)
        if edges.min() <= self.tol.eps_geom:
            raise GeometryError("consecutive points coincide")
        if tan is None:
            tan = _finite_difference_tangents(pts)
        else:
            tan = tan / np.hypot(*tan.T)[:, None]
        self.points = pts
        self.tangents = tan
        self.inner_normals = np.stack([-tan[:, 1], tan[:, 0]], axis=1)
        self.edge_lengths = edges
        self.params = np.concatenate([[0.0], np.cumsum(edges[:-1])])
        self.length = float(edges.sum())
        self.orientation = True  # counterclockwise
        self.area = area
        self.body = body
        for arr in (self.points, self.tangents, self.inner_normals, self.params, self.edge_lengths):
            arr.flags.writeable = False
        self._polyline = None

    def __len__(self):
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def spacing(self) -> float:
        """Largest gap between consecutive samples."""
        return float(self.edge_lengths.max())

    @property
    def diameter(self) -> float:
        return _diameter(self.points)

    @property
    def polyline(self) -> Polyline:
        if self._polyline is None:
            self._polyline = Polyline(self.points, closed=True)
        return self._polyline

    def distance(self, queries, hint: float | None = None) -> np.ndarray:
        return self.polyline.distance(queries, hint)

    def transformed(self, angle: float = 0.0, shift=(0.0, 0.0), reflect: bool = False,
                    scale: float = 1.0) -> "SampledCurve":
        """Image under x -> scale * R(angle) * F x + shift, F = reflection in the y axis.

        A reflection reverses the vertex order to stay counterclockwise, so
        vertex i of the result is vertex n-1-i of the input.
        """
        pts, tan = self.points.copy(), self.tangents.copy()
        if reflect:
            pts[:, 0] *= -1
            tan[:, 0] *= -1
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        pts = scale * pts @ rot.T + np.asarray(shift, dtype=float)
        tan = tan @ rot.T
        if reflect:
            pts, tan = pts[::-1].copy(), -tan[::-1]
        tol = ToleranceContext(self.tol.eps_geom * scale, self.tol.eps_angle, self.tol.scale * scale)
        return SampledCurve(pts, tan, tol=tol)


def _diameter(points) -> float:
    p = points_array(points)
    if len(p) > 2000:
        # diameter is attained on the convex hull
        from scipy.spatial import ConvexHull
        p = p[ConvexHull(p).vertices]
    d = np.hypot(p[:, None, 0] - p[None, :, 0], p[:, None, 1] - p[None, :, 1])
    return float(d.max())


def perimeter(curve: SampledCurve) -> float:
    return curve.length


def tangent_normal_at(curve: SampledCurve, i: int) -> TangentFrame:
    t = curve.tangents[i]
    nrm = curve.inner_normals[i]
    return TangentFrame(Point2(*curve.points[i]), (float(t[0]), float(t[1])),
                        (float(nrm[0]), float(nrm[1])))


def nearest_distance(curve: SampledCurve, p) -> float:
    return float(curve.distance(np.array([tuple(as_point(p))]))[0])


# -- support functions --------------------------------------------------------

class TrigSeries:
    """h(theta) = a0 + sum_k a_k cos(k theta) + b_k sin(k theta)."""

    def __init__(self, a0: float, harmonics: Mapping[int, tuple]):
        self.a0 = float(a0)
        items = sorted((int(k), (float(ab[0]), float(ab[1]))) for k, ab in harmonics.items())
        self.k = np.array([k for k, _ in items], dtype=float)
        self.a = np.array([ab[0] for _, ab in items])
        self.b = np.array([ab[1] for _, ab in items])

    def _trig(self, theta):
        kt = np.multiply.outer(np.asarray(theta, dtype=float), self.k)
        return np.cos(kt), np.sin(kt)

    def h(self, theta):
        c, s = self._trig(theta)
        return self.a0 + c @ self.a + s @ self.b

    def dh(self, theta):
        c, s = self._trig(theta)
        return c @ (self.k * self.b) - s @ (self.k * self.a)

    def radius_of_curvature(self, theta):
        """h + h''."""
        c, s = self._trig(theta)
        w = 1.0 - self.k ** 2
        return self.a0 + c @ (w * self.a) + s @ (w * self.b)

    def arclength(self, theta):
        """Antiderivative of h + h'' vanishing at theta = 0."""
        c, s = self._trig(theta)
        w = (1.0 - self.k ** 2) / self.k
        return self.a0 * np.asarray(theta) + s @ (w * self.a) - (c - 1.0) @ (w * self.b)

    @classmethod
    def from_samples(cls, h) -> "TrigSeries":
        h = np.asarray(h, dtype=float)
        m = len(h)
        c = np.fft.rfft(h) / m
        harm = {}
        for k in range(1, len(c)):
            if 2 * k == m:
                harm[k] = (float(c[k].real), 0.0)
            else:
                harm[k] = (2.0 * float(c[k].real), -2.0 * float(c[k].imag))
        return cls(float(c[0].real), harm)


@dataclass(frozen=True, eq=False)
class SupportBody:
    """Convex body given by its support function sampled at theta_j = 2 pi j / m."""

    h: np.ndarray
    coefficients: TrigSeries | None = None
    width_target: float | None = None
    width_tol: float = 1e-9

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.ndim != 1 or len(h) < 8:
            raise BadParameter("support table needs at least 8 samples")
        h.flags.writeable = False
        object.__setattr__(self, "h", h)
        if not np.all(h > 0):
            raise ConvexityViolation("support function must be positive (origin inside)")
        margin = self.convexity_margin()
        if not np.all(margin > 0):
            j = int(np.argmin(margin))
            raise ConvexityViolation(f"h + h'' = {margin[j]:.3g} <= 0 at theta = {self.thetas[j]:.4f}")
        if self.width_target is not None:
            if len(h) % 2:
                raise BadParameter("constant-width tables need an even number of angles")
            w = self.widths()
            if np.max(np.abs(w - self.width_target)) > self.width_tol * self.width_target:
                raise BadParameter("support table is not of the declared constant width")

    @property
    def m(self) -> int:
        return len(self.h)

    @property
    def thetas(self) -> np.ndarray:
        return TWO_PI * np.arange(self.m) / self.m

    def convexity_margin(self) -> np.ndarray:
        """Discrete h + h'' on the grid (second central difference)."""
        dt = TWO_PI / self.m
        return self.h + (np.roll(self.h, -1) - 2 * self.h + np.roll(self.h, 1)) / dt ** 2

    def widths(self) -> np.ndarray:
        """h(theta) + h(theta + pi) for the first half of the grid."""
        half = self.m // 2
        return self.h[:half] + self.h[half:2 * half]

    def series(self) -> TrigSeries:
        return self.coefficients if self.coefficients is not None else TrigSeries.from_samples(self.h)


def _arclength_uniform(series: TrigSeries, n: int, dense: int = 16) -> np.ndarray:
    """Angles theta_i whose boundary points are equally spaced in arclength."""
    total = TWO_PI * series.a0  # Cauchy: perimeter = integral of h
    grid = np.linspace(0.0, TWO_PI, dense * n + 1)
    s_grid = series.arclength(grid)
    target = total * np.arange(n) / n
    theta = np.interp(target, s_grid, grid)
    for _ in range(3):
        rho = series.radius_of_curvature(theta)
        theta = theta - (series.arclength(theta) - target) / rho
    return theta


def _curve_from_series(series: TrigSeries, n: int, body: SupportBody | None) -> SampledCurve:
    theta = _arclength_uniform(series, n)
    h, dh = series.h(theta), series.dh(theta)
    c, s = np.cos(theta), np.sin(theta)
    pts = np.stack([h * c - dh * s, h * s + dh * c], axis=1)
    tan = np.stack([-s, c], axis=1)
    return SampledCurve(pts, tan, body=body)


def support_to_curve(body: SupportBody, n: int) -> SampledCurve:
    """Boundary p(theta) = h u(theta) + h'(theta) u'(theta), sampled uniformly in arclength.

    Without stored coefficients, h and h' come from the trigonometric
    interpolant of the table.
    """
    if n < 8:
        raise BadParameter("n must be at least 8")
    series = body.series()
    fine = np.linspace(0.0, TWO_PI, 8 * max(n, body.m), endpoint=False)
    if np.min(series.radius_of_curvature(fine)) <= 0:
        raise ConvexityViolation("interpolated support function is not convex")
    return _curve_from_series(series, n, body)


def support_of_points(points, thetas) -> np.ndarray:
    """max_i <p_i, u(theta)> for each angle."""
    p = points_array(points)
    u = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    return (p @ u.T).max(axis=0)


# -- generators ---------------------------------------------------------------

def _check_n(n):
    if int(n) != n or n < 64:
        raise BadParameter(f"generators need n >= 64 samples, got {n}")
    return int(n)


def generate_circle(r: float, n: int, center=(0.0, 0.0)) -> SampledCurve:
    n = _check_n(n)
    if not r > 0:
        raise BadParameter("radius must be positive")
    t = TWO_PI * np.arange(n) / n
    c, s = np.cos(t), np.sin(t)
    pts = np.stack([center[0] + r * c, center[1] + r * s], axis=1)
    return SampledCurve(pts, np.stack([-s, c], axis=1))


def _resample_by_arclength(pos, tangent, n, dense=32):
    t = np.linspace(0.0, TWO_PI, dense * n + 1)
    p = pos(t)
    s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(p, axis=0).T))])
    tt = np.interp(s[-1] * np.arange(n) / n, s, t)
    return pos(tt), tangent(tt)


def generate_ellipse(a: float, b: float, n: int) -> SampledCurve:
    """Axis-aligned ellipse x = a cos t, y = b sin t, near-uniform in arclength."""
    n = _check_n(n)
    if not (a > 0 and b > 0):
        raise BadParameter("semi-axes must be positive")

    def pos(t):
        return np.stack([a * np.cos(t), b * np.sin(t)], axis=1)

    def tangent(t):
        return np.stack([-a * np.sin(t), b * np.cos(t)], axis=1)

    pts, tan = _resample_by_arclength(pos, tangent, n)
    return SampledCurve(pts, tan)


def reuleaux_vertices(k: int, d: float) -> np.ndarray:
    """Vertices of the regular k-gon whose vertex-to-opposite-vertex distance is d."""
    circumradius = d / (2.0 * math.cos(math.pi / (2 * k)))
    phi = 0.5 * math.pi + TWO_PI * np.arange(k) / k
    return circumradius * np.stack([np.cos(phi), np.sin(phi)], axis=1)


def generate_reuleaux(k: int, d: float, n: int) -> SampledCurve:
    """Reuleaux k-gon of width d: k arcs of radius d, uniform in arclength.

    Arc j is centred on vertex j and spans the outward directions
    phi_j + pi +/- pi/(2k). Sample 0 sits on a corner.
    """
    n = _check_n(n)
    if int(k) != k or k < 3 or k % 2 == 0:
        raise BadParameter(f"Reuleaux polygons need odd k >= 3, got {k}")
    if not d > 0:
        raise BadParameter("width must be positive")
    k = int(k)
    verts = reuleaux_vertices(k, d)
    arc_len = math.pi * d / k
    s = math.pi * d * np.arange(n) / n
    j = np.minimum((s // arc_len).astype(int), k - 1)
    start = 0.5 * math.pi + TWO_PI * j / k + math.pi - math.pi / (2 * k)
    psi = start + (s - j * arc_len) / d
    c, sn = np.cos(psi), np.sin(psi)
    pts = verts[j] + d * np.stack([c, sn], axis=1)
    return SampledCurve(pts, np.stack([-sn, c], axis=1))


def _harmonics(coeffs) -> dict:
    out = {}
    for k, v in dict(coeffs).items():
        k = int(k)
        if k < 1 or k % 2 == 0:
            raise BadParameter(f"constant width needs odd harmonics only, got k = {k}")
        out[k] = (float(v), 0.0) if np.isscalar(v) else (float(v[0]), float(v[1]))
    return out


def constant_width_table(d: float, series: TrigSeries, m: int) -> np.ndarray:
    """Support table with h_j + h_{j+m/2} == d holding exactly in floating point.

    For each antipodal pair the larger value (>= d/2) is evaluated and the
    partner is d minus it, which is exact by Sterbenz's lemma.
    """
    half = m // 2
    odd = series.h(TWO_PI * np.arange(half) / m) - series.a0
    big = 0.5 * d + np.abs(odd)
    small = d - big
    h = np.empty(m)
    h[:half] = np.where(odd >= 0, big, small)
    h[half:] = np.where(odd >= 0, small, big)
    return h


def generate_fourier_cw(d: float, coefficients, n: int, m: int | None = None) -> SampledCurve:
    """Constant-width curve with h(theta) = d/2 + odd harmonics.

    ``coefficients`` maps an odd harmonic k to a cosine amplitude or a
    (cos, sin) pair. The attached :class:`SupportBody` has ``m`` grid angles
    (default: n rounded up to even, at least 720).
    """
    n = _check_n(n)
    if not d > 0:
        raise BadParameter("width must be positive")
    series = TrigSeries(0.5 * d, _harmonics(coefficients))
    fine = np.linspace(0.0, TWO_PI, 64 * n, endpoint=False)
    if np.min(series.radius_of_curvature(fine)) <= 0:
        raise ConvexityViolation("coefficients break h + h'' > 0")
    if m is None:
        m = max(720, n + (n % 2))
    body = SupportBody(constant_width_table(d, series, m), series, width_target=d)
    return _curve_from_series(series, n, body)


def circular_arc(r: float, start: float, sweep: float, n: int, center=(0.0, 0.0)) -> Polyline:
    """Open polyline of n points on a circular arc."""
    t = start + sweep * np.arange(n) / (n - 1)
    pts = np.stack([center[0] + r * np.cos(t), center[1] + r * np.sin(t)], axis=1)
    return Polyline(pts, closed=False)


# -- convexity and width -----------------------------------------------------

def turning_angles(points) -> np.ndarray:
    """Signed exterior angle at each vertex of a closed polyline."""
    p = points_array(points)
    e = np.roll(p, -1, axis=0) - p
    prev = np.roll(e, 1, axis=0)
    cross = prev[:, 0] * e[:, 1] - prev[:, 1] * e[:, 0]
    dot = np.einsum("ij,ij->i", prev, e)
    return np.arctan2(cross, dot)


def check_convex(curve: SampledCurve, eps_angle: float = DEFAULT_EPS_ANGLE):
    tau = turning_angles(curve.points)
    if tau.min() < -eps_angle:
        raise NotConvex(f"turning angle regresses by {-tau.min():.3g} rad at vertex {int(np.argmin(tau))}")
    if abs(tau.sum() - TWO_PI) > 1e-6:
        raise NotConvex("curve winds more than once")


def width_function(curve: SampledCurve, m: int = 720, eps_angle: float = DEFAULT_EPS_ANGLE):
    """Caliper widths w(theta_j) for theta_j = pi j / m, j < m.

    Support vertices come from the sorted outward edge normals, so each
    direction costs one binary search. Returns ``(thetas, widths)``.
    """
    check_convex(curve, eps_angle)
    thetas = math.pi * np.arange(m) / m
    return thetas, _support(curve.points, thetas) + _support(curve.points, thetas + math.pi)


def _support(points, thetas):
    e = np.roll(points, -1, axis=0) - points
    normals = np.unwrap(np.arctan2(e[:, 1], e[:, 0]) - 0.5 * math.pi)
    base = normals[0]
    q = base + np.mod(np.asarray(thetas) - base, TWO_PI)
    j = np.searchsorted(normals, q, side="left") % len(points)
    u = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    return np.einsum("ij,ij->i", points[j], u)


def constant_width_check(curve: SampledCurve, d: float, tol: float, m: int = 720) -> bool:
    _, w = width_function(curve, m)
    return bool(np.max(np.abs(w - d)) <= tol)
