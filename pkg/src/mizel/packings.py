"""Packed disks (or squares/ellipses) in a disk, the residual compact K,
and circle probes of K.

K is the closed outer domain minus the union of the open cells. The
packing is finite, so K always has interior; statements about the limit
set are only ever "not found at this depth".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar

from .curves import SampledCurve
from .errors import BadParameter, GeometryError, ResolutionTooLow
from .geom import (Circle, Coincident, Point2, Tangent, ToleranceContext, as_point,
                   circle_circle_intersect, points_array)

TWO_PI = 2.0 * math.pi


# -- cells --------------------------------------------------------------------

@dataclass(frozen=True)
class SquareCell:
    """Open square with the given centre, half side and rotation."""

    center: Point2
    half: float
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.half > 0:
            raise GeometryError("square half side must be positive")

    @property
    def bounding_radius(self) -> float:
        return self.half * math.sqrt(2.0)

    def _local(self, P):
        c, s = math.cos(self.angle), math.sin(self.angle)
        d = P - np.array([self.center.x, self.center.y])
        return np.stack([c * d[:, 0] + s * d[:, 1], -s * d[:, 0] + c * d[:, 1]], axis=1)

    def sd(self, P):
        q = np.abs(self._local(P)) - self.half
        outside = np.hypot(np.maximum(q[:, 0], 0), np.maximum(q[:, 1], 0))
        return outside + np.minimum(np.maximum(q[:, 0], q[:, 1]), 0.0)

    def inside(self, P):
        q = np.abs(self._local(P))
        return (q[:, 0] < self.half) & (q[:, 1] < self.half)

    def corners(self):
        loc = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]]) * self.half
        c, s = math.cos(self.angle), math.sin(self.angle)
        rot = np.array([[c, -s], [s, c]])
        return loc @ rot.T + np.array([self.center.x, self.center.y])


@dataclass(frozen=True)
class EllipseCell:
    """Open ellipse interior with semi-axes a >= b, rotated by ``angle``."""

    center: Point2
    a: float
    b: float
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (self.a > 0 and self.b > 0):
            raise GeometryError("ellipse semi-axes must be positive")

    @property
    def bounding_radius(self) -> float:
        return max(self.a, self.b)

    def _implicit(self, P):
        c, s = math.cos(self.angle), math.sin(self.angle)
        d = P - np.array([self.center.x, self.center.y])
        u = c * d[:, 0] + s * d[:, 1]
        v = -s * d[:, 0] + c * d[:, 1]
        g = (u / self.a) ** 2 + (v / self.b) ** 2 - 1.0
        grad = 2.0 * np.hypot(u / self.a ** 2, v / self.b ** 2)
        return g, grad

    def sd(self, P):
        """First-order signed distance g / |grad g| (exact sign)."""
        g, grad = self._implicit(P)
        return g / np.maximum(grad, 1e-300)

    def inside(self, P):
        return self._implicit(P)[0] < 0


def _circle_sd(c: Circle, P):
    return np.hypot(P[:, 0] - c.center.x, P[:, 1] - c.center.y) - c.radius


def cell_sd(cell, P):
    if isinstance(cell, Circle):
        return _circle_sd(cell, P)
    return cell.sd(P)


def cell_inside(cell, P):
    """Open interior."""
    if isinstance(cell, Circle):
        return np.hypot(P[:, 0] - cell.center.x, P[:, 1] - cell.center.y) < cell.radius
    return cell.inside(P)


def _outer_contains(outer, P):
    """Closed outer domain."""
    if isinstance(outer, Circle):
        return np.hypot(P[:, 0] - outer.center.x, P[:, 1] - outer.center.y) <= outer.radius
    q = np.abs(outer._local(P))
    return (q[:, 0] <= outer.half) & (q[:, 1] <= outer.half)


def _center(cell):
    return cell.center


def _bounding_radius(cell):
    return cell.radius if isinstance(cell, Circle) else cell.bounding_radius


# -- packings -----------------------------------------------------------------

@dataclass(frozen=True)
class DiskPacking:
    outer: Circle
    inner: tuple
    depth: int
    rng_seed: int | None = None
    eps_geom: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "inner", tuple(self.inner))
        if self.eps_geom == 0.0:
            object.__setattr__(self, "eps_geom", 1e-9 * 2 * self.outer.radius)

    @property
    def cells(self):
        return self.inner

    def violations(self) -> list:
        """Every failed containment/disjointness check (exhaustive)."""
        return _packing_violations(self.outer, self.inner, self.eps_geom)

    def coverage(self) -> float:
        return sum(c.radius ** 2 for c in self.inner) / self.outer.radius ** 2

    def prefix(self, k: int) -> "DiskPacking":
        return DiskPacking(self.outer, self.inner[:k], k, self.rng_seed, self.eps_geom)


@dataclass(frozen=True)
class ShapePacking:
    """Open squares or ellipses packed inside a closed disk or square."""

    outer: object
    cells: tuple
    depth: int
    rng_seed: int | None = None
    eps_geom: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        if self.eps_geom == 0.0:
            object.__setattr__(self, "eps_geom", 1e-9 * 2 * _bounding_radius(self.outer))

    def violations(self) -> list:
        return _packing_violations(self.outer, self.cells, self.eps_geom)


def _packing_violations(outer, cells, eps):
    """Conservative checks: bounding circles of distinct cells are separated by
    more than eps, and every bounding circle sits strictly inside the outer
    domain (for a square outer, its inscribed disk)."""
    problems = []
    R = _bounding_radius(outer) if isinstance(outer, Circle) else outer.half
    oc = np.array([outer.center.x, outer.center.y])
    cs = np.array([[c.center.x, c.center.y] for c in cells]).reshape(-1, 2)
    rs = np.array([_bounding_radius(c) for c in cells])
    for i in range(len(cells)):
        if not math.hypot(*(cs[i] - oc)) + rs[i] < R - eps:
            problems.append(("containment", i))
        for j in range(i + 1, len(cells)):
            if not math.hypot(*(cs[i] - cs[j])) > rs[i] + rs[j] + eps:
                problems.append(("overlap", i, j))
    return problems


def greedy_circle_packing(outer: Circle, min_r: float, max_count: int, seed: int = 0,
                          trials: int = 2000, max_r: float | None = None,
                          gap: float | None = None) -> DiskPacking:
    """Rejection-sampled packing with shrink-to-fit radii.

    Candidate centres are uniform in the outer disk; each takes the largest
    radius (capped at ``max_r``, default R/3) that keeps ``gap`` clear of the
    outer circle and of every disk placed so far. Stops after ``max_count``
    disks or ``trials`` consecutive candidates below ``min_r``. A run with a
    larger ``max_count`` extends the smaller run's disk list.
    """
    R = outer.radius
    if not 0 < min_r < R / 2:
        raise BadParameter("need 0 < min_r < outer radius / 2")
    if max_count < 0:
        raise BadParameter("max_count must be non-negative")
    max_r = R / 3 if max_r is None else max_r
    gap = 1e-3 * R if gap is None else gap
    rng = np.random.default_rng(seed)
    cx, cy = outer.center.x, outer.center.y
    centers = np.zeros((0, 2))
    radii = np.zeros(0)
    fails = 0
    while len(radii) < max_count and fails < trials:
        rho = R * math.sqrt(rng.random())
        th = TWO_PI * rng.random()
        p = np.array([cx + rho * math.cos(th), cy + rho * math.sin(th)])
        fit = R - rho - gap
        if len(radii):
            fit = min(fit, float(np.min(np.hypot(*(centers - p).T) - radii)) - gap)
        r = min(fit, max_r)
        if r >= min_r:
            centers = np.vstack([centers, p])
            radii = np.append(radii, r)
            fails = 0
        else:
            fails += 1
    inner = tuple(Circle(Point2(*c), float(r)) for c, r in zip(centers, radii))
    return DiskPacking(outer, inner, len(inner), seed)


def greedy_shape_packing(outer: Circle, shape: str, min_r: float, max_count: int, seed: int = 0,
                         aspect_range=(0.4, 0.9), **kw) -> ShapePacking:
    """Squares or ellipses inscribed in the disks of a greedy disk packing.

    Each shape lies inside its disk, so disjointness is inherited.
    """
    disks = greedy_circle_packing(outer, min_r, max_count, seed, **kw)
    rng = np.random.default_rng([seed, 1])
    cells = []
    for disk in disks.inner:
        ang = float(rng.uniform(0, math.pi))
        if shape == "square":
            cells.append(SquareCell(disk.center, disk.radius / math.sqrt(2.0), ang))
        elif shape == "ellipse":
            ratio = float(rng.uniform(*aspect_range))
            cells.append(EllipseCell(disk.center, disk.radius, disk.radius * ratio, ang))
        else:
            raise BadParameter(f"unknown cell shape {shape!r}")
    return ShapePacking(outer, cells, len(cells), seed, disks.eps_geom)


# -- the residual compact -----------------------------------------------------

@dataclass(frozen=True)
class CompactSetK:
    packing: DiskPacking | ShapePacking

    @property
    def outer(self):
        return self.packing.outer

    @property
    def cells(self):
        return self.packing.cells

    @property
    def eps_geom(self) -> float:
        return self.packing.eps_geom

    @cached_property
    def _disk_arrays(self):
        if not all(isinstance(c, Circle) for c in self.cells):
            return None
        cc = np.array([[c.center.x, c.center.y] for c in self.cells]).reshape(-1, 2)
        return cc, np.array([c.radius for c in self.cells])

    def contains(self, P) -> np.ndarray:
        P = points_array(P)
        ok = _outer_contains(self.outer, P)
        arrays = self._disk_arrays
        if arrays is None:
            for c in self.cells:
                ok &= ~cell_inside(c, P)
            return ok
        cc, rr = arrays
        for s in range(0, len(rr), 64):
            d = np.hypot(P[:, None, 0] - cc[None, s:s + 64, 0], P[:, None, 1] - cc[None, s:s + 64, 1])
            ok &= ~np.any(d < rr[None, s:s + 64], axis=1)
        return ok

    def near_circle(self, probe: Circle, margin: float) -> "CompactSetK":
        """Same outer domain, keeping only cells that can reach the probe circle."""
        keep = []
        for c in self.cells:
            dist = math.hypot(c.center.x - probe.center.x, c.center.y - probe.center.y)
            if abs(dist - probe.radius) <= _bounding_radius(c) + margin:
                keep.append(c)
        if len(keep) == len(self.cells):
            return self
        pk = self.packing
        return CompactSetK(replace(pk, **{"inner" if isinstance(pk, DiskPacking) else "cells": tuple(keep)}))

    def depth_function(self, P) -> np.ndarray:
        """<= 0 exactly on K (up to the first-order ellipse distance)."""
        P = points_array(P)
        out = cell_sd(self.outer, P) if isinstance(self.outer, Circle) else self.outer.sd(P)
        for c in self.cells:
            out = np.maximum(out, -cell_sd(c, P))
        return out


def k_membership(K: CompactSetK, p) -> bool:
    return bool(K.contains(np.array([tuple(as_point(p))]))[0])


@dataclass
class ProbeResult:
    components: int
    has_full_arc: bool
    samples_used: int
    # (start angle, angular measure) per component, start in [0, 2 pi)
    arcs: list = field(default_factory=list)
    isolated_points: list = field(default_factory=list)

    @property
    def verdict(self):
        return math.inf if self.has_full_arc else self.components

    @property
    def isolated_count(self) -> int:
        return self.components


def _bisect(pred, lo, hi, iters):
    """Vectorized bisection; pred(lo) differs from pred(hi) on entry."""
    f_lo = pred(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        f_mid = pred(mid)
        same = f_mid == f_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return lo, hi


def _angle_in_arcs(theta, arcs, slack):
    for start, measure in arcs:
        if (theta - start + slack) % TWO_PI <= measure + 2 * slack:
            return True
    return False


def _tangencies(K: CompactSetK, probe: Circle, tol: ToleranceContext, grid_theta, depth):
    """Isolated touch points of the probe with the boundary of K.

    Circles are exact via circle/circle classification; other cells are
    found as local minima of K's depth function along the probe.
    """
    pts = []
    coincident = False
    circles = [c for c in (K.outer, *K.cells) if isinstance(c, Circle)]
    for c in circles:
        res = circle_circle_intersect(probe, c, tol)
        if isinstance(res, Coincident):
            coincident = True
        elif isinstance(res, Tangent):
            th = math.atan2(res.point.y - probe.center.y, res.point.x - probe.center.x) % TWO_PI
            pts.append(th)
    if any(not isinstance(c, Circle) for c in (K.outer, *K.cells)):
        n = len(grid_theta)
        step = TWO_PI / n
        loc = np.nonzero((depth > 0) & (depth <= np.roll(depth, 1)) & (depth <= np.roll(depth, -1)))[0]
        for j in loc:
            def f(t):
                return float(K.depth_function(np.array([[probe.center.x + probe.radius * math.cos(t),
                                                          probe.center.y + probe.radius * math.sin(t)]]))[0])
            r = minimize_scalar(f, bounds=(grid_theta[j] - step, grid_theta[j] + step), method="bounded",
                                options={"xatol": 1e-13})
            if r.fun <= tol.eps_geom:
                pts.append(float(r.x) % TWO_PI)
    return pts, coincident


def probe_circle_intersection(K: CompactSetK, probe: Circle, angular_resolution: int = 3600,
                              full_arc_samples: int = 4,
                              tol: ToleranceContext | None = None) -> ProbeResult:
    """Connected components of probe ∩ K.

    Membership is sampled at ``angular_resolution`` angles, each in/out
    transition is bisected down to eps_geom, and exact tangencies are
    merged in as zero-measure components. A component wider than
    ``full_arc_samples`` sample steps counts as an arc (infinitely many
    points).
    """
    if angular_resolution < 3600:
        raise BadParameter("angular_resolution must be at least 3600")
    tol = tol or ToleranceContext(K.eps_geom, 1e-9, 2 * _bounding_radius(K.outer))
    K = K.near_circle(probe, 4 * tol.eps_geom)
    N = int(angular_resolution)
    step = TWO_PI / N
    theta = step * np.arange(N)
    cx, cy, rho = probe.center.x, probe.center.y, probe.radius

    def on_probe(t):
        return np.stack([cx + rho * np.cos(t), cy + rho * np.sin(t)], axis=1)

    inside = K.contains(on_probe(theta))
    needs_depth = any(not isinstance(c, Circle) for c in (K.outer, *K.cells))
    depth = K.depth_function(on_probe(theta)) if needs_depth else None
    touch, coincident = _tangencies(K, probe, tol, theta, depth)
    if coincident or inside.all():
        return ProbeResult(1, True, N, [(0.0, TWO_PI)], [])
    trans = np.nonzero(inside != np.roll(inside, -1))[0]
    if len(trans) > N / 8:
        raise ResolutionTooLow(f"{len(trans)} transitions at resolution {N}")
    arcs = []
    if len(trans):
        iters = max(1, int(math.ceil(math.log2(step * rho / tol.eps_geom))))
        lo, hi = _bisect(lambda t: K.contains(on_probe(t)), theta[trans], theta[trans] + step, iters)
        entering = ~inside[trans]  # out -> in
        bounds = np.where(entering, hi, lo)
        # pair each entry with the next exit going counterclockwise
        k0 = int(np.argmax(entering))
        order = np.roll(np.arange(len(trans)), -k0)
        for a, b in zip(order[0::2], order[1::2]):
            start, end = bounds[a], bounds[b]
            arcs.append((float(start % TWO_PI), float((end - start) % TWO_PI)))
    slack = 2 * tol.eps_geom / rho
    isolated = []
    for th in sorted(touch):
        if not _angle_in_arcs(th, arcs, slack) and not _angle_in_arcs(th, [(t, 0.0) for t in isolated], slack):
            isolated.append(th)
    full = any(m > full_arc_samples * step for _, m in arcs)
    return ProbeResult(len(arcs) + len(isolated), full, N, arcs, isolated)


# -- circle/curve intersection counting and the exactly-m search -----------------

def curve_circle_components(curve: SampledCurve, probe: Circle, eps: float | None = None,
                            full_arc_samples: int = 4):
    """(components, has_full_arc) of the sign pattern of |p_i - center| - radius.

    Vertices within ``eps`` of the probe form zero runs; each zero run and
    each direct sign change between neighbours is one component.
    """
    eps = curve.tol.eps_geom if eps is None else eps
    f = np.hypot(curve.points[:, 0] - probe.center.x, curve.points[:, 1] - probe.center.y) - probe.radius
    sgn = np.where(np.abs(f) <= eps, 0, np.sign(f)).astype(int)
    if np.all(sgn == 0):
        return 1, True
    # rotate so the sequence starts on a nonzero sign
    s = np.roll(sgn, -int(np.argmax(sgn != 0)))
    zero = s == 0
    starts = np.nonzero(zero & ~np.roll(zero, 1))[0]
    ends = np.nonzero(zero & ~np.roll(zero, -1))[0]
    runs = ends - starts + 1  # s[0] != 0, so runs never wrap
    prev = np.roll(s, 1)
    direct = int(np.count_nonzero(~zero & (prev != 0) & (s != prev)))
    return len(runs) + direct, bool(np.any(runs >= full_arc_samples))


@dataclass
class SearchResult:
    probe: Circle | None
    probes_tried: int
    budget: int
    m: int
    result: object = None

    @property
    def found(self) -> bool:
        return self.probe is not None

    def describe(self) -> str:
        if self.found:
            return f"found a probe with exactly {self.m} points after {self.probes_tried} probes"
        return f"not found within budget ({self.probes_tried} of {self.budget} probes)"


def _curve_probe(rng, curve: SampledCurve, family):
    P = curve.points
    lo, hi = P.min(axis=0), P.max(axis=0)
    diam = float(np.max(hi - lo))
    if family == "random":
        c = lo - 0.25 * diam + rng.random(2) * (hi - lo + 0.5 * diam)
        return Circle(Point2(*c), float(rng.uniform(0.01, 1.5) * diam))
    i = int(rng.integers(len(P)))
    rho = float(rng.uniform(0.01, 2.0) * diam)
    side = 1.0 if rng.random() < 0.75 else -1.0
    c = P[i] + side * rho * curve.inner_normals[i]
    return Circle(Point2(*c), rho)


def _packing_probe(rng, K: CompactSetK, family):
    outer = K.outer
    R = _bounding_radius(outer)
    oc = np.array([outer.center.x, outer.center.y])
    if family == "random" or not K.cells:
        c = oc + rng.uniform(-1.3, 1.3, 2) * R
        return Circle(Point2(*c), float(rng.uniform(0.01, 1.5) * R))
    cell = K.cells[int(rng.integers(len(K.cells)))]
    r = _bounding_radius(cell)
    cc = np.array([cell.center.x, cell.center.y])
    u = rng.normal(size=2)
    u /= np.hypot(*u)
    kind = rng.integers(4)
    if kind == 0:  # internally tangent to the cell's bounding circle
        rho = float(rng.uniform(0.05, 0.999) * r)
        return Circle(Point2(*(cc + (r - rho) * u)), rho)
    if kind == 1:  # externally tangent
        rho = float(rng.uniform(0.05, 1.0) * R)
        return Circle(Point2(*(cc + (r + rho) * u)), rho)
    if kind == 2:  # concentric
        return Circle(Point2(*cc), float(rng.uniform(0.05, 2.0) * r))
    # internally tangent to the outer circle
    rho = float(rng.uniform(0.05, 0.999) * R)
    return Circle(Point2(*(oc + (R - rho) * u)), rho)


def exactly_m_search(target, m: int, probe_family: str = "structured", budget: int = 10_000,
                     seed: int = 0, angular_resolution: int = 3600) -> SearchResult:
    """Draw probe circles until one meets ``target`` in exactly ``m`` isolated
    components with no arc. ``target`` is a :class:`CompactSetK` or a
    :class:`SampledCurve`. Failure only means none was found within budget.
    """
    if m < 1 or budget < 1:
        raise BadParameter("need m >= 1 and budget >= 1")
    if probe_family not in ("random", "structured"):
        raise BadParameter(f"unknown probe family {probe_family!r}")
    rng = np.random.default_rng(seed)
    for k in range(1, budget + 1):
        if isinstance(target, SampledCurve):
            probe = _curve_probe(rng, target, probe_family)
            comps, full = curve_circle_components(target, probe)
            res = (comps, full)
        else:
            probe = _packing_probe(rng, target, probe_family)
            try:
                res = probe_circle_intersection(target, probe, angular_resolution)
            except ResolutionTooLow:
                continue
            comps, full = res.components, res.has_full_arc
        if comps == m and not full:
            return SearchResult(probe, k, budget, m, res)
    return SearchResult(None, budget, budget, m)
