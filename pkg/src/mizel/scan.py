"""Search sampled sets for rectangle-property violations.

A violation is a triple (a, b, c) of set points with a right angle at b
whose completed fourth vertex a + c - b lies farther than
``membership_tol`` from the set. Triples range over the samples; the
fourth vertex is tested against the continuous membership distance, so a
reported violation is always genuine at the stated tolerance while
coarse sampling may miss some.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .curves import Polyline, SampledCurve, _diameter
from .errors import BadParameter, EmptySet
from .geom import Point2, RectangleMetrics, ToleranceContext, points_array
from .spatial import SpatialIndex, build_index

_ANGLE_SLACK = 1e-9
_REL_SLACK = 1e-12


@dataclass(frozen=True)
class ScanConstraints:
    """Which rectangles a scan considers, and how membership is judged.

    ``diagonal_tol`` is the half-width of the band around ``diagonal``;
    it defaults to ``membership_tol`` because sample triples never hit an
    exact length.
    """

    membership_tol: float
    angle_tol: float
    diagonal: float | None = None
    diagonal_tol: float | None = None
    max_aspect: float | None = None
    max_short_side: float | None = None
    eps_distinct: float = 0.0

    def __post_init__(self):
        if not self.membership_tol > 0:
            raise BadParameter("membership_tol must be positive")
        if not 0 < self.angle_tol < math.pi / 4:
            raise BadParameter("angle_tol must lie in (0, pi/4)")
        if self.max_aspect is not None and self.max_short_side is not None:
            raise BadParameter("set at most one of max_aspect and max_short_side")
        if self.max_aspect is not None and not 0 < self.max_aspect <= 1:
            raise BadParameter("max_aspect must lie in (0, 1]")
        if self.max_short_side is not None:
            if not self.max_short_side > 0:
                raise BadParameter("max_short_side must be positive")
            if self.diagonal is not None and not self.max_short_side < self.diagonal:
                raise BadParameter("max_short_side must be below the diagonal")
        if self.diagonal is not None and not self.diagonal > 0:
            raise BadParameter("diagonal must be positive")
        if self.diagonal_tol is None:
            object.__setattr__(self, "diagonal_tol", self.membership_tol)
        elif not self.diagonal_tol >= 0:
            raise BadParameter("diagonal_tol must be non-negative")

    @classmethod
    def for_curve(cls, curve: SampledCurve, **kw) -> "ScanConstraints":
        """Defaults: membership_tol = 2 x max spacing, angle_tol = membership_tol / (4 x diameter)."""
        mtol = kw.pop("membership_tol", None) or 2.0 * curve.spacing
        atol = kw.pop("angle_tol", None) or mtol / (4.0 * curve.diameter)
        kw.setdefault("eps_distinct", curve.tol.eps_geom)
        return cls(membership_tol=mtol, angle_tol=atol, **kw)

    def scaled(self, lam: float) -> "ScanConstraints":
        def s(v):
            return None if v is None else v * lam
        return replace(self, membership_tol=self.membership_tol * lam, diagonal=s(self.diagonal),
                       diagonal_tol=s(self.diagonal_tol), max_short_side=s(self.max_short_side),
                       eps_distinct=self.eps_distinct * lam)


@dataclass(frozen=True)
class RectangleWitness:
    a: Point2
    b: Point2
    c: Point2
    fourth: Point2
    fourth_distance: float
    metrics: RectangleMetrics
    indices: tuple = field(default=(), compare=False)

    @property
    def triple(self):
        return (self.a, self.b, self.c)

    def sort_key(self):
        return (-self.fourth_distance, self.a.x, self.a.y, self.b.x, self.b.y, self.c.x, self.c.y)


class ScanReport:
    """Outcome of a scan. Violations are held as arrays sorted by descending
    fourth-vertex distance, then by coordinates; :attr:`violations` builds
    the witness objects on first access."""

    def __init__(self, P, viol, dist, satisfied_count, triples_examined, runtime,
                 membership_tol, budget_exhausted=False):
        a, b, c = P[viol.ia], P[viol.ib], P[viol.ic]
        order = np.lexsort((c[:, 1], c[:, 0], b[:, 1], b[:, 0], a[:, 1], a[:, 0], -dist))
        self.arrays = {
            "indices": np.stack([viol.ia, viol.ib, viol.ic], axis=1)[order],
            "a": a[order], "b": b[order], "c": c[order],
            "fourth": (a + c - b)[order],
            "fourth_distance": dist[order],
            "diagonal": viol.diagonal[order], "short": viol.short[order], "long": viol.long[order],
        }
        self.satisfied_count = satisfied_count
        self.triples_examined = triples_examined
        self.runtime = runtime
        self.n_points = len(P)
        self.membership_tol = membership_tol
        self.budget_exhausted = budget_exhausted
        self._witnesses = None

    @property
    def violation_count(self) -> int:
        return len(self.arrays["fourth_distance"])

    def witness(self, k: int) -> RectangleWitness:
        if self._witnesses is not None:
            return self._witnesses[k]
        A = self.arrays
        short, long_ = float(A["short"][k]), float(A["long"][k])
        return RectangleWitness(Point2(*A["a"][k]), Point2(*A["b"][k]), Point2(*A["c"][k]),
                                Point2(*A["fourth"][k]), float(A["fourth_distance"][k]),
                                RectangleMetrics(float(A["diagonal"][k]), short, long_, short / long_),
                                tuple(int(i) for i in A["indices"][k]))

    @property
    def violations(self) -> list:
        if self._witnesses is None:
            self._witnesses = [self.witness(k) for k in range(self.violation_count)]
        return self._witnesses

    @property
    def holds(self) -> bool:
        return self.violation_count == 0

    def summary(self) -> str:
        flag = " (budget exhausted, partial)" if self.budget_exhausted else ""
        return (f"{self.violation_count} violations, {self.satisfied_count} satisfied, "
                f"{self.triples_examined} triples at n={self.n_points}{flag}")


class PointSetMembership:
    """Distance to a finite point set."""

    def __init__(self, points, cell: float | None = None):
        self.points = points_array(points)
        if cell is None:
            cell = max(_diameter(self.points) / 64.0, 1e-12) if len(self.points) > 1 else 1.0
        self.index = build_index(self.points, cell)

    def __call__(self, queries):
        return self.distance(queries)

    def distance(self, queries, hint=None):
        return self.index.nearest_distance(queries, hint)


def _membership_fn(membership) -> Callable:
    if isinstance(membership, (SampledCurve, Polyline)):
        return membership.distance
    if hasattr(membership, "distance"):
        return membership.distance
    if callable(membership):
        return lambda q, hint=None: np.asarray(membership(q), dtype=float)
    raise TypeError("membership must be a curve, polyline, or distance function")


class _Triples(NamedTuple):
    ia: np.ndarray
    ib: np.ndarray
    ic: np.ndarray
    diagonal: np.ndarray
    short: np.ndarray
    long: np.ndarray


def accept_triples(P, ia, ib, ic, cons: ScanConstraints) -> _Triples:
    """Apply the right-angle and rectangle constraints to candidate triples.

    Shared by the pruned scan and the brute-force enumeration, so both
    classify every triple identically.
    """
    u = P[ia] - P[ib]
    v = P[ic] - P[ib]
    la = np.hypot(u[:, 0], u[:, 1])
    lc = np.hypot(v[:, 0], v[:, 1])
    w = P[ia] - P[ic]
    diag = np.hypot(w[:, 0], w[:, 1])
    dot = u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]
    eg = cons.eps_distinct
    ok = (la > eg) & (lc > eg) & (diag > eg)
    ok &= np.abs(dot) <= math.sin(cons.angle_tol) * la * lc
    short = np.minimum(la, lc)
    long_ = np.maximum(la, lc)
    if cons.diagonal is not None:
        ok &= np.abs(diag - cons.diagonal) <= cons.diagonal_tol
    if cons.max_aspect is not None:
        ok &= short <= cons.max_aspect * long_
    if cons.max_short_side is not None:
        ok &= short <= cons.max_short_side
    return _Triples(ia[ok], ib[ok], ic[ok], diag[ok], short[ok], long_[ok])


class _Kernel:
    """Candidate generation around one right-angle vertex b.

    The partner of b along the short side is fetched from the spatial
    index (its distance is bounded by the side constraints); the opposite
    vertex is then found by binary search in the polar angles around b,
    within angle_tol of the directions orthogonal to the partner.
    Candidates form a superset of the accepted triples.
    """

    def __init__(self, P, cons: ScanConstraints, diameter: float):
        self.P = P
        self.cons = cons
        self.n = len(P)
        slack = 1.0 + _REL_SLACK
        reach_partner = diameter
        reach_other = diameter
        if cons.diagonal is not None:
            # with angle b = pi/2 +- angle_tol a side reaches diagonal / cos(angle_tol)
            reach_other = (cons.diagonal + cons.diagonal_tol) / math.cos(cons.angle_tol) * slack
            reach_partner = reach_other
        if cons.max_short_side is not None:
            reach_partner = min(reach_partner, cons.max_short_side * slack)
        elif cons.max_aspect is not None:
            reach_partner = min(reach_partner, cons.max_aspect * diameter * slack)
        self.reach_partner = reach_partner * slack + 1e-300
        self.reach_other = reach_other * slack + 1e-300
        self.full_partner = self.reach_partner >= diameter
        self.full_other = self.reach_other >= diameter
        cell = max(self.reach_partner, 1e-12 * max(diameter, 1e-300))
        self.index = SpatialIndex(P, cell)
        self.window = cons.angle_tol + _ANGLE_SLACK
        self.all_idx = np.arange(self.n)

    def _near(self, ib, reach, full):
        if full:
            return self.all_idx
        if reach > 8 * self.index.cell:
            d = np.hypot(*(self.P - self.P[ib]).T)
            return np.nonzero(d <= reach)[0]
        return self.index.query(self.P[ib], reach)

    def candidates(self, ib):
        P = self.P
        others = self._near(ib, self.reach_other, self.full_other)
        others = others[others != ib]
        partners = self._near(ib, self.reach_partner, self.full_partner)
        partners = partners[partners != ib]
        if len(others) < 1 or len(partners) < 1:
            return None
        vo = P[others] - P[ib]
        phi = np.arctan2(vo[:, 1], vo[:, 0])
        order = np.argsort(phi, kind="stable")
        phi_s = phi[order]
        ext = np.concatenate([phi_s - 2 * math.pi, phi_s, phi_s + 2 * math.pi])
        ext_idx = np.tile(others[order], 3)
        vp = P[partners] - P[ib]
        phi_p = np.arctan2(vp[:, 1], vp[:, 0])
        ia_parts, ic_parts = [], []
        for sign in (0.5 * math.pi, -0.5 * math.pi):
            t = np.mod(phi_p + sign + math.pi, 2 * math.pi) - math.pi
            lo = np.searchsorted(ext, t - self.window, side="left")
            hi = np.searchsorted(ext, t + self.window, side="right")
            cnt = hi - lo
            tot = int(cnt.sum())
            if tot == 0:
                continue
            start = np.repeat(lo - np.cumsum(cnt) + cnt, cnt)
            ia_parts.append(np.repeat(partners, cnt))
            ic_parts.append(ext_idx[np.arange(tot) + start])
        if not ia_parts:
            return None
        x = np.concatenate(ia_parts)
        y = np.concatenate(ic_parts)
        lo_, hi_ = np.minimum(x, y), np.maximum(x, y)
        keep = lo_ != hi_
        key = np.unique(lo_[keep] * self.n + hi_[keep])
        return key // self.n, key % self.n

    def accept_block(self, ibs):
        ia_l, ib_l, ic_l = [], [], []
        for ib in ibs:
            cand = self.candidates(ib)
            if cand is None:
                continue
            ia, ic = cand
            ia_l.append(ia)
            ic_l.append(ic)
            ib_l.append(np.full(len(ia), ib))
        if not ia_l:
            empty = np.zeros(0, np.int64)
            return accept_triples(self.P, empty, empty, empty, self.cons)
        return accept_triples(self.P, np.concatenate(ia_l), np.concatenate(ib_l),
                              np.concatenate(ic_l), self.cons)


def brute_force_triples(P, cons: ScanConstraints) -> _Triples:
    """Every triple (a < c, b distinct), filtered by :func:`accept_triples`. O(n^3)."""
    P = points_array(P)
    n = len(P)
    ia0, ic0 = np.triu_indices(n, k=1)
    parts = []
    for ib in range(n):
        keep = (ia0 != ib) & (ic0 != ib)
        ia, ic = ia0[keep], ic0[keep]
        parts.append(accept_triples(P, ia, np.full(len(ia), ib), ic, cons))
    return _Triples(*(np.concatenate([getattr(p, f) for p in parts]) if parts else np.zeros(0)
                      for f in _Triples._fields))


def _report(P, tri: _Triples, membership, cons, budget, t0) -> ScanReport:
    exhausted = False
    if budget is not None and len(tri.ia) > budget:
        tri = _Triples(*(getattr(tri, f)[:budget] for f in _Triples._fields))
        exhausted = True
    dist_fn = _membership_fn(membership)
    fourth = P[tri.ia] + P[tri.ic] - P[tri.ib]
    dist = dist_fn(fourth, cons.membership_tol) if len(fourth) else np.zeros(0)
    bad = dist > cons.membership_tol
    viol = _Triples(*(getattr(tri, f)[bad] for f in _Triples._fields))
    return ScanReport(P, viol, dist[bad], satisfied_count=int(np.count_nonzero(~bad)),
                      triples_examined=int(len(tri.ia)), runtime=time.perf_counter() - t0,
                      membership_tol=cons.membership_tol, budget_exhausted=exhausted)


def scan_rectangle_property(set_points, membership, constraints: ScanConstraints,
                            budget: int | None = None, workers: int = 1,
                            block: int = 64) -> ScanReport:
    """Enumerate right-angle triples of ``set_points`` and flag failed completions.

    Triples are visited by right-angle vertex b in index order, then by
    (a, c) with a < c. With ``budget`` set, only the first ``budget``
    accepted triples are completed and the report is flagged partial.
    Parallel and serial runs give identical reports.
    """
    t0 = time.perf_counter()
    P = points_array(set_points)
    if len(P) == 0:
        raise EmptySet("scan needs at least one point")
    if budget is not None and budget < 0:
        raise BadParameter("budget must be non-negative")
    kernel = _Kernel(P, constraints, _diameter(P) if len(P) > 1 else 0.0)
    blocks = [range(s, min(s + block, len(P))) for s in range(0, len(P), block)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(kernel.accept_block, blocks))
    else:
        parts = [kernel.accept_block(b) for b in blocks]
    tri = _Triples(*(np.concatenate([getattr(p, f) for p in parts]) for f in _Triples._fields))
    return _report(P, tri, membership, constraints, budget, t0)


def scan_brute_force(set_points, membership, constraints: ScanConstraints,
                     budget: int | None = None) -> ScanReport:
    """Reference O(n^3) scan with the same report semantics."""
    t0 = time.perf_counter()
    P = points_array(set_points)
    if len(P) == 0:
        raise EmptySet("scan needs at least one point")
    tri = brute_force_triples(P, constraints)
    o = np.lexsort((tri.ic, tri.ia, tri.ib))
    tri = _Triples(*(getattr(tri, f)[o] for f in _Triples._fields))
    return _report(P, tri, membership, constraints, budget, t0)


def scan_curve(curve: SampledCurve, budget: int | None = None, workers: int = 1,
               **constraint_kw) -> ScanReport:
    """Scan a curve's own samples against the curve, with default tolerances."""
    cons = ScanConstraints.for_curve(curve, **constraint_kw)
    return scan_rectangle_property(curve.points, curve, cons, budget=budget, workers=workers)


@dataclass
class InfinitesimalResult:
    holds: bool
    witnesses: list
    report: ScanReport


def verify_infinitesimal_condition(curve: SampledCurve, d: float, eps: float,
                                   tol: ToleranceContext | None = None, mode: str = "side",
                                   **kw) -> InfinitesimalResult:
    """Scan rectangles of diagonal ``d`` whose short side is small.

    ``mode="side"`` bounds the short side by the length ``eps``;
    ``mode="aspect"`` bounds short/long by the ratio ``eps``.
    """
    if mode not in ("side", "aspect"):
        raise BadParameter(f"unknown mode {mode!r}")
    if tol is not None:
        kw.setdefault("eps_distinct", tol.eps_geom)
    bound = {"max_short_side": eps} if mode == "side" else {"max_aspect": eps}
    cons = ScanConstraints.for_curve(curve, diagonal=d, **bound, **kw)
    report = scan_rectangle_property(curve.points, curve, cons)
    return InfinitesimalResult(report.holds, list(report.violations), report)
