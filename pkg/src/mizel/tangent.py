"""Tangent disks and the five-way classification of curve points.

At a vertex x the tangent disk has diameter d, touches the curve's tangent
line at x and sits on the inner-normal side. Samples in the arclength
window to the left (decreasing parameter) and right (increasing
parameter) of x are compared with that disk.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .curves import SampledCurve
from .errors import BadParameter, WindowTooSmall
from .geom import Circle, Point2


class PointClass(str, enum.Enum):
    A = "A"  # neighbourhood inside the open disk
    B = "B"  # neighbourhood outside the closed disk
    AB = "AB"  # inside on the left, outside on the right
    BA = "BA"
    C = "C"  # neighbourhood on the circle
    UNRESOLVED = "UNRESOLVED"

    def mirrored(self) -> "PointClass":
        return {PointClass.AB: PointClass.BA, PointClass.BA: PointClass.AB}.get(self, self)


@dataclass(frozen=True)
class ClassificationParams:
    d: float
    eps_nbhd: float
    arc_match_tol: float

    def __post_init__(self):
        if not self.d > 0:
            raise BadParameter("disk diameter must be positive")
        if not self.eps_nbhd > 0 or not self.arc_match_tol > 0:
            raise BadParameter("window and arc tolerance must be positive")

    @classmethod
    def for_curve(cls, curve: SampledCurve, d: float, window_samples: float = 4.0,
                  arc_match_tol: float | None = None) -> "ClassificationParams":
        """Window half-width of ``window_samples`` max spacings; arc tolerance 1e-9 x scale."""
        return cls(d, window_samples * curve.spacing,
                   arc_match_tol if arc_match_tol is not None else curve.tol.eps_geom)

    def check_against(self, curve: SampledCurve):
        if not self.eps_nbhd > 2 * curve.spacing:
            raise WindowTooSmall(f"eps_nbhd = {self.eps_nbhd:.3g} must exceed twice the sample "
                                 f"spacing {curve.spacing:.3g}")


@dataclass
class ClassificationReport:
    labels: list
    counts: dict
    partition_ok: bool
    # per vertex: min/max signed distance on the left and right windows
    left_range: np.ndarray
    right_range: np.ndarray

    @property
    def n(self) -> int:
        return len(self.labels)

    def fraction(self, label) -> float:
        return self.counts[PointClass(label)] / self.n


def tangent_disk_at(curve: SampledCurve, i: int, d: float) -> Circle:
    p = curve.points[i]
    nrm = curve.inner_normals[i]
    return Circle(Point2(p[0] + 0.5 * d * nrm[0], p[1] + 0.5 * d * nrm[1]), 0.5 * d)


def _window_offsets(curve: SampledCurve, eps: float):
    """Per-vertex sample counts in the right and left arclength windows."""
    n = curve.n
    s = curve.params
    L = curve.length
    ext = np.concatenate([s - L, s, s + L])
    right = np.searchsorted(ext, s + eps, side="right") - (n + np.arange(n)) - 1
    left = (n + np.arange(n)) - np.searchsorted(ext, s - eps, side="left")
    return right, left


def _signed_distances(curve: SampledCurve, idx: np.ndarray, d: float, offsets: np.ndarray):
    """Signed distance |q - center| - d/2 of samples idx + offsets to each vertex's disk."""
    P = curve.points
    centers = P[idx] + 0.5 * d * curve.inner_normals[idx]
    nb = (idx[:, None] + offsets[None, :]) % curve.n
    q = P[nb]
    return np.hypot(q[..., 0] - centers[:, None, 0], q[..., 1] - centers[:, None, 1]) - 0.5 * d


def _label(left, right, tol):
    if np.all(np.abs(left) <= tol) and np.all(np.abs(right) <= tol):
        return PointClass.C
    lin, lout = np.all(left < -tol), np.all(left > tol)
    rin, rout = np.all(right < -tol), np.all(right > tol)
    if lin and rin:
        return PointClass.A
    if lout and rout:
        return PointClass.B
    if lin and rout:
        return PointClass.AB
    if lout and rin:
        return PointClass.BA
    return PointClass.UNRESOLVED


def _classify(curve: SampledCurve, params: ClassificationParams, indices):
    params.check_against(curve)
    right_cnt, left_cnt = _window_offsets(curve, params.eps_nbhd)
    indices = np.asarray(indices, dtype=np.int64)
    if np.any(right_cnt[indices] < 3) or np.any(left_cnt[indices] < 3):
        raise WindowTooSmall("eps_nbhd covers fewer than 3 samples on one side")
    labels = []
    lr = np.empty((len(indices), 2))
    rr = np.empty((len(indices), 2))
    # group vertices by window size to vectorize
    keys = np.stack([left_cnt[indices], right_cnt[indices]], axis=1)
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = np.ravel(inv)
    out = [None] * len(indices)
    for g, (nl, nr) in enumerate(uniq):
        sel = np.nonzero(inv == g)[0]
        idx = indices[sel]
        left = _signed_distances(curve, idx, params.d, -np.arange(1, nl + 1))
        right = _signed_distances(curve, idx, params.d, np.arange(1, nr + 1))
        lr[sel, 0], lr[sel, 1] = left.min(axis=1), left.max(axis=1)
        rr[sel, 0], rr[sel, 1] = right.min(axis=1), right.max(axis=1)
        for row, k in enumerate(sel):
            out[k] = _label(left[row], right[row], params.arc_match_tol)
    labels = out
    return labels, lr, rr


def classify_point(curve: SampledCurve, i: int, params: ClassificationParams) -> PointClass:
    labels, _, _ = _classify(curve, params, [i])
    return labels[0]


def classify_curve(curve: SampledCurve, params: ClassificationParams) -> ClassificationReport:
    labels, lr, rr = _classify(curve, params, np.arange(curve.n))
    counts = {c: 0 for c in PointClass}
    for lab in labels:
        counts[lab] += 1
    ok = len(labels) == curve.n and all(isinstance(x, PointClass) for x in labels)
    return ClassificationReport(labels, counts, ok, lr, rr)
