"""Uniform-grid spatial hash for disk range queries."""

from __future__ import annotations

import math

import numpy as np

from .geom import as_point, points_array

# cells per axis are packed into one int64 key
_KEY_SPAN = np.int64(1) << np.int64(31)


class SpatialIndex:
    """Points hashed to square cells of side ``cell``.

    Queries return exactly the indexed points within the radius. Radii up
    to ``8 * cell`` walk the covering cells; larger radii fall back to a
    filtered full scan.
    """

    MAX_CELL_RADIUS = 8

    def __init__(self, points, cell: float):
        if not cell > 0:
            raise ValueError("cell size must be positive")
        self.points = points_array(points)
        self.cell = float(cell)
        n = len(self.points)
        if n:
            self.origin = self.points.min(axis=0)
            extent = self.points.max(axis=0) - self.origin
            if np.any(extent / self.cell >= _KEY_SPAN - 16):
                # too many cells for the key packing: coarsen
                self.cell = float(np.max(extent)) / float(_KEY_SPAN >> 4)
        else:
            self.origin = np.zeros(2)
        ij = self._cells(self.points)
        keys = self._key(ij)
        self.order = np.argsort(keys, kind="stable")
        sorted_keys = keys[self.order]
        self.keys, self.starts = np.unique(sorted_keys, return_index=True)
        self.ends = np.append(self.starts[1:], n).astype(np.int64)

    def __len__(self):
        return len(self.points)

    def _cells(self, pts) -> np.ndarray:
        return np.floor((pts - self.origin) / self.cell).astype(np.int64)

    @staticmethod
    def _key(ij) -> np.ndarray:
        return (ij[..., 0] + 8) * _KEY_SPAN + (ij[..., 1] + 8)

    def _bucket(self, ij):
        ok = np.all((ij >= -8) & (ij < _KEY_SPAN - 16), axis=1)
        keys = self._key(np.where(ok[:, None], ij, 0))
        pos = np.minimum(np.searchsorted(self.keys, keys), len(self.keys) - 1)
        hit = ok & (self.keys[pos] == keys)
        lo = np.where(hit, self.starts[pos], 0)
        hi = np.where(hit, self.ends[pos], 0)
        return lo, hi

    def query(self, p, r: float) -> np.ndarray:
        """Indices (ascending) of points within distance ``r`` of ``p``."""
        qi, pi = self.query_pairs(np.array([tuple(as_point(p))]), r)
        return np.sort(pi)

    def query_pairs(self, queries, r: float):
        """All (query index, point index) pairs within distance ``r``.

        Pairs are ordered by query index, then point index.
        """
        q = points_array(queries)
        n = len(self.points)
        if n == 0 or len(q) == 0 or r < 0:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        reach = int(math.ceil(r / self.cell))
        if reach > self.MAX_CELL_RADIUS:
            return self._brute_pairs(q, r)
        qc = self._cells(q)
        offs = np.arange(-reach, reach + 1)
        ox, oy = np.meshgrid(offs, offs, indexing="ij")
        offsets = np.stack([ox.ravel(), oy.ravel()], axis=1)
        cand_q, cand_p = [], []
        for off in offsets:
            lo, hi = self._bucket(qc + off)
            cnt = hi - lo
            tot = int(cnt.sum())
            if tot == 0:
                continue
            qidx = np.repeat(np.arange(len(q)), cnt)
            start = np.repeat(lo - np.cumsum(cnt) + cnt, cnt)
            slot = np.arange(tot) + start
            cand_q.append(qidx)
            cand_p.append(self.order[slot])
        if not cand_q:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        cq = np.concatenate(cand_q)
        cp = np.concatenate(cand_p)
        d = np.hypot(*(self.points[cp] - q[cq]).T)
        keep = d <= r
        cq, cp = cq[keep], cp[keep]
        o = np.lexsort((cp, cq))
        return cq[o], cp[o]

    def _brute_pairs(self, q, r, chunk: int = 2048):
        out_q, out_p = [], []
        for s in range(0, len(q), chunk):
            blk = q[s:s + chunk]
            d = np.hypot(blk[:, None, 0] - self.points[None, :, 0],
                         blk[:, None, 1] - self.points[None, :, 1])
            qi, pi = np.nonzero(d <= r)
            out_q.append(qi + s)
            out_p.append(pi)
        return np.concatenate(out_q), np.concatenate(out_p)

    def nearest_distance(self, queries, max_radius: float | None = None) -> np.ndarray:
        """Distance from each query to the nearest indexed point.

        Exact for every query. When ``max_radius`` is given, queries with no
        point inside it are resolved by a brute-force pass.
        """
        q = points_array(queries)
        out = np.full(len(q), np.inf)
        if len(self.points) == 0:
            return out
        if max_radius is not None:
            qi, pi = self.query_pairs(q, max_radius)
            if len(qi):
                d = np.hypot(*(self.points[pi] - q[qi]).T)
                np.minimum.at(out, qi, d)
        rest = np.nonzero(~np.isfinite(out))[0]
        for s in range(0, len(rest), 1024):
            blk = q[rest[s:s + 1024]]
            d = np.hypot(blk[:, None, 0] - self.points[None, :, 0],
                         blk[:, None, 1] - self.points[None, :, 1])
            out[rest[s:s + 1024]] = d.min(axis=1)
        return out


def build_index(points, cell: float) -> SpatialIndex:
    return SpatialIndex(points, cell)
