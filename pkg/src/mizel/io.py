"""Plain-text, CSV and JSON formats for curves, reports and packings.

Floats are written with 17 significant digits so files round-trip exactly
and identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .curves import SampledCurve
from .errors import ConfigError
from .geom import Circle, Point2
from .packings import DiskPacking, EllipseCell, ShapePacking, SquareCell

WITNESS_COLUMNS = ["ax", "ay", "bx", "by", "cx", "cy", "sx", "sy", "fourth_distance",
                   "diagonal", "short", "long", "aspect"]
CLASSIFICATION_COLUMNS = ["index", "x", "y", "label", "left_min", "left_max", "right_min", "right_max"]
PROBE_COLUMNS = ["cx", "cy", "radius", "components", "full_arc"]


def fmt(v) -> str:
    return format(float(v), ".17g")


# -- curves -------------------------------------------------------------------

def write_curve(curve: SampledCurve, path):
    lines = [f"# mizel-curve n={curve.n} orientation=ccw closed=true"]
    lines += [f"{fmt(x)} {fmt(y)}" for x, y in curve.points]
    Path(path).write_text("\n".join(lines) + "\n")


def read_curve(path) -> SampledCurve:
    """Read a curve table. Tangents are re-estimated by central differences."""
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ConfigError(f"{path}: missing curve header line")
    flags = dict(tok.split("=", 1) for tok in text[0][1:].split() if "=" in tok)
    if flags.get("closed", "true") != "true":
        raise ConfigError(f"{path}: only closed curves are supported")
    try:
        pts = np.array([[float(v) for v in ln.split()] for ln in text[1:] if ln.strip()])
    except ValueError as exc:
        raise ConfigError(f"{path}: bad coordinate row ({exc})") from None
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ConfigError(f"{path}: rows must hold two numbers")
    if flags.get("orientation", "ccw") == "cw":
        pts = pts[::-1]
    return SampledCurve(pts)


# -- scan witnesses -------------------------------------------------------------

def write_witness_csv(report, path, limit: int | None = None):
    A = report.arrays
    k = report.violation_count if limit is None else min(limit, report.violation_count)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(WITNESS_COLUMNS)
        for i in range(k):
            short, long_ = A["short"][i], A["long"][i]
            w.writerow([fmt(v) for v in (*A["a"][i], *A["b"][i], *A["c"][i], *A["fourth"][i],
                                         A["fourth_distance"][i], A["diagonal"][i], short, long_,
                                         short / long_)])


def read_witness_csv(path) -> np.ndarray:
    """Rows as an (m, 13) float array in :data:`WITNESS_COLUMNS` order."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([[float(r[c]) for c in WITNESS_COLUMNS] for r in rows]).reshape(-1, len(WITNESS_COLUMNS))


# -- classification -------------------------------------------------------------

def write_classification_csv(curve: SampledCurve, report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CLASSIFICATION_COLUMNS)
        for i, lab in enumerate(report.labels):
            x, y = curve.points[i]
            w.writerow([i, fmt(x), fmt(y), lab.value, fmt(report.left_range[i, 0]),
                        fmt(report.left_range[i, 1]), fmt(report.right_range[i, 0]),
                        fmt(report.right_range[i, 1])])


def read_classification_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    pts = np.array([[float(r["x"]), float(r["y"])] for r in rows]).reshape(-1, 2)
    return pts, [r["label"] for r in rows]


# -- packings -----------------------------------------------------------------

def _shape_to_dict(c):
    if isinstance(c, Circle):
        return {"kind": "circle", "center": [c.center.x, c.center.y], "radius": c.radius}
    if isinstance(c, SquareCell):
        return {"kind": "square", "center": [c.center.x, c.center.y], "half": c.half, "angle": c.angle}
    if isinstance(c, EllipseCell):
        return {"kind": "ellipse", "center": [c.center.x, c.center.y], "a": c.a, "b": c.b, "angle": c.angle}
    raise TypeError(f"cannot serialize {type(c).__name__}")


def _shape_from_dict(d):
    try:
        kind = d["kind"]
        center = Point2(*d["center"])
        if kind == "circle":
            return Circle(center, d["radius"])
        if kind == "square":
            return SquareCell(center, d["half"], d.get("angle", 0.0))
        if kind == "ellipse":
            return EllipseCell(center, d["a"], d["b"], d.get("angle", 0.0))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed shape entry {d!r}: {exc}") from None
    raise ConfigError(f"unknown shape kind {kind!r}")


def packing_to_dict(packing) -> dict:
    cells = packing.inner if isinstance(packing, DiskPacking) else packing.cells
    return {
        "type": "disk_packing" if isinstance(packing, DiskPacking) else "shape_packing",
        "outer": _shape_to_dict(packing.outer),
        "inner": [_shape_to_dict(c) for c in cells],
        "depth": packing.depth,
        "seed": packing.rng_seed,
        "eps_geom": packing.eps_geom,
    }


def packing_from_dict(d: dict):
    try:
        outer = _shape_from_dict(d["outer"])
        cells = [_shape_from_dict(c) for c in d["inner"]]
        args = (outer, cells, int(d.get("depth", len(cells))), d.get("seed"), float(d.get("eps_geom", 0.0)))
    except KeyError as exc:
        raise ConfigError(f"packing document lacks {exc}") from None
    if d.get("type", "disk_packing") == "disk_packing":
        return DiskPacking(*args)
    return ShapePacking(*args)


def write_packing(packing, path):
    # json writes floats with repr, which round-trips exactly
    Path(path).write_text(json.dumps(packing_to_dict(packing), indent=1, sort_keys=True) + "\n")


def read_packing(path):
    try:
        return packing_from_dict(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# -- probes -------------------------------------------------------------------

def write_probe_csv(rows, path):
    """``rows`` holds (probe Circle, ProbeResult) pairs."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROBE_COLUMNS)
        for probe, res in rows:
            w.writerow([fmt(probe.center.x), fmt(probe.center.y), fmt(probe.radius),
                        res.components, int(res.has_full_arc)])


def read_probe_csv(path):
    with open(path, newline="") as fh:
        return [{"probe": Circle(Point2(float(r["cx"]), float(r["cy"])), float(r["radius"])),
                 "components": int(r["components"]), "full_arc": bool(int(r["full_arc"]))}
                for r in csv.DictReader(fh)]
