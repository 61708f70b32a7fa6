"""Command-line driver: one JSON scenario per invocation.

    mizel scan --config scan.json --out results/ --seed 7

Exit status is 0 on success, 2 for configuration errors and 3 for
runtime failures, with a one-line diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import zlib
from pathlib import Path

import numpy as np

from . import io
from .curves import generate_circle, generate_ellipse, generate_fourier_cw, generate_reuleaux
from .errors import BadParameter, ConfigError
from .geom import Circle, Point2
from .packings import (CompactSetK, exactly_m_search, greedy_circle_packing, greedy_shape_packing,
                       probe_circle_intersection)
from .scan import ScanConstraints, scan_rectangle_property
from .svg import Scene, render_svg
from .tangent import ClassificationParams, classify_curve

log = logging.getLogger("mizel")

KINDS = ("generate", "scan", "classify", "pack", "probe", "search", "render")


def fan_out(seed: int, name: str) -> int:
    """Per-module seed derived from the scenario seed."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])
    return int(ss.generate_state(1)[0])


def _num(cfg, key, default=None, lo=None, hi=None, kind=float):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required parameter {key!r}")
        return default
    try:
        v = kind(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {key!r} must be a number, got {cfg[key]!r}") from None
    if kind is float and not math.isfinite(v):
        raise ConfigError(f"parameter {key!r} must be finite")
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        raise ConfigError(f"parameter {key!r} = {v} out of range [{lo}, {hi}]")
    return v


def _opt(cfg, key, **kw):
    return _num(cfg, key, **kw) if cfg.get(key) is not None else None


def build_curve(spec, base: Path):
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("curve must be an object with a 'type'")
    t = spec["type"]
    n = _num(spec, "n", 1024, lo=64, kind=int)
    if t == "circle":
        return generate_circle(_num(spec, "r", lo=1e-12), n)
    if t == "ellipse":
        return generate_ellipse(_num(spec, "a", lo=1e-12), _num(spec, "b", lo=1e-12), n)
    if t == "reuleaux":
        return generate_reuleaux(_num(spec, "k", 3, lo=3, kind=int), _num(spec, "d", lo=1e-12), n)
    if t == "fourier_cw":
        coeffs = {int(k): v for k, v in dict(spec.get("coefficients", {})).items()}
        return generate_fourier_cw(_num(spec, "d", lo=1e-12), coeffs, n)
    if t == "file":
        path = base / spec["path"] if not Path(spec["path"]).is_absolute() else Path(spec["path"])
        if not path.exists():
            raise ConfigError(f"curve file {path} does not exist")
        return io.read_curve(path)
    raise ConfigError(f"unknown curve type {t!r}")


def build_packing(cfg, seed, base: Path):
    if "packing_file" in cfg:
        path = base / cfg["packing_file"]
        if not path.exists():
            raise ConfigError(f"packing file {path} does not exist")
        return io.read_packing(path)
    spec = cfg.get("packing", cfg)
    o = spec.get("outer", {"center": [0.0, 0.0], "radius": 1.0})
    outer = Circle(Point2(*o["center"]), _num(o, "radius", lo=1e-12))
    shape = spec.get("shape", "circle")
    min_r = _num(spec, "min_r", 0.05 * outer.radius, lo=0.0)
    max_count = _num(spec, "max_count", 64, lo=0, kind=int)
    trials = _num(spec, "trials", 2000, lo=1, kind=int)
    s = fan_out(seed, "pack")
    if shape == "circle":
        return greedy_circle_packing(outer, min_r, max_count, s, trials=trials)
    if shape in ("square", "ellipse"):
        return greedy_shape_packing(outer, shape, min_r, max_count, s, trials=trials)
    raise ConfigError(f"unknown packing shape {shape!r}")


def _curve_scene(curve, title):
    scene = Scene(title=title)
    scene.add_curve(curve.points)
    return scene


def _packing_scene(packing, title):
    from .packings import EllipseCell, SquareCell
    scene = Scene(title=title)
    cells = getattr(packing, "inner", None) or packing.cells
    for c in (packing.outer, *cells):
        if isinstance(c, Circle):
            scene.add_circle(c, stroke="#000000", fill="none" if c is packing.outer else "#dddddd")
        elif isinstance(c, SquareCell):
            scene.add_curve(c.corners())
        elif isinstance(c, EllipseCell):
            t = np.linspace(0, 2 * math.pi, 96, endpoint=False)
            u = np.stack([c.a * np.cos(t), c.b * np.sin(t)], axis=1)
            ca, sa = math.cos(c.angle), math.sin(c.angle)
            scene.add_curve(u @ np.array([[ca, sa], [-sa, ca]]) + [c.center.x, c.center.y])
    return scene


# -- scenario handlers: each returns the list of written paths -------------------

def do_generate(cfg, out: Path, seed: int, base: Path):
    curve = build_curve(cfg.get("curve"), base)
    io.write_curve(curve, out / "curve.txt")
    render_svg(_curve_scene(curve, "curve"), out / "curve.svg")
    return [out / "curve.txt", out / "curve.svg"]


def do_scan(cfg, out, seed, base):
    curve = build_curve(cfg.get("curve"), base)
    kw = {}
    for key in ("diagonal", "max_aspect", "max_short_side", "membership_tol", "angle_tol", "diagonal_tol"):
        v = _opt(cfg, key, lo=0.0)
        if v is not None:
            kw[key] = v
    budget = _opt(cfg, "budget", lo=0, kind=int)
    try:
        cons = ScanConstraints.for_curve(curve, **kw)
    except BadParameter as exc:
        raise ConfigError(str(exc)) from None
    report = scan_rectangle_property(curve.points, curve, cons, budget=budget,
                                     workers=_num(cfg, "workers", 1, lo=1, kind=int))
    log.info("scan: %s (%.2f s)", report.summary(), report.runtime)
    io.write_witness_csv(report, out / "witnesses.csv")
    scene = _curve_scene(curve, "rectangle scan")
    for k in range(min(report.violation_count, _num(cfg, "draw_witnesses", 5, lo=0, kind=int))):
        w = report.witness(k)
        scene.add_witness(w.a, w.b, w.c, w.fourth)
    render_svg(scene, out / "scan.svg")
    return [out / "witnesses.csv", out / "scan.svg"]


def do_classify(cfg, out, seed, base):
    curve = build_curve(cfg.get("curve"), base)
    d = _num(cfg, "d", lo=1e-12)
    params = ClassificationParams.for_curve(curve, d, _num(cfg, "window_samples", 4.0, lo=0.0),
                                            _opt(cfg, "arc_match_tol", lo=0.0))
    report = classify_curve(curve, params)
    log.info("classify: %s", {k.value: v for k, v in report.counts.items() if v})
    io.write_classification_csv(curve, report, out / "classification.csv")
    scene = _curve_scene(curve, "tangent-disk classes")
    scene.add_classified_points(curve.points, report.labels)
    render_svg(scene, out / "classification.svg")
    return [out / "classification.csv", out / "classification.svg"]


def do_pack(cfg, out, seed, base):
    packing = build_packing(cfg, seed, base)
    io.write_packing(packing, out / "packing.json")
    render_svg(_packing_scene(packing, "packing"), out / "packing.svg")
    return [out / "packing.json", out / "packing.svg"]


def _probe_list(cfg, packing, seed):
    probes = [Circle(Point2(*p["center"]), _num(p, "radius", lo=1e-12)) for p in cfg.get("probes", [])]
    k = _num(cfg, "random_probes", 0, lo=0, kind=int)
    if k:
        rng = np.random.default_rng(fan_out(seed, "probe"))
        R = packing.outer.radius if isinstance(packing.outer, Circle) else packing.outer.bounding_radius
        oc = np.array([packing.outer.center.x, packing.outer.center.y])
        for _ in range(k):
            probes.append(Circle(Point2(*(oc + rng.uniform(-R, R, 2))), float(rng.uniform(0.02, 1.0) * R)))
    if not probes:
        probes.append(packing.outer)
    return probes


def do_probe(cfg, out, seed, base):
    packing = build_packing(cfg, seed, base)
    K = CompactSetK(packing)
    res_n = _num(cfg, "angular_resolution", 3600, lo=3600, kind=int)
    rows = [(p, probe_circle_intersection(K, p, res_n)) for p in _probe_list(cfg, packing, seed)]
    io.write_packing(packing, out / "packing.json")
    io.write_probe_csv(rows, out / "probes.csv")
    scene = _packing_scene(packing, "circle probes of K")
    for p, _ in rows:
        scene.add_circle(p, stroke="#d62728")
    render_svg(scene, out / "probe.svg")
    return [out / "packing.json", out / "probes.csv", out / "probe.svg"]


def do_search(cfg, out, seed, base):
    target = cfg.get("target", {})
    m = _num(cfg, "m", 3, lo=1, kind=int)
    budget = _num(cfg, "budget", 1000, lo=1, kind=int)
    family = cfg.get("family", "structured")
    if family not in ("random", "structured"):
        raise ConfigError(f"unknown probe family {family!r}")
    s = fan_out(seed, "search")
    if "curve" in target:
        obj = build_curve(target["curve"], base)
        scene = _curve_scene(obj, "exactly-m search")
    else:
        packing = build_packing(target, seed, base)
        obj = CompactSetK(packing)
        scene = _packing_scene(packing, "exactly-m search")
    res = exactly_m_search(obj, m, family, budget, s)
    log.info("search: %s", res.describe())
    with open(out / "search.csv", "w") as fh:
        fh.write("m,found,probes_tried,budget,cx,cy,radius\n")
        if res.found:
            p = res.probe
            fh.write(f"{m},1,{res.probes_tried},{budget},{io.fmt(p.center.x)},{io.fmt(p.center.y)},"
                     f"{io.fmt(p.radius)}\n")
        else:
            fh.write(f"{m},0,{res.probes_tried},{budget},,,\n")
    if res.found:
        scene.add_circle(res.probe, stroke="#d62728")
    render_svg(scene, out / "search.svg")
    return [out / "search.csv", out / "search.svg"]


def do_render(cfg, out, seed, base):
    scene = Scene(title=cfg.get("title", "figure"))
    used = False
    if "curve_file" in cfg:
        scene.add_curve(io.read_curve(base / cfg["curve_file"]).points)
        used = True
    if "packing_file" in cfg:
        pk = _packing_scene(io.read_packing(base / cfg["packing_file"]), "")
        scene.circles += pk.circles
        scene.curves += pk.curves
        used = True
    if "classification_file" in cfg:
        pts, labels = io.read_classification_csv(base / cfg["classification_file"])
        scene.add_classified_points(pts, labels)
        used = True
    if "witness_file" in cfg:
        for row in io.read_witness_csv(base / cfg["witness_file"])[: int(cfg.get("draw_witnesses", 5))]:
            scene.add_witness(row[0:2], row[2:4], row[4:6], row[6:8])
        used = True
    if not used:
        raise ConfigError("render needs at least one of curve_file, packing_file, "
                          "classification_file, witness_file")
    render_svg(scene, out / "figure.svg")
    return [out / "figure.svg"]


HANDLERS = {"generate": do_generate, "scan": do_scan, "classify": do_classify, "pack": do_pack,
            "probe": do_probe, "search": do_search, "render": do_render}


def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config {path} does not exist")
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def run_scenario(config_path, out_dir=None, seed=None, kind=None):
    """Run one scenario and return the written paths. Raises on failure."""
    cfg = load_config(config_path)
    k = cfg.get("kind", kind)
    if kind is not None and k != kind:
        raise ConfigError(f"config kind {k!r} does not match subcommand {kind!r}")
    if k not in HANDLERS:
        raise ConfigError(f"unknown scenario kind {k!r}")
    seed = int(cfg.get("seed", 0) if seed is None else seed)
    out = Path(out_dir if out_dir is not None else cfg.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return HANDLERS[k](cfg, out, seed, Path(config_path).resolve().parent)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mizel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for k in KINDS:
        p = sub.add_parser(k)
        p.add_argument("--config", required=True, help="scenario JSON")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        paths = run_scenario(args.config, args.out, args.seed, args.command)
    except (ConfigError, BadParameter) as exc:
        print(f"mizel: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - every runtime failure maps to exit 3
        print(f"mizel: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    for p in paths:
        log.info("wrote %s", p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
