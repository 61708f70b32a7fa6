"""Static SVG figures of curves, packings, witnesses and classifications."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

CLASS_COLORS = {
    "A": "#d62728",
    "B": "#1f77b4",
    "AB": "#ff7f0e",
    "BA": "#9467bd",
    "C": "#2ca02c",
    "UNRESOLVED": "#7f7f7f",
}


@dataclass
class Scene:
    """Layered drawables in model coordinates (y up)."""

    curves: list = field(default_factory=list)      # (points (n, 2), closed, stroke)
    circles: list = field(default_factory=list)     # (cx, cy, r, stroke, fill)
    points: list = field(default_factory=list)      # (x, y, color)
    rectangles: list = field(default_factory=list)  # (a, b, c, fourth)
    labels: list = field(default_factory=list)      # (x, y, text)
    title: str = ""

    def add_curve(self, points, closed=True, stroke="#000000"):
        self.curves.append((np.asarray(points, dtype=float), closed, stroke))

    def add_circle(self, circle, stroke="#000000", fill="none"):
        self.circles.append((circle.center.x, circle.center.y, circle.radius, stroke, fill))

    def add_point(self, x, y, color="#000000"):
        self.points.append((float(x), float(y), color))

    def add_classified_points(self, points, labels):
        for (x, y), lab in zip(points, labels):
            self.add_point(x, y, CLASS_COLORS[getattr(lab, "value", lab)])

    def add_witness(self, a, b, c, fourth):
        self.rectangles.append(tuple(tuple(map(float, p)) for p in (a, b, c, fourth)))

    def add_label(self, x, y, text):
        self.labels.append((float(x), float(y), str(text)))

    def bounds(self):
        xs, ys = [], []
        for pts, _, _ in self.curves:
            if len(pts):
                xs += [pts[:, 0].min(), pts[:, 0].max()]
                ys += [pts[:, 1].min(), pts[:, 1].max()]
        for cx, cy, r, _, _ in self.circles:
            xs += [cx - r, cx + r]
            ys += [cy - r, cy + r]
        for x, y, _ in self.points:
            xs.append(x)
            ys.append(y)
        for rect in self.rectangles:
            for x, y in rect:
                xs.append(x)
                ys.append(y)
        for x, y, _ in self.labels:
            xs.append(x)
            ys.append(y)
        if not xs:
            return None
        return min(xs), min(ys), max(xs), max(ys)

    def view_box(self):
        """(x, y, width, height) in SVG coordinates with a 5% margin."""
        b = self.bounds()
        if b is None:
            return (0.0, 0.0, 1.0, 1.0)
        x0, y0, x1, y1 = b
        size = max(x1 - x0, y1 - y0, 1e-12)
        m = 0.05 * size
        return (x0 - m, -(y1 + m), (x1 - x0) + 2 * m, (y1 - y0) + 2 * m)


def _n(v) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise ValueError("non-finite coordinate in scene")
    s = format(v, ".6f").rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def to_svg(scene: Scene) -> str:
    vx, vy, vw, vh = scene.view_box()
    lw = 0.002 * max(vw, vh)
    out = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           f'viewBox="{_n(vx)} {_n(vy)} {_n(vw)} {_n(vh)}" width="800" height="{_n(800 * vh / vw)}">']
    if scene.title:
        out.append(f"<title>{escape(scene.title)}</title>")
    if scene.circles:
        out.append('<g id="circles">')
        for cx, cy, r, stroke, fill in scene.circles:
            out.append(f'<circle cx="{_n(cx)}" cy="{_n(-cy)}" r="{_n(r)}" fill={quoteattr(fill)} '
                       f'stroke={quoteattr(stroke)} stroke-width="{_n(lw)}"/>')
        out.append("</g>")
    if scene.curves:
        out.append('<g id="curves">')
        for pts, closed, stroke in scene.curves:
            coords = " ".join(f"{_n(x)},{_n(-y)}" for x, y in pts)
            tag = "polygon" if closed else "polyline"
            out.append(f'<{tag} points="{coords}" fill="none" stroke={quoteattr(stroke)} '
                       f'stroke-width="{_n(lw)}"/>')
        out.append("</g>")
    if scene.rectangles:
        out.append('<g id="witnesses">')
        for a, b, c, s in scene.rectangles:
            coords = " ".join(f"{_n(x)},{_n(-y)}" for x, y in (a, b, c, s))
            out.append(f'<polygon class="witness" points="{coords}" fill="none" stroke="#444444" '
                       f'stroke-width="{_n(lw)}" stroke-dasharray="{_n(4 * lw)}"/>')
            for x, y in (a, b, c):
                out.append(f'<circle class="vertex" cx="{_n(x)}" cy="{_n(-y)}" r="{_n(2 * lw)}" '
                           f'fill="#000000"/>')
            out.append(f'<circle class="fourth" cx="{_n(s[0])}" cy="{_n(-s[1])}" r="{_n(3 * lw)}" '
                       f'fill="#ff0000" stroke="#000000" stroke-width="{_n(lw / 2)}"/>')
        out.append("</g>")
    if scene.points:
        out.append('<g id="points">')
        for x, y, color in scene.points:
            out.append(f'<circle cx="{_n(x)}" cy="{_n(-y)}" r="{_n(1.5 * lw)}" fill={quoteattr(color)}/>')
        out.append("</g>")
    if scene.labels:
        out.append('<g id="labels">')
        for x, y, text in scene.labels:
            out.append(f'<text x="{_n(x)}" y="{_n(-y)}" font-size="{_n(10 * lw)}">{escape(text)}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(scene: Scene, path) -> Path:
    path = Path(path)
    path.write_text(to_svg(scene))
    return path
