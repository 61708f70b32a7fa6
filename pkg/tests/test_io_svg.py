import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from mizel import (Circle, ClassificationParams, ConfigError, Point2, Scene, classify_curve,
                   generate_ellipse, generate_reuleaux, greedy_circle_packing, greedy_shape_packing,
                   probe_circle_intersection, render_svg, scan_curve, CompactSetK)
from mizel import io
from mizel.svg import CLASS_COLORS, to_svg

NS = "{http://www.w3.org/2000/svg}"


def test_curve_roundtrip(tmp_path):
    c = generate_ellipse(2.0, 1.0, 300)
    io.write_curve(c, tmp_path / "c.txt")
    back = io.read_curve(tmp_path / "c.txt")
    assert np.array_equal(back.points, c.points)
    assert (tmp_path / "c.txt").read_text().startswith("# mizel-curve n=300 orientation=ccw closed=true")


def test_curve_reader_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 2\n3 4\n")
    with pytest.raises(ConfigError):
        io.read_curve(p)
    p.write_text("# n=2 orientation=ccw closed=true\n1 2 3\n")
    with pytest.raises(ConfigError):
        io.read_curve(p)
    p.write_text("# n=2 closed=false\n1 2\n")
    with pytest.raises(ConfigError):
        io.read_curve(p)


def test_witness_csv(tmp_path):
    c = generate_reuleaux(3, 1.0, 512)
    rep = scan_curve(c, diagonal=1.0, max_short_side=0.15)
    io.write_witness_csv(rep, tmp_path / "w.csv")
    rows = io.read_witness_csv(tmp_path / "w.csv")
    assert rows.shape == (rep.violation_count, 13)
    assert np.array_equal(rows[:, 8], rep.arrays["fourth_distance"])
    assert np.array_equal(rows[:, 6:8], rep.arrays["fourth"])
    io.write_witness_csv(rep, tmp_path / "w5.csv", limit=5)
    assert len(io.read_witness_csv(tmp_path / "w5.csv")) == 5


def test_classification_csv(tmp_path):
    c = generate_ellipse(2.0, 1.0, 512)
    rep = classify_curve(c, ClassificationParams.for_curve(c, 2.0))
    io.write_classification_csv(c, rep, tmp_path / "cls.csv")
    pts, labels = io.read_classification_csv(tmp_path / "cls.csv")
    assert np.array_equal(pts, c.points)
    assert labels == [x.value for x in rep.labels]


@pytest.mark.parametrize("shape", ["circle", "square", "ellipse"])
def test_packing_roundtrip(tmp_path, shape):
    outer = Circle(Point2(0.0, 0.0), 1.0)
    pk = (greedy_circle_packing(outer, 0.02, 30, seed=5) if shape == "circle"
          else greedy_shape_packing(outer, shape, 0.02, 30, seed=5))
    io.write_packing(pk, tmp_path / "p.json")
    assert io.read_packing(tmp_path / "p.json") == pk


def test_packing_reader_errors(tmp_path):
    p = tmp_path / "p.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        io.read_packing(p)
    p.write_text('{"outer": {"kind": "circle", "center": [0, 0], "radius": 1}, "inner": [{"kind": "blob"}]}')
    with pytest.raises(ConfigError):
        io.read_packing(p)


def test_probe_csv(tmp_path):
    pk = greedy_circle_packing(Circle(Point2(0, 0), 1.0), 0.02, 20, seed=1)
    K = CompactSetK(pk)
    probes = [Circle(Point2(0.1, 0.2), 0.5), Circle(Point2(3, 3), 0.5), pk.outer]
    rows = [(p, probe_circle_intersection(K, p)) for p in probes]
    io.write_probe_csv(rows, tmp_path / "pr.csv")
    back = io.read_probe_csv(tmp_path / "pr.csv")
    assert [b["probe"] for b in back] == probes
    assert [b["components"] for b in back] == [r.components for _, r in rows]
    assert back[2]["full_arc"] and not back[1]["full_arc"]


# -- SVG ----------------------------------------------------------------------

def _parse(text):
    root = ET.fromstring(text.split("\n", 1)[1])
    assert root.tag == NS + "svg" and root.get("version") == "1.1"
    return root


def _finite_numbers(root):
    for el in root.iter():
        for k, v in el.attrib.items():
            if k in ("cx", "cy", "r", "x", "y", "width", "height", "stroke-width"):
                assert math.isfinite(float(v))


def test_empty_scene(tmp_path):
    path = render_svg(Scene(), tmp_path / "e.svg")
    root = _parse(path.read_text())
    assert list(root) == []
    assert root.get("viewBox") == "0 0 1 1"


def test_single_circle():
    s = Scene()
    s.add_circle(Circle(Point2(0.0, 0.0), 1.0))
    root = _parse(to_svg(s))
    circles = list(root.iter(NS + "circle"))
    assert len(circles) == 1
    c = circles[0]
    assert (float(c.get("cx")), float(c.get("cy")), float(c.get("r"))) == (0.0, 0.0, 1.0)
    x, y, w, h = map(float, root.get("viewBox").split())
    assert x == pytest.approx(-1.1) and y == pytest.approx(-1.1) and w == pytest.approx(2.2)


def test_witness_rendering():
    s = Scene()
    s.add_witness((0, 0), (1, 0), (1, 2), (0, 2))
    root = _parse(to_svg(s))
    poly = root.find(f".//{NS}polygon[@class='witness']")
    assert len(poly.get("points").split()) == 4
    assert len(root.findall(f".//{NS}circle[@class='vertex']")) == 3
    fourth = root.findall(f".//{NS}circle[@class='fourth']")
    assert len(fourth) == 1 and fourth[0].get("fill") == "#ff0000"
    assert (float(fourth[0].get("cx")), float(fourth[0].get("cy"))) == (0.0, -2.0)


def test_view_box_contains_everything_with_margin():
    s = Scene()
    c = generate_ellipse(3.0, 1.0, 128)
    s.add_curve(c.points)
    s.add_point(5.0, 0.5)
    s.add_label(-4.0, 2.0, "A & B <ok>")
    x, y, w, h = s.view_box()
    # model bounds are x in [-4, 5], y in [-1, 2]; the margin is 5% of the larger side
    assert x == pytest.approx(-4.45) and x + w == pytest.approx(5.45)
    assert -(y + h) == pytest.approx(-1.45) and -y == pytest.approx(2.45)
    root = _parse(to_svg(s))
    _finite_numbers(root)
    assert root.find(f".//{NS}text").text == "A & B <ok>"


def test_classified_colors_and_determinism():
    s = Scene()
    s.add_classified_points([(0, 0), (1, 1), (2, 0)], ["A", "B", "UNRESOLVED"])
    text = to_svg(s)
    fills = [el.get("fill") for el in _parse(text).iter(NS + "circle")]
    assert fills == [CLASS_COLORS["A"], CLASS_COLORS["B"], CLASS_COLORS["UNRESOLVED"]]
    assert to_svg(s) == text


def test_nonfinite_rejected():
    s = Scene()
    s.add_point(float("nan"), 0.0)
    with pytest.raises(ValueError):
        to_svg(s)
