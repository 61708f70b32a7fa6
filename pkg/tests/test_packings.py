import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import Point as SPoint
from shapely.geometry import Polygon

from mizel import (BadParameter, Circle, CompactSetK, DiskPacking, EllipseCell, Point2, SquareCell,
                   curve_circle_components, exactly_m_search, generate_circle, generate_ellipse,
                   greedy_circle_packing, greedy_shape_packing, k_membership,
                   probe_circle_intersection)
from oracles import in_K_loop

UNIT = Circle(Point2(0.0, 0.0), 1.0)


@pytest.fixture(scope="module")
def pk64():
    return greedy_circle_packing(UNIT, 0.01, 64, seed=42)


@pytest.fixture(scope="module")
def K64(pk64):
    return CompactSetK(pk64)


def _disks(pk):
    return [((c.center.x, c.center.y), c.radius) for c in pk.inner]


def test_packing_valid_exhaustive(pk64):
    assert len(pk64.inner) == 64 and pk64.depth == 64
    assert pk64.violations() == []
    D = _disks(pk64)
    for i, ((x, y), r) in enumerate(D):
        assert math.hypot(x, y) + r < 1.0
        for (x2, y2), r2 in D[i + 1:]:
            assert math.hypot(x - x2, y - y2) > r + r2


@pytest.mark.parametrize("seed", [0, 1, 7, 123])
def test_packing_valid_other_seeds(seed):
    pk = greedy_circle_packing(Circle(Point2(3.0, -1.0), 2.5), 0.02, 80, seed=seed)
    assert pk.violations() == []
    assert 0 < pk.coverage() < 1


def test_packing_deterministic_and_nested():
    a = greedy_circle_packing(UNIT, 0.01, 64, seed=42)
    b = greedy_circle_packing(UNIT, 0.01, 64, seed=42)
    assert a == b
    small = greedy_circle_packing(UNIT, 0.01, 20, seed=42)
    assert small.inner == a.inner[:20] == a.prefix(20).inner


def test_packing_detects_overlap():
    bad = DiskPacking(UNIT, [Circle(Point2(0, 0), 0.3), Circle(Point2(0.5, 0), 0.3),
                             Circle(Point2(0.9, 0), 0.2)], 3)
    kinds = {v[0] for v in bad.violations()}
    assert kinds == {"overlap", "containment"}


def test_packing_parameter_checks():
    with pytest.raises(BadParameter):
        greedy_circle_packing(UNIT, 0.6, 10)
    with pytest.raises(BadParameter):
        greedy_circle_packing(UNIT, 0.01, -1)


def test_membership_matches_formula(pk64, K64):
    rng = np.random.default_rng(2024)
    P = rng.uniform(-1.1, 1.1, (100_000, 2))
    D = _disks(pk64)
    want = np.array([in_K_loop(p, (0.0, 0.0), 1.0, D) for p in P])
    assert np.count_nonzero(K64.contains(P) != want) == 0
    for p in P[:200]:
        assert k_membership(K64, p) == in_K_loop(p, (0.0, 0.0), 1.0, D)


def test_K_contains_boundary_circles(pk64, K64):
    t = np.linspace(0, 2 * math.pi, 500, endpoint=False)
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    assert K64.contains(u * (1 - 1e-12)).all()
    for c in pk64.inner:
        ring = np.array([c.center.x, c.center.y]) + c.radius * (1 + 1e-12) * u
        assert K64.contains(ring).all()
    assert np.all(K64.depth_function(u) <= 1e-15)


# -- probes -------------------------------------------------------------------

def test_probe_coincident_is_infinite(pk64, K64):
    assert probe_circle_intersection(K64, pk64.inner[3]).verdict == math.inf
    assert probe_circle_intersection(K64, UNIT).verdict == math.inf


def test_probe_disjoint_is_zero(K64):
    r = probe_circle_intersection(K64, Circle(Point2(5.0, 5.0), 1.0))
    assert r.components == 0 and not r.has_full_arc and r.verdict == 0


def test_probe_inside_hole(pk64, K64):
    c = pk64.inner[0]
    inner = probe_circle_intersection(K64, Circle(c.center, 0.5 * c.radius))
    assert inner.verdict == 0
    # internally tangent to the hole: one isolated point
    rho = 0.5 * c.radius
    probe = Circle(Point2(c.center.x + c.radius - rho, c.center.y), rho)
    res = probe_circle_intersection(K64, probe)
    assert res.verdict == 1 and not res.has_full_arc
    # the touching point sits at angle 0, found either as a sample or as a tangency
    where = [s for s, _ in res.arcs] + list(res.isolated_points)
    assert min(min(abs(w), abs(w - 2 * math.pi)) for w in where) < 1e-6
    # off-grid tangency angle: only the exact tangency solver can see it
    ang = 0.123456
    probe = Circle(Point2(c.center.x + (c.radius - rho) * math.cos(ang),
                          c.center.y + (c.radius - rho) * math.sin(ang)), rho)
    res = probe_circle_intersection(K64, probe)
    assert res.verdict == 1 and len(res.isolated_points) == 1
    assert res.isolated_points[0] == pytest.approx(ang, abs=1e-6)


def test_probe_externally_tangent_to_outer(K64):
    res = probe_circle_intersection(K64, Circle(Point2(1.5, 0.0), 0.5))
    assert res.verdict == 1 and not res.has_full_arc


def test_probe_resolution_floor(K64):
    with pytest.raises(BadParameter):
        probe_circle_intersection(K64, UNIT, angular_resolution=1000)


def _covered(arcs, theta):
    return any((theta - s) % (2 * math.pi) <= m + 1e-9 for s, m in arcs)


@settings(max_examples=20)
@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.floats(0.05, 1.2), st.integers(1, 63))
def test_probe_monotone_on_nested_packings(cx, cy, rho, k):
    pk = greedy_circle_packing(UNIT, 0.01, 64, seed=42)
    probe = Circle(Point2(cx, cy), rho)
    coarse = probe_circle_intersection(CompactSetK(pk.prefix(k)), probe)
    fine = probe_circle_intersection(CompactSetK(pk.prefix(k + 1)), probe)
    total = lambda r: sum(m for _, m in r.arcs)  # noqa: E731
    assert total(fine) <= total(coarse) + 1e-9
    for s, m in fine.arcs:
        for frac in (0.0, 0.5, 1.0):
            assert _covered(coarse.arcs, s + frac * m)


def test_probe_arcs_match_dense_membership(K64):
    rng = np.random.default_rng(9)
    for _ in range(20):
        probe = Circle(Point2(*rng.uniform(-0.8, 0.8, 2)), float(rng.uniform(0.1, 0.9)))
        res = probe_circle_intersection(K64, probe)
        t = np.linspace(0, 2 * math.pi, 200_000, endpoint=False)
        pts = np.stack([probe.center.x + probe.radius * np.cos(t),
                        probe.center.y + probe.radius * np.sin(t)], axis=1)
        inside = K64.contains(pts)
        measure = inside.mean() * 2 * math.pi
        assert sum(m for _, m in res.arcs) == pytest.approx(measure, abs=1e-3)


# -- shaped cells ---------------------------------------------------------------

def test_square_cell_inside_matches_shapely():
    sq = SquareCell(Point2(0.3, -0.2), 0.4, 0.7)
    poly = Polygon(sq.corners())
    rng = np.random.default_rng(4)
    P = rng.uniform(-1, 1, (3000, 2))
    got = sq.inside(P)
    want = np.array([poly.contains(SPoint(*p)) for p in P])
    assert np.array_equal(got, want)


def test_ellipse_cell_inside_matches_formula():
    e = EllipseCell(Point2(0.1, 0.2), 0.5, 0.2, 0.4)
    rng = np.random.default_rng(5)
    P = rng.uniform(-1, 1, (3000, 2))
    c, s = math.cos(0.4), math.sin(0.4)
    x, y = P[:, 0] - 0.1, P[:, 1] - 0.2
    u, v = c * x + s * y, -s * x + c * y
    assert np.array_equal(e.inside(P), (u / 0.5) ** 2 + (v / 0.2) ** 2 < 1)


@pytest.mark.parametrize("shape", ["square", "ellipse"])
def test_shape_packing_valid_and_probed(shape):
    pk = greedy_shape_packing(UNIT, shape, 0.02, 40, seed=42)
    assert pk.violations() == [] and len(pk.cells) == 40
    K = CompactSetK(pk)
    assert probe_circle_intersection(K, Circle(Point2(3.0, 0.0), 0.5)).verdict == 0
    res = probe_circle_intersection(K, Circle(Point2(0.1, 0.1), 0.6))
    assert res.components >= 1
    with pytest.raises(BadParameter):
        greedy_shape_packing(UNIT, "hexagon", 0.02, 5)


# -- circle/curve counting and the exactly-m search --------------------------------

def test_curve_circle_components_basic():
    c = generate_circle(1.0, 720)
    assert curve_circle_components(c, Circle(Point2(1.0, 0.0), 1.0)) == (2, False)
    assert curve_circle_components(c, Circle(Point2(0.0, 0.0), 1.0)) == (1, True)
    assert curve_circle_components(c, Circle(Point2(5.0, 0.0), 1.0)) == (0, False)
    # internally tangent at the vertex (1, 0)
    assert curve_circle_components(c, Circle(Point2(0.5, 0.0), 0.5)) == (1, False)


def test_search_circle_none():
    res = exactly_m_search(generate_circle(1.0, 1024), 3, budget=3000, seed=1)
    assert not res.found and res.probes_tried == 3000
    assert "not found" in res.describe()


def _ellipse_count_oracle(probe, a=2.0, b=1.0, m=2_000_000, tau=1e-7):
    t = np.linspace(0, 2 * math.pi, m, endpoint=False)
    f = np.hypot(a * np.cos(t) - probe.center.x, b * np.sin(t) - probe.center.y) - probe.radius
    crossings = np.count_nonzero(np.sign(f) != np.sign(np.roll(f, 1)))
    g = np.abs(f)
    touch = (g < tau) & (g <= np.roll(g, 1)) & (g <= np.roll(g, -1)) & (np.sign(np.roll(f, 1)) == np.sign(np.roll(f, -1)))
    return crossings + int(np.count_nonzero(touch))


def test_search_ellipse_finds_three_points():
    res = exactly_m_search(generate_ellipse(2.0, 1.0, 4096), 3, budget=10_000, seed=0)
    assert res.found
    assert _ellipse_count_oracle(res.probe) == 3


def test_search_packing_none_small_budget(K64):
    res = exactly_m_search(K64, 3, budget=300, seed=3)
    assert not res.found


def test_search_packing_counts(K64):
    # a circle missing every arc of K lies in one hole or outside, touching at most once
    assert exactly_m_search(K64, 1, budget=2000, seed=0).found
    assert not exactly_m_search(K64, 2, budget=500, seed=0).found


def test_search_deterministic():
    c = generate_ellipse(2.0, 1.0, 1024)
    r1 = exactly_m_search(c, 3, budget=2000, seed=11)
    r2 = exactly_m_search(c, 3, budget=2000, seed=11)
    assert r1.probe == r2.probe and r1.probes_tried == r2.probes_tried


def test_search_parameter_checks():
    with pytest.raises(BadParameter):
        exactly_m_search(generate_circle(1.0, 128), 0)
    with pytest.raises(BadParameter):
        exactly_m_search(generate_circle(1.0, 128), 3, probe_family="spiral")
