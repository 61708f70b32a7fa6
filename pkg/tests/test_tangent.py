import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mizel import (BadParameter, ClassificationParams, PointClass, WindowTooSmall, classify_curve,
                   classify_point, generate_circle, generate_ellipse, generate_fourier_cw,
                   generate_reuleaux, tangent_disk_at)
from oracles import ellipse_curvature

FLAGGED = {PointClass.AB, PointClass.BA, PointClass.UNRESOLVED}


def _labels(curve, d, **kw):
    return classify_curve(curve, ClassificationParams.for_curve(curve, d, **kw))


def _cyclic_gap(curve, i, s):
    L = curve.length
    x = abs(curve.params[i] - s) % L
    return min(x, L - x)


def _crossings(curve, kappa, d):
    """Arclength positions where the oracle curvature crosses 2/d."""
    f = kappa - 2.0 / d
    idx = np.nonzero(np.sign(f) != np.sign(np.roll(f, -1)))[0]
    return [curve.params[i] + 0.5 * curve.edge_lengths[i] for i in idx]


def _ellipse_kappa(curve, a, b):
    t = np.arctan2(curve.points[:, 1] / b, curve.points[:, 0] / a)
    return np.array([ellipse_curvature(a, b, x) for x in t])


def _fourier_kappa(curve, d, a3):
    # outward normal angle theta; radius of curvature h + h'' = d/2 - 8 a3 cos 3 theta
    nrm = -curve.inner_normals
    theta = np.arctan2(nrm[:, 1], nrm[:, 0])
    return 1.0 / (0.5 * d - 8 * a3 * np.cos(3 * theta))


def test_tangent_disk_geometry():
    c = generate_circle(1.0, 64)
    disk = tangent_disk_at(c, 0, 2.0)
    assert abs(disk.center.x) < 1e-15 and abs(disk.center.y) < 1e-15 and disk.radius == 1.0


@pytest.mark.parametrize("n", [64, 100, 1000, 4096])
def test_circle_fixed_point(n):
    rep = _labels(generate_circle(0.5, n), 1.0)
    assert rep.counts[PointClass.C] == n and rep.partition_ok


@pytest.mark.parametrize("n", [256, 4096])
def test_flatter_and_curvier_circles(n):
    assert _labels(generate_circle(0.75, n), 1.0).counts[PointClass.B] == n
    assert _labels(generate_circle(0.35, n), 1.0).counts[PointClass.A] == n


def test_ellipse_labels_at_axes():
    c = generate_ellipse(2.0, 1.0, 4096)
    p = ClassificationParams.for_curve(c, 2.0)
    for target, want in (((2, 0), "A"), ((-2, 0), "A"), ((0, 1), "B"), ((0, -1), "B")):
        i = int(np.argmin(np.hypot(*(c.points - target).T)))
        assert classify_point(c, i, p) == PointClass(want)


@pytest.mark.parametrize("n", [1024, 4096])
def test_ellipse_localization_and_consistency(n):
    c = generate_ellipse(2.0, 1.0, n)
    d = 2.0
    rep = _labels(c, d)
    assert rep.counts[PointClass.A] > 0 and rep.counts[PointClass.B] > 0
    assert rep.counts[PointClass.C] == 0
    kappa = _ellipse_kappa(c, 2.0, 1.0)
    cross = _crossings(c, kappa, d)
    assert len(cross) == 4
    eps = ClassificationParams.for_curve(c, d).eps_nbhd
    for i, lab in enumerate(rep.labels):
        gap = min(_cyclic_gap(c, i, s) for s in cross)
        if lab in FLAGGED:
            assert gap <= 2 * eps
        if gap > eps + c.spacing:
            assert lab == (PointClass.A if kappa[i] > 2 / d else PointClass.B)


def test_fourier_localization_and_consistency():
    d, a3 = 1.0, 0.05
    c = generate_fourier_cw(d, {3: a3}, 4096)
    rep = _labels(c, d)
    kappa = _fourier_kappa(c, d, a3)
    cross = _crossings(c, kappa, d)
    assert len(cross) == 6
    eps = ClassificationParams.for_curve(c, d).eps_nbhd
    for i, lab in enumerate(rep.labels):
        gap = min(_cyclic_gap(c, i, s) for s in cross)
        if lab in FLAGGED:
            assert gap <= 2 * eps
        if gap > eps + c.spacing:
            assert lab == (PointClass.A if kappa[i] > 2 / d else PointClass.B)


@pytest.mark.parametrize("make, d", [
    (lambda: generate_circle(0.5, 4096), 1.0),
    (lambda: generate_circle(0.8, 4096), 1.0),
    (lambda: generate_ellipse(2.0, 1.0, 4096), 2.0),
    (lambda: generate_ellipse(1.5, 1.0, 4096), 2.0),
    (lambda: generate_fourier_cw(1.0, {3: 0.05}, 4096), 1.0),
    (lambda: generate_fourier_cw(1.0, {3: 0.02, 5: (0.003, 0.004)}, 4096), 1.0),
])
def test_unresolved_fraction_small(make, d):
    rep = _labels(make(), d)
    assert rep.fraction("UNRESOLVED") < 0.05
    assert sum(rep.counts.values()) == rep.n


def test_reuleaux_arcs_are_B():
    k, d, n = 3, 1.0, 4096
    c = generate_reuleaux(k, d, n)
    rep = _labels(c, d)
    eps = ClassificationParams.for_curve(c, d).eps_nbhd
    corners = [j * math.pi * d / k for j in range(k)]
    for i, lab in enumerate(rep.labels):
        if min(_cyclic_gap(c, i, s) for s in corners) > eps + c.spacing:
            assert lab == PointClass.B
    assert rep.counts[PointClass.B] > 0.98 * n
    assert rep.counts[PointClass.A] == 0 and rep.counts[PointClass.C] == 0


def test_window_too_small():
    c = generate_circle(0.5, 256)
    with pytest.raises(WindowTooSmall):
        classify_curve(c, ClassificationParams(1.0, 1.5 * c.spacing, 1e-9))


def test_params_validation():
    with pytest.raises(BadParameter):
        ClassificationParams(0.0, 0.1, 1e-9)
    with pytest.raises(BadParameter):
        ClassificationParams(1.0, 0.0, 1e-9)


def test_classify_point_matches_curve():
    c = generate_ellipse(2.0, 1.0, 1024)
    p = ClassificationParams.for_curve(c, 2.0)
    rep = classify_curve(c, p)
    for i in range(0, 1024, 37):
        assert classify_point(c, i, p) == rep.labels[i]


_ell = generate_ellipse(2.0, 1.0, 2048)
_ell_params = ClassificationParams.for_curve(_ell, 2.0)
_ell_labels = classify_curve(_ell, _ell_params).labels


def test_ellipse_has_mixed_labels():
    # the rigid-motion test below is only meaningful if AB/BA occur
    assert {PointClass.AB, PointClass.BA} <= set(_ell_labels)


@settings(max_examples=15)
@given(st.floats(0, 2 * math.pi), st.floats(-5, 5), st.floats(-5, 5), st.booleans())
def test_rigid_motion_equivariance(angle, tx, ty, reflect):
    moved = _ell.transformed(angle, (tx, ty), reflect)
    got = classify_curve(moved, ClassificationParams(2.0, _ell_params.eps_nbhd, _ell_params.arc_match_tol)).labels
    if reflect:
        want = [lab.mirrored() for lab in _ell_labels[::-1]]
    else:
        want = _ell_labels
    assert got == want
