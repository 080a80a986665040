import functools

import numpy as np
import pytest
from scipy.spatial import ConvexHull
from shapely.geometry import Point, Polygon

from wulffdual import metrics as mt
from wulffdual import presets as ps
from wulffdual import region as rg
from wulffdual import wulff as wf
from wulffdual.errors import NotSupporting
from wulffdual.sphere import NORTH, Hemisphere, angle_between, central_unproject, unit

E1, E2, E3 = np.eye(3)
CENTER = unit([1.0, 1.0, 1.0])


# shared bodies: their memoized polars and diameters are reused across tests
@functools.cache
def shared_body(name):
    return ps.get_preset(name).spherical


@functools.cache
def shared_cap(r):
    return ps.cap_at_north(r)


def _dense_boundary(body, per_edge=400):
    """Boundary samples independent of the metrics module."""
    if rg.is_polygon(body):
        v = np.asarray(body.vertices)
        t = np.linspace(0.0, 1.0, per_edge, endpoint=False)[:, None]
        return np.concatenate([unit((1 - t) * v[i] + t * v[(i + 1) % len(v)])
                               for i in range(len(v))])
    return np.asarray(body.boundary)


def _brute_diameter(body):
    b = _dense_boundary(body)
    return float(np.max(np.arccos(np.clip(b @ b.T, -1.0, 1.0))))


def test_diameter_examples():
    rep = mt.diameter(ps.octant())
    assert rep.diameter == pytest.approx(np.pi / 2, abs=1e-12)
    # the witnesses are two of the vertices
    assert np.max(rep.witness_p @ np.eye(3)) == pytest.approx(1.0, abs=1e-12)
    assert np.max(rep.witness_q @ np.eye(3)) == pytest.approx(1.0, abs=1e-12)
    assert angle_between(rep.witness_p, rep.witness_q) == pytest.approx(np.pi / 2, abs=1e-12)
    assert mt.diameter(shared_cap(np.pi / 8)).diameter == pytest.approx(np.pi / 4, abs=1e-12)
    assert mt.diameter(shared_body("reuleaux")).diameter == pytest.approx(np.pi / 2, abs=1e-12)


def test_diameter_against_brute_force_on_random_polygons():
    rng = np.random.default_rng(17)
    for _ in range(20):
        poly = rg.random_polygon(rng)
        brute = _brute_diameter(poly)
        ours = mt.diameter(poly).diameter
        # the brute force only sees samples, so it can only under-estimate
        assert brute - 1e-12 <= ours <= brute + 1e-4


def test_diameter_monotone_under_inclusion():
    rng = np.random.default_rng(4)
    for _ in range(10):
        outer = rg.random_polygon(rng)
        inner = rg.s_conv_hull(0.5 * (outer.vertices + outer.interior_point))
        assert mt.diameter(inner).diameter <= mt.diameter(outer).diameter + 1e-10


def test_width_wrt_examples():
    octant = ps.octant()
    assert mt.width_wrt(octant, Hemisphere(E1)) == pytest.approx(np.pi / 2, abs=1e-12)
    cap = shared_cap(np.pi / 4)
    h = rg.supporting_hemisphere_at(cap, cap.boundary[37]).hemispheres[0]
    assert mt.width_wrt(cap, h) == pytest.approx(np.pi / 2, abs=1e-9)
    with pytest.raises(NotSupporting):
        mt.width_wrt(octant, Hemisphere(CENTER))


def test_width_wrt_ellipse_against_dense_oracle():
    # supporting hemisphere at the lift of (2, 0); width is the smallest lune
    # thickness pi - |c c'| over supporting centres c' of the body
    body = shared_body("ellipse21")
    c = rg.supporting_hemisphere_at(body, central_unproject([2.0, 0.0])).hemispheres[0].center
    th = np.linspace(0.0, 2 * np.pi, 100_000, endpoint=False)
    # exact supporting centres of the lifted ellipse: poles of the tangent great circles
    x = np.stack([2 * np.cos(th), np.sin(th), np.ones_like(th)], axis=1)
    tangent = np.stack([-2 * np.sin(th), np.cos(th), np.zeros_like(th)], axis=1)
    centers = unit(np.cross(x, tangent))
    centers = np.where((centers @ NORTH < 0)[:, None], -centers, centers)
    oracle = np.pi - np.max(np.arccos(np.clip(centers @ c, -1, 1)))
    assert mt.width_wrt(body, Hemisphere(c)) == pytest.approx(oracle, abs=1e-6)


def test_thickness_examples():
    assert mt.thickness(ps.octant()) == pytest.approx(np.pi / 2, abs=1e-12)
    assert mt.thickness(shared_cap(np.pi / 8)) == pytest.approx(np.pi / 4, abs=1e-12)
    sq = wf.spherical_wulff(ps.square())
    identity = mt.thickness(sq) + mt.diameter(rg.polar(sq)).diameter
    assert identity == pytest.approx(np.pi, abs=1e-9)


@pytest.mark.parametrize("r", [np.pi / 16, np.pi / 8, np.pi / 4, 3 * np.pi / 8])
def test_cap_widths(r):
    cap = shared_cap(r)
    w = mt.is_constant_width(cap, 1e-9)
    assert w.constant and w.delta == pytest.approx(2 * r, abs=1e-9)
    p = mt.is_constant_width(rg.polar(cap), 1e-9)
    assert p.constant and p.delta == pytest.approx(np.pi - 2 * r, abs=1e-9)


def test_constant_width_examples():
    w = mt.is_constant_width(ps.octant(), 1e-9)
    assert w.constant and w.delta == pytest.approx(np.pi / 2, abs=1e-12)
    e = mt.is_constant_width(shared_body("ellipse21"), 1e-6)
    assert not e.constant and e.spread > 0.1
    r = mt.is_constant_width(shared_body("reuleaux"), 1e-9)
    assert r.constant and r.delta == pytest.approx(np.pi / 2, abs=1e-12)


def test_widths_bounded_below_by_thickness():
    rng = np.random.default_rng(3)
    for _ in range(10):
        poly = rg.random_polygon(rng)
        th = mt.thickness(poly)
        w = mt.width_at(poly, mt.boundary_samples(rg.polar(poly)))
        assert np.min(w) >= th - 1e-12
        assert 0 < th and np.max(w) < np.pi


def test_constant_diameter_examples():
    assert mt.is_constant_diameter(shared_body("reuleaux"), 1e-6).constant
    cap = mt.is_constant_diameter(shared_cap(np.pi / 4), 1e-6)
    assert cap.constant and cap.diameter == pytest.approx(np.pi / 2, abs=1e-12)
    sq = mt.is_constant_diameter(wf.spherical_wulff(ps.square()), 1e-6)
    assert not sq.constant


def test_smoothed_reuleaux_is_constant_width_and_diameter():
    smooth = shared_body("reuleaux_smoothed")
    w = mt.is_constant_width(smooth, 1e-9)
    assert w.constant and w.delta == pytest.approx(np.pi / 2, abs=1e-9)
    assert mt.is_constant_diameter(smooth, 1e-9).constant


def test_hausdorff_planar_examples():
    disk = ps.disk()
    assert mt.hausdorff_planar(disk, disk) == 0.0
    d1 = wf.PlanarConvexBody(disk.vertices)
    d2 = wf.PlanarConvexBody(2 * disk.vertices)
    assert mt.hausdorff_planar(d1, d2) == pytest.approx(1.0, abs=1e-5)
    sq = ps.square()
    diamond = wf.dual_wulff(sq)
    assert mt.hausdorff_planar(sq, diamond) == pytest.approx(np.sqrt(2) / 2, abs=1e-12)


def test_hausdorff_planar_against_shapely():
    rng = np.random.default_rng(31)
    for _ in range(20):
        a = rng.normal(size=(12, 2))
        b = rng.normal(size=(9, 2)) + rng.normal(scale=0.3, size=2)
        a, b = a[ConvexHull(a).vertices], b[ConvexHull(b).vertices]
        pa, pb = Polygon(a), Polygon(b)
        t = np.linspace(0, 1, 200, endpoint=False)[:, None]

        def dense(v):
            return np.concatenate([v[i] + t * (v[(i + 1) % len(v)] - v[i]) for i in range(len(v))])

        oracle = max(max(pb.distance(Point(p)) for p in dense(a)),
                     max(pa.distance(Point(p)) for p in dense(b)))
        ours = mt.hausdorff_planar(a, b)
        assert oracle - 1e-12 <= ours <= oracle + 1e-3


def test_hausdorff_spherical_examples():
    a = shared_cap(np.pi / 8)
    assert mt.hausdorff_spherical(a, a) == pytest.approx(0.0, abs=1e-12)
    b = shared_cap(np.pi / 4)
    assert mt.hausdorff_spherical(a, b) == pytest.approx(np.pi / 8, abs=1e-12)


def test_hausdorff_spherical_octant_vs_cap():
    octant = ps.octant()
    cap = rg.cap(CENTER, np.pi / 4)
    # dense oracle: distance to a cap is exact; distance to the octant by
    # brute force over dense boundary samples for exterior points
    ob = _dense_boundary(octant, per_edge=4000)
    to_cap = np.max(np.maximum(angle_between(ob, CENTER) - np.pi / 4, 0.0))
    cb = np.asarray(rg.cap(CENTER, np.pi / 4, mesh=4000).boundary)
    outside = np.min(cb @ np.eye(3), axis=1) < 0
    d = np.arccos(np.clip(cb[outside] @ ob.T, -1, 1)).min(axis=1)
    to_oct = float(np.max(d)) if len(d) else 0.0
    oracle = max(to_cap, to_oct)
    assert oracle > 0.1
    assert mt.hausdorff_spherical(octant, cap) == pytest.approx(oracle, abs=1e-6)


@pytest.mark.parametrize("name", ["octant", "cap_pi/8", "reuleaux"])
def test_diameter_support_check_examples(name):
    rep = mt.diameter_support_check(shared_body(name))
    assert rep.passed, rep.residuals


def test_metric_values_lie_in_open_interval():
    for name in ("square", "ellipse21", "cap_3pi/8", "octant", "reuleaux"):
        body = ps.get_preset(name, 256).spherical
        assert 0 < mt.thickness(body) < np.pi
        assert 0 < mt.diameter(body).diameter < np.pi
