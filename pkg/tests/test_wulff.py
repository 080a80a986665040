import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull
from shapely.geometry import Point, Polygon

from wulffdual import metrics as mt
from wulffdual import presets as ps
from wulffdual import region as rg
from wulffdual import wulff as wf
from wulffdual.errors import (
    EmptyInterior,
    InvalidSupportFunction,
    NotConvex,
    NotInterior,
    Unbounded,
)
from wulffdual.sphere import NORTH, angle_between, blow_up, central_project, random_cap_points

SQUARE = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
DIAMOND = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])


def _cyclic_match(a, b, tol):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    k = int(np.argmin(np.linalg.norm(b - a[0], axis=1)))
    return np.max(np.linalg.norm(np.roll(b, -k, axis=0) - a, axis=1)) <= tol


def _brute_force_wulff(halfplanes):
    """Vertices as feasible pairwise intersections of the constraint lines."""
    n = np.array([h.theta for h in halfplanes])
    g = np.array([h.gamma for h in halfplanes])
    pts = []
    for i, j in itertools.combinations(range(len(g)), 2):
        a = np.array([n[i], n[j]])
        if abs(np.linalg.det(a)) < 1e-12:
            continue
        x = np.linalg.solve(a, [g[i], g[j]])
        if np.all(n @ x <= g + 1e-9):
            pts.append(x)
    pts = np.array(pts)
    ang = np.arctan2(pts[:, 1], pts[:, 0])
    pts = pts[np.argsort(ang)]
    keep = np.linalg.norm(pts - np.roll(pts, 1, axis=0), axis=1) > 1e-9
    return pts[keep]


def _support_gap(vertices, gamma, count=20_000):
    """max |h_W - gamma| on a dense direction grid (Hausdorff to the exact body).

    The gap is smooth between the polygon normals, so the grid misses its
    maximum by a second-order amount, about 1e-7 at this density.
    """
    th = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
    u = np.stack([np.cos(th), np.sin(th)], axis=1)
    return float(np.max(np.abs(np.max(u @ np.asarray(vertices).T, axis=1) - gamma(th))))


def _dense_hausdorff(a, b, per_edge=400):
    """Hausdorff distance from dense boundary samples and exact point-to-polygon distances."""
    pa, pb = Polygon(a), Polygon(b)

    def samples(v):
        t = np.linspace(0.0, 1.0, per_edge, endpoint=False)[:, None]
        return np.concatenate([v[i] + t * (v[(i + 1) % len(v)] - v[i]) for i in range(len(v))])

    da = max(pb.distance(Point(p)) for p in samples(np.asarray(a)))
    db = max(pa.distance(Point(p)) for p in samples(np.asarray(b)))
    return max(da, db)


# ---------------------------------------------------------------- support functions


def test_support_function_validation():
    with pytest.raises(InvalidSupportFunction):
        wf.Constant(-1.0)
    with pytest.raises(InvalidSupportFunction):
        wf.Ellipse(2.0, 0.0)
    th = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    with pytest.raises(InvalidSupportFunction):
        wf.Sampled(th[:7], np.ones(7))
    with pytest.raises(InvalidSupportFunction):
        wf.Sampled(th[::-1], np.ones(8))
    with pytest.raises(InvalidSupportFunction):
        wf.Sampled(th, -np.ones(8))
    th16 = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    with pytest.raises(InvalidSupportFunction):
        wf.Sampled(th16, 1.0 + 0.01 * np.arange(16))  # jump across the wrap
    with pytest.raises(EmptyInterior):
        wf.PolygonGamma([[1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0]])


def test_sampled_interpolates_periodically():
    th = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    g = 1.0 + 0.1 * np.cos(th)
    sf = wf.Sampled(th, g)
    np.testing.assert_allclose(sf(th), g)
    mid = 2 * np.pi - np.pi / 8
    assert sf(mid) == pytest.approx(0.5 * (g[-1] + g[0]))


def test_sample_gamma_examples():
    with pytest.raises(ValueError):
        wf.sample_gamma(wf.Constant(1.0), 4)
    hp = wf.sample_gamma(wf.Constant(1.0), 8)
    assert len(hp) == 8 and all(h.gamma == 1.0 for h in hp)


# ---------------------------------------------------------------- construction


def test_wulff_construct_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(10):
        th = np.sort(rng.uniform(0, 2 * np.pi, 24))
        g = rng.uniform(0.5, 2.0, 24)
        hp = [wf.HalfPlane(np.array([np.cos(t), np.sin(t)]), float(x)) for t, x in zip(th, g)]
        try:
            body = wf.wulff_construct(hp)
        except Unbounded:
            assert np.max(np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))) >= np.pi
            continue
        assert _cyclic_match(body.vertices, _brute_force_wulff(hp), 1e-9)


def test_wulff_construct_rejects_unbounded():
    hp = [wf.HalfPlane(np.array([np.cos(t), np.sin(t)]), 1.0) for t in np.linspace(0.0, 2.5, 8)]
    with pytest.raises(Unbounded):
        wf.wulff_construct(hp)


def test_disk_polygon_radius():
    w = wf.wulff_construct(wf.sample_gamma(wf.Constant(1.0), 2048))
    r = np.linalg.norm(w.vertices, axis=1)
    assert len(w.vertices) == 2048
    assert r.min() >= 1 - 1e-12 and r.max() <= 1 / np.cos(np.pi / 2048) + 1e-12


def test_polygon_gamma_reconstructs_square():
    w = wf.wulff_construct(wf.sample_gamma(wf.PolygonGamma(SQUARE), 2048))
    assert _cyclic_match(w.vertices, SQUARE, 1e-9)


def test_ellipse_wulff_shape():
    sf = wf.Ellipse(2.0, 1.0)
    w = wf.wulff_construct(wf.sample_gamma(sf, 2048))
    assert _support_gap(w.vertices, sf) <= 1e-5


def test_planar_body_validation():
    with pytest.raises(NotConvex):
        wf.PlanarConvexBody([[1.0, 0.0], [0.0, 0.1], [-1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(EmptyInterior):
        wf.PlanarConvexBody([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


# ---------------------------------------------------------------- lifting


def test_spherical_wulff_examples():
    disk = wf.spherical_wulff(ps.disk())
    np.testing.assert_allclose(angle_between(disk.boundary, NORTH), np.pi / 4, atol=1e-12)
    small = wf.spherical_wulff(ps.disk(radius=np.tan(np.pi / 8)))
    np.testing.assert_allclose(angle_between(small.boundary, NORTH), np.pi / 8, atol=1e-12)
    sq = wf.spherical_wulff(ps.square())
    assert rg.is_polygon(sq)
    np.testing.assert_allclose(np.abs(sq.vertices), 1 / np.sqrt(3), atol=1e-15)


@pytest.mark.parametrize("name", ["square", "triangle_sqrt2", "ellipse21", "cap_pi/8"])
def test_lifting_consistency(name):
    p = ps.get_preset(name, 512)
    body = p.spherical
    assert rg.contains(body, NORTH) is rg.Location.INTERIOR
    chart = central_project(np.asarray(body.boundary))
    if rg.is_polygon(body):
        assert _cyclic_match(chart, p.planar.vertices, 1e-10)
    else:
        np.testing.assert_allclose(chart, p.planar.boundary(len(chart)), atol=1e-10)


# ---------------------------------------------------------------- duality


def test_dual_of_square_is_diamond():
    d = wf.dual_wulff(ps.square())
    assert _cyclic_match(d.vertices, DIAMOND, 1e-12)


def test_dual_of_disk_is_disk():
    d = wf.dual_wulff(ps.disk())
    assert _support_gap(d.vertices, lambda th: np.ones_like(th)) <= 2e-5


def test_dual_of_triangle_is_itself():
    t = ps.triangle_sqrt2()
    d = wf.dual_wulff(t)
    assert _cyclic_match(d.vertices, t.vertices, 1e-9)


def test_dual_is_an_involution_on_random_polygons():
    rng = np.random.default_rng(21)
    for _ in range(30):
        ang = np.sort(rng.uniform(0, 2 * np.pi, rng.integers(3, 12)))
        if np.max(np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))) >= np.pi - 0.1:
            continue
        r = rng.uniform(0.5, 2.0, len(ang))
        pts = np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)
        w = wf.PlanarConvexBody(pts[ConvexHull(pts).vertices])
        dd = wf.dual_wulff(wf.dual_wulff(w))
        assert mt.hausdorff_planar(dd, w) <= 1e-8


def test_pipeline_examples():
    disk = wf.dual_via_pipeline(wf.Constant(1.0), 2048)
    assert _support_gap(disk.vertices, lambda th: np.ones_like(th)) <= 2e-5
    sf = wf.Ellipse(2.0, 1.0)
    a = wf.wulff_construct(wf.sample_gamma(sf, 2048))
    b = wf.dual_via_pipeline(sf, 2048)
    assert _dense_hausdorff(a.vertices, b.vertices, per_edge=4) <= 1e-5
    tri = wf.dual_via_pipeline(wf.PolygonGamma(wf.triangle_vertices()), 2048)
    assert _cyclic_match(tri.vertices, wf.triangle_vertices(), 1e-6)


def test_self_dual_examples():
    disk = wf.is_self_dual(ps.disk())
    assert disk.self_dual and disk.hausdorff_distance <= 2e-5
    tri = wf.is_self_dual(ps.triangle_sqrt2())
    assert tri.self_dual and tri.hausdorff_distance <= 1e-9
    sq = wf.is_self_dual(ps.square())
    assert not sq.self_dual


def test_square_diamond_distance_against_dense_oracle():
    # corner (1,1) of the square is sqrt(2) from the origin; the nearest
    # diamond point is the midpoint (1/2,1/2) of the facing edge
    oracle = _dense_hausdorff(SQUARE, DIAMOND)
    assert oracle == pytest.approx(np.sqrt(2) / 2, abs=1e-12)
    assert wf.is_self_dual(ps.square()).hausdorff_distance == pytest.approx(oracle, abs=1e-12)


def test_self_duality_transfers_to_the_sphere():
    for name in ("disk", "ellipse21", "square", "triangle_sqrt2", "cap_pi/8", "reuleaux"):
        p = ps.get_preset(name, 256)
        planar = wf.is_self_dual(p.planar).self_dual
        body = p.spherical
        gap = mt.hausdorff_spherical(body, rg.polar(body))
        assert planar == (gap <= wf.mesh_tolerance(256)), p.name


# ---------------------------------------------------------------- boundary/support set


def test_support_set_of_centered_cap_is_whole_boundary():
    cap = ps.get_preset("cap_pi/4", 256).spherical
    pts = np.array(wf.boundary_support_intersection(cap, NORTH))
    assert len(pts) == 256
    np.testing.assert_allclose(angle_between(pts, NORTH), np.pi / 4, atol=1e-12)


def test_support_set_of_ellipse_is_the_axes():
    body = ps.get_preset("ellipse21").spherical
    pts = central_project(np.array(wf.boundary_support_intersection(body, NORTH)))
    expected = np.array([[2.0, 0.0], [0.0, 1.0], [-2.0, 0.0], [0.0, -1.0]])
    assert _cyclic_match(pts, expected, 1e-9)


def test_support_set_of_square():
    # r(theta) = h(theta) at the vertices and at the edge midpoints
    body = ps.get_preset("square").spherical
    pts = central_project(np.array(wf.boundary_support_intersection(body, NORTH)))
    expected = np.array([[1, 1], [0, 1], [-1, 1], [-1, 0], [-1, -1], [0, -1], [1, -1], [1, 0]])
    assert _cyclic_match(pts, expected.astype(float), 1e-12)


def test_support_set_points_blow_up_onto_support_centers():
    rng = np.random.default_rng(0)
    body = ps.get_preset("ellipse21", 512).spherical
    for m in random_cap_points(rng, 5, NORTH, 0.2):
        pts = np.array(wf.boundary_support_intersection(body, m))
        assert len(pts) > 0
        for p in pts:
            c = blow_up(m, p)
            assert np.min(np.asarray(body.boundary) @ c) >= -1e-8


def test_support_set_requires_interior_point():
    with pytest.raises(NotInterior):
        wf.boundary_support_intersection(ps.octant(), [0.0, 0.0, -1.0])


# ---------------------------------------------------------------- properties


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-0.15, 0.15), min_size=4, max_size=4))
def test_random_sampled_gamma_shapes_respect_constraints(coef):
    th = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    g = 1.0 + coef[0] * np.cos(th) + coef[1] * np.sin(2 * th) + coef[2] * np.cos(3 * th) \
        + coef[3] * np.sin(4 * th)
    sf = wf.Sampled(th, g)
    w = wf.wulff_shape(sf, 256)
    hp = wf.sample_gamma(sf, 256)
    n = np.array([h.theta for h in hp])
    gam = np.array([h.gamma for h in hp])
    slack = gam - np.max(n @ w.vertices.T, axis=1)
    assert np.min(slack) >= -1e-10
    # every vertex sits on at least two constraints
    active = np.sum(np.abs(n @ w.vertices.T - gam[:, None]) <= 1e-9, axis=0)
    assert np.min(active) >= 2
