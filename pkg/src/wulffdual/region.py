"""Spherical convex polygons and sampled convex bodies on S^2.

Two body types share one functional interface:

``SphericalPolygon``
    exact polytope given by counterclockwise vertices (seen from outside).
``SampledSphericalBody``
    convex body stored through the gnomonic chart about an interior point
    (see :mod:`wulffdual.radial`), with a dense boundary mesh used to seed
    golden-section refinements on the exact boundary.
"""

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import radial as rad
from .errors import Degenerate, NotConvex, NotHemispherical, NotOnBoundary
from .optimize import golden_max
from .sphere import (
    Hemisphere,
    angle_between,
    central_unproject,
    dot,
    rotation_to_pole,
    unit,
)

DEFAULT_MESH = 2048
#: boundary-membership tolerance for exact constructions
ON_BOUNDARY = 1e-9
#: finite-difference step along the chart angle for tangents
FD_STEP = 1e-6
#: parameter tolerance of golden-section refinements
REFINE_TOL = 1e-11
#: parameter tolerance when only the extreme value is needed; at a smooth
#: extremum the value error is quadratic in the parameter error
VALUE_TOL = 1e-9


class Location(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class Support:
    """Supporting hemispheres at a boundary point.

    For a corner (``fan=True``) the two entries are the extreme members of
    the closed fan; :func:`fan_members` interpolates the rest.
    """

    hemispheres: tuple
    fan: bool

    @property
    def extent(self):
        if not self.fan:
            return 0.0
        a, b = self.hemispheres
        return float(angle_between(a.center, b.center))


def fan_members(support, count):
    if not support.fan:
        return list(support.hemispheres)
    a, b = (h.center for h in support.hemispheres)
    ang = angle_between(a, b)
    t = np.linspace(0.0, 1.0, count)
    pts = (np.sin((1 - t) * ang)[:, None] * a + np.sin(t * ang)[:, None] * b) / np.sin(ang)
    return [Hemisphere(p) for p in pts]


def _readonly(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


# ---------------------------------------------------------------- witnesses


def find_hemisphere_witness(points):
    """Return ``c`` with ``c.v > 0`` for every ``v``, or ``None``.

    Small inputs are solved exactly: the best witness (centre of the
    smallest enclosing cap) is determined by at most three points, so it is
    among the single, pair and triple candidates.  Large inputs use a
    perceptron pass followed by farthest-point recentring.
    """
    p = unit(np.atleast_2d(points))
    n = len(p)
    mean = p.sum(axis=0)
    c = mean / np.linalg.norm(mean) if np.linalg.norm(mean) > 1e-12 else p[0].copy()
    if n <= 40:
        i, j = np.triu_indices(n, 1)
        pair = p[i] + p[j]
        pair = pair[np.linalg.norm(pair, axis=1) > 1e-12]
        tri = np.array(list(itertools.combinations(range(n), 3)), dtype=int).reshape(-1, 3)
        w = np.cross(p[tri[:, 1]] - p[tri[:, 0]], p[tri[:, 2]] - p[tri[:, 0]])
        w = w[np.linalg.norm(w, axis=1) > 1e-12]
        w = unit(w) if len(w) else np.empty((0, 3))
        cands = np.concatenate([c[None], p, unit(pair) if len(pair) else np.empty((0, 3)), w, -w])
        margins = np.min(cands @ p.T, axis=1)
        best = int(np.argmax(margins))
        return cands[best] if margins[best] > 0.0 else None
    for _ in range(500):
        d = p @ c
        if np.min(d) > 0.0:
            break
        c = unit(c + p[d <= 0.0].sum(axis=0) / n)
    else:
        return None
    for k in range(1, 200):
        far = p[np.argmin(p @ c)]
        trial = unit(c + (far - c) / (k + 1))
        if np.min(p @ trial) > np.min(p @ c):
            c = trial
    return c if np.min(p @ c) > 0.0 else None


# ---------------------------------------------------------------- polygons


class SphericalPolygon:
    """Spherical convex polygon with counterclockwise ``vertices``."""

    def __init__(self, vertices, validate=True):
        v = unit(np.asarray(vertices, dtype=float))
        if v.ndim != 2 or v.shape[1] != 3 or len(v) < 3:
            raise Degenerate("a spherical polygon needs at least three vertices")
        self.vertices = _readonly(v)
        if validate:
            self._validate()

    def _validate(self):
        v = self.vertices
        if find_hemisphere_witness(v) is None:
            raise NotHemispherical("polygon vertices are not hemispherical")
        turn = np.einsum("ij,ij->i", np.roll(v, 1, axis=0), np.cross(v, np.roll(v, -1, axis=0)))
        if np.any(np.abs(turn) <= 1e-15):
            raise Degenerate("consecutive vertices are collinear")
        if np.any(turn < 0.0):
            raise NotConvex("polygon is not convex or not counterclockwise")
        side = v @ self.edge_poles.T
        # edge poles of short edges carry an error of order eps / edge length
        if np.min(side) < -1e-10:
            raise NotConvex("polygon is not convex or not counterclockwise")

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"SphericalPolygon({len(self)} vertices)"

    @cached_property
    def edge_poles(self):
        v = self.vertices
        return _readonly(unit(np.cross(v, np.roll(v, -1, axis=0))))

    @cached_property
    def interior_point(self):
        return _readonly(unit(self.vertices.sum(axis=0)))

    @property
    def edges(self):
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def rotated(self, rotation):
        return SphericalPolygon(self.vertices @ np.asarray(rotation).T)

    @property
    def boundary(self):
        return self.vertices


def polar_polygon(polygon):
    """Polar polygon: intersection of ``H(v)`` over the vertices.

    Its vertices are the edge poles, listed counterclockwise.
    """
    return SphericalPolygon(polygon.edge_poles)


def same_polygon(a, b, tol):
    """Vertex-wise comparison up to cyclic relabelling; returns max error."""
    va, vb = np.asarray(a.vertices), np.asarray(b.vertices)
    if len(va) != len(vb):
        return np.inf
    best = np.inf
    for s in range(len(vb)):
        err = float(np.max(angle_between(va, np.roll(vb, -s, axis=0))))
        best = min(best, err)
    return best


def s_conv_hull(points):
    """Spherical convex hull of a hemispherical point set.

    The set is projected through the gnomonic chart about a witness, hulled
    in the plane and lifted back; gnomonic charts map spherical polytopes
    onto planar polytopes, so the hull is exact.
    """
    p = unit(np.atleast_2d(points))
    c = find_hemisphere_witness(p)
    if c is None:
        raise NotHemispherical("no open hemisphere contains the points")
    frame = rotation_to_pole(c)
    local = p @ frame.T
    chart = local[:, :2] / local[:, 2:3]
    try:
        hull = ConvexHull(chart)
    except (QhullError, ValueError) as exc:
        raise Degenerate("spherical hull has empty interior") from exc
    if hull.volume <= 1e-14 * max(1.0, float(np.max(np.abs(chart))) ** 2):
        raise Degenerate("spherical hull has empty interior")
    idx = list(hull.vertices)
    start = idx.index(min(idx))
    idx = idx[start:] + idx[:start]
    return SphericalPolygon(_drop_collinear(p[idx]))


def _drop_collinear(v, tol=1e-13):
    """Remove hull vertices lying on the great circle of their neighbours."""
    v = np.asarray(v)
    while len(v) > 3:
        turn = np.einsum("ij,ij->i", np.roll(v, 1, axis=0), np.cross(v, np.roll(v, -1, axis=0)))
        k = int(np.argmin(turn))
        if turn[k] > tol:
            break
        v = np.delete(v, k, axis=0)
    return v


# ---------------------------------------------------------------- sampled


class SampledSphericalBody:
    """Convex body given by a radial function in the chart about ``center``.

    ``frame`` is the rotation taking ``center`` to the north pole; chart
    coordinates of a sphere point ``X`` are those of ``frame @ X``.  The
    boundary mesh is a uniform fan of ``mesh`` directions plus the declared
    corner directions of the radial function.
    """

    def __init__(self, center, radial, frame=None, mesh=DEFAULT_MESH, validate=True):
        self.center = _readonly(unit(center))
        self.frame = _readonly(rotation_to_pole(self.center) if frame is None else frame)
        self.radial = radial
        self.mesh = int(mesh)
        fan = 2.0 * np.pi * np.arange(self.mesh) / self.mesh
        phi = np.sort(np.concatenate([fan, rad.wrap(np.asarray(radial.corners, float))]))
        keep = np.concatenate([[True], np.diff(phi) > 1e-12])
        if phi[-1] - phi[0] > 2.0 * np.pi - 1e-12:
            keep[-1] = False
        self.phi = _readonly(phi[keep])
        r = radial(self.phi)
        if not np.all(np.isfinite(r)) or np.any(r <= 0.0):
            raise Degenerate("radial function must be finite and positive")
        self.radii = _readonly(r)
        self.chart_boundary = _readonly(r[:, None] * _dirs(self.phi))
        self.boundary = _readonly(self.lift(self.chart_boundary))
        if validate:
            self._validate()

    def __repr__(self):
        return f"SampledSphericalBody({len(self.phi)} samples)"

    def _validate(self):
        x = self.chart_boundary
        d0 = x - np.roll(x, 1, axis=0)
        d1 = np.roll(x, -1, axis=0) - x
        cr = d0[:, 0] * d1[:, 1] - d0[:, 1] * d1[:, 0]
        scale = np.linalg.norm(d0, axis=1) * np.linalg.norm(d1, axis=1)
        if np.any(cr < -1e-8 * scale):
            raise NotConvex("sampled boundary is not locally convex")

    @property
    def interior_point(self):
        return self.center

    def lift(self, chart_points):
        return central_unproject(chart_points) @ self.frame

    def local(self, points):
        return np.asarray(points, dtype=float) @ self.frame.T

    def chart_angle(self, points):
        y = self.local(points)
        return rad.wrap(np.arctan2(y[..., 1], y[..., 0]))

    def point_at(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self.lift(self.radial(phi)[..., None] * _dirs(phi))

    def phi_ext(self, idx):
        """Mesh angle for an unwrapped integer index."""
        m = len(self.phi)
        idx = np.asarray(idx)
        return self.phi[np.mod(idx, m)] + 2.0 * np.pi * np.floor_divide(idx, m)

    @cached_property
    def _chord_normals(self):
        x = self.chart_boundary
        d = np.roll(x, -1, axis=0) - x
        nu = np.unwrap(np.arctan2(-d[:, 0], d[:, 1]))
        return np.maximum.accumulate(nu)

    def support(self, psi):
        """Support function of the chart body in direction angle ``psi``.

        The support point lies between the neighbours of the mesh vertex
        whose adjacent chord normals bracket ``psi``; golden-section search
        on the exact radial function finishes the job.  Returns the value
        and the chart angle of the support point.
        """
        psi = np.asarray(psi, dtype=float)
        if self.radial.support is not None:
            return self.radial.support(psi), np.full(psi.shape, np.nan)
        return self.support_search(psi)

    def support_search(self, psi):
        """Support function by golden-section search on the radial function."""
        psi = np.asarray(psi, dtype=float)
        nu = self._chord_normals
        t = nu[0] + rad.wrap(psi - nu[0])
        j = np.searchsorted(nu, t, side="right")
        wx, wy = np.cos(psi), np.sin(psi)

        def f(phi):
            return self.radial(phi) * (np.cos(phi) * wx + np.sin(phi) * wy)

        lo, hi = self.phi_ext(j - 1), self.phi_ext(j + 1)
        x, fx = golden_max(f, lo, hi, tol=REFINE_TOL)
        seed = self.phi_ext(j)
        fs = f(seed)
        better = fs > fx
        return np.where(better, fs, fx), rad.wrap(np.where(better, seed, x))

    @cached_property
    def _polar(self):
        return SampledSphericalBody(self.center, rad.PolarRadial(self), frame=self.frame,
                                    mesh=self.mesh, validate=False)

    def polar(self, mesh=None):
        if mesh is None or int(mesh) == self.mesh:
            return self._polar
        return SampledSphericalBody(self.center, rad.PolarRadial(self), frame=self.frame,
                                    mesh=mesh, validate=False)

    def with_mesh(self, mesh):
        return SampledSphericalBody(self.center, self.radial, frame=self.frame, mesh=mesh,
                                    validate=False)

    def rotated(self, rotation):
        rotation = np.asarray(rotation, dtype=float)
        return SampledSphericalBody(rotation @ self.center, self.radial,
                                    frame=self.frame @ rotation.T, mesh=self.mesh,
                                    validate=False)

    @classmethod
    def from_boundary(cls, points, interior_point, mesh=DEFAULT_MESH):
        """Body whose boundary is the closed polyline through ``points``."""
        c = unit(interior_point)
        frame = rotation_to_pole(c)
        y = unit(points) @ frame.T
        if np.any(y[:, 2] <= 0.0):
            raise NotHemispherical("boundary leaves the open hemisphere about the interior point")
        return cls(c, rad.PolylineRadial(y[:, :2] / y[:, 2:3]), frame=frame, mesh=mesh)


def _dirs(phi):
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(phi), np.sin(phi)], axis=-1)


def cap(center, radius, mesh=DEFAULT_MESH):
    """Closed spherical cap of angular ``radius`` (< pi/2) about ``center``."""
    if not 0.0 < radius < np.pi / 2:
        raise Degenerate("cap radius must lie in (0, pi/2)")
    return SampledSphericalBody(center, rad.ConstantRadial(np.tan(radius)), mesh=mesh)


def polygon_as_sampled(polygon, mesh=DEFAULT_MESH):
    c = polygon.interior_point
    frame = rotation_to_pole(c)
    y = np.asarray(polygon.vertices) @ frame.T
    return SampledSphericalBody(c, rad.PolylineRadial(y[:, :2] / y[:, 2:3]), frame=frame,
                                mesh=mesh)


def is_polygon(body):
    return isinstance(body, SphericalPolygon)


def polar(body):
    """Spherical polar body, same representation as the input.

    The result is memoized on the (immutable) body.
    """
    cache = body.__dict__.setdefault("_metric_cache", {})
    if "polar" not in cache:
        cache["polar"] = polar_polygon(body) if is_polygon(body) else body.polar()
    return cache["polar"]


def polar_sampled(body, count=DEFAULT_MESH):
    """Sampled polar body with a ``count``-direction fan.

    Each boundary point of the polar is ``1 / h(psi + pi)`` along direction
    ``psi`` in the shared chart, with ``h`` the support function of the
    primal chart body.
    """
    if is_polygon(body):
        body = polygon_as_sampled(body, mesh=count)
    return body.polar(mesh=count)


def supporting_centers(body):
    """Centres of all supporting hemispheres: the boundary of the polar."""
    return polar(body)


# ---------------------------------------------------------------- arcs


def arc_extreme(points, a, b, mode):
    """Extremum of ``X.p`` over each arc ``ab``, for each query ``p``.

    On an arc ``X(t) = cos(t) a + sin(t) e``, ``t`` in ``[0, L]``, the
    product is ``A cos t + B sin t = R cos(t - phase)``; the interior
    extremum is used when its phase falls inside the arc.  Returns values
    and parameters, both of shape ``(len(points), len(a))``.
    """
    points = np.atleast_2d(points)
    cos_l = np.clip(dot(a, b), -1.0, 1.0)
    e = unit(b - cos_l[:, None] * a)
    length = angle_between(a, b)
    big_a = points @ a.T
    big_b = points @ e.T
    rr = np.hypot(big_a, big_b)
    phase = np.arctan2(big_b, big_a)
    if mode == "min":
        phase = phase + np.pi
    t_star = np.mod(phase, 2.0 * np.pi)
    end0 = big_a
    end1 = big_a * np.cos(length) + big_b * np.sin(length)
    inside = t_star <= length
    if mode == "min":
        val = np.where(inside, -rr, np.minimum(end0, end1))
        t = np.where(inside, t_star, np.where(end0 <= end1, 0.0, length))
    else:
        val = np.where(inside, rr, np.maximum(end0, end1))
        t = np.where(inside, t_star, np.where(end0 >= end1, 0.0, length))
    return val, t


def arc_point_at(a, b, t):
    cos_l = np.clip(dot(a, b), -1.0, 1.0)
    e = unit(b - cos_l[..., None] * a)
    return np.cos(t)[..., None] * a + np.sin(t)[..., None] * e


def _local_extrema(values, count):
    """Indices of the ``count`` largest cyclic local maxima per row."""
    left = np.roll(values, 1, axis=1)
    right = np.roll(values, -1, axis=1)
    peak = (values >= left) & (values >= right)
    masked = np.where(peak, values, -np.inf)
    count = min(count, values.shape[1])
    idx = np.argpartition(-masked, count - 1, axis=1)[:, :count]
    top = np.take_along_axis(masked, idx, axis=1)
    fallback = np.argmax(values, axis=1)[:, None]
    return np.where(np.isfinite(top), idx, fallback)


def extreme_dot(body, points, mode="max", candidates=3):
    """Extremum of ``X.p`` over ``X`` in the body, for each query point.

    ``mode="min"`` finds the farthest point, ``mode="max"`` the nearest
    boundary point (for queries outside, the nearest point of the body).
    Returns ``(values, boundary points)``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if is_polygon(body):
        a, b = body.edges
        val, t = arc_extreme(points, a, b, mode)
        k = np.argmin(val, axis=1) if mode == "min" else np.argmax(val, axis=1)
        rows = np.arange(len(points))
        pts = arc_point_at(a[k], b[k], t[rows, k])
        return val[rows, k], pts
    sign = -1.0 if mode == "min" else 1.0
    mesh_vals = sign * (points @ body.boundary.T)
    idx = _local_extrema(mesh_vals, candidates)
    q, c = idx.shape
    qp = np.repeat(points, c, axis=0)
    flat = idx.reshape(-1)

    def f(phi):
        return sign * np.einsum("ij,ij->i", qp, body.point_at(phi))

    x, fx = golden_max(f, body.phi_ext(flat - 1), body.phi_ext(flat + 1), tol=VALUE_TOL)
    seed_vals = mesh_vals[np.repeat(np.arange(q), c), flat]
    better = seed_vals > fx
    x = np.where(better, body.phi[flat], x)
    fx = np.where(better, seed_vals, fx)
    x, fx = x.reshape(q, c), fx.reshape(q, c)
    k = np.argmax(fx, axis=1)
    rows = np.arange(q)
    phi = x[rows, k]
    return sign * fx[rows, k], body.point_at(phi)


# ---------------------------------------------------------------- membership


def _membership(body, points):
    """Signed margin, non-negative exactly on the closed body, and chart angles."""
    if is_polygon(body):
        # the edge halfspaces cut out exactly the cone over the polygon
        return np.min(points @ body.edge_poles.T, axis=1), None
    y = body.local(points)
    phi = rad.wrap(np.arctan2(y[:, 1], y[:, 0]))
    ahead = y[:, 2] > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.hypot(y[:, 0], y[:, 1]) / y[:, 2]
    return np.where(ahead, body.radial(phi) - rho, -np.inf), phi


def is_interior(body, points):
    """Strict membership test, without computing distances."""
    return _membership(body, np.atleast_2d(unit(points)))[0] > 0.0


def signed_distance(body, points):
    """Spherical distance to the boundary, negative inside the body."""
    points = np.atleast_2d(unit(points))
    margin, phi = _membership(body, points)
    inside = margin >= 0.0
    if is_polygon(body):
        _, near = extreme_dot(body, points, "max")
        d = angle_between(points, near)
        return np.where(inside, -d, d)
    ahead = np.isfinite(margin)
    d_ray = np.where(ahead, angle_between(points, body.point_at(phi)), np.inf)
    _, near = extreme_dot(body, points, "max")
    d = np.minimum(d_ray, angle_between(points, near))
    return np.where(inside, -d, d)


def classify(distance, tol):
    if abs(distance) <= tol:
        return Location.BOUNDARY
    return Location.INTERIOR if distance < 0.0 else Location.EXTERIOR


def contains(body, q, tol=ON_BOUNDARY):
    """Classify ``q`` as interior, boundary or exterior point of the body."""
    return classify(float(signed_distance(body, q)[0]), tol)


# ---------------------------------------------------------------- support


def _one_sided_centers(body, phi, step):
    b = body.point_at(phi)
    left = unit(np.cross(body.point_at(phi - step), b))
    right = unit(np.cross(b, body.point_at(phi + step)))
    return left, right


def _orth(v, p):
    return unit(v - dot(v, p)[..., None] * p)


def fan_extent(body, phi, step=FD_STEP):
    """Angle between the one-sided supporting centres at ``point_at(phi)``.

    Chord poles at two step sizes are Richardson-extrapolated so that the
    curvature term cancels; smooth points give zero up to ``O(step^2)``.
    """
    phi = np.asarray(phi, dtype=float)
    p = body.point_at(phi)
    l1, r1 = _one_sided_centers(body, phi, step)
    l2, r2 = _one_sided_centers(body, phi, step / 2)
    left = _orth(2.0 * l2 - l1, p)
    right = _orth(2.0 * r2 - r1, p)
    return angle_between(left, right), left, right


def point_and_center(body, phi, step=FD_STEP):
    """Boundary point and its supporting centre (central difference)."""
    phi = np.asarray(phi, dtype=float)
    p, ahead, behind = body.point_at(np.stack([phi, phi + step, phi - step]))
    return p, _orth(np.cross(p, ahead - behind), p)


def smooth_center(body, phi, step=FD_STEP):
    """Supporting centre at a smooth boundary point (central difference)."""
    return point_and_center(body, phi, step)[1]


def supporting_hemisphere_at(body, p, fan_tol=1e-7):
    """All supporting hemispheres of the body at the boundary point ``p``."""
    p = unit(p)
    if is_polygon(body):
        v = body.vertices
        poles = body.edge_poles
        dv = angle_between(v, p)
        i = int(np.argmin(dv))
        if dv[i] <= ON_BOUNDARY:
            return Support((Hemisphere(poles[i - 1]), Hemisphere(poles[i])), True)
        a, b = body.edges
        for k in range(len(v)):
            on_circle = abs(np.arcsin(np.clip(dot(p, poles[k]), -1, 1))) <= ON_BOUNDARY
            between = (dot(np.cross(a[k], p), poles[k]) >= 0.0
                       and dot(np.cross(p, b[k]), poles[k]) >= 0.0)
            if on_circle and between:
                return Support((Hemisphere(_orth(poles[k], p)),), False)
        raise NotOnBoundary("point is not on the polygon boundary")
    phi = float(body.chart_angle(p))
    if angle_between(p, body.point_at(phi)) > ON_BOUNDARY:
        raise NotOnBoundary("point is not on the body boundary")
    ext, left, right = fan_extent(body, np.array([phi]))
    if ext[0] <= fan_tol:
        return Support((Hemisphere(smooth_center(body, np.array([phi]))[0]),), False)
    return Support((Hemisphere(left[0]), Hemisphere(right[0])), True)


def is_smooth(body, tol):
    """True when every sampled boundary point has a single supporting hemisphere.

    Polygons always return False.  For sampled bodies the fan extent is
    evaluated at every mesh direction, which includes the declared corners
    of the radial function.
    """
    if is_polygon(body):
        return False
    ext, _, _ = fan_extent(body, body.phi)
    return bool(np.max(ext) <= tol)


# ---------------------------------------------------------------- random


def random_polygon(rng, min_vertices=3, max_vertices=10, cap_radius=0.4 * np.pi):
    """Hull of 3..10 random directions in a random cap; degenerate draws retried."""
    from .sphere import random_cap_points, random_points

    while True:
        k = int(rng.integers(min_vertices, max_vertices + 1))
        center = random_points(rng, 1)[0]
        pts = random_cap_points(rng, k, center, cap_radius)
        try:
            return s_conv_hull(pts)
        except (Degenerate, NotConvex):
            continue
