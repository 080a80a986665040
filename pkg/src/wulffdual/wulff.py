"""Planar Wulff shapes, their spherical lifts and dual Wulff shapes.

The Wulff shape of a positive function ``gamma`` on the unit circle is the
intersection of the halfplanes ``x . theta <= gamma(theta)``.  Lifting it to
the sphere through the gnomonic chart about the north pole gives the
spherical Wulff shape; the dual Wulff shape is the projection of that
body's spherical polar.  In the plane this is ``-K*`` where ``K*`` is the
classical polar ``{y : x . y <= 1 for x in K}``.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.optimize.elementwise import find_root

from . import radial as rad
from . import region as rg
from .errors import (
    Degenerate,
    EmptyInterior,
    InvalidSupportFunction,
    NotConvex,
    NotInterior,
    Unbounded,
)
from .metrics import hausdorff_planar, hausdorff_support
from .sphere import NORTH, blow_up, central_project, central_unproject, dot, unit

DEFAULT_K = 2048
MIN_K = 8
#: self-duality tolerance for exact polygons
EXACT_TOL = 1e-6


def mesh_tolerance(k):
    """Hausdorff budget ``10 (2 pi / K)^2`` of a ``K``-direction discretization."""
    return 10.0 * (2.0 * np.pi / k) ** 2


# ---------------------------------------------------------------- support functions


class SupportFunction:
    """Positive continuous function on the circle, evaluated on angles."""

    kind = "abstract"

    def __call__(self, theta):
        g = self._eval(np.asarray(theta, dtype=float))
        if np.any(~np.isfinite(g)) or np.any(g <= 0.0):
            raise InvalidSupportFunction("support function must be positive")
        return g

    def _eval(self, theta):
        raise NotImplementedError

    def wulff_radial(self):
        """Exact radial function of the Wulff shape, when one is known."""
        return None

    def is_polygonal(self):
        return False

    def breakpoints(self):
        """Angles where ``gamma`` is not smooth; always sampled exactly."""
        return np.empty(0)


class Constant(SupportFunction):
    kind = "constant"

    def __init__(self, c):
        if not (np.isfinite(c) and c > 0):
            raise InvalidSupportFunction("c must be positive")
        self.c = float(c)

    def _eval(self, theta):
        return np.full(theta.shape, self.c)

    def wulff_radial(self):
        return rad.ConstantRadial(self.c)

    def __repr__(self):
        return f"Constant({self.c!r})"


class Ellipse(SupportFunction):
    """``sqrt(a^2 cos^2 + b^2 sin^2)``, support function of an axis-aligned ellipse."""

    kind = "ellipse"

    def __init__(self, a, b):
        for name, v in (("a", a), ("b", b)):
            if not (np.isfinite(v) and v > 0):
                raise InvalidSupportFunction(f"{name} must be positive")
        self.a, self.b = float(a), float(b)

    def _eval(self, theta):
        return np.hypot(self.a * np.cos(theta), self.b * np.sin(theta))

    def wulff_radial(self):
        return rad.EllipseRadial(self.a, self.b)

    def __repr__(self):
        return f"Ellipse({self.a!r}, {self.b!r})"


class PolygonGamma(SupportFunction):
    """Support function ``max_v v . theta`` of a convex polygon around the origin."""

    kind = "polygon_gamma"

    def __init__(self, vertices):
        self.body = PlanarConvexBody(vertices)
        self.vertices = self.body.vertices

    def _eval(self, theta):
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return np.max(u @ self.vertices.T, axis=-1)

    def is_polygonal(self):
        return True

    def breakpoints(self):
        # the maximizing vertex switches at the edge normals
        n = self.body.normals
        return np.mod(np.arctan2(n[:, 1], n[:, 0]), 2.0 * np.pi)

    def __repr__(self):
        return f"PolygonGamma({len(self.vertices)} vertices)"


class Sampled(SupportFunction):
    """Periodic piecewise-linear interpolation of samples ``(theta_i, gamma_i)``."""

    kind = "sampled"

    def __init__(self, thetas, gammas):
        t = np.asarray(thetas, dtype=float).reshape(-1)
        g = np.asarray(gammas, dtype=float).reshape(-1)
        if len(t) != len(g):
            raise InvalidSupportFunction("theta and gamma lists differ in length")
        if len(t) < MIN_K:
            raise InvalidSupportFunction("a sampled support function needs at least 8 samples")
        if np.any(~np.isfinite(t)) or t[0] < 0.0 or t[-1] >= 2.0 * np.pi or np.any(np.diff(t) <= 0):
            raise InvalidSupportFunction("theta must increase strictly within [0, 2 pi)")
        if np.any(~np.isfinite(g)) or np.any(g <= 0.0):
            raise InvalidSupportFunction("gamma samples must be positive")
        steps = np.abs(np.diff(g))
        jump = abs(g[0] - g[-1])
        if jump > 10.0 * np.median(steps) + 1e-12:
            raise InvalidSupportFunction("gamma jumps across the wraparound")
        self.thetas, self.gammas = t, g

    def _eval(self, theta):
        return np.interp(np.mod(theta, 2.0 * np.pi), self.thetas, self.gammas, period=2.0 * np.pi)

    def breakpoints(self):
        return self.thetas

    def __repr__(self):
        return f"Sampled({len(self.thetas)} samples)"


class ReuleauxLift(PolygonGamma):
    """Support function of the gnomonic image of the width-pi/2 Reuleaux triangle.

    With its centre on the north pole that triangle is a rotated octant, so
    its image is the equilateral triangle of circumradius ``sqrt 2``.
    """

    kind = "reuleaux_lift"

    def __init__(self):
        super().__init__(triangle_vertices())

    def __repr__(self):
        return "ReuleauxLift()"


def triangle_vertices(circumradius=np.sqrt(2.0)):
    a = np.pi / 2 + 2.0 * np.pi * np.arange(3) / 3.0
    return circumradius * np.stack([np.cos(a), np.sin(a)], axis=1)


# ---------------------------------------------------------------- planar bodies


@dataclass(frozen=True)
class HalfPlane:
    theta: np.ndarray
    gamma: float

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        if th.shape != (2,) or abs(np.linalg.norm(th) - 1.0) > 1e-12:
            raise InvalidSupportFunction("halfplane direction must be a unit vector")
        if not self.gamma > 0:
            raise InvalidSupportFunction("halfplane offset must be positive")


class PlanarConvexBody:
    """Convex polygon with counterclockwise ``vertices`` and the origin inside.

    ``radial`` optionally carries the exact radial function of a smooth body
    that the polygon discretizes with ``mesh`` directions; the spherical lift
    then uses it instead of the polygon.
    """

    def __init__(self, vertices, radial=None, mesh=None):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise Degenerate("a planar body needs at least three vertices")
        if not np.all(np.isfinite(v)):
            raise Degenerate("vertices must be finite")
        d = np.roll(v, -1, axis=0) - v
        cross = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
        scale = np.max(np.abs(v)) ** 2
        if np.any(cross < -1e-12 * scale):
            raise NotConvex("vertices are not convex and counterclockwise")
        turning = np.sum(_edge_turns(d))
        if abs(turning - 2.0 * np.pi) > 1e-6:
            raise NotConvex("boundary is not simple")
        offsets = v[:, 0] * d[:, 1] - v[:, 1] * d[:, 0]
        if np.any(offsets <= 1e-14 * scale):
            raise EmptyInterior("origin must be strictly inside the body")
        v.flags.writeable = False
        self.vertices = v
        self.radial = radial
        self.mesh = None if mesh is None else int(mesh)

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"PlanarConvexBody({len(self)} vertices)"

    @property
    def normals(self):
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        n = np.stack([d[:, 1], -d[:, 0]], axis=1)
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    @property
    def offsets(self):
        return np.sum(self.normals * self.vertices, axis=1)

    def support(self, theta):
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return np.max(u @ self.vertices.T, axis=-1)

    def boundary(self, count=None):
        """Boundary samples: the vertices, or the exact radial on ``count`` rays."""
        if self.radial is None or count is None:
            return self.vertices
        phi = 2.0 * np.pi * np.arange(count) / count
        return self.radial(phi)[:, None] * np.stack([np.cos(phi), np.sin(phi)], axis=1)

    @property
    def tolerance(self):
        return EXACT_TOL if self.mesh is None else mesh_tolerance(self.mesh)


def _edge_turns(d):
    ang = np.arctan2(d[:, 1], d[:, 0])
    return np.mod(np.roll(ang, -1) - ang + np.pi, 2.0 * np.pi) - np.pi


@dataclass
class WulffPair:
    primal: PlanarConvexBody
    dual: PlanarConvexBody
    hausdorff_distance: float
    self_dual: bool
    tolerance: float


# ---------------------------------------------------------------- construction


def sample_gamma(sf, k=DEFAULT_K):
    """Halfplanes ``x . theta <= gamma(theta)`` on the uniform ``K``-fan.

    The breakpoints of ``gamma`` (edge normals of a polygonal support
    function, sample angles of a sampled one) are added to the fan, so the
    piecewise-smooth structure is resolved exactly and the discretization
    error stays second order in ``2 pi / K``.
    """
    k = int(k)
    if k < MIN_K:
        raise InvalidSupportFunction("at least 8 directions are required")
    th = 2.0 * np.pi * np.arange(k) / k
    extra = np.asarray(sf.breakpoints(), dtype=float)
    if len(extra):
        step = 2.0 * np.pi / k
        off = np.abs(extra / step - np.round(extra / step)) * step
        th = np.sort(np.concatenate([th, extra[off > 1e-12]]))
    g = sf(th)
    dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    return [HalfPlane(d, float(gv)) for d, gv in zip(dirs, g)]


def _halfplane_arrays(halfplanes):
    n = np.array([h.theta for h in halfplanes], dtype=float)
    g = np.array([h.gamma for h in halfplanes], dtype=float)
    return n, g


def wulff_construct(halfplanes):
    """Intersection of halfplanes whose offsets are positive.

    Lines are swept in order of normal angle with a double-ended queue,
    dropping redundant constraints as they are dominated.
    """
    if len(halfplanes) < MIN_K:
        raise InvalidSupportFunction("at least 8 halfplanes are required")
    n, g = _halfplane_arrays(halfplanes)
    if np.any(g <= 0.0):
        raise EmptyInterior("halfplane offsets must be positive")
    ang = np.mod(np.arctan2(n[:, 1], n[:, 0]), 2.0 * np.pi)
    order = np.lexsort((g, ang))
    ang, n, g = ang[order], n[order], g[order]
    keep = np.concatenate([[True], np.diff(ang) > 1e-15])
    ang, n, g = ang[keep], n[keep], g[keep]
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2.0 * np.pi]]))
    if np.max(gaps) >= np.pi - 1e-12:
        raise Unbounded("halfplane directions leave an angular gap of at least pi")

    def meet(i, j):
        m = np.array([n[i], n[j]])
        return np.linalg.solve(m, [g[i], g[j]])

    def outside(k, p):
        return n[k] @ p > g[k] + 1e-13 * g[k]

    dq = deque()
    for k in range(len(g)):
        while len(dq) >= 2 and outside(k, meet(dq[-2], dq[-1])):
            dq.pop()
        while len(dq) >= 2 and outside(k, meet(dq[0], dq[1])):
            dq.popleft()
        dq.append(k)
    while len(dq) >= 3 and outside(dq[0], meet(dq[-2], dq[-1])):
        dq.pop()
    while len(dq) >= 3 and outside(dq[-1], meet(dq[0], dq[1])):
        dq.popleft()
    lines = list(dq)
    if len(lines) < 3:
        raise Degenerate("halfplane intersection is degenerate")
    verts = np.array([meet(lines[i], lines[(i + 1) % len(lines)]) for i in range(len(lines))])
    scale = max(1.0, float(np.max(np.abs(verts))))
    dup = np.linalg.norm(verts - np.roll(verts, 1, axis=0), axis=1) <= 1e-12 * scale
    verts = verts[~dup] if np.count_nonzero(~dup) >= 3 else verts
    verts = _drop_planar_collinear(verts)
    if np.any(np.max(verts @ n.T - g[None, :], axis=0) > 1e-10):
        raise Degenerate("halfplane intersection violates a constraint")
    return PlanarConvexBody(verts)


def _drop_planar_collinear(v, tol=1e-14):
    while len(v) > 3:
        d0 = v - np.roll(v, 1, axis=0)
        d1 = np.roll(v, -1, axis=0) - v
        cr = d0[:, 0] * d1[:, 1] - d0[:, 1] * d1[:, 0]
        scale = np.linalg.norm(d0, axis=1) * np.linalg.norm(d1, axis=1)
        k = int(np.argmin(cr / np.maximum(scale, 1e-300)))
        if cr[k] > tol * scale[k]:
            break
        v = np.delete(v, k, axis=0)
    return v


def wulff_shape(sf, k=DEFAULT_K):
    """Wulff polygon of ``sf`` with the exact radial attached when known."""
    body = wulff_construct(sample_gamma(sf, k))
    if sf.is_polygonal():
        return body
    return PlanarConvexBody(body.vertices, radial=sf.wulff_radial(), mesh=k)


def spherical_wulff(w):
    """Lift through the gnomonic chart about the north pole."""
    if w.radial is not None:
        return rg.SampledSphericalBody(NORTH, w.radial, frame=np.eye(3),
                                       mesh=w.mesh or rg.DEFAULT_MESH)
    return rg.SphericalPolygon(central_unproject(w.vertices))


def planar_chart(body):
    """Inverse of :func:`spherical_wulff` for bodies with the north pole inside."""
    if rg.is_polygon(body):
        return PlanarConvexBody(central_project(np.asarray(body.vertices)))
    if not np.allclose(body.frame, np.eye(3), atol=1e-15):
        raise NotInterior("body is not charted about the north pole")
    verts = _drop_planar_collinear(np.asarray(body.chart_boundary), tol=1e-9)
    return PlanarConvexBody(verts, radial=body.radial, mesh=body.mesh)


def _planar_polar_vertices(w):
    n, off = w.normals, w.offsets
    if np.min(off) <= 1e-12 * np.max(off):
        raise Degenerate("body has near-empty interior")
    return n / off[:, None]


def dual_wulff(w):
    """Dual Wulff shape ``-K*``, exact for the polygon.

    Edge ``i`` of ``K`` with outward normal ``n_i`` and offset ``h_i``
    becomes the vertex ``-n_i / h_i``; negation is a half turn, so the
    vertex order stays counterclockwise.  A smooth body's radial function
    is dualized through the chart support function.
    """
    verts = -_planar_polar_vertices(w)
    radial = None
    if w.radial is not None:
        lifted = rg.SampledSphericalBody(NORTH, w.radial, frame=np.eye(3),
                                         mesh=w.mesh or rg.DEFAULT_MESH, validate=False)
        radial = rad.PolarRadial(lifted)
    return PlanarConvexBody(verts, radial=radial, mesh=w.mesh)


def dual_via_pipeline(sf, k=DEFAULT_K):
    """Wulff shape through the spherical composition of blow-up and polarity.

    Each graph point ``gamma(theta) theta`` is lifted to the sphere and blown
    up about the north pole, which lands on ``(-theta, gamma) / norm``; the
    spherical polar of these points, projected back, is the Wulff shape.
    """
    hp = sample_gamma(sf, k)
    n, g = _halfplane_arrays(hp)
    graph = central_unproject(g[:, None] * n)
    blown = blow_up(NORTH, graph)
    hull = rg.s_conv_hull(blown)
    dual = rg.polar_polygon(hull)
    verts = central_project(np.asarray(dual.vertices))
    body = PlanarConvexBody(_drop_planar_collinear(verts))
    if sf.is_polygonal():
        return body
    return PlanarConvexBody(body.vertices, radial=sf.wulff_radial(), mesh=k)


def is_self_dual(w, tol=None):
    """Compare a Wulff shape with its dual in the planar Hausdorff metric.

    Polygons are compared exactly.  When ``w`` carries an exact radial
    function the comparison uses the exact support functions
    ``h_W`` and ``h_DW(theta) = 1 / r_W(theta + pi)`` instead of the
    discretizing polygons.
    """
    tol = w.tolerance if tol is None else float(tol)
    d = dual_wulff(w)
    if w.radial is not None and w.radial.support is not None:
        r = w.radial
        kinks = np.concatenate([np.asarray(r.flats, float), np.asarray(r.corners, float) + np.pi])
        dist = hausdorff_support(r.support, d.radial.support, extra=kinks)
    else:
        dist = hausdorff_planar(w, d)
    return WulffPair(w, d, dist, bool(dist <= tol), tol)


# ---------------------------------------------------------------- boundary/support set


def boundary_support_intersection(body, m, tol=None):
    """Boundary points ``P`` whose blow-up ``Psi_M(P)`` is a supporting centre at ``P``.

    These are the points ``P = Psi_M(R)`` with ``R`` on the boundary of the
    polar body.  Seen from the pole ``M`` they are the points where the
    boundary meets the polar plot of the support function.  Results are
    ordered along the boundary.
    """
    m = unit(m)
    if not rg.is_interior(body, m)[0]:
        raise NotInterior("M must be an interior point")
    if rg.is_polygon(body):
        return _polygon_support_set(body, m, 1e-12 if tol is None else tol)
    # supporting centres of sampled bodies come from finite differences
    return _sampled_support_set(body, m, 1e-9 if tol is None else tol)


def _polygon_support_set(poly, m, tol):
    v = np.asarray(poly.vertices)
    poles = poly.edge_poles
    out = []
    for i in range(len(v)):
        r = blow_up(m, v[i])
        if np.min(v @ r) >= -tol:
            out.append(v[i])
        p = unit(m - dot(m, poles[i]) * poles[i])
        a, b = v[i], v[(i + 1) % len(v)]
        inside = dot(np.cross(a, p), poles[i]) > tol and dot(np.cross(p, b), poles[i]) > tol
        if inside:
            out.append(p)
    return out


def _sampled_support_set(body, m, tol):
    phi = np.asarray(body.phi)

    def f(t):
        p, q = rg.point_and_center(body, np.atleast_1d(t))
        return dot(m, np.cross(p, q))

    vals = f(phi)
    corners = rad.wrap(np.asarray(body.radial.corners, dtype=float))
    near_corner = np.zeros(len(phi), dtype=bool)
    for c in corners:
        near_corner |= np.abs(np.angle(np.exp(1j * (phi - c)))) <= 10 * rg.FD_STEP
    roots = list(phi[(np.abs(vals) <= tol) & ~near_corner])
    nxt = np.roll(vals, -1)
    js = np.nonzero((vals * nxt < 0.0) & ~near_corner & ~np.roll(near_corner, -1)
                    & (np.abs(vals) > tol) & (np.abs(nxt) > tol))[0]
    if len(js):
        lo = phi[js]
        hi = np.where(js + 1 == len(phi), phi[0] + 2.0 * np.pi, phi[(js + 1) % len(phi)])
        res = find_root(f, (lo, hi), tolerances=dict(xatol=1e-12, xrtol=1e-12))
        roots.extend(res.x)
    if len(corners):
        pts = body.point_at(corners)
        for c, p in zip(corners, pts):
            r = blow_up(m, p)
            low, _ = rg.extreme_dot(body, r, "min")
            if low[0] >= -1e-9:
                roots.append(c)
    roots = np.unique(rad.wrap(np.asarray(roots, dtype=float)))
    if len(roots) > 1:
        gap = np.diff(np.append(roots, roots[0] + 2.0 * np.pi))
        roots = roots[np.roll(gap, 1) > 1e-9] if np.any(gap > 1e-9) else roots[:1]
    return list(body.point_at(roots))
