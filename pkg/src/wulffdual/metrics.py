"""Widths, thickness, diameter and Hausdorff distances of spherical bodies.

Every width is measured through supporting centres: the supporting
hemispheres of ``C`` are exactly ``H(Q)`` for ``Q`` on the boundary of the
polar body, so ``width_H(P)(C) = pi - max{|PQ| : Q in C polar}``.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import region as rg
from .errors import Degenerate, NotSupporting
from .optimize import golden_max, polish_max
from .report import CheckReport, verdict
from .sphere import angle_between, blow_up, dot, unit

#: boundary samples per polygon edge for width/diameter scans
EDGE_SAMPLES = 16
#: grid per edge seeding the edge-edge golden-section search
EDGE_GRID = 33


@dataclass
class WidthReport:
    min_width: float
    max_width: float
    argmin_center: np.ndarray
    argmax_center: np.ndarray
    constant: bool
    delta: float

    @property
    def spread(self):
        return self.max_width - self.min_width


@dataclass
class DiameterReport:
    diameter: float
    witness_p: np.ndarray
    witness_q: np.ndarray
    constant: bool = False
    min_farthest: float = np.nan


# ---------------------------------------------------------------- helpers


def boundary_samples(body, per_edge=EDGE_SAMPLES):
    """Ordered boundary samples: polygon vertices plus edge interiors, or the mesh."""
    if not rg.is_polygon(body):
        return np.asarray(body.boundary)
    a, b = body.edges
    t = np.arange(per_edge + 1) / (per_edge + 1)
    length = angle_between(a, b)
    pts = rg.arc_point_at(a[:, None, :], b[:, None, :], length[:, None] * t[None, :])
    return pts.reshape(-1, 3)


def _cached(body, key, compute):
    """Memoize a derived quantity on an (immutable) body."""
    cache = body.__dict__.setdefault("_metric_cache", {})
    if key not in cache:
        cache[key] = compute()
    return cache[key]


def mesh_farthest(body):
    """Farthest distances from the ordered boundary samples of the body."""
    return _cached(body, "mesh_farthest",
                   lambda: farthest(body, boundary_samples(body))[0])


def farthest(body, points):
    """Largest distance from each point to the body, and where it is attained."""
    _, far = rg.extreme_dot(body, points, "min")
    return angle_between(np.atleast_2d(points), far), far


def _arc_rows(a, b):
    cos_l = np.clip(dot(a, b), -1.0, 1.0)
    return unit(b - cos_l[..., None] * a), angle_between(a, b)


def _min_dot_rows(p, a, b):
    """Row-wise closed-form minimum of ``p.X`` over the arc ``ab``."""
    e, length = _arc_rows(a, b)
    big_a, big_b = dot(p, a), dot(p, e)
    t_star = np.mod(np.arctan2(big_b, big_a) + np.pi, 2.0 * np.pi)
    end1 = big_a * np.cos(length) + big_b * np.sin(length)
    inside = t_star <= length
    val = np.where(inside, -np.hypot(big_a, big_b), np.minimum(big_a, end1))
    t = np.where(inside, t_star, np.where(big_a <= end1, 0.0, length))
    return val, t


# ---------------------------------------------------------------- diameter


def _polygon_diameter(poly):
    v = np.asarray(poly.vertices)
    a, b = poly.edges
    n = len(v)
    vv = v @ v.T
    i, j = np.unravel_index(np.argmin(vv), vv.shape)
    best, wp, wq = vv[i, j], v[i], v[j]
    ve, vt = rg.arc_extreme(v, a, b, "min")
    k, l = np.unravel_index(np.argmin(ve), ve.shape)
    if ve[k, l] < best:
        best, wp, wq = ve[k, l], v[k], rg.arc_point_at(a[l], b[l], vt[k, l])
    # edge-edge interior optima; large polygons keep the most promising pairs
    ii, jj = np.triu_indices(n, 1)
    if len(ii) > 4096:
        score = np.minimum(ve[ii, jj], ve[jj, ii])
        keep = np.argsort(score, kind="stable")[:4096]
        ii, jj = ii[keep], jj[keep]
    ai, bi, aj, bj = a[ii], b[ii], a[jj], b[jj]
    _, len_i = _arc_rows(ai, bi)
    s_grid = np.linspace(0.0, 1.0, EDGE_GRID)[None, :] * len_i[:, None]

    def g(s, rows=slice(None)):
        p = rg.arc_point_at(ai[rows], bi[rows], s)
        return -_min_dot_rows(p, aj[rows], bj[rows])[0]

    vals = np.stack([g(s_grid[:, c]) for c in range(EDGE_GRID)], axis=1)
    c = np.argmax(vals, axis=1)
    h = len_i / (EDGE_GRID - 1)
    lo = np.clip(s_grid[np.arange(len(ii)), c] - h, 0.0, len_i)
    hi = np.clip(s_grid[np.arange(len(ii)), c] + h, 0.0, len_i)
    s_best, g_best = golden_max(g, lo, hi, tol=1e-13)
    r = int(np.argmax(g_best))
    if -g_best[r] < best:
        p = rg.arc_point_at(ai[r], bi[r], s_best[r])
        _, t = _min_dot_rows(p, aj[r], bj[r])
        best, wp, wq = -g_best[r], p, rg.arc_point_at(aj[r], bj[r], t)
    return DiameterReport(float(angle_between(wp, wq)), unit(wp), unit(wq))


def _sampled_diameter(body, candidates=3):
    far_d = mesh_farthest(body)
    idx = rg._local_extrema(far_d[None, :], candidates)[0]

    def f(phi):
        return farthest(body, body.point_at(phi))[0]

    x, fx = golden_max(f, body.phi_ext(idx - 1), body.phi_ext(idx + 1), tol=1e-10)
    better = far_d[idx] > fx
    x = np.where(better, body.phi[idx], x)
    fx = np.where(better, far_d[idx], fx)
    k = int(np.argmax(fx))
    phi_p, _ = polish_max(f, x[k:k + 1], fx[k:k + 1])
    p = body.point_at(phi_p)[0]
    _, q = farthest(body, p)
    phi_q = body.chart_angle(q)

    def fq(phi):
        return -body.point_at(phi) @ p

    phi_q, _ = polish_max(fq, np.atleast_1d(phi_q), fq(np.atleast_1d(phi_q)))
    q = body.point_at(phi_q)[0]
    return DiameterReport(float(angle_between(p, q)), p, q)


def diameter(body):
    """Largest spherical distance between two points of the body."""
    if rg.is_polygon(body):
        rep = _cached(body, "diameter", lambda: _polygon_diameter(body))
    else:
        rep = _cached(body, "diameter", lambda: _sampled_diameter(body))
    return replace(rep)


# ---------------------------------------------------------------- widths


def width_at(body, centers):
    """Width of ``body`` with respect to ``H(c)`` for supporting centres ``c``."""
    d, _ = farthest(rg.polar(body), centers)
    return np.pi - d


def width_wrt(body, hemisphere, tol=1e-8):
    """Width of the body with respect to a supporting hemisphere."""
    c = hemisphere.center
    low, _ = rg.extreme_dot(body, c, "min")
    if abs(low[0]) > tol:
        raise NotSupporting("hemisphere does not support the body")
    return float(width_at(body, c[None, :])[0])


def _thickness_polygon(poly):
    dual = rg.polar_polygon(poly)
    a, b = dual.edges
    length = angle_between(a, b)
    s_grid = np.linspace(0.0, 1.0, EDGE_GRID)[None, :] * length[:, None]
    pts = rg.arc_point_at(a[:, None, :], b[:, None, :], s_grid)
    far, _ = farthest(dual, pts.reshape(-1, 3))
    far = far.reshape(s_grid.shape)
    c = np.argmax(far, axis=1)
    h = length / (EDGE_GRID - 1)
    rows = np.arange(len(a))
    lo = np.clip(s_grid[rows, c] - h, 0.0, length)
    hi = np.clip(s_grid[rows, c] + h, 0.0, length)

    def f(s):
        return farthest(dual, rg.arc_point_at(a, b, s))[0]

    _, best = golden_max(f, lo, hi, tol=1e-13)
    return float(np.pi - max(np.max(best), np.max(far)))


def _thickness_sampled(body, candidates=3):
    dual = body.polar()
    far_d = mesh_farthest(dual)
    idx = rg._local_extrema(far_d[None, :], candidates)[0]

    def f(phi):
        return farthest(dual, dual.point_at(phi))[0]

    _, fx = golden_max(f, dual.phi_ext(idx - 1), dual.phi_ext(idx + 1), tol=1e-10)
    return float(np.pi - max(np.max(fx), np.max(far_d)))


def thickness(body):
    """Minimum width over all supporting hemispheres."""
    if rg.is_polygon(body):
        return _thickness_polygon(body)
    return _thickness_sampled(body)


def is_constant_width(body, tol):
    """Scan widths over supporting centres (polar vertices, fans, mesh)."""
    dual = rg.polar(body)
    centers = boundary_samples(dual)
    w = np.pi - mesh_farthest(dual)
    i, j = int(np.argmin(w)), int(np.argmax(w))
    constant = bool(w[j] - w[i] <= tol)
    return WidthReport(float(w[i]), float(w[j]), centers[i], centers[j], constant,
                       float(w[i]) if constant else np.nan)


def is_constant_diameter(body, tol):
    """Diameter plus the check that every boundary sample reaches it."""
    rep = diameter(body)
    far = mesh_farthest(body)
    rep.min_farthest = float(np.min(far))
    rep.constant = bool(rep.min_farthest >= rep.diameter - tol)
    return rep


# ---------------------------------------------------------------- Hausdorff


def _normal_angles(v):
    d = np.roll(v, -1, axis=0) - v
    return np.mod(np.arctan2(-d[:, 0], d[:, 1]), 2.0 * np.pi)


def _support_vertex(v, theta):
    """Index of the vertex of a convex CCW polygon maximizing ``u(theta) . v``."""
    nu = _normal_angles(v)
    start = int(np.argmin(nu))
    order = (start + np.arange(len(v))) % len(v)
    k = np.searchsorted(nu[order], theta, side="left") % len(v)
    return order[k]


def hausdorff_planar(a, b):
    """Hausdorff distance between convex polygons.

    Uses ``d_H(A, B) = max_theta |h_A(theta) - h_B(theta)|``.  Between
    consecutive edge-normal angles of either polygon both support points are
    fixed vertices, so the difference is a sinusoid whose maximum modulus
    on the interval is available in closed form.
    """
    va = np.asarray(getattr(a, "vertices", a), dtype=float)
    vb = np.asarray(getattr(b, "vertices", b), dtype=float)
    brk = np.unique(np.concatenate([_normal_angles(va), _normal_angles(vb)]))
    t0 = brk
    t1 = np.concatenate([brk[1:], [brk[0] + 2.0 * np.pi]])
    mid = np.mod(0.5 * (t0 + t1), 2.0 * np.pi)
    d = va[_support_vertex(va, mid)] - vb[_support_vertex(vb, mid)]
    amp = np.hypot(d[:, 0], d[:, 1])
    phase = np.arctan2(d[:, 1], d[:, 0])
    ends = np.maximum(np.abs(d[:, 0] * np.cos(t0) + d[:, 1] * np.sin(t0)),
                      np.abs(d[:, 0] * np.cos(t1) + d[:, 1] * np.sin(t1)))
    # |R cos(theta - phase)| peaks at phase and phase + pi
    hit = (np.mod(phase - t0, np.pi) <= t1 - t0)
    return float(np.max(np.where(hit, amp, ends)))


def hausdorff_support(h_a, h_b, count=8192, extra=()):
    """Hausdorff distance ``max |h_a - h_b|`` of two convex bodies given by support functions.

    A uniform scan (plus the ``extra`` angles, e.g. kinks) seeds golden-section
    refinement around the largest local maxima.
    """
    th = np.sort(np.mod(np.concatenate([2.0 * np.pi * np.arange(count) / count,
                                        np.asarray(extra, dtype=float)]), 2.0 * np.pi))

    def f(t):
        return np.abs(h_a(t) - h_b(t))

    vals = f(th)
    idx = rg._local_extrema(vals[None, :], 4)[0]
    n = len(th)
    lo = th[(idx - 1) % n] - np.where(idx == 0, 2.0 * np.pi, 0.0)
    hi = th[(idx + 1) % n] + np.where(idx == n - 1, 2.0 * np.pi, 0.0)
    _, best = golden_max(f, lo, hi, tol=1e-12)
    return float(max(np.max(vals), np.max(best)))


def _excess(a, b, per_edge=64):
    """``max over a in A of d(a, B)`` with golden refinement along ``dA``."""
    if rg.is_polygon(a):
        s, e = a.edges
        length = angle_between(s, e)
        t = np.linspace(0.0, 1.0, per_edge + 1)[None, :] * length[:, None]
        pts = rg.arc_point_at(s[:, None, :], e[:, None, :], t).reshape(-1, 3)
        vals = rg.signed_distance(b, pts).reshape(t.shape)
        c = np.argmax(vals, axis=1)
        h = length / per_edge
        rows = np.arange(len(s))

        def f(tt):
            return rg.signed_distance(b, rg.arc_point_at(s, e, tt))

        _, best = golden_max(f, np.clip(t[rows, c] - h, 0, length),
                             np.clip(t[rows, c] + h, 0, length), tol=1e-12)
        return max(0.0, float(np.max(best)), float(np.max(vals)))
    vals = rg.signed_distance(b, a.boundary)
    idx = rg._local_extrema(vals[None, :], 3)[0]

    def f(phi):
        return rg.signed_distance(b, a.point_at(phi))

    _, best = golden_max(f, a.phi_ext(idx - 1), a.phi_ext(idx + 1), tol=1e-12)
    return max(0.0, float(np.max(best)), float(np.max(vals)))


def hausdorff_spherical(a, b):
    """Symmetric spherical Hausdorff distance between two bodies."""
    return max(_excess(a, b), _excess(b, a))


# ---------------------------------------------------------------- support


def diameter_support_check(body, tol=1e-8):
    """The hemisphere orthogonal to a diametral arc at one end supports the body.

    Its centre is the point at distance pi/2 from ``P`` along ``PQ``.
    """
    rep = diameter(body)
    p, q = rep.witness_p, rep.witness_q
    center = blow_up(q, p)
    low, _ = rg.extreme_dot(body, center, "min")
    containment = max(0.0, -float(low[0]))
    touching = abs(float(dot(center, p)))
    ok = containment <= tol and touching <= tol
    return CheckReport(
        name="diameter-support",
        status=verdict(ok),
        residuals=[("diameter", rep.diameter), ("containment", containment),
                   ("touching", touching), ("tolerance", tol)],
        witnesses=[p, q, center],
    )


def ensure_interior(body):
    if rg.is_polygon(body):
        return
    if np.any(body.radii <= 0.0):
        raise Degenerate("body has empty interior")
