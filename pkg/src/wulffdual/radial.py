"""Radial functions of planar star-shaped convex bodies.

A sampled spherical body is stored through its gnomonic chart about an
interior point: a convex planar body ``K`` containing the origin, described
by ``r(phi)``, the distance from the origin to ``dK`` in direction
``(cos phi, sin phi)``.  Each radial function also reports

``corners``
    chart angles where ``dK`` may have a kink, and
``flats``
    outward normal angles of straight pieces of ``dK``.

Both are needed to place mesh samples and to carry kinks through polarity:
a corner of ``K`` at angle ``a`` becomes a flat piece of the polar with
normal angle ``a + pi`` and vice versa.
"""

from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap(a):
    return np.mod(a, TWO_PI)


class Radial:
    corners = np.empty(0)
    flats = np.empty(0)

    def __call__(self, phi):
        raise NotImplementedError

    #: subclasses with a closed-form support function define ``support(psi)``
    support = None


class ConstantRadial(Radial):
    """Disk of radius ``r`` about the origin."""

    def __init__(self, r):
        if not r > 0:
            raise ValueError("radius must be positive")
        self.r = float(r)

    def __call__(self, phi):
        return np.full(np.shape(phi), self.r)

    def support(self, psi):
        return np.full(np.shape(psi), self.r)


class EllipseRadial(Radial):
    """Axis-aligned ellipse ``x^2/a^2 + y^2/b^2 <= 1``."""

    def __init__(self, a, b):
        self.a, self.b = float(a), float(b)

    def __call__(self, phi):
        c, s = np.cos(phi), np.sin(phi)
        return self.a * self.b / np.sqrt((self.b * c) ** 2 + (self.a * s) ** 2)

    def support(self, psi):
        return np.hypot(self.a * np.cos(psi), self.b * np.sin(psi))


class PolylineRadial(Radial):
    """Convex polygon with counterclockwise vertices around the origin."""

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        ang = np.arctan2(v[:, 1], v[:, 0])
        start = int(np.argmin(wrap(ang)))
        v = np.roll(v, -start, axis=0)
        ang = np.unwrap(np.roll(ang, -start))
        if np.any(np.diff(ang) <= 0.0) or ang[-1] - ang[0] >= TWO_PI:
            raise ValueError("polygon vertices must wind once counterclockwise")
        self.vertices = v
        self._ang = ang
        w = np.roll(v, -1, axis=0)
        d = w - v
        n = np.stack([d[:, 1], -d[:, 0]], axis=1)
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        self._normals = n
        self._offsets = np.sum(n * v, axis=1)
        if np.any(self._offsets <= 0.0):
            raise ValueError("origin must be strictly inside the polygon")
        self.corners = wrap(ang)
        self.flats = wrap(np.arctan2(n[:, 1], n[:, 0]))

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        t = self._ang[0] + wrap(phi - self._ang[0])
        i = np.searchsorted(self._ang, t, side="right") - 1
        n = self._normals[i]
        u0, u1 = np.cos(phi), np.sin(phi)
        return self._offsets[i] / (n[..., 0] * u0 + n[..., 1] * u1)

    def support(self, psi):
        psi = np.asarray(psi, dtype=float)
        return np.max(np.cos(psi)[..., None] * self.vertices[:, 0]
                      + np.sin(psi)[..., None] * self.vertices[:, 1], axis=-1)


class ArcRadial(Radial):
    """Boundary made of small-circle arcs on the sphere.

    Coordinates are chart-local: the chart centre is the north pole.  Piece
    ``k`` is the arc of ``{X : X.center_k = cos(rho_k)}`` between the chart
    angles ``starts[k]`` and ``starts[k + 1]``; the body lies on the side
    ``X.center_k >= cos(rho_k)``.
    """

    def __init__(self, centers, rhos, starts, corners=()):
        self.centers = np.asarray(centers, dtype=float).reshape(-1, 3)
        self.cos_rho = np.cos(np.asarray(rhos, dtype=float)).reshape(-1)
        starts = np.asarray(starts, dtype=float).reshape(-1)
        order = np.argsort(wrap(starts))
        self.centers = self.centers[order]
        self.cos_rho = self.cos_rho[order]
        self._starts = wrap(starts[order])
        self.corners = wrap(np.asarray(corners, dtype=float))
        flat = np.abs(self.cos_rho) < 1e-15
        cx, cy = self.centers[flat, 0], self.centers[flat, 1]
        self.flats = wrap(np.arctan2(-cy, -cx))

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        t = self._starts[0] + wrap(phi - self._starts[0])
        k = np.searchsorted(self._starts, t, side="right") - 1
        k = np.where(k < 0, len(self._starts) - 1, k)
        v = self.centers[k]
        c = self.cos_rho[k]
        a = np.cos(phi) * v[..., 0] + np.sin(phi) * v[..., 1]
        vz = v[..., 2]
        qa = a * a - c * c
        qb = 2.0 * a * vz
        qc = vz * vz - c * c
        disc = np.sqrt(np.clip(qb * qb - 4.0 * qa * qc, 0.0, None))
        with np.errstate(divide="ignore", invalid="ignore"):
            q = -0.5 * (qb + np.copysign(disc, qb))
            r1 = q / qa
            r2 = qc / q
            lin = -vz / a
        roots = np.stack([r1, r2], axis=-1)
        ok = np.isfinite(roots) & (roots > 0.0)
        ok &= (roots * a[..., None] + vz[..., None]) * np.sign(c)[..., None] >= -1e-12
        best = np.max(np.where(ok, roots, -np.inf), axis=-1)
        return np.where(np.abs(c) < 1e-15, lin, best)

    def support(self, psi):
        """Closed-form support function of the chart body.

        A line ``w.x = h`` is the chart image of the great circle with pole
        ``G = (-w, h) / |(-w, h)|``; it touches the small circle of radius
        ``rho`` about ``V`` from outside when ``G.V = sin(rho)``.  Candidates
        are these tangencies, kept when the touching point lies on the
        piece, and the piece endpoints.
        """
        psi = np.asarray(psi, dtype=float)
        shape = psi.shape
        psi = psi.reshape(-1, 1)
        wx, wy = np.cos(psi), np.sin(psi)
        ends, span, s = self._piece_geometry
        best = np.max(wx * ends[:, 0] + wy * ends[:, 1], axis=1)
        v, c = self.centers, self.cos_rho
        big_a = -(wx * v[:, 0] + wy * v[:, 1])
        big_b = v[:, 2]
        qa = big_b * big_b - s * s
        qb = 2.0 * big_a * big_b
        qc = big_a * big_a - s * s
        disc = np.sqrt(np.clip(qb * qb - 4.0 * qa * qc, 0.0, None))
        with np.errstate(divide="ignore", invalid="ignore"):
            q = -0.5 * (qb + np.copysign(disc, qb))
            lin = np.where(np.abs(qa) < 1e-14, -qc / qb, np.nan)
            h = np.stack([q / qa, qc / q, lin])
            norm = np.sqrt(1.0 + h * h)
            # touching point, up to the positive factor 1 / cos(rho)
            tx = v[:, 0] + s * wx / norm
            ty = v[:, 1] + s * wy / norm
            tz = v[:, 2] - s * h / norm
            ok = np.isfinite(h) & (c > 1e-15) & (tz > 0.0)
            ok &= np.abs((big_a + big_b * h) / norm - s) <= 1e-9
        ok &= wrap(np.arctan2(ty, tx) - self._starts) <= span
        best = np.maximum(best, np.max(np.where(ok, h, -np.inf), axis=(0, 2)))
        return best.reshape(shape)

    @cached_property
    def _piece_geometry(self):
        ends = self._starts
        pts = self(ends)[:, None] * np.stack([np.cos(ends), np.sin(ends)], axis=1)
        span = wrap(np.roll(ends, -1) - ends)
        span = np.where(span == 0.0, TWO_PI, span)
        s = np.sqrt(np.clip(1.0 - self.cos_rho ** 2, 0.0, None))
        return pts, span, s


class PolarRadial(Radial):
    """Chart of the spherical polar body, ``r(psi) = 1 / h_K(psi + pi)``.

    ``h_K`` is the support function of the primal chart body, evaluated by
    ``primal.support``.
    """

    def __init__(self, primal):
        self.primal = primal
        self.corners = wrap(primal.radial.flats + np.pi)
        self.flats = wrap(primal.radial.corners + np.pi)

    def __call__(self, phi):
        h, _ = self.primal.support(np.asarray(phi, dtype=float) + np.pi)
        return 1.0 / h

    def support(self, psi):
        # the support function of a polar body is the gauge of the primal
        return 1.0 / self.primal.radial(np.asarray(psi, dtype=float) + np.pi)
