"""Closed-form primitives on the unit sphere S^2 in R^3.

Points are plain ``numpy`` arrays of shape ``(3,)`` (or stacks of shape
``(n, 3)``); every constructor and map returns unit vectors.  Planar points
live in the plane ``z = 1`` and are stored without the constant last
coordinate, as arrays of shape ``(2,)`` / ``(n, 2)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EquatorialPoint, InvalidLune, PoleInput, GeometryError

NORTH = np.array([0.0, 0.0, 1.0])
NORTH.flags.writeable = False

#: pole / antipode degeneracy threshold (radians)
ANGLE_TOL = 1e-9
#: unit-norm postcondition
NORM_TOL = 1e-12


def unit(v):
    """Normalize ``v`` (last axis) onto the sphere."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if not np.all(np.isfinite(v)) or np.any(n == 0.0):
        raise GeometryError("cannot normalize a zero or non-finite vector")
    return v / n


def point(x, y, z):
    return unit([x, y, z])


def dot(p, q):
    return np.sum(np.asarray(p) * np.asarray(q), axis=-1)


def distance(p, q):
    """Spherical distance ``arccos(p.q)`` in ``[0, pi]``, broadcasting."""
    return np.arccos(np.clip(dot(p, q), -1.0, 1.0))


def angle_between(p, q):
    """Distance that stays accurate for nearly equal or antipodal points."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    return np.arctan2(np.linalg.norm(np.cross(p, q), axis=-1), dot(p, q))


@dataclass(frozen=True, eq=False)
class GreatArc:
    """Shorter great-circle arc between two non-antipodal points."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a, b = unit(self.a), unit(self.b)
        if dot(a, b) <= -1.0 + 1e-12:
            raise GeometryError("arc endpoints are antipodal")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self):
        return float(angle_between(self.a, self.b))


def arc_point(arc, t):
    """Point of ``arc`` at parameter ``t`` in [0, 1] (normalized chord)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValueError("arc parameter must lie in [0, 1]")
    tt = t[..., None]
    return unit((1.0 - tt) * arc.a + tt * arc.b)


def central_project(p):
    """Gnomonic projection from the north pole onto the plane ``z = 1``."""
    p = np.asarray(p, dtype=float)
    z = p[..., 2]
    if np.any(z <= ANGLE_TOL):
        raise EquatorialPoint("point is not in the open north hemisphere")
    return p[..., :2] / z[..., None]


def central_unproject(x):
    """Inverse of :func:`central_project`: ``(u, v, 1) / |(u, v, 1)|``."""
    x = np.asarray(x, dtype=float)
    lifted = np.concatenate([x, np.ones(x.shape[:-1] + (1,))], axis=-1)
    return unit(lifted)


def blow_up(m, p):
    """Spherical blow-up of ``p`` with respect to ``m``.

    Returns the point at distance pi/2 from ``p`` on the great circle through
    ``m`` and ``p``, on the side of ``m``.  The result is normalized by its
    actual norm rather than by ``sqrt(1 - (m.p)^2)`` so the unit-norm
    postcondition survives rounding.
    """
    m = np.asarray(m, dtype=float)
    p = np.asarray(p, dtype=float)
    c = dot(m, p)
    if np.any(np.abs(c) >= np.cos(ANGLE_TOL)):
        raise PoleInput("blow-up is undefined at the centre and its antipode")
    return unit(m - c[..., None] * p)


@dataclass(frozen=True, eq=False)
class Hemisphere:
    """Closed hemisphere ``{q : center.q >= 0}``."""

    center: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", unit(self.center))


def hemisphere_contains(h, q, tol=0.0):
    return bool(dot(h.center, q) >= -tol)


@dataclass(frozen=True, eq=False)
class Lune:
    """Intersection of two distinct, non-opposite hemispheres ``H(p), H(q)``."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p, q = unit(self.p), unit(self.q)
        d = angle_between(p, q)
        if d <= ANGLE_TOL or d >= np.pi - ANGLE_TOL:
            raise InvalidLune("lune hemispheres must be different and not opposite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


def lune_thickness(lune):
    return float(np.pi - distance(lune.p, lune.q))


def skew(v):
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rotation_to_pole(c):
    """Minimal rotation matrix ``R`` with ``R @ c == NORTH``."""
    c = unit(c)
    cz = c[2]
    if cz <= -1.0 + 1e-15:
        return np.diag([1.0, -1.0, -1.0])
    v = skew(np.cross(c, NORTH))
    return np.eye(3) + v + v @ v / (1.0 + cz)


def rotation_about(axis, angle):
    """Right-handed rotation by ``angle`` about ``axis`` (Rodrigues)."""
    k = skew(unit(axis))
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def random_rotation(rng):
    """Haar-uniform rotation from a ``numpy.random.Generator``."""
    q = rng.normal(size=4)
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def random_points(rng, n):
    return unit(rng.normal(size=(n, 3)))


def random_cap_points(rng, n, center, radius):
    """Area-uniform samples in the cap of angular ``radius`` about ``center``."""
    cos_r = np.cos(radius)
    z = 1.0 - rng.random(n) * (1.0 - cos_r)
    phi = rng.random(n) * 2.0 * np.pi
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    local = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=-1)
    return unit(local @ rotation_to_pole(center))
