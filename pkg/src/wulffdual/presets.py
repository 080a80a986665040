"""Compiled-in bodies used by the checks and the command line.

Planar presets are Wulff shapes; spherical presets are built on the sphere.
A preset with both faces is centred on the north pole, so its planar face
is the gnomonic chart of its spherical face.
"""

import re
from dataclasses import dataclass

import numpy as np

from . import radial as rad
from . import region as rg
from . import wulff as wf
from .errors import SpecError
from .sphere import NORTH, rotation_to_pole, unit

OCTANT_CENTER = unit([1.0, 1.0, 1.0])
#: corner-rounding radius of the smoothed Reuleaux triangle
SMOOTHING = 0.01


def octant():
    return rg.SphericalPolygon(np.eye(3))


def centered_octant():
    """Octant rotated so that its centre sits on the north pole."""
    return octant().rotated(rotation_to_pole(OCTANT_CENTER))


def square():
    return wf.PlanarConvexBody([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


def triangle_sqrt2():
    return wf.PlanarConvexBody(wf.triangle_vertices())


def disk(k=wf.DEFAULT_K, radius=1.0):
    return wf.wulff_shape(wf.Constant(radius), k)


def ellipse21(k=wf.DEFAULT_K):
    return wf.wulff_shape(wf.Ellipse(2.0, 1.0), k)


def _vertex_polar_angle(width):
    # three vertices at polar angle a, 120 degrees apart, pairwise at distance width:
    # cos(width) = cos^2 a - sin^2 a / 2
    return float(np.arccos(np.sqrt((2.0 * np.cos(width) + 1.0) / 3.0)))


def reuleaux_vertices(width=np.pi / 2):
    a = _vertex_polar_angle(width)
    az = np.pi / 2 + 2.0 * np.pi * np.arange(3) / 3.0
    return np.stack([np.sin(a) * np.cos(az), np.sin(a) * np.sin(az),
                     np.full(3, np.cos(a))], axis=1)


def _along(src, dst, length):
    """Point at distance ``length`` from ``src`` on the great circle through ``dst``."""
    e = unit(dst - np.dot(src, dst) * src)
    return np.cos(length) * src + np.sin(length) * e


def _chart_angle(p):
    return float(np.mod(np.arctan2(p[1], p[0]), 2.0 * np.pi))


def reuleaux_radial(width=np.pi / 2, eps=0.0):
    """Radial function of the ``eps``-parallel body of a spherical Reuleaux triangle.

    The triangle has width ``width`` and is centred on the north pole.  Its
    parallel body is bounded by three arcs of radius ``width + eps`` about
    the vertices and, for ``eps > 0``, three arcs of radius ``eps`` around
    the vertices themselves; it has constant width ``width + 2 eps`` and no
    corners.
    """
    v = reuleaux_vertices(width)
    centers, rhos, starts = [], [], []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        # counterclockwise: corner arc about v[i] from the end of the arc about
        # v[j], then the arc about v[k] towards v[j]
        if eps > 0.0:
            centers.append(v[i])
            rhos.append(eps)
            starts.append(_chart_angle(_along(v[j], v[i], width + eps)))
        centers.append(v[k])
        rhos.append(width + eps)
        starts.append(_chart_angle(_along(v[k], v[i], width + eps)))
    corners = () if eps > 0.0 else [_chart_angle(p) for p in v]
    return rad.ArcRadial(centers, rhos, starts, corners=corners)


def reuleaux(mesh=rg.DEFAULT_MESH):
    """Spherical Reuleaux triangle of width pi/2, built from its three arcs."""
    return rg.SampledSphericalBody(NORTH, reuleaux_radial(np.pi / 2, 0.0), frame=np.eye(3),
                                   mesh=mesh)


def reuleaux_smoothed(mesh=rg.DEFAULT_MESH, eps=SMOOTHING):
    """Corner-rounded Reuleaux triangle of width exactly pi/2."""
    return rg.SampledSphericalBody(NORTH, reuleaux_radial(np.pi / 2 - 2.0 * eps, eps),
                                   frame=np.eye(3), mesh=mesh)


def cap_at_north(radius, mesh=rg.DEFAULT_MESH):
    return rg.SampledSphericalBody(NORTH, rad.ConstantRadial(np.tan(radius)), frame=np.eye(3),
                                   mesh=mesh)


CAP_RADII = (np.pi / 16, np.pi / 8, np.pi / 4, 3 * np.pi / 8)


# ---------------------------------------------------------------- registry


@dataclass
class Preset:
    name: str
    planar: object
    spherical: object


def parse_cap_radius(text):
    """``0.39``, ``pi/8`` or ``3pi/8`` (radians)."""
    m = re.fullmatch(r"\s*(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*", text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        r = num * np.pi / den
    else:
        try:
            r = float(text)
        except ValueError:
            raise SpecError(f"cannot read cap radius {text!r}", "name") from None
    if not 0.0 < r < np.pi / 2:
        raise SpecError("cap radius must lie in (0, pi/2)", "name")
    return r


PRESET_NAMES = ("disk", "ellipse21", "square", "triangle_sqrt2", "cap_<r>", "octant",
                "reuleaux", "reuleaux_smoothed")


def get_preset(name, k=wf.DEFAULT_K):
    if name == "disk":
        w = disk(k)
    elif name == "ellipse21":
        w = ellipse21(k)
    elif name == "square":
        w = square()
    elif name == "triangle_sqrt2":
        w = triangle_sqrt2()
    elif name == "octant":
        return Preset(name, None, octant())
    elif name == "reuleaux":
        body = reuleaux(k)
        return Preset(name, wf.planar_chart(body), body)
    elif name == "reuleaux_smoothed":
        body = reuleaux_smoothed(k)
        return Preset(name, wf.planar_chart(body), body)
    elif name.startswith("cap_"):
        r = parse_cap_radius(name[4:])
        w = wf.wulff_shape(wf.Constant(np.tan(r)), k)
    else:
        raise SpecError(f"unknown preset {name!r}", "name")
    return Preset(name, w, wf.spherical_wulff(w))


def preset_suite(k=wf.DEFAULT_K):
    names = ["disk", "ellipse21", "square", "triangle_sqrt2"]
    names += ["cap_pi/16", "cap_pi/8", "cap_pi/4", "cap_3pi/8"]
    names += ["octant", "reuleaux", "reuleaux_smoothed"]
    return [get_preset(n, k) for n in names]
