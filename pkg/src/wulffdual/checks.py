"""Executable numerical checks of the self-duality theory.

Every check returns a :class:`~wulffdual.report.CheckReport`.  Random
streams are derived from ``(master seed, check name, subject)`` so that the
order in which checks run, or how many threads run them, cannot change a
result.
"""

import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import metrics as mt
from . import presets as ps
from . import region as rg
from . import wulff as wf
from .report import FAIL, NOT_APPLICABLE, PASS, CheckReport, verdict
from .sphere import angle_between, blow_up, dot, random_points, random_rotation, unit

HALF_PI = np.pi / 2

DEFAULT_TOLERANCES = {
    "polytope-constant-width": 1e-6,
    "selfdual-equivalences": 1e-6,
    "width-duality": 1e-9,
    "strict-convexity": 1e-6,
    "arc-interior": 1e-6,
    "blowup-property": 1e-6,
    # corner-rounded Reuleaux triangle: approximate check, see the README
    "blowup-property-approx": 1e-3,
    "blowup-equivalence": 1e-6,
    "diameter-support": 1e-8,
    "thickness-diameter-duality": 1e-8,
    "polar-involution": 1e-10,
    "blowup-orthogonality": 1e-12,
    "blowup-involution": 1e-10,
    "pipeline-agreement": None,  # 10 (2 pi / K)^2 unless overridden
}

CHECK_NAMES = (
    "blowup-identity",
    "polar-involution",
    "pipeline-agreement",
    "polytope-constant-width",
    "selfdual-equivalences",
    "width-duality",
    "strict-convexity",
    "thickness-diameter-duality",
    "diameter-support",
    "arc-interior",
    "blowup-property",
    "blowup-equivalence",
)


def stream(seed, *labels):
    """Independent generator for ``(seed, labels...)``."""
    key = [int(seed) & 0xFFFFFFFF] + [zlib.crc32(str(x).encode()) for x in labels]
    return np.random.default_rng(key)


def _na(name, subject, why, **kw):
    return CheckReport(name=name, subject=subject, status=NOT_APPLICABLE, notes=[why], **kw)


# ---------------------------------------------------------------- sphere primitives


def check_blowup_identity(pairs=100_000, seed=0, tol_orth=1e-12, tol_inv=1e-10):
    """``Psi_M(P)`` is orthogonal to ``P`` and ``Psi_M`` is an involution on ``H(M)``."""
    rng = stream(seed, "blowup-identity")
    m = random_points(rng, pairs)
    p = random_points(rng, pairs)
    p = np.where((dot(m, p) < 0.0)[:, None], -p, p)
    keep = np.abs(dot(m, p)) < np.cos(1e-6)
    m, p = m[keep], p[keep]
    q = blow_up(m, p)
    orth = np.abs(dot(q, p))
    inv = angle_between(blow_up(m, q), p)
    i, j = int(np.argmax(orth)), int(np.argmax(inv))
    ok = orth[i] <= tol_orth and inv[j] <= tol_inv
    return CheckReport(
        name="blowup-identity", status=verdict(ok), seed=seed, trials=int(len(m)),
        residuals=[("max_orthogonality", orth[i]), ("max_involution_error", inv[j]),
                   ("tolerance_orthogonality", tol_orth), ("tolerance_involution", tol_inv)],
        witnesses=[] if ok else [m[j], p[j]],
    )


def check_polar_involution(trials=100, seed=0, tol=1e-10):
    """The polar of the polar of a polygon is the polygon; the octant is self-polar."""
    rng = stream(seed, "polar-involution")
    worst, witness = 0.0, None
    for _ in range(trials):
        poly = rg.random_polygon(rng)
        err = rg.same_polygon(rg.polar_polygon(rg.polar_polygon(poly)), poly, tol)
        if err > worst:
            worst, witness = err, poly
    octant = ps.octant()
    oct_err = rg.same_polygon(rg.polar_polygon(octant), octant, tol)
    ok = worst <= tol and oct_err <= tol
    return CheckReport(
        name="polar-involution", status=verdict(ok), seed=seed, trials=trials,
        residuals=[("max_double_polar_error", worst), ("octant_polar_error", oct_err),
                   ("tolerance", tol)],
        witnesses=[] if ok else list(witness.vertices if witness is not None else octant.vertices),
    )


# ---------------------------------------------------------------- Wulff pipeline


def random_sampled_gamma(rng, samples=64, modes=4, amplitude=0.1):
    """Positive trigonometric polynomial sampled at ``samples`` uniform angles."""
    th = 2.0 * np.pi * np.arange(samples) / samples
    g = np.ones(samples)
    for j in range(1, modes + 1):
        a, b = rng.uniform(-amplitude, amplitude, size=2)
        g += a * np.cos(j * th) + b * np.sin(j * th)
    return wf.Sampled(th, g)


def check_pipeline_agreement(functions=20, k=wf.DEFAULT_K, seed=0, tol=None):
    """Halfplane intersection and the blow-up/polarity composition give the same shape."""
    tol = wf.mesh_tolerance(k) if tol is None else tol
    rng = stream(seed, "pipeline-agreement")
    worst, witness = 0.0, None
    for _ in range(functions):
        sf = random_sampled_gamma(rng)
        a = wf.wulff_construct(wf.sample_gamma(sf, k))
        b = wf.dual_via_pipeline(sf, k)
        d = mt.hausdorff_planar(a, b)
        if d >= worst:
            worst, witness = d, sf
    ok = worst <= tol
    return CheckReport(
        name="pipeline-agreement", status=verdict(ok), seed=seed, trials=functions,
        residuals=[("max_hausdorff", worst), ("directions", k), ("tolerance", tol)],
        witnesses=[] if ok else [np.column_stack([witness.thetas, witness.gammas])],
    )


# ---------------------------------------------------------------- widths


def check_constant_width_polytope(trials=1000, seed=0, tol=1e-6, rotations=20):
    """Constant-width spherical polytopes have width pi/2.

    Random polygons are scanned for constant width; any instance must have
    ``|delta - pi/2| <= tol``.  The octant and random rotations of it must
    have constant width pi/2.
    """
    name = "polytope-constant-width"
    rng = stream(seed, name)
    constant = violations = 0
    min_spread = np.inf
    witness = []
    for _ in range(trials):
        poly = rg.random_polygon(rng)
        rep = mt.is_constant_width(poly, tol)
        min_spread = min(min_spread, rep.spread)
        if rep.constant:
            constant += 1
            if abs(rep.delta - HALF_PI) > tol:
                violations += 1
                witness = list(poly.vertices)
    oct_err = 0.0
    bodies = [ps.octant()] + [ps.octant().rotated(random_rotation(rng)) for _ in range(rotations)]
    for body in bodies:
        rep = mt.is_constant_width(body, tol)
        err = abs(rep.delta - HALF_PI) if rep.constant else np.inf
        if err > oct_err:
            oct_err = err
            if err > tol and not witness:
                witness = list(body.vertices)
    ok = violations == 0 and oct_err <= tol
    return CheckReport(
        name=name, status=verdict(ok), seed=seed, trials=trials,
        residuals=[("constant_width_instances", constant), ("violations", violations),
                   ("min_random_spread", min_spread), ("octant_rotations", len(bodies)),
                   ("octant_delta_error", oct_err), ("tolerance", tol)],
        witnesses=witness,
    )


def spherical_self_duality(body, tol):
    """Distance between a spherical body and its polar."""
    pol = rg.polar(body)
    if rg.is_polygon(body):
        return rg.same_polygon(pol, body, tol)
    return mt.hausdorff_spherical(body, pol)


def check_selfdual_equivalences(subject, tol=1e-6, name=""):
    """Self-duality, constant width pi/2 and constant diameter pi/2 agree.

    ``subject`` is a planar Wulff shape or a :class:`~wulffdual.presets.Preset`;
    a preset without a planar face is tested for spherical self-polarity.
    """
    planar = getattr(subject, "planar", subject)
    body = getattr(subject, "spherical", None)
    if body is None:
        body = wf.spherical_wulff(planar)
    if planar is not None:
        pair = wf.is_self_dual(planar)
        a, dist, dual_tol = pair.self_dual, pair.hausdorff_distance, pair.tolerance
    else:
        dual_tol = tol
        dist = spherical_self_duality(body, tol)
        a = dist <= dual_tol
    w = mt.is_constant_width(body, tol)
    b = bool(w.constant and abs(w.delta - HALF_PI) <= tol)
    dm = mt.is_constant_diameter(body, tol)
    c = bool(dm.constant and abs(dm.diameter - HALF_PI) <= tol)
    ok = a == b == c
    return CheckReport(
        name="selfdual-equivalences", subject=name or getattr(subject, "name", ""),
        status=verdict(ok),
        residuals=[("self_dual", a), ("constant_width_half_pi", b),
                   ("constant_diameter_half_pi", c), ("dual_hausdorff", dist),
                   ("dual_tolerance", dual_tol), ("width_spread", w.spread),
                   ("min_width", w.min_width), ("diameter", dm.diameter),
                   ("min_farthest", dm.min_farthest), ("tolerance", tol)],
        witnesses=[] if ok else [w.argmin_center, w.argmax_center, dm.witness_p, dm.witness_q],
    )


def check_width_duality(body, tol=1e-9, subject=""):
    """A body of constant width ``delta`` has a polar of constant width ``pi - delta``."""
    name = "width-duality"
    rep = mt.is_constant_width(body, tol)
    if not rep.constant:
        return _na(name, subject, "body is not of constant width",
                   residuals=[("width_spread", rep.spread), ("tolerance", tol)])
    pol = mt.is_constant_width(rg.polar(body), tol)
    err = abs(pol.min_width - (np.pi - rep.delta)) if pol.constant else np.inf
    ok = pol.constant and err <= tol
    return CheckReport(
        name=name, subject=subject, status=verdict(ok),
        residuals=[("delta", rep.delta), ("polar_min_width", pol.min_width),
                   ("polar_width_spread", pol.spread), ("duality_error", err),
                   ("tolerance", tol)],
        witnesses=[] if ok else [pol.argmin_center, pol.argmax_center],
    )


def _great_circle_triples(body):
    """Smallest normalized turn of consecutive boundary triples.

    ``det(A, B, C) / (|AB| |BC| |CA|)`` is half the geodesic curvature of the
    circle through the triple; it vanishes when the triple lies on one great
    circle.
    """
    b = np.asarray(body.boundary)
    a, c = np.roll(b, 1, axis=0), np.roll(b, -1, axis=0)
    det = np.einsum("ij,ij->i", a, np.cross(b, c))
    scale = np.linalg.norm(b - a, axis=1) * np.linalg.norm(c - b, axis=1) * np.linalg.norm(a - c, axis=1)
    ratio = det / scale
    i = int(np.argmin(ratio))
    return float(ratio[i]), b[i]


def check_strict_convexity(body, tol=1e-6, subject=""):
    """Constant width below pi/2 forces strict convexity.

    Polygons are never strictly convex, so for them the check asserts the
    contrapositive: no polygon has constant width below pi/2.
    """
    name = "strict-convexity"
    rep = mt.is_constant_width(body, tol)
    if rg.is_polygon(body):
        if not rep.constant:
            return CheckReport(name=name, subject=subject, status=PASS,
                               residuals=[("width_spread", rep.spread), ("tolerance", tol)],
                               notes=["polygon is not of constant width (contrapositive)"])
        if rep.delta >= HALF_PI - tol:
            return _na(name, subject, "constant width pi/2 permits great-circle edges",
                       residuals=[("delta", rep.delta), ("tolerance", tol)])
        return CheckReport(name=name, subject=subject, status=FAIL,
                           residuals=[("delta", rep.delta), ("tolerance", tol)],
                           witnesses=list(body.vertices),
                           notes=["polygon of constant width below pi/2"])
    if not rep.constant:
        return _na(name, subject, "body is not of constant width",
                   residuals=[("width_spread", rep.spread), ("tolerance", tol)])
    if rep.delta >= HALF_PI - tol:
        return _na(name, subject, "constant width pi/2 permits great-circle arcs",
                   residuals=[("delta", rep.delta), ("tolerance", tol)])
    turn, where = _great_circle_triples(body)
    flats = len(body.radial.flats)
    ok = turn > 1e-9 and flats == 0
    return CheckReport(
        name=name, subject=subject, status=verdict(ok),
        residuals=[("delta", rep.delta), ("min_normalized_turn", turn),
                   ("declared_flat_pieces", flats), ("tolerance", tol)],
        witnesses=[] if ok else [where],
    )


def check_diameter_support(body, tol=1e-8, subject=""):
    rep = mt.diameter_support_check(body, tol)
    rep.subject = subject
    return rep


def check_thickness_diameter_duality(bodies, tol=1e-8, seed=0, random_polygons=50):
    """``thickness(C) + diam(C polar) = pi`` on the given bodies and random polygons."""
    name = "thickness-diameter-duality"
    rng = stream(seed, name)
    items = list(bodies) + [(f"random-{i}", rg.random_polygon(rng)) for i in range(random_polygons)]
    worst, witness = 0.0, ""
    for label, body in items:
        err = abs(mt.thickness(body) + mt.diameter(rg.polar(body)).diameter - np.pi)
        if err >= worst:
            worst, witness = err, label
    ok = worst <= tol
    return CheckReport(
        name=name, status=verdict(ok), seed=seed, trials=len(items),
        residuals=[("max_identity_error", worst), ("tolerance", tol)],
        notes=[f"largest error on {witness}"],
    )


# ---------------------------------------------------------------- smooth bodies


def check_arc_interior(body, samples=1000, tol=1e-6, subject=""):
    """For smooth bodies the arc from a boundary point to its supporting centre enters the interior."""
    name = "arc-interior"
    if rg.is_polygon(body) or not rg.is_smooth(body, tol):
        return _na(name, subject, "body is not smooth")
    phi = 2.0 * np.pi * np.arange(samples) / samples
    p = body.point_at(phi)
    q = rg.smooth_center(body, phi)
    found = np.zeros(samples, dtype=bool)
    depth = np.zeros(samples)
    for t in (1e-3, 1e-2, 0.05, 0.1, 0.2, 0.4, 0.8, HALF_PI):
        todo = np.nonzero(~found)[0]
        if len(todo) == 0:
            break
        x = rg.arc_point_at(p[todo], q[todo], np.full(len(todo), t))
        d = rg.signed_distance(body, x)
        hit = d < -rg.ON_BOUNDARY
        found[todo[hit]] = True
        depth[todo[hit]] = -d[hit]
    ok = bool(np.all(found))
    bad = np.nonzero(~found)[0]
    return CheckReport(
        name=name, subject=subject, status=verdict(ok), trials=samples,
        residuals=[("points_without_interior", int(len(bad))),
                   ("min_interior_depth", float(np.min(depth[found])) if found.any() else 0.0),
                   ("tolerance", tol)],
        witnesses=[] if ok else [p[bad[0]], q[bad[0]]],
    )


def sample_interior_points(body, count, rng, margin=0.05):
    """Rejection samples from the bounding cap, at least ``margin`` inside the body."""
    c = unit(body.interior_point)
    radius = float(np.max(angle_between(np.asarray(body.boundary), c)))
    out = []
    from .sphere import random_cap_points

    while len(out) < count:
        pts = random_cap_points(rng, 4 * count, c, radius)
        d = rg.signed_distance(body, pts)
        out.extend(pts[d <= -margin])
    return np.array(out[:count])


def blowup_residuals(body, interior_samples, tol, rng):
    """Largest boundary defect of ``Psi_M(P)`` over sampled ``M`` and the support set."""
    witness, empty = None, 0
    ms, ps_ = [], []
    for m in sample_interior_points(body, interior_samples, rng):
        s = wf.boundary_support_intersection(body, m)
        if not s:
            empty += 1
            witness = witness or (m, m)
            continue
        ms.extend([m] * len(s))
        ps_.extend(s)
    if not ms:
        return 0.0, witness, empty, 0
    ms, ps_ = np.array(ms), np.array(ps_)
    # one batched distance evaluation for every blown-up point
    d = np.abs(rg.signed_distance(body, blow_up(ms, ps_)))
    k = int(np.argmax(d))
    worst = float(d[k])
    if worst > 0.0 and witness is None:
        witness = (ms[k], ps_[k])
    return worst, witness, empty, len(ps_)


def check_blowup_property(body, interior_samples=100, tol=1e-6, seed=0, subject=""):
    """Blow-ups of support-set points land on the boundary, and the diameter is pi/2."""
    name = "blowup-property"
    if rg.is_polygon(body) or not rg.is_smooth(body, tol):
        return _na(name, subject, "body is not smooth")
    rng = stream(seed, name, subject)
    worst, witness, empty, count = blowup_residuals(body, interior_samples, tol, rng)
    holds = empty == 0 and worst <= tol
    diam = mt.diameter(body).diameter
    ok = holds and abs(diam - HALF_PI) <= tol
    res = [("max_boundary_defect", worst), ("empty_support_sets", empty),
           ("support_points", count), ("diameter", diam),
           ("diameter_error", abs(diam - HALF_PI)), ("tolerance", tol)]
    return CheckReport(name=name, subject=subject, status=verdict(ok), seed=seed,
                       trials=interior_samples, residuals=res,
                       witnesses=[] if ok or witness is None else list(witness))


def check_blowup_equivalence(subject, interior_samples=100, tol=1e-6, seed=0, name=""):
    """The blow-up property holds exactly for the self-dual smooth presets.

    A failing blow-up property on a body that is not self-dual is the
    expected outcome, so this report passes whenever the two verdicts agree.
    """
    check = "blowup-equivalence"
    body = subject.spherical
    rep = check_blowup_property(body, interior_samples, tol, seed, name)
    if rep.status == NOT_APPLICABLE:
        return _na(check, name, "body is not smooth")
    pair = wf.is_self_dual(subject.planar)
    ok = rep.passed == pair.self_dual
    return CheckReport(
        name=check, subject=name, status=verdict(ok), seed=seed, trials=interior_samples,
        residuals=[("blowup_property", rep.passed), ("self_dual", pair.self_dual)]
        + rep.residuals,
        witnesses=rep.witnesses,
        notes=[] if rep.passed else ["blow-up property fails, as expected for a body that is not self-dual"]
        if ok else ["blow-up property and self-duality disagree"],
    )


# ---------------------------------------------------------------- driver


@dataclass
class RunConfig:
    seed: int = 0
    trials: int = 1000
    k: int = wf.DEFAULT_K
    tolerances: dict = field(default_factory=dict)
    checks: tuple = ()
    workers: int = 1
    interior_samples: int = 100
    boundary_samples: int = 1000
    tol: float = None

    def tolerance(self, key):
        if self.tol is not None:
            return float(self.tol)
        if key in self.tolerances:
            return float(self.tolerances[key])
        value = DEFAULT_TOLERANCES[key]
        return wf.mesh_tolerance(self.k) if value is None else value

    def selected(self, name):
        return not self.checks or name in self.checks


def _tasks(cfg):
    """Deferred checks in a fixed order: ``(name, callable)`` pairs."""
    tasks = []
    seed = cfg.seed
    suite = None

    def presets():
        nonlocal suite
        if suite is None:
            suite = ps.preset_suite(cfg.k)
        return suite

    def add(name, fn):
        if cfg.selected(name):
            tasks.append((name, fn))

    add("blowup-identity", lambda: check_blowup_identity(
        100_000, seed, cfg.tolerance("blowup-orthogonality"), cfg.tolerance("blowup-involution")))
    add("polar-involution", lambda: check_polar_involution(
        100, seed, cfg.tolerance("polar-involution")))
    add("pipeline-agreement", lambda: check_pipeline_agreement(
        20, cfg.k, seed, cfg.tolerance("pipeline-agreement")))
    add("polytope-constant-width", lambda: check_constant_width_polytope(
        cfg.trials, seed, cfg.tolerance("polytope-constant-width")))
    for p in (presets() if cfg.selected("selfdual-equivalences") else []):
        add("selfdual-equivalences", lambda p=p: check_selfdual_equivalences(
            p, cfg.tolerance("selfdual-equivalences"), p.name))
    width_subjects = ["cap_pi/16", "cap_pi/8", "cap_pi/4", "cap_3pi/8", "octant", "reuleaux",
                      "reuleaux_smoothed", "ellipse21", "square"]
    for p in (presets() if cfg.selected("width-duality") else []):
        if p.name in width_subjects:
            add("width-duality", lambda p=p: check_width_duality(
                p.spherical, cfg.tolerance("width-duality"), p.name))
    if cfg.selected("strict-convexity"):
        for p in presets():
            if p.name in ("cap_pi/8", "cap_pi/16", "octant", "ellipse21"):
                add("strict-convexity", lambda p=p: check_strict_convexity(
                    p.spherical, cfg.tolerance("strict-convexity"), p.name))
        add("strict-convexity", lambda: _random_strict_convexity(cfg))
    add("thickness-diameter-duality", lambda: check_thickness_diameter_duality(
        [(p.name, p.spherical) for p in presets()], cfg.tolerance("thickness-diameter-duality"),
        seed))
    if cfg.selected("diameter-support"):
        for p in presets():
            if p.name.startswith("cap_") or p.name in ("octant", "reuleaux", "reuleaux_smoothed"):
                add("diameter-support", lambda p=p: check_diameter_support(
                    p.spherical, cfg.tolerance("diameter-support"), p.name))
    if cfg.selected("arc-interior"):
        for p in presets():
            if p.name in ("cap_pi/4", "ellipse21", "octant"):
                add("arc-interior", lambda p=p: check_arc_interior(
                    p.spherical, cfg.boundary_samples, cfg.tolerance("arc-interior"), p.name))
    if cfg.selected("blowup-property"):
        for p in presets():
            if p.name == "cap_pi/4":
                add("blowup-property", lambda p=p: check_blowup_property(
                    p.spherical, cfg.interior_samples, cfg.tolerance("blowup-property"), seed,
                    p.name))
            if p.name == "reuleaux_smoothed":
                add("blowup-property", lambda p=p: _approximate(check_blowup_property(
                    p.spherical, cfg.interior_samples, cfg.tolerance("blowup-property-approx"),
                    seed, p.name)))
    if cfg.selected("blowup-equivalence"):
        for p in presets():
            if p.name in ("disk", "ellipse21", "cap_pi/8", "cap_pi/4"):
                add("blowup-equivalence", lambda p=p: check_blowup_equivalence(
                    p, max(10, cfg.interior_samples // 5), cfg.tolerance("blowup-equivalence"),
                    seed, p.name))
    return tasks


def _approximate(rep):
    rep.notes.append("approximate check: corner-rounded body, relaxed tolerance")
    return rep


def _random_strict_convexity(cfg):
    name = "strict-convexity"
    rng = stream(cfg.seed, name, "random")
    tol = cfg.tolerance(name)
    trials = max(1, cfg.trials // 10)
    bad = []
    for _ in range(trials):
        poly = rg.random_polygon(rng)
        rep = check_strict_convexity(poly, tol)
        if rep.failed:
            bad.append(poly)
    ok = not bad
    return CheckReport(name=name, subject="random-polygons", status=verdict(ok), seed=cfg.seed,
                       trials=trials, residuals=[("failures", len(bad)), ("tolerance", tol)],
                       witnesses=[] if ok else list(bad[0].vertices))


def run_all(cfg=None):
    """Run the selected checks; the list order is fixed by the configuration."""
    cfg = cfg or RunConfig()
    unknown = [c for c in cfg.checks if c not in CHECK_NAMES]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")
    tasks = _tasks(cfg)
    workers = max(1, int(cfg.workers))
    if workers == 1:
        reports = [fn() for _, fn in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda t: t[1](), tasks))
    for rep in reports:
        rep.seed = cfg.seed
        if cfg.tol == 0.0 and rep.failed:
            rep.notes.append("tolerance is zero: failure may be a floating-point artifact")
    return reports


def all_passed(reports):
    return all(r.status != FAIL for r in reports)
