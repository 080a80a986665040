import numpy as np
import pytest

from wulffdual import checks as ck
from wulffdual import presets as ps
from wulffdual import region as rg
from wulffdual import wulff as wf
from wulffdual.report import FAIL, NOT_APPLICABLE, PASS
from wulffdual.sphere import blow_up, random_rotation

QUICK = dict(trials=40, k=256, interior_samples=5, boundary_samples=100)


@pytest.fixture(scope="module")
def ellipse():
    return ps.get_preset("ellipse21", 512)


def test_polytope_constant_width():
    rep = ck.check_constant_width_polytope(trials=100, seed=0, rotations=5)
    assert rep.status == PASS
    assert rep.residual("violations") == 0
    assert rep.residual("min_random_spread") > 1e-6  # random pentagons are not constant width


def test_rotated_octant_has_width_half_pi():
    body = ps.octant().rotated(random_rotation(np.random.default_rng(7)))
    rep = ck.check_width_duality(body, 1e-9)
    assert rep.status == PASS
    assert rep.residual("delta") == pytest.approx(np.pi / 2, abs=1e-9)


@pytest.mark.parametrize("name, expected", [
    ("disk", (True, True, True)),
    ("triangle_sqrt2", (True, True, True)),
    ("ellipse21", (False, False, False)),
    ("octant", (True, True, True)),
    ("cap_pi/16", (False, False, False)),
])
def test_selfdual_equivalences(name, expected):
    rep = ck.check_selfdual_equivalences(ps.get_preset(name, 512), 1e-6, name)
    assert rep.status == PASS
    got = (rep.residual("self_dual"), rep.residual("constant_width_half_pi"),
           rep.residual("constant_diameter_half_pi"))
    assert got == expected


def test_selfdual_equivalences_accepts_a_bare_wulff_shape():
    rep = ck.check_selfdual_equivalences(ps.triangle_sqrt2())
    assert rep.status == PASS and rep.residual("self_dual")


def test_width_duality_examples(ellipse):
    rep = ck.check_width_duality(ps.cap_at_north(np.pi / 8), 1e-9)
    assert rep.status == PASS
    assert rep.residual("polar_min_width") == pytest.approx(3 * np.pi / 4, abs=1e-9)
    assert ck.check_width_duality(ps.octant(), 1e-9).status == PASS
    assert ck.check_width_duality(ellipse.spherical, 1e-9).status == NOT_APPLICABLE


def test_strict_convexity_examples():
    assert ck.check_strict_convexity(ps.cap_at_north(np.pi / 8)).status == PASS
    assert ck.check_strict_convexity(ps.octant()).status == NOT_APPLICABLE
    poly = rg.random_polygon(np.random.default_rng(42))
    assert ck.check_strict_convexity(poly).status == PASS


def test_arc_interior_examples(ellipse):
    assert ck.check_arc_interior(ps.cap_at_north(np.pi / 4), 1000).status == PASS
    assert ck.check_arc_interior(ellipse.spherical, 200).status == PASS
    assert ck.check_arc_interior(ps.octant()).status == NOT_APPLICABLE


def test_blowup_property_fails_on_ellipse_with_witness(ellipse):
    body = ellipse.spherical
    rep = ck.check_blowup_property(body, interior_samples=10, tol=1e-6, seed=0)
    assert rep.status == FAIL
    m, p = rep.witnesses
    assert rg.signed_distance(body, m)[0] < 0
    image = blow_up(m, p)
    assert abs(rg.signed_distance(body, image)[0]) > 1e-6
    assert rg.contains(body, image) is not rg.Location.BOUNDARY


def test_blowup_property_passes_on_cap():
    rep = ck.check_blowup_property(ps.cap_at_north(np.pi / 4, 512), interior_samples=10)
    assert rep.status == PASS
    assert rep.residual("diameter_error") <= 1e-6


def test_blowup_equivalence_agrees_on_ellipse(ellipse):
    rep = ck.check_blowup_equivalence(ellipse, interior_samples=5, name="ellipse21")
    assert rep.status == PASS
    assert rep.residual("blowup_property") is False and rep.residual("self_dual") is False


def test_thickness_diameter_duality_on_random_polygons():
    rep = ck.check_thickness_diameter_duality([("octant", ps.octant())], random_polygons=20)
    assert rep.status == PASS and rep.residual("max_identity_error") <= 1e-8


def test_blowup_identity_and_polar_involution():
    assert ck.check_blowup_identity(pairs=5000).status == PASS
    assert ck.check_polar_involution(trials=20).status == PASS


def test_pipeline_agreement_small():
    rep = ck.check_pipeline_agreement(functions=3, k=512)
    assert rep.status == PASS
    assert rep.residual("tolerance") == pytest.approx(10 * (2 * np.pi / 512) ** 2)


def test_run_all_selection_gives_one_report():
    reports = ck.run_all(ck.RunConfig(checks=("polytope-constant-width",), **QUICK))
    assert [r.name for r in reports] == ["polytope-constant-width"]


def test_run_all_rejects_unknown_check():
    with pytest.raises(ValueError):
        ck.run_all(ck.RunConfig(checks=("no-such-check",)))


def test_zero_tolerance_flags_artifacts():
    cfg = ck.RunConfig(tol=0.0, checks=("blowup-identity", "polar-involution"), **QUICK)
    reports = ck.run_all(cfg)
    assert not ck.all_passed(reports)
    failed = [r for r in reports if r.failed]
    assert failed and all(any("tolerance is zero" in n for n in r.notes) for r in failed)


def test_reports_do_not_depend_on_thread_count():
    cfg = dict(checks=("polar-involution", "strict-convexity"), **QUICK)
    one = [r.to_dict() for r in ck.run_all(ck.RunConfig(workers=1, **cfg))]
    three = [r.to_dict() for r in ck.run_all(ck.RunConfig(workers=3, **cfg))]
    assert repr(one) == repr(three)


def test_streams_are_keyed_by_name():
    a = ck.stream(0, "x").random(3)
    b = ck.stream(0, "x").random(3)
    c = ck.stream(0, "y").random(3)
    d = ck.stream(1, "x").random(3)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c) and not np.array_equal(a, d)


def test_checks_do_not_mutate_inputs(ellipse):
    body = ps.cap_at_north(np.pi / 4, 256)
    before = np.array(body.boundary).copy()
    ck.check_blowup_property(body, interior_samples=3)
    ck.check_arc_interior(body, 50)
    ck.check_width_duality(body)
    np.testing.assert_array_equal(np.asarray(body.boundary), before)
    poly = ps.octant()
    v = np.array(poly.vertices).copy()
    ck.check_strict_convexity(poly)
    ck.check_diameter_support(poly)
    np.testing.assert_array_equal(poly.vertices, v)
    w = ellipse.planar
    wv = np.array(w.vertices).copy()
    ck.check_selfdual_equivalences(ellipse)
    np.testing.assert_array_equal(w.vertices, wv)


def test_report_schema():
    d = ck.check_polar_involution(trials=3).to_dict()
    assert {"name", "subject", "status", "passed", "residuals", "witnesses", "seed", "trials",
            "notes"} <= set(d)
    assert d["passed"] is True and d["status"] == "pass"


def test_random_sampled_gamma_is_positive():
    sf = ck.random_sampled_gamma(np.random.default_rng(0))
    assert isinstance(sf, wf.Sampled) and np.min(sf.gammas) > 0
