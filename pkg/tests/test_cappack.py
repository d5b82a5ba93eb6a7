import math
import warnings

import numpy as np
import pytest

from cylpack import cappack, cylinders, geom, multiplicity, specfn
from cylpack.errors import DomainError


def test_circle_set_strict_separation_caps_at_three():
    # strict pairwise gaps > pi/2 on the circle force at most three points
    # (the gaps around n points sum to 2*pi), and maximality forbids fewer
    out = cappack.build_separated_set(2, math.pi / 2 - 1e-9, metric=cappack.GEODESIC,
                                      seed=5)
    assert len(out) == 3
    assert cappack.check_separation(out)


def test_counting_bound_from_maximality_d3():
    # maximal geodesic sets are at least as large as the inverse cap fraction
    two_delta = math.pi / 3
    out = cappack.build_separated_set(3, two_delta, metric=cappack.GEODESIC,
                                      seed=6)
    sigma = specfn.spherical_cap_fraction(3, two_delta)
    assert out.maximal
    assert len(out) >= 1.0 / sigma


def test_projective_metric_forbids_antipodes():
    out = cappack.build_separated_set(3, 0.8, metric=cappack.PROJECTIVE, seed=2)
    dots = np.abs(out.points @ out.points.T)
    np.fill_diagonal(dots, 0.0)
    assert np.max(dots) < math.cos(0.8)


def test_separated_set_maximality_probe():
    out = cappack.build_separated_set(3, 0.7, seed=4)
    assert out.maximal
    probes = geom.uniform_sphere_points(3, 50_000, np.random.default_rng(123))
    level = np.abs(probes @ out.points.T)
    assert np.min(np.max(level, axis=1)) >= math.cos(0.7)


def test_separated_set_deterministic():
    a = cappack.build_separated_set(4, 0.5, seed=11)
    b = cappack.build_separated_set(4, 0.5, seed=11)
    assert np.array_equal(a.points, b.points)


def test_pairwise_caps_disjoint_exactly():
    # separation beyond 2 delta makes |<y, x_i>| >= cos(delta) mutually
    # exclusive: membership cosines certify empty intersections
    delta = 0.3
    out = cappack.build_separated_set(4, 2 * delta, seed=7)
    pts = out.points
    rng = np.random.default_rng(0)
    sphere = geom.uniform_sphere_points(4, 30_000, rng)
    level = np.abs(sphere @ pts.T) >= math.cos(delta)
    assert np.max(np.sum(level, axis=1)) <= 1


def test_build_cap_family_frames_contain_pole():
    out = cappack.build_separated_set(4, 0.6, seed=1)
    fam = cappack.build_cap_family(out, 0.3, 2, seed=1)
    for x, frame in zip(out.points, fam.frames):
        pole = frame.coords(x)
        assert pole[0] == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(pole[1:], 0.0, atol=1e-12)
        assert np.allclose(frame.embed(pole), x, atol=1e-12)


def test_cap_cylinder_slice_maximum_value():
    # the restricted cap cylinder's thickest complement-slice sits at
    # cos(delta) * pole and has k-volume sin(delta)^k * omega_k
    d, k, delta = 4, 1, 0.35
    ball = geom.Ball(np.zeros(d), 1.0)
    x = np.eye(d)[0]
    out = cappack.SeparatedSet(points=np.array([x]), separation=2 * delta,
                               metric=cappack.PROJECTIVE, maximal=False, seed=0)
    fam = cappack.build_cap_family(out, delta, k, seed=0)
    h_frame = geom.complement(fam.frames[0])
    val = geom.affine_slice_volume(ball, h_frame, math.cos(delta) * x)
    want = math.sin(delta) ** k * specfn.unit_ball_volume(k)
    assert val == pytest.approx(want, rel=1e-12)
    # and it really is the maximum over offsets along the pole
    others = [geom.affine_slice_volume(ball, h_frame, t * x)
              for t in np.linspace(math.cos(delta), 1.0, 30)]
    assert max(others) <= val + 1e-12


def test_two_point_family_packs():
    pts = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]])
    out = cappack.SeparatedSet(points=pts, separation=0.6,
                               metric=cappack.PROJECTIVE, maximal=False, seed=0)
    fam = cappack.build_cap_family(out, 0.3, 1, seed=0)
    ball = geom.Ball(np.zeros(4), 1.0)
    rep = multiplicity.estimate_multiplicity(ball, fam.cylinders, 20_000, seed=1)
    assert rep.max_mult == 1


def test_sum_crv_closed_form_matches_crv():
    out = cappack.build_separated_set(5, 0.6, seed=3)
    fam = cappack.build_cap_family(out, 0.3, 2, seed=3)
    ball = geom.Ball(np.zeros(5), 1.0)
    direct = sum(cylinders.crv(ball, c) for c in fam.cylinders)
    assert direct == pytest.approx(fam.sum_crv_closed_form(), rel=1e-12)


def test_report_chain_and_count_bound():
    rep = cappack.cap_packing_report(4, 1, 0.3, seed=1, packing_samples=20_000)
    assert rep.packing.max_mult == 1
    assert rep.n_cylinders >= rep.count_lower_bound_antipodal
    assert rep.count_bound_holds_antipodal
    assert rep.sum_crv >= rep.chain_rhs
    assert rep.chain_holds
    assert rep.empirical_constant_ratio > 0
    js = rep.to_json()
    assert js["n_cylinders"] == rep.n_cylinders
    assert js["packing"]["max_mult"] == 1


def test_report_geodesic_mode_consistent():
    # geodesic separation pairs with one-sided caps; the one-sided counting
    # bound is then guaranteed on top of the antipodal one, and the family
    # still packs (near-antipodal pairs get opposite one-sided caps)
    rep = cappack.cap_packing_report(4, 1, 0.25, seed=2,
                                     metric=cappack.GEODESIC,
                                     packing_samples=20_000)
    assert not rep.antipodal_bases
    assert rep.count_bound_holds_onesided
    assert rep.chain_holds
    assert rep.packing.max_mult == 1


def test_chain_respects_bracket_substitution():
    # swapping the integrals for their bracket endpoints weakens the chain in
    # the stated direction, so the weakened bound must still hold
    d, k, delta = 5, 2, 0.25
    rep = cappack.cap_packing_report(d, k, delta, seed=5)
    lo_top, _ = specfn.cos_power_bracket(d - k, delta)
    _, hi_bottom = specfn.cos_power_bracket(d - 2, 2 * delta)
    weakened = rep.chain_rhs * lo_top / specfn.cos_power_integral(d - k, delta) \
        * specfn.cos_power_integral(d - 2, 2 * delta) / hi_bottom
    assert weakened <= rep.chain_rhs + 1e-15
    assert rep.sum_crv >= weakened


def test_degenerate_codimension_warns():
    out = cappack.build_separated_set(4, 0.6, seed=1)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fam = cappack.build_cap_family(out, 0.3, 3, seed=1)
    assert any("degenerates" in str(w.message) for w in caught)
    assert fam.cylinders[0].frame.subspace_dim == 1


def test_domain_errors():
    with pytest.raises(DomainError):
        cappack.build_separated_set(1, 0.3)
    with pytest.raises(DomainError):
        cappack.build_separated_set(3, 2.0)
    with pytest.raises(DomainError):
        cappack.cap_packing_report(3, 1, 0.2)
    with pytest.raises(DomainError):
        cappack.cap_packing_report(4, 1, 1.0)
    out = cappack.build_separated_set(4, 0.6, seed=0)
    with pytest.raises(DomainError):
        cappack.build_cap_family(out, 0.2, 1)  # delta not half the separation
