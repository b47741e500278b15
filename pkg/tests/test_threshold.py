import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dnls.fields import gaussian_field, rescale_mass, smooth_random_field
from dnls.functionals import dilated, is_infinite, report, scale_polys
from dnls.grid import field_from_values, make_grid, spectral_resample
from dnls.kernel import DipoleParams
from dnls.threshold import (
    MASS_RATIO_S_TO_Q1,
    CurveOptions,
    ThresholdCurve,
    _chebyshev_masses,
    _project_scale,
    build_s,
    d_of_m,
    in_region_k,
    load_curve,
    mass_raise,
    project_to_i_zero,
    script_e,
    write_curve,
)

P0 = DipoleParams(-1.0, 0.0)
PD = DipoleParams(-1.0, 0.5)


def roots_oracle(a, b, c):
    """Positive real roots of a + b s + c s^4 via the companion matrix."""
    if c == 0.0:
        if b == 0.0:
            return []
        r = -a / b
        return [r] if r > 0 else []
    rr = np.roots([c, 0.0, 0.0, b, a])
    out = [float(r.real) for r in rr if abs(r.imag) < 1e-9 * max(1.0, abs(r)) and r.real > 0]
    return sorted(out)


def test_project_scale_against_root_oracle():
    rng = np.random.default_rng(2)
    n_feasible = 0
    for _ in range(400):
        a = float(rng.uniform(0.0, 3.0))
        c = float(rng.uniform(0.0, 3.0))
        b = float(rng.uniform(-4.0, 1.0))
        got = _project_scale(a, b, c)
        expected = roots_oracle(a, b, c)
        if not expected:
            assert got is None
        else:
            n_feasible += 1
            assert got == pytest.approx(expected[-1], rel=1e-10)
    assert n_feasible > 50  # the sweep actually exercises both branches


def test_projection_dilation_covariance():
    # s*(u^sigma) = s*(u)/sigma: the I = 0 point is a fixed point of the ray
    g = make_grid(32, 14.0)
    u = gaussian_field(g, widths=(1.2, 1.4, 1.1), amplitude=1.0)
    u = rescale_mass(u, 420.0)
    res = project_to_i_zero(u, P0)
    assert res.feasible
    for sigma in (0.7, 1.3):
        res2 = project_to_i_zero(dilated(u, sigma), P0)
        assert res2.feasible
        assert res2.s_star == pytest.approx(res.s_star / sigma, rel=1e-10)


def test_projection_output_is_on_the_manifold():
    # mass well above M(S) with a concentrated profile keeps the ray
    # crossing feasible; diffuse low-mass fields never cross (tested below)
    g = make_grid(32, 14.0)
    rng = np.random.default_rng(14)
    count = 0
    for k in range(20):
        w = rng.uniform(1.0, 1.8, size=3)
        boost = (0.0, 0.0, 2.0 * math.pi / g.box_length) if k % 2 \
            else (0.0, 0.0, 0.0)
        u = gaussian_field(g, widths=tuple(w), amplitude=1.0, boost=boost)
        u = rescale_mass(u, float(rng.uniform(300.0, 600.0)))
        res = project_to_i_zero(u, PD)
        if not res.feasible:
            continue
        count += 1
        rep = res.report
        assert abs(rep.i_value) < 1e-8 * rep.grad_squared
        # the largest root always lands on the gamma >= 1/3 side
        assert rep.gamma >= 1.0 / 3.0 - 1e-9
    assert count >= 10


def test_projection_fixed_point_at_i_zero(q1):
    # the ground state is on the manifold with Gamma = 1, so the projection
    # must return it unchanged (s* = 1) up to solver residual noise
    q48 = spectral_resample(q1.field.values.real, 48)
    u = field_from_values(q48, make_grid(48, q1.grid.box_length))
    res = project_to_i_zero(u, P0)
    assert res.feasible
    assert res.s_star == pytest.approx(1.0, abs=1e-3)


def test_projection_zero_and_defocusing():
    g = make_grid(16, 8.0)
    zero = field_from_values(np.zeros(g.shape), g)
    assert project_to_i_zero(zero, P0).s_star == 1.0
    # defocusing: N < 0, no crossing can exist
    u = smooth_random_field(g, seed=3, corr_length=1.0, envelope_width=1.2)
    res = project_to_i_zero(u, DipoleParams(1.0, 0.0))
    assert not res.feasible


def q48_field(q1):
    vals = spectral_resample(q1.field.values.real, 48)
    return field_from_values(vals, make_grid(48, q1.grid.box_length))


def test_mass_raise_identities(q1):
    u0 = q48_field(q1)
    start = project_to_i_zero(u0, P0).field  # I = 0 to projection precision
    rep0 = report(start, P0)
    for factor in (1.0, 1.05, 1.4, 2.0):
        target = factor * rep0.mass
        v, info = mass_raise(start, P0, target)
        rep = report(v, P0)
        assert rep.mass == pytest.approx(target, rel=1e-12)
        assert abs(rep.i_value) < 1e-8 * rep.grad_squared
        assert info.tau >= 1.0
        assert rep.energy == pytest.approx(info.energy_after, rel=1e-10)
        # guaranteed drop: E(v) <= E(u) - (m' - m)/(6 m) * G(u)
        assert rep.energy <= rep0.energy - info.energy_drop_bound \
            + 1e-9 * max(1.0, abs(rep0.energy))


def test_mass_raise_gamma_third_closed_form(s_build):
    # on the Gamma = 1/3 fiber the pair (sigma, tau) has the classical
    # closed form sigma = 4 tau/(3 + tau^2)
    s = s_build.exact_field
    rep = report(s, P0)
    target = 1.21 * rep.mass
    v, info = mass_raise(s, P0, target)
    # gamma(S) = 1/3 only to certificate precision, so the closed form is
    # met at that level rather than machine precision
    assert info.sigma == pytest.approx(4.0 * info.tau / (3.0 + info.tau ** 2),
                                       rel=1e-5)
    assert (3.0 + info.tau ** 2) ** 2 / (16.0 * info.tau) * rep.mass == \
        pytest.approx(target, rel=1e-5)


def test_mass_raise_guards(q1):
    u0 = q48_field(q1)
    start = project_to_i_zero(u0, P0).field
    rep = report(start, P0)
    with pytest.raises(ValueError, match="raises"):
        mass_raise(start, P0, 0.5 * rep.mass)
    off_manifold = dilated(start, 1.5)  # I(u^1.5) is far from zero
    with pytest.raises(ValueError, match="I = 0"):
        mass_raise(off_manifold, P0, 2.0 * rep.mass)
    # a field with I = 0 but gamma < 1/3: the smaller positive root of the
    # same dilation polynomial (the larger root always has gamma >= 1/3)
    polys = scale_polys(start, P0)
    roots = roots_oracle(polys.a, polys.b, polys.c)
    assert len(roots) >= 2
    low = dilated(start, roots[0])
    low_rep = report(low, P0)
    assert abs(low_rep.i_value) < 1e-6 * low_rep.grad_squared
    assert low_rep.gamma < 1.0 / 3.0
    with pytest.raises(ValueError, match="gamma"):
        mass_raise(low, P0, 2.0 * low_rep.mass)


def test_interpolation_inequality_with_optimal_young(q1):
    # N <= (4/3) sqrt(M/M(S)) (G + S6): the sharp quotient bound combined
    # with the Young step that is tight exactly on the S orbit
    mass_s = MASS_RATIO_S_TO_Q1 * q1.report.mass
    rng = np.random.default_rng(23)
    g = make_grid(32, 15.0)
    for _ in range(30):
        u = smooth_random_field(
            g, seed=int(rng.integers(2 ** 31)),
            corr_length=g.box_length * float(rng.uniform(0.05, 0.15)),
            envelope_width=g.box_length * float(rng.uniform(0.08, 0.2)),
            amplitude=float(rng.uniform(0.3, 2.0)),
            complex_valued=bool(rng.integers(2)))
        rep = report(u, P0)
        bound = (4.0 / 3.0) * math.sqrt(rep.mass / mass_s) \
            * (rep.grad_squared + rep.sextic)
        assert rep.n_value <= bound * (1.0 + 1e-6)


def test_below_critical_mass_is_infeasible(q1):
    mass_s = MASS_RATIO_S_TO_Q1 * q1.report.mass
    g = make_grid(32, 15.0)
    rng = np.random.default_rng(29)
    for _ in range(20):
        u = smooth_random_field(
            g, seed=int(rng.integers(2 ** 31)),
            corr_length=g.box_length * float(rng.uniform(0.05, 0.14)),
            envelope_width=g.box_length * float(rng.uniform(0.1, 0.2)),
            complex_valued=bool(rng.integers(2)))
        u = rescale_mass(u, 0.5 * mass_s)
        rep = report(u, P0)
        assert rep.i_value > 0.0
        assert not project_to_i_zero(u, P0).feasible


def test_s_construction_anchors(q1, s_build):
    ex = s_build.exact_report
    rs = s_build.resampled_report
    # mass ratio is pure algebra on both routes
    assert ex.mass / q1.report.mass == pytest.approx(MASS_RATIO_S_TO_Q1,
                                                     abs=1e-12)
    assert rs.mass / q1.report.mass == pytest.approx(MASS_RATIO_S_TO_Q1,
                                                     rel=1e-4)
    assert ex.gamma == pytest.approx(1.0 / 3.0, abs=1e-6)
    assert abs(ex.i_value) / ex.grad_squared < 1e-6
    assert rs.gamma == pytest.approx(1.0 / 3.0, abs=1e-3)
    assert abs(rs.i_value) / rs.grad_squared < 1e-3
    # the relabeling multiplies each functional by an exact factor
    assert ex.grad_squared == pytest.approx(
        q1.report.grad_squared / math.sqrt(3.0), rel=1e-12)
    assert ex.sextic == pytest.approx(
        q1.report.sextic / (3.0 * math.sqrt(3.0)), rel=1e-12)
    assert ex.quartic == pytest.approx(
        q1.report.quartic * 2.0 / (3.0 * math.sqrt(3.0)), rel=1e-12)
    # E(S) = G(Q1)/(9 sqrt 3) holds up to the E(Q1) = 0 certificate level
    assert ex.energy == pytest.approx(
        q1.report.grad_squared / (9.0 * math.sqrt(3.0)), rel=1e-3)
    # box geometry: same sample count, box stretched by 2/sqrt(3)
    assert s_build.exact_field.grid.n_points_per_axis == q1.grid.n_points_per_axis
    assert s_build.exact_field.grid.box_length == pytest.approx(
        q1.grid.box_length * 2.0 / math.sqrt(3.0), rel=1e-14)


def test_s_exact_route_projects_to_itself(s_build):
    res = project_to_i_zero(s_build.exact_field, P0)
    assert res.feasible
    assert res.s_star == pytest.approx(1.0, abs=1e-3)


def test_build_s_requires_alpha_one():
    class FakeGS:
        alpha = 2.0
    with pytest.raises(ValueError):
        build_s(FakeGS())


def test_script_e_infeasible_below_critical_mass(curve):
    res = script_e(0.4 * curve.mass_s, P0,
                   CurveOptions(n_grid=32, random_iters=60), restarts=3,
                   grid=make_grid(32, 16.0))
    assert not res.feasible
    assert is_infinite(res.value)
    assert res.best_field is None
    with pytest.raises(ValueError):
        script_e(-1.0, P0)


def test_d_of_m_negative_above_q1_mass(q1, curve):
    # above M(Q1) the fixed-mass infimum is strictly negative.  (Below the
    # critical mass the continuum value is 0, but the discrete probe is
    # resolution-limited there; infeasibility below M(S) is covered by the
    # I > 0 and projection tests above.)
    warm = q48_field(q1)
    big = d_of_m(1.2 * curve.mass_q1, P0, warm_start=warm, iters=120)
    assert big < -0.02 * curve.energy_s
    assert d_of_m(0.0, P0) == 0.0
    with pytest.raises(ValueError):
        d_of_m(-1.0, P0)


def test_curve_shape(curve, q1):
    assert curve.mass_q1 == pytest.approx(q1.report.mass, rel=1e-12)
    assert curve.mass_s == pytest.approx(MASS_RATIO_S_TO_Q1 * curve.mass_q1,
                                         rel=1e-14)
    es = [e for _, e in curve.samples]
    ms = [m for m, _ in curve.samples]
    assert ms[0] == pytest.approx(curve.mass_s, rel=1e-14)
    assert ms[-1] == pytest.approx(curve.mass_q1, rel=1e-14)
    assert es[0] == pytest.approx(curve.energy_s, rel=1e-6)
    eps = curve.eps_curve * curve.energy_s
    assert abs(es[-1]) < eps
    assert all(b < a + eps for a, b in zip(es, es[1:]))
    # every probe below M(S) failed every restart
    assert len(curve.probes) >= 1
    for m_probe, used in curve.probes:
        assert m_probe < curve.mass_s
        assert used >= 1


def test_threshold_at(curve):
    assert is_infinite(curve.threshold_at(0.5 * curve.mass_s))
    assert curve.threshold_at(curve.mass_q1) == 0.0
    assert curve.threshold_at(2.0 * curve.mass_q1) == 0.0
    mid = 0.5 * (curve.mass_s + curve.mass_q1)
    val = curve.threshold_at(mid)
    assert 0.0 < val < curve.energy_s
    # interpolation respects monotonicity between nodes
    vals = [curve.threshold_at(m) for m in
            np.linspace(curve.mass_s, curve.mass_q1 * 0.999, 40)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        curve.threshold_at(0.0)


def test_in_region_k_cases(curve):
    ms, mq = curve.mass_s, curve.mass_q1
    assert in_region_k(0.5 * ms, 123.0, curve)        # any e > 0 below M(S)
    assert not in_region_k(0.5 * ms, 0.0, curve)
    assert not in_region_k(0.5 * ms, -0.5, curve)
    assert in_region_k(0.9 * mq, 0.5 * float(curve.threshold_at(0.9 * mq)), curve)
    assert not in_region_k(0.9 * mq, 2.0 * curve.energy_s, curve)
    assert not in_region_k(1.5 * mq, 0.01, curve)
    assert not in_region_k(-1.0, 1.0, curve)


def test_in_blowup_region_and_vertices(curve):
    assert curve.in_blowup_region(0.9 * curve.mass_q1, 2.0 * curve.energy_s)
    assert not curve.in_blowup_region(0.5 * curve.mass_s, 100.0)
    verts = curve.boundary_vertices()
    assert verts[0][0] == pytest.approx(curve.mass_s)
    assert verts[-1][0] == pytest.approx(curve.mass_q1)
    assert np.all(verts[:, 1] >= 0.0)


def test_curve_roundtrip(curve, tmp_path):
    write_curve(curve, tmp_path)
    back = load_curve(tmp_path)
    assert back.mass_q1 == curve.mass_q1
    assert back.mass_s == curve.mass_s
    assert back.energy_s == curve.energy_s
    assert back.eps_curve == curve.eps_curve
    assert len(back.samples) == len(curve.samples)
    # the CSV carries 12 significant digits, so roundtrip is close, not exact
    for (m1, e1), (m2, e2) in zip(back.samples, curve.samples):
        assert m1 == pytest.approx(m2, rel=1e-10)
        assert e1 == pytest.approx(e2, rel=1e-10)
    assert len(back.probes) == len(curve.probes)
    for (m1, u1), (m2, u2) in zip(back.probes, curve.probes):
        assert m1 == pytest.approx(m2, rel=1e-10)
        assert u1 == u2
    assert back.restarts_used == curve.restarts_used
    assert (tmp_path / "curve.csv").read_text().splitlines()[0] == \
        "m,script_e,feasible_flag,restarts_used"


def test_curve_validation():
    with pytest.raises(ValueError, match="ordered"):
        ThresholdCurve(mass_q1=2.0, mass_s=1.0, energy_s=1.0,
                       samples=((1.5, 0.5), (1.0, 1.0)), gauge={})
    with pytest.raises(ValueError, match="finite"):
        ThresholdCurve(mass_q1=2.0, mass_s=1.0, energy_s=1.0,
                       samples=((1.0, 1.0), (1.5, math.inf)), gauge={})


def test_chebyshev_masses():
    ms = _chebyshev_masses(1.0, 3.0, 9)
    assert ms[0] == 1.0
    assert ms[-1] == 3.0
    assert np.all(np.diff(ms) > 0)
    # clustering toward both endpoints relative to the middle
    assert ms[1] - ms[0] < ms[5] - ms[4]
    assert ms[-1] - ms[-2] < ms[5] - ms[4]
