import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dnls.acceptance import dipolar_gaussian_oracle
from dnls.fields import gaussian_field, gaussian_moments, smooth_random_field
from dnls.functionals import (
    PLUS_INFINITY,
    boost_energy_shift,
    coercive_energy_floor,
    dilated,
    galilean_boost,
    is_infinite,
    kinetic_control_constant,
    kinetic_control_gap,
    l_functional,
    distance_to_blowup_boundary,
    report,
    scale_polynomials,
    scale_polys,
    weinstein,
    weinstein_exponents,
    weinstein_from_report,
    zero_momentum_boost,
)
from dnls.grid import make_grid, to_spectral
from dnls.kernel import DipoleParams
from dnls.threshold import ThresholdCurve

P0 = DipoleParams(-1.0, 0.0)
PD = DipoleParams(-1.0, 0.5)


def closed_form_gaussian(widths, amplitude):
    """Independent closed forms for a exp(-sum x_i^2/(2 w_i^2)).

    Every power integral reduces to one-dimensional Gaussians:
    int |u|^(2n) = a^(2n) (pi/n)^(3/2) w1 w2 w3.
    """
    w1, w2, w3 = widths
    vol = w1 * w2 * w3
    a2 = amplitude ** 2
    mass = a2 * math.pi ** 1.5 * vol
    grad = mass * 0.5 * (w1 ** -2 + w2 ** -2 + w3 ** -2)
    quart = a2 ** 2 * (math.pi / 2.0) ** 1.5 * vol
    sext = a2 ** 3 * (math.pi / 3.0) ** 1.5 * vol
    return mass, grad, quart, sext


def test_gaussian_moments_match_independent_forms():
    widths, amp = (0.9, 1.3, 2.1), 0.8
    mass, grad, quart, sext = closed_form_gaussian(widths, amp)
    mom = gaussian_moments(widths, amp)
    assert_allclose(mom["mass"], mass, rtol=1e-14)
    assert_allclose(mom["grad_squared"], grad, rtol=1e-14)
    assert_allclose(mom["quartic"], quart, rtol=1e-14)
    assert_allclose(mom["sextic"], sext, rtol=1e-14)


def test_report_against_gaussian_closed_forms():
    g = make_grid(96, 28.0)
    widths, amp = (0.9, 1.3, 2.1), 0.8
    u = gaussian_field(g, widths=widths, amplitude=amp)
    rep = report(u, P0)
    mass, grad, quart, sext = closed_form_gaussian(widths, amp)
    assert_allclose(rep.mass, mass, rtol=1e-12)
    assert_allclose(rep.grad_squared, grad, rtol=1e-12)
    assert_allclose(rep.quartic, quart, rtol=1e-12)
    assert_allclose(rep.sextic, sext, rtol=1e-12)
    assert np.abs(np.asarray(rep.momentum)).max() < 1e-13 * rep.mass


def test_report_assembly_identities():
    g = make_grid(32, 14.0)
    u = smooth_random_field(g, seed=3, corr_length=1.5, envelope_width=2.5)
    for p in (P0, PD, DipoleParams(0.5, -0.3)):
        rep = report(u, p)
        e = (0.5 * rep.grad_squared
             + 0.25 * (p.lam1 * rep.quartic + p.lam2 * rep.dipolar)
             + rep.sextic / 6.0)
        assert_allclose(rep.energy, e, rtol=1e-14)
        assert_allclose(rep.n_value, -p.lam1 * rep.quartic - p.lam2 * rep.dipolar,
                        rtol=1e-14)
        assert_allclose(rep.i_value,
                        rep.grad_squared + rep.sextic - 0.75 * rep.n_value,
                        rtol=1e-13)
        assert_allclose(rep.gamma, rep.sextic / rep.grad_squared, rtol=1e-14)


def test_report_space_tag_invariance():
    g = make_grid(32, 12.0)
    u = smooth_random_field(g, seed=9, corr_length=1.2, envelope_width=2.0)
    a = report(u, PD)
    b = report(to_spectral(u), PD)
    assert_allclose(b.energy, a.energy, rtol=1e-12)
    assert_allclose(b.mass, a.mass, rtol=1e-12)


def test_dilation_matches_scale_polynomials():
    # dilation is realized by a box relabel, so the polynomial laws hold to
    # rounding, not just to quadrature accuracy
    g = make_grid(32, 15.0)
    u = smooth_random_field(g, seed=21, corr_length=1.8, envelope_width=2.4)
    polys = scale_polys(u, PD)
    base = report(u, PD)
    assert_allclose(polys.i_of(1.0), base.i_value, rtol=1e-13)
    assert_allclose(polys.e_of(1.0), base.energy, rtol=1e-13)
    for s in (0.5, 2.0, 1.37):
        rep = report(dilated(u, s), PD)
        assert_allclose(rep.mass, base.mass, rtol=1e-13)
        assert_allclose(rep.i_value, polys.i_of(s), rtol=1e-12)
        assert_allclose(rep.energy, polys.e_of(s), rtol=1e-12)


def test_i_is_scale_derivative_of_energy():
    g = make_grid(32, 14.0)
    u = smooth_random_field(g, seed=4, corr_length=1.5, envelope_width=2.2,
                            complex_valued=True)
    polys = scale_polys(u, PD)
    for s in (0.8, 1.0, 1.6):
        h = 1e-5
        de = (polys.e_of(s + h) - polys.e_of(s - h)) / (2.0 * h)
        assert_allclose(polys.i_of(s), s * de, rtol=1e-6)


def test_dilated_rejects_nonpositive_scale():
    g = make_grid(16, 8.0)
    u = gaussian_field(g)
    with pytest.raises(ValueError):
        dilated(u, 0.0)
    with pytest.raises(ValueError):
        dilated(u, -1.0)


def test_boost_laws_on_lattice_velocity():
    g = make_grid(48, 16.0)
    u = gaussian_field(g, widths=(1.4, 1.1, 1.7), amplitude=0.9)
    base = report(u, PD)
    xi = np.array([0.0, 0.0, 2.0]) * 2.0 * np.pi / g.box_length
    boosted = report(galilean_boost(u, xi), PD)
    # momentum picks up 2 M xi, local terms are phase blind
    assert_allclose(boosted.momentum[2], base.momentum[2] + 2.0 * base.mass * xi[2],
                    rtol=1e-10)
    assert_allclose(boosted.mass, base.mass, rtol=1e-13)
    assert_allclose(boosted.quartic, base.quartic, rtol=1e-13)
    assert_allclose(boosted.sextic, base.sextic, rtol=1e-13)
    assert_allclose(boosted.dipolar, base.dipolar, rtol=1e-11)
    # kinetic term and energy move by the predicted shift
    shift = boost_energy_shift(base, xi)
    assert_allclose(boosted.energy, base.energy + shift, rtol=1e-11)
    assert_allclose(boosted.grad_squared,
                    base.grad_squared + float(xi @ np.asarray(base.momentum))
                    + float(xi @ xi) * base.mass, rtol=1e-11)


def test_boost_with_general_momentum_closed_form():
    # P = 2 M xi for a boosted real profile, so a double boost checks the
    # cross term xi . P in the energy shift
    g = make_grid(48, 16.0)
    xi1 = np.array([2.0 * np.pi / 16.0, 0.0, 0.0])
    u = galilean_boost(gaussian_field(g, widths=(1.3, 1.3, 1.3)), xi1)
    rep = report(u, P0)
    assert_allclose(np.asarray(rep.momentum), 2.0 * rep.mass * xi1,
                    rtol=1e-10, atol=1e-10 * rep.mass)
    xi2 = np.array([2.0 * np.pi / 16.0, 0.0, 2.0 * np.pi / 16.0])
    rep2 = report(galilean_boost(u, xi2), P0)
    assert_allclose(rep2.energy, rep.energy + boost_energy_shift(rep, xi2),
                    rtol=1e-11)


def test_zero_momentum_boost_cancels_momentum():
    g = make_grid(48, 16.0)
    xi = np.array([1.0, -1.0, 2.0]) * 2.0 * np.pi / g.box_length
    u = galilean_boost(gaussian_field(g, widths=(1.2, 1.5, 1.1)), xi)
    rep = report(u, P0)
    v = galilean_boost(u, zero_momentum_boost(rep))
    rep2 = report(v, P0)
    assert np.abs(np.asarray(rep2.momentum)).max() < 1e-10 * rep.mass


def test_weinstein_exponents():
    p, r = weinstein_exponents(1.0)
    assert (p, r) == (1.5, 1.5)
    p, r = weinstein_exponents(2.0)
    assert_allclose([p, r], [1.0, 2.0], rtol=1e-15)
    assert p + r == pytest.approx(3.0)
    with pytest.raises(ValueError):
        weinstein_exponents(0.0)


def test_weinstein_scaling_invariances():
    g = make_grid(32, 14.0)
    u = smooth_random_field(g, seed=13, corr_length=1.6, envelope_width=2.3)
    for alpha in (0.5, 1.0, 2.0):
        w = weinstein(u, PD, alpha)
        assert not is_infinite(w)
        # amplitude invariance needs p + r = 3
        w_amp = weinstein_from_report(
            report(type(u)(1.7 * u.values, u.grid, u.space), PD), alpha)
        assert_allclose(w_amp, w, rtol=1e-11)
        # dilation invariance is exact through the box relabel
        w_dil = weinstein(dilated(u, 1.9), PD, alpha)
        assert_allclose(w_dil, w, rtol=1e-11)


def test_weinstein_gaussian_quadrature_oracle():
    # every factor has a closed form once the dipolar energy comes from the
    # 1D quadrature, giving an endpoint-independent value to compare against
    widths, amp, sigma = (1.0, 1.0, 2.0), 0.9, 2.0
    mass, grad, quart, sext = closed_form_gaussian(widths, amp)
    # same widths as the oracle's reference density, so only the amplitude
    # rescales: d is quadratic in rho, hence quartic in the amplitude
    dip = amp ** 4 * dipolar_gaussian_oracle(sigma)
    lam1, lam2 = PD.lam1, PD.lam2
    n_val = -lam1 * quart - lam2 * dip
    p, r = weinstein_exponents(1.0)
    expected = math.sqrt(mass) * grad ** (p / 2.0) * sext ** (r / 6.0) / n_val
    g = make_grid(96, 40.0)
    u = gaussian_field(g, widths=widths, amplitude=amp)
    w = weinstein(u, PD, 1.0)
    assert_allclose(w, expected, rtol=2e-4)


def test_weinstein_infinite_for_defocusing():
    g = make_grid(32, 12.0)
    u = gaussian_field(g, widths=(1.0, 1.0, 1.0))
    w = weinstein(u, DipoleParams(1.0, 0.0), 1.0)
    assert is_infinite(w)
    with pytest.raises(ValueError):
        weinstein_from_report(report(type(u)(0.0 * u.values, u.grid, u.space),
                                     P0), 1.0)


def test_plus_infinity_ordering():
    assert is_infinite(PLUS_INFINITY)
    assert not is_infinite(1e300)
    assert 5.0 < PLUS_INFINITY
    assert not (PLUS_INFINITY < 5.0)
    assert PLUS_INFINITY == PLUS_INFINITY
    assert PLUS_INFINITY >= PLUS_INFINITY
    assert min(3.0, PLUS_INFINITY) == 3.0
    assert repr(PLUS_INFINITY) == "PLUS_INFINITY"


def test_kinetic_control_constant_values():
    # stable couplings need no mass term at all
    assert kinetic_control_constant(DipoleParams(1.0, 0.0)) == 0.0
    # focusing cubic: beta = -1, C = 3/16
    assert kinetic_control_constant(P0) == pytest.approx(3.0 / 16.0)


def test_kinetic_control_gap_nonnegative():
    rng = np.random.default_rng(40)
    params = [P0, PD, DipoleParams(-1.0, -0.8), DipoleParams(0.0, 0.6)]
    for grid_seed in range(6):
        g = make_grid(32, 14.0)
        u = smooth_random_field(
            g, seed=int(rng.integers(2 ** 31)),
            corr_length=g.box_length * float(rng.uniform(0.06, 0.15)),
            envelope_width=g.box_length * float(rng.uniform(0.1, 0.2)),
            amplitude=float(rng.uniform(0.3, 2.5)),
            complex_valued=bool(rng.integers(2)))
        for p in params:
            rep = report(u, p)
            gap = kinetic_control_gap(rep, p)
            assert gap >= -1e-10 * max(1.0, rep.grad_squared)


def test_coercive_energy_floor():
    g = make_grid(32, 14.0)
    u = smooth_random_field(g, seed=2, corr_length=1.5, envelope_width=2.2)
    rep = report(u, P0)
    assert coercive_energy_floor(rep, rep.mass) == pytest.approx(0.0, abs=1e-12)
    below = coercive_energy_floor(rep, 4.0 * rep.mass)
    assert below == pytest.approx(
        0.5 * (0.5 * rep.grad_squared + rep.sextic / 6.0), rel=1e-12)


def synthetic_curve():
    return ThresholdCurve(
        mass_q1=2.0, mass_s=1.0, energy_s=1.0,
        samples=((1.0, 1.0), (1.5, 0.5), (2.0, 0.0)),
        gauge={})


def test_distance_to_blowup_boundary_geometry():
    curve = synthetic_curve()
    # the boundary through (1,1)-(1.5,.5)-(2,0) is one straight line here,
    # so distances have simple closed forms
    d = distance_to_blowup_boundary(1.0, 0.0, curve)
    assert d == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)
    # above the left endpoint, the vertical ray is the nearest boundary
    d = distance_to_blowup_boundary(0.5, 3.0, curve)
    assert d == pytest.approx(0.5, rel=1e-12)
    # to the right of M(Q1) the horizontal axis ray takes over
    d = distance_to_blowup_boundary(3.0, 0.3, curve)
    assert d == pytest.approx(0.3, rel=1e-12)


def test_l_functional_values_and_blowup():
    curve = synthetic_curve()
    val = l_functional(1.0, 0.0, curve)
    assert val == pytest.approx(0.0 + 1.0 / (1.0 / math.sqrt(2.0)), rel=1e-12)
    assert is_infinite(l_functional(1.5, 0.6, curve))   # on/above the curve
    assert is_infinite(l_functional(1.0, 1.0, curve))   # boundary point
    # grows monotonically on the approach to the boundary
    vals = [l_functional(1.5, e, curve) for e in (0.1, 0.3, 0.45, 0.49)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_l_functional_on_computed_curve(curve):
    inside = l_functional(0.9 * curve.mass_q1, 0.05, curve)
    assert not is_infinite(inside)
    assert inside > 0.0
    top = curve.threshold_at(0.9 * curve.mass_q1)
    assert is_infinite(l_functional(0.9 * curve.mass_q1, top + 0.01, curve))
