"""Acceptance registry: the capability checks behind the verify command.

Each criterion is a named function returning a pass/fail result with the
measured numbers in its detail string.  The same registry backs the
acceptance test module and `dnls verify`, so CI and users run identical
checks.  Heavy objects (ground states, the threshold curve) are built
lazily on a shared context and reused across criteria.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .evolution import EvolutionConfig, default_dt, evolve, step_strang
from .fields import gaussian_field, lattice_velocity, rescale_mass, smooth_random_field
from .functionals import (
    dilated,
    galilean_boost,
    report,
    scale_polynomials,
    weinstein_from_report,
)
from .grid import apply_multiplier, field_from_values, make_grid, spectral_resample
from .ground_state import (
    SolverOptions,
    minimize_weinstein,
    refine_on_doubled_box,
    sharp_constant,
)
from .kernel import DipoleParams, khat_lattice
from .threshold import (
    MASS_RATIO_S_TO_Q1,
    CurveOptions,
    build_curve,
    build_s,
    mass_raise,
    project_to_i_zero,
    script_e,
    in_region_k,
)
from .virial import (
    localized_weight,
    quadratic_weight,
    radius_covering_mass,
    virial_series,
    virial_vpp,
)


@dataclass
class AcceptanceResult:
    criterion: str
    description: str
    passed: bool
    detail: str


PARAMS = DipoleParams(-1.0, 0.0)
PARAMS_DIPOLAR = DipoleParams(-1.0, 0.5)


class Context:
    """Lazy cache of the expensive shared objects."""

    def __init__(self, q1=None, curve=None):
        self._q1 = q1
        self._curve = curve
        self._s = None
        self._alpha_states = {}
        self._big = None
        self._doubled = None

    @property
    def q1(self):
        if self._q1 is None:
            self._q1 = minimize_weinstein(PARAMS, 1.0)
        return self._q1

    @property
    def curve(self):
        if self._curve is None:
            self._curve = build_curve(self.q1, CurveOptions())
        return self._curve

    @property
    def s_construction(self):
        if self._s is None:
            self._s = build_s(self.q1)
        return self._s

    def ground_state(self, alpha: float):
        if alpha == 1.0:
            return self.q1
        if alpha not in self._alpha_states:
            self._alpha_states[alpha] = minimize_weinstein(PARAMS, alpha)
        return self._alpha_states[alpha]

    @property
    def big_box_numbers(self) -> dict:
        """Dipolar quantities on a large fine box, cached as plain numbers.

        One anisotropic Gaussian (widths 1, 1, 2) on a 216-point box of
        side 86.4: its dipolar energy versus the 1D quadrature oracle, and
        the quadratic-weight virial identity with the dipolar term live.
        """
        if self._big is None:
            sigma = 2.0
            g = make_grid(216, 86.4)
            f = gaussian_field(g, widths=(1.0, 1.0, sigma), amplitude=1.0)
            rep = report(f, PARAMS_DIPOLAR)
            vpp = virial_vpp(f, quadratic_weight(g), PARAMS_DIPOLAR)
            self._big = {
                "dipolar": rep.dipolar,
                "quartic": rep.quartic,
                "vpp": vpp,
                "i8": 8.0 * rep.i_value,
                "sigma": sigma,
            }
        return self._big

    @property
    def doubled_box(self):
        if self._doubled is None:
            self._doubled = refine_on_doubled_box(self.q1)
        return self._doubled


def dipolar_gaussian_oracle(sigma: float) -> float:
    """1D quadrature for the dipolar energy of exp(-(x^2+y^2)/2 - z^2/(2 sigma^2)).

    In Fourier variables the density transform is Gaussian and the angular
    structure of the kernel symbol reduces the 3D integral to a Legendre-
    type 1D integral in t = cos(theta):

        d = (2 pi)^-3 * 2 pi * (4 pi/3) * pi^3 sigma^2
            * int_{-1}^{1} (3 t^2 - 1) sqrt(pi) / (4 a(t)^{3/2}) dt,
        a(t) = (1 + (sigma^2 - 1) t^2) / 2.

    Derivation is independent of the grid code: no FFTs, no lattices.
    """
    pref = (2.0 * math.pi) ** -3 * 2.0 * math.pi * (4.0 * math.pi / 3.0) \
        * math.pi ** 3 * sigma ** 2

    def integrand(t: float) -> float:
        a = 0.5 * (1.0 + (sigma * sigma - 1.0) * t * t)
        return (3.0 * t * t - 1.0) * math.sqrt(math.pi) / (4.0 * a ** 1.5)

    val, err = quad(integrand, -1.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    return pref * val


# frozen once from the quadrature above at sigma = 2; guards the oracle itself
_ORACLE_SIGMA2 = -7.905204422945


# ---------------------------------------------------------------------------
# criteria


def _crit_kernel_symbol_range(ctx: Context) -> tuple[bool, str]:
    kh = khat_lattice(64)
    hi = float(kh.max())
    lo = float(kh.min())
    gap_hi = abs(hi - 8.0 * math.pi / 3.0)
    gap_lo = abs(lo + 4.0 * math.pi / 3.0)
    ok = gap_hi < 1e-12 and gap_lo < 1e-12
    return ok, f"max gap {gap_hi:.2e}, min gap {gap_lo:.2e} (tol 1e-12)"


def _crit_radial_null(ctx: Context) -> tuple[bool, str]:
    g = make_grid(64, 16.0)
    f = gaussian_field(g, widths=(1.3, 1.3, 1.3), amplitude=1.1)
    rep = report(f, PARAMS_DIPOLAR)
    ratio = abs(rep.dipolar) / rep.quartic
    return ratio < 1e-10, f"|dipolar|/quartic = {ratio:.2e} (tol 1e-10)"


def _crit_dipolar_oracle(ctx: Context) -> tuple[bool, str]:
    big = ctx.big_box_numbers
    oracle = dipolar_gaussian_oracle(big["sigma"])
    rel = abs(big["dipolar"] - oracle) / abs(oracle)
    frozen = abs(oracle - _ORACLE_SIGMA2) / abs(_ORACLE_SIGMA2)
    ok = rel < 1e-6 and frozen < 1e-9
    return ok, (f"grid vs quadrature rel {rel:.2e} (tol 1e-6); "
                f"oracle vs frozen {frozen:.2e}")


def _crit_ground_state_q1(ctx: Context) -> tuple[bool, str]:
    gs = ctx.q1
    rep = gs.report
    r1, r2 = gs.pohozaev_residuals
    e_ratio = abs(rep.energy) / rep.grad_squared
    n_ratio = abs(rep.n_value / rep.grad_squared - 8.0 / 3.0)
    omega_alt = rep.n_value / (4.0 * rep.mass)
    omega_gap = abs(gs.omega - omega_alt) / gs.omega
    ok = (r1 < 1e-5 and r2 < 1e-5 and e_ratio < 1e-4
          and n_ratio < 1e-4 and gs.elliptic_residual < 1e-4
          and omega_gap < 1e-4)
    return ok, (f"pohozaev ({r1:.1e}, {r2:.1e}); |E|/G {e_ratio:.1e}; "
                f"|N/G-8/3| {n_ratio:.1e}; elliptic {gs.elliptic_residual:.1e}; "
                f"omega gap {omega_gap:.1e}")


def _crit_sharp_constant(ctx: Context) -> tuple[bool, str]:
    gaps = []
    for alpha in (0.5, 1.0, 2.0):
        gs = ctx.ground_state(alpha)
        w = weinstein_from_report(gs.report, alpha)
        gaps.append(abs(gs.c_alpha * float(w) - 1.0))
    s_rep = ctx.s_construction.exact_report
    c1_from_s = (16.0 / 9.0) * 3.0 ** 0.25 / math.sqrt(s_rep.mass)
    c1_gap = abs(ctx.q1.c_alpha - c1_from_s) / c1_from_s
    ok = all(g < 1e-6 for g in gaps) and c1_gap < 1e-5
    return ok, (f"|C.W-1| = {gaps[0]:.1e}/{gaps[1]:.1e}/{gaps[2]:.1e} "
                f"at alpha 1/2,1,2 (tol 1e-6); C1 vs S-norm form {c1_gap:.1e}")


def _crit_s_anchors(ctx: Context) -> tuple[bool, str]:
    sc = ctx.s_construction
    q_rep = ctx.q1.report
    ratio_gap = abs(sc.exact_report.mass / q_rep.mass - MASS_RATIO_S_TO_Q1)
    ex, rs = sc.exact_report, sc.resampled_report
    gam_ex = abs(ex.gamma - 1.0 / 3.0)
    gam_rs = abs(rs.gamma - 1.0 / 3.0)
    i_ex = abs(ex.i_value) / ex.grad_squared
    i_rs = abs(rs.i_value) / rs.grad_squared
    ok = (ratio_gap < 1e-12 and gam_ex < 1e-6 and i_ex < 1e-6
          and gam_rs < 1e-3 and i_rs < 1e-3)
    return ok, (f"mass ratio gap {ratio_gap:.1e}; Gamma gap {gam_ex:.1e}"
                f"/{gam_rs:.1e} (exact/resampled); I/G {i_ex:.1e}/{i_rs:.1e}")


def _crit_threshold_curve(ctx: Context) -> tuple[bool, str]:
    curve = ctx.curve
    eps = curve.eps_curve * curve.energy_s
    es = [e for _, e in curve.samples]
    end_ok = abs(es[-1]) <= eps
    mono_ok = all(es[i + 1] < es[i] + eps for i in range(len(es) - 1))

    # infeasibility assertions at half the S mass
    g = make_grid(48, ctx.q1.grid.box_length * 2.0 / math.sqrt(3.0))
    rng = np.random.default_rng(20)
    m_half = 0.5 * curve.mass_s
    n_positive = 0
    n_infeasible = 0
    trials = 100
    for _ in range(trials):
        f = smooth_random_field(
            g, seed=int(rng.integers(2 ** 31)),
            corr_length=g.box_length * float(rng.uniform(0.04, 0.14)),
            envelope_width=g.box_length * float(rng.uniform(0.08, 0.2)),
            complex_valued=bool(rng.integers(2)))
        f = rescale_mass(f, m_half)
        rep = report(f, PARAMS)
        if rep.i_value > -1e-8 * rep.grad_squared:
            n_positive += 1
        if not project_to_i_zero(f, PARAMS).feasible:
            n_infeasible += 1
    inf_ok = n_positive == trials and n_infeasible == trials

    # d(m) strictly negative above the critical mass
    from .threshold import d_of_m
    q48 = spectral_resample(ctx.q1.field.values.real, 48)
    warm = field_from_values(q48, make_grid(48, ctx.q1.grid.box_length))
    d_big = d_of_m(1.2 * curve.mass_q1, PARAMS, warm_start=warm)
    d_ok = d_big < -eps

    ok = end_ok and mono_ok and inf_ok and d_ok
    return ok, (f"curve end {es[-1]:+.2e} (eps {eps:.2e}); monotone {mono_ok}; "
                f"I>0 trials {n_positive}/{trials}, infeasible {n_infeasible}/{trials}; "
                f"d(1.2 MQ1) = {d_big:+.3f}")


def _crit_scaling_algebra(ctx: Context) -> tuple[bool, str]:
    g = make_grid(32, 14.0)
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        f = smooth_random_field(
            g, seed=int(rng.integers(2 ** 31)),
            corr_length=g.box_length * float(rng.uniform(0.05, 0.12)),
            envelope_width=g.box_length * float(rng.uniform(0.1, 0.2)),
            amplitude=float(rng.uniform(0.5, 1.6)),
            complex_valued=bool(rng.integers(2)))
        polys = scale_polynomials(report(f, PARAMS_DIPOLAR))
        for s in (1.0, float(rng.uniform(0.6, 1.7))):
            h = 1e-5 * s
            de = (polys.e_of(s + h) - polys.e_of(s - h)) / (2.0 * h)
            gap = abs(polys.i_of(s) - s * de) / max(1.0, abs(polys.i_of(s)))
            worst = max(worst, gap)
    fd_ok = worst < 1e-6

    # Lemma-5.4-style raise from S: exact mass and I, energy drop bounded
    sc = ctx.s_construction
    s_rep = sc.exact_report
    eps = ctx.curve.eps_curve * ctx.curve.energy_s
    raise_ok = True
    drop_ok = True
    worst_mass = worst_i = 0.0
    for factor in (1.02, 1.12, 1.25):
        target = factor * s_rep.mass
        v, info = mass_raise(sc.exact_field, PARAMS, target)
        v_rep = report(v, PARAMS)
        worst_mass = max(worst_mass, abs(v_rep.mass - target) / target)
        worst_i = max(worst_i, abs(v_rep.i_value) / v_rep.grad_squared)
        if worst_mass > 1e-10 or worst_i > 1e-5:
            raise_ok = False
        bound = s_rep.energy - info.energy_drop_bound + eps
        if v_rep.energy > bound:
            drop_ok = False
    ok = fd_ok and raise_ok and drop_ok
    return ok, (f"I vs s dE/ds worst gap {worst:.1e} (tol 1e-6); "
                f"raise mass gap {worst_mass:.1e}, I/G {worst_i:.1e}; "
                f"energy-drop bound held: {drop_ok}")


def _crit_evolution(ctx: Context) -> tuple[bool, str]:
    p = PARAMS_DIPOLAR
    g = make_grid(64, 16.0)
    f = gaussian_field(g, widths=(1.4, 1.2, 1.6), amplitude=0.9)
    dt = default_dt(g)

    cfg = EvolutionConfig(dt=dt, t_final=1000 * dt, output_stride=200)
    traj = evolve(f, cfg, p)
    mass_ok = traj.mass_drift < 1e-11

    g2 = make_grid(48, 16.0)
    f2 = gaussian_field(g2, widths=(1.4, 1.2, 1.6), amplitude=0.9)
    dt2 = default_dt(g2)
    t_span = 128 * dt2
    drift_coarse = evolve(f2, EvolutionConfig(dt=dt2, t_final=t_span,
                                              output_stride=8), p).energy_drift
    drift_fine = evolve(f2, EvolutionConfig(dt=dt2 / 2.0, t_final=t_span,
                                            output_stride=16), p).energy_drift
    ratio = drift_coarse / drift_fine if drift_fine > 0 else math.inf
    ratio_ok = 3.5 <= ratio <= 4.5

    u = f2
    for _ in range(200):
        u = step_strang(u, dt2, p)
    for _ in range(200):
        u = step_strang(u, -dt2, p)
    rev = (np.linalg.norm(u.values - f2.values)
           / np.linalg.norm(f2.values))
    rev_ok = rev < 1e-6

    # Galilean covariance on a lattice-commensurate boost
    g3 = make_grid(48, 16.0)
    base = gaussian_field(g3, widths=(1.5, 1.5, 1.5), amplitude=0.8)
    xi = lattice_velocity(g3, (0, 0, 2))
    t_cov = 64 * default_dt(g3)
    cfg_cov = EvolutionConfig(dt=default_dt(g3), t_final=t_cov, output_stride=64)
    plain = evolve(base, cfg_cov, p).final_field
    boosted = evolve(galilean_boost(base, xi), cfg_cov, p).final_field
    shift = 2.0 * xi * t_cov
    translated = apply_multiplier(
        plain, lambda k1, k2, k3: np.exp(-1j * (k1 * shift[0] + k2 * shift[1]
                                                + k3 * shift[2])))
    x = g3.axis_coordinates()
    phase = np.exp(1j * (xi[2] * x))[None, None, :] \
        * np.exp(-1j * float(xi @ xi) * t_cov)
    predicted = translated.values * phase
    cov = (np.linalg.norm(boosted.values - predicted)
           / np.linalg.norm(predicted))
    cov_ok = cov < 1e-5

    ok = mass_ok and ratio_ok and rev_ok and cov_ok
    return ok, (f"mass drift {traj.mass_drift:.1e} (tol 1e-11); halving ratio "
                f"{ratio:.2f}; reversal {rev:.1e}; covariance {cov:.1e}")


def _crit_virial(ctx: Context) -> tuple[bool, str]:
    # static quadratic identity, dipolar term live, on the fine big box
    big = ctx.big_box_numbers
    static_gap = abs(big["vpp"] - big["i8"]) / abs(big["i8"])
    static_ok = static_gap < 1e-6

    # a compact field with lam2 = 0 checks the reduction at machine level
    g = make_grid(64, 18.0)
    f = gaussian_field(g, widths=(1.2, 1.0, 1.4), amplitude=1.0)
    rep = report(f, PARAMS)
    gap0 = abs(virial_vpp(f, quadratic_weight(g), PARAMS) - 8.0 * rep.i_value) \
        / abs(8.0 * rep.i_value)
    static0_ok = gap0 < 1e-6

    # trajectory: direct formula vs finite differences of V
    p = PARAMS_DIPOLAR
    g2 = make_grid(48, 16.0)
    u0 = gaussian_field(g2, widths=(1.5, 1.3, 1.7), amplitude=0.8)
    dt = default_dt(g2)
    cfg = EvolutionConfig(dt=dt, t_final=96 * dt, output_stride=4)
    series = virial_series(u0, cfg, p, quadratic_weight(g2))
    worst_fd = 0.0
    for i in range(1, len(series.times) - 1):
        scale = max(abs(series.vpp_direct[i]), 1e-12)
        worst_fd = max(worst_fd, abs(series.vpp_fd[i] - series.vpp_direct[i]) / scale)
    dt_out = 4 * dt
    fd_tol = max(1e-3, 50.0 * dt_out ** 2)
    fd_ok = worst_fd < fd_tol

    # localized weight against 8I on region-K data
    rng = np.random.default_rng(31)
    loc_ok = True
    worst_loc = 0.0
    accepted = 0
    for _ in range(40):
        if accepted == 3:
            break
        f = smooth_random_field(
            g2, seed=int(rng.integers(2 ** 31)),
            corr_length=g2.box_length * 0.09,
            envelope_width=g2.box_length * 0.12,
            complex_valued=True)
        f = rescale_mass(f, float(rng.uniform(0.2, 0.4)) * ctx.curve.mass_s)
        rep = report(f, p)
        if not in_region_k(rep.mass, rep.energy, ctx.curve) or rep.i_value <= 0:
            continue
        accepted += 1
        radius = radius_covering_mass(f, 0.99999)
        w = localized_weight(g2, radius)
        vpp = virial_vpp(f, w, p)
        floor = 8.0 * rep.i_value - 0.05 * abs(8.0 * rep.i_value)
        worst_loc = max(worst_loc, (floor - vpp) / abs(8.0 * rep.i_value))
        if vpp < floor:
            loc_ok = False
    loc_ok = loc_ok and accepted == 3

    ok = static_ok and static0_ok and fd_ok and loc_ok
    return ok, (f"static quad gap {static_gap:.1e} (dipolar box) / {gap0:.1e} "
                f"(cubic); fd worst {worst_fd:.1e} (tol {fd_tol:.1e}); "
                f"localized floor slack {-worst_loc:.1e}")


def _crit_i_positivity(ctx: Context) -> tuple[bool, str]:
    p = PARAMS_DIPOLAR
    g = make_grid(48, 18.0)
    dt = default_dt(g)
    cfg = EvolutionConfig(dt=dt, t_final=1.0, output_stride=10)
    rng = np.random.default_rng(77)
    checked = 0
    worst = math.inf
    for _ in range(200):
        if checked == 10:
            break
        widths = tuple(float(rng.uniform(1.0, 1.8)) for _ in range(3))
        f = gaussian_field(g, widths=widths, amplitude=1.0,
                           boost=tuple(lattice_velocity(g, (int(rng.integers(-1, 2)), 0,
                                                            int(rng.integers(-1, 2))))))
        # Mass range is absolute, tied to the evolution grid rather than the
        # ground-state gauge.  Heavy enough that the attractive cubic bites
        # (the worst draws lose tens of percent of I transiently), light
        # enough that I(0) is gradient-dominated.  A sextic-dominated packet
        # would sink I/I(0) toward 2E/I(0) ~ 1/3 as the sextic radiates away,
        # which no resolution can cure; the relative floor presumes data whose
        # I(0) is carried by the part that persists.
        f = rescale_mass(f, float(rng.uniform(6.0, 18.0)))
        rep = report(f, p)
        if not in_region_k(rep.mass, rep.energy, ctx.curve) or rep.i_value <= 0:
            continue
        checked += 1
        traj = evolve(f, cfg, p)
        sl = traj.trusted_slice()
        i_vals = [r.i_value for r in traj.rows[sl]]
        i0 = i_vals[0]
        floor = min(i_vals) / i0 if i0 > 0 else -math.inf
        worst = min(worst, floor)
    ok = checked == 10 and worst >= 0.5
    return ok, (f"min_t I/I(0) over {checked} region-K runs = {worst:.3f} "
                f"(floor 0.5)")


def _crit_box_robustness(ctx: Context) -> tuple[bool, str]:
    gs = ctx.q1
    gs2 = ctx.doubled_box
    m_change = abs(gs2.report.mass - gs.report.mass) / gs.report.mass
    c1 = sharp_constant(gs.report, 1.0)
    c1_2 = sharp_constant(gs2.report, 1.0)
    c_change = abs(c1_2 - c1) / c1

    # Curve left-endpoint value recomputed on the doubled box, under the
    # same endpoint rule build_curve uses: the descent value from the
    # embedded-S warm start, floored by the exact construction value of
    # that box's own ground state.
    sc = ctx.s_construction
    base = ctx.curve.samples[0][1]
    s48 = spectral_resample(sc.exact_field.values.real, 48)
    from .grid import embed_padded
    s96 = embed_padded(s48, 96)
    box_s = sc.exact_field.grid.box_length
    warm = field_from_values(s96, make_grid(96, 2.0 * box_s))
    res = script_e(ctx.curve.mass_s, PARAMS,
                   CurveOptions(iters=140), warm_starts=[warm], restarts=1)
    e_num = float(res.value) if res.feasible else math.inf
    e_s_doubled = gs2.report.grad_squared / (9.0 * math.sqrt(3.0))
    e2 = min(e_num, e_s_doubled)
    e_change = abs(e2 - base) / abs(base)

    ok = m_change < 5e-3 and c_change < 5e-3 and e_change < 5e-3
    return ok, (f"M(Q1) change {m_change:.2e}; C1 change {c_change:.2e}; "
                f"curve endpoint change {e_change:.2e} (tol 5e-3)")


CRITERIA: list[tuple[str, str, Callable]] = [
    ("kernel-symbol-range",
     "dipole symbol attains 8pi/3 and -4pi/3 on the 64-point lattice",
     _crit_kernel_symbol_range),
    ("radial-null-dipolar",
     "isotropic Gaussian has vanishing dipolar energy",
     _crit_radial_null),
    ("anisotropic-dipolar-oracle",
     "grid dipolar energy matches the 1D quadrature oracle",
     _crit_dipolar_oracle),
    ("ground-state-q1",
     "Pohozaev, energy, N/G, elliptic residual, omega consistency",
     _crit_ground_state_q1),
    ("sharp-constant",
     "C_alpha * W(Q_alpha) = 1 and the S-norm form of C_1",
     _crit_sharp_constant),
    ("s-anchors",
     "mass ratio, Gamma and I of S on both construction routes",
     _crit_s_anchors),
    ("threshold-curve",
     "curve endpoint, monotonicity, infeasibility below M(S), d above M(Q1)",
     _crit_threshold_curve),
    ("scaling-algebra",
     "I = s dE/ds along the dilation ray; mass-raise identities",
     _crit_scaling_algebra),
    ("evolution-conservation",
     "mass drift, dt-halving energy ratio, reversal, Galilean covariance",
     _crit_evolution),
    ("virial-identities",
     "quadratic V''=8I, trajectory fd cross-check, localized floor",
     _crit_virial),
    ("i-positivity",
     "I stays above half its initial value on region-K runs",
     _crit_i_positivity),
    ("box-robustness",
     "M(Q1), C1 and script-E(M(S)) stable under box doubling",
     _crit_box_robustness),
]


def run_criterion(name: str, ctx: Context) -> AcceptanceResult:
    for cid, desc, fn in CRITERIA:
        if cid == name:
            passed, detail = fn(ctx)
            return AcceptanceResult(cid, desc, passed, detail)
    raise KeyError(f"unknown acceptance criterion {name!r}")


def format_line(r: AcceptanceResult) -> str:
    tag = "PASS" if r.passed else "FAIL"
    return f"[{tag}] {r.criterion}: {r.detail}"


def run_acceptance(printer=None, ctx: Optional[Context] = None,
                   names: Optional[list[str]] = None) -> list[AcceptanceResult]:
    ctx = ctx or Context()
    known = {cid for cid, _, _ in CRITERIA}
    if names:
        unknown = [n for n in names if n not in known]
        if unknown:
            raise KeyError("unknown acceptance criteria: " + ", ".join(unknown))
    results = []
    for cid, desc, fn in CRITERIA:
        if names and cid not in names:
            continue
        passed, detail = fn(ctx)
        r = AcceptanceResult(cid, desc, passed, detail)
        results.append(r)
        if printer is not None:
            printer(format_line(r))
    return results
