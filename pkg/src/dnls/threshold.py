"""Mass/energy-plane objects: S, the minimal-energy curve, and the region below it.

Everything here lives on top of the mass-preserving dilation algebra
``u^s = s^{3/2} u(s x)``: the I functional restricted to that ray is the
quartic ``s^2 (a + b s + c s^4)``, so projecting a field onto the I = 0
manifold is a one-dimensional root solve, and the curve minimization is
plain energy descent composed with that projection.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.ndimage import map_coordinates
from scipy.optimize import brentq

from .fields import smooth_random_field
from .functionals import (
    PLUS_INFINITY,
    FunctionalReport,
    dilated,
    report,
    scale_polys,
)
from .grid import Field3D, GridSpec, field_from_values, make_grid, spectral_resample
from .ground_state import GroundState, _scal
from .kernel import DipoleParams

MASS_RATIO_S_TO_Q1 = 4.0 / (3.0 * math.sqrt(3.0))


def _energy_of(grad2: float, quart: float, sext: float, dip: float,
               p: DipoleParams) -> float:
    return 0.5 * grad2 + 0.25 * (p.lam1 * quart + p.lam2 * dip) + sext / 6.0


# ---------------------------------------------------------------------------
# projection onto the I = 0 manifold along the mass-preserving dilation ray


class ProjectionResult(NamedTuple):
    feasible: bool
    s_star: Optional[float]
    field: Optional[Field3D]
    report: Optional[FunctionalReport]


def _project_scale(a: float, b: float, c: float) -> Optional[float]:
    """Largest positive root of a + b s + c s^4, or None when there is none.

    a, b, c are the dilation-ray coefficients (a = grad^2 >= 0, c = sextic
    >= 0, b = -(3/4) N).  A root exists only for b < 0, i.e. N > 0.  The
    larger of the two roots is the energy-favorable crossing; when the ray
    is tangent (double root) that point itself is returned.
    """
    if a == 0.0 and b == 0.0 and c == 0.0:
        return 1.0
    if b >= 0.0:
        return None
    if c == 0.0:
        return a / (-b)
    s_min = (-b / (4.0 * c)) ** (1.0 / 3.0)
    g = lambda s: a + b * s + c * s ** 4
    gm = g(s_min)
    scale = a + abs(b) * s_min + c * s_min ** 4
    if gm > 1e-9 * scale:
        return None
    if gm > 0.0:
        return s_min  # numerically tangent
    hi = s_min
    for _ in range(200):
        hi *= 1.6
        if g(hi) > 0.0:
            break
    return brentq(g, s_min, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def project_to_i_zero(u: Field3D, p: DipoleParams) -> ProjectionResult:
    """Dilate u along the mass-preserving ray until I vanishes.

    Picks the largest root s* of I(u^s) = 0.  That choice reduces to the
    identity exactly when I(u) = 0 and Gamma(u) >= 1/3, and lands on the
    branch with Gamma(u^{s*}) >= 1/3 otherwise.  Returns an infeasible
    marker when the ray never crosses I = 0 (N <= 0, or the attractive
    part is too weak).
    """
    polys = scale_polys(u, p)
    s = _project_scale(polys.a, polys.b, polys.c)
    if s is None:
        return ProjectionResult(False, None, None, None)
    if s == 1.0:
        return ProjectionResult(True, 1.0, u, report(u, p))
    v = dilated(u, s)
    return ProjectionResult(True, s, v, report(v, p))


def _project_values(vals: np.ndarray, box: float, p: DipoleParams):
    """Hot-loop projection: returns (values, box, scal tuple) or None."""
    mass, grad2, quart, sext, dip, n_val, phi = _scal(vals, box, p)
    s = _project_scale(grad2, -0.75 * n_val, sext)
    if s is None:
        return None
    if s != 1.0:
        vals = s ** 1.5 * vals
        box = box / s
        mass, grad2, quart, sext, dip, n_val, phi = _scal(vals, box, p)
    return vals, box, (mass, grad2, quart, sext, dip, n_val)


# ---------------------------------------------------------------------------
# S and the Lemma-5.4-style mass raise


class SConstruction(NamedTuple):
    exact_field: Field3D
    resampled_field: Field3D
    exact_report: FunctionalReport
    resampled_report: FunctionalReport


def build_s(q1: GroundState) -> SConstruction:
    """Construct S = (1/sqrt 2) Q1((sqrt 3 / 2) x) from an alpha = 1 state.

    Two routes.  The exact one is a pure relabeling: the same samples
    divided by sqrt 2 live on the box stretched by 2/sqrt 3, so every
    functional of S follows from Q1's by closed-form scaling factors.  The
    resampled route re-evaluates the dilated profile on Q1's own grid with
    a quintic spline, which is what a downstream consumer on a fixed box
    would see.
    """
    if abs(q1.alpha - 1.0) > 1e-12:
        raise ValueError("build_s requires the alpha = 1 ground state")
    g = q1.grid
    exact_grid = make_grid(g.n_points_per_axis, g.box_length * 2.0 / math.sqrt(3.0))
    exact = field_from_values(q1.field.values / math.sqrt(2.0), exact_grid)

    # resample: S(x) = Q1(sqrt(3)/2 x) / sqrt(2) on the original grid
    n = g.n_points_per_axis
    x = g.axis_coordinates()
    src = (math.sqrt(3.0) / 2.0 * x + 0.5 * g.box_length) / g.spacing
    idx = np.meshgrid(src, src, src, indexing="ij")
    vals = map_coordinates(q1.field.values.real, idx, order=5, mode="grid-wrap")
    resampled = field_from_values(vals / math.sqrt(2.0), g)

    return SConstruction(
        exact_field=exact,
        resampled_field=resampled,
        exact_report=report(exact, q1.params),
        resampled_report=report(resampled, q1.params),
    )


class MassRaiseInfo(NamedTuple):
    tau: float
    sigma: float
    mass_target: float
    energy_after: float
    energy_drop_bound: float


def mass_raise(u: Field3D, p: DipoleParams, m_prime: float) -> tuple[Field3D, MassRaiseInfo]:
    """Raise the mass of an I = 0 state to m' > m while keeping I = 0.

    The construction is v = sqrt(tau sigma) u(sigma x) with (tau, sigma)
    solved from M(v) = m' and I(v) = 0.  With gamma = sextic/grad^2 the
    pair is sigma = tau (1 + gamma) / (1 + tau^2 gamma) and tau the root of
    (1 + tau^2 gamma)^2 / (tau (1 + gamma)^2) * m = m'.  For gamma = 1/3
    this is exactly the classical table: sigma = 4 tau / (3 + tau^2),
    m' = (3 + tau^2)^2 m / (16 tau).  Returns the new field together with
    the guaranteed energy drop bound ((m' - m) / (6 m)) * grad^2.
    """
    rep = report(u, p)
    m, grad2, sext = rep.mass, rep.grad_squared, rep.sextic
    if grad2 <= 0.0:
        raise ValueError("mass_raise needs a nonzero field")
    if abs(rep.i_value) > 1e-4 * grad2:
        raise ValueError("mass_raise needs an I = 0 state "
                         f"(got I/grad^2 = {rep.i_value / grad2:.2e})")
    gam = sext / grad2
    if gam < 1.0 / 3.0 - 1e-9:
        raise ValueError("mass_raise needs gamma >= 1/3")
    if m_prime < m:
        raise ValueError("mass_raise only raises mass")

    def mass_of(t: float) -> float:
        return (1.0 + t * t * gam) ** 2 / (t * (1.0 + gam) ** 2) * m

    t_hi = 2.0
    for _ in range(200):
        if mass_of(t_hi) >= m_prime:
            break
        t_hi *= 2.0
    tau = brentq(lambda t: mass_of(t) - m_prime, 1.0, t_hi, xtol=1e-14)
    sigma = tau * (1.0 + gam) / (1.0 + tau * tau * gam)

    amp = math.sqrt(tau * sigma)
    new_grid = make_grid(u.grid.n_points_per_axis, u.grid.box_length / sigma)
    v = field_from_values(amp * u.values, new_grid)
    e_after = (tau * grad2 / 2.0 - tau * tau * rep.n_value / (4.0 * sigma)
               + tau ** 3 * sext / 6.0)
    drop = (m_prime - m) / (6.0 * m) * grad2
    return v, MassRaiseInfo(tau, sigma, m_prime, e_after, drop)


# ---------------------------------------------------------------------------
# energy descent on the I = 0 manifold at fixed mass


@dataclass(frozen=True)
class CurveOptions:
    n_grid: int = 48
    n_nodes: int = 17
    restarts_per_node: int = 3
    standalone_restarts: int = 8
    iters: int = 320
    random_iters: int = 260
    descent_tol: float = 1e-9
    eps_rel: float = 0.02
    seed: int = 1
    probe_fractions: tuple[float, ...] = (0.5, 0.75)


class ScriptEResult(NamedTuple):
    value: object            # float or PLUS_INFINITY
    feasible: bool
    restarts_used: int
    best_field: Optional[Field3D]


def _descend_constrained(vals: np.ndarray, box: float, m: float,
                         p: DipoleParams, iters: int, tol: float):
    """Minimize E at fixed mass, re-projecting onto I = 0 every step.

    Returns (values, box, energy) or None when the start is infeasible.
    Preconditioned steepest descent with Barzilai-Borwein steps and
    monotone backtracking, the same scheme the ground-state descent uses.
    """
    n = vals.shape[0]
    mass = np.sum(vals * vals) * (box / n) ** 3
    vals = math.sqrt(m / mass) * vals
    proj = _project_values(vals, box, p)
    if proj is None:
        return None
    vals, box, st = proj

    from .ground_state import _m2  # unit-lattice |k|^2 cache

    m2 = _m2(n)
    tau = 0.3
    prev_v = prev_df = None
    e_hist: list[float] = []
    energy = _energy_of(st[1], st[2], st[3], st[4], p)
    for it in range(iters):
        mass, grad2, quart, sext, dip, n_val, phi = _scal(vals, box, p)
        energy = _energy_of(grad2, quart, sext, dip, p)
        k2 = (2.0 * math.pi / box) ** 2 * m2
        lap = np.fft.ifftn(k2 * np.fft.fftn(vals)).real
        grad = lap + p.lam1 * vals ** 3 + vals ** 5
        if p.lam2 != 0.0:
            grad += p.lam2 * phi * vals
        df = np.fft.ifftn(np.fft.fftn(grad) / (1.0 + k2)).real
        if prev_df is not None:
            dg = df - prev_df
            num = np.sum((vals - prev_v) * dg)
            den = np.sum(dg * dg)
            tau = min(num / den, 4.0) if (den > 0 and num > 0) else 0.3
        ok = False
        for _ in range(30):
            trial = vals - tau * df
            tm = np.sum(trial * trial) * (box / n) ** 3
            trial *= math.sqrt(m / tm)
            proj = _project_values(trial, box, p)
            if proj is not None:
                tv, tb, st2 = proj
                e2 = _energy_of(st2[1], st2[2], st2[3], st2[4], p)
                if np.isfinite(e2) and e2 < energy - 1e-14:
                    ok = True
                    break
            tau *= 0.5
        if not ok:
            break
        prev_v, prev_df = vals, df
        vals, box = tv, tb
        e_hist.append(e2)
        energy = e2
        if len(e_hist) > 20 and (e_hist[-21] - e_hist[-1]) < tol * max(1.0, abs(e_hist[-1])):
            break
    return vals, box, energy


def script_e(m: float, p: DipoleParams, opts: Optional[CurveOptions] = None,
             warm_starts: Sequence[Field3D] = (),
             grid: Optional[GridSpec] = None,
             restarts: Optional[int] = None) -> ScriptEResult:
    """Minimal energy over the I = 0 manifold at mass m, or +infinity.

    Runs energy descent from each warm start plus random smooth fields
    renormalized to mass m.  A restart whose projection onto I = 0 fails
    contributes nothing; when every restart fails the mass level is
    declared infeasible, which is the expected outcome below the S mass.
    """
    if m <= 0.0:
        raise ValueError("script_e needs m > 0")
    opts = opts or CurveOptions()
    g = grid or make_grid(opts.n_grid, 21.0)
    n_restarts = restarts if restarts is not None else opts.standalone_restarts
    rng = np.random.default_rng(opts.seed + int(1e6 * (m % 997)))

    best_e = None
    best_vals = best_box = None
    used = 0
    starts: list[tuple[np.ndarray, float, int]] = []
    for w in warm_starts:
        starts.append((w.values.real.copy(), w.grid.box_length, opts.iters))
    while len(starts) < n_restarts:
        corr = g.box_length * float(rng.uniform(0.05, 0.14))
        env = g.box_length * float(rng.uniform(0.10, 0.18))
        f = smooth_random_field(g, seed=int(rng.integers(2 ** 31)),
                                corr_length=corr, envelope_width=env)
        starts.append((f.values.real.copy(), g.box_length, opts.random_iters))

    for vals, box, iters in starts[:max(n_restarts, len(warm_starts))]:
        used += 1
        out = _descend_constrained(vals, box, m, p, iters, opts.descent_tol)
        if out is None:
            continue
        v, b, e = out
        if best_e is None or e < best_e:
            best_e, best_vals, best_box = e, v, b
    if best_e is None:
        return ScriptEResult(PLUS_INFINITY, False, used, None)
    fld = field_from_values(best_vals, make_grid(best_vals.shape[0], best_box))
    return ScriptEResult(best_e, True, used, fld)


def d_of_m(m: float, p: DipoleParams, opts: Optional[CurveOptions] = None,
           warm_start: Optional[Field3D] = None,
           grid: Optional[GridSpec] = None, iters: int = 150) -> float:
    """Unconstrained energy infimum at fixed mass (a sanity probe, not a curve).

    Plain descent at fixed mass, with two extra candidate values folded in
    at every iterate: the energy at the I = 0 crossings of the dilation
    ray, and the small-s tail of that ray, which approaches 0 from above
    for any field.  Above the critical mass the descent digs strictly
    below 0.  Below it the continuum infimum is 0, but a long enough
    unconstrained descent on a fixed grid can still go negative by piling
    mass onto a few cells, where the discrete sextic outruns the
    band-limited gradient; treat small-mass results as resolution-limited.
    """
    if m == 0.0:
        return 0.0
    if m < 0.0:
        raise ValueError("d_of_m needs m >= 0")
    opts = opts or CurveOptions()
    g = grid or make_grid(opts.n_grid, 21.0)
    if warm_start is not None:
        vals = warm_start.values.real.copy()
        box = warm_start.grid.box_length
        n = vals.shape[0]
    else:
        f = smooth_random_field(g, seed=opts.seed, corr_length=g.box_length / 9,
                                envelope_width=g.box_length / 7)
        vals, box, n = f.values.real.copy(), g.box_length, g.n_points_per_axis
        n = vals.shape[0]
    n = vals.shape[0]
    mass = np.sum(vals * vals) * (box / n) ** 3
    vals *= math.sqrt(m / mass)

    from .ground_state import _m2

    m2 = _m2(n)
    best = 0.0  # dilation tail: E(u^s) -> 0+ as s -> 0, so the infimum is <= 0
    tau = 0.3
    prev_v = prev_df = None
    for it in range(iters):
        mass, grad2, quart, sext, dip, n_val, phi = _scal(vals, box, p)
        energy = _energy_of(grad2, quart, sext, dip, p)
        best = min(best, energy)
        s_star = _project_scale(grad2, -0.75 * n_val, sext)
        if s_star is not None:
            e_ray = (s_star ** 2 * grad2 / 2.0 - s_star ** 3 * n_val / 4.0
                     + s_star ** 6 * sext / 6.0)
            best = min(best, e_ray)
        k2 = (2.0 * math.pi / box) ** 2 * m2
        lap = np.fft.ifftn(k2 * np.fft.fftn(vals)).real
        grad = lap + p.lam1 * vals ** 3 + vals ** 5
        if p.lam2 != 0.0:
            grad += p.lam2 * phi * vals
        df = np.fft.ifftn(np.fft.fftn(grad) / (1.0 + k2)).real
        if prev_df is not None:
            dg = df - prev_df
            num = np.sum((vals - prev_v) * dg)
            den = np.sum(dg * dg)
            tau = min(num / den, 4.0) if (den > 0 and num > 0) else 0.3
        ok = False
        for _ in range(30):
            trial = vals - tau * df
            tm = np.sum(trial * trial) * (box / n) ** 3
            trial *= math.sqrt(m / tm)
            st = _scal(trial, box, p)
            e2 = _energy_of(st[1], st[2], st[3], st[4], p)
            if np.isfinite(e2) and e2 < energy - 1e-14:
                ok = True
                break
            tau *= 0.5
        if not ok:
            break
        prev_v, prev_df = vals, df
        vals = trial
    return best


# ---------------------------------------------------------------------------
# the assembled curve


@dataclass(frozen=True)
class ThresholdCurve:
    mass_q1: float
    mass_s: float
    energy_s: float
    samples: tuple[tuple[float, float], ...]
    gauge: dict
    eps_curve: float = 0.02
    probes: tuple[tuple[float, int], ...] = ()
    restarts_used: tuple[int, ...] = ()

    def __post_init__(self):
        ms = [s[0] for s in self.samples]
        if sorted(ms) != ms:
            raise ValueError("curve samples must be ordered by mass")
        bad = [m for m, e in self.samples if not math.isfinite(e)]
        if bad:
            raise ValueError(
                "curve samples must be finite; infeasible node(s) at mass "
                + ", ".join(f"{m:.6g}" for m in bad))

    def _interp(self) -> PchipInterpolator:
        ms = np.array([s[0] for s in self.samples])
        es = np.array([s[1] for s in self.samples])
        # enforce strict decrease before interpolating; sampling noise can
        # produce flat-or-up pairs at the 1e-3 level near the right end
        floor = np.minimum.accumulate(es)
        tiny = 1e-12 * max(1.0, abs(self.energy_s))
        es = floor - tiny * np.arange(len(es))
        return PchipInterpolator(ms, es, extrapolate=False)

    def threshold_at(self, m: float):
        """Interpolated minimal energy: +infinity below M(S), 0 beyond M(Q1)."""
        if m <= 0.0:
            raise ValueError("threshold_at needs m > 0")
        if m < self.mass_s:
            return PLUS_INFINITY
        if m >= self.mass_q1:
            return 0.0
        return float(max(0.0, self._interp()(m)))

    def in_blowup_region(self, m: float, e: float) -> bool:
        """Above-or-on the curve, mass at least M(S): the set the distance
        in the L functional is measured to."""
        if m < self.mass_s:
            return False
        return e >= self.threshold_at(m)

    def boundary_vertices(self) -> np.ndarray:
        verts = [(m, max(0.0, e)) for m, e in self.samples]
        if verts[-1][0] < self.mass_q1:
            verts.append((self.mass_q1, 0.0))
        return np.array(verts)

    def to_json_dict(self) -> dict:
        return {
            "mass_q1": self.mass_q1,
            "mass_s": self.mass_s,
            "energy_s": self.energy_s,
            "eps_curve": self.eps_curve,
            "gauge": self.gauge,
        }


def in_region_k(m: float, e: float, curve: ThresholdCurve) -> bool:
    """Strict membership in the sub-threshold region.

    True iff 0 < m < M(Q1), 0 < e, and e lies strictly below the curve,
    where the curve is +infinity on (0, M(S)) so any positive energy
    qualifies there.
    """
    if not (0.0 < m < curve.mass_q1) or not (e > 0.0):
        return False
    thr = curve.threshold_at(m)
    if thr is PLUS_INFINITY:
        return True
    return e < thr


def _chebyshev_masses(lo: float, hi: float, k: int) -> np.ndarray:
    j = np.arange(k)
    x = np.cos(math.pi * j / (k - 1))          # second kind: includes endpoints
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x[::-1]


def _workers(n_tasks: int) -> int:
    env = os.environ.get("DNLS_THREADS")
    if env:
        return max(1, min(int(env), n_tasks))
    return max(1, min(os.cpu_count() or 1, 4, n_tasks))


def build_curve(q1: GroundState, opts: Optional[CurveOptions] = None) -> ThresholdCurve:
    """Sample the minimal-energy curve on [M(S), M(Q1)].

    The alpha = 1 ground state is spectrally downsampled to the curve grid;
    S comes from the exact relabeling of that field.  Each mass node runs a
    Lemma-5.4-style warm start raised from S plus random restarts, nodes in
    a thread pool (DNLS_THREADS caps the width).  Below-M(S) probe masses
    are recorded with their failed restart counts.
    """
    opts = opts or CurveOptions()
    p = q1.params
    mass_q1 = q1.report.mass
    mass_s = MASS_RATIO_S_TO_Q1 * mass_q1
    # exact scaling algebra: G(S) = G(Q1)/sqrt(3), E(S) = G(S)/9
    energy_s = q1.report.grad_squared / (9.0 * math.sqrt(3.0))

    n_small = opts.n_grid
    q_small = spectral_resample(q1.field.values.real, n_small)
    box_q = q1.grid.box_length
    s_small = q_small / math.sqrt(2.0)
    box_s = box_q * 2.0 / math.sqrt(3.0)
    s_field = field_from_values(s_small, make_grid(n_small, box_s))

    masses = _chebyshev_masses(mass_s, mass_q1, opts.n_nodes)

    def node(m: float) -> tuple[float, float, int]:
        try:
            warm, _ = mass_raise(s_field, p, m)
        except ValueError:
            # the node sits at or below the grid-level mass of S; the shape
            # alone is a fine start, the descent renormalizes mass anyway
            warm = s_field
        res = script_e(m, p, opts, warm_starts=[warm],
                       grid=make_grid(n_small, box_s),
                       restarts=opts.restarts_per_node)
        val = float(res.value) if res.feasible else math.inf
        if m <= mass_s * (1.0 + 1e-12):
            # left endpoint: the constraint set degenerates to the orbit of
            # S, where the I = 0 projection is tangent and resampling noise
            # decides feasibility.  The value there is pinned by the exact
            # construction, so use it unless the descent did better.
            val = min(val, energy_s)
        return m, val, res.restarts_used

    with ThreadPoolExecutor(max_workers=_workers(len(masses))) as pool:
        rows = list(pool.map(node, masses))

    samples = tuple((m, e) for m, e, _ in rows)
    restarts = tuple(r for _, _, r in rows)

    probes = []
    for frac in opts.probe_fractions:
        m_probe = frac * mass_s
        res = script_e(m_probe, p, opts, grid=make_grid(n_small, box_s),
                       restarts=opts.standalone_restarts)
        if res.feasible:
            raise RuntimeError(
                f"curve probe at m = {m_probe:.6g} unexpectedly feasible")
        probes.append((m_probe, res.restarts_used))

    gauge = {
        "alpha": q1.alpha,
        "lam1": p.lam1,
        "lam2": p.lam2,
        "omega": q1.omega,
        "source_grid_n": q1.grid.n_points_per_axis,
        "source_box": q1.grid.box_length,
        "curve_grid_n": n_small,
        "normalization": "elliptic",
    }
    return ThresholdCurve(
        mass_q1=mass_q1, mass_s=mass_s, energy_s=energy_s,
        samples=samples, gauge=gauge, eps_curve=opts.eps_rel,
        probes=tuple(probes), restarts_used=restarts,
    )


# ---------------------------------------------------------------------------
# persistence: CSV of samples plus a JSON sidecar


def write_curve(curve: ThresholdCurve, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = ["m,script_e,feasible_flag,restarts_used"]
    for m_probe, used in curve.probes:
        lines.append(f"{m_probe:.11e},inf,0,{used}")
    restarts = curve.restarts_used or tuple(0 for _ in curve.samples)
    for (m, e), used in zip(curve.samples, restarts):
        lines.append(f"{m:.11e},{e:.11e},1,{used}")
    (directory / "curve.csv").write_text("\n".join(lines) + "\n")
    meta = curve.to_json_dict()
    (directory / "curve_meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def load_curve(directory) -> ThresholdCurve:
    directory = Path(directory)
    meta = json.loads((directory / "curve_meta.json").read_text())
    samples = []
    probes = []
    restarts = []
    rows = (directory / "curve.csv").read_text().strip().splitlines()[1:]
    for row in rows:
        m_s, e_s, flag, used = row.split(",")
        if flag == "1":
            samples.append((float(m_s), float(e_s)))
            restarts.append(int(used))
        else:
            probes.append((float(m_s), int(used)))
    return ThresholdCurve(
        mass_q1=meta["mass_q1"], mass_s=meta["mass_s"],
        energy_s=meta["energy_s"], samples=tuple(samples),
        gauge=meta["gauge"], eps_curve=meta["eps_curve"],
        probes=tuple(probes), restarts_used=tuple(restarts),
    )
