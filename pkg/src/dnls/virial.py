"""Virial identities: V, V', V'' for the quadratic and localized radial weights.

The localized weight is phi(x) = R^2 psi(|x|/R) with psi = rho^2 below 1,
constant beyond 2, and a degree-9 polynomial blend in between, C^4 across
the seams.  With the quadratic weight the five-term second-derivative
formula collapses algebraically to 8 I(u); the localized weight reproduces
that up to tail terms supported outside radius R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .evolution import EvolutionConfig, TrajectoryRecord, step_strang
from .functionals import report
from .grid import Field3D, GridSpec, gradient
from .kernel import DipoleParams, convolve_density


# degree-9 smoothstep and its s-derivatives; B: [0,1] -> [0,1], C^4 at both ends
def _blend(s: np.ndarray):
    b = s ** 5 * (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + 70.0 * s))))
    b1 = 630.0 * s ** 4 * (1.0 - s) ** 4
    b2 = s ** 3 * (2520.0 + s * (-12600.0 + s * (22680.0 + s * (-17640.0 + 5040.0 * s))))
    b3 = s ** 2 * (7560.0 + s * (-50400.0 + s * (113400.0 + s * (-105840.0 + 35280.0 * s))))
    return b, b1, b2, b3


def _blend_integrals(s: np.ndarray):
    """Antiderivatives needed for psi itself: A = int B ds, A2 = int s B ds."""
    a = s ** 6 * (21.0 + s * (-60.0 + s * (67.5 + s * (-35.0 + 7.0 * s))))
    a2 = s ** 7 * (18.0 + s * (-52.5 + s * (60.0 + s * (-31.5 + (70.0 / 11.0) * s))))
    return a, a2


def _profile(r: np.ndarray, radius: float):
    """phi-derived weight factors at radial distances r for cutoff radius R.

    Returns (phi, w1, w2, w3, bilap) with w1 = phi'/r, w2 = (phi'' - phi'/r)/r^2,
    w3 = phi'' + 2 phi'/r, bilap = the radial biharmonic phi'''' + 4 phi'''/r.
    All are smooth: w1 = 2(1 - B) carries no 1/r, and the others vanish
    identically inside radius R where phi = r^2.
    """
    s = np.clip((r - radius) / radius, 0.0, 1.0)
    b, b1s, b2s, b3s = _blend(s)
    a, a2 = _blend_integrals(s)
    db1 = b1s / radius
    db2 = b2s / radius ** 2
    db3 = b3s / radius ** 3

    phi = r ** 2 - 2.0 * radius ** 2 * (a + a2)
    # past r = 2R the clipped antiderivatives stop tracking int t B dt, so
    # pin the plateau value phi(2R) = (25/11) R^2 there explicitly
    phi = np.where(r >= 2.0 * radius, (25.0 / 11.0) * radius ** 2, phi)
    w1 = 2.0 * (1.0 - b)
    phi_pp = 2.0 * (1.0 - b) - 2.0 * r * db1
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_r = np.where(r > 0, 1.0 / np.maximum(r, 1e-300), 0.0)
    w2 = -2.0 * db1 * inv_r
    w3 = phi_pp + 2.0 * w1
    phi_ppp = -4.0 * db1 - 2.0 * r * db2
    phi_pppp = -6.0 * db2 - 2.0 * r * db3
    bilap = phi_pppp + 4.0 * phi_ppp * inv_r
    return phi, w1, w2, w3, bilap


class WeightKind:
    QUADRATIC = "quadratic"
    LOCALIZED = "localized"


@dataclass(frozen=True)
class VirialWeight:
    """Radial virial weight with precomputed grid arrays and profile tables.

    kind is quadratic (phi = |x|^2 everywhere) or localized at a radius R.
    The 3D arrays feed the quadrature; the 1D dimensionless tables (psi and
    its derivatives against rho = r/R) exist so the cutoff constraints can
    be checked densely, independent of any grid.
    """
    kind: str
    radius: Optional[float]
    grid: GridSpec
    phi: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    w3: np.ndarray
    bilap: np.ndarray
    table_rho: np.ndarray
    table_psi: np.ndarray
    table_psi_p: np.ndarray
    table_psi_pp: np.ndarray
    table_psi_pppp: np.ndarray
    table_lap: np.ndarray
    table_bilap: np.ndarray


def _radius_arrays(grid: GridSpec):
    x = grid.axis_coordinates()
    r2 = x[:, None, None] ** 2 + x[None, :, None] ** 2 + x[None, None, :] ** 2
    return np.sqrt(r2), x


def quadratic_weight(grid: GridSpec) -> VirialWeight:
    r, _ = _radius_arrays(grid)
    shape = grid.shape
    rho = np.linspace(0.0, 2.5, 2001)
    return VirialWeight(
        kind=WeightKind.QUADRATIC, radius=None, grid=grid,
        phi=r * r,
        w1=np.full(shape, 2.0), w2=np.zeros(shape),
        w3=np.full(shape, 6.0), bilap=np.zeros(shape),
        table_rho=rho, table_psi=rho ** 2, table_psi_p=2.0 * rho,
        table_psi_pp=np.full_like(rho, 2.0),
        table_psi_pppp=np.zeros_like(rho),
        table_lap=np.full_like(rho, 6.0), table_bilap=np.zeros_like(rho),
    )


def localized_weight(grid: GridSpec, radius: float) -> VirialWeight:
    if radius <= 0.0:
        raise ValueError("localized weight needs a positive radius")
    r, _ = _radius_arrays(grid)
    phi, w1, w2, w3, bilap = _profile(r, radius)
    rho = np.linspace(0.0, 2.5, 2001)
    psi, pw1, pw2, pw3, pbil = _profile(rho, 1.0)
    s = np.clip(rho - 1.0, 0.0, 1.0)
    _, _, b2s, b3s = _blend(s)
    psi_pppp = -6.0 * b2s - 2.0 * rho * b3s
    return VirialWeight(
        kind=WeightKind.LOCALIZED, radius=radius, grid=grid,
        phi=phi, w1=w1, w2=w2, w3=w3, bilap=bilap,
        table_rho=rho, table_psi=psi, table_psi_p=rho * pw1,
        table_psi_pp=2.0 * (1.0 - _blend(s)[0]) - 2.0 * rho * _blend(s)[1],
        table_psi_pppp=psi_pppp,
        table_lap=pw3, table_bilap=pbil,
    )


def edge_mass_fraction(u: Field3D) -> float:
    """Mass fraction in the outer shell max_i |x_i| > 0.375 L."""
    g = u.grid
    x = np.abs(g.axis_coordinates())
    cut = 0.375 * g.box_length
    shell = ((x[:, None, None] > cut) | (x[None, :, None] > cut)
             | (x[None, None, :] > cut))
    rho = u.values.real ** 2 + u.values.imag ** 2
    total = float(np.sum(rho))
    if total == 0.0:
        return 0.0
    return float(np.sum(rho[shell])) / total


def _check_weight(u: Field3D, w: VirialWeight, warn) -> None:
    if u.grid != w.grid:
        raise ValueError("field and weight live on different grids")
    if w.kind == WeightKind.QUADRATIC and warn is not None:
        if edge_mass_fraction(u) > 0.01:
            warn("quadratic virial weight on data with > 1% boundary mass")


def virial_v(u: Field3D, w: VirialWeight, warn=None) -> float:
    """V = integral of phi |u|^2."""
    _check_weight(u, w, warn)
    rho = u.values.real ** 2 + u.values.imag ** 2
    return float(np.sum(w.phi * rho)) * u.grid.quadrature_weight


def virial_vp(u: Field3D, w: VirialWeight, warn=None) -> float:
    """V' = 2 Im of integral grad(phi) . grad(u) conj(u)."""
    _check_weight(u, w, warn)
    g = u.grid
    x = g.axis_coordinates()
    gx, gy, gz = gradient(u)
    xg = (x[:, None, None] * gx.values + x[None, :, None] * gy.values
          + x[None, None, :] * gz.values)
    integrand = np.imag(np.conj(u.values) * xg) * w.w1
    return 2.0 * float(np.sum(integrand)) * g.quadrature_weight


def virial_vpp(u: Field3D, w: VirialWeight, p: DipoleParams, warn=None) -> float:
    """V'' assembled from the five-term radial-weight identity.

    Quadratic weight: the terms sum to exactly 8 I(u) in the continuum
    algebra (w1 = 2, w2 = 0, w3 = 6, no biharmonic, and the dipolar term
    reduces by homogeneity of the kernel symbol to 6 lam2 d).
    """
    _check_weight(u, w, warn)
    g = u.grid
    hw = g.quadrature_weight
    x = g.axis_coordinates()
    vals = u.values
    rho = vals.real ** 2 + vals.imag ** 2

    gx, gy, gz = gradient(u)
    grad2 = (np.abs(gx.values) ** 2 + np.abs(gy.values) ** 2
             + np.abs(gz.values) ** 2)
    t1 = 4.0 * float(np.sum(w.w1 * grad2)) * hw

    xg = (x[:, None, None] * gx.values + x[None, :, None] * gy.values
          + x[None, None, :] * gz.values)
    t2 = 4.0 * float(np.sum(w.w2 * np.abs(xg) ** 2)) * hw

    t3 = float(np.sum(w.w3 * (p.lam1 * rho ** 2 + (4.0 / 3.0) * rho ** 3))) * hw

    t4 = -float(np.sum(w.bilap * rho)) * hw

    t5 = 0.0
    if p.lam2 != 0.0:
        pot = convolve_density(rho)
        pot_field = Field3D(pot.astype(np.complex128), g, "physical")
        px, py, pz = gradient(pot_field)
        x_dot = (x[:, None, None] * px.values.real
                 + x[None, :, None] * py.values.real
                 + x[None, None, :] * pz.values.real)
        t5 = -2.0 * p.lam2 * float(np.sum(w.w1 * x_dot * rho)) * hw

    return t1 + t2 + t3 + t4 + t5


def dipolar_bound_terms(u: Field3D, w: VirialWeight, p: DipoleParams) -> dict:
    """Pieces of the dipolar virial lower bound, for the regression guard.

    The localized dipolar term should dominate 6 lam2 d minus a remainder
    controlled by tail kinetic energy, R^-2 tail mass, and tail quartic
    mass outside the cutoff radius.
    """
    if w.kind != WeightKind.LOCALIZED:
        raise ValueError("bound terms are defined for the localized weight")
    g = u.grid
    hw = g.quadrature_weight
    x = g.axis_coordinates()
    vals = u.values
    rho = vals.real ** 2 + vals.imag ** 2
    pot = convolve_density(rho)
    pot_field = Field3D(pot.astype(np.complex128), g, "physical")
    px, py, pz = gradient(pot_field)
    x_dot = (x[:, None, None] * px.values.real + x[None, :, None] * py.values.real
             + x[None, None, :] * pz.values.real)
    lhs = -2.0 * p.lam2 * float(np.sum(w.w1 * x_dot * rho)) * hw
    dip = float(np.sum(pot * rho)) * hw
    rhs_main = 6.0 * p.lam2 * dip

    r, _ = _radius_arrays(g)
    tail = r >= w.radius
    gx, gy, gz = gradient(u)
    grad2 = (np.abs(gx.values) ** 2 + np.abs(gy.values) ** 2
             + np.abs(gz.values) ** 2)
    tail_kinetic = float(np.sum(grad2[tail])) * hw
    tail_mass = float(np.sum(rho[tail])) * hw / w.radius ** 2
    tail_quartic = float(np.sum((rho ** 2)[tail])) * hw
    return {
        "lhs": lhs,
        "rhs_main": rhs_main,
        "tail_kinetic": tail_kinetic,
        "tail_mass_over_r2": tail_mass,
        "tail_quartic": tail_quartic,
    }


def radius_covering_mass(u: Field3D, fraction: float) -> float:
    """Smallest grid radius enclosing the given mass fraction (sorted cumsum)."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    g = u.grid
    r, _ = _radius_arrays(g)
    rho = (u.values.real ** 2 + u.values.imag ** 2).ravel()
    order = np.argsort(r.ravel())
    csum = np.cumsum(rho[order])
    total = csum[-1]
    if total == 0.0:
        return 0.0
    idx = int(np.searchsorted(csum, fraction * total))
    idx = min(idx, len(csum) - 1)
    return float(r.ravel()[order][idx])


class IPositivityReport(NamedTuple):
    i_initial: float
    i_min: float
    eta: float
    passed: bool
    window_points: int


def monitor_i_positivity(traj: TrajectoryRecord, eta_fraction: float) -> IPositivityReport:
    """Minimum of I over the trusted window versus eta_fraction * I(u0)."""
    sl = traj.trusted_slice()
    i_series = [r.i_value for r in traj.rows[sl]]
    i0 = traj.rows[0].i_value
    eta = eta_fraction * i0
    i_min = min(i_series) if i_series else i0
    return IPositivityReport(i0, i_min, eta, i_min >= eta, len(i_series))


class VirialSeries(NamedTuple):
    times: tuple[float, ...]
    v: tuple[float, ...]
    vp: tuple[float, ...]
    vpp_direct: tuple[float, ...]
    vpp_fd: tuple[float, ...]
    i_series: tuple[float, ...]


def virial_series(u0: Field3D, cfg: EvolutionConfig, p: DipoleParams,
                  w: VirialWeight, warn=None) -> VirialSeries:
    """Evolve and sample V, V', V'' (direct) at every output stride.

    Vpp_fd is the centered second difference of V on the output time grid,
    NaN at the two endpoints; it cross-validates the displayed identity
    against the splitting dynamics.
    """
    n_steps = max(0, int(round(cfg.t_final / cfg.dt)))
    fld = u0
    times = [0.0]
    vs = [virial_v(fld, w, warn)]
    vps = [virial_vp(fld, w)]
    vpps = [virial_vpp(fld, w, p)]
    iis = [report(fld, p).i_value]
    for step in range(1, n_steps + 1):
        fld = step_strang(fld, cfg.dt, p)
        if step % cfg.output_stride == 0 or step == n_steps:
            times.append(step * cfg.dt)
            vs.append(virial_v(fld, w))
            vps.append(virial_vp(fld, w))
            vpps.append(virial_vpp(fld, w, p))
            iis.append(report(fld, p).i_value)
    vpp_fd = [math.nan] * len(times)
    for i in range(1, len(times) - 1):
        h1 = times[i] - times[i - 1]
        h2 = times[i + 1] - times[i]
        if abs(h1 - h2) < 1e-12 * max(h1, h2):
            vpp_fd[i] = (vs[i + 1] - 2.0 * vs[i] + vs[i - 1]) / (h1 * h1)
    return VirialSeries(tuple(times), tuple(vs), tuple(vps), tuple(vpps),
                        tuple(vpp_fd), tuple(iis))


def write_virial_series(series: VirialSeries, path) -> None:
    lines = ["time,v,vp,vpp_direct,vpp_fd,i_value"]
    for i, t in enumerate(series.times):
        lines.append(",".join([
            f"{t:.11e}", f"{series.v[i]:.11e}", f"{series.vp[i]:.11e}",
            f"{series.vpp_direct[i]:.11e}", f"{series.vpp_fd[i]:.11e}",
            f"{series.i_series[i]:.11e}"]))
    Path(path).write_text("\n".join(lines) + "\n")
