"""Conserved quantities, variational functionals, and scaling identities.

Conventions (fixed throughout the package):

    M  = integral |u|^2                     mass
    G  = integral |grad u|^2                gradient energy, no 1/2
    q  = integral |u|^4
    d  = integral (K * |u|^2) |u|^2         dipolar energy
    S6 = integral |u|^6
    E  = G/2 + (lam1/4) q + (lam2/4) d + S6/6
    P  = 2 Im integral conj(u) grad u       momentum (3-vector)
    N  = -lam1 q - lam2 d                   attractive cubic part
    I  = G + S6 - (3/4) N
    Gamma = S6 / G

Quantities that are genuinely infinite (Weinstein quotient with N <= 0,
the region functional on the blow-up set) are reported as the dedicated
PLUS_INFINITY sentinel rather than a floating inf, so they can never leak
into arithmetic unnoticed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .grid import Field3D, GridSpec, PHYSICAL, to_physical, _unit_lattice, _unit_lattice_odd
from .kernel import DipoleParams, khat_lattice, stability_margin


class _PlusInfinity:
    """Order-comparable sentinel for provably infinite values."""

    __slots__ = ()

    def __repr__(self):
        return "PLUS_INFINITY"

    def __eq__(self, other):
        return isinstance(other, _PlusInfinity)

    def __hash__(self):
        return hash("PLUS_INFINITY")

    def __gt__(self, other):
        return not isinstance(other, _PlusInfinity)

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, _PlusInfinity)


PLUS_INFINITY = _PlusInfinity()


def is_infinite(value) -> bool:
    return isinstance(value, _PlusInfinity)


@dataclass(frozen=True)
class FunctionalReport:
    """All scalar functionals of a field at one instant."""

    mass: float
    grad_squared: float
    quartic: float
    dipolar: float
    sextic: float
    energy: float
    momentum: tuple[float, float, float]
    n_value: float
    i_value: float
    gamma: float

    CSV_COLUMNS = (
        "mass", "grad_squared", "quartic", "dipolar", "sextic", "energy",
        "momentum_1", "momentum_2", "momentum_3", "n_value", "i_value", "gamma",
    )

    def csv_row(self) -> list[float]:
        return [
            self.mass, self.grad_squared, self.quartic, self.dipolar,
            self.sextic, self.energy,
            self.momentum[0], self.momentum[1], self.momentum[2],
            self.n_value, self.i_value, self.gamma,
        ]

    def to_json_dict(self) -> dict:
        return {
            "mass": self.mass,
            "grad_squared": self.grad_squared,
            "quartic": self.quartic,
            "dipolar": self.dipolar,
            "sextic": self.sextic,
            "energy": self.energy,
            "momentum": list(self.momentum),
            "n_value": self.n_value,
            "i_value": self.i_value,
            "gamma": self.gamma,
        }


def _raw_report(values: np.ndarray, grid: GridSpec, params: DipoleParams) -> FunctionalReport:
    n = grid.n_points_per_axis
    h3 = grid.quadrature_weight
    scale = h3 / n ** 3

    rho = (values.real ** 2 + values.imag ** 2)
    mass = h3 * float(rho.sum())
    quartic = h3 * float((rho * rho).sum())
    sextic = h3 * float((rho * rho * rho).sum())

    uhat = np.fft.fftn(values)
    uhat2 = uhat.real ** 2 + uhat.imag ** 2
    kfac = 2.0 * np.pi / grid.box_length
    m_even = _unit_lattice(n)
    m_odd = _unit_lattice_odd(n)
    m2 = m_even ** 2
    grad_squared = scale * kfac ** 2 * float(
        np.einsum("i,ijk->", m2, uhat2)
        + np.einsum("j,ijk->", m2, uhat2)
        + np.einsum("k,ijk->", m2, uhat2)
    )
    momentum = (
        2.0 * scale * kfac * float(np.einsum("i,ijk->", m_odd, uhat2)),
        2.0 * scale * kfac * float(np.einsum("j,ijk->", m_odd, uhat2)),
        2.0 * scale * kfac * float(np.einsum("k,ijk->", m_odd, uhat2)),
    )

    phi = np.fft.ifftn(khat_lattice(n) * np.fft.fftn(rho)).real
    dipolar = h3 * float((phi * rho).sum())

    lam1, lam2 = params.lam1, params.lam2
    energy = 0.5 * grad_squared + 0.25 * (lam1 * quartic + lam2 * dipolar) + sextic / 6.0
    n_value = -lam1 * quartic - lam2 * dipolar
    i_value = grad_squared + sextic - 0.75 * n_value
    gamma = sextic / grad_squared if grad_squared > 0.0 else 0.0

    return FunctionalReport(
        mass=mass, grad_squared=grad_squared, quartic=quartic, dipolar=dipolar,
        sextic=sextic, energy=energy, momentum=momentum,
        n_value=n_value, i_value=i_value, gamma=gamma,
    )


def report(field: Field3D, params: DipoleParams) -> FunctionalReport:
    """Evaluate every functional of a field in one pass."""
    phys = to_physical(field)
    return _raw_report(phys.values, phys.grid, params)


def dipolar_energy_plancherel(field: Field3D) -> float:
    """Dipolar energy through the symbol route, integral khat |rhohat|^2.

    Algebraically equal to the potential route used in `report`; kept as an
    independent code path for consistency checks.
    """
    phys = to_physical(field)
    grid = phys.grid
    n = grid.n_points_per_axis
    rho = np.abs(phys.values) ** 2
    rhohat = np.fft.fftn(rho)
    rhohat2 = rhohat.real ** 2 + rhohat.imag ** 2
    return grid.quadrature_weight / n ** 3 * float((khat_lattice(n) * rhohat2).sum())


# ---------------------------------------------------------------------------
# Weinstein quotient


def weinstein_exponents(alpha: float) -> tuple[float, float]:
    """(p, r) with p = 3/(1+alpha), r = 3*alpha/(1+alpha); p + r = 3."""
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    return 3.0 / (1.0 + alpha), 3.0 * alpha / (1.0 + alpha)


def weinstein_from_report(rep: FunctionalReport, alpha: float):
    if rep.mass <= 0.0:
        raise ValueError("Weinstein quotient of the zero field is undefined")
    if rep.n_value <= 0.0:
        return PLUS_INFINITY
    p, r = weinstein_exponents(alpha)
    return float(
        np.sqrt(rep.mass)
        * rep.grad_squared ** (0.5 * p)
        * rep.sextic ** (r / 6.0)
        / rep.n_value
    )


def weinstein(field: Field3D, params: DipoleParams, alpha: float):
    """sqrt(M) * G^(p/2) * S6^(r/6) / N, or PLUS_INFINITY when N <= 0."""
    return weinstein_from_report(report(field, params), alpha)


# ---------------------------------------------------------------------------
# scaling family u^s(x) = s^(3/2) u(s x)


@dataclass(frozen=True)
class ScalePolynomials:
    """Coefficients describing functionals along the mass-preserving dilation.

    For u^s(x) = s^(3/2) u(s x):

        I(u^s) = s^2 a + s^3 b + s^6 c
        E(u^s) = s^2 a / 2 + s^3 b / 3 + s^6 c / 6

    with a = G(u), b = (3/4)(lam1 q + lam2 d) = -(3/4) N(u), c = S6(u),
    and m = M(u) constant along the family.
    """

    a: float
    b: float
    c: float
    m: float

    def i_of(self, s: float) -> float:
        return s ** 2 * self.a + s ** 3 * self.b + s ** 6 * self.c

    def e_of(self, s: float) -> float:
        return s ** 2 * self.a / 2.0 + s ** 3 * self.b / 3.0 + s ** 6 * self.c / 6.0


def scale_polynomials(rep: FunctionalReport) -> ScalePolynomials:
    return ScalePolynomials(
        a=rep.grad_squared,
        b=-0.75 * rep.n_value,
        c=rep.sextic,
        m=rep.mass,
    )


def scale_polys(field: Field3D, params: DipoleParams) -> ScalePolynomials:
    """Dilation-ray coefficients of a field (one functional evaluation)."""
    return scale_polynomials(report(field, params))


def dilated(field: Field3D, s: float) -> Field3D:
    """u^s = s^(3/2) u(s x), realized exactly by shrinking the box to L/s.

    The sample values are reused at the rescaled coordinates, so no
    interpolation error enters; only the grid metadata changes.
    """
    if not s > 0.0:
        raise ValueError("dilation factor must be positive")
    phys = to_physical(field)
    new_grid = GridSpec(phys.grid.n_points_per_axis, phys.grid.box_length / s)
    return Field3D(s ** 1.5 * phys.values, new_grid, PHYSICAL)


# ---------------------------------------------------------------------------
# Galilean boosts


def galilean_boost(field: Field3D, xi) -> Field3D:
    """Multiply by exp(i xi . x).

    Lattice-exact identities (energy shift, momentum shift) hold when each
    component of xi is a multiple of 2*pi/L; other velocities work but pick
    up a wrap discontinuity at the box boundary.
    """
    phys = to_physical(field)
    x1, x2, x3 = phys.grid.coordinate_arrays()
    phase = np.exp(1j * (xi[0] * x1 + xi[1] * x2 + xi[2] * x3))
    return Field3D(phys.values * phase, phys.grid, PHYSICAL)


def boost_energy_shift(rep: FunctionalReport, xi) -> float:
    """Exact change of E under a boost: xi . Im int conj(u) grad u + |xi|^2 M / 2."""
    xi = np.asarray(xi, dtype=np.float64)
    half_p = 0.5 * np.asarray(rep.momentum)
    return float(xi @ half_p + 0.5 * (xi @ xi) * rep.mass)


def zero_momentum_boost(rep: FunctionalReport) -> np.ndarray:
    """The boost velocity that cancels the momentum, -Im int conj(u) grad u / M."""
    return -0.5 * np.asarray(rep.momentum) / rep.mass


# ---------------------------------------------------------------------------
# energy floor and region functional


def kinetic_control_constant(params: DipoleParams) -> float:
    """C such that grad^2 <= 2 E + C M for every field.

    In Fourier variables the cubic part of the energy is
    (1/4)(2pi)^-3 * integral of (lam1 + lam2 Khat) |rho_hat|^2, bounded
    below by (beta/4) * quartic with beta the worst value of the combined
    symbol.  When beta < 0, Young's inequality quartic <= (c M + S6/c)/2
    with c = 3|beta|/4 absorbs the sextic term completely, leaving
    E >= grad^2/2 - (3 beta^2/32) M.  Stable sign (beta >= 0) gives C = 0.
    """
    beta = min(0.0, stability_margin(params))
    return 3.0 * beta * beta / 16.0


def kinetic_control_gap(rep: FunctionalReport, params: DipoleParams) -> float:
    """Slack in grad^2 <= 2 E + C M; nonnegative up to quadrature error."""
    c = kinetic_control_constant(params)
    return 2.0 * rep.energy + c * rep.mass - rep.grad_squared


def coercive_energy_floor(rep: FunctionalReport, mass_q1: float) -> float:
    """(1 - sqrt(M/M(Q1))) * (G/2 + S6/6), the coercivity floor below M(Q1)."""
    return (1.0 - np.sqrt(rep.mass / mass_q1)) * (0.5 * rep.grad_squared + rep.sextic / 6.0)


def _dist_point_segment(p, a, b) -> float:
    p = np.asarray(p, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(p - a)))
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return float(np.hypot(*(p - a - t * ab)))


def _dist_point_ray(p, origin, direction) -> float:
    p = np.asarray(p, dtype=np.float64)
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    t = max(0.0, float((p - origin) @ direction) / float(direction @ direction))
    return float(np.hypot(*(p - origin - t * direction)))


def distance_to_blowup_boundary(mass: float, energy: float, curve) -> float:
    """Distance from (mass, energy) to the boundary of the blow-up region.

    The boundary is the sampled threshold polyline, the vertical ray above
    its left endpoint, and the horizontal ray right of its right endpoint.
    Accuracy is set by the curve sampling density.
    """
    verts = np.asarray(curve.boundary_vertices(), dtype=np.float64)
    p = (mass, energy)
    best = _dist_point_ray(p, verts[0], (0.0, 1.0))
    best = min(best, _dist_point_ray(p, (verts[-1, 0], 0.0), (1.0, 0.0)))
    for a, b in zip(verts[:-1], verts[1:]):
        best = min(best, _dist_point_segment(p, a, b))
    return best


def l_functional(mass: float, energy: float, curve):
    """Region functional L(m, e) = e + (m + e) / dist((m, e), blow-up set).

    Returns PLUS_INFINITY on the blow-up set itself.  `curve` must provide
    in_blowup_region(m, e) and boundary_vertices().
    """
    if curve.in_blowup_region(mass, energy):
        return PLUS_INFINITY
    dist = distance_to_blowup_boundary(mass, energy, curve)
    if dist <= 0.0:
        return PLUS_INFINITY
    return float(energy + (mass + energy) / dist)
