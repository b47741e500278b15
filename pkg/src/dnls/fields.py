"""Constructors for test and initial-condition fields.

Everything returns physical-space Field3D data.  Gaussians are the
workhorse: their mass, gradient, quartic, and sextic integrals have closed
forms, which makes them the natural oracle family.
"""

from __future__ import annotations

import numpy as np

from .grid import Field3D, GridSpec, PHYSICAL


def gaussian_field(
    grid: GridSpec,
    widths=(1.0, 1.0, 1.0),
    amplitude: float = 1.0,
    center=(0.0, 0.0, 0.0),
    boost=(0.0, 0.0, 0.0),
) -> Field3D:
    """amplitude * exp(-sum (x_i - c_i)^2 / (2 w_i^2)) * exp(i boost . x)."""
    w1, w2, w3 = widths
    c1, c2, c3 = center
    x1, x2, x3 = grid.coordinate_arrays()
    profile = np.exp(
        -((x1 - c1) ** 2) / (2.0 * w1 ** 2)
        - ((x2 - c2) ** 2) / (2.0 * w2 ** 2)
        - ((x3 - c3) ** 2) / (2.0 * w3 ** 2)
    )
    values = amplitude * profile.astype(np.complex128)
    if any(b != 0.0 for b in boost):
        values = values * np.exp(1j * (boost[0] * x1 + boost[1] * x2 + boost[2] * x3))
    return Field3D(values, grid, PHYSICAL)


def gaussian_moments(widths=(1.0, 1.0, 1.0), amplitude: float = 1.0) -> dict:
    """Closed-form local integrals of the Gaussian above (dipolar excluded)."""
    w1, w2, w3 = widths
    vol = w1 * w2 * w3
    a2 = amplitude ** 2
    pi32 = np.pi ** 1.5
    return {
        "mass": a2 * pi32 * vol,
        "grad_squared": a2 * pi32 * vol * 0.5 * (1.0 / w1 ** 2 + 1.0 / w2 ** 2 + 1.0 / w3 ** 2),
        "quartic": a2 ** 2 * (np.pi / 2.0) ** 1.5 * vol,
        "sextic": a2 ** 3 * (np.pi / 3.0) ** 1.5 * vol,
    }


def smooth_random_field(
    grid: GridSpec,
    seed: int,
    corr_length: float = 1.0,
    amplitude: float = 1.0,
    envelope_width: float | None = None,
    complex_valued: bool = True,
) -> Field3D:
    """Band-limited Gaussian random field under a decaying envelope.

    White spectral noise is shaped by exp(-k^2 l^2 / 4) and localized by a
    real Gaussian envelope (default width L/7) so the samples decay toward
    the box boundary.  The peak magnitude is normalized to `amplitude`.
    """
    rng = np.random.default_rng(seed)
    n = grid.n_points_per_axis
    shape = grid.shape
    noise = rng.normal(size=shape)
    if complex_valued:
        noise = noise + 1j * rng.normal(size=shape)
    shaping = np.exp(-grid.k_squared * corr_length ** 2 / 4.0)
    u = np.fft.ifftn(shaping * np.fft.fftn(noise))
    if not complex_valued:
        u = u.real.astype(np.complex128)
    w = envelope_width if envelope_width is not None else grid.box_length / 7.0
    x1, x2, x3 = grid.coordinate_arrays()
    u *= np.exp(-(x1 ** 2 + x2 ** 2 + x3 ** 2) / (2.0 * w ** 2))
    peak = np.abs(u).max()
    if peak > 0.0:
        u *= amplitude / peak
    return Field3D(u, grid, PHYSICAL)


def rescale_mass(field: Field3D, target_mass: float) -> Field3D:
    """Scale the amplitude so the field carries exactly the requested mass."""
    mass = field.grid.quadrature_weight * float(np.sum(np.abs(field.values) ** 2))
    if mass <= 0.0:
        raise ValueError("cannot rescale a zero field")
    return Field3D(np.sqrt(target_mass / mass) * field.values, field.grid, field.space)


def lattice_velocity(grid: GridSpec, j=(1, 0, 0)) -> np.ndarray:
    """A boost velocity commensurate with the lattice, 2*pi*j/L."""
    return 2.0 * np.pi / grid.box_length * np.asarray(j, dtype=np.float64)
