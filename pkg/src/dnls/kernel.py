"""Dipole-dipole interaction kernel and coupling-regime classification.

The nonlocal term is K * |u|^2 with the dipole axis fixed to e3.  The kernel
acts as a Fourier multiplier,

    khat(k) = (4*pi/3) * (2*k3^2 - k1^2 - k2^2) / |k|^2,      khat(0) := 0,

which is bounded, 0-homogeneous, and takes values in [-4*pi/3, 8*pi/3].
Everything here works through khat; the real-space kernel is too singular to
evaluate pointwise and is never needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .grid import Field3D, GridSpec, PHYSICAL, _unit_lattice

KHAT_MIN = -4.0 * np.pi / 3.0
KHAT_MAX = 8.0 * np.pi / 3.0


@dataclass(frozen=True)
class DipoleParams:
    """Coupling pair: lam1 multiplies |u|^2 u, lam2 multiplies (K*|u|^2) u."""

    lam1: float
    lam2: float


class Regime(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    DEGENERATE = "degenerate"


def khat(k1, k2, k3):
    """Kernel symbol on arbitrary wavenumber arrays (khat(0) = 0)."""
    k1 = np.asarray(k1, dtype=np.float64)
    k2 = np.asarray(k2, dtype=np.float64)
    k3 = np.asarray(k3, dtype=np.float64)
    num = 2.0 * k3 ** 2 - k1 ** 2 - k2 ** 2
    den = k1 ** 2 + k2 ** 2 + k3 ** 2
    out = np.divide(
        num, den,
        out=np.zeros(np.broadcast(num, den).shape, dtype=np.float64),
        where=den > 0,
    )
    out *= 4.0 * np.pi / 3.0
    return out


@lru_cache(maxsize=16)
def khat_lattice(n: int) -> np.ndarray:
    """khat evaluated on the full n^3 FFT lattice.

    The symbol is scale invariant, so the table depends on n only, not on
    the box length.
    """
    m = _unit_lattice(n)
    m1 = m[:, None, None]
    m2 = m[None, :, None]
    m3 = m[None, None, :]
    out = khat(m1, m2, m3)
    out.setflags(write=False)
    return out


def dipolar_potential(rho: Field3D) -> Field3D:
    """K * rho as a physical-space field (rho given in physical space)."""
    if rho.space != PHYSICAL:
        raise ValueError("dipolar_potential expects a physical-space density")
    n = rho.grid.n_points_per_axis
    out = np.fft.ifftn(khat_lattice(n) * np.fft.fftn(rho.values))
    return Field3D(out, rho.grid, PHYSICAL)


def convolve_density(rho_values: np.ndarray) -> np.ndarray:
    """Array-level K * rho for real densities; returns a real array."""
    n = rho_values.shape[0]
    return np.fft.ifftn(khat_lattice(n) * np.fft.fftn(rho_values)).real


def stability_margin(params: DipoleParams) -> float:
    """min over the symbol range of lam1 + lam2 * khat.

    Negative margin means the combined local plus nonlocal cubic coupling
    is attractive along some directions.
    """
    lam1, lam2 = params.lam1, params.lam2
    if lam2 >= 0.0:
        return lam1 + lam2 * KHAT_MIN
    return lam1 + lam2 * KHAT_MAX


def classify_regime(params: DipoleParams) -> Regime:
    if params.lam1 == 0.0 and params.lam2 == 0.0:
        return Regime.DEGENERATE
    if stability_margin(params) < 0.0:
        return Regime.UNSTABLE
    return Regime.STABLE
