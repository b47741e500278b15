"""Periodic spectral grids, transforms, and field storage on [-L/2, L/2)^3.

Uniform N^3 grids with x_i = -L/2 + j*h, h = L/N.  The forward transform
includes the quadrature weight, so spectral coefficients approximate the
continuum Fourier integral:

    fhat(k) = h^3 * fftn(f),    f = ifftn(fhat) / h^3,

with wavenumbers k = 2*pi*m/L on the integer lattice m in [-N/2, N/2).
Discrete Plancherel then reads (1/L^3) * sum |fhat|^2 = h^3 * sum |f|^2.

All quadratures assume the field decays below ~1e-12 at the box boundary;
callers are responsible for choosing L large enough (nothing is enforced
here, but `boundary_amplitude` makes the check cheap).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
import struct

import numpy as np

_SNAPSHOT_MAGIC = b"DNLS"
_SNAPSHOT_VERSION = 1
# magic, version, n, box_length, time, zero padding up to 64 bytes
_SNAPSHOT_HEADER = struct.Struct("<4sIIdd36x")
assert _SNAPSHOT_HEADER.size == 64

PHYSICAL = "physical"
SPECTRAL = "spectral"


@lru_cache(maxsize=32)
def _unit_lattice(n: int) -> np.ndarray:
    """Integer FFT frequencies 0, 1, ..., n/2-1, -n/2, ..., -1."""
    m = np.fft.fftfreq(n, 1.0 / n)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=32)
def _unit_lattice_odd(n: int) -> np.ndarray:
    """Integer frequencies with the Nyquist mode zeroed.

    Odd-order symbols (first derivatives, anything ~ k^odd) must not see
    the unpaired Nyquist plane on even grids, otherwise d/dx of a real
    field picks up a spurious imaginary part.
    """
    m = _unit_lattice(n).copy()
    m[n // 2] = 0.0
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a cubic periodic grid."""

    n_points_per_axis: int
    box_length: float

    @property
    def spacing(self) -> float:
        return self.box_length / self.n_points_per_axis

    @property
    def quadrature_weight(self) -> float:
        return self.spacing ** 3

    @property
    def shape(self) -> tuple[int, int, int]:
        n = self.n_points_per_axis
        return (n, n, n)

    def axis_coordinates(self) -> np.ndarray:
        n = self.n_points_per_axis
        return -0.5 * self.box_length + self.spacing * np.arange(n)

    def coordinate_arrays(self):
        """Broadcastable (x1, x2, x3) arrays, row-major axis order."""
        x = self.axis_coordinates()
        return np.meshgrid(x, x, x, indexing="ij", sparse=True)

    def axis_wavenumbers(self) -> np.ndarray:
        return (2.0 * np.pi / self.box_length) * _unit_lattice(self.n_points_per_axis)

    def wavenumber_arrays(self, zero_nyquist: bool = False):
        """Broadcastable (k1, k2, k3) arrays.

        With zero_nyquist=True the unpaired N/2 plane is removed; use this
        for odd powers of k.
        """
        n = self.n_points_per_axis
        m = _unit_lattice_odd(n) if zero_nyquist else _unit_lattice(n)
        k = (2.0 * np.pi / self.box_length) * m
        return np.meshgrid(k, k, k, indexing="ij", sparse=True)

    @cached_property
    def k_squared(self) -> np.ndarray:
        k1, k2, k3 = self.wavenumber_arrays()
        out = k1 ** 2 + k2 ** 2 + k3 ** 2
        out.setflags(write=False)
        return out

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Boolean 2/3-rule mask in fftn layout (True = keep)."""
        n = self.n_points_per_axis
        m = _unit_lattice(n)
        cut = n / 3.0
        keep1 = np.abs(m) <= cut
        mask = (keep1[:, None, None] & keep1[None, :, None] & keep1[None, None, :])
        mask.setflags(write=False)
        return mask


@dataclass(frozen=True)
class Field3D:
    """Complex field samples together with their grid and representation tag."""

    values: np.ndarray
    grid: GridSpec
    space: str = PHYSICAL

    def __post_init__(self):
        if self.space not in (PHYSICAL, SPECTRAL):
            raise ValueError(f"unknown space tag {self.space!r}")
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    @property
    def is_physical(self) -> bool:
        return self.space == PHYSICAL


def make_grid(n_points_per_axis: int, box_length: float) -> GridSpec:
    """Validated grid constructor.

    n must be even and at least 8 (powers of two are fastest but any even
    size works); box_length must be positive.
    """
    n = int(n_points_per_axis)
    if n != n_points_per_axis or n < 8 or n % 2 != 0:
        raise ValueError(f"n_points_per_axis must be an even integer >= 8, got {n_points_per_axis}")
    if not (box_length > 0.0) or not np.isfinite(box_length):
        raise ValueError(f"box_length must be positive and finite, got {box_length}")
    return GridSpec(n, float(box_length))


def field_from_values(values: np.ndarray, grid: GridSpec, space: str = PHYSICAL) -> Field3D:
    values = np.ascontiguousarray(values, dtype=np.complex128)
    return Field3D(values, grid, space)


def to_spectral(field: Field3D) -> Field3D:
    if field.space == SPECTRAL:
        return field
    vhat = np.fft.fftn(field.values) * field.grid.quadrature_weight
    return Field3D(vhat, field.grid, SPECTRAL)


def to_physical(field: Field3D) -> Field3D:
    if field.space == PHYSICAL:
        return field
    v = np.fft.ifftn(field.values) / field.grid.quadrature_weight
    return Field3D(v, field.grid, PHYSICAL)


def integrate(field: Field3D) -> complex:
    """h^3 * sum of the physical samples."""
    if field.space != PHYSICAL:
        raise ValueError("integrate expects a physical-space field")
    return complex(field.grid.quadrature_weight * np.sum(field.values))


def apply_multiplier(field: Field3D, symbol, zero_nyquist: bool = False) -> Field3D:
    """Apply a Fourier multiplier and return a field in the input's space.

    `symbol` is either a callable symbol(k1, k2, k3) evaluated on broadcast
    wavenumber arrays, or a precomputed N^3 array in fftn layout.  The
    operation is exactly linear in the field values.
    """
    grid = field.grid
    if callable(symbol):
        k1, k2, k3 = grid.wavenumber_arrays(zero_nyquist=zero_nyquist)
        sym = symbol(k1, k2, k3)
    else:
        sym = symbol
    if field.space == PHYSICAL:
        vhat = np.fft.fftn(field.values)
        out = np.fft.ifftn(sym * vhat)
        return Field3D(out, grid, PHYSICAL)
    return Field3D(sym * field.values, grid, SPECTRAL)


def gradient(field: Field3D):
    """Spectral gradient, returned as three physical-space fields.

    Uses Nyquist-zeroed wavenumbers so the derivative of a real field is
    real to rounding.
    """
    phys = to_physical(field)
    grid = phys.grid
    vhat = np.fft.fftn(phys.values)
    n = grid.n_points_per_axis
    k = (2.0 * np.pi / grid.box_length) * _unit_lattice_odd(n)
    out = []
    for axis in range(3):
        shape = [1, 1, 1]
        shape[axis] = n
        ka = k.reshape(shape)
        out.append(Field3D(np.fft.ifftn(1j * ka * vhat), grid, PHYSICAL))
    return tuple(out)


def dealias(field: Field3D) -> Field3D:
    """Zero all modes outside the 2/3 ball (per axis), preserving the space tag."""
    grid = field.grid
    if field.space == SPECTRAL:
        return Field3D(field.values * grid.dealias_mask, grid, SPECTRAL)
    vhat = np.fft.fftn(field.values)
    vhat *= grid.dealias_mask
    return Field3D(np.fft.ifftn(vhat), grid, PHYSICAL)


def boundary_amplitude(values: np.ndarray) -> float:
    """Max |f| over the six boundary faces of the sample cube."""
    a = np.abs(values)
    return float(max(
        a[0, :, :].max(), a[:, 0, :].max(), a[:, :, 0].max(),
        a[-1, :, :].max(), a[:, -1, :].max(), a[:, :, -1].max(),
    ))


# ---------------------------------------------------------------------------
# resampling helpers


def spectral_resample(values: np.ndarray, n_new: int) -> np.ndarray:
    """Trigonometric interpolation (or truncation) onto an n_new^3 grid.

    Keeps the box length fixed.  Real input comes back real.
    """
    n = values.shape[0]
    if n_new == n:
        return values.copy()
    was_real = np.isrealobj(values)
    fhat = np.fft.fftshift(np.fft.fftn(values))
    if n_new > n:
        out = np.zeros((n_new, n_new, n_new), dtype=np.complex128)
        o = (n_new - n) // 2
        out[o:o + n, o:o + n, o:o + n] = fhat
        fhat = out
    else:
        o = (n - n_new) // 2
        fhat = fhat[o:o + n_new, o:o + n_new, o:o + n_new].copy()
    res = np.fft.ifftn(np.fft.ifftshift(fhat)) * (n_new / n) ** 3
    return res.real if was_real else res


def embed_padded(values: np.ndarray, n_new: int) -> np.ndarray:
    """Zero-pad in physical space, keeping the grid spacing.

    The box grows by the factor n_new/n, which is the standard way to push
    the boundary further from a localized profile without touching its
    resolved structure.
    """
    n = values.shape[0]
    if n_new < n:
        raise ValueError("embed_padded only grows the grid")
    out = np.zeros((n_new, n_new, n_new), dtype=values.dtype)
    o = (n_new - n) // 2
    out[o:o + n, o:o + n, o:o + n] = values
    return out


# ---------------------------------------------------------------------------
# snapshot format
#
# 64-byte little-endian header:
#   bytes 0:4   magic "DNLS"
#   bytes 4:8   format version (u32, currently 1)
#   bytes 8:12  n_points_per_axis (u32)
#   bytes 12:20 box_length (f64)
#   bytes 20:28 simulation time (f64)
#   bytes 28:64 reserved, zero
# followed by n^3 complex double samples (re, im interleaved), row-major.


def write_snapshot(path, field: Field3D, time: float = 0.0) -> None:
    phys = to_physical(field)
    n = phys.grid.n_points_per_axis
    header = _SNAPSHOT_HEADER.pack(
        _SNAPSHOT_MAGIC, _SNAPSHOT_VERSION, n, phys.grid.box_length, float(time)
    )
    data = np.ascontiguousarray(phys.values, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_snapshot(path) -> tuple[Field3D, float]:
    with open(path, "rb") as fh:
        header = fh.read(_SNAPSHOT_HEADER.size)
        magic, version, n, box_length, time = _SNAPSHOT_HEADER.unpack(header)
        if magic != _SNAPSHOT_MAGIC:
            raise ValueError(f"not a field snapshot (bad magic {magic!r})")
        if version != _SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        raw = fh.read(16 * n ** 3)
    if len(raw) != 16 * n ** 3:
        raise ValueError("snapshot payload truncated")
    values = np.frombuffer(raw, dtype="<c16").reshape(n, n, n).astype(np.complex128)
    grid = make_grid(n, box_length)
    return Field3D(values, grid, PHYSICAL), time
