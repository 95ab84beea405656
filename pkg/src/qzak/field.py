"""Sampled fields and the unitary-normalized transform pair.

Normalization fixes discrete Plancherel with the physical measure
(L/N)^d: sum_x |f(x)|^2 (L/N)^d == sum_xi |fhat(xi)|^2, so norms of
resolved fields match their continuum integrals.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import InconsistentGridError, RepresentationError
from .grid import Grid

_REAL_IMAG_TOL = 1e-12


class Rep(Enum):
    PHYSICAL_REAL = "physical-real"
    PHYSICAL_COMPLEX = "physical-complex"
    SPECTRAL = "spectral"


class Field:
    """Immutable sampled function on a grid, physical or spectral."""

    __slots__ = ("grid", "rep", "values")

    def __init__(self, grid: Grid, rep: Rep, values: np.ndarray):
        values = np.asarray(values)
        if values.shape != grid.shape:
            raise InconsistentGridError(
                f"values shape {values.shape} does not match grid shape {grid.shape}"
            )
        if rep is Rep.PHYSICAL_REAL:
            if np.iscomplexobj(values):
                if np.any(values.imag != 0.0):
                    raise RepresentationError("physical-real field has nonzero imaginary part")
                values = values.real
            values = values.astype(np.float64, copy=True)
        else:
            values = values.astype(np.complex128, copy=True)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "rep", rep)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @property
    def is_physical(self) -> bool:
        return self.rep in (Rep.PHYSICAL_REAL, Rep.PHYSICAL_COMPLEX)

    @property
    def is_spectral(self) -> bool:
        return self.rep is Rep.SPECTRAL

    def __repr__(self):
        return f"Field(d={self.grid.d}, N={self.grid.N}, L={self.grid.L:g}, rep={self.rep.value})"


def real_field(grid: Grid, values: np.ndarray) -> Field:
    return Field(grid, Rep.PHYSICAL_REAL, values)


def complex_field(grid: Grid, values: np.ndarray) -> Field:
    return Field(grid, Rep.PHYSICAL_COMPLEX, values)


def spectral_field(grid: Grid, values: np.ndarray) -> Field:
    return Field(grid, Rep.SPECTRAL, values)


def zeros_like(f: Field) -> Field:
    return Field(f.grid, f.rep, np.zeros(f.grid.shape))


def _forward_factor(grid: Grid) -> float:
    # fhat = L^{d/2} / N^d * FFT(f), which makes Plancherel exact.
    return grid.L ** (grid.d / 2.0) / grid.size


def forward_values(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Raw-array forward transform with the package normalization."""
    return np.fft.fftn(values) * _forward_factor(grid)


def inverse_values(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Raw-array inverse transform (complex output)."""
    return np.fft.ifftn(coeffs) / _forward_factor(grid)


def to_spectral(f: Field) -> Field:
    """Forward transform; requires a physical-representation field."""
    if not f.is_physical:
        raise RepresentationError("to_spectral expects a physical field")
    return Field(f.grid, Rep.SPECTRAL, forward_values(f.grid, f.values))


def to_physical(f: Field) -> Field:
    """Inverse transform; lands on physical-real when conjugate symmetry holds."""
    if not f.is_spectral:
        raise RepresentationError("to_physical expects a spectral field")
    phys = inverse_values(f.grid, f.values)
    scale = np.max(np.abs(phys))
    if scale == 0.0 or np.max(np.abs(phys.imag)) <= _REAL_IMAG_TOL * scale:
        return Field(f.grid, Rep.PHYSICAL_REAL, phys.real)
    return Field(f.grid, Rep.PHYSICAL_COMPLEX, phys)


def ensure_spectral(f: Field) -> Field:
    return f if f.is_spectral else to_spectral(f)


def ensure_physical(f: Field) -> Field:
    return f if f.is_physical else to_physical(f)


def dealias_mask(grid: Grid) -> np.ndarray:
    """2/3-rule retention mask: keep per-axis mode indices |j| <= N/3."""
    j = np.abs(grid.mode_indices_1d)
    keep = j <= grid.N / 3.0
    if grid.d == 1:
        return keep
    return np.logical_and.outer(keep, keep)


def dealias(f: Field) -> Field:
    """Zero all coefficients with any axis index |j| > N/3. Idempotent."""
    if not f.is_spectral:
        raise RepresentationError("dealias expects a spectral field")
    return Field(f.grid, Rep.SPECTRAL, f.values * dealias_mask(f.grid))


def dealias_values(grid: Grid, phys_values: np.ndarray) -> np.ndarray:
    """Dealias a physical-space product, returning physical values."""
    coeffs = np.fft.fftn(phys_values)
    coeffs *= dealias_mask(grid)
    out = np.fft.ifftn(coeffs)
    if not np.iscomplexobj(phys_values):
        return out.real
    return out


def require_same_grid(*fields: Field) -> Grid:
    grid = fields[0].grid
    for g in fields[1:]:
        if g.grid != grid:
            raise InconsistentGridError("fields live on different grids")
    return grid
