"""Periodic-box grids and their wavenumber lattices."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridSpecError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on the centered box [-L/2, L/2)^d.

    The wavenumber lattice per axis is xi_j = 2*pi*j/L for integer
    j in [-N/2, N/2), stored in FFT order.
    """

    d: int
    N: int
    L: float

    def __post_init__(self):
        if self.d not in (1, 2):
            raise GridSpecError(f"dimension must be 1 or 2, got {self.d}")
        if not isinstance(self.N, int) or not _is_power_of_two(self.N) or self.N < 16:
            raise GridSpecError(f"N must be a power of two >= 16, got {self.N}")
        if not (self.L > 0):
            raise GridSpecError(f"box length must be positive, got {self.L}")

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N**self.d

    @property
    def cell_volume(self) -> float:
        return self.dx**self.d

    @cached_property
    def wavenumbers_1d(self) -> np.ndarray:
        """Wavenumber axis 2*pi*j/L in FFT order, j in [-N/2, N/2)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.dx)

    @cached_property
    def mode_indices_1d(self) -> np.ndarray:
        """Integer mode indices j in FFT order."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(int)

    @cached_property
    def wavenumber_mesh(self) -> tuple[np.ndarray, ...]:
        """Per-axis wavenumber arrays broadcast to the full grid shape."""
        k = self.wavenumbers_1d
        if self.d == 1:
            return (k,)
        return tuple(np.meshgrid(k, k, indexing="ij"))

    @cached_property
    def k_squared(self) -> np.ndarray:
        """|xi|^2 on the full lattice."""
        return sum(k**2 for k in self.wavenumber_mesh)

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Per-axis signed coordinates in [-L/2, L/2), broadcast to the grid."""
        x = -0.5 * self.L + self.dx * np.arange(self.N)
        if self.d == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    @cached_property
    def radius_from_center(self) -> np.ndarray:
        """|x| measured from the box center."""
        return np.sqrt(sum(x**2 for x in self.coordinates))


def make_grid(d: int, N: int, L: float) -> Grid:
    """Build a validated periodic grid."""
    return Grid(d=d, N=int(N), L=float(L))
