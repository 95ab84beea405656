"""Dynamical state, run configuration, and Gaussian initial-data presets.

Preset kinds:

    generic        independent envelope and density bumps; the density
                   error carries a genuine fast layer.
    compatible     n0 = -I_eps |E0|^2, n1 = 0, so the layer vanishes at t=0.
    well-prepared  additionally n1 = -2 Im(E0 conj(Delta_eps E0)), killing
                   the sine component of the layer as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ResolutionError
from .field import (Field, Rep, complex_field, dealias_values, real_field,
                    require_same_grid)
from .grid import Grid
from .norms import l2_norm, sobolev_norm
from .operators import MultiplierKind, apply_multiplier

MEAN_TOL = 1e-12
COMPAT_TOL = 1e-10


@dataclass(frozen=True)
class SimConfig:
    """Parameters of a single evolution run."""

    eps: float
    lam: float
    T: float
    grid: Grid
    dt0: float = 1e-3
    c_lam: float = 0.2
    m: int = 2
    dealias: bool = True
    sample_times: tuple[float, ...] = ()

    def __post_init__(self):
        if not (0.0 < self.eps <= 1.0):
            raise ParameterError(f"eps must lie in (0, 1], got {self.eps}")
        if not (self.lam >= 1.0):
            raise ParameterError(f"lam must satisfy lam >= 1, got {self.lam}")
        if not (self.T > 0.0):
            raise ParameterError(f"T must be positive, got {self.T}")
        if not (self.dt0 > 0.0 and self.c_lam > 0.0):
            raise ParameterError("dt0 and c_lam must be positive")
        if self.m < 0:
            raise ParameterError(f"m must be >= 0, got {self.m}")
        times = tuple(float(t) for t in self.sample_times)
        if not times:
            times = tuple(np.linspace(0.0, self.T, 64))
        if any(t < 0.0 or t > self.T + 1e-12 for t in times) or list(times) != sorted(times):
            raise ParameterError("sample times must be sorted within [0, T]")
        object.__setattr__(self, "sample_times", times)

    @property
    def dt(self) -> float:
        return min(self.dt0, self.c_lam / self.lam)


@dataclass(frozen=True)
class ZakharovState:
    """Full state (t, E, n, dn/dt) of the coupled system."""

    t: float
    E: Field
    n: Field
    nt: Field

    def __post_init__(self):
        require_same_grid(self.E, self.n, self.nt)
        if self.n.rep is not Rep.PHYSICAL_REAL or self.nt.rep is not Rep.PHYSICAL_REAL:
            raise ParameterError("n and nt must be physical-real fields")
        if not self.E.is_physical:
            raise ParameterError("E must be a physical field")

    @property
    def grid(self) -> Grid:
        return self.E.grid


@dataclass(frozen=True)
class SchrodingerState:
    """State (t, E) of the limit equation."""

    t: float
    E: Field

    @property
    def grid(self) -> Grid:
        return self.E.grid


@dataclass(frozen=True)
class InitialData:
    """Initial triple (E0, n0, n1) with its compatibility tag."""

    E0: Field
    n0: Field
    n1: Field
    kind: str = "generic"

    def __post_init__(self):
        require_same_grid(self.E0, self.n0, self.n1)
        if self.kind not in ("generic", "compatible", "well-prepared"):
            raise ParameterError(f"unknown data kind {self.kind!r}")
        if self.n0.rep is not Rep.PHYSICAL_REAL or self.n1.rep is not Rep.PHYSICAL_REAL:
            raise ParameterError("n0 and n1 must be physical-real fields")
        norm = l2_norm(self.n1)
        mean = abs(np.mean(self.n1.values))
        if norm > 0.0 and mean > MEAN_TOL * max(norm, 1.0):
            raise ParameterError("n1 must have zero mean (homogeneous H^-1 membership)")

    @property
    def grid(self) -> Grid:
        return self.E0.grid

    def initial_state(self) -> ZakharovState:
        return ZakharovState(t=0.0, E=self.E0, n=self.n0, nt=self.n1)


@dataclass(frozen=True)
class PresetParams:
    """Gaussian-family parameters for the initial-data presets."""

    amplitude: float = 1.0
    width: float = 2.0
    k0: float = 0.0
    chirp: float = 0.0
    center: tuple[float, ...] = (0.0,)
    n_amplitude: float = 0.5
    n_width: float = 3.0
    n_k0: float = 0.0
    n_center: tuple[float, ...] = (0.0,)
    n1_amplitude: float = 0.3
    n1_width: float = 3.0
    n1_center: tuple[float, ...] = (0.0,)
    n0_zero_mean: bool = False
    min_points_per_width: float = 8.0
    edge_tol: float = 1e-12


def _gaussian(grid: Grid, amplitude: float, width: float, center: tuple[float, ...]) -> np.ndarray:
    center = tuple(center) + (0.0,) * (grid.d - len(center))
    r2 = sum((x - c) ** 2 for x, c in zip(grid.coordinates, center))
    return amplitude * np.exp(-r2 / width**2)


def _check_resolution(grid: Grid, width: float, center: tuple[float, ...],
                      params: PresetParams) -> None:
    if width < params.min_points_per_width * grid.dx:
        raise ResolutionError(
            f"Gaussian width {width:g} is under-resolved: needs >= "
            f"{params.min_points_per_width:g} points per width (dx = {grid.dx:g})"
        )
    center = tuple(center) + (0.0,) * (grid.d - len(center))
    margin = min(grid.L / 2.0 - abs(c) for c in center)
    if margin <= 0.0 or np.exp(-((margin / width) ** 2)) > params.edge_tol:
        raise ResolutionError(
            f"box too small: Gaussian of width {width:g} at offset {center} "
            f"exceeds edge tolerance {params.edge_tol:g}"
        )


def minus_ieps_intensity(E0: Field, eps: float) -> Field:
    """-I_eps |E0|^2 with the dealiased quadratic product."""
    grid = E0.grid
    intensity = real_field(grid, dealias_values(grid, np.abs(E0.values) ** 2))
    smoothed = apply_multiplier(intensity, MultiplierKind.I_EPS, eps=eps)
    return real_field(grid, -smoothed.values)


def layer_velocity_source(E0: Field, eps: float) -> Field:
    """2 Im(E0 conj(Delta_eps E0)), the envelope part of d/dt Q at t=0."""
    grid = E0.grid
    delta_e = apply_multiplier(E0, MultiplierKind.DELTA_EPS, eps=eps)
    product = dealias_values(grid, E0.values * np.conj(delta_e.values))
    return real_field(grid, 2.0 * np.imag(product))


def preset_initial_data(kind: str, params: PresetParams, grid: Grid, eps: float) -> InitialData:
    """Deterministic Gaussian initial data for the three regimes."""
    if kind not in ("generic", "compatible", "well-prepared"):
        raise ParameterError(f"unknown preset kind {kind!r}")
    if not (0.0 < eps <= 1.0):
        raise ParameterError(f"eps must lie in (0, 1], got {eps}")

    _check_resolution(grid, params.width, params.center, params)
    envelope = _gaussian(grid, params.amplitude, params.width, params.center)
    center = tuple(params.center) + (0.0,) * (grid.d - len(params.center))
    phase = params.k0 * (grid.coordinates[0] - center[0])
    if params.chirp != 0.0:
        phase = phase + params.chirp * sum(
            (x - c) ** 2 for x, c in zip(grid.coordinates, center)
        )
    E0 = complex_field(grid, envelope * np.exp(1j * phase))

    if kind == "generic":
        _check_resolution(grid, params.n_width, params.n_center, params)
        _check_resolution(grid, params.n1_width, params.n1_center, params)
        n0_vals = _gaussian(grid, params.n_amplitude, params.n_width, params.n_center)
        if params.n_k0 != 0.0:
            n_center = tuple(params.n_center) + (0.0,) * (grid.d - len(params.n_center))
            n0_vals = n0_vals * np.cos(params.n_k0 * (grid.coordinates[0] - n_center[0]))
        if params.n0_zero_mean:
            n0_vals = n0_vals - np.mean(n0_vals)
        n1_center = tuple(params.n1_center) + (0.0,) * (grid.d - len(params.n1_center))
        bump = _gaussian(grid, params.n1_amplitude, params.n1_width, params.n1_center)
        n1_vals = bump * (-2.0 * (grid.coordinates[0] - n1_center[0]) / params.n1_width**2)
        n0 = real_field(grid, n0_vals)
        n1 = real_field(grid, _remove_tiny_mean(n1_vals))
        return InitialData(E0=E0, n0=n0, n1=n1, kind=kind)

    n0 = minus_ieps_intensity(E0, eps)
    if kind == "compatible":
        n1 = real_field(grid, np.zeros(grid.shape))
    else:
        n1 = real_field(grid, _remove_tiny_mean(-layer_velocity_source(E0, eps).values))
    data = InitialData(E0=E0, n0=n0, n1=n1, kind=kind)
    defect = compatibility_defect(data, eps, 0)
    scale = l2_norm(n0) + l2_norm(E0) ** 2
    if scale > 0.0 and defect > COMPAT_TOL * scale:
        raise ParameterError(f"{kind} preset failed its compatibility identity "
                             f"(defect {defect:.3e})")
    return data


def _remove_tiny_mean(values: np.ndarray) -> np.ndarray:
    mean = np.mean(values)
    if abs(mean) > MEAN_TOL:
        return values - mean
    return values


def compatibility_defect(data: InitialData, eps: float, m: int) -> float:
    """H^m size of n0 + I_eps |E0|^2 (zero exactly for compatible data)."""
    grid = data.grid
    residual = data.n0.values - minus_ieps_intensity(data.E0, eps).values
    return sobolev_norm(real_field(grid, residual), m)
