"""Time integrators for the coupled system and its subsonic limit.

The coupled solver is a symmetric (palindromic) splitting whose wave
substep is exact for the source frozen over the step: with Q = n +
I_eps S and S = |E|^2 held fixed, Q satisfies a free fourth-order wave
equation and is rotated mode-by-mode by the (cos, sinc) propagator
pair. Freezing S at the half-evolved envelope keeps the composition
time-symmetric, hence second order. All E substeps are unitary, so the
discrete mass is conserved to rounding regardless of dt or lam.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import InstabilityError, NonFiniteFieldError, ParameterError, ResolutionError
from .field import Field, complex_field, dealias_mask, real_field
from .grid import Grid
from .operators import omega_eps_values, wave_sinc_values
from .state import InitialData, SchrodingerState, SimConfig, ZakharovState

_LANDING_TOL = 1e-12
_RK4_IMAG_AXIS_LIMIT = 2.8

Hook = Callable[[ZakharovState], float]


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of an evolution at the requested sample times."""

    config: SimConfig
    samples: tuple
    hook_series: dict

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.samples]

    @property
    def states(self) -> list:
        return [s for _, s in self.samples]

    def final_state(self):
        return self.samples[-1][1]


class _QZKernel:
    """Symbol arrays for one (grid, eps, lam, dt) step."""

    __slots__ = ("dt", "schrod_half", "cos", "sinc", "lam_om_sin", "i_eps", "mask")

    def __init__(self, grid: Grid, eps: float, lam: float, dt: float, dealias: bool):
        k2 = grid.k_squared
        om = omega_eps_values(grid, eps)
        self.dt = dt
        self.schrod_half = np.exp(-0.5j * dt * (k2 + eps * eps * k2 * k2))
        self.cos = np.cos(lam * dt * om)
        self.sinc = wave_sinc_values(grid, eps, lam, dt)
        self.lam_om_sin = lam * om * np.sin(lam * dt * om)
        self.i_eps = 1.0 / (1.0 + eps * eps * k2)
        self.mask = dealias_mask(grid) if dealias else None


class _QMNLSKernel:
    __slots__ = ("dt", "schrod", "i_eps", "mask")

    def __init__(self, grid: Grid, eps: float, dt: float, dealias: bool):
        k2 = grid.k_squared
        self.dt = dt
        self.schrod = np.exp(-1j * dt * (k2 + eps * eps * k2 * k2))
        self.i_eps = 1.0 / (1.0 + eps * eps * k2)
        self.mask = dealias_mask(grid) if dealias else None


@lru_cache(maxsize=512)
def _qz_kernel(grid: Grid, eps: float, lam: float, dt: float, dealias: bool) -> _QZKernel:
    return _QZKernel(grid, eps, lam, dt, dealias)


@lru_cache(maxsize=512)
def _qmnls_kernel(grid: Grid, eps: float, dt: float, dealias: bool) -> _QMNLSKernel:
    return _QMNLSKernel(grid, eps, dt, dealias)


def _qz_step_arrays(E: np.ndarray, n: np.ndarray, nt: np.ndarray,
                    kern: _QZKernel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    dt = kern.dt
    # Palindromic sequence: kick / half linear / exact wave / half linear
    # / kick. The wave substep reads S at the half-evolved (midpoint)
    # envelope, which keeps the composition symmetric and second order.
    E = E * np.exp(-0.5j * dt * n)
    E = np.fft.ifftn(np.fft.fftn(E) * kern.schrod_half)
    S_hat = np.fft.fftn(np.abs(E) ** 2)
    if kern.mask is not None:
        S_hat = S_hat * kern.mask
    IS_hat = kern.i_eps * S_hat
    Q_hat = np.fft.fftn(n) + IS_hat
    Qt_hat = np.fft.fftn(nt)
    Q_new = kern.cos * Q_hat + kern.sinc * Qt_hat
    Qt_new = -kern.lam_om_sin * Q_hat + kern.cos * Qt_hat
    n = np.fft.ifftn(Q_new - IS_hat).real
    nt = np.fft.ifftn(Qt_new).real
    E = np.fft.ifftn(np.fft.fftn(E) * kern.schrod_half)
    E = E * np.exp(-0.5j * dt * n)
    return E, n, nt


def _check_finite(t: float, **arrays: np.ndarray) -> None:
    for name, arr in arrays.items():
        if not np.all(np.isfinite(arr)):
            raise NonFiniteFieldError(f"field {name!r} became non-finite at t = {t:.6g}")


def qz_step(s: ZakharovState, dt: float, eps: float, lam: float,
            dealias: bool = True) -> ZakharovState:
    """One Strang step of the coupled system; dt may be negative."""
    if dt == 0.0:
        raise ParameterError("dt must be nonzero")
    kern = _qz_kernel(s.grid, float(eps), float(lam), float(dt), bool(dealias))
    E, n, nt = _qz_step_arrays(s.E.values.astype(np.complex128), s.n.values,
                               s.nt.values, kern)
    t = s.t + dt
    _check_finite(t, E=E, n=n)
    return ZakharovState(t=t, E=complex_field(s.grid, E),
                         n=real_field(s.grid, n), nt=real_field(s.grid, nt))


def _qmnls_step_arrays(E: np.ndarray, kern: _QMNLSKernel) -> np.ndarray:
    def potential(field):
        S_hat = np.fft.fftn(np.abs(field) ** 2)
        if kern.mask is not None:
            S_hat = S_hat * kern.mask
        return -np.fft.ifftn(kern.i_eps * S_hat).real

    dt = kern.dt
    E = E * np.exp(-0.5j * dt * potential(E))
    E = np.fft.ifftn(np.fft.fftn(E) * kern.schrod)
    E = E * np.exp(-0.5j * dt * potential(E))
    return E


def qmnls_step(s: SchrodingerState, dt: float, eps: float,
               dealias: bool = True) -> SchrodingerState:
    """One Strang step of the limit equation; dt may be negative."""
    if dt == 0.0:
        raise ParameterError("dt must be nonzero")
    kern = _qmnls_kernel(s.grid, float(eps), float(dt), bool(dealias))
    E = _qmnls_step_arrays(s.E.values.astype(np.complex128), kern)
    t = s.t + dt
    _check_finite(t, E=E)
    return SchrodingerState(t=t, E=complex_field(s.grid, E))


def _tail_fraction(grid: Grid, coeffs: np.ndarray, fraction: float = 2.0 / 3.0) -> float:
    j = np.abs(grid.mode_indices_1d)
    outer = j >= fraction * grid.N / 2.0
    sel = outer if grid.d == 1 else np.logical_or.outer(outer, outer)
    total = np.sum(np.abs(coeffs) ** 2)
    if total == 0.0:
        return 0.0
    return float(np.sum(np.abs(coeffs[sel]) ** 2) / total)


def _march(config: SimConfig, step_arrays, arrays: dict, make_state,
           hooks: dict[str, Hook] | None, tail_threshold: float | None,
           tail_key: str, make_kernel):
    """Shared stepping loop landing exactly on every sample time."""
    dt = config.dt
    samples = []
    hook_series: dict[str, list] = {name: [] for name in (hooks or {})}
    t = 0.0
    targets = list(config.sample_times)
    if not targets or abs(targets[-1] - config.T) > _LANDING_TOL:
        targets.append(config.T)
    if targets[0] <= _LANDING_TOL:
        samples.append((0.0, make_state(0.0, arrays)))
        targets = targets[1:]
    tol = _LANDING_TOL * max(1.0, config.T)
    for target in targets:
        while t < target - tol:
            h = min(dt, target - t)
            step_arrays(arrays, make_kernel(h))
            t += h
            for name, arr in arrays.items():
                if not np.all(np.isfinite(arr)):
                    raise NonFiniteFieldError(
                        f"field {name!r} became non-finite at t = {t:.6g}")
            if hooks:
                state = make_state(t, arrays)
                for name, fn in hooks.items():
                    hook_series[name].append((t, fn(state)))
        t = target
        if tail_threshold is not None:
            frac = _tail_fraction(config.grid, np.fft.fftn(arrays[tail_key]))
            if frac > tail_threshold:
                raise ResolutionError(
                    f"spectral tail fraction {frac:.3e} above threshold "
                    f"{tail_threshold:.3e} at t = {t:.6g}")
        samples.append((t, make_state(t, arrays)))
    return samples, hook_series


def qz_evolve(config: SimConfig, data: InitialData,
              hooks: dict[str, Hook] | None = None,
              tail_threshold: float | None = None) -> Trajectory:
    """Evolve the coupled system, snapshotting at the config's sample times."""
    if data.grid != config.grid:
        raise ParameterError("initial data grid does not match config grid")
    arrays = {
        "E": data.E0.values.astype(np.complex128),
        "n": data.n0.values.copy(),
        "nt": data.n1.values.copy(),
    }

    def step(arrs, kern):
        arrs["E"], arrs["n"], arrs["nt"] = _qz_step_arrays(arrs["E"], arrs["n"],
                                                           arrs["nt"], kern)

    def make_state(t, arrs):
        return ZakharovState(t=t, E=complex_field(config.grid, arrs["E"]),
                             n=real_field(config.grid, arrs["n"]),
                             nt=real_field(config.grid, arrs["nt"]))

    def make_kernel(h):
        return _qz_kernel(config.grid, config.eps, config.lam, h, config.dealias)

    samples, series = _march(config, step, arrays, make_state, hooks,
                             tail_threshold, "E", make_kernel)
    return Trajectory(config=config, samples=tuple(samples), hook_series=series)


def qmnls_evolve(config: SimConfig, E0: Field,
                 hooks: dict[str, Callable[[SchrodingerState], float]] | None = None,
                 tail_threshold: float | None = None) -> Trajectory:
    """Evolve the limit equation from envelope E0."""
    if E0.grid != config.grid:
        raise ParameterError("E0 grid does not match config grid")
    arrays = {"E": E0.values.astype(np.complex128)}

    def step(arrs, kern):
        arrs["E"] = _qmnls_step_arrays(arrs["E"], kern)

    def make_state(t, arrs):
        return SchrodingerState(t=t, E=complex_field(config.grid, arrs["E"]))

    def make_kernel(h):
        return _qmnls_kernel(config.grid, config.eps, h, config.dealias)

    samples, series = _march(config, step, arrays, make_state, hooks,
                             tail_threshold, "E", make_kernel)
    return Trajectory(config=config, samples=tuple(samples), hook_series=series)


def oracle_evolve(config: SimConfig, data: InitialData, target: str = "qz",
                  refinement: int = 50, max_points: int = 64):
    """Unsplit RK4 reference integration in spectral coefficients.

    Intended for tiny grids only; refuses step sizes outside the RK4
    imaginary-axis stability region.
    """
    grid = config.grid
    if target not in ("qz", "qmnls"):
        raise ParameterError(f"oracle target must be 'qz' or 'qmnls', got {target!r}")
    if grid.d != 1:
        raise ParameterError("oracle_evolve supports d=1 only")
    if grid.N > max_points:
        raise ParameterError(f"oracle_evolve limited to N <= {max_points} (got {grid.N})")
    if refinement < 50:
        raise ParameterError("oracle refinement must be >= 50 substeps per dt")
    if data.grid != grid:
        raise ParameterError("initial data grid does not match config grid")

    dt_oracle = config.dt / refinement
    n_steps = max(1, round(config.T / dt_oracle))
    dt_oracle = config.T / n_steps

    k2 = grid.k_squared
    delta = -(k2 + config.eps**2 * k2 * k2)
    rate = max(config.lam * float(np.max(omega_eps_values(grid, config.eps))),
               float(np.max(-delta)))
    if rate * dt_oracle > _RK4_IMAG_AXIS_LIMIT:
        raise InstabilityError(
            f"oracle step {dt_oracle:.3e} violates the RK4 stability bound; "
            f"requires dt <= {_RK4_IMAG_AXIS_LIMIT / rate:.3e}")

    mask = dealias_mask(grid) if config.dealias else None
    i_eps = 1.0 / (1.0 + config.eps**2 * k2)

    def deal(coeffs):
        return coeffs * mask if mask is not None else coeffs

    if target == "qz":
        lam2 = config.lam**2

        def rhs(y):
            E_hat, n_hat, nt_hat = y
            E = np.fft.ifftn(E_hat)
            n = np.fft.ifftn(n_hat).real
            S_hat = deal(np.fft.fftn(np.abs(E) ** 2))
            nE_hat = deal(np.fft.fftn(n * E))
            return (1j * (delta * E_hat - nE_hat),
                    nt_hat,
                    lam2 * (delta * n_hat - k2 * S_hat))

        y = (np.fft.fftn(data.E0.values.astype(np.complex128)),
             np.fft.fftn(data.n0.values).astype(np.complex128),
             np.fft.fftn(data.n1.values).astype(np.complex128))
    else:
        def rhs(y):
            (E_hat,) = y
            E = np.fft.ifftn(E_hat)
            S_hat = deal(np.fft.fftn(np.abs(E) ** 2))
            V = np.fft.ifftn(i_eps * S_hat).real
            VE_hat = deal(np.fft.fftn(V * E))
            return (1j * (delta * E_hat + VE_hat),)

        y = (np.fft.fftn(data.E0.values.astype(np.complex128)),)

    h = dt_oracle
    for _ in range(n_steps):
        k1 = rhs(y)
        k2_ = rhs(tuple(a + 0.5 * h * b for a, b in zip(y, k1)))
        k3 = rhs(tuple(a + 0.5 * h * b for a, b in zip(y, k2_)))
        k4 = rhs(tuple(a + h * b for a, b in zip(y, k3)))
        y = tuple(a + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
                  for a, b1, b2, b3, b4 in zip(y, k1, k2_, k3, k4))

    if target == "qz":
        E = np.fft.ifftn(y[0])
        n = np.fft.ifftn(y[1]).real
        nt = np.fft.ifftn(y[2]).real
        _check_finite(config.T, E=E, n=n)
        return ZakharovState(t=config.T, E=complex_field(grid, E),
                             n=real_field(grid, n), nt=real_field(grid, nt))
    E = np.fft.ifftn(y[0])
    _check_finite(config.T, E=E)
    return SchrodingerState(t=config.T, E=complex_field(grid, E))
