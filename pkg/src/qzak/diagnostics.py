"""Conserved and monitored functionals.

Every functional uses the same (L/N)^d measure as the norms, so values
are comparable across resolutions and drifts are meaningful.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .field import (Field, dealias_values, ensure_spectral, forward_values,
                    spectral_field)
from .norms import l2_norm, weighted_norm
from .operators import check_zero_mean, omega_eps_values
from .state import ZakharovState


def mass(E: Field) -> float:
    """Squared L^2 norm of the envelope; exactly conserved by both solvers."""
    return l2_norm(E) ** 2


def hamiltonian_qz(s: ZakharovState, eps: float, lam: float) -> float:
    """Energy of the coupled system.

    ||grad E||^2 + eps^2 ||Lap E||^2 + (1/2) lam^-2 ||d_t invgrad n||^2
    + (1/2) ||n||^2 + (eps^2/2) ||grad n||^2 + int n |E|^2 dx
    """
    grid = s.grid
    k2 = grid.k_squared
    E_hat = ensure_spectral(s.E).values
    n_hat = ensure_spectral(s.n).values
    nt_hat = ensure_spectral(s.nt).values
    check_zero_mean(nt_hat, "hamiltonian_qz (d_t n term)")

    grad_E = float(np.sum(k2 * np.abs(E_hat) ** 2))
    lap_E = float(np.sum(k2**2 * np.abs(E_hat) ** 2))
    inv_grad_nt = np.zeros_like(k2)
    nz = k2 > 0.0
    inv_grad_nt[nz] = np.abs(nt_hat[nz]) ** 2 / k2[nz]
    wave_kinetic = float(np.sum(inv_grad_nt))
    n_l2 = float(np.sum(np.abs(n_hat) ** 2))
    grad_n = float(np.sum(k2 * np.abs(n_hat) ** 2))
    intensity = dealias_values(grid, np.abs(s.E.values) ** 2)
    coupling = float(grid.cell_volume * np.sum(s.n.values * intensity))

    return (grad_E + eps**2 * lap_E + 0.5 * wave_kinetic / lam**2
            + 0.5 * n_l2 + 0.5 * eps**2 * grad_n + coupling)


def hamiltonian_qmnls(E: Field, eps: float) -> float:
    """Energy of the limit equation.

    (1/2)||grad E||^2 + (eps^2/2)||Lap E||^2
    - (1/4) int |E|^2 (1 - eps^2 Lap)^-1 |E|^2 dx
    """
    grid = E.grid
    k2 = grid.k_squared
    E_hat = ensure_spectral(E).values
    grad_E = float(np.sum(k2 * np.abs(E_hat) ** 2))
    lap_E = float(np.sum(k2**2 * np.abs(E_hat) ** 2))
    S_hat = forward_values(grid, dealias_values(grid, np.abs(E.values) ** 2))
    quartic = float(np.sum(np.abs(S_hat) ** 2 / (1.0 + eps**2 * k2)))
    return 0.5 * grad_E + 0.5 * eps**2 * lap_E - 0.25 * quartic


def n_variable(s: ZakharovState, eps: float, lam: float) -> Field:
    """First-order complex wave variable n + i (lam omega_eps)^-1 d_t n.

    Its per-mode modulus is exactly invariant under the free wave flow;
    along the coupled flow its H^1 size stays bounded uniformly in lam.
    """
    grid = s.grid
    n_hat = ensure_spectral(s.n).values
    nt_hat = ensure_spectral(s.nt).values
    check_zero_mean(nt_hat, "n_variable")
    om = omega_eps_values(grid, eps)
    coeffs = n_hat.astype(np.complex128, copy=True)
    nz = om > 0.0
    coeffs[nz] += 1j * nt_hat[nz] / (lam * om[nz])
    return spectral_field(grid, coeffs)


def spectral_tail(f: Field, fraction: float) -> float:
    """Energy fraction carried by per-axis mode indices |j| >= fraction*N/2."""
    if not (0.0 < fraction < 1.0):
        raise ParameterError(f"fraction must lie in (0, 1), got {fraction}")
    grid = f.grid
    coeffs = ensure_spectral(f).values
    j = np.abs(grid.mode_indices_1d)
    outer = j >= fraction * grid.N / 2.0
    sel = outer if grid.d == 1 else np.logical_or.outer(outer, outer)
    total = float(np.sum(np.abs(coeffs) ** 2))
    if total == 0.0:
        return 0.0
    return float(np.sum(np.abs(coeffs[sel]) ** 2) / total)


def weighted_envelope(E: Field, l_max: int, k_max: int) -> float:
    """Sum of || |x|^l grad^k E || over l <= l_max, k <= k_max.

    Monitors the localization of the envelope along a run; stays bounded
    uniformly in lam for localized data.
    """
    return float(sum(weighted_norm(E, ell, k)
                     for ell in range(l_max + 1) for k in range(k_max + 1)))


def drift(series: list[float]) -> float:
    """Max relative drift |v - v0| / |v0| over a sampled functional."""
    if not series:
        return 0.0
    v0 = series[0]
    scale = abs(v0)
    if scale == 0.0:
        return float(max(abs(v) for v in series))
    return float(max(abs(v - v0) for v in series) / scale)
