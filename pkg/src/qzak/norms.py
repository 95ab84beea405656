"""Discrete L^2, Sobolev, and weighted norms.

All physical-space functionals carry the measure (L/N)^d so that they
agree with spectral sums via Plancherel.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .field import Field, ensure_physical, ensure_spectral
from .operators import derivative_fields


def l2_norm(f: Field) -> float:
    """Discrete L^2 norm, identical in either representation."""
    if f.is_spectral:
        return float(np.sqrt(np.sum(np.abs(f.values) ** 2)))
    return float(np.sqrt(f.grid.cell_volume * np.sum(np.abs(f.values) ** 2)))


def sobolev_norm(f: Field, m: int) -> float:
    """Bessel-weighted H^m norm (sum_xi (1+|xi|^2)^m |fhat|^2)^(1/2)."""
    if m < 0:
        raise ParameterError(f"Sobolev index must be >= 0, got {m}")
    spec = ensure_spectral(f)
    weight = (1.0 + f.grid.k_squared) ** m
    return float(np.sqrt(np.sum(weight * np.abs(spec.values) ** 2)))


def weighted_norm(f: Field, ell: int, k: int) -> float:
    """|| |x|^ell grad^k f ||_L2 with the weight taken from the box center."""
    if ell < 0 or k < 0:
        raise ParameterError("weighted_norm requires ell >= 0 and k >= 0")
    grid = f.grid
    weight = grid.radius_from_center**ell if ell > 0 else 1.0
    total = 0.0
    for comp in derivative_fields(f, k):
        vals = ensure_physical(comp).values
        total += grid.cell_volume * np.sum(np.abs(weight * vals) ** 2)
    return float(np.sqrt(total))


def derivative_norm_sum(f: Field, m: int) -> float:
    """Brute-force sum_{k<=m} ||grad^k f||_L2 used to cross-check H^m."""
    total = 0.0
    for k in range(m + 1):
        comps = derivative_fields(f, k)
        total += np.sqrt(sum(l2_norm(c) ** 2 for c in comps))
    return float(total)
