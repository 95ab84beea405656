"""Sweep experiments measuring the approach to the subsonic limit.

A sweep runs the coupled solver across a ladder of sound speeds against
one limit-equation reference computed with the same step-size law as the
slowest run, so that splitting bias is common mode and the fitted
log-log slopes measure the lam asymptotics alone.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import drift, mass, spectral_tail
from .errors import DegenerateInputError, ParameterError
from .field import Field, real_field
from .layer import layer_initial_fields, q_field, q0_exact
from .norms import sobolev_norm
from .dynamics import oracle_evolve, qmnls_evolve, qz_evolve
from .state import InitialData, SimConfig

THREADS_ENV = "QZAK_THREADS"


@dataclass(frozen=True)
class SweepRecord:
    """Per-lam measurements of one sweep run."""

    lam: float
    dt: float
    sup_err_E_Hm: float
    sup_err_Q_Hm: float
    sup_Q_Hm: float
    walltime_s: float
    max_tail_E: float
    mass_drift: float

    def __post_init__(self):
        if min(self.sup_err_E_Hm, self.sup_err_Q_Hm, self.sup_Q_Hm) < 0.0:
            raise ParameterError("sweep errors must be nonnegative")


@dataclass(frozen=True)
class RateFit:
    """Least-squares line through (log lam, log error)."""

    slope: float
    intercept: float
    residual: float
    lambdas: tuple[float, ...]


def _worker_count(n_tasks: int) -> int:
    env = os.environ.get(THREADS_ENV)
    if env is not None:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ParameterError(f"{THREADS_ENV} must be an integer, got {env!r}") from exc
        if cap < 1:
            raise ParameterError(f"{THREADS_ENV} must be >= 1, got {cap}")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def _run_one_lambda(config: SimConfig, data: InitialData, m: int,
                    reference_E: list[np.ndarray], f0: Field,
                    eps: float) -> SweepRecord:
    start = time.perf_counter()
    traj = qz_evolve(config, data)
    grid = config.grid
    sup_err_E = 0.0
    sup_err_Q = 0.0
    sup_Q = 0.0
    max_tail = 0.0
    masses = []
    for (t, state), E_inf in zip(traj.samples, reference_E):
        diff = Field(grid, state.E.rep, state.E.values - E_inf)
        sup_err_E = max(sup_err_E, sobolev_norm(diff, m))
        q = q_field(state, eps)
        q0 = q0_exact(t, config.lam, eps, f0)
        sup_Q = max(sup_Q, sobolev_norm(q, m))
        sup_err_Q = max(sup_err_Q, sobolev_norm(
            real_field(grid, q.values - q0.values), m))
        max_tail = max(max_tail, spectral_tail(state.E, 2.0 / 3.0))
        masses.append(mass(state.E))
    return SweepRecord(lam=config.lam, dt=config.dt,
                       sup_err_E_Hm=sup_err_E, sup_err_Q_Hm=sup_err_Q,
                       sup_Q_Hm=sup_Q, walltime_s=time.perf_counter() - start,
                       max_tail_E=max_tail, mass_drift=drift(masses))


def lambda_sweep(config: SimConfig, data: InitialData, lambdas, m: int,
                 parallel: bool = True) -> list[SweepRecord]:
    """Run the ladder of sound speeds against one common reference.

    The reference uses the step-size law of the smallest lam so its
    discretization bias is shared by every run.
    """
    lambdas = [float(l) for l in lambdas]
    if lambdas != sorted(lambdas) or any(l < 1.0 for l in lambdas):
        raise ParameterError("lambda list must be sorted with every entry >= 1")
    if data.grid != config.grid:
        raise ParameterError("data grid does not match config grid")

    ref_config = replace(config, lam=lambdas[0])
    ref_traj = qmnls_evolve(ref_config, data.E0)
    reference_E = [s.E.values for s in ref_traj.states]
    f0, _ = layer_initial_fields(data, config.eps)

    configs = [replace(config, lam=lam) for lam in lambdas]
    if parallel and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=_worker_count(len(configs))) as pool:
            records = list(pool.map(
                lambda c: _run_one_lambda(c, data, m, reference_E, f0, config.eps),
                configs))
    else:
        records = [_run_one_lambda(c, data, m, reference_E, f0, config.eps)
                   for c in configs]
    return sorted(records, key=lambda r: r.lam)


def fit_rate(records: list[SweepRecord], which: str = "E-error") -> RateFit:
    """Fit log(error) against log(lam); residual is the max |deviation|."""
    if which == "E-error":
        errors = [r.sup_err_E_Hm for r in records]
    elif which == "Q-error":
        errors = [r.sup_err_Q_Hm for r in records]
    elif which == "Q-norm":
        errors = [r.sup_Q_Hm for r in records]
    else:
        raise ParameterError(f"which must be 'E-error', 'Q-error' or 'Q-norm', got {which!r}")
    lams = [r.lam for r in records]
    if len(records) < 3:
        raise DegenerateInputError("rate fit needs at least 3 records")
    if any(e <= 0.0 for e in errors):
        raise DegenerateInputError("rate fit needs strictly positive errors")
    xs = np.log(lams)
    ys = np.log(errors)
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = float(np.max(np.abs(ys - (slope * xs + intercept))))
    return RateFit(slope=float(slope), intercept=float(intercept),
                   residual=residual, lambdas=tuple(lams))


@dataclass(frozen=True)
class SelfConvergence:
    """Step-refinement study against the finest-dt reference."""

    dts: tuple[float, ...]
    errors: tuple[float, ...]
    order: float


def self_convergence(config: SimConfig, data: InitialData, dt_list,
                     target: str = "qz") -> SelfConvergence:
    """Measure the splitting order from final states at T.

    The last entry of dt_list is the reference; every dt must divide T.
    """
    dts = [float(dt) for dt in dt_list]
    if len(dts) < 4:
        raise ParameterError("dt list needs >= 4 entries (>= 3 plus the reference)")
    if any(b >= a for a, b in zip(dts, dts[1:])):
        raise ParameterError("dt list must be strictly decreasing")
    for dt in dts:
        steps = config.T / dt
        if abs(steps - round(steps)) > 1e-9 * steps:
            raise ParameterError(f"dt {dt} does not divide T = {config.T}")

    def final_E(dt: float) -> np.ndarray:
        run = replace(config, dt0=dt, c_lam=dt * config.lam,
                      sample_times=(config.T,))
        if target == "qz":
            return qz_evolve(run, data).final_state().E.values
        return qmnls_evolve(run, data.E0).final_state().E.values

    reference = final_E(dts[-1])
    errors = []
    for dt in dts[:-1]:
        diff = real_field(config.grid, np.abs(final_E(dt) - reference))
        errors.append(sobolev_norm(diff, 0))
    if min(errors) <= 0.0:
        # exact substeps (e.g. purely linear data) leave nothing to fit
        return SelfConvergence(dts=tuple(dts[:-1]), errors=tuple(errors),
                               order=float("nan"))
    xs = np.log(dts[:-1])
    ys = np.log(errors)
    order = float(np.polyfit(xs, ys, 1)[0])
    return SelfConvergence(dts=tuple(dts[:-1]), errors=tuple(errors), order=order)


def oracle_discrepancy(config: SimConfig, data: InitialData,
                       refinement: int = 50) -> float:
    """L^2 distance between the split final state and the RK4 oracle's."""
    split = qz_evolve(replace(config, sample_times=(config.T,)), data).final_state()
    reference = oracle_evolve(config, data, target="qz", refinement=refinement)
    diff = real_field(config.grid, np.abs(split.E.values - reference.E.values))
    n_diff = real_field(config.grid, split.n.values - reference.n.values)
    return float(np.hypot(sobolev_norm(diff, 0), sobolev_norm(n_diff, 0)))
