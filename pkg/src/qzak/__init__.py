"""Pseudo-spectral solvers and experiments for the quantum Zakharov
system and its subsonic (large sound speed) limit on periodic boxes."""

__version__ = "0.1.0"

from .grid import Grid, make_grid
from .field import (Field, Rep, complex_field, dealias, real_field,
                    spectral_field, to_physical, to_spectral)
from .operators import MultiplierKind, apply_multiplier, multiplier_symbol
from .norms import l2_norm, sobolev_norm, weighted_norm
from .state import (InitialData, PresetParams, SchrodingerState, SimConfig,
                    ZakharovState, compatibility_defect, preset_initial_data)
from .dynamics import (Trajectory, oracle_evolve, qmnls_evolve, qmnls_step,
                       qz_evolve, qz_step)
from .layer import (DecayProbeReport, LayerDecomposition, compute_f2,
                    decay_probe, layer_decompose, q0_exact, q1_exact, q_field)
from .diagnostics import (hamiltonian_qmnls, hamiltonian_qz, mass, n_variable,
                          spectral_tail, weighted_envelope)
from .harness import (RateFit, SelfConvergence, SweepRecord, fit_rate,
                      lambda_sweep, oracle_discrepancy, self_convergence)
from .config import ExperimentConfig, parse_config
from .cli import run_cli

__all__ = [
    "Grid", "make_grid",
    "Field", "Rep", "real_field", "complex_field", "spectral_field",
    "to_spectral", "to_physical", "dealias",
    "MultiplierKind", "apply_multiplier", "multiplier_symbol",
    "l2_norm", "sobolev_norm", "weighted_norm",
    "SimConfig", "ZakharovState", "SchrodingerState", "InitialData",
    "PresetParams", "preset_initial_data", "compatibility_defect",
    "Trajectory", "qz_step", "qz_evolve", "qmnls_step", "qmnls_evolve",
    "oracle_evolve",
    "q_field", "q0_exact", "q1_exact", "layer_decompose",
    "LayerDecomposition", "compute_f2", "decay_probe", "DecayProbeReport",
    "mass", "hamiltonian_qz", "hamiltonian_qmnls", "n_variable",
    "spectral_tail", "weighted_envelope",
    "SweepRecord", "RateFit", "SelfConvergence", "lambda_sweep", "fit_rate",
    "self_convergence", "oracle_discrepancy",
    "ExperimentConfig", "parse_config", "run_cli",
]
