import numpy as np
import pytest

from dataclasses import replace

from qzak import (PresetParams, SimConfig, SweepRecord, fit_rate,
                  lambda_sweep, make_grid, preset_initial_data,
                  self_convergence)
from qzak.errors import DegenerateInputError, ParameterError
from qzak.harness import oracle_discrepancy


def small_sweep_setup():
    g = make_grid(1, 256, 20.0 * np.pi)
    cfg = SimConfig(eps=1.0, lam=4.0, T=0.25, grid=g, dt0=1e-3, c_lam=0.2, m=2,
                    sample_times=tuple(np.linspace(0.0, 0.25, 17)))
    params = PresetParams(amplitude=0.4, width=2.0, n_amplitude=0.5, n_width=2.2,
                          n_k0=1.6, n_center=(0.0,), n1_amplitude=0.3,
                          n1_width=2.0, n1_center=(-2.0,))
    data = preset_initial_data("generic", params, g, eps=1.0)
    return cfg, data


def synthetic_records(errors, lams):
    return [SweepRecord(lam=lam, dt=1e-3, sup_err_E_Hm=e, sup_err_Q_Hm=e,
                        sup_Q_Hm=1.0, walltime_s=0.0, max_tail_E=0.0,
                        mass_drift=0.0)
            for lam, e in zip(lams, errors)]


def test_sweep_errors_decrease_and_start_zero():
    cfg, data = small_sweep_setup()
    records = lambda_sweep(cfg, data, [4.0, 8.0, 16.0], 2, parallel=False)
    errs = [r.sup_err_E_Hm for r in records]
    assert errs[0] > errs[1] > errs[2] > 0.0
    assert all(r.mass_drift <= 1e-10 for r in records)
    assert all(r.dt <= 0.2 / r.lam + 1e-15 for r in records)


def test_sweep_deterministic_and_parallel_equivalent():
    cfg, data = small_sweep_setup()
    seq = lambda_sweep(cfg, data, [4.0, 8.0, 16.0], 2, parallel=False)
    par = lambda_sweep(cfg, data, [4.0, 8.0, 16.0], 2, parallel=True)
    for a, b in zip(seq, par):
        assert a.lam == b.lam
        assert a.sup_err_E_Hm == b.sup_err_E_Hm
        assert a.sup_err_Q_Hm == b.sup_err_Q_Hm
        assert a.sup_Q_Hm == b.sup_Q_Hm


def test_sweep_resolution_robustness():
    # doubling N or L moves each recorded error by < 5%
    cfg, data = small_sweep_setup()
    base = lambda_sweep(cfg, data, [4.0, 8.0], 2, parallel=False)
    for N, L in ((512, 20.0 * np.pi), (512, 40.0 * np.pi)):
        g2 = make_grid(1, N, L)
        cfg2 = replace(cfg, grid=g2)
        params = PresetParams(amplitude=0.4, width=2.0, n_amplitude=0.5,
                              n_width=2.2, n_k0=1.6, n_center=(0.0,),
                              n1_amplitude=0.3, n1_width=2.0, n1_center=(-2.0,))
        data2 = preset_initial_data("generic", params, g2, eps=1.0)
        other = lambda_sweep(cfg2, data2, [4.0, 8.0], 2, parallel=False)
        for a, b in zip(base, other):
            assert abs(a.sup_err_E_Hm - b.sup_err_E_Hm) < 0.05 * a.sup_err_E_Hm
            assert abs(a.sup_err_Q_Hm - b.sup_err_Q_Hm) < 0.05 * a.sup_err_Q_Hm


def test_sweep_rejects_unsorted(grid256):
    cfg, data = small_sweep_setup()
    with pytest.raises(ParameterError):
        lambda_sweep(cfg, data, [8.0, 4.0], 2)


def test_fit_exact_power_laws():
    lams = [4.0, 8.0, 16.0]
    fit = fit_rate(synthetic_records([0.25, 0.125, 0.0625], lams), "E-error")
    assert np.isclose(fit.slope, -1.0, atol=1e-12)
    assert fit.residual < 1e-12
    fit2 = fit_rate(synthetic_records([1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0], lams),
                    "Q-error")
    assert np.isclose(fit2.slope, -2.0, atol=1e-12)


def test_fit_lambda2_log_flattens():
    lams = [4.0, 8.0, 16.0, 32.0, 64.0]
    errors = [np.log(l) / l**2 for l in lams]
    fit = fit_rate(synthetic_records(errors, lams), "E-error")
    assert -2.0 < fit.slope < -1.5


def test_fit_degenerate_inputs():
    lams = [4.0, 8.0]
    with pytest.raises(DegenerateInputError):
        fit_rate(synthetic_records([0.1, 0.05], lams), "E-error")
    with pytest.raises(DegenerateInputError):
        fit_rate(synthetic_records([0.1, 0.0, 0.1], [4.0, 8.0, 16.0]), "E-error")
    with pytest.raises(ParameterError):
        fit_rate(synthetic_records([0.1, 0.05, 0.02], [4.0, 8.0, 16.0]), "bogus")


def test_self_convergence_linear_regime_machine_zero():
    from qzak import InitialData, complex_field, real_field
    g = make_grid(1, 64, 2.0 * np.pi)
    x = g.coordinates[0]
    zero = real_field(g, np.zeros(64))
    data = InitialData(E0=complex_field(g, np.zeros(64, complex)),
                       n0=real_field(g, np.cos(x)), n1=zero)
    cfg = SimConfig(eps=1.0, lam=4.0, T=0.2, grid=g, dt0=1e-3,
                    sample_times=(0.2,))
    result = self_convergence(cfg, data, [4e-3, 2e-3, 1e-3, 5e-4])
    assert max(result.errors) < 1e-12


def test_self_convergence_nonlinear_second_order():
    cfg, data = small_sweep_setup()
    cfg = replace(cfg, lam=8.0)
    result = self_convergence(cfg, data, [5e-3, 2.5e-3, 1.25e-3, 3.125e-4])
    assert 1.8 <= result.order <= 2.2


def test_self_convergence_validates_dts():
    cfg, data = small_sweep_setup()
    with pytest.raises(ParameterError):
        self_convergence(cfg, data, [1e-3, 2e-3, 4e-3, 8e-3])
    with pytest.raises(ParameterError):
        self_convergence(cfg, data, [3e-3, 2e-3, 1e-3, 5e-4])  # 3e-3 !| 0.25


def test_oracle_discrepancy_small():
    g = make_grid(1, 32, 8.0 * np.pi)
    params = PresetParams(amplitude=1.0, n_amplitude=0.5, n1_amplitude=0.3,
                          width=3.0, n_width=3.0, n1_width=3.0,
                          min_points_per_width=3.0, edge_tol=1e-7)
    data = preset_initial_data("generic", params, g, eps=1.0)
    cfg = SimConfig(eps=1.0, lam=4.0, T=0.1, grid=g, dt0=1e-3, dealias=False,
                    sample_times=(0.1,))
    assert oracle_discrepancy(cfg, data) <= 1e-5


def acceptance_scale_setup(eps=1.0):
    g = make_grid(1, 1024, 40.0 * np.pi)
    cfg = SimConfig(eps=eps, lam=8.0, T=0.5, grid=g, dt0=1e-3, c_lam=0.2, m=2)
    params = PresetParams(amplitude=0.25, width=1.75, n_amplitude=0.5,
                          n_width=2.2, n_k0=1.6, n_center=(0.0,),
                          n1_amplitude=0.3, n1_width=2.0, n1_center=(-2.0,))
    return cfg, preset_initial_data("generic", params, g, eps=eps)


def test_slopes_persist_across_eps():
    # constants move with eps, the fitted rate does not (within 0.2)
    slopes = []
    for eps in (0.5, 1.0):
        cfg, data = acceptance_scale_setup(eps)
        records = lambda_sweep(cfg, data, [8.0, 16.0, 32.0], 2)
        slopes.append(fit_rate(records, "E-error").slope)
    assert abs(slopes[0] - slopes[1]) <= 0.2


def test_sup_error_insensitive_to_dt_halving():
    # accuracy-dictated step law: halving dt moves the reported sup by < 2%
    cfg, data = acceptance_scale_setup()
    errs = []
    for dt0 in (1e-3, 5e-4):
        run = replace(cfg, lam=64.0, dt0=dt0, c_lam=64.0 * dt0)
        errs.append(lambda_sweep(run, data, [64.0], 2,
                                 parallel=False)[0].sup_err_E_Hm)
    assert abs(errs[0] - errs[1]) <= 0.02 * errs[1]


def test_sup_error_insensitive_to_sampling_density():
    cfg, data = acceptance_scale_setup()
    sups = []
    for ns in (64, 128):
        run = replace(cfg, lam=64.0,
                      sample_times=tuple(np.linspace(0.0, cfg.T, ns)))
        sups.append(lambda_sweep(run, data, [64.0], 2,
                                 parallel=False)[0].sup_err_E_Hm)
    assert abs(sups[0] - sups[1]) <= 0.02 * sups[1]


def test_threads_env_validation(monkeypatch):
    cfg, data = small_sweep_setup()
    monkeypatch.setenv("QZAK_THREADS", "not-a-number")
    with pytest.raises(ParameterError):
        lambda_sweep(cfg, data, [4.0, 8.0, 16.0], 2, parallel=True)
    monkeypatch.setenv("QZAK_THREADS", "1")
    records = lambda_sweep(cfg, data, [4.0, 8.0], 2, parallel=True)
    assert len(records) == 2
