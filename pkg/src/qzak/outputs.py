"""Result persistence: CSV tables, rate fits, binary snapshots, plot scripts.

The sweep CSV schema is fixed: header
``lambda,dt,sup_err_E_Hm,sup_err_Q_Hm,sup_Q_Hm,walltime_s``, '.' decimal
separator, line-feed terminators. Snapshots are flat little-endian
64-bit arrays (complex interleaved re/im) with a plain-text sidecar.
Given the same in-memory results, every writer is byte-deterministic.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dynamics import Trajectory
from .errors import OutputError
from .harness import RateFit, SelfConvergence, SweepRecord
from .layer import DecayProbeReport

ARTIFACT_VERSION = "0.1.0"

SWEEP_HEADER = "lambda,dt,sup_err_E_Hm,sup_err_Q_Hm,sup_Q_Hm,walltime_s"


def _fmt(x: float) -> str:
    return repr(float(x))


def _ensure_dir(out_dir) -> Path:
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out_dir}: {exc}") from exc
    return path


def write_manifest(out_dir, resolved_config: dict, files: list[str]) -> Path:
    path = _ensure_dir(out_dir) / "manifest.json"
    payload = {
        "artifact": "qzak",
        "version": ARTIFACT_VERSION,
        "config": resolved_config,
        "files": sorted(files),
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def write_error(out_dir, message: str) -> None:
    try:
        (_ensure_dir(out_dir) / "error.txt").write_text(message + "\n")
    except OutputError:
        pass


def write_sweep_csv(out_dir, records: list[SweepRecord]) -> Path:
    path = _ensure_dir(out_dir) / "sweep.csv"
    lines = [SWEEP_HEADER]
    for r in records:
        lines.append(",".join(_fmt(v) for v in (
            r.lam, r.dt, r.sup_err_E_Hm, r.sup_err_Q_Hm, r.sup_Q_Hm,
            round(r.walltime_s, 3))))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_ratefit(out_dir, fit: RateFit, name: str = "ratefit.json") -> Path:
    path = _ensure_dir(out_dir) / name
    payload = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "lambdas": list(fit.lambdas),
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def write_snapshots(out_dir, traj: Trajectory, stem: str = "snapshots") -> list[str]:
    """Dump trajectory fields as flat binary arrays plus a text sidecar."""
    out = _ensure_dir(out_dir)
    grid = traj.config.grid
    states = traj.states
    files = []

    def dump(name: str, stack: np.ndarray, dtype: str):
        fname = f"{stem}_{name}.bin"
        stack.astype(dtype).tofile(out / fname)
        files.append(fname)
        return fname, dtype

    entries = [dump("E", np.stack([s.E.values for s in states]), "<c16")]
    if hasattr(states[0], "n"):
        entries.append(dump("n", np.stack([s.n.values for s in states]), "<f8"))
        entries.append(dump("nt", np.stack([s.nt.values for s in states]), "<f8"))

    sidecar = [
        "layout: row-major, little-endian, 64-bit floats",
        "complex: interleaved real/imag (numpy dtype <c16)",
        f"dimension: {grid.d}",
        f"N: {grid.N}",
        f"L: {_fmt(grid.L)}",
        f"num_snapshots: {len(states)}",
        "times: " + ",".join(_fmt(t) for t in traj.times),
        "shape_per_snapshot: " + "x".join(str(n) for n in grid.shape),
    ]
    for fname, dtype in entries:
        sidecar.append(f"file: {fname} dtype={dtype}")
    meta = f"{stem}_meta.txt"
    (out / meta).write_text("\n".join(sidecar) + "\n")
    files.append(meta)
    return files


def read_snapshots(out_dir, stem: str = "snapshots") -> dict[str, np.ndarray]:
    """Round-trip reader for the binary snapshot files."""
    out = Path(out_dir)
    meta = (out / f"{stem}_meta.txt").read_text().splitlines()
    info = {}
    file_dtypes = {}
    for line in meta:
        key, _, rest = line.partition(":")
        if key == "file":
            name, dtype_part = rest.strip().split(" dtype=")
            file_dtypes[name] = dtype_part
        else:
            info[key.strip()] = rest.strip()
    count = int(info["num_snapshots"])
    shape = tuple(int(n) for n in info["shape_per_snapshot"].split("x"))
    arrays = {}
    for name, dtype in file_dtypes.items():
        flat = np.fromfile(out / name, dtype=dtype)
        field_name = name[len(stem) + 1:-4]
        arrays[field_name] = flat.reshape((count,) + shape)
    arrays["times"] = np.array([float(t) for t in info["times"].split(",")])
    return arrays


def write_plot_script(out_dir, records: list[SweepRecord]) -> Path:
    """Emit a gnuplot script for the log-log errors with reference slopes."""
    out = _ensure_dir(out_dir)
    lam0 = records[0].lam
    c1 = records[0].sup_err_E_Hm * lam0
    c2 = records[0].sup_err_E_Hm * lam0**2
    script = f"""# log-log sweep errors with reference slopes -1 and -2
set terminal pngcairo size 900,600
set output 'sweep.png'
set datafile separator ','
set logscale xy
set key left bottom
set xlabel 'lambda'
set ylabel 'sup_t error (H^m)'
plot 'sweep.csv' skip 1 using 1:3 with linespoints pt 7 title 'E error', \\
     'sweep.csv' skip 1 using 1:4 with linespoints pt 5 title 'Q - Q0 error', \\
     'sweep.csv' skip 1 using 1:5 with linespoints pt 9 title 'Q norm', \\
     {_fmt(c1)}/x with lines dashtype 2 title 'slope -1', \\
     {_fmt(c2)}/x**2 with lines dashtype 3 title 'slope -2'
"""
    path = out / "plots.gp"
    path.write_text(script)
    return path


def write_decay_report(out_dir, reports: list[DecayProbeReport]) -> list[str]:
    out = _ensure_dir(out_dir)
    lines = ["lambda,t,lambda_t,x0,region,k,sup_abs,weighted_sup"]
    for rep in reports:
        for row in rep.rows:
            for k, (v, w) in enumerate(zip(row.sup_by_k, row.weighted_sup_by_k)):
                lines.append(",".join([
                    _fmt(rep.lam), _fmt(row.t), _fmt(row.lam_t), _fmt(row.x0),
                    row.region, str(k), _fmt(v), _fmt(w)]))
    (out / "decay.csv").write_text("\n".join(lines) + "\n")
    payload = {
        "per_lambda": [
            {"lambda": rep.lam,
             "inner_exponent": rep.inner_exponent,
             "outer_envelope_factor": rep.outer_envelope_factor}
            for rep in reports
        ],
    }
    (out / "decayfit.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return ["decay.csv", "decayfit.json"]


def write_outputs(out_dir, records: list[SweepRecord], resolved_config: dict,
                  fits: dict[str, RateFit] | None = None,
                  trajectory: Trajectory | None = None,
                  emit_plots: bool = True) -> list[str]:
    """Persist a sweep's full file set and its manifest.

    Writes sweep.csv, ratefit.json (E error), ratefit_q.json (corrected
    density error), optional binary snapshots, and the plot script.
    Returns the list of files written (manifest included).
    """
    files = []
    write_sweep_csv(out_dir, records)
    files.append("sweep.csv")
    fits = fits or {}
    write_ratefit(out_dir, fits["E"], "ratefit.json")
    files.append("ratefit.json")
    if "Q" in fits:
        write_ratefit(out_dir, fits["Q"], "ratefit_q.json")
        files.append("ratefit_q.json")
    if trajectory is not None:
        files.extend(write_snapshots(out_dir, trajectory))
    if emit_plots:
        write_plot_script(out_dir, records)
        files.append("plots.gp")
    write_manifest(out_dir, resolved_config, files + ["manifest.json"])
    return files + ["manifest.json"]


def write_selfconv(out_dir, result: SelfConvergence) -> list[str]:
    out = _ensure_dir(out_dir)
    lines = ["dt,error"]
    for dt, err in zip(result.dts, result.errors):
        lines.append(f"{_fmt(dt)},{_fmt(err)}")
    (out / "selfconv.csv").write_text("\n".join(lines) + "\n")
    payload = {"order": result.order, "dts": list(result.dts),
               "errors": list(result.errors)}
    (out / "selfconv.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return ["selfconv.csv", "selfconv.json"]
