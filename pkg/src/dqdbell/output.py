"""Time-series CSV, run metadata JSON, ensemble summaries and plot-ready data.

CSV numbers use 12 significant digits (``%.12g``), ``.`` as decimal separator
and LF line endings, so files are byte-stable for a given backend.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .electrostatics import CharacteristicTimes
from .ensemble import (
    COLUMNS, ENDPOINTS, RunRecord, collapse_metric, crossings, fit_gaussian, fits_by_r_over_a,
    gaussian_decay, window_mean,
)
from .geometry import Geometry
from .quantum import InitialStateSpec

PLOT_FILES = ("chsh_unscaled.csv", "chsh_scaled.csv", "bprv_scaled.csv", "entropy_eof.csv")
FIT_CURVE_POINTS = 200


def fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v + 0.0, ".12g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (float, np.floating)):
        return None if not math.isfinite(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, indent=2, allow_nan=False)
        fh.write("\n")


def write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([x if isinstance(x, str) else fmt(x) for x in row])


def write_run_csv(path, record: RunRecord):
    write_rows(path, COLUMNS, record.table())


def run_metadata(record: RunRecord) -> dict:
    return {
        "software": {"name": "dqdbell", "version": __version__},
        "config": record.config.to_dict(),
        "geometry": record.geometry.to_dict(),
        "couplings_eV": record.couplings,
        "characteristic_times": None if record.times is None else record.times.to_dict(),
        "time_scale_ps": record.time_scale_ps,
        "initial_state": record.initial.to_dict(),
        "columns": list(COLUMNS),
        "units": {"length": "nm", "energy": "eV", "time": "ps", "entropy": "bits"},
    }


def write_run(csv_path, meta_path, record: RunRecord):
    write_run_csv(csv_path, record)
    write_json(meta_path, run_metadata(record))


def load_run(csv_path, meta_path) -> RunRecord:
    """Rebuild a RunRecord from its CSV and metadata files."""
    with open(meta_path) as fh:
        meta = json.load(fh)
    cfg = meta["config"]
    config = RunConfig(**{**cfg, "chsh_angles": tuple(cfg["chsh_angles"]),
                          "bprv_angles": tuple(cfg["bprv_angles"])})
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    ct = meta["characteristic_times"]
    ini = meta["initial_state"]
    return RunRecord(
        config=config,
        geometry=Geometry.from_dict(meta["geometry"]),
        couplings=np.array(meta["couplings_eV"], dtype=float),
        times=None if ct is None else CharacteristicTimes(**ct),
        initial=InitialStateSpec(tuple(ini["theta"]), tuple(ini["phi"]), ini["mode"]),
        time_scale_ps=meta["time_scale_ps"],
        t_ps=data[:, 0], t_scaled=data[:, 1], chsh=data[:, 2], bprv=data[:, 3],
        entropy=data[:, 4], eof=data[:, 5],
    )


def run_file_stem(index: int, record_or_config) -> str:
    cfg = getattr(record_or_config, "config", record_or_config)
    return f"run_{index:03d}_ra{fmt(cfg.r_over_a)}_seed{cfg.seed}"


def _stats(values):
    v = np.asarray(values, float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return {"mean": None, "std": None, "n": 0}
    return {"mean": float(v.mean()), "std": float(v.std()), "n": int(v.size)}


def summarize(records, failures=(), config=None, runs=()) -> dict:
    """Summary document for an ensemble; ``failures`` holds (config, message) pairs."""
    records = list(records)
    out = {
        "software": {"name": "dqdbell", "version": __version__},
        "config": None if config is None else config.to_dict(),
        "n_runs_ok": len(records),
        "failed": [{"seed": c.seed, "r_over_a": c.r_over_a, "error": msg} for c, msg in failures],
        "runs": list(runs),
    }
    if not records:
        return out
    fits, by_ra, errors = {}, {}, {}
    for obs in ("chsh", "bprv"):
        try:
            fits[obs] = fit_gaussian(records, obs).to_dict()
            by_ra[obs] = {fmt(k): v.tau_opt_over_tauE for k, v in fits_by_r_over_a(records, obs).items()}
        except RuntimeError as exc:
            errors[obs] = str(exc)
    out["fits"] = fits
    out["fits_by_r_over_a"] = by_ra
    if errors:
        out["fit_errors"] = errors
    out["crossings"] = {obs: _stats(crossings(records, obs)) for obs in ("chsh", "bprv")}
    out["asymptotes"] = {
        obs: _stats([window_mean(r, obs) for r in records])
        for obs in ("chsh", "bprv", "entropy", "eof")
    }
    out["asymptotes"]["window_scaled"] = [5.0, 10.0]
    if len(records) >= 2:
        grid, spread = collapse_metric(records, "chsh")
        out["collapse"] = {
            "observable": "chsh", "x_max": 5.0, "n_points": len(grid),
            "max_spread": float(spread.max()), "spread": spread,
        }
    else:
        out["collapse"] = {"omitted": "insufficient records"}
    return out


def load_directory(path):
    """Records and summary (or None) from a simulate/ensemble output directory."""
    path = Path(path)
    summary = None
    pairs = []
    if (path / "summary.json").exists():
        with open(path / "summary.json") as fh:
            summary = json.load(fh)
        pairs = [(path / r["csv"], path / r["meta"]) for r in summary.get("runs", [])]
    else:
        for csv_path in sorted(path.glob("*.csv")):
            meta = csv_path.with_suffix(".json")
            if meta.exists():
                pairs.append((csv_path, meta))
    if not pairs:
        raise FileNotFoundError(f"no run CSV/JSON pairs found under {path}")
    return [load_run(c, m) for c, m in pairs], summary


def _label(r):
    return f"R/a={fmt(r.r_over_a)} seed={r.seed}"


def plot_rows(records, summary=None) -> dict[str, list]:
    """Long-format (series, x, y) rows for each plot-data file."""
    records = list(records)
    taus = {}
    for obs in ("chsh", "bprv"):
        fit = (summary or {}).get("fits", {}).get(obs)
        if fit is not None:
            taus[obs] = fit["tau_opt_over_tauE"]
        else:
            try:
                taus[obs] = fit_gaussian(records, obs).tau_opt_over_tauE
            except (RuntimeError, ValueError):
                pass
    x_scaled_max = max(float(r.t_scaled[-1]) for r in records)
    x_ps_max = max(float(r.t_ps[-1]) for r in records)

    def bundle(obs, scaled):
        rows = []
        for r in records:
            xs = r.t_scaled if scaled else r.t_ps
            rows += [(_label(r), x, y) for x, y in zip(xs, r.series(obs))]
        return rows

    def extras(obs, x_max, with_fit):
        rows = []
        if with_fit and obs in taus:
            xs = np.linspace(0.0, x_max, FIT_CURVE_POINTS)
            ys = gaussian_decay(xs, taus[obs], obs)
            rows += [(f"gaussian fit tau={fmt(taus[obs])}", x, y) for x, y in zip(xs, ys)]
        bound = ENDPOINTS[obs][2]
        rows += [(f"{obs} local-realism bound", 0.0, bound), (f"{obs} local-realism bound", x_max, bound)]
        return rows

    out = {
        "chsh_unscaled.csv": bundle("chsh", False) + extras("chsh", x_ps_max, False),
        "chsh_scaled.csv": bundle("chsh", True) + extras("chsh", x_scaled_max, True),
        "bprv_scaled.csv": bundle("bprv", True) + extras("bprv", x_scaled_max, True),
    }
    rows = []
    for obs in ("entropy", "eof"):
        for r in records:
            rows += [(f"{obs} {_label(r)}", x, y) for x, y in zip(r.t_scaled, r.series(obs))]
    out["entropy_eof.csv"] = rows
    return out


def write_plot_data(out_dir, records, summary=None) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    for name, rows in plot_rows(records, summary).items():
        write_rows(out_dir / name, ("series", "x", "y"), rows)
        written.append(out_dir / name)
    return written
