"""Single runs, ensembles, scaled-time collapse and Gaussian decay fits."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULT_R_OVER_A, DEFAULT_REPLICATES, EnsembleConfig, RunConfig
from .electrostatics import (
    CharacteristicTimes, build_coupling_table, build_energy_table, characteristic_times,
)
from .geometry import Geometry, sample_geometry
from .observables import (
    BPRV_BELL, BPRV_BOUND, BPRV_CLASSICAL, CHSH_BELL, CHSH_BOUND, CHSH_CLASSICAL,
    bprv_correlator, check_density, chsh_correlator, entanglement_of_formation,
    reduced_pair_series, von_neumann_entropy,
)
from .quantum import InitialStateSpec, build_initial_state, random_initial_spec

#: (initial value, asymptote, local-realism bound) per observable
ENDPOINTS = {
    "chsh": (CHSH_BELL, CHSH_CLASSICAL, CHSH_BOUND),
    "bprv": (BPRV_BELL, BPRV_CLASSICAL, BPRV_BOUND),
}
COLUMNS = ("t_ps", "t_scaled", "S_chsh", "S_bprv", "entropy_bits", "eof")

TAU_BRACKET = (1e-3, 10.0)
FIT_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class RunRecord:
    config: RunConfig
    geometry: Geometry
    couplings: np.ndarray
    times: CharacteristicTimes | None
    initial: InitialStateSpec
    time_scale_ps: float
    """tau_E, or 1 ps when the environment is empty and tau_E is undefined."""
    t_ps: np.ndarray
    t_scaled: np.ndarray
    chsh: np.ndarray
    bprv: np.ndarray
    entropy: np.ndarray
    eof: np.ndarray

    @property
    def seed(self):
        return self.config.seed

    @property
    def r_over_a(self):
        return self.config.r_over_a

    def series(self, observable: str) -> np.ndarray:
        return {"chsh": self.chsh, "bprv": self.bprv, "entropy": self.entropy, "eof": self.eof}[observable]

    def table(self) -> np.ndarray:
        """(n_steps, 6) array in COLUMNS order."""
        return np.column_stack([self.t_ps, self.t_scaled, self.chsh, self.bprv, self.entropy, self.eof])


def run_single(config: RunConfig) -> RunRecord:
    rng = np.random.default_rng(config.seed)
    geom = sample_geometry(config.a_nm, config.r_over_a * config.a_nm, config.n_env, rng, seed=config.seed)
    J = build_coupling_table(geom)
    E = build_energy_table(J)
    if config.n_env:
        times = characteristic_times(J)
        scale = times.tau_E
    else:
        times, scale = None, 1.0
    spec = random_initial_spec(config.n_env, rng, config.mode)
    psi0 = build_initial_state(config.n_env, spec)

    t_ps = np.linspace(0.0, config.t_max, config.n_steps) * scale
    rho = check_density(reduced_pair_series(psi0, E, t_ps))
    settings = config.settings
    return RunRecord(
        config=config, geometry=geom, couplings=J, times=times, initial=spec,
        time_scale_ps=scale, t_ps=t_ps, t_scaled=t_ps / scale,
        chsh=chsh_correlator(rho, settings), bprv=bprv_correlator(rho, settings),
        entropy=von_neumann_entropy(rho), eof=entanglement_of_formation(rho),
    )


def iter_runs(configs, workers=1):
    """Yield (config, RunRecord or exception) in input order."""
    configs = list(configs)
    if workers <= 1 or len(configs) <= 1:
        for cfg in configs:
            yield cfg, _guarded(cfg)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from zip(configs, pool.map(_guarded, configs))


def _guarded(cfg):
    try:
        return run_single(cfg)
    except Exception as exc:  # reported per run by the caller
        return exc


def run_ensemble(r_over_a=DEFAULT_R_OVER_A, replicates=DEFAULT_REPLICATES, base_seed=0,
                 workers=1, **run_options) -> list[RunRecord]:
    """Run every (R/a, replicate) pair; raises the first failure."""
    cfg = EnsembleConfig(r_over_a=tuple(r_over_a), replicates=replicates, base_seed=base_seed,
                         workers=workers, **run_options)
    records = []
    for _, result in iter_runs(cfg.run_configs(), workers):
        if isinstance(result, Exception):
            raise result
        records.append(result)
    return records


def first_crossing(x, y, threshold) -> float:
    """Earliest x where y first drops below ``threshold``, linearly interpolated; nan if never."""
    x, y = np.asarray(x), np.asarray(y)
    below = np.flatnonzero(y < threshold)
    if below.size == 0:
        return math.nan
    i = below[0]
    if i == 0:
        return float(x[0])
    x0, x1, y0, y1 = x[i - 1], x[i], y[i - 1], y[i]
    return float(x0 + (threshold - y0) * (x1 - x0) / (y1 - y0))


def crossings(records, observable="chsh") -> np.ndarray:
    thr = ENDPOINTS[observable][2]
    return np.array([first_crossing(r.t_scaled, r.series(observable), thr) for r in records])


def collapse_metric(records, observable="chsh", x_max=5.0, n_points=100, scaled=True):
    """Pointwise standard deviation across records on a common time grid.

    With ``scaled`` the grid is t/tau_E in [0, x_max]; otherwise it is in ps,
    spanning [0, x_max * median tau_E]. Returns (grid, spread).
    """
    records = list(records)
    if len(records) < 2:
        raise ValueError("insufficient records: collapse metric needs at least 2")
    if scaled:
        grid = np.linspace(0.0, x_max, n_points)
        curves = [np.interp(grid, r.t_scaled, r.series(observable)) for r in records]
    else:
        span = x_max * float(np.median([r.time_scale_ps for r in records]))
        grid = np.linspace(0.0, span, n_points)
        curves = [np.interp(grid, r.t_ps, r.series(observable)) for r in records]
    return grid, np.std(curves, axis=0)


def gaussian_decay(x, tau, observable="chsh"):
    s0, s_inf, _ = ENDPOINTS[observable]
    return s_inf + (s0 - s_inf) * np.exp(-np.asarray(x) ** 2 / (2.0 * tau * tau))


@dataclass(frozen=True)
class FitResult:
    observable: str
    tau_opt_over_tauE: float
    residual_rms: float
    crossing_chsh: float
    crossing_bprv: float
    n_records: int

    def to_dict(self):
        return asdict(self)


def fit_tau(x, y, observable="chsh", bracket=TAU_BRACKET) -> tuple[float, float]:
    """Least-squares width of the fixed-endpoint Gaussian; returns (tau, residual RMS)."""
    x, y = np.asarray(x, float), np.asarray(y, float)

    def loss(tau):
        r = gaussian_decay(x, tau, observable) - y
        return float(np.dot(r, r))

    lo, hi = bracket
    grid = np.geomspace(lo, hi, 241)
    vals = [loss(t) for t in grid]
    i = int(np.argmin(vals))
    if i == 0 or i == len(grid) - 1:
        raise RuntimeError(f"Gaussian width search did not converge inside {bracket} (best at {grid[i]:.4g})")
    a, b = grid[i - 1], grid[i + 1]
    res = minimize_scalar(loss, bounds=(a, b), method="bounded",
                          options={"xatol": FIT_RTOL * 0.1 * a, "maxiter": 500})
    if not res.success:
        raise RuntimeError(f"Gaussian width search failed: {res.message}")
    tau = float(res.x)
    return tau, math.sqrt(loss(tau) / len(x))


def fit_gaussian(records, observable="chsh") -> FitResult:
    """Pooled fit over every (t/tau_E, S) sample of every record."""
    records = list(records)
    if not records:
        raise ValueError("fit_gaussian needs at least one record")
    if observable not in ENDPOINTS:
        raise ValueError(f"observable must be 'chsh' or 'bprv', got {observable!r}")
    x = np.concatenate([r.t_scaled for r in records])
    y = np.concatenate([r.series(observable) for r in records])
    tau, rms = fit_tau(x, y, observable)
    return FitResult(
        observable=observable, tau_opt_over_tauE=tau, residual_rms=rms,
        crossing_chsh=_nanmean(crossings(records, "chsh")),
        crossing_bprv=_nanmean(crossings(records, "bprv")),
        n_records=len(records),
    )


def fits_by_r_over_a(records, observable="chsh") -> dict[float, FitResult]:
    groups: dict[float, list] = {}
    for r in records:
        groups.setdefault(r.r_over_a, []).append(r)
    return {ra: fit_gaussian(g, observable) for ra, g in sorted(groups.items())}


def window_mean(record, observable, lo=5.0, hi=10.0) -> float:
    """Time average of a series over lo <= t/tau_E <= hi."""
    m = (record.t_scaled >= lo) & (record.t_scaled <= hi)
    return float(record.series(observable)[m].mean())


def _nanmean(v):
    v = np.asarray(v, float)
    return float(np.nanmean(v)) if np.isfinite(v).any() else math.nan
