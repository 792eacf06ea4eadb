"""Run and ensemble configuration."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields

from .observables import BellSettings
from .quantum import EQUATORIAL, MODES

#: R/a values of the reference 72-run experiment.
DEFAULT_R_OVER_A = (2.5, 3.0, 3.5, 4.0, 5.0, 7.0)
DEFAULT_REPLICATES = 12
#: Environment variable naming the default output directory.
OUTPUT_DIR_ENV = "DQDBELL_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, ".")


@dataclass(frozen=True)
class RunConfig:
    seed: int
    a_nm: float = 1.0
    r_over_a: float = 3.0
    n_env: int = 10
    t_max: float = 10.0
    """End of the time grid in units of tau_E."""
    n_steps: int = 500
    mode: str = EQUATORIAL
    chsh_angles: tuple[float, float, float, float] = BellSettings.chsh
    bprv_angles: tuple[float, float, float] = BellSettings.bprv

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        for name in ("a_nm", "r_over_a", "t_max"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.n_env < 0 or self.n_env % 2:
            raise ConfigError(f"n_env must be even and non-negative, got {self.n_env}")
        if self.n_steps < 2:
            raise ConfigError(f"n_steps must be at least 2, got {self.n_steps}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "chsh_angles", tuple(float(x) for x in self.chsh_angles))
        object.__setattr__(self, "bprv_angles", tuple(float(x) for x in self.bprv_angles))
        try:
            self.settings
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def settings(self) -> BellSettings:
        return BellSettings(self.chsh_angles, self.bprv_angles)

    def to_dict(self):
        d = asdict(self)
        d["chsh_angles"] = list(self.chsh_angles)
        d["bprv_angles"] = list(self.bprv_angles)
        return d


@dataclass(frozen=True)
class EnsembleConfig:
    r_over_a: tuple[float, ...] = DEFAULT_R_OVER_A
    replicates: int = DEFAULT_REPLICATES
    base_seed: int = 0
    a_nm: float = 1.0
    n_env: int = 10
    t_max: float = 10.0
    n_steps: int = 500
    mode: str = EQUATORIAL
    workers: int = 1
    chsh_angles: tuple[float, float, float, float] = BellSettings.chsh
    bprv_angles: tuple[float, float, float] = BellSettings.bprv

    def __post_init__(self):
        object.__setattr__(self, "r_over_a", tuple(float(x) for x in self.r_over_a))
        if not self.r_over_a:
            raise ConfigError("r_over_a must list at least one value")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        # validates the shared fields
        self.run_configs()

    def run_configs(self) -> list[RunConfig]:
        """One RunConfig per (R/a, replicate); seed = base_seed + running index."""
        out = []
        for i, ra in enumerate(self.r_over_a):
            for rep in range(self.replicates):
                out.append(RunConfig(
                    seed=self.base_seed + i * self.replicates + rep,
                    a_nm=self.a_nm, r_over_a=ra, n_env=self.n_env,
                    t_max=self.t_max, n_steps=self.n_steps, mode=self.mode,
                    chsh_angles=self.chsh_angles, bprv_angles=self.bprv_angles,
                ))
        return out

    def to_dict(self):
        d = asdict(self)
        for k in ("r_over_a", "chsh_angles", "bprv_angles"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "EnsembleConfig":
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return cls.from_dict(d)
