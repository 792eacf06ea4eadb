"""Random placement of target and environmental double dots.

Each target double dot sits at the origin of its own cluster frame with its
axis along +z. Its environmental double dots have centers on a sphere of
radius R about the target and random axis orientations. The two clusters
share no coordinate frame; couplings between clusters are masked to zero
downstream, so their relative placement never enters the physics.

Random draws come from a single ``numpy.random.Generator`` (PCG64) in this
order: for cluster A then cluster B, for each environmental DQD, the center
direction (z, azimuth) followed by the axis direction (z, azimuth). A draw
that violates the proximity guard is discarded and redrawn in place.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

#: Minimum allowed distance between any two dots of a cluster, in units of a.
MIN_DOT_DISTANCE = 0.1
#: Smallest allowed R/a.
MIN_R_OVER_A = 2.0
_MAX_RESAMPLES = 10_000


def unit_vector(rng: np.random.Generator) -> tuple[float, float, float]:
    """Uniform direction on the unit sphere: z ~ U[-1, 1], azimuth ~ U[0, 2pi)."""
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    s = math.sqrt(max(0.0, 1.0 - z * z))
    return (s * math.cos(phi), s * math.sin(phi), z)


@dataclass(frozen=True)
class DoubleDot:
    """Two point dots at ``center -/+ (a/2) * axis``; dot 0 is the bottom one."""

    center: tuple[float, float, float]
    axis: tuple[float, float, float]
    a: float

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        ax = tuple(float(v) for v in self.axis)
        if len(c) != 3 or len(ax) != 3:
            raise ValueError("center and axis must be 3-vectors")
        if not all(math.isfinite(v) for v in c + ax):
            raise ValueError("non-finite coordinate")
        n = math.sqrt(sum(v * v for v in ax))
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"axis must be a unit vector, |axis| = {n!r}")
        if not self.a > 0:
            raise ValueError("dot separation a must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "a", float(self.a))

    @property
    def dots(self) -> np.ndarray:
        """(2, 3) array with the positions of dot 0 and dot 1."""
        c = np.asarray(self.center)
        h = 0.5 * self.a * np.asarray(self.axis)
        return np.stack([c - h, c + h])

    def to_dict(self) -> dict:
        return {"center": list(self.center), "axis": list(self.axis), "a": self.a}

    @classmethod
    def from_dict(cls, d: dict) -> "DoubleDot":
        return cls(tuple(d["center"]), tuple(d["axis"]), d["a"])


@dataclass(frozen=True)
class Geometry:
    target_A: DoubleDot
    target_B: DoubleDot
    env_A: tuple[DoubleDot, ...]
    env_B: tuple[DoubleDot, ...]
    R: float
    seed: int | None = None
    resamples: int = 0

    @property
    def n_env(self) -> int:
        return len(self.env_A) + len(self.env_B)

    @property
    def a(self) -> float:
        return self.target_A.a

    def dqds(self) -> list[DoubleDot]:
        """All double dots in bit order: A, B, env_A..., env_B..."""
        return [self.target_A, self.target_B, *self.env_A, *self.env_B]

    def cluster_labels(self) -> np.ndarray:
        """0 for members of cluster A, 1 for cluster B, in bit order."""
        k = len(self.env_A)
        return np.array([0, 1] + [0] * k + [1] * len(self.env_B), dtype=np.int64)

    def to_dict(self) -> dict:
        return {
            "a_nm": self.a,
            "R_nm": self.R,
            "n_env": self.n_env,
            "seed": self.seed,
            "resamples": self.resamples,
            "frame": "per-cluster; each target at its own origin",
            "clusters": {
                "A": {
                    "target": self.target_A.to_dict(),
                    "env": [d.to_dict() for d in self.env_A],
                },
                "B": {
                    "target": self.target_B.to_dict(),
                    "env": [d.to_dict() for d in self.env_B],
                },
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Geometry":
        ca, cb = d["clusters"]["A"], d["clusters"]["B"]
        return cls(
            target_A=DoubleDot.from_dict(ca["target"]),
            target_B=DoubleDot.from_dict(cb["target"]),
            env_A=tuple(DoubleDot.from_dict(x) for x in ca["env"]),
            env_B=tuple(DoubleDot.from_dict(x) for x in cb["env"]),
            R=d["R_nm"],
            seed=d.get("seed"),
            resamples=d.get("resamples", 0),
        )


def min_dot_distance(dqds) -> float:
    """Smallest distance between dots belonging to different double dots."""
    pts = [d.dots for d in dqds]
    best = math.inf
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            diff = pts[i][:, None, :] - pts[j][None, :, :]
            best = min(best, float(np.sqrt((diff**2).sum(-1)).min()))
    return best


def _sample_cluster(a, R, k, rng):
    target = DoubleDot((0.0, 0.0, 0.0), (0.0, 0.0, 1.0), a)
    env = []
    pts = target.dots
    resamples = 0
    for _ in range(k):
        for _attempt in range(_MAX_RESAMPLES):
            u = unit_vector(rng)
            axis = unit_vector(rng)
            cand = DoubleDot((R * u[0], R * u[1], R * u[2]), axis, a)
            d = cand.dots
            gap = np.sqrt(((d[:, None, :] - pts[None, :, :]) ** 2).sum(-1)).min()
            if gap >= MIN_DOT_DISTANCE * a:
                break
            resamples += 1
        else:
            raise RuntimeError("could not place environmental double dot; sphere too crowded")
        env.append(cand)
        pts = np.concatenate([pts, d])
    return target, tuple(env), resamples


def sample_geometry(a: float, R: float, n_env: int, rng, seed: int | None = None) -> Geometry:
    """Sample a random two-cluster geometry.

    ``rng`` is either an integer seed or a ``numpy.random.Generator``; when it
    is an integer it is also recorded as the geometry's seed.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    if n_env < 0 or n_env % 2:
        raise ValueError(f"n_env must be even and non-negative, got {n_env}")
    if R < MIN_R_OVER_A * a:
        raise ValueError(f"R must be at least {MIN_R_OVER_A}*a to keep dots apart, got R={R}, a={a}")
    if isinstance(rng, (int, np.integer)):
        seed = int(rng)
        rng = np.random.default_rng(seed)
    k = n_env // 2
    tA, envA, rA = _sample_cluster(a, R, k, rng)
    tB, envB, rB = _sample_cluster(a, R, k, rng)
    if rA + rB:
        log.info("proximity guard resampled %d environmental double dots", rA + rB)
    return Geometry(tA, tB, envA, envB, float(R), seed, rA + rB)
