"""Bit-packed basis, initial states and exact evolution under a diagonal Hamiltonian.

A basis index packs one bit per double dot: bit 0 is m_A, bit 1 is m_B and
bit k+2 is the state of environmental double dot k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .electrostatics import HBAR

EQUATORIAL = "equatorial"
UNIFORM_BLOCH = "uniform-bloch"
MODES = (EQUATORIAL, UNIFORM_BLOCH)


def pack(m_A: int, m_B: int, env=()) -> int:
    idx = (m_A & 1) | ((m_B & 1) << 1)
    for k, m in enumerate(env):
        idx |= (int(m) & 1) << (k + 2)
    return idx


def unpack(idx: int, n_env: int) -> tuple[int, int, tuple[int, ...]]:
    if not 0 <= idx < 1 << (n_env + 2):
        raise ValueError(f"index {idx} out of range for {n_env} environmental DQDs")
    return idx & 1, (idx >> 1) & 1, tuple((idx >> (k + 2)) & 1 for k in range(n_env))


@dataclass(frozen=True)
class InitialStateSpec:
    """Per-environment-DQD angles.

    In equatorial mode each DQD starts in ``e^{i theta}(|0> + e^{i phi}|1>)/sqrt2``.
    In uniform-bloch mode ``theta`` is the polar angle of the Bloch vector and the
    state is ``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``.
    """

    theta: tuple[float, ...]
    phi: tuple[float, ...]
    mode: str = EQUATORIAL

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown initial-state mode {self.mode!r}; expected one of {MODES}")
        if len(self.theta) != len(self.phi):
            raise ValueError("theta and phi must have one entry per environmental DQD")
        object.__setattr__(self, "theta", tuple(float(x) for x in self.theta))
        object.__setattr__(self, "phi", tuple(float(x) for x in self.phi))

    @property
    def n_env(self):
        return len(self.phi)

    def to_dict(self):
        return {"mode": self.mode, "theta": list(self.theta), "phi": list(self.phi)}


def random_initial_spec(n_env: int, rng: np.random.Generator, mode: str = EQUATORIAL) -> InitialStateSpec:
    """Draw (theta_k, phi_k) for k = 0..n_env-1, in that order, from ``rng``."""
    theta, phi = [], []
    for _ in range(n_env):
        if mode == UNIFORM_BLOCH:
            theta.append(math.acos(rng.uniform(-1.0, 1.0)))
        else:
            theta.append(rng.uniform(0.0, 2.0 * math.pi))
        phi.append(rng.uniform(0.0, 2.0 * math.pi))
    return InitialStateSpec(tuple(theta), tuple(phi), mode)


def env_qubit(theta: float, phi: float, mode: str = EQUATORIAL) -> np.ndarray:
    if mode == UNIFORM_BLOCH:
        return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
    return np.exp(1j * theta) * np.array([1.0, np.exp(1j * phi)]) / math.sqrt(2)


def build_initial_state(n_env: int, spec: InitialStateSpec) -> np.ndarray:
    """Bell pair (|00> + |11>)/sqrt2 on A, B times a product state of the environment."""
    if spec.n_env != n_env:
        raise ValueError(f"spec has {spec.n_env} phase pairs for {n_env} environmental DQDs")
    psi = np.array([1.0, 0.0, 0.0, 1.0], dtype=np.complex128) / math.sqrt(2)
    # np.kron puts its right operand on the low bits
    for th, ph in zip(spec.theta, spec.phi):
        psi = np.kron(env_qubit(th, ph, spec.mode), psi)
    return psi / np.linalg.norm(psi)


def evolve(state0: np.ndarray, energies: np.ndarray, t: float) -> np.ndarray:
    """c_i(t) = c_i(0) exp(-i E_i t / hbar), with t in ps and E in eV."""
    state0 = np.asarray(state0)
    energies = np.asarray(energies)
    if state0.shape != energies.shape:
        raise ValueError(f"state has {state0.shape} amplitudes but energy table has {energies.shape}")
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return state0.copy()
    return state0 * np.exp(-1j * energies * (t / HBAR))


def energy_expectation(state: np.ndarray, energies: np.ndarray) -> float:
    return float(np.dot(np.abs(state) ** 2, energies))
