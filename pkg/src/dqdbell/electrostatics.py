"""Coulomb couplings, the diagonal configuration energies and dephasing times.

Units are nm, eV and ps throughout.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .geometry import DoubleDot, Geometry

#: e^2 / (4 pi eps0) in eV nm
COULOMB_K = 1.439964548
#: reduced Planck constant in eV ps
HBAR = 6.582119569e-4
#: Planck constant in eV ps
PLANCK_H = 4.135667696e-3

#: Largest number of sites (targets + environment) accepted by the energy table.
MAX_SITES = 30


def pair_coupling(dqd_j: DoubleDot, dqd_k: DoubleDot) -> float:
    """Ising coupling J_jk in eV between two double dots.

    The interaction energy of DQDs j, k in states m_j, m_k is
    ``P(m_j) P(m_k) J_jk`` with P(1) = +1, P(0) = -1.
    """
    pj, pk = dqd_j.dots, dqd_k.dots
    r = np.sqrt(((pj[:, None, :] - pk[None, :, :]) ** 2).sum(-1))
    if not np.all(r > 0):
        raise ValueError("coincident dots: zero inter-dot distance")
    bracket = 1.0 / r[0, 0] - 1.0 / r[0, 1] - 1.0 / r[1, 0] + 1.0 / r[1, 1]
    return 0.25 * COULOMB_K * float(bracket)


def build_coupling_table(geometry: Geometry) -> np.ndarray:
    """Symmetric (N+2, N+2) coupling matrix in bit order, cross-cluster entries zero."""
    dqds = geometry.dqds()
    labels = geometry.cluster_labels()
    n = len(dqds)
    J = np.zeros((n, n))
    for j in range(n):
        for k in range(j + 1, n):
            if labels[j] != labels[k]:
                continue
            J[j, k] = J[k, j] = pair_coupling(dqds[j], dqds[k])
    J.setflags(write=False)
    return J


def build_energy_table(couplings: np.ndarray) -> np.ndarray:
    """Energy of every bit-packed configuration, E[idx] = sum_{j<k} s_j s_k J_jk.

    Bit i of idx is the state m_i of site i and s_i = 2 m_i - 1.
    """
    J = np.ascontiguousarray(couplings, dtype=np.float64)
    n = J.shape[0]
    if J.shape != (n, n):
        raise ValueError("coupling table must be square")
    if n > MAX_SITES:
        raise ValueError(f"{n} sites exceeds the {MAX_SITES}-site memory guard")
    E = kernels.energy_table(J)
    E.setflags(write=False)
    return E


@dataclass(frozen=True)
class CharacteristicTimes:
    e_rms_A: float
    e_rms_B: float
    tau_A: float
    tau_B: float
    tau_E: float

    def to_dict(self):
        return asdict(self)


def flip_energy_rms(couplings: np.ndarray, site: int) -> float:
    """RMS over environment configurations of the energy to flip ``site`` from 0 to 1.

    The flip energy is ``2 sum_k s_k J[site, k]``; with the s_k independent and
    equally weighted the RMS collapses to ``2 sqrt(sum_k J[site, k]^2)``.
    """
    row = np.asarray(couplings)[site]
    return 2.0 * math.sqrt(float(np.dot(row, row)))


def characteristic_times(couplings: np.ndarray) -> CharacteristicTimes:
    eA = flip_energy_rms(couplings, 0)
    eB = flip_energy_rms(couplings, 1)
    if eA == 0 or eB == 0:
        raise ValueError("a target has zero coupling to its environment; dephasing time is infinite")
    tA, tB = PLANCK_H / eA, PLANCK_H / eB
    return CharacteristicTimes(eA, eB, tA, tB, math.sqrt(tA * tB))
