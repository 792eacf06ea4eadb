"""Two-qubit diagnostics: partial trace, Bell correlators, entropy, entanglement of formation.

Density matrices are 4x4 over (m_A m_B) in kron order 00, 01, 10, 11. Every
function taking ``rho`` also accepts a stack of shape (..., 4, 4) and then
returns an array over the leading axes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .electrostatics import HBAR

#: Local-realism bound on S_CHSH.
CHSH_BOUND = 2.0
#: Local-realism bound on S_BPRV.
BPRV_BOUND = 7.0
#: Asymptotic values for the dephased mixture (|00><00| + |11><11|)/2 at default angles.
CHSH_BELL, CHSH_CLASSICAL = 2.0 * math.sqrt(2.0), math.sqrt(2.0)
BPRV_BELL, BPRV_CLASSICAL = 7.5, 6.0

PSD_TOL = 1e-10


@dataclass(frozen=True)
class BellSettings:
    """Measurement angles in degrees."""

    chsh: tuple[float, float, float, float] = (0.0, 45.0, 22.5, 67.5)
    bprv: tuple[float, float, float] = (0.0, 120.0, 240.0)

    def __post_init__(self):
        if len(self.chsh) != 4 or len(self.bprv) != 3:
            raise ValueError("need 4 CHSH angles [a, a', b, b'] and 3 BPRV angles")
        object.__setattr__(self, "chsh", tuple(float(x) for x in self.chsh))
        object.__setattr__(self, "bprv", tuple(float(x) for x in self.bprv))


DEFAULT_SETTINGS = BellSettings()


def reduce_to_pair(state: np.ndarray) -> np.ndarray:
    """Trace out the environment of a packed global state vector."""
    state = np.asarray(state)
    if state.ndim != 1 or state.size < 4 or state.size & (state.size - 1):
        raise ValueError("state length must be a power of two >= 4")
    M = state.reshape(-1, 4)[:, [0, 2, 1, 3]]
    return M.T @ M.conj()


def reduced_pair_series(state0, energies, times_ps) -> np.ndarray:
    """rho_AB at each time in ``times_ps`` for the state evolved from ``state0``."""
    state0 = np.asarray(state0)
    if state0.shape != np.shape(energies):
        raise ValueError("state and energy table dimensions differ")
    return kernels.reduced_pair_series(state0, energies, np.asarray(times_ps, dtype=float), HBAR)


def check_density(rho, tol=1e-12):
    rho = np.asarray(rho)
    if rho.shape[-2:] != (4, 4):
        raise ValueError("expected 4x4 density matrices")
    herm = np.abs(rho - np.swapaxes(rho.conj(), -1, -2)).max()
    if herm > tol:
        raise ValueError(f"density matrix not Hermitian (deviation {herm:.3g})")
    tr = np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1).max()
    if tr > tol:
        raise ValueError(f"density matrix trace deviates from 1 by {tr:.3g}")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -PSD_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")
    return rho


def rotation(theta: float) -> np.ndarray:
    """R(theta)|0> = cos|0> - sin|1>, R(theta)|1> = sin|0> + cos|1>; columns are images."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def _basis_projectors(theta):
    R = rotation(theta)
    return [np.outer(R[:, l], R[:, l]) for l in (0, 1)]


def chsh_operator(settings: BellSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """E(a,b) - E(a,b') + E(a',b) + E(a',b') as a single 4x4 observable."""
    a, a2, b, b2 = (math.radians(x) for x in settings.chsh)

    def correlation(x, y):
        px, py = _basis_projectors(x), _basis_projectors(y)
        # outcome |0> -> -1, |1> -> +1
        op = np.zeros((4, 4))
        for k in (0, 1):
            for l in (0, 1):
                sign = 1.0 if k == l else -1.0
                op += sign * np.kron(px[k], py[l])
        return op

    return correlation(a, b) - correlation(a, b2) + correlation(a2, b) + correlation(a2, b2)


def bprv_operator(settings: BellSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Sum of the three same-setting 'same outcome' and six 'opposite outcome' projectors."""
    P = [_basis_projectors(math.radians(x)) for x in settings.bprv]
    op = np.zeros((4, 4))
    for k in range(3):
        for l in range(3):
            if k == l:
                op += np.kron(P[k][0], P[l][0]) + np.kron(P[k][1], P[l][1])
            else:
                op += np.kron(P[k][0], P[l][1]) + np.kron(P[k][1], P[l][0])
    return op


def _expect(rho, op):
    return np.einsum("...ij,ji->...", rho, op).real


def chsh_correlator(rho, settings: BellSettings = DEFAULT_SETTINGS):
    return np.abs(_expect(np.asarray(rho), chsh_operator(settings)))


def bprv_correlator(rho, settings: BellSettings = DEFAULT_SETTINGS):
    return _expect(np.asarray(rho), bprv_operator(settings))


def _clamped_eigvals(h):
    w = np.linalg.eigvalsh(h)
    if w.min() < -PSD_TOL:
        raise ValueError(f"negative eigenvalue {w.min():.3g}: not a density matrix")
    return np.clip(w, 0.0, None)


def _entropy_bits(p):
    p = np.asarray(p)
    safe = np.where(p > 0, p, 1.0)
    return -(p * np.log2(safe)).sum(-1)


def von_neumann_entropy(rho):
    """Entropy in bits."""
    return np.maximum(_entropy_bits(_clamped_eigvals(np.asarray(rho))), 0.0)


_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho):
    """Wootters concurrence, via the Hermitian form sqrt(rho) rho~ sqrt(rho)."""
    rho = np.asarray(rho, dtype=np.complex128)
    w, v = np.linalg.eigh(rho)
    if w.min() < -PSD_TOL:
        raise ValueError(f"negative eigenvalue {w.min():.3g}: not a density matrix")
    sq = (v * np.sqrt(np.clip(w, 0, None))[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)
    flipped = _YY @ rho.conj() @ _YY
    h = sq @ flipped @ sq
    h = 0.5 * (h + np.swapaxes(h.conj(), -1, -2))
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(h), 0, None))[..., ::-1]
    return np.maximum(0.0, lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3])


def entanglement_of_formation(rho):
    C = np.clip(concurrence(rho), 0.0, 1.0)
    x = 0.5 * (1 + np.sqrt(1 - C**2))
    return np.maximum(_entropy_bits(np.stack([x, 1 - x], axis=-1)), 0.0)
