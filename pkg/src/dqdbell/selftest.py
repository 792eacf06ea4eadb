"""Analytic-limit checks runnable from the command line."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .config import RunConfig
from .electrostatics import build_energy_table, flip_energy_rms
from .ensemble import run_single
from .observables import (
    bprv_correlator, chsh_correlator, entanglement_of_formation, reduce_to_pair, von_neumann_entropy,
)

BELL = np.zeros((4, 4))
BELL[0, 0] = BELL[0, 3] = BELL[3, 0] = BELL[3, 3] = 0.5
MIXTURE = np.diag([0.5, 0.0, 0.0, 0.5])


def werner(p):
    return p * BELL + (1 - p) * np.eye(4) / 4


def binary_entropy(x):
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _close(got, want, tol):
    if abs(float(got) - want) > tol:
        raise AssertionError(f"got {float(got)!r}, expected {want!r} +/- {tol}")


def check_bell_values():
    _close(chsh_correlator(BELL), 2 * math.sqrt(2), 1e-9)
    _close(bprv_correlator(BELL), 7.5, 1e-9)
    _close(von_neumann_entropy(BELL), 0.0, 1e-9)
    _close(entanglement_of_formation(BELL), 1.0, 1e-9)


def check_classical_mixture():
    for got, want in zip(
        (chsh_correlator(MIXTURE), bprv_correlator(MIXTURE),
         von_neumann_entropy(MIXTURE), entanglement_of_formation(MIXTURE)),
        (math.sqrt(2), 6.0, 1.0, 0.0),
    ):
        _close(got, want, 1e-9)


def check_werner_eof():
    p = 0.9
    C = (3 * p - 1) / 2
    _close(entanglement_of_formation(werner(p)), binary_entropy((1 + math.sqrt(1 - C * C)) / 2), 1e-9)


def check_flip_rms_enumeration():
    rng = np.random.default_rng(7)
    J = np.zeros((7, 7))
    J[0, 2:] = J[2:, 0] = rng.normal(scale=0.01, size=5)
    flips = [2 * sum(s * j for s, j in zip(signs, J[0, 2:]))
             for signs in itertools.product((-1, 1), repeat=5)]
    brute = math.sqrt(sum(f * f for f in flips) / len(flips))
    _close(flip_energy_rms(J, 0) / brute, 1.0, 1e-12)


def check_energy_table():
    rng = np.random.default_rng(11)
    J = rng.integers(-512, 512, size=(6, 6)) / 1024.0
    J = np.triu(J, 1)
    J = J + J.T
    E = build_energy_table(J)
    for idx in range(64):
        s = [2 * ((idx >> i) & 1) - 1 for i in range(6)]
        ref = 0.5 * sum(s[j] * s[k] * J[j, k] for j in range(6) for k in range(6) if j != k)
        if E[idx] != ref:
            raise AssertionError(f"E[{idx}] = {E[idx]!r} != {ref!r}")


def check_partial_trace():
    rng = np.random.default_rng(5)
    psi = rng.normal(size=64) + 1j * rng.normal(size=64)
    psi /= np.linalg.norm(psi)
    full = np.outer(psi, psi.conj())
    dense = np.zeros((4, 4), dtype=complex)
    for i in range(64):
        for j in range(64):
            if i >> 2 == j >> 2:
                dense[2 * (i & 1) + ((i >> 1) & 1), 2 * (j & 1) + ((j >> 1) & 1)] += full[i, j]
    if np.abs(reduce_to_pair(psi) - dense).max() > 1e-12:
        raise AssertionError("partial trace disagrees with dense reference")


def check_initial_run():
    rec = run_single(RunConfig(seed=1, n_steps=3))
    _close(rec.chsh[0], 2 * math.sqrt(2), 1e-9)
    _close(rec.bprv[0], 7.5, 1e-9)


CHECKS = [
    ("bell-state values", check_bell_values),
    ("classical-mixture values", check_classical_mixture),
    ("werner EoF p=0.9", check_werner_eof),
    ("flip-energy RMS vs enumeration", check_flip_rms_enumeration),
    ("energy table vs double loop", check_energy_table),
    ("partial trace vs dense trace", check_partial_trace),
    ("t=0 run values", check_initial_run),
]


def run_checks(stream=None) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as exc:
            ok = False
            print(f"FAIL {name}: {exc}", file=stream)
        else:
            print(f"PASS {name}", file=stream)
    return ok
