"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from dqdbell import _fallback
from dqdbell.electrostatics import HBAR

try:
    from dqdbell import _kernels
except ImportError:
    _kernels = None


def inputs(n_sites, seed=0):
    rng = np.random.default_rng(seed)
    J = np.triu(rng.normal(scale=0.02, size=(n_sites, n_sites)), 1)
    J = J + J.T
    psi = rng.normal(size=1 << n_sites) + 1j * rng.normal(size=1 << n_sites)
    return J, psi / np.linalg.norm(psi)


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<10s} {best * 1e3:10.2f} ms")
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--steps", type=int, default=500)
    args = ap.parse_args()
    impls = [("numpy", _fallback)] + ([("cython", _kernels)] if _kernels else [])
    if _kernels is None:
        print("compiled kernels not built; timing the numpy fallback only")
    for n in (12, 16, 20):
        J, psi = inputs(n)
        print(f"energy_table, {n} sites")
        times = {name: bench(name, lambda m=m: m.energy_table(J), args.repeat) for name, m in impls}
        if len(times) == 2:
            print(f"  speedup    {times['numpy'] / times['cython']:10.2f}x")
    for n in (12, 16):
        J, psi = inputs(n)
        E = _fallback.energy_table(J)
        t = np.linspace(0.0, 2.0, args.steps)
        print(f"reduced_pair_series, {n} sites, {args.steps} times")
        times = {name: bench(name, lambda m=m: m.reduced_pair_series(psi, E, t, HBAR), args.repeat)
                 for name, m in impls}
        if len(times) == 2:
            print(f"  speedup    {times['numpy'] / times['cython']:10.2f}x")


if __name__ == "__main__":
    main()
