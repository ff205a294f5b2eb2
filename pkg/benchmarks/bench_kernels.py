#!/usr/bin/env python3
"""Benchmark the compiled Jacobi kernel against the NumPy fallback.

Times full eigendecompositions of random Wishart-type matrices per backend
and prints a per-size table with the speedup. Also times one ensemble run
per backend to show the end-to-end effect on the Monte-Carlo harness.

Usage: python benchmarks/bench_kernels.py [--sizes 8,16,32,64] [--repeats 5]
"""

import argparse
import time

import numpy as np

from l1rankone import eigh, kernels
from l1rankone.experiments import EnsembleConfig, random_psd, run_ensemble


def time_eigh(backend: str, sizes, repeats: int):
    kernels.set_backend(backend)
    rows = {}
    for n in sizes:
        mats = [random_psd(n, seed) for seed in range(repeats)]
        t0 = time.perf_counter()
        for a in mats:
            eigh(a)
        rows[n] = (time.perf_counter() - t0) / repeats
    return rows


def time_ensemble(backend: str) -> float:
    kernels.set_backend(backend)
    cfg = EnsembleConfig(dims=(8, 16, 32), realizations=10, base_seed=0,
                         methods=("ldl", "eigen"))
    t0 = time.perf_counter()
    run_ensemble(cfg)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,32,64")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]

    backends = kernels.available_backends()
    print(f"available backends: {', '.join(backends)}")
    results = {b: time_eigh(b, sizes, args.repeats) for b in backends}

    header = f"{'n':>6} " + " ".join(f"{b + ' (ms)':>12}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)
    for n in sizes:
        cells = " ".join(f"{results[b][n] * 1e3:>12.3f}" for b in backends)
        line = f"{n:>6} {cells}"
        if len(backends) == 2:
            line += f" {results['py'][n] / results['cy'][n]:>8.1f}x"
        print(line)

    print("\nensemble run (dims 8,16,32 x 10 realizations, ldl+eigen):")
    for b in backends:
        print(f"  {b}: {time_ensemble(b):.2f} s")
    kernels.set_backend("auto")

    # backends must agree on the spectra they produce
    a = random_psd(24, 123)
    spectra = {}
    for b in backends:
        kernels.set_backend(b)
        spectra[b] = eigh(a).eigenvalues
    kernels.set_backend("auto")
    if len(backends) == 2:
        drift = float(np.abs(spectra["cy"] - spectra["py"]).max())
        print(f"\nmax eigenvalue drift between backends at n=24: {drift:.3e}")


if __name__ == "__main__":
    main()
