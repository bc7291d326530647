#!/usr/bin/env python3
"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run directly to benchmark both backends (the script re-invokes itself in a
subprocess with TANGLE_LAB_BACKEND set); pass --single to time only the
backend selected by the current environment.
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def timed(fn, *args, repeat=2000):
    fn(*args)  # warm (and JIT-compile on the numba path)
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def run_single() -> dict:
    from tangle_lab import kernels, named_state

    rng = np.random.default_rng(0)
    raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho2 = raw @ raw.conj().T
    rho2 /= rho2.trace().real
    psi4 = named_state("Z4", 0.37, 0.9).amplitudes
    psi3 = named_state("Z3", 0.37, 0.9).amplitudes
    keep = np.array([0, 2], dtype=np.int64)

    results = {"backend": kernels.backend()}
    results["pure_marginal_4q"] = timed(kernels.pure_marginal, psi4, 4, keep)
    results["wootters_lambdas"] = timed(kernels.wootters_lambdas, rho2)
    results["negativity_masked_4x4"] = timed(kernels.negativity_masked, rho2, 2, 2)
    results["three_tangle_value"] = timed(kernels.three_tangle_value, psi3)
    results["t1_pure4"] = timed(kernels.t1_pure4, psi4)
    results["negativity_parts4"] = timed(kernels.negativity_parts4, psi4, repeat=400)

    def n1_sweep():
        from tangle_lab import n1, nu_star

        star = nu_star()[0]
        for p in np.linspace(0.0, 1.0, 40):
            n1(named_state("Z4", p, 0.0), star)

    start = time.perf_counter()
    n1_sweep()
    results["n1_sweep_40_points"] = time.perf_counter() - start
    return results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--single", action="store_true",
                        help="benchmark only the current backend, emit JSON")
    args = parser.parse_args()

    if args.single:
        print(json.dumps(run_single()))
        return 0

    rows = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, TANGLE_LAB_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--single"],
            env=env, capture_output=True, text=True, check=True,
        )
        rows[backend] = json.loads(out.stdout.strip().splitlines()[-1])

    names = [k for k in rows["numba"] if k != "backend"]
    width = max(len(n) for n in names)
    print(f"{'kernel':<{width}}  {'numba':>12}  {'numpy':>12}  {'speedup':>8}")
    for name in names:
        fast, slow = rows["numba"][name], rows["numpy"][name]
        print(f"{name:<{width}}  {fast * 1e6:>10.2f}us  {slow * 1e6:>10.2f}us  "
              f"{slow / fast:>7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
