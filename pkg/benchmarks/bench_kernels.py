"""Timing of the numba kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vertexq import _kernels


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    z = rng.uniform(0, 1, 65536) + 1j * rng.uniform(0, 1, 65536)
    k = np.arange(-30, 31, dtype=np.float64)
    tau = 1j
    grids = {
        "chain_trace r=4 d=3 N=3": (rng.normal(size=(4, 4, 3, 3)) + 0j, 3),
        "chain_trace r=8 d=3 N=4": (rng.normal(size=(8, 8, 3, 3)) + 0j, 4),
        "chain_trace r=10 d=2 N=6": (rng.normal(size=(10, 10, 2, 2)) + 0j, 6),
    }

    cases = {"theta_series 65536 pts": (lambda: _kernels.theta_series_numpy(z, k, tau, 0.0),
                                       getattr(_kernels, "theta_series_numba", None)
                                       and (lambda: _kernels.theta_series_numba(z, k, tau, 0.0)))}
    for name, (g, n) in grids.items():
        cases[name] = (lambda g=g, n=n: _kernels.chain_trace_numpy(g, n),
                       getattr(_kernels, "chain_trace_numba", None)
                       and (lambda g=g, n=n: _kernels.chain_trace_numba(g, n)))

    print(f"backend: {_kernels.backend()}")
    print(f"{'kernel':<28} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8} {'max diff':>10}")
    for name, (f_np, f_nb) in cases.items():
        t_np = best_of(f_np, args.repeat)
        if f_nb is None:
            print(f"{name:<28} {1e3 * t_np:11.2f} {'n/a':>11}")
            continue
        f_nb()  # compile
        t_nb = best_of(f_nb, args.repeat)
        diff = np.max(np.abs(f_np() - f_nb()))
        print(f"{name:<28} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.2f} {diff:10.2e}")


if __name__ == "__main__":
    main()
