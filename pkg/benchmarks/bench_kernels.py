"""Benchmark the compiled kernels against the pure-python fallback.

Runs the two batch kernels (affine power sums over a coefficient lattice,
and the top-t/remainder sparsity ratio over a batch of vectors) on seeded
workloads of growing size, timing both backends and checking that their
outputs agree. Usage:

    python3 benchmarks/bench_kernels.py [--repeats 5] [--seed 24301]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from lpequiv import _kernels_py

try:
    from lpequiv import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

# row counts span the solver's stencil/chunk regime (tens to thousands)
# and bulk lattice sweeps (hundreds of thousands)
POWER_SUM_SIZES = [(4, 1, 64), (4, 1, 8_192), (5, 2, 65_536), (8, 3, 400_000)]
RATIO_SIZES = [(64, 8), (2_000, 10), (20_000, 20), (100_000, 40)]


def _time(fn, repeats: int, inner: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def bench_power_sums(rng, repeats: int) -> None:
    print("affine_power_sums: |origin + coeffs @ basis^T|^p, row sums")
    print(f"{'m':>4} {'d':>3} {'rows':>9} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for m, d, rows in POWER_SUM_SIZES:
        origin = rng.standard_normal(m)
        basis = np.ascontiguousarray(rng.standard_normal((m, d)))
        coeffs = np.ascontiguousarray(rng.uniform(-2.0, 2.0, size=(rows, d)))
        args = (origin, basis, coeffs, 0.4, 1e-12)
        inner = max(1, 20_000 // rows)
        t_py = _time(lambda: _kernels_py.affine_power_sums(*args), repeats, inner)
        if _kernels_c is None:
            print(f"{m:>4} {d:>3} {rows:>9} {t_py:>9.6f}s {'-':>10} {'-':>8}")
            continue
        t_c = _time(lambda: _kernels_c.affine_power_sums(*args), repeats, inner)
        a = np.asarray(_kernels_py.affine_power_sums(*args))
        b = np.asarray(_kernels_c.affine_power_sums(*args))
        worst = float(np.max(np.abs(a - b) / (1.0 + np.abs(a))))
        assert worst < 1e-10, f"backend outputs diverge: {worst:.3e}"
        print(
            f"{m:>4} {d:>3} {rows:>9} {t_py:>9.6f}s {t_c:>9.6f}s "
            f"{t_py / t_c:>7.1f}x"
        )


def bench_ratio(rng, repeats: int) -> None:
    print()
    print("sparsity_ratio_max: top-t weight over remaining weight, batch max")
    print(f"{'rows':>9} {'m':>4} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for rows, m in RATIO_SIZES:
        vectors = np.ascontiguousarray(rng.standard_normal((rows, m)))
        args = (vectors, 0.5, max(1, m // 4), 1e-8)
        inner = max(1, 2_000 // rows)
        t_py = _time(lambda: _kernels_py.sparsity_ratio_max(*args), repeats, inner)
        if _kernels_c is None:
            print(f"{rows:>9} {m:>4} {t_py:>9.6f}s {'-':>10} {'-':>8}")
            continue
        t_c = _time(lambda: _kernels_c.sparsity_ratio_max(*args), repeats, inner)
        ia, va = _kernels_py.sparsity_ratio_max(*args)
        ib, vb = _kernels_c.sparsity_ratio_max(*args)
        rel = 1e-10 * (1.0 + max(abs(va), abs(vb)))
        assert ia == ib and abs(va - vb) <= rel, "backend outputs diverge"
        print(
            f"{rows:>9} {m:>4} {t_py:>9.6f}s {t_c:>9.6f}s {t_py / t_c:>7.1f}x"
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=24301)
    args = parser.parse_args()
    if _kernels_c is None:
        print("compiled backend not importable; timing the python backend only")
    rng = np.random.default_rng(args.seed)
    bench_power_sums(rng, args.repeats)
    bench_ratio(rng, args.repeats)


if __name__ == "__main__":
    main()
