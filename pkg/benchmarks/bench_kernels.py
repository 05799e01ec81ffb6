#!/usr/bin/env python3
"""Time the compiled integration kernels against the interpreted ones.

Run from the repository root:

    python benchmarks/bench_kernels.py

Set EVOLOSS_NO_JIT=1 to see the fallback-only numbers (both columns then
time the same interpreted function).
"""

import timeit

from evoloss import PayoffParams, field_coefficients
from evoloss import _kernels

REPEATS = 5
START = (0.31, 0.62)

CASES = [
    (
        "rk4_path dt=0.01 t_max=500",
        lambda fn, a, b, c, e: fn(a, b, c, e, *START, 0.01, 500.0, -1.0, 1e-9),
        (_kernels.rk4_path, _kernels.rk4_path_py),
    ),
    (
        "euler_path dt=1e-5 n=1e6",
        lambda fn, a, b, c, e: fn(a, b, c, e, *START, 1e-5, 1_000_000, 1_000),
        (_kernels.euler_path, _kernels.euler_path_py),
    ),
]


def best_of(call, number=1):
    return min(timeit.repeat(call, number=number, repeat=REPEATS)) / number


def main():
    p = PayoffParams(g1=1.5, d1=1.0, g2=1.0, d2=1.5, n1=0.5, n2=0.5)
    a, b, c, e = field_coefficients(p)

    if _kernels.JIT_ENABLED:
        print("numba JIT: enabled (set EVOLOSS_NO_JIT=1 to disable)")
    else:
        print("numba JIT: disabled — both columns run the interpreted kernel")
    print()
    header = f"{'kernel':<28} {'compiled':>12} {'interpreted':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call, (fast, slow) in CASES:
        call(fast, a, b, c, e)  # trigger compilation outside the timed region
        t_fast = best_of(lambda: call(fast, a, b, c, e))
        t_slow = best_of(lambda: call(slow, a, b, c, e))
        print(
            f"{name:<28} {t_fast * 1e3:>10.2f}ms {t_slow * 1e3:>10.2f}ms "
            f"{t_slow / t_fast:>8.1f}x"
        )


if __name__ == "__main__":
    main()
