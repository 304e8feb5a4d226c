"""Compare the compiled and pure-numpy stepping kernels.

Times the transient recursion x_{k+1} = M x_k + S u_k at network sizes
typical for colony simulations. Run directly:

    python3 benchmarks/bench_kernels.py

The compiled backend is warmed once before timing so JIT compilation
does not pollute the numbers.
"""

from __future__ import annotations

import time

import numpy as np

from mycosim._kernels import _numba, _numpy


def _problem(n: int, steps: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    M = rng.normal(0.0, 0.1, (n, n))
    M *= 0.9 / np.max(np.abs(np.linalg.eigvals(M)))
    S = rng.normal(0.0, 1.0, (n, 2))
    U = rng.normal(0.0, 1.0, (2, steps))
    x0 = rng.normal(0.0, 1.0, n)
    return M, S, U, x0


def _time(fn, args, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    steps = 4000
    sizes = (50, 100, 200, 400)
    _numba.transient_steps(*_problem(8, 16))  # JIT warmup

    print(f"{'n':>5} {'steps':>6} {'numba (ms)':>11} {'numpy (ms)':>11} {'ratio':>6}")
    for n in sizes:
        args = _problem(n, steps)
        t_nb = _time(_numba.transient_steps, args)
        t_np = _time(_numpy.transient_steps, args)
        print(
            f"{n:>5} {steps:>6} {t_nb * 1e3:>11.1f} {t_np * 1e3:>11.1f} "
            f"{t_np / t_nb:>6.2f}"
        )

    X_nb, _ = _numba.transient_steps(*_problem(100, steps))
    X_np, _ = _numpy.transient_steps(*_problem(100, steps))
    print(f"\nmax |numba - numpy| at n=100: {np.max(np.abs(X_nb - X_np)):.3e}")


if __name__ == "__main__":
    main()
