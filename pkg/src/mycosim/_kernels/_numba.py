"""Compiled stepping kernel.

Explicit loops instead of BLAS calls: the per-step matrices are small
(hundreds of rows), so call overhead dominates vectorized dispatch, and
a fixed compiled loop keeps reruns bit-identical on a given machine.

The row products live in their own fastmath function so they vectorize;
the divergence check stays in strict math because fastmath licenses the
compiler to assume no NaN or Inf ever appears, which would erase the
isfinite test itself.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def _advance(M, S, U, k, x, y):  # pragma: no cover - exercised via backends
    n = x.shape[0]
    m = S.shape[1]
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += M[i, j] * x[j]
        for j in range(m):
            acc += S[i, j] * U[j, k]
        y[i] = acc


@njit(cache=True)
def transient_steps(M, S, U, x0):  # pragma: no cover - exercised via backends
    steps = U.shape[1]
    n = x0.shape[0]
    X = np.empty((steps + 1, n))
    x = np.empty(n)
    y = np.empty(n)
    for i in range(n):
        X[0, i] = x0[i]
        x[i] = x0[i]
    for k in range(steps):
        _advance(M, S, U, k, x, y)
        total = 0.0
        for i in range(n):
            x[i] = y[i]
            X[k + 1, i] = y[i]
            total += y[i]
        if not np.isfinite(total):
            return X, k + 1
    return X, -1
