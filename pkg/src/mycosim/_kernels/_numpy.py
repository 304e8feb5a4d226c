"""Pure-numpy twin of the compiled stepping kernel.

Same contract as the numba implementation; used when the compiled
backend is unavailable or disabled via MYCOSIM_KERNELS=numpy.
"""

from __future__ import annotations

import numpy as np


def transient_steps(
    M: np.ndarray, S: np.ndarray, U: np.ndarray, x0: np.ndarray
) -> tuple[np.ndarray, int]:
    """Run x_{k+1} = M x_k + S u_k and record the whole trajectory.

    Returns (X, bad_step): X has shape (steps + 1, n) with X[0] = x0;
    bad_step is the first step index whose state went non-finite, or -1.
    """
    steps = U.shape[1]
    X = np.empty((steps + 1, x0.shape[0]))
    X[0] = x0
    x = x0
    # overflow in the detection sum is the signal, not a fault
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            x = M @ x + S @ U[:, k]
            X[k + 1] = x
            # any nan/inf in x drives the sum non-finite
            if not np.isfinite(x.sum()):
                return X, k + 1
    return X, -1
