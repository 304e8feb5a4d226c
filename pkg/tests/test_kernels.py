"""Compiled and fallback stepping kernels must be interchangeable."""

import os
import subprocess
import sys

import numpy as np
import pytest

from mycosim._kernels import BACKEND
from mycosim._kernels._numpy import transient_steps as numpy_steps

try:
    from mycosim._kernels._numba import transient_steps as numba_steps

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def stable_problem(n=12, steps=300, seed=0):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n))
    M *= 0.9 / max(abs(np.linalg.eigvals(M)))  # contraction: stays finite
    S = rng.standard_normal((n, 3))
    U = rng.standard_normal((3, steps))
    x0 = rng.standard_normal(n)
    return np.ascontiguousarray(M), np.ascontiguousarray(S), np.ascontiguousarray(U), x0


def test_numpy_kernel_shape_and_initial_state():
    M, S, U, x0 = stable_problem()
    X, bad = numpy_steps(M, S, U, x0)
    assert X.shape == (U.shape[1] + 1, x0.size)
    assert np.array_equal(X[0], x0)
    assert bad == -1


def test_numpy_kernel_first_step_is_explicit_product():
    M, S, U, x0 = stable_problem(n=4, steps=5, seed=3)
    X, _ = numpy_steps(M, S, U, x0)
    np.testing.assert_allclose(X[1], M @ x0 + S @ U[:, 0], rtol=1e-13)


@pytest.mark.skipif(not HAVE_NUMBA, reason="compiled backend unavailable")
def test_backends_agree_bitwise_on_stable_problem():
    M, S, U, x0 = stable_problem(n=20, steps=500, seed=7)
    Xa, bada = numpy_steps(M, S, U, x0)
    Xb, badb = numba_steps(M, S, U, x0)
    assert bada == badb == -1
    # same dtype, same contraction order: results should be exactly equal
    assert np.max(np.abs(Xa - Xb)) < 1e-12


@pytest.mark.skipif(not HAVE_NUMBA, reason="compiled backend unavailable")
def test_backends_agree_on_divergence_step():
    M, S, U, x0 = stable_problem(n=6, steps=900, seed=1)
    M = np.ascontiguousarray(M * 8.0)  # spectral radius far past 1: overflows
    Xa, bada = numpy_steps(M, S, U, x0)
    Xb, badb = numba_steps(M, S, U, x0)
    assert bada == badb
    assert bada > 0


def test_divergence_flag_points_at_first_bad_step():
    M, S, U, x0 = stable_problem(n=3, steps=50, seed=2)
    U = U.copy()
    U[:, 10] = np.nan  # poison the drive at step 10
    X, bad = numpy_steps(M, S, U, x0)
    assert bad == 11  # state k+1 absorbs drive sample k


def test_backend_name_is_exported():
    assert BACKEND in ("numba", "numpy")


@pytest.mark.parametrize("choice", ["numpy"] + (["numba"] if HAVE_NUMBA else []))
def test_env_flag_selects_backend(choice):
    code = "import mycosim._kernels as k; print(k.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={**os.environ, "MYCOSIM_KERNELS": choice},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == choice


def test_env_flag_rejects_unknown_value():
    code = "import mycosim._kernels"
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={**os.environ, "MYCOSIM_KERNELS": "cuda"},
        capture_output=True,
        text=True,
    )
    assert out.returncode != 0
    assert "MYCOSIM_KERNELS" in out.stderr
