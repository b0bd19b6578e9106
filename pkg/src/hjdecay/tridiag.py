"""Tridiagonal solves for the implicit diffusion steps.

The marching matrices (I - theta*dt*Lap_h) are symmetric positive
definite and constant along a run, so they are factorized once with a
banded Cholesky and the per-step Thomas-style sweeps run inside LAPACK
(pbtrf/pbtrs via scipy).  ``solve_tridiagonal`` covers the one-off
general case (gtsv).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded, solve_banded


class SPDTridiagonal:
    """Factored (main, off) symmetric tridiagonal system."""

    def __init__(self, main: np.ndarray, off: np.ndarray):
        n = len(main)
        if len(off) != n - 1:
            raise ValueError("off-diagonal must have length len(main)-1")
        ab = np.zeros((2, n))
        ab[0, 1:] = off
        ab[1, :] = main
        self._cb = cholesky_banded(ab, lower=False)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve_banded((self._cb, False), rhs)


def solve_tridiagonal(lower: np.ndarray, main: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = len(main)
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = main
    ab[2, :-1] = lower
    return solve_banded((1, 1), ab, rhs)


def apply_tridiagonal(lower: np.ndarray, main: np.ndarray, upper: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = main * v
    out[:-1] += upper * v[1:]
    out[1:] += lower * v[:-1]
    return out
