"""Closed-form oracles: Cole-Hopf for p = 2, the stationary profile for
p in (0,1) with a = 1, the profiled (monotone-hull) rearrangement, and
the sub/supersolution envelope seeds for p > 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import FULL, Grid1D, GridFunction, Interval, UNIT, grad_sup_norm, sup_norm
from .heat import DEFAULT_N_MODES, heat_expand
from .solver import HJProblem


def cole_hopf_solve(a: float, u0: GridFunction, t: float, n_modes: int = DEFAULT_N_MODES) -> GridFunction:
    """Exact solution of u_t - u_xx = a|u_x|^2 via U = e^{a u} - 1:

        u(t) = (1/a) log(1 + e^{t*Lap} U0),  U0 = e^{a u0} - 1.
    """
    if a == 0.0:
        raise ValueError("Cole-Hopf needs a != 0")
    u0.require_dirichlet("Cole-Hopf initial datum")
    U0 = np.expm1(a * u0.values)
    U0[0] = 0.0
    U0[-1] = 0.0
    E = heat_expand(GridFunction(u0.grid, U0), n_modes).evaluate(u0.grid, t).values
    if np.any(1.0 + E <= 0.0):
        raise ValueError("1 + e^{t*Lap}U0 lost positivity; spectral evolution under-resolved")
    v = np.log1p(E) / a
    v[0] = 0.0
    v[-1] = 0.0
    return GridFunction(u0.grid, v)


def cole_hopf_gradient_sup(a: float, u0: GridFunction, t: float, n_modes: int = DEFAULT_N_MODES) -> float:
    """Sup of the exact gradient (1/a) * grad(e^{t*Lap}U0) / (1 + e^{t*Lap}U0)."""
    U0 = np.expm1(a * u0.values)
    U0[0] = 0.0
    U0[-1] = 0.0
    series = heat_expand(GridFunction(u0.grid, U0), n_modes)
    E = series.evaluate(u0.grid, t).values
    dE = series.evaluate_gradient(u0.grid, t)
    return float(np.max(np.abs(dE / (1.0 + E)))) / abs(a)


def stationary_ball(p: float, n_dim: int = 1, n_cells: int = 512) -> GridFunction:
    """Radial stationary profile of u_t - Lap u = |grad u|^p on the unit
    ball (a = 1, p in (0,1)):

        w(x) = (1-p)^{(2-p)/(1-p)} / ((2-p) (N-(N-1)p)^{1/(1-p)})
               * (1 - |x|^{(2-p)/(1-p)}).

    For n_dim = 1 the profile is returned on (-1,1); for n_dim >= 2 the
    radial section is sampled on [0,1]."""
    if not 0.0 < p < 1.0:
        raise ValueError("the stationary profile exists for p in (0,1) only")
    if n_dim < 1:
        raise ValueError("n_dim must be >= 1")
    q = (2.0 - p) / (1.0 - p)
    amp = (1.0 - p) ** q / ((2.0 - p) * (n_dim - (n_dim - 1) * p) ** (1.0 / (1.0 - p)))
    interval = FULL if n_dim == 1 else UNIT
    grid = Grid1D(interval, n_cells)
    r = np.abs(grid.nodes())
    v = amp * (1.0 - r ** q)
    v[0] = 0.0 if n_dim == 1 else v[0]
    v[-1] = 0.0
    return GridFunction(grid, v)


def profiled_rearrangement(u0: GridFunction) -> GridFunction:
    """Monotone hull ubar(x) = sup{ u0(y) : |y| >= |x| } on (-1,1).

    The result is even, nonincreasing in |x|, dominates u0 nodewise and
    preserves the sup-norm."""
    if u0.grid.interval != FULL:
        raise ValueError("profiled_rearrangement expects a field on (-1,1)")
    if u0.grid.n_cells % 2 != 0:
        raise ValueError("profiled_rearrangement needs an even n_cells (node at x = 0)")
    if np.any(u0.values < 0.0):
        raise ValueError("profiled_rearrangement needs a nonnegative field")
    n = u0.grid.n_cells
    half = n // 2
    v = u0.values
    out = np.empty_like(v)
    running = 0.0
    for k in range(half, -1, -1):  # radius k*dx from the boundary inward
        running = max(running, v[half - k], v[half + k])
        out[half - k] = running
        out[half + k] = running
    return GridFunction(u0.grid, out)


@dataclass(frozen=True)
class EnvelopePair:
    """Heat-flow envelope seeds w0 <= u0 <= W0 for the p > 2 regime."""

    w0: GridFunction
    W0: GridFunction
    c_lower: float
    c_upper: float


def envelope_pair(problem: HJProblem, c7_observed: float | None = None) -> EnvelopePair:
    """Theorem-style envelope seeds.

    a < 0: W0 = u0 and w0 = (1 - e^{-C6 u0})/C6 with
    C6 = |a| * ||u0||_C1^{p-2}; a > 0: w0 = u0 and
    W0 = (e^{C8 u0} - 1)/C8 with C8 = a * C7^{p-2}, C7 an observed
    gradient bound from a prior solve."""
    if problem.p <= 2.0:
        raise ValueError("envelope seeds apply to p > 2 only")
    u0 = problem.u0
    if np.any(u0.values < 0.0):
        raise ValueError("envelope seeds need a nonnegative initial datum")
    c1_norm = max(sup_norm(u0), grad_sup_norm(u0))
    if problem.a < 0:
        c6 = abs(problem.a) * c1_norm ** (problem.p - 2.0) if c1_norm > 0 else 0.0
        if c6 == 0.0:
            w0 = u0
        else:
            w0 = u0.with_values(-np.expm1(-c6 * u0.values) / c6)
        return EnvelopePair(w0=w0, W0=u0, c_lower=c6, c_upper=math.nan)
    if c7_observed is None or c7_observed <= 0:
        raise ValueError("a > 0 needs a positive observed gradient bound c7_observed")
    c8 = problem.a * c7_observed ** (problem.p - 2.0)
    W0 = u0.with_values(np.expm1(c8 * u0.values) / c8)
    return EnvelopePair(w0=u0, W0=W0, c_lower=math.nan, c_upper=c8)
