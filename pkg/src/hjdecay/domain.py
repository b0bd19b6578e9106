"""Uniform 1D grids, grid functions, norms, quadrature and the first
Dirichlet eigenpair.

Everything downstream (semigroup, solver, series) works on the two
canonical intervals (-1, 1) and (0, 1) sampled on uniform node grids
x_i = left + i*dx, i = 0..n_cells.  Fields with homogeneous Dirichlet
data carry exact zeros at both end nodes.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DEFAULT_N_CELLS = 512


@dataclass(frozen=True)
class Interval:
    """Open interval (left, right)."""

    left: float
    right: float

    def __post_init__(self):
        if not self.left < self.right:
            raise ValueError(f"interval needs left < right, got ({self.left}, {self.right})")

    @property
    def length(self) -> float:
        return self.right - self.left


#: Full problem domain.
FULL = Interval(-1.0, 1.0)
#: Reduced (half-line) problem domain.
UNIT = Interval(0.0, 1.0)


@dataclass(frozen=True)
class Grid1D:
    """Uniform node grid on an interval; n_cells+1 nodes including both ends."""

    interval: Interval
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError("n_cells must be positive")

    @property
    def dx(self) -> float:
        return self.interval.length / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    def nodes(self) -> np.ndarray:
        return _nodes(self.interval.left, self.interval.right, self.n_cells)


@lru_cache(maxsize=64)
def _nodes(left: float, right: float, n_cells: int) -> np.ndarray:
    x = np.linspace(left, right, n_cells + 1)
    x.setflags(write=False)
    return x


@dataclass(frozen=True)
class GridFunction:
    """Sampled function on a Grid1D, immutable after construction."""

    grid: Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_nodes,):
            raise ValueError(f"values shape {v.shape} does not match grid with {self.grid.n_nodes} nodes")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def is_dirichlet(self) -> bool:
        return self.values[0] == 0.0 and self.values[-1] == 0.0

    def require_dirichlet(self, what: str = "field"):
        if not self.is_dirichlet:
            raise ValueError(f"{what} must carry exact Dirichlet zeros at both end nodes")

    @classmethod
    def from_callable(cls, grid: Grid1D, f, dirichlet: bool = True) -> "GridFunction":
        v = np.asarray(f(grid.nodes()), dtype=float)
        if dirichlet:
            v = v.copy()
            v[0] = 0.0
            v[-1] = 0.0
        return cls(grid, v)

    @classmethod
    def zeros(cls, grid: Grid1D) -> "GridFunction":
        return cls(grid, np.zeros(grid.n_nodes))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.grid, values)

    def to_csv(self, path) -> None:
        """Write "x,value" rows at full (17 significant digit) precision."""
        x = self.grid.nodes()
        with open(path, "w", newline="") as fh:
            fh.write("x,value\n")
            for xi, vi in zip(x, self.values):
                fh.write(f"{xi:.17g},{vi:.17g}\n")

    @classmethod
    def from_csv(cls, path, interval: Interval | None = None) -> "GridFunction":
        data = np.genfromtxt(path, delimiter=",", names=True)
        x = np.atleast_1d(data["x"])
        v = np.atleast_1d(data["value"])
        iv = interval or Interval(float(x[0]), float(x[-1]))
        return cls(Grid1D(iv, len(x) - 1), v)


@dataclass(frozen=True)
class HeatEigenpair:
    """First Dirichlet eigenvalue and L2-normalized nonnegative eigenfunction."""

    lambda1: float
    e1: GridFunction


def sup_norm(f: GridFunction) -> float:
    """Max over nodes of |f|; exact on the grid, no interpolation."""
    return float(np.max(np.abs(f.values)))


def gradient_values(f: GridFunction) -> np.ndarray:
    """Node-wise derivative estimate: centered differences at interior
    nodes, second-order 3-point one-sided stencils at the two ends."""
    if f.grid.n_cells < 2:
        raise ValueError("gradient needs n_cells >= 2")
    v = f.values
    dx = f.grid.dx
    g = np.empty_like(v)
    g[1:-1] = (v[2:] - v[:-2]) / (2 * dx)
    g[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * dx)
    g[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * dx)
    return g


def grad_sup_norm(f: GridFunction) -> float:
    """Max over nodes of the |gradient_values| profile."""
    return float(np.max(np.abs(gradient_values(f))))


def grad_attained_at_boundary(f: GridFunction) -> bool:
    """True when the gradient sup is attained at an end node."""
    g = np.abs(gradient_values(f))
    return bool(max(g[0], g[-1]) >= np.max(g[1:-1]))


def simpson_weights(grid: Grid1D) -> np.ndarray:
    if grid.n_cells % 2 != 0:
        raise ValueError("composite Simpson needs an even n_cells")
    w = np.ones(grid.n_nodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (grid.dx / 3.0)


def inner_product(f: GridFunction, g: GridFunction) -> float:
    """Composite-Simpson approximation of the L2 product over the interval."""
    if f.grid != g.grid:
        raise ValueError("inner_product requires both functions on the same grid")
    w = simpson_weights(f.grid)
    return float(np.dot(w, f.values * g.values))


def l2_norm(f: GridFunction) -> float:
    return math.sqrt(max(inner_product(f, f), 0.0))


def first_eigenpair(interval: Interval, n_cells: int = DEFAULT_N_CELLS) -> HeatEigenpair:
    """Closed-form first Dirichlet eigenpair of -d2/dx2, sampled on a
    uniform grid.  Only the two canonical intervals are supported."""
    grid = Grid1D(interval, n_cells)
    x = grid.nodes()
    if interval == FULL:
        lam = math.pi ** 2 / 4.0
        v = np.cos(np.pi * x / 2.0)
    elif interval == UNIT:
        lam = math.pi ** 2
        v = math.sqrt(2.0) * np.sin(np.pi * x)
    else:
        raise ValueError(f"first_eigenpair supports only (-1,1) and (0,1), got {interval}")
    v[0] = 0.0
    v[-1] = 0.0
    np.clip(v, 0.0, None, out=v)
    return HeatEigenpair(lambda1=lam, e1=GridFunction(grid, v))


def restrict_right_half(f: GridFunction) -> GridFunction:
    """Restrict a field on (-1,1) to the node subgrid on (0,1).

    Requires an even n_cells so that x = 0 is a node."""
    if f.grid.interval != FULL:
        raise ValueError("restrict_right_half expects a field on (-1,1)")
    if f.grid.n_cells % 2 != 0:
        raise ValueError("restrict_right_half needs an even n_cells")
    half = f.grid.n_cells // 2
    return GridFunction(Grid1D(UNIT, half), f.values[half:])
