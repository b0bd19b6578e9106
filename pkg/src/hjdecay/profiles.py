"""Named initial data on (-1,1) used by the CLI and the test corpus.

* e1      -- first Dirichlet eigenfunction cos(pi x / 2) (profiled)
* bump    -- smooth compactly supported bump, support |x| < 0.8 (profiled)
* plateau -- profiled with a flat top on |x| <= 0.4
* asym    -- smooth off-center bump; not profiled, exercises the
             rearrangement path
"""

from __future__ import annotations

import numpy as np

from .domain import FULL, Grid1D, GridFunction, Interval


def _bump_shape(x: np.ndarray, center: float, radius: float) -> np.ndarray:
    out = np.zeros_like(x)
    s = (x - center) / radius
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def e1_values(x: np.ndarray) -> np.ndarray:
    return np.cos(np.pi * x / 2.0)


def bump_values(x: np.ndarray) -> np.ndarray:
    return _bump_shape(x, 0.0, 0.8)


def plateau_values(x: np.ndarray) -> np.ndarray:
    r = np.abs(x)
    out = np.ones_like(x)
    ramp = r > 0.4
    out[ramp] = np.cos(np.pi * (r[ramp] - 0.4) / 1.2) ** 2
    return out


def asym_values(x: np.ndarray) -> np.ndarray:
    return _bump_shape(x, 0.3, 0.55)


PROFILES = {
    "e1": e1_values,
    "bump": bump_values,
    "plateau": plateau_values,
    "asym": asym_values,
}


def named_profile(name: str, n_cells: int, interval: Interval = FULL) -> GridFunction:
    if name not in PROFILES:
        raise ValueError(f"unknown profile '{name}'; choose from {sorted(PROFILES)}")
    if interval != FULL:
        raise ValueError("named profiles are defined on (-1,1)")
    grid = Grid1D(interval, n_cells)
    return GridFunction.from_callable(grid, PROFILES[name])
