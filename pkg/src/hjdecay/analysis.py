"""Turns trajectories into verdicts: log-linear decay-rate fits,
extinction detection, two-sided decay bound checks and the limit
coefficient of e^{lambda_1 t} u(t) against the first eigenfunction.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .domain import GridFunction, HeatEigenpair, gradient_values, inner_product, simpson_weights, sup_norm
from .solver import HJProblem, Trajectory

DEFAULT_FLOOR = 1e-10


@dataclass(frozen=True)
class DecayReport:
    fitted_rate: float
    theoretical_rate: float
    relative_error: float
    fit_window: tuple
    fit_residual: float
    n_samples: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExtinctionReport:
    extinct: bool
    t_star_estimate: float | None
    floor: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AlphaInfty:
    value: float
    quadrature_points: int
    tail_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def fit_decay_rate(trajectory: Trajectory, window: tuple, theoretical_rate: float = math.nan,
                   floor: float = DEFAULT_FLOOR) -> DecayReport:
    """Ordinary least squares on (t, log sup_norm) inside the window;
    the negated slope is the fitted decay rate."""
    t0, t1 = window
    t = trajectory.times
    m = trajectory.sup_norms
    mask = (t >= t0) & (t <= t1)
    if int(mask.sum()) < 10:
        raise ValueError(f"need at least 10 samples in the fit window, got {int(mask.sum())}")
    if np.any(m[mask] <= 10.0 * floor):
        raise ValueError("samples hit the extinction floor inside the window; fit is meaningless")
    ts = t[mask]
    ys = np.log(m[mask])
    A = np.column_stack([ts, np.ones_like(ts)])
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    fitted = -float(coef[0])
    resid = float(np.sqrt(np.mean((A @ coef - ys) ** 2)))
    rel = abs(fitted - theoretical_rate) / abs(theoretical_rate) if theoretical_rate == theoretical_rate else math.nan
    return DecayReport(
        fitted_rate=fitted,
        theoretical_rate=theoretical_rate,
        relative_error=rel,
        fit_window=(float(t0), float(t1)),
        fit_residual=resid,
        n_samples=int(mask.sum()),
    )


def lower_bound_check(trajectory: Trajectory, lambda1: float, t_min: float = 1.0) -> float:
    """Min over recorded t >= t_min of e^{lambda1 t} ||u(t)||_inf.

    A value bounded away from zero certifies the lower decay bound."""
    t = trajectory.times
    mask = t >= t_min
    if not np.any(mask):
        raise ValueError("no recorded samples at or beyond t_min")
    return float(np.min(np.exp(lambda1 * t[mask]) * trajectory.sup_norms[mask]))


def gradient_bound_check(trajectory: Trajectory, lambda1: float) -> float:
    """Max over recorded t > 0 of ||grad u||_inf / ((1 + t^{-1/2}) e^{-lambda1 t})."""
    t = trajectory.times
    mask = t > 0
    ratios = trajectory.grad_sup_norms[mask] / ((1.0 + t[mask] ** -0.5) * np.exp(-lambda1 * t[mask]))
    return float(np.max(ratios)) if ratios.size else 0.0


def detect_extinction(trajectory: Trajectory, floor: float = DEFAULT_FLOOR) -> ExtinctionReport:
    """Extinct iff the recorded sup-norms reach the floor and stay there."""
    m = trajectory.sup_norms
    below = m <= floor
    if not below[-1]:
        return ExtinctionReport(extinct=False, t_star_estimate=None, floor=floor)
    # first index from which every later sample stays below the floor
    above = np.nonzero(~below)[0]
    start = int(above[-1]) + 1 if above.size else 0
    return ExtinctionReport(extinct=True, t_star_estimate=float(trajectory.times[start]), floor=floor)


def alpha_infty(trajectory: Trajectory, problem: HJProblem, eig: HeatEigenpair) -> AlphaInfty:
    """Quadrature value of

        <u0, e1> + a * int_0^T e^{lambda1 t} <|grad u(t)|^p, e1> dt

    over the trajectory's snapshots, plus a tail bound for (T, inf)
    from the gradient envelope calibrated at the last snapshot."""
    if problem.p <= 1.0:
        raise ValueError("alpha_infty is finite for p > 1 only")
    times = sorted(trajectory.snapshots)
    if len(times) < 5:
        raise ValueError("alpha_infty needs at least 5 snapshots")
    lam = eig.lambda1
    grid = problem.u0.grid
    if eig.e1.grid != grid:
        raise ValueError("eigenpair must be sampled on the problem grid")
    w = simpson_weights(grid)
    e1v = eig.e1.values

    def weighted(t: float) -> float:
        g = gradient_values(trajectory.snapshots[t])
        return math.exp(lam * t) * float(np.dot(w, np.abs(g) ** problem.p * e1v))

    vals = np.array([weighted(t) for t in times])
    ts = np.asarray(times)
    integral = float(np.trapezoid(vals, ts))
    head = inner_product(problem.u0, eig.e1)

    t_end = ts[-1]
    g_end = float(np.max(np.abs(gradient_values(trajectory.snapshots[t_end]))))
    k_emp = g_end / ((1.0 + t_end ** -0.5) * math.exp(-lam * t_end))
    e1_mass = float(np.dot(w, e1v))
    p = problem.p
    tail = (
        abs(problem.a) * k_emp ** p * e1_mass
        * (1.0 + t_end ** -0.5) ** p
        * math.exp(-(p - 1.0) * lam * t_end)
        / ((p - 1.0) * lam)
    )
    return AlphaInfty(value=head + problem.a * integral, quadrature_points=len(times), tail_bound=tail)


def report_json(report, problem: HJProblem, config, version: str, extra: dict | None = None) -> str:
    """Serialize a report with full provenance of the run."""
    payload = {
        "report": report.to_dict(),
        "problem": {
            "a": problem.a,
            "p": problem.p,
            "interval": [problem.interval.left, problem.interval.right],
            "n_cells": problem.u0.grid.n_cells,
        },
        "config": {
            "dt": config.dt,
            "t_end": config.t_end,
            "record_every": config.record_every,
            "extinction_floor": config.extinction_floor,
            "snapshot_times": list(config.snapshot_times),
        },
        "version": version,
    }
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=2, sort_keys=True)
