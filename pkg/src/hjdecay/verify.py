"""The acceptance matrix behind ``hjdecay verify``.

Each criterion is a function returning a CriterionResult with the
measured numbers; the registry preserves the canonical ordering and the
``--only`` ids.  Criteria write their reference CSV artifacts when given
an output directory, so downstream figure rendering consumes the same
files the gate was judged on.

Known red: the boundary-dominance clause of the envelope criterion.
Two independent discretizations agree that for a = -1, p = 3, u0 = e1
the gradient sup sits at an interior node until t ~ 1.3 (the absorption
erodes the steepest, boundary, slopes first), so "dominance at every
recorded time" fails on the early records; the parabolic-boundary
gradient bound it feeds holds throughout.  The clause is evaluated as
stated and reported honestly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analysis import detect_extinction, fit_decay_rate, gradient_bound_check, lower_bound_check
from .domain import (
    FULL,
    Grid1D,
    GridFunction,
    first_eigenpair,
    restrict_right_half,
    sup_norm,
)
from .exact import cole_hopf_solve, envelope_pair, profiled_rearrangement, stationary_ball
from .heat import heat_evolve_spectral
from .profiles import named_profile
from .solver import HJProblem, SolverConfig, hj_solve
from .spectral import (
    Branch,
    compute_spectrum,
    decay_rate_r1,
    mode1_residual_sup,
    r1_sweep,
    series_evolve,
    sweep_to_csv,
    to_reduced_v,
    trig_bracket,
)

LAM1 = math.pi ** 2 / 4.0
SWEEP_A = (-10.0, -2.0, -0.5, 0.5, 1.5, 2.0, 3.0, 10.0)


@dataclass
class CriterionResult:
    cid: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.cid}"


def _run(a, p, u0, dt, t_end, record_every=10, snapshots=(), floor=1e-12):
    cfg = SolverConfig(dt=dt, t_end=t_end, record_every=record_every,
                       snapshot_times=snapshots, extinction_floor=floor)
    return hj_solve(HJProblem(a=a, p=p, u0=u0), cfg)


def criterion_cole_hopf(out_dir=None) -> CriterionResult:
    """Trajectory agreement with the p = 2 exact solution, and first-order
    shrink of the gap under grid refinement."""
    details = {}
    ok = True
    for a in (-1.0, 1.0):
        for name in ("e1", "bump"):
            errs = {}
            for n in (400, 800):
                u0 = named_profile(name, n)
                dt = 0.1 * u0.grid.dx
                traj = _run(a, 2.0, u0, dt, 1.0, record_every=10 ** 9, snapshots=(0.25, 1.0))
                for t in (0.25, 1.0):
                    num = traj.snapshot_at(t, atol=1e-9)
                    exact = cole_hopf_solve(a, u0, t)
                    errs[(n, t)] = float(np.max(np.abs(num.values - exact.values)))
            for t in (0.25, 1.0):
                e400, e800 = errs[(400, t)], errs[(800, t)]
                key = f"a={a:+g},{name},t={t}"
                details[key] = {"err_400": e400, "err_800": e800,
                                "ratio": e400 / e800 if e800 > 0 else math.inf}
                ok &= e400 <= 1e-3 and e400 / e800 >= 1.7
    return CriterionResult("cole-hopf", ok, details)


def criterion_p1_rates(out_dir=None) -> CriterionResult:
    """Fitted p = 1 decay rates against r1(a) within 2 percent.

    The scheme's rate error is first order in dx at fixed Courant
    number, so the reported rate is the Richardson extrapolation of the
    512- and 1024-cell fits (the residual second-order term is ~0.04
    percent at the hardest a)."""
    details = {}
    ok = True
    rows = []
    for a in (-4.0, -2.0, -0.5, 0.5, 1.5, 3.0, 6.0):
        target = decay_rate_r1(a).r1
        fits = {}
        for n in (512, 1024):
            u0 = named_profile("e1", n)
            dt = 0.8 * u0.grid.dx / abs(a)
            traj = _run(a, 1.0, u0, dt, 2.5, record_every=5)
            # p = 1 decays exponentially without extinction; at a = -4 the
            # window tail sits near 6e-11, well above solver roundoff
            fits[n] = fit_decay_rate(traj, (1.0, 2.5), floor=1e-12).fitted_rate
        rate = 2.0 * fits[1024] - fits[512]
        rel = abs(rate - target) / target
        details[f"a={a:+g}"] = {"fitted": rate, "fit_512": fits[512], "fit_1024": fits[1024],
                                "r1": target, "rel_err": rel}
        rows.append((a, rate, target, rel))
        ok &= rel <= 0.02
    if out_dir is not None:
        with open(out_dir / "p1_rates.csv", "w") as fh:
            fh.write("a,fitted_rate,r1,rel_err\n")
            for a, rate, target, rel in rows:
                fh.write(f"{a:.17g},{rate:.17g},{target:.17g},{rel:.17g}\n")
        sweep_to_csv(r1_sweep(np.linspace(-5.0, 8.0, 261)), out_dir / "r1_curve.csv")
    return CriterionResult("p1-rates", ok, details)


def criterion_spectrum(out_dir=None) -> CriterionResult:
    """Bracket containment, stabilized residuals, the a = 2 linear mode,
    the a > 2 closed-form identities and the amplitude bounds."""
    details = {}
    ok = True
    worst_resid = 0.0
    for a in SWEEP_A:
        spec = compute_spectrum(a, 20)
        for m in spec.modes:
            worst_resid = max(worst_resid, m.residual)
            if m.branch is Branch.TRIG:
                lo, hi = trig_bracket(a, m.index)
                ok &= lo < m.sqrt_param < hi
            elif m.branch is Branch.HYPERBOLIC:
                ok &= -a * a / 4.0 < m.alpha < -a * (a - 2.0) / 4.0
            if m.index >= 2 or a < 0:
                ok &= m.amplitude <= math.sqrt(math.pi) + 1e-12
    details["worst_residual"] = worst_resid
    ok &= worst_resid <= 1e-12

    lin = compute_spectrum(2.0, 1).modes[0]
    details["a2_alpha1"] = lin.alpha
    details["a2_amplitude"] = lin.amplitude
    ok &= lin.alpha == 0.0 and lin.branch is Branch.LINEAR
    ok &= abs(lin.amplitude - math.sqrt(3.0)) < 1e-15

    worst_ident = 0.0
    for a in (2.5, 3.0, 4.0, 10.0):
        e = decay_rate_r1(a)  # raises if identities drift beyond 1e-10
        s = math.sqrt(-e.alpha1)
        e2s = math.exp(2 * s)
        gap = max(abs(e.r1 - 0.25 * (a + 2 * s) ** 2 / e2s),
                  abs(e.r1 - 4 * s * s * e2s / (e2s - 1.0) ** 2))
        worst_ident = max(worst_ident, gap)
    details["worst_identity_gap"] = worst_ident
    ok &= worst_ident <= 1e-10
    if out_dir is not None:
        compute_spectrum(-2.0, 20).to_csv(out_dir / "spectrum_a-2.csv")
    return CriterionResult("spectrum-integrity", ok, details)


def criterion_series_vs_solver(out_dir=None) -> CriterionResult:
    """The eigenfunction series and the finite-difference march agree in
    sup norm and in fitted decay rate for p = 1."""
    details = {}
    ok = True
    for a in (-1.0, 1.0):
        spec = compute_spectrum(a, 64)
        for name in ("e1", "plateau"):
            u0 = named_profile(name, 512)
            dt = 0.8 * u0.grid.dx / abs(a)
            traj = _run(a, 1.0, u0, dt, 2.5, record_every=5, snapshots=(1.0,))
            v0 = to_reduced_v(restrict_right_half(u0), a)
            series_field, tail = series_evolve(v0, spec, 1.0)
            num = restrict_right_half(traj.snapshot_at(1.0, atol=1e-9))
            gap = float(np.max(np.abs(num.values - series_field.values)))

            solver_rate = fit_decay_rate(traj, (1.0, 2.5)).fitted_rate
            ts = np.linspace(1.0, 2.5, 31)
            sups = np.array([sup_norm(series_evolve(v0, spec, t)[0]) for t in ts])
            series_rate = -float(np.polyfit(ts, np.log(sups), 1)[0])
            rate_gap = abs(solver_rate - series_rate) / series_rate
            details[f"a={a:+g},{name}"] = {"sup_gap": gap, "tail_bound": tail,
                                           "solver_rate": solver_rate,
                                           "series_rate": series_rate,
                                           "rate_rel_gap": rate_gap}
            ok &= gap <= 5e-3 and rate_gap <= 0.01
    return CriterionResult("series-vs-solver", ok, details)


def criterion_p12_rates(out_dir=None) -> CriterionResult:
    """Heat-rate decay for p in (1,2]: fitted rate at lambda_1 within 3
    percent, gradient envelope ratio stable under horizon doubling, and
    the positive lower-bound floor."""
    details = {}
    ok = True
    for a in (-1.0, 1.0):
        for p in (1.5, 2.0):
            u0 = named_profile("e1", 512)
            traj = _run(a, p, u0, 5e-4, 5.0, record_every=10)
            rep = fit_decay_rate(traj, (2.0, 5.0), theoretical_rate=LAM1)
            details[f"rate a={a:+g},p={p}"] = {"fitted": rep.fitted_rate, "rel_err": rep.relative_error}
            ok &= rep.relative_error <= 0.03

    u0 = named_profile("e1", 512)
    r3 = gradient_bound_check(_run(-1.0, 1.5, u0, 5e-4, 3.0), LAM1)
    traj6 = _run(-1.0, 1.5, u0, 5e-4, 6.0)
    r6 = gradient_bound_check(traj6, LAM1)
    details["gradient_ratio"] = {"t_end_3": r3, "t_end_6": r6, "growth": r6 / r3}
    ok &= r6 <= 1.3 * r3

    floor = lower_bound_check(traj6, LAM1)
    details["lower_bound_floor"] = floor
    ok &= floor >= 0.05
    return CriterionResult("p12-heat-rates", ok, details)


def criterion_extinction(out_dir=None) -> CriterionResult:
    """Finite-time extinction for a < 0, p < 1 with a dt-stable T*, and
    the a > 0 negative control."""
    details = {}
    ok = True
    for p in (0.3, 0.5, 0.7):
        t_stars = {}
        for dt in (1e-3, 5e-4):
            u0 = named_profile("e1", 512)
            traj = _run(-1.0, p, u0, dt, 4.0, record_every=5)
            rep = detect_extinction(traj, floor=1e-10)
            t_stars[dt] = rep.t_star_estimate
            ok &= rep.extinct
            if out_dir is not None and p == 0.5 and dt == 1e-3:
                traj.to_csv(out_dir / "extinction_a-1_p0.5.csv")
        drift = abs(t_stars[1e-3] - t_stars[5e-4]) / t_stars[5e-4]
        details[f"p={p}"] = {"t_star_dt1e-3": t_stars[1e-3], "t_star_dt5e-4": t_stars[5e-4],
                             "rel_drift": drift}
        ok &= drift <= 0.05

    u0 = named_profile("e1", 512)
    control = detect_extinction(_run(1.0, 0.5, u0, 1e-3, 3.0, record_every=5), floor=1e-10)
    details["negative_control_extinct"] = control.extinct
    ok &= not control.extinct
    return CriterionResult("extinction", ok, details)


def criterion_envelopes(out_dir=None) -> CriterionResult:
    """p = 3 envelope containment, boundary gradient dominance at every
    recorded time (see module docstring: expected red), and the bounded
    gradient ratio."""
    details = {}
    u0 = named_profile("e1", 512)
    prob = HJProblem(a=-1.0, p=3.0, u0=u0)
    pair = envelope_pair(prob)
    traj = _run(-1.0, 3.0, u0, 5e-4, 2.5, record_every=40, snapshots=(0.5, 1.0, 2.0))

    contain_ok = True
    for t in (0.5, 1.0, 2.0):
        u = traj.snapshot_at(t, atol=1e-9)
        lo = heat_evolve_spectral(pair.w0, t)
        hi = heat_evolve_spectral(pair.W0, t)
        low_gap = float(np.min(u.values - lo.values))
        high_gap = float(np.min(hi.values - u.values))
        details[f"containment t={t}"] = {"min(u - heat_w0)": low_gap, "min(heat_u0 - u)": high_gap}
        contain_ok &= low_gap > -5e-4 and high_gap > -5e-4

    dominance_ok = bool(np.all(traj.grad_at_boundary))
    interior = traj.times[~traj.grad_at_boundary]
    details["dominance_all_records"] = dominance_ok
    if interior.size:
        details["dominance_interior_window"] = [float(interior.min()), float(interior.max())]
        details["dominance_onset"] = float(traj.times[~traj.grad_at_boundary][-1])

    ratio = gradient_bound_check(traj, LAM1)
    details["gradient_ratio"] = ratio
    ratio_ok = ratio <= math.pi / 2.0

    return CriterionResult("envelopes", contain_ok and dominance_ok and ratio_ok, details)


def criterion_stationary(out_dir=None) -> CriterionResult:
    """Closed-form stationary profile and its persistence under the solver."""
    details = {}
    w = stationary_ball(0.5, 1, 512)
    x = w.grid.nodes()
    formula_gap = float(np.max(np.abs(w.values - np.where(np.abs(x) < 1, (1 - np.abs(x) ** 3) / 12.0, 0.0))))
    details["formula_gap"] = formula_gap

    traj = _run(1.0, 0.5, w, 5e-4, 1.0, record_every=10 ** 9, snapshots=(0.25, 0.5, 1.0))
    drift = max(
        float(np.max(np.abs(traj.snapshot_at(t, atol=1e-9).values - w.values))) for t in (0.25, 0.5, 1.0)
    )
    details["max_drift"] = drift
    if out_dir is not None:
        w.to_csv(out_dir / "stationary_p0.5.csv")
    return CriterionResult("stationary", formula_gap < 1e-14 and drift <= 1e-3, details)


def criterion_mode1(out_dir=None) -> CriterionResult:
    """Log-residual slope of the rescaled series against its first mode
    matches -(alpha_2 - alpha_1) within 5 percent for a = 1."""
    a = 1.0
    spec = compute_spectrum(a, 32)
    u0 = named_profile("e1", 512)
    v0 = to_reduced_v(restrict_right_half(u0), a)
    ts = np.linspace(1.0, 4.0, 13)
    res = np.array([mode1_residual_sup(v0, spec, t) for t in ts])
    slope = float(np.polyfit(ts, np.log(res), 1)[0])
    gap = spec.modes[1].alpha - spec.modes[0].alpha
    ok = -1.05 * gap <= slope <= -0.95 * gap
    return CriterionResult("mode1-asymptotics", ok,
                           {"slope": slope, "alpha_gap": gap, "ratio": -slope / gap})


def criterion_comparison(out_dir=None) -> CriterionResult:
    """Discrete comparison principle: 20 random ordered pairs stay
    ordered nodewise at t = 1 in all three regimes."""
    rng = np.random.default_rng(20260808)
    grid = Grid1D(FULL, 256)
    x = grid.nodes()

    def smooth():
        f = np.zeros_like(x)
        for _ in range(3):
            c = rng.uniform(-0.6, 0.6)
            w = rng.uniform(0.15, 0.5)
            f += rng.uniform(0.1, 0.6) * np.exp(-(((x - c) / w) ** 2))
        return f * (1 - x * x)

    pairs = []
    for _ in range(20):
        base = smooth()
        gap = 0.03 * (1 - x * x) + 0.4 * smooth()
        pairs.append((GridFunction(grid, base), GridFunction(grid, base + gap)))

    details = {}
    ok = True
    cfg = SolverConfig(dt=2.5e-4, t_end=1.0, record_every=10 ** 9, snapshot_times=(1.0,))
    for a, p in ((-1.0, 0.5), (-1.0, 1.5), (1.0, 2.0)):
        worst = 0.0
        for lo, hi in pairs:
            u = hj_solve(HJProblem(a=a, p=p, u0=lo), cfg).snapshot_at(1.0, atol=1e-9)
            w = hj_solve(HJProblem(a=a, p=p, u0=hi), cfg).snapshot_at(1.0, atol=1e-9)
            worst = min(worst, float(np.min(w.values - u.values)))
        details[f"a={a:+g},p={p}"] = {"worst_ordering_gap": worst}
        ok &= worst >= -1e-12
    return CriterionResult("comparison", ok, details)


CRITERIA = {
    "cole-hopf": criterion_cole_hopf,
    "p1-rates": criterion_p1_rates,
    "spectrum-integrity": criterion_spectrum,
    "series-vs-solver": criterion_series_vs_solver,
    "p12-heat-rates": criterion_p12_rates,
    "extinction": criterion_extinction,
    "envelopes": criterion_envelopes,
    "stationary": criterion_stationary,
    "mode1-asymptotics": criterion_mode1,
    "comparison": criterion_comparison,
}


def run_criteria(only=None, out_dir=None, echo=print) -> list[CriterionResult]:
    results = []
    for cid, fn in CRITERIA.items():
        if only and cid not in only:
            continue
        result = fn(out_dir)
        results.append(result)
        echo(result.line())
    return results


def summary_payload(results) -> dict:
    return {
        "version": __version__,
        "criteria": {r.cid: {"passed": r.passed, "details": r.details} for r in results},
        "all_passed": all(r.passed for r in results),
    }


def write_summary(results, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary_payload(results), fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
