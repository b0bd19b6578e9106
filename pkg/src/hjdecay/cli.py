"""Command-line front door.

Commands: solve, spectrum, verify, rearrange, stationary.  Every run
echoes its full effective configuration (defaults included) into the
output JSON so results are reproducible bit-exactly from the report
alone.  Exit codes: 0 success, 1 acceptance/solver failure, 2 usage or
validation error.

Options may come from a flat key = value config file (--config); flags
override file values, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import DecayReport, detect_extinction, fit_decay_rate
from .domain import GridFunction
from .exact import cole_hopf_solve, profiled_rearrangement, stationary_ball
from .profiles import PROFILES, named_profile
from .solver import HJProblem, SolverBlowUpError, SolverConfig, hj_solve
from .spectral import compute_spectrum, decay_rate_r1, r1_sweep, sweep_to_csv
from .verify import CRITERIA, run_criteria, write_summary


def read_config_file(path: str) -> dict:
    """Flat key = value file; '#' starts a comment; keys use the long
    option names with '-' or '_' interchangeably."""
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line is not 'key = value': {raw.strip()!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = val.strip("\"'")
    return values


def resolve_out_dir(flag: str | None) -> Path:
    out = flag or os.environ.get("HJDECAY_OUT") or "hjdecay_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _merge(args: argparse.Namespace, spec: dict) -> dict:
    """defaults < config file < explicit flags."""
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for key, (cast, default) in spec.items():
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
        elif key in file_values:
            merged[key] = cast(file_values[key])
        else:
            merged[key] = default
    return merged


def _dt_value(text):
    if text == "auto":
        return "auto"
    return float(text)


def _float_list(text):
    return tuple(float(tok) for tok in str(text).split(",") if tok.strip())


SOLVE_SPEC = {
    "a": (float, None),
    "p": (float, None),
    "u0": (str, "e1"),
    "n_cells": (int, 512),
    "dt": (_dt_value, "auto"),
    "t_end": (float, 3.0),
    "record_every": (int, 10),
    "extinction_floor": (float, 1e-12),
    "snapshots": (_float_list, ()),
    "fit_window": (_float_list, ()),
    "theoretical_rate": (float, math.nan),
    "oracle": (str, "none"),
}


def cmd_solve(args) -> int:
    cfg = _merge(args, SOLVE_SPEC)
    if cfg["a"] is None or cfg["p"] is None:
        print("solve requires --a and --p", file=sys.stderr)
        return 2
    out = resolve_out_dir(args.out)
    u0 = named_profile(cfg["u0"], cfg["n_cells"])
    problem = HJProblem(a=cfg["a"], p=cfg["p"], u0=u0)
    snapshots = tuple(sorted(set(cfg["snapshots"])))
    solver_cfg = SolverConfig(
        n_cells=cfg["n_cells"],
        dt=cfg["dt"],
        t_end=cfg["t_end"],
        record_every=cfg["record_every"],
        extinction_floor=cfg["extinction_floor"],
        snapshot_times=snapshots,
    )
    payload = {
        "version": __version__,
        "command": "solve",
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.items()},
    }
    try:
        traj = hj_solve(problem, solver_cfg)
    except SolverBlowUpError as err:
        payload["error"] = {"message": str(err), "failed_at_time": err.time, "failed_at_step": err.step}
        (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"solver failed: {err}", file=sys.stderr)
        return 1

    traj.to_csv(out / "trajectory.csv")
    for t, field in sorted(traj.snapshots.items()):
        field.to_csv(out / f"snapshot_t{t:.6f}.csv")

    ext = detect_extinction(traj, floor=max(cfg["extinction_floor"], 1e-10))
    payload["extinction"] = ext.to_dict()
    if cfg["fit_window"]:
        report = fit_decay_rate(traj, tuple(cfg["fit_window"]), theoretical_rate=cfg["theoretical_rate"])
        payload["decay_fit"] = report.to_dict()
    if cfg["oracle"] != "none":
        if cfg["oracle"] != "cole-hopf":
            print(f"unknown oracle '{cfg['oracle']}' (choose cole-hopf)", file=sys.stderr)
            return 2
        if cfg["p"] != 2.0:
            print("the cole-hopf oracle applies to p = 2 only", file=sys.stderr)
            return 2
        errors = {}
        for t in snapshots:
            exact = cole_hopf_solve(cfg["a"], u0, t)
            errors[f"{t:.6f}"] = float(np.max(np.abs(traj.snapshot_at(t, atol=1e-9).values - exact.values)))
        payload["oracle_sup_error"] = errors
    (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'trajectory.csv'} and {out / 'report.json'}")
    return 0


SPECTRUM_SPEC = {
    "a": (float, None),
    "modes": (int, 20),
    "sweep": (bool, False),
    "a_from": (float, -5.0),
    "a_to": (float, 8.0),
    "a_steps": (int, 260),
}


def cmd_spectrum(args) -> int:
    cfg = _merge(args, SPECTRUM_SPEC)
    out = resolve_out_dir(args.out)
    if cfg["sweep"]:
        grid = np.linspace(cfg["a_from"], cfg["a_to"], cfg["a_steps"] + 1)
        rows = r1_sweep(grid)
        sweep_to_csv(rows, out / "r1_curve.csv")
        print(f"wrote {out / 'r1_curve.csv'} ({len(rows)} rows)")
        return 0
    if cfg["a"] is None:
        print("spectrum requires --a (or --sweep)", file=sys.stderr)
        return 2
    spectrum = compute_spectrum(cfg["a"], cfg["modes"])
    spectrum.to_csv(out / "spectrum.csv")
    exponent = decay_rate_r1(cfg["a"])
    (out / "spectrum_summary.json").write_text(
        json.dumps(
            {
                "version": __version__,
                "a": cfg["a"],
                "modes": cfg["modes"],
                "alpha1": exponent.alpha1,
                "r1": exponent.r1,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    print(f"r1({cfg['a']:g}) = {exponent.r1:.12g}")
    print(f"wrote {out / 'spectrum.csv'}")
    return 0


def cmd_verify(args) -> int:
    out = resolve_out_dir(args.out)
    only = set(args.only.split(",")) if args.only else None
    if only:
        unknown = only - set(CRITERIA)
        if unknown:
            print(f"unknown criterion id(s): {sorted(unknown)}; known: {sorted(CRITERIA)}", file=sys.stderr)
            return 2
    results = run_criteria(only=only, out_dir=out)
    write_summary(results, out / "verify_summary.json")
    print(f"wrote {out / 'verify_summary.json'}")
    failed = [r.cid for r in results if not r.passed]
    if failed:
        print(f"failed criteria: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_rearrange(args) -> int:
    cfg = _merge(args, {"u0": (str, "asym"), "n_cells": (int, 512)})
    out = resolve_out_dir(args.out)
    u0 = named_profile(cfg["u0"], cfg["n_cells"])
    u0.to_csv(out / "rearrange_input.csv")
    profiled_rearrangement(u0).to_csv(out / "rearrange_output.csv")
    print(f"wrote {out / 'rearrange_input.csv'} and {out / 'rearrange_output.csv'}")
    return 0


def cmd_stationary(args) -> int:
    cfg = _merge(args, {"p": (float, 0.5), "n_cells": (int, 512), "n_dim": (int, 1)})
    out = resolve_out_dir(args.out)
    stationary_ball(cfg["p"], cfg["n_dim"], cfg["n_cells"]).to_csv(out / "stationary.csv")
    print(f"wrote {out / 'stationary.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hjdecay",
        description="Desk-scale laboratory for u_t - u_xx = a|u_x|^p with Dirichlet conditions",
    )
    parser.add_argument("--version", action="version", version=f"hjdecay {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default: $HJDECAY_OUT or ./hjdecay_out)")
    common.add_argument("--config", help="flat key = value config file; flags override it")

    p_solve = sub.add_parser("solve", parents=[common], help="run one initial-value problem")
    p_solve.add_argument("--a", type=float)
    p_solve.add_argument("--p", type=float)
    p_solve.add_argument("--u0", choices=sorted(PROFILES))
    p_solve.add_argument("--n-cells", type=int, dest="n_cells")
    p_solve.add_argument("--dt", type=_dt_value)
    p_solve.add_argument("--t-end", type=float, dest="t_end")
    p_solve.add_argument("--record-every", type=int, dest="record_every")
    p_solve.add_argument("--extinction-floor", type=float, dest="extinction_floor")
    p_solve.add_argument("--snapshots", type=_float_list, help="comma-separated times")
    p_solve.add_argument("--fit-window", type=_float_list, dest="fit_window", help="t_start,t_end")
    p_solve.add_argument("--theoretical-rate", type=float, dest="theoretical_rate")
    p_solve.add_argument("--oracle", choices=["none", "cole-hopf"])
    p_solve.set_defaults(fn=cmd_solve)

    p_spec = sub.add_parser("spectrum", parents=[common], help="eigenvalues of the mixed-boundary operator")
    p_spec.add_argument("--a", type=float)
    p_spec.add_argument("--modes", type=int)
    p_spec.add_argument("--sweep", action="store_const", const=True, default=None)
    p_spec.add_argument("--a-from", type=float, dest="a_from")
    p_spec.add_argument("--a-to", type=float, dest="a_to")
    p_spec.add_argument("--a-steps", type=int, dest="a_steps")
    p_spec.set_defaults(fn=cmd_spectrum)

    p_verify = sub.add_parser("verify", parents=[common], help="run the acceptance matrix")
    p_verify.add_argument("--only", help="comma-separated criterion ids")
    p_verify.set_defaults(fn=cmd_verify)

    p_re = sub.add_parser("rearrange", parents=[common], help="profiled rearrangement of a named datum")
    p_re.add_argument("--u0", choices=sorted(PROFILES))
    p_re.add_argument("--n-cells", type=int, dest="n_cells")
    p_re.set_defaults(fn=cmd_rearrange)

    p_st = sub.add_parser("stationary", parents=[common], help="stationary profile for p in (0,1)")
    p_st.add_argument("--p", type=float)
    p_st.add_argument("--n-cells", type=int, dest="n_cells")
    p_st.add_argument("--n-dim", type=int, dest="n_dim")
    p_st.set_defaults(fn=cmd_stationary)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
