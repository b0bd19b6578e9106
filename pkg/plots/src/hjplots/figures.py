"""Figure kinds and their renderers.

Every renderer validates the input CSV header against the schema the
solver CLI documents, then draws with matplotlib's Agg backend.  The
four kinds:

* ``decay_overlay``      -- measured sup-norm decay on a log ordinate
                            with the theoretical exponential slope drawn
                            as a reference line
* ``r1_curve``           -- the p = 1 decay exponent against a, with the
                            heat-rate reference line and the a = 0 / a = 2
                            regime boundaries marked
* ``extinction_profile`` -- sup-norm trajectory hitting the extinction
                            floor at a finite time
* ``spectrum_table``     -- eigenvalue / amplitude / residual table
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

LAMBDA1 = math.pi ** 2 / 4.0

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
FIG_SIZE = (6.4, 6.4 * GOLDEN)

plt.rcParams.update({
    "figure.figsize": FIG_SIZE,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
})

SCHEMAS = {
    "decay_overlay": ("t", "sup_norm", "grad_sup_norm"),
    "extinction_profile": ("t", "sup_norm", "grad_sup_norm"),
    "r1_curve": ("a", "alpha1", "r1", "lambda1_ratio"),
    "spectrum_table": ("n", "alpha", "branch", "amplitude", "residual"),
}


class SchemaError(ValueError):
    """Input CSV header does not match the declared schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    output: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise ValueError(f"unknown figure kind '{self.kind}'; choose from {sorted(SCHEMAS)}")
        if not self.inputs:
            raise ValueError("figure spec needs at least one input CSV")


def load_csv(path, kind: str) -> dict:
    """Read a CSV and verify its header matches the kind's schema exactly."""
    expected = SCHEMAS[kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {','.join(expected)}") from None
        rows = list(reader)
    header = [h.strip() for h in header]
    for got, want in zip(header, expected):
        if got != want:
            raise SchemaError(f"{path}: column '{got}' where '{want}' was expected")
    if len(header) < len(expected):
        raise SchemaError(f"{path}: missing column '{expected[len(header)]}'")
    if len(header) > len(expected):
        raise SchemaError(f"{path}: unexpected column '{header[len(expected)]}'")
    columns = {name: [] for name in expected}
    for row in rows:
        for name, value in zip(expected, row):
            columns[name].append(value)
    out = {}
    for name, values in columns.items():
        if name == "branch":
            out[name] = np.asarray(values)
        else:
            out[name] = np.asarray(values, dtype=float)
    return out


def _positive_mask(values):
    return values > 0


def render_decay_overlay(spec: FigureSpec, ax) -> None:
    rate = float(spec.options.get("theoretical_rate", LAMBDA1))
    for path in spec.inputs:
        data = load_csv(path, "decay_overlay")
        t, m = data["t"], data["sup_norm"]
        keep = _positive_mask(m)
        ax.semilogy(t[keep], m[keep], label=Path(path).stem)
        anchor = np.nonzero(keep)[0]
        if anchor.size:
            i = anchor[0]
            ref = m[i] * np.exp(-rate * (t[keep] - t[i]))
            ax.semilogy(t[keep], ref, "--", color="0.3",
                        label=f"slope -{rate:.4g}" if path == spec.inputs[0] else None)
    ax.set_xlabel("t")
    ax.set_ylabel("sup norm")
    ax.legend()


def render_r1_curve(spec: FigureSpec, ax) -> None:
    data = load_csv(spec.inputs[0], "r1_curve")
    a, r1 = data["a"], data["r1"]
    order = np.argsort(a)
    ax.plot(a[order], r1[order], label="decay exponent r1(a)")
    ax.axhline(LAMBDA1, color="0.3", linestyle="--", label="heat rate pi^2/4")
    ax.axvline(0.0, color="0.6", linestyle=":", label="a = 0")
    ax.axvline(2.0, color="0.6", linestyle="-.", label="a = 2")
    ax.set_xlabel("a")
    ax.set_ylabel("r1")
    ax.legend()


def render_extinction_profile(spec: FigureSpec, ax) -> None:
    floor = float(spec.options.get("floor", 1e-10))
    for path in spec.inputs:
        data = load_csv(path, "extinction_profile")
        t, m = data["t"], data["sup_norm"]
        shown = np.maximum(m, floor * 1e-3)
        ax.semilogy(t, shown, label=Path(path).stem)
        hit = np.nonzero(m <= floor)[0]
        if hit.size:
            ax.axvline(t[hit[0]], color="0.5", linestyle=":")
    ax.axhline(floor, color="0.3", linestyle="--", label=f"floor {floor:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("sup norm")
    ax.legend()


def render_spectrum_table(spec: FigureSpec, ax) -> None:
    data = load_csv(spec.inputs[0], "spectrum_table")
    ax.axis("off")
    cells = [
        [f"{int(n)}", f"{alpha:.9g}", branch, f"{amp:.6g}", f"{res:.3g}"]
        for n, alpha, branch, amp, res in zip(
            data["n"], data["alpha"], data["branch"], data["amplitude"], data["residual"]
        )
    ]
    table = ax.table(
        cellText=cells,
        colLabels=["n", "alpha", "branch", "amplitude", "residual"],
        loc="center",
    )
    table.auto_set_font_size(False)
    table.set_fontsize(9)
    table.scale(1.0, 1.3)


RENDERERS = {
    "decay_overlay": render_decay_overlay,
    "r1_curve": render_r1_curve,
    "extinction_profile": render_extinction_profile,
    "spectrum_table": render_spectrum_table,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure to spec.output, creating parent directories."""
    fig, ax = plt.subplots()
    try:
        RENDERERS[spec.kind](spec, ax)
        out = Path(spec.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
    finally:
        plt.close(fig)
    return Path(spec.output)
