"""The renderer is exercised against real artifacts produced by the
solver CLI (its published interface), never by importing the solver."""

import hashlib
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hjplots.cli import load_manifest, main
from hjplots.figures import FigureSpec, SchemaError, load_csv, render

LAMBDA1 = math.pi ** 2 / 4.0


def run_solver_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "hjdecay", *args],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def reference_dir(tmp_path_factory):
    """CSV artifacts from the rate and extinction acceptance runs."""
    out = tmp_path_factory.mktemp("reference")
    run_solver_cli("verify", "--only", "p1-rates,extinction", "--out", str(out))
    return out


@pytest.fixture(scope="session")
def solve_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("solve")
    run_solver_cli(
        "solve", "--a", "-1", "--p", "1.5", "--u0", "e1", "--n-cells", "256",
        "--dt", "1e-3", "--t-end", "2", "--out", str(out),
    )
    return out


@pytest.fixture(scope="session")
def spectrum_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("spectrum")
    run_solver_cli("spectrum", "--a", "-2", "--modes", "8", "--out", str(out))
    return out


class TestR1Curve:
    def test_renders_and_crosses_heat_rate_at_zero(self, reference_dir, tmp_path):
        csv_path = reference_dir / "r1_curve.csv"
        out = render(FigureSpec("r1_curve", (str(csv_path),), str(tmp_path / "r1.png")))
        assert out.exists() and out.stat().st_size > 0

        data = load_csv(csv_path, "r1_curve")
        a, r1 = data["a"], data["r1"]
        order = np.argsort(a)
        a, r1 = a[order], r1[order]
        sign = np.sign(r1 - LAMBDA1)
        flips = np.nonzero(np.diff(sign))[0]
        assert flips.size == 1
        step = np.max(np.diff(a))
        assert abs(a[flips[0]]) <= step + 1e-12
        assert abs(a[flips[0] + 1]) <= step + 1e-12
        # regime shape: above the heat rate for a < 0, below for a > 0
        assert np.all(r1[a < 0] > LAMBDA1)
        assert np.all(r1[a > 0] < LAMBDA1)

    def test_value_one_at_a2(self, reference_dir):
        data = load_csv(reference_dir / "r1_curve.csv", "r1_curve")
        at2 = data["r1"][np.argmin(np.abs(data["a"] - 2.0))]
        assert at2 == pytest.approx(1.0, abs=1e-6)


class TestExtinctionProfile:
    def test_renders_with_floor_hit(self, reference_dir, tmp_path):
        csv_path = reference_dir / "extinction_a-1_p0.5.csv"
        out = render(
            FigureSpec("extinction_profile", (str(csv_path),), str(tmp_path / "ext.png"),
                       {"floor": 1e-10})
        )
        assert out.exists() and out.stat().st_size > 0
        data = load_csv(csv_path, "extinction_profile")
        hit = np.nonzero(data["sup_norm"] <= 1e-10)[0]
        assert hit.size > 0
        assert data["t"][hit[0]] < 2.0


class TestDecayOverlay:
    def test_renders_heat_rate_reference(self, solve_dir, tmp_path):
        out = render(
            FigureSpec("decay_overlay", (str(solve_dir / "trajectory.csv"),),
                       str(tmp_path / "decay.png"), {"theoretical_rate": LAMBDA1})
        )
        assert out.exists() and out.stat().st_size > 0


class TestSpectrumTable:
    def test_renders(self, spectrum_dir, tmp_path):
        out = render(
            FigureSpec("spectrum_table", (str(spectrum_dir / "spectrum.csv"),),
                       str(tmp_path / "spec.png"))
        )
        assert out.exists() and out.stat().st_size > 0


class TestSchemaValidation:
    def test_mismatched_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,supnorm,grad_sup_norm\n0,1,1\n")
        with pytest.raises(SchemaError) as exc:
            load_csv(bad, "decay_overlay")
        assert "supnorm" in str(exc.value)
        assert "sup_norm" in str(exc.value)

    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,sup_norm\n0,1\n")
        with pytest.raises(SchemaError) as exc:
            load_csv(bad, "decay_overlay")
        assert "grad_sup_norm" in str(exc.value)

    def test_extra_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,alpha1,r1,lambda1_ratio,extra\n1,1,1,1,1\n")
        with pytest.raises(SchemaError) as exc:
            load_csv(bad, "r1_curve")
        assert "extra" in str(exc.value)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            FigureSpec("pie", ("x.csv",), "out.png")


class TestIdempotence:
    def test_rerender_leaves_inputs_untouched(self, reference_dir, tmp_path):
        csv_path = reference_dir / "r1_curve.csv"
        before = hashlib.sha256(csv_path.read_bytes()).hexdigest()
        spec = FigureSpec("r1_curve", (str(csv_path),), str(tmp_path / "r1.png"))
        first = render(spec)
        size1 = first.stat().st_size
        second = render(spec)
        assert second == first
        assert second.stat().st_size > 0 and size1 > 0
        assert hashlib.sha256(csv_path.read_bytes()).hexdigest() == before


class TestManifestCli:
    def test_batch_render(self, reference_dir, tmp_path):
        manifest = tmp_path / "figures.json"
        manifest.write_text(json.dumps({
            "figures": [
                {"kind": "r1_curve",
                 "inputs": [str(reference_dir / "r1_curve.csv")],
                 "output": "figs/r1.png"},
                {"kind": "extinction_profile",
                 "inputs": [str(reference_dir / "extinction_a-1_p0.5.csv")],
                 "output": "figs/extinction.png",
                 "options": {"floor": 1e-10}},
            ]
        }))
        assert main(["--spec", str(manifest)]) == 0
        assert (tmp_path / "figs" / "r1.png").stat().st_size > 0
        assert (tmp_path / "figs" / "extinction.png").stat().st_size > 0

    def test_relative_paths_resolve_against_manifest(self, reference_dir, tmp_path):
        import shutil

        shutil.copy(reference_dir / "r1_curve.csv", tmp_path / "r1_curve.csv")
        manifest = tmp_path / "m.json"
        manifest.write_text(json.dumps({
            "figures": [{"kind": "r1_curve", "inputs": ["r1_curve.csv"], "output": "r1.png"}]
        }))
        specs = load_manifest(manifest)
        assert specs[0].inputs[0] == str(tmp_path / "r1_curve.csv")
        assert main(["--spec", str(manifest)]) == 0
        assert (tmp_path / "r1.png").exists()

    def test_schema_error_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("wrong,header\n1,2\n")
        manifest = tmp_path / "m.json"
        manifest.write_text(json.dumps({
            "figures": [{"kind": "r1_curve", "inputs": [str(bad)], "output": str(tmp_path / "x.png")}]
        }))
        assert main(["--spec", str(manifest)]) == 2
        assert "wrong" in capsys.readouterr().err

    def test_malformed_manifest_exits_2(self, tmp_path):
        manifest = tmp_path / "m.json"
        manifest.write_text(json.dumps({"not_figures": []}))
        assert main(["--spec", str(manifest)]) == 2
