"""Manifest-driven batch entry point.

A manifest is a small JSON file:

    {
      "figures": [
        {"kind": "r1_curve",
         "inputs": ["out/r1_curve.csv"],
         "output": "figures/r1_curve.png"},
        {"kind": "extinction_profile",
         "inputs": ["out/extinction_a-1_p0.5.csv"],
         "output": "figures/extinction.png",
         "options": {"floor": 1e-10}}
      ]
    }

Relative input/output paths resolve against the manifest's directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .figures import FigureSpec, SchemaError, render


def load_manifest(path: str) -> list[FigureSpec]:
    base = Path(path).resolve().parent
    payload = json.loads(Path(path).read_text())
    if "figures" not in payload or not isinstance(payload["figures"], list):
        raise ValueError("manifest must contain a 'figures' list")
    specs = []
    for entry in payload["figures"]:
        inputs = tuple(str(base / p) if not Path(p).is_absolute() else p for p in entry["inputs"])
        output = entry["output"]
        if not Path(output).is_absolute():
            output = str(base / output)
        specs.append(FigureSpec(kind=entry["kind"], inputs=inputs, output=output,
                                options=entry.get("options", {})))
    return specs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hjdecay-plots",
                                     description="render figures from hjdecay CSV artifacts")
    parser.add_argument("--spec", required=True, help="JSON figure manifest")
    parser.add_argument("--version", action="version", version=f"hjdecay-plots {__version__}")
    args = parser.parse_args(argv)
    try:
        specs = load_manifest(args.spec)
        for spec in specs:
            out = render(spec)
            print(f"wrote {out}")
    except (SchemaError, ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
