#!/usr/bin/env python3
"""Sample the free coordinate plane of a pinned slice and write a CSV grid.

The default instance pins the first three coefficients of a degree-4
polynomial to (23i, -463, -8461i) and scans the last coefficient; the
member region is a compact blob containing 8020.  The output has one
x,y,member row per grid cell and drops straight into pandas/gnuplot.

    python3 scripts/slice_section_figure.py --out section.csv
    python3 scripts/slice_section_figure.py --resolution 121 --window -5000 40000 -40000 40000
"""

import argparse
import dataclasses
import json
import subprocess
import sys
import tempfile
from pathlib import Path


@dataclasses.dataclass
class FigureConfig:
    pins: tuple = (23.0j, -463.0 + 0j, -8461.0j)
    window: tuple = (-5000.0, 40000.0, -40000.0, 40000.0)
    resolution: int = 81
    out: str = "slice_section.csv"


def pair(v: complex) -> list:
    return [float(v.real), float(v.imag)]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    defaults = FigureConfig()
    ap.add_argument("--out", default=defaults.out)
    ap.add_argument("--resolution", type=int, default=defaults.resolution)
    ap.add_argument("--window", type=float, nargs=4,
                    default=list(defaults.window),
                    metavar=("X0", "X1", "Y0", "Y1"))
    args = ap.parse_args()
    cfg = FigureConfig(window=tuple(args.window), resolution=args.resolution,
                       out=args.out)

    n = len(cfg.pins) + 1
    matrix = [[1.0 if j == i else 0.0 for j in range(n)]
              for i in range(n - 1)]
    job = {
        "command": "slice-sample",
        "payload": {
            "slice": {"matrix": matrix, "target": [pair(v) for v in cfg.pins]},
            "free_axes": [2 * (n - 1), 2 * (n - 1) + 1],
            "window": list(cfg.window),
            "resolution": [cfg.resolution, cfg.resolution],
        },
    }
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(job, fh)
        job_path = fh.name
    # going through the CLI keeps this script an honest consumer of the
    # public interface
    code = subprocess.call([sys.executable, "-m", "stable_slices.cli",
                            "--job", job_path, "--out", cfg.out])
    Path(job_path).unlink(missing_ok=True)
    if code == 0:
        rows = sum(1 for _ in open(cfg.out)) - 1
        print(f"wrote {cfg.out}: {rows} cells over window {cfg.window}")
    return code


if __name__ == "__main__":
    sys.exit(main())
