#!/usr/bin/env python3
"""Run the cfo experiment with the bundled cfo_single_ue scenario."""

import sys
from pathlib import Path

from mmwsync import cli

HERE = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "results/cfo_sweep"
    raise SystemExit(
        cli.main(
            [
                "--config", str(HERE / "configs" / "cfo_single_ue.yaml"),
                "--experiment", "cfo",
                "--out", out,
            ]
        )
    )
