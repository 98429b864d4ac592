#!/usr/bin/env python3
"""Run the timing experiment with the bundled timing_single_ue scenario."""

import sys
from pathlib import Path

from mmwsync import cli

HERE = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "results/timing_sweep"
    raise SystemExit(
        cli.main(
            [
                "--config", str(HERE / "configs" / "timing_single_ue.yaml"),
                "--experiment", "timing",
                "--out", out,
            ]
        )
    )
