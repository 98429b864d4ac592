#!/usr/bin/env python3
"""Reproduce the zero-lag SQNR CDF experiment (single user, flat channel)."""

import sys
from pathlib import Path

from mmwsync import cli

HERE = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "results/sqnr"
    raise SystemExit(
        cli.main(
            [
                "--config", str(HERE / "configs" / "sqnr_single_ue.yaml"),
                "--experiment", "sqnr",
                "--out", out,
            ]
        )
    )
