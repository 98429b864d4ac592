#!/usr/bin/env python3
"""Run the multicell experiment with the bundled multicell scenario."""

import sys
from pathlib import Path

from mmwsync import cli

HERE = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "results/multicell"
    raise SystemExit(
        cli.main(
            [
                "--config", str(HERE / "configs" / "multicell.yaml"),
                "--experiment", "multicell",
                "--out", out,
            ]
        )
    )
