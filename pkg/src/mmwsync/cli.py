"""Batch command-line front end.

Parses a YAML scenario file (fail-closed: unknown keys are rejected), runs
the selected experiment, and writes CSV results plus a manifest echoing the
fully resolved configuration.  Every output file starts with a comment row
identifying the scenario hash, seed and software version, and reruns with
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import yaml

from . import montecarlo, optimizer
from .montecarlo import CellConfig, ChannelConfig, Scenario, SectorConfig, StatSummary

_VERSION = montecarlo._VERSION

EXPERIMENTS = ("sqnr", "timing", "cfo", "multicell", "complexity")

_SAMPLE_COLUMNS = {
    "sqnr": ("method", "bits", "snr_db", "sqnr_db_sample"),
    "timing": (
        "method", "trial", "slot", "snr_db", "cfo", "bits",
        "nu_true", "nu_hat", "b_hat", "peak_power", "success",
    ),
    "cfo": (
        "method", "trial", "slot", "snr_db", "cfo", "bits",
        "nu_true", "nu_hat", "b_hat", "peak_power", "success",
    ),
    "multicell": (
        "method", "trial", "slot", "snr_db", "bits",
        "nu_true", "success", "first_success_slot",
    ),
}


@dataclass(frozen=True)
class RunConfig:
    """One batch invocation: scenario file, experiment, output location."""

    config_path: str
    experiment: str
    out_dir: str
    seed: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


_SECTION_TYPES = {"sector": SectorConfig, "channel": ChannelConfig, "cell": CellConfig}


def _coerce_section(cls, data: dict, path: str):
    known = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            raise ValueError(f"unknown configuration key '{path}{key}'")
        if isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    return cls(**kwargs)


def parse_config(path: str | Path) -> Scenario:
    """Load and validate a scenario file; defaults fill unspecified keys."""
    raw = yaml.safe_load(Path(path).read_text())
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ValueError(f"scenario file {path} must hold a mapping")
    known = {f.name for f in dataclasses.fields(Scenario)}
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            raise ValueError(f"unknown configuration key {key!r}")
        if key in _SECTION_TYPES:
            if not isinstance(value, dict):
                raise ValueError(f"section {key!r} must be a mapping")
            value = _coerce_section(_SECTION_TYPES[key], value, f"{key}.")
        elif isinstance(value, list):
            value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        kwargs[key] = value
    return Scenario(**kwargs)


def _format_cell(value) -> str:
    if isinstance(value, float):
        if value == math.inf:
            return "inf"
        return repr(value)
    return str(value)


def _write_csv(path: Path, header_line: str, columns, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        fh.write(header_line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row[c]) for c in columns])


def _aggregate_columns(aggregates: list[dict]):
    return tuple(aggregates[0].keys()) if aggregates else ()


def write_outputs(summary: StatSummary, experiment: str, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = summary.meta
    header = (
        f"# scenario_hash={meta['scenario_hash']} seed={meta['seed']} version={meta['version']}"
    )
    written = []
    samples = out_dir / f"{experiment}_samples.csv"
    _write_csv(samples, header, _SAMPLE_COLUMNS[experiment], summary.rows)
    written.append(samples)
    agg = out_dir / f"{experiment}_aggregates.csv"
    _write_csv(agg, header, _aggregate_columns(summary.aggregates), summary.aggregates)
    written.append(agg)
    manifest = out_dir / f"{experiment}_manifest.yaml"
    manifest.write_text(yaml.safe_dump(meta, sort_keys=True))
    written.append(manifest)
    return written


def _run_complexity(scenario: Scenario, out_dir: Path) -> list[Path]:
    n_a = scenario.n_tot // scenario.n_rf
    n_beam = n_a * scenario.codebook_oversampling
    report = optimizer.complexity_report(
        t_bs=scenario.t_bs,
        n_beam=n_beam,
        n_rf=scenario.n_rf,
        n_triggers=1,
        n=scenario.n_subcarriers,
        t_ue=scenario.t_ue,
        m_tot=scenario.m_tot,
    )
    print(f"BS iterations (single-stream): {report.bs_iterations_single_stream}")
    print(f"BS iterations (multi-beam):    {report.bs_iterations_multi_beam}")
    print(f"UE complex multiplications:    {report.ue_complex_multiplications}")
    print(f"UE complex additions:          {report.ue_complex_additions}")
    out_dir.mkdir(parents=True, exist_ok=True)
    header = (
        f"# scenario_hash={montecarlo.scenario_hash(scenario)} "
        f"seed={scenario.seed} version={_VERSION}"
    )
    path = out_dir / "complexity.csv"
    row = asdict(report) | {"t_bs": scenario.t_bs, "n_beam": n_beam, "n_rf": scenario.n_rf}
    _write_csv(path, header, tuple(row.keys()), [row])
    return [path]


def run(config: RunConfig) -> int:
    """Execute one experiment; returns the process exit status."""
    try:
        scenario = parse_config(config.config_path)
        if config.seed is not None:
            scenario = dataclasses.replace(scenario, seed=config.seed)
        out_dir = Path(config.out_dir)
        if config.experiment == "complexity":
            written = _run_complexity(scenario, out_dir)
        else:
            if config.experiment == "sqnr":
                summary = montecarlo.run_sqnr_experiment(scenario, workers=config.workers)
            elif config.experiment in ("timing", "cfo"):
                summary = montecarlo.run_timing_experiment(scenario, workers=config.workers)
            else:
                summary = montecarlo.run_multicell_experiment(scenario, workers=config.workers)
            written = write_outputs(summary, config.experiment, out_dir)
        for path in written:
            print(f"wrote {path}")
        return 0
    except Exception as exc:  # noqa: BLE001 - batch front end reports and exits
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mmwsync",
        description="Directional frame-timing synchronization experiments",
    )
    parser.add_argument("--config", required=True, help="scenario YAML file")
    parser.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    args = parser.parse_args(argv)
    return run(
        RunConfig(
            config_path=args.config,
            experiment=args.experiment,
            out_dir=args.out,
            seed=args.seed,
            workers=args.workers,
        )
    )


if __name__ == "__main__":
    raise SystemExit(main())
