import math
from pathlib import Path

import pytest
import yaml

from mmwsync import cli


MINIMAL = "mode: single_ue\n"

TINY_SQNR = """
mode: single_ue
trials: 6
inner_repeats: 8
t_bs: 4
adc_bits: [2, .inf]
snr_db_grid: [0.0]
seed: 77
"""


def write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "scenario.yaml"
    path.write_text(text)
    return path


class TestParseConfig:
    def test_minimal_defaults_to_reference_numerology(self, tmp_path):
        scenario = cli.parse_config(write(tmp_path, MINIMAL))
        assert scenario.n_subcarriers == 512
        assert scenario.cp_length == 64
        assert scenario.subcarrier_spacing_khz == 270.0
        assert scenario.n_zc == 63
        assert scenario.m_tot == 16

    def test_unknown_key_fails_closed(self, tmp_path):
        path = write(tmp_path, "mode: single_ue\nn_subcariers: 64\n")
        with pytest.raises(ValueError, match="n_subcariers"):
            cli.parse_config(path)

    def test_unknown_nested_key_names_path(self, tmp_path):
        path = write(tmp_path, "mode: single_ue\ncell:\n  radius: 10\n")
        with pytest.raises(ValueError, match="cell.radius"):
            cli.parse_config(path)

    def test_out_of_range_value(self, tmp_path):
        path = write(tmp_path, "mode: single_ue\nadc_bits: [99]\n")
        with pytest.raises(ValueError):
            cli.parse_config(path)

    def test_infinite_bits_parse(self, tmp_path):
        scenario = cli.parse_config(write(tmp_path, "adc_bits: [2, .inf]\n"))
        assert scenario.adc_bits == (2, math.inf)

    def test_nested_sections(self, tmp_path):
        text = "mode: multi_cell\ncell:\n  isd_m: 400.0\nchannel:\n  regime: clustered\n"
        scenario = cli.parse_config(write(tmp_path, text))
        assert scenario.cell.isd_m == 400.0
        assert scenario.channel.regime == "clustered"


class TestRun:
    def test_seed_override_supersedes_file(self, tmp_path):
        path = write(tmp_path, TINY_SQNR)
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert cli.run(cli.RunConfig(str(path), "sqnr", str(out1), seed=123)) == 0
        assert cli.run(cli.RunConfig(str(path), "sqnr", str(out2))) == 0
        header1 = (out1 / "sqnr_samples.csv").read_text().splitlines()[0]
        header2 = (out2 / "sqnr_samples.csv").read_text().splitlines()[0]
        assert "seed=123" in header1
        assert "seed=77" in header2
        assert header1.split("scenario_hash=")[1] != header2.split("scenario_hash=")[1]

    def test_sqnr_csv_schema(self, tmp_path):
        path = write(tmp_path, TINY_SQNR)
        out = tmp_path / "out"
        assert cli.run(cli.RunConfig(str(path), "sqnr", str(out))) == 0
        lines = (out / "sqnr_samples.csv").read_text().splitlines()
        assert lines[0].startswith("# scenario_hash=")
        assert "version=" in lines[0]
        assert lines[1] == "method,bits,snr_db,sqnr_db_sample"
        assert len(lines) == 2 + 6 * 4
        manifest = yaml.safe_load((out / "sqnr_manifest.yaml").read_text())
        assert manifest["scenario"]["trials"] == 6
        assert "beam_plans" in manifest

    def test_rerun_byte_identical(self, tmp_path):
        path = write(tmp_path, TINY_SQNR)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        cli.run(cli.RunConfig(str(path), "sqnr", str(out1)))
        cli.run(cli.RunConfig(str(path), "sqnr", str(out2)))
        for name in ("sqnr_samples.csv", "sqnr_aggregates.csv", "sqnr_manifest.yaml"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_complexity_report_printed(self, tmp_path, capsys):
        path = write(tmp_path, "t_bs: 8\nn_tot: 32\nn_rf: 4\n")
        out = tmp_path / "out"
        assert cli.run(cli.RunConfig(str(path), "complexity", str(out))) == 0
        captured = capsys.readouterr().out
        assert "524288" in captured
        assert (out / "complexity.csv").exists()

    def test_timing_csv_schema(self, tmp_path):
        text = "trials: 4\nt_bs: 4\nadc_bits: [2]\nsnr_db_grid: [0.0]\nseed: 5\n"
        path = write(tmp_path, text)
        out = tmp_path / "out"
        assert cli.run(cli.RunConfig(str(path), "timing", str(out))) == 0
        lines = (out / "timing_samples.csv").read_text().splitlines()
        assert lines[1] == "method,trial,slot,snr_db,cfo,bits,nu_true,nu_hat,b_hat,peak_power,success"

    def test_bad_config_nonzero_exit(self, tmp_path):
        path = write(tmp_path, "bogus_key: 1\n")
        assert cli.run(cli.RunConfig(str(path), "sqnr", str(tmp_path / "x"))) == 1

    def test_missing_file_nonzero_exit(self, tmp_path):
        assert cli.run(cli.RunConfig(str(tmp_path / "nope.yaml"), "sqnr", str(tmp_path))) == 1

    def test_unknown_experiment_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            cli.RunConfig("x.yaml", "frobnicate", "out")


class TestMain:
    def test_main_end_to_end(self, tmp_path, capsys):
        path = write(tmp_path, TINY_SQNR)
        code = cli.main(
            ["--config", str(path), "--experiment", "sqnr", "--out", str(tmp_path / "o")]
        )
        assert code == 0
        assert "wrote" in capsys.readouterr().out
