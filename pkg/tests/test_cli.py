"""Command-line interface: exit codes, payload contents, determinism."""

import csv
import json

import pytest

from mesram.cli import DEFAULT_SCENARIO, _parse_script, load_baselines, main
from mesram.errors import ConfigError


def run(tmp_path, *argv):
    out = tmp_path / "out"
    return main(["--out", str(out), *argv]), out


class TestExitCodes:
    def test_truth_table_success(self, tmp_path):
        code, out = run(tmp_path, "compute", "--truth-table")
        assert code == 0
        assert (out / "truth_table.csv").exists()
        assert (out / "compute_summary.json").exists()

    def test_missing_config_is_usage_error(self, tmp_path):
        code, _ = run(tmp_path, "--config", str(tmp_path / "nope.ini"),
                      "compute", "--truth-table")
        assert code == 2

    def test_bad_config_key_is_usage_error(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[device]\nwarp = 9\n")
        code, _ = run(tmp_path, "--config", str(bad), "compute",
                      "--truth-table")
        assert code == 2

    def test_bad_script_is_usage_error(self, tmp_path):
        script = tmp_path / "s.txt"
        script.write_text("write 2\n")
        code, _ = run(tmp_path, "cell", "--script", str(script))
        assert code == 2

    def test_unknown_mc_workload_is_usage_error(self, tmp_path):
        code, _ = run(tmp_path, "mc", "--ops", "refresh")
        assert code == 2

    def test_missing_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2


class TestScriptParsing:
    def test_default_scenario_parses(self):
        script = _parse_script(DEFAULT_SCENARIO)
        assert [op for op, _ in script] == ["write", "read", "store", "gate",
                                            "restore", "read"]
        assert script[0] == ("write", 0)

    def test_comments_and_blanks_ignored(self):
        script = _parse_script("# setup\n\nwrite 1  # data\nread\n")
        assert script == [("write", 1), ("read", None)]

    def test_unknown_op(self):
        with pytest.raises(ConfigError):
            _parse_script("refresh\n")

    def test_stray_argument(self):
        with pytest.raises(ConfigError):
            _parse_script("read 1\n")

    def test_empty_script(self):
        with pytest.raises(ConfigError):
            _parse_script("# only comments\n")


class TestPayloads:
    def test_truth_table_contents(self, tmp_path):
        _, out = run(tmp_path, "compute", "--truth-table")
        with open(out / "truth_table.csv") as fh:
            rows = list(csv.DictReader(fh))
        table = {(r["qb1"], r["qb2"]): (r["rbl_level"], r["xor"], r["xnor"])
                 for r in rows}
        assert table[("0", "0")] == ("MID", "0", "1")
        assert table[("1", "1")] == ("MID", "0", "1")
        assert table[("1", "0")] == ("VDD", "1", "0")
        assert table[("0", "1")] == ("GND", "1", "0")

    def test_compute_verifies_against_oracle(self, tmp_path):
        code, out = run(tmp_path, "compute", "--rows", "4", "--cols", "32")
        assert code == 0
        summary = json.loads((out / "compute_summary.json").read_text())
        assert summary["verified"] is True
        assert summary["columns"] == 32
        assert summary["bulk_latency_s"] == pytest.approx(2 * 16.7e-12)

    def test_cell_default_round_trip(self, tmp_path):
        code, out = run(tmp_path, "cell")
        assert code == 0
        summary = json.loads((out / "cell_summary.json").read_text())
        assert summary["final_q"] == 0
        assert summary["final_mefet"] == "ON"
        with open(out / "cell_trace.csv") as fh:
            rows = list(csv.DictReader(fh))
        by_op = {r["op"]: r for r in rows}
        assert float(by_op["read"]["delay_s"]) == pytest.approx(14.8e-12)
        assert float(by_op["store"]["delay_s"]) == pytest.approx(0.11e-9)
        assert (out / "cell_trace.png").exists()

    def test_csv_summary_format(self, tmp_path):
        _, out = run(tmp_path, "--format", "csv", "compute", "--truth-table")
        with open(out / "compute_summary.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["key", "value"]

    def test_device_summary_reports_capacitance(self, tmp_path):
        code, out = run(tmp_path, "device", "--trace")
        assert code == 0
        summary = json.loads((out / "device_summary.json").read_text())
        assert summary["me_capacitance_f"] == pytest.approx(9.56e-18,
                                                            rel=1e-3)
        assert summary["switching_time_s"] < 20e-12
        assert (out / "device_trace.png").exists()
        # trace rows carry plain decimal floats
        first = (out / "trace.csv").read_text().splitlines()[1]
        assert "np." not in first

    def test_mc_results_table(self, tmp_path):
        code, out = run(tmp_path, "mc", "--sigma-stop", "30", "--step", "30",
                        "--ops", "xor_all_inputs")
        assert code == 0
        with open(out / "mc_results.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert {r["sigma_pct"] for r in rows} == {"0", "30"}
        assert all(r["failures"] == "0" for r in rows)
        assert (out / "mc_curves.png").exists()
        assert (out / "mc_margins.png").exists()


class TestDeterminism:
    def test_compute_payload_bit_identical(self, tmp_path):
        _, out1 = run(tmp_path / "a", "--seed", "5", "compute",
                      "--rows", "4", "--cols", "64")
        _, out2 = run(tmp_path / "b", "--seed", "5", "compute",
                      "--rows", "4", "--cols", "64")
        assert ((out1 / "compute_result.csv").read_bytes()
                == (out2 / "compute_result.csv").read_bytes())

    def test_seed_changes_compute_payload(self, tmp_path):
        _, out1 = run(tmp_path / "a", "--seed", "5", "compute",
                      "--rows", "4", "--cols", "64")
        _, out2 = run(tmp_path / "b", "--seed", "6", "compute",
                      "--rows", "4", "--cols", "64")
        assert ((out1 / "compute_result.csv").read_bytes()
                != (out2 / "compute_result.csv").read_bytes())


def test_baseline_fixture_loads():
    baselines = load_baselines()
    by_name = {b.name: b for b in baselines}
    assert by_name["xsram"].relative_energy == 7.0
    assert by_name["compute-cache"].relative_time is None
