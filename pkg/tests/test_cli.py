import json
import subprocess
import sys

import pytest

from bernover.cli import build_parser, cli_main, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestExitCodes:
    def test_bound_uni_example(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, out, err = run(
            ["bound-uni", "--fn", "e2", "--degree", "5", "--power", "10", "--constant", "2.25", "--out", str(out_path)],
            capsys,
        )
        assert code == 0
        report = json.loads(out_path.read_text())
        assert report["aggregates"]["pass"] is True
        assert report["config"]["constant"] == 2.25
        assert "PASS" in err and out == ""

    def test_corpus_list(self, capsys):
        code, out, _ = run(["corpus-list"], capsys)
        assert code == 0
        ids = [line.split("\t")[0] for line in out.splitlines()]
        assert "e2" in ids and "runge" in ids

    def test_bound_tensor_to_stdout(self, capsys):
        code, out, _ = run(["bound-tensor", "--degrees", "5,3", "--powers", "10,4", "--fn", "e2x"], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["aggregates"]["pass"] is True
        assert report["config"]["degrees"] == [5, 3]
        assert set(report["meta"]) == {"version", "timestamp", "elapsed_seconds"}

    def test_fail_exits_one(self, capsys):
        code, out, err = run(["optimality", "--fn", "x2y", "--degrees", "2,2", "--power", "1"], capsys)
        assert code == 1
        assert json.loads(out)["aggregates"]["pass"] is False
        assert "FAIL" in err

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["frobnicate"],
            ["bound-uni", "--degree", "x"],
            ["bound-uni", "--degree", "0"],
            ["bound-uni", "--fn", "no_such_function"],
            ["bound-uni", "--moduli", "exact"],
            ["bound-uni", "--degree", "3", "--degrees", "3"],
            ["bound-tensor", "--degrees", "3"],
            ["zhuk", "--h", "0.7"],
            ["converge", "--window", "9,3"],
        ],
    )
    def test_usage_errors_exit_two(self, argv, capsys):
        code, out, err = run(argv, capsys)
        assert code == 2
        assert err.strip()
        assert out == ""

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, err = run(["bound-uni", "--config", str(tmp_path / "absent.json")], capsys)
        assert code == 2 and err

    def test_alias(self, capsys):
        assert cli_main(["corpus-list"]) == 0


class TestEverySubcommand:
    @pytest.mark.parametrize(
        "argv",
        [
            ["bound-uni", "--fn", "abs", "--degree", "3", "--power", "4"],
            ["bound-tensor", "--fn", "cosprod", "--degrees", "4,4", "--powers", "30,30", "--moduli", "grid"],
            ["contraction", "--degrees", "2,2", "--trials", "20"],
            ["converge", "--fn", "runge", "--degrees", "3,4"],
            ["zhuk", "--fn", "abs", "--h", "0.2", "--scan-points", "200"],
            ["optimality", "--degrees", "2,3", "--seed", "4"],
        ],
    )
    def test_passes(self, argv, capsys):
        code, out, _ = run(argv + ["--no-meta"], capsys)
        assert code == 0
        assert json.loads(out)["aggregates"]["pass"] is True


class TestConfigAndOutput:
    def test_config_file_and_override(self, tmp_path, capsys):
        config = {
            "experiment": "bound_tensor",
            "function_id": "e2x",
            "degrees": [5, 3],
            "powers": [10, 4],
            "constant": 2.25,
            "eval_resolution": 11,
            "moduli_mode": "analytic",
            "seed": 0,
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(config))
        code, out, _ = run(["bound-tensor", "--config", str(path), "--constant", "4.5", "--no-meta"], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["config"]["constant"] == 4.5
        assert report["config"]["eval_resolution"] == 11
        assert len(report["points"]) == 121

    def test_config_for_other_experiment(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"experiment": "contraction", "degrees": [2, 2]}))
        code, _, err = run(["bound-uni", "--config", str(path)], capsys)
        assert code == 2 and "contraction" in err

    def test_config_unknown_key(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"experiment": "bound_univariate", "colour": "red"}))
        code, _, _ = run(["bound-uni", "--config", str(path)], capsys)
        assert code == 2

    def test_csv(self, tmp_path, capsys):
        csv_path = tmp_path / "pts.csv"
        code, _, _ = run(["bound-tensor", "--degrees", "2,2", "--resolution", "3", "--csv", str(csv_path)], capsys)
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "x1,x2,lhs,rhs,margin"
        assert len(lines) == 10

    def test_no_meta_is_byte_identical(self, tmp_path, capsys):
        argv = ["contraction", "--degrees", "2,2,2", "--seed", "17", "--trials", "30", "--no-meta"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()
        assert "meta" not in json.loads(a.read_text())

    def test_parser_lists_all_subcommands(self):
        text = build_parser().format_help()
        for name in ("bound-uni", "bound-tensor", "contraction", "converge", "zhuk", "optimality", "corpus-list"):
            assert name in text


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bernover", "bound-uni", "--resolution", "5", "--no-meta"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["aggregates"]["pass"] is True
