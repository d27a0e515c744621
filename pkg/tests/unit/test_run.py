# pylint: disable=missing-docstring, no-self-use, too-few-public-methods

import json
import pathlib

import pytest
from pytest import raises

import pyrecency.run as prun


def _table(path):
    lines = pathlib.Path(path).read_text(encoding="utf-8").splitlines()
    rows = [line for line in lines if not line.startswith("#")]
    return [row.split(",") for row in rows]


def _exit_code(argv):
    with raises(SystemExit) as error:
        prun.main(argv + ["--highlight-names", "quotes"])
    return error.value.code


class TestWeightsCommand:
    def test_closed_form(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(["weights", "--beta", "0.5", "--max-lag", "3", "--output", "w.csv"])
        assert _table("w.csv") == [
            ["beta", "lag", "theta"],
            ["0.5", "1", "0.5"],
            ["0.5", "2", "0.25"],
            ["0.5", "3", "0.125"],
        ]

    def test_several_betas(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(
            ["weights", "--beta", "0.5", "--beta", "1.0", "--max-lag", "2", "--output", "w.csv"]
        )
        assert [row[:2] for row in _table("w.csv")[1:]] == [
            ["0.5", "1"],
            ["0.5", "2"],
            ["1.0", "1"],
            ["1.0", "2"],
        ]

    def test_finite_horizon(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(["weights", "--beta", "0.5", "--horizon", "2", "--output", "w.csv"])
        thetas = [float(row[2]) for row in _table("w.csv")[1:]]
        assert thetas == pytest.approx([2 / 3, 1 / 3])

    def test_header(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(["weights", "--output", "w.csv"])
        lines = pathlib.Path("w.csv").read_text(encoding="utf-8").splitlines()
        assert lines[1] == "# format: weights v1"
        assert json.loads(lines[2][len("# config: ") :])["command"] == "weights"

    def test_frozen_unbounded(self, capsys):
        assert _exit_code(["weights", "--beta", "0"]) == 4
        assert "'NonNormalizable'" in capsys.readouterr().err

    def test_beta_out_of_range(self):
        assert _exit_code(["weights", "--beta", "1.5"]) == 4


class TestChainCommand:
    def test_first_order(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(
            ["chain", "--beta", "1", "--particles", "10", "--steps", "3", "--output", "c.csv"]
        )
        rows = _table("c.csv")
        assert rows[0] == ["beta", "t", "lag", "count", "expected_count"]
        assert rows[1:3] == [["1.0", "1", "1", "10", "10.0"], ["1.0", "1", "2", "0", "0.0"]]
        assert len(rows) == 1 + 2 + 3 + 4

    def test_replicas(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(
            ["chain", "--particles", "20", "--steps", "2", "--runs", "3", "--output", "c.csv"]
        )
        rows = _table("c.csv")
        assert rows[0][-1] == "stderr"
        assert rows[1][:3] == ["0.5", "1", "1"]
        assert float(rows[1][3]) == 10.0

    def test_several_betas(self, fs):  # pylint: disable=invalid-name,unused-argument
        args = ["chain", "--particles", "10", "--steps", "2"]
        prun.main(args + ["--beta", "0.2", "--beta", "0.8", "--output", "both.csv"])
        prun.main(args + ["--beta", "0.2", "--output", "low.csv"])
        prun.main(args + ["--beta", "0.8", "--output", "high.csv"])

        both = _table("both.csv")
        assert both[0][0] == "beta"
        assert both[1:] == _table("low.csv")[1:] + _table("high.csv")[1:]
        assert {row[0] for row in both[1:]} == {"0.2", "0.8"}

    def test_frozen_chain(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(
            ["chain", "--beta", "0", "--particles", "8", "--steps", "1", "--output", "c.csv"]
        )
        assert _table("c.csv")[1:] == [
            ["0.0", "1", "1", "0", "0.0"],
            ["0.0", "1", "2", "8", "8.0"],
        ]


class TestFilterCommand:
    ARGS = ["filter", "--particles", "100", "--steps", "30", "--noise-std", "0.2"]

    def test_generated_stream(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(self.ARGS + ["--generator", "changepoint:0,3@15", "--output", "f.csv"])
        rows = _table("f.csv")
        assert rows[0] == [
            "t",
            "mean",
            "std",
            "ess",
            "log_marginal_increment",
            "abs_error",
        ]
        assert len(rows) == 31
        assert [row[0] for row in rows[1:]] == [str(t) for t in range(30)]

    def test_byte_identical_reruns(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(self.ARGS + ["--generator", "drift:0.2", "--output", "a.csv"])
        prun.main(self.ARGS + ["--generator", "drift:0.2", "--output", "b.csv", "--jobs", "2"])
        assert pathlib.Path("a.csv").read_bytes() == pathlib.Path("b.csv").read_bytes()

    def test_input_file(self, fs):  # pylint: disable=invalid-name
        fs.create_file("obs.jsonl", contents='{"t": 0, "y": 0.5}\n{"t": 4, "y": 0.7}\n')
        prun.main(self.ARGS + ["--input", "obs.jsonl", "--output", "f.csv"])
        rows = _table("f.csv")
        assert rows[0][-1] == "log_marginal_increment"
        assert [row[0] for row in rows[1:]] == ["0", "4"]

    def test_generated_records_round_trip(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(
            ["generate", "--generator", "sinusoid:1,20", "--steps", "25", "--output", "g.jsonl"]
        )
        prun.main(self.ARGS + ["--input", "g.jsonl", "--output", "f.csv"])
        assert len(_table("f.csv")) == 26

    def test_report(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(self.ARGS + ["--generator", "drift:0.2", "--report", "r.json"])
        document = json.loads(pathlib.Path("r.json").read_text(encoding="utf-8"))
        assert document["rmse"] >= 0
        assert len(document["rows"]) == 30
        assert document["_header"][1] == "# format: report v1"

        report_args = ["--report", "r.csv", "--output", "f.csv"]
        prun.main(self.ARGS + ["--generator", "drift:0.2"] + report_args)
        assert _table("r.csv")[0] == ["t", "mean", "truth", "abs_error", "ess"]

    def test_config_file(self, fs):  # pylint: disable=invalid-name
        fs.create_file("run.json", contents='{"generator": "drift:0.1", "steps": 12}')
        prun.main(["filter", "--config", "run.json", "--particles", "40", "--output", "f.csv"])
        assert len(_table("f.csv")) == 13

    def test_source_errors(self, fs):  # pylint: disable=invalid-name
        assert _exit_code(self.ARGS) == 2
        assert _exit_code(self.ARGS + ["--input", "a.jsonl", "--generator", "drift:1"]) == 4
        assert _exit_code(self.ARGS + ["--input", "missing.jsonl"]) == 2

        fs.create_file("bad.jsonl", contents='{"t": 0, "y": 1}\n{"t": 1, "y": oops}\n')
        assert _exit_code(self.ARGS + ["--input", "bad.jsonl"]) == 2

        fs.create_file("empty.jsonl", contents="")
        assert _exit_code(self.ARGS + ["--input", "empty.jsonl"]) == 2

        fs.create_file("binary.jsonl", contents=b'{"t": 0, "y": 1.0}\n\xff\xfe\n')
        assert _exit_code(self.ARGS + ["--input", "binary.jsonl"]) == 2

    def test_degenerate_weights(self, fs, capsys):  # pylint: disable=invalid-name
        fs.create_file("far.jsonl", contents='{"t": 0, "y": 1e200}\n')
        assert _exit_code(self.ARGS + ["--input", "far.jsonl"]) == 3
        assert "'DegenerateWeights'" in capsys.readouterr().err

    def test_invalid_config(self, fs):  # pylint: disable=invalid-name,unused-argument
        assert _exit_code(self.ARGS + ["--generator", "drift:0.1", "--resampling", "best"]) == 4
        assert _exit_code(self.ARGS + ["--generator", "drift:0.1", "--particles", "0"]) == 4

    def test_single_beta_commands(self, fs, capsys):  # pylint: disable=invalid-name,unused-argument
        betas = ["--beta", "0.2", "--beta", "0.8"]
        assert _exit_code(self.ARGS + ["--generator", "drift:0.1"] + betas) == 4
        assert "filter takes a single --beta, got 2" in capsys.readouterr().err
        assert _exit_code(["compare-oracle", "--steps", "3", "--particles", "10"] + betas) == 4
        assert "compare-oracle takes a single --beta" in capsys.readouterr().err


class TestOtherCommands:
    def test_compare_oracle(self, fs):  # pylint: disable=invalid-name,unused-argument
        prun.main(
            [
                "compare-oracle",
                "--beta",
                "1",
                "--prior",
                "point:2",
                "--particles",
                "30",
                "--steps",
                "4",
                "--output",
                "d.csv",
            ]
        )
        rows = _table("d.csv")
        assert rows[0] == ["t", "distance", "baseline"]
        assert rows[1:] == [[str(t), "0.0", "0.0"] for t in range(1, 5)]

    def test_bench_needs_long_stream(self):
        assert _exit_code(["bench", "--steps", "100"]) == 4


class TestReruns:
    @pytest.mark.parametrize(
        "argv",
        [
            ["weights", "--beta", "0.3", "--beta", "0.9", "--horizon", "6"],
            ["chain", "--beta", "0.4", "--particles", "50", "--steps", "8", "--runs", "3"],
            ["compare-oracle", "--beta", "0.5", "--particles", "40", "--steps", "5"],
            ["generate", "--generator", "changepoint:0,2@4", "--steps", "10", "--seed", "7"],
        ],
    )
    def test_byte_identical(self, fs, argv):  # pylint: disable=invalid-name,unused-argument
        prun.main(argv + ["--output", "first.out"])
        prun.main(argv + ["--output", "second.out"])
        first = pathlib.Path("first.out").read_bytes()
        assert first
        assert first == pathlib.Path("second.out").read_bytes()

    def test_chain_workers(self, tmp_path):
        argv = ["chain", "--beta", "0.5", "--particles", "30", "--steps", "6", "--runs", "3"]
        inline, pooled = tmp_path / "inline.csv", tmp_path / "pooled.csv"
        prun.main(argv + ["--jobs", "1", "--output", str(inline)])
        prun.main(argv + ["--jobs", "2", "--output", str(pooled)])
        assert inline.read_bytes() == pooled.read_bytes()
