import csv
import json

import pytest

from yehfeynman.cli import GROUPS, RunConfig, build_parser, load_config, main, run_suite

SMALL = ["--grid", "8x8", "--samples", "2000", "--workers", "1"]


def test_suite_runs_and_reports(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    assert main(["suite", *SMALL, "--seed", "3", "--report", str(out)]) == 0
    printed = capsys.readouterr().out
    assert printed.strip().endswith("OK")
    lines = out.read_text().splitlines()
    assert len(lines) == sum(len(names) for names, _ in GROUPS.values())
    summary = json.loads((tmp_path / "r.jsonl.summary.json").read_text())
    assert summary["passed"] and summary["config"]["seed"] == 3
    assert "workers" not in summary["config"]


@pytest.mark.parametrize("group", ["fubini", "transform", "convolution"])
def test_group_commands(group, capsys):
    assert main([group, *SMALL]) == 0
    assert "PASS" in capsys.readouterr().out


def test_check_selection(tmp_path):
    out = tmp_path / "r.jsonl"
    assert main(["suite", *SMALL, "--check", "fubini", "--check", "transform_q", "--report", str(out)]) == 0
    names = [json.loads(line)["name"] for line in out.read_text().splitlines()]
    assert names == ["fubini", "transform_q"]


def test_hypothesis_failure_exits_nonzero(capsys):
    assert main(["convolution", *SMALL, "--kernels", "1", "--kernels", "2", "--kernels", "s+1",
                 "--check", "relationship_I"]) == 1
    assert "ERROR relationship_I" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [["fubini", "--q", "0"], ["integrate", "--lambda", "-1"], ["suite", "--check", "nope"],
     ["suite", "--grid", "8by8"], ["suite", "--kernels", "import os"], ["suite", "--samples", "1"]],
)
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_config_file_and_overrides(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "grid": {"ns": 4, "nt": 4}, "seed": 9, "n_samples": 500, "q": 2.0, "lambda": 0.5,
        "kernels": ["H4"], "output": {"report": "x.jsonl"},
    }))
    args = build_parser().parse_args(["suite", "--config", str(cfg), "--seed", "10"])
    c = load_config(args)
    assert c.seed == 10 and c.q == 2.0 and c.lam == 0.5 and c.grid["ns"] == 4 and c.grid["S"] == 1.0
    assert c.report == "x.jsonl"
    monkeypatch.setenv("YEHFEYNMAN_SEED", "42")
    assert load_config(build_parser().parse_args(["suite"])).seed == 42
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"sneed": 1}))
    with pytest.raises(SystemExit):
        main(["suite", "--config", str(bad)])


def test_functionals_from_config(tmp_path):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"atoms": [{"weight_re": 1.0, "atom": "s"}, {"weight_im": 1.0, "atom": "t"}]}))
    cfg = RunConfig(grid={"S": 1, "T": 1, "ns": 8, "nt": 8}, n_samples=500, workers=1,
                    functionals=[str(f), {"atoms": [{"weight_re": 0.5, "atom": "s*t"}]}])
    status, reports = run_suite(cfg, ["transform"])
    assert status == 0 and len(reports) == 4


def test_simulate_writes_csv(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert main(["simulate", "--grid", "4x4", "--kernels", "s+t", "--csv", str(out)]) == 0
    assert len(list(csv.reader(open(out)))) == 26
    assert (tmp_path / "x_process.csv").exists()
    assert "Y_h(S,T)" in json.loads(capsys.readouterr().out)


def test_integrate(tmp_path, capsys):
    out = tmp_path / "conv.csv"
    assert main(["integrate", *SMALL, "--csv", str(out)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["mc"]["n"] == 2000
    mean = complex(rec["mc"]["mean_re"], rec["mc"]["mean_im"])
    exact = complex(*rec["closed_form_lambda"])
    assert abs(mean - exact) <= 4 * (rec["mc"]["se_re"] + rec["mc"]["se_im"])
    rows = list(csv.DictReader(open(out)))
    assert float(rows[-1]["mean_re"]) == rec["mc"]["mean_re"]


def test_reports_are_reproducible(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    main(["suite", *SMALL, "--report", str(a)])
    main(["suite", "--grid", "8x8", "--samples", "2000", "--workers", "4", "--report", str(b)])
    assert a.read_text() == b.read_text()


@pytest.mark.parametrize("doc", [
    {"checks": ["fubini"], "kernels": ["H4"]},
    {"checks": ["relationship_I"], "kernels": ["k1k2-pair"]},
])
def test_config_examples_exit_zero(tmp_path, doc):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"grid": {"ns": 16, "nt": 16}, "n_samples": 500, **doc}))
    assert main(["suite", "--config", str(cfg), "--workers", "1"]) == 0


def test_config_with_zero_q_is_usage_error(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"q": 0}))
    with pytest.raises(SystemExit) as exc:
        main(["suite", "--config", str(cfg)])
    assert exc.value.code == 2
