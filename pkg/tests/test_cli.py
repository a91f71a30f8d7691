import csv
import json

import pytest

from thermalkms import QuadratureError, KernelValue
from thermalkms import cli
from thermalkms.experiments import ExperimentReport
from thermalkms.registry import REGISTRY

NESS = "experiments:\n  - id: ness_two_point\n  - id: ness_kms_violation\n"


def config(tmp_path, text=NESS):
    p = tmp_path / "run.yaml"
    p.write_text(text)
    return str(p)


def fake_report(verdict: bool):
    vals = tuple(KernelValue(t ** -1.5, 1e-12) for t in (1.0, 2.0, 4.0, 8.0))
    return ExperimentReport("ness_two_point", (1.0, 2.0, 4.0, 8.0), {0: vals, 1: vals},
                            (-1.5, 0.0, 0.0), {"ok": verdict})


def test_list_shows_every_registered_experiment(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    for key in REGISTRY:
        assert key in out
    assert "checks:" in out


def test_run_writes_all_artifacts(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["run", config(tmp_path), "--out-dir", str(out), "--threads", "2"]) == 0
    assert "ness_two_point: PASS" in capsys.readouterr().out
    for name in ("ness_two_point", "ness_kms_violation"):
        summary = json.loads((out / f"{name}.json").read_text())
        assert summary["experiment"] == name and summary["verdict"] == "pass"
        assert summary["wall_time"] >= 0
        rows = list(csv.reader((out / f"{name}.csv").open()))
        assert rows[0] == ["grid", "lambda_order", "re", "im", "err"] and len(rows) == 2
    echo = (out / "resolved_config.yaml").read_text()
    assert "ness_kms_violation" in echo and "rel_tol" in echo
    total = json.loads((out / "summary.json").read_text())
    assert total["all_pass"] and total["n_experiments"] == 2
    assert not [p for p in out.iterdir() if p.name.startswith(".")]  # no temp files left behind


def test_failing_verdict_and_plot(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "run_experiment", lambda run, exp, tol: fake_report(False))
    out = tmp_path / "out"
    assert cli.main(["run", config(tmp_path, "experiments: [{id: ness_two_point}]\n"),
                     "--out-dir", str(out)]) == 1
    svg = (out / "ness_two_point.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg
    assert len(list(csv.reader((out / "ness_two_point.csv").open()))) == 9


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    def boom(run, exp, tol):
        raise QuadratureError("did not converge")

    monkeypatch.setattr(cli, "run_experiment", boom)
    assert cli.main(["run", config(tmp_path), "--out-dir", str(tmp_path / "o")]) == 3


@pytest.mark.parametrize("text", ["params: {beta: -1}\n", "experiments: [\n", "nope: 1\n"])
def test_configuration_errors_exit_2(tmp_path, text, capsys):
    assert cli.main(["run", config(tmp_path, text), "--out-dir", str(tmp_path / "o")]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_missing_file_and_bad_tolerance(tmp_path):
    assert cli.main(["run", str(tmp_path / "absent.yaml")]) == 2
    assert cli.main(["run", config(tmp_path), "--tol-scale", "0", "--out-dir", str(tmp_path / "o")]) == 2


def test_empty_experiment_list_exits_zero(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["run", config(tmp_path, "experiments: []\n"), "--out-dir", str(out)]) == 0
    assert json.loads((out / "summary.json").read_text())["n_experiments"] == 0


def test_tol_scale_is_forwarded(tmp_path, monkeypatch):
    seen = []
    monkeypatch.setattr(cli, "run_experiment", lambda run, exp, tol: seen.append(tol) or fake_report(True))
    assert cli.main(["run", config(tmp_path), "--tol-scale", "10", "--out-dir", str(tmp_path / "o")]) == 0
    assert seen == [10.0, 10.0]
