"""Tests for the experiment harness, reports and the command line"""

import json
import math

import numpy as np
import pytest

from paramfree_sco import main as cli
from paramfree_sco.errors import ConfigError, InvariantViolation
from paramfree_sco.harness import (
    BaseRunner,
    ExperimentReport,
    TrialTask,
    create_runner,
    fit_loglog_slope,
    load_config,
    read_report,
)
from paramfree_sco.harness.config_loader import parse_key_values
from paramfree_sco.harness.reporting import summary_path_for
from paramfree_sco.selection import LossMatrix


@pytest.fixture
def loss_csv(tmp_path):
    path = tmp_path / "losses.csv"
    LossMatrix(np.array([[0.43, 0.37, 0.33], [0.43, 0.37, 0.33]])).write_csv(path)
    return path


# Configuration


def test_file_values_are_overridden(tmp_path):
    path = tmp_path / "scaling.cfg"
    path.write_text("experiment=scaling\nn=500\nseed=3  # master seed\n\nfamily.shift=2\nn_grid=250,1000\n")
    config = load_config(path, {"seed": 7, "trials": None})
    assert config.experiment == "scaling"
    assert config.n == 500
    assert config.seed == 7
    assert config.trials == 100
    assert config.family_params == {"shift": "2"}
    assert config.grid() == [250, 1000]
    items = config.resolved_items()
    assert "family.shift=2" in items
    assert "n_grid=250,1000" in items


@pytest.mark.parametrize(
    "overrides",
    [
        {"experiment": "scaling", "bogus": "1"},
        {"experiment": "scaling", "delta": "1.5"},
        {"experiment": "scaling", "gamma": "0.5"},
        {"experiment": "scaling", "n_grid": "1000,250"},
        {"experiment": "scaling", "workers": "0"},
        {"experiment": "scaling", "family": "no_such_family"},
        {"experiment": "nothing"},
    ],
)
def test_invalid_settings_are_config_errors(overrides):
    with pytest.raises(ConfigError):
        load_config(None, overrides)


@pytest.mark.parametrize("raw, tag", [("theory", "theory_eq4"), ("practical", "practical_sec5"), ("practical_sec5", "practical_sec5")])
def test_width_rule_short_names_resolve_to_report_tags(raw, tag):
    assert load_config(None, {"experiment": "strongconvex", "width_rule": raw}).width_rule == tag


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg", {"experiment": "scaling"})


def test_malformed_line_reports_position():
    with pytest.raises(ConfigError, match="cfg:2"):
        parse_key_values(["n=10", "just words"], "cfg")


# Reports


def test_fit_recovers_power_law():
    n = np.array([250.0, 1000.0, 4000.0, 16000.0])
    slope, stderr = fit_loglog_slope(n, 3.0 * n ** -0.5)
    assert slope == pytest.approx(-0.5)
    assert stderr == pytest.approx(0.0, abs=1e-9)
    assert fit_loglog_slope([1.0, 10.0], [1.0, 0.1]) == (pytest.approx(-1.0), 0.0)


def test_fit_rejects_non_positive_values():
    with pytest.raises(ValueError):
        fit_loglog_slope([1.0, 2.0], [0.0, 1.0])


def test_report_round_trip(tmp_path):
    report = ExperimentReport(
        "select",
        ["seed=0", "workers=8"],
        [{"k": 0, "value": 0.1, "flag": True}, {"k": 1, "value": math.nan, "flag": False}],
        {"metric": 2.5},
    )
    lines = report.header_lines()
    assert "# experiment=select" in lines
    assert "# seed=0" in lines
    assert not any(line.startswith("# workers") for line in lines)
    out, summary = report.write(tmp_path / "run.csv")
    assert summary == summary_path_for(out) == tmp_path / "run.summary.csv"
    header, rows = read_report(out)
    assert header["experiment"] == "select"
    assert rows == [{"k": "0", "value": "0.1", "flag": "1"}, {"k": "1", "value": "nan", "flag": "0"}]
    _, summary_rows = read_report(summary)
    assert summary_rows == [{"metric": "metric", "value": "2.5"}]


# Runners


def _runner(**settings):
    return create_runner(load_config(None, settings))


async def test_lowerbound_rows_do_not_depend_on_workers():
    settings = dict(experiment="lowerbound", n=3000, trials=4, chunk=2, seed=11)
    serial = await _runner(workers=1, **settings).run()
    parallel = await _runner(workers=3, **settings).run()
    assert serial.rows_csv() == parallel.rows_csv()
    assert serial.summary_csv() == parallel.summary_csv()
    assert [row["trial"] for row in serial.rows] == [0, 1, 2, 3]
    assert serial.summary["threshold"] == pytest.approx(math.exp(6) / (288 * math.sqrt(3000)))
    for row in serial.rows:
        assert row["greedy_k"] >= 1
        assert row["greedy_indicator"] == int(row["greedy_subopt"] >= serial.summary["threshold"])


def test_lowerbound_needs_large_n():
    with pytest.raises(ConfigError):
        _runner(experiment="lowerbound", n=1000)


async def test_scaling_known_radius():
    report = await _runner(experiment="scaling", n_grid="100,400", trials=8, chunk=3).run()
    assert len(report.rows) == 16
    assert {row["n"] for row in report.rows} == {100, 400}
    assert all(row["radius"] == 1.0 for row in report.rows)
    assert all(row["output_norm"] <= 1.0 + 1e-9 for row in report.rows)
    assert "slope" in report.summary and "n400.envelope" in report.summary


async def test_scaling_adaptive_reports_norm_ratios():
    report = await _runner(experiment="scaling", method="adaptive", n_grid="100,200", trials=3).run()
    assert len(report.rows) == 6
    assert report.summary["max_norm_ratio"] <= 33.0
    assert report.summary["norm_within_bound_rate"] == 1.0


@pytest.mark.parametrize("mode", ["single", "grid", "all"])
async def test_adaptive_modes(mode):
    report = await _runner(experiment="adaptive", mode=mode, n=100, trials=3).run()
    assert len(report.rows) == 3
    assert report.summary["mode"] == mode
    if mode == "single":
        assert "norm_within_bound_rate" in report.summary
    else:
        assert all(row["selection_bound_ok"] == 1 for row in report.rows)
        assert report.summary["selection_bound_rate"] == 1.0


def test_adaptive_single_mode_needs_one_geometry():
    with pytest.raises(ConfigError):
        _runner(experiment="adaptive", mode="single", geometry="all")


async def test_strongconvex_candidates_come_from_mu_grid():
    report = await _runner(experiment="strongconvex", n_grid="100,200", trials=4, chunk=4).run()
    assert len(report.rows) == 8
    mus = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}
    assert all(row["greedy_mu"] in mus for row in report.rows)
    assert "greedy.slope" in report.summary and "reliable.slope" in report.summary


async def test_concentration_reduced_run():
    report = await _runner(experiment="concentration", trial_scale=0.01).run()
    coverage = [row for row in report.rows if row["kind"] == "coverage"]
    comparison = [row for row in report.rows if row["kind"] == "comparison"]
    assert len(coverage) == 7
    assert len(comparison) == 8
    assert report.summary["all_within_envelope"] in (0, 1)


async def test_select_from_loss_matrix(loss_csv):
    runner = _runner(experiment="select", loss_csv=str(loss_csv), tau="0,0.04,0.30")
    report = await runner.run()
    assert report.summary["greedy_chosen"] == 2
    assert report.summary["reliable_chosen"] == 1
    assert report.summary["safe_set"] == "0;1"
    assert report.summary["theta"] == pytest.approx(0.43)
    assert report.summary["width_rule"] == "custom"
    status = runner.get_status()
    assert status["state"] == "completed"
    assert status["completed_trials"] == status["total_trials"] == 1
    assert await runner.health_check()


def test_select_needs_exactly_one_width_source(loss_csv):
    with pytest.raises(ConfigError):
        _runner(experiment="select", loss_csv=str(loss_csv))
    with pytest.raises(ConfigError):
        _runner(experiment="select", loss_csv=str(loss_csv), tau="0,0,0", m_values="0,1,1")


class _FailingRunner(BaseRunner):
    experiment = "failing"

    def trial_tasks(self):
        return [TrialTask(0), TrialTask(1)]

    def run_trial(self, task):
        if task.index == 1:
            raise InvariantViolation("output_in_ball", {"trial": task.index})
        return task.index

    def summarize(self, results):
        return ExperimentReport(self.experiment, [], [], {})


async def test_failed_runner_is_unhealthy():
    runner = _FailingRunner(load_config(None, {"experiment": "select"}))
    with pytest.raises(InvariantViolation):
        await runner.run()
    assert runner.get_status()["state"] == "failed"
    assert not await runner.health_check()


# Command line


def test_cli_writes_identical_reports(tmp_path, loss_csv):
    args = ["select", "--set", f"loss_csv={loss_csv}", "--set", "tau=0,0.04,0.30"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(first)]) == 0
    assert cli.main(args + ["--out", str(second), "--workers", "2"]) == 0
    assert first.read_bytes().replace(b"b.csv", b"a.csv") == second.read_bytes().replace(b"b.csv", b"a.csv")
    assert summary_path_for(first).exists()


def test_cli_prints_to_stdout_without_out(capsys, loss_csv):
    assert cli.main(["select", "--set", f"loss_csv={loss_csv}", "--set", "tau=0,0.04,0.30"]) == 0
    output = capsys.readouterr().out
    assert "metric,value" in output
    assert "reliable_chosen,1" in output


def test_cli_config_error_exit_code(capsys):
    assert cli.main(["scaling", "--set", "delta=2"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_invariant_violation_exit_code(monkeypatch, capsys):
    def broken(config):
        raise InvariantViolation("disjoint_sample_stages", {"stage": 1, "shared": 4})

    monkeypatch.setattr(cli, "create_runner", broken)
    assert cli.main(["scaling"]) == 3
    records = [json.loads(line) for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
    assert records == [{"invariant": "disjoint_sample_stages", "shared": 4, "stage": 1, "status": "FAILURE"}]
