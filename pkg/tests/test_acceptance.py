"""End-to-end reproduction checks through the experiment runners"""

import math

import numpy as np
import pytest

from paramfree_sco import main as cli
from paramfree_sco.harness import create_runner, load_config
from paramfree_sco.optimizers import ada_emd_batch, ada_grad_batch
from paramfree_sco.problems import sample_batch
from paramfree_sco.problems.families import DenseOptimumLinf, SparseOptimumL1

pytestmark = [pytest.mark.slow, pytest.mark.integration]


async def _run(**settings):
    return await create_runner(load_config(None, settings)).run()


async def test_coverage_of_every_width():
    report = await _run(experiment="concentration", delta=0.1)
    assert report.summary["all_within_envelope"] == 1


async def test_greedy_step_size_selection_fails_with_visible_probability():
    report = await _run(experiment="lowerbound", n=3000, trials=20000, chunk=500, seed=0)
    assert report.summary["greedy_indicator_rate"] >= 0.001
    assert report.summary["reliable_not_worse"] == 1


async def test_known_radius_rate_within_envelope():
    report = await _run(experiment="scaling", method="known_radius", n_grid="250,1000,4000", trials=500, delta=0.1)
    for n in (250, 1000, 4000):
        assert report.summary[f"n{n}.q90_within_envelope"] == 1


async def test_two_stage_output_norm_is_bounded():
    report = await _run(experiment="adaptive", mode="single", n=3000, trials=100)
    assert report.summary["norm_within_bound_rate"] == 1.0
    assert report.summary["max_norm_ratio"] <= 33.0


async def test_two_stage_rate_slope():
    report = await _run(
        experiment="scaling",
        method="adaptive",
        lambda_strategy="grid_sup",
        n_grid="250,500,1000,2000,4000",
        trials=100,
    )
    assert report.summary["norm_within_bound_rate"] == 1.0
    assert -0.65 <= report.summary["slope"] <= -0.35


async def test_two_stage_rate_slope_with_inflated_lipschitz_estimate():
    report = await _run(
        experiment="scaling",
        method="adaptive",
        lambda_strategy="grid_sup",
        lipschitz_inflation=1.2,
        n_grid="250,500,1000,2000,4000",
        trials=100,
    )
    assert report.summary["norm_within_bound_rate"] == 1.0
    assert -0.65 <= report.summary["slope"] <= -0.35


async def test_strong_convexity_adaptation_slopes():
    report = await _run(experiment="strongconvex", n_grid="200,800,3200,12800", trials=200)
    for method in ("greedy", "reliable"):
        assert -1.3 <= report.summary[f"{method}.slope"] <= -0.7


@pytest.mark.parametrize("family", ["sparse_optimum_l1_geometry", "dense_optimum_linf_geometry"])
async def test_geometry_selection_stays_near_best_candidate(family):
    report = await _run(
        experiment="adaptive", mode="all", geometry="all", family=family, n=2000, trials=40, erm_max_iter=400,
    )
    assert report.summary["selection_bound_pass"] == 1


def test_repeated_runs_are_byte_identical(tmp_path):
    out = tmp_path / "adaptive.csv"
    args = ["adaptive", "--seed", "5", "--trials", "6", "--out", str(out), "--set", "mode=grid", "--set", "n=200"]
    assert cli.main(args) == 0
    first = out.read_bytes(), out.with_name("adaptive.summary.csv").read_bytes()
    assert cli.main(args + ["--workers", "1"]) == 0
    second = out.read_bytes(), out.with_name("adaptive.summary.csv").read_bytes()
    assert first == second


@pytest.mark.parametrize(
    "family, method, p",
    [(SparseOptimumL1, ada_emd_batch, "l1"), (DenseOptimumLinf, ada_grad_batch, "linf")],
)
def test_geometry_optimizers_meet_their_guarantee(family, method, p):
    spec, n, delta = family(), 1000, 0.1
    radius = spec.oracle.d_star(p)
    log_term = math.log(2.0 * spec.dimension / delta) if p == "l1" else math.log(2.0 / delta)
    envelope = 10.0 * spec.lipschitz_for(p) * radius * math.sqrt(log_term) / math.sqrt(n)
    subopt = []
    for start in range(0, 500, 100):
        values = np.stack([sample_batch(spec, n, 0, n, t).values for t in range(start, start + 100)])
        subopt.append(spec.oracle.suboptimality(method(spec, radius, values)))
    assert np.mean(np.concatenate(subopt) <= envelope) >= 0.9
