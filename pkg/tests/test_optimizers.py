"""Tests for the adaptive optimizers and the regularized ERM solver"""

import math

import numpy as np
import pytest

from paramfree_sco.errors import InvalidParameterError, InvariantViolation
from paramfree_sco.optimizers import (
    OptimizerRun,
    ada_emd,
    ada_grad,
    ada_sgd,
    ada_sgd_batch,
    regularized_erm,
    regularized_objective,
    sgd_strongly_convex,
)
from paramfree_sco.problems import (
    AbsLinearAdversarial,
    DomainConstraint,
    PiecewiseLinearFamily,
    StronglyConvex1D,
    population_suboptimality,
    sample_batch,
)
from paramfree_sco.problems.families import EuclideanHingeLike
from paramfree_sco.utils import norm


def test_ada_sgd_hand_trajectory(decreasing_line):
    run = ada_sgd(decreasing_line, 1.0, sample_batch(decreasing_line, 3, seed=0), record_trace=True)
    np.testing.assert_allclose(run.trace[:, 0], [0.0, 1.0, 1.0])
    assert run.average_iterate[0] == pytest.approx(2.0 / 3.0)


def test_ada_grad_matches_ada_sgd_in_one_dimension(decreasing_line):
    run = ada_grad(decreasing_line, 1.0, sample_batch(decreasing_line, 3, seed=0))
    assert run.average_iterate[0] == pytest.approx(2.0 / 3.0)


@pytest.mark.parametrize("method", [ada_sgd, ada_emd, ada_grad])
def test_zero_gradients_keep_the_origin(method, flat_problem):
    run = method(flat_problem, 2.0, sample_batch(flat_problem, 10, seed=0))
    np.testing.assert_array_equal(run.average_iterate, np.zeros(3))


def test_unsigned_emd_on_increasing_line(increasing_line):
    averages = []
    for n in (1, 2, 4):
        run = ada_emd(increasing_line, 1.0, sample_batch(increasing_line, n, seed=0), record_trace=True, signed=False)
        assert np.all((run.trace >= 0.0) & (run.trace <= 1.0))
        averages.append(run.average_iterate[0])
    assert averages[0] == pytest.approx(0.5)
    assert averages[0] > averages[1] > averages[2]


@pytest.mark.parametrize("method, p", [(ada_sgd, "l2"), (ada_emd, "l1"), (ada_grad, "linf")])
def test_every_traced_iterate_is_feasible(method, p):
    spec = EuclideanHingeLike(dimension=6, distance=3.0)
    run = method(spec, 1.0, sample_batch(spec, 300, seed=4), record_trace=True)
    assert run.trace.shape == (300, 6)
    assert np.all(norm(run.trace, p, axis=1) <= 1.0 + 1e-9)
    assert len(run.to_trace_rows()) == 300


def test_emd_step_rules_both_stay_feasible():
    spec = EuclideanHingeLike(dimension=4, distance=2.0)
    batch = sample_batch(spec, 200, seed=9)
    for rule in ("log_dim", "radius"):
        run = ada_emd(spec, 1.5, batch, step_rule=rule)
        assert float(norm(run.average_iterate, "l1")) <= 1.5 + 1e-9


@pytest.mark.parametrize("scale", [0.25, 4.0, 64.0])
def test_ada_sgd_iterates_scale_with_the_radius(scale):
    # subgradients depend only on sign(x), so R → cR maps u_t → c·u_t
    spec = AbsLinearAdversarial(n=500)
    batch = sample_batch(spec, 500, seed=6)
    base = ada_sgd(spec, 1.0, batch, record_trace=True)
    scaled = ada_sgd(spec, scale, batch, record_trace=True)
    np.testing.assert_allclose(scaled.trace, scale * base.trace, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(scaled.average_iterate, scale * base.average_iterate, rtol=1e-9, atol=1e-12)
    assert np.any(base.trace != 0.0)


@pytest.mark.parametrize("method", [ada_sgd, ada_emd, ada_grad])
def test_accumulators_never_decrease(method):
    spec = EuclideanHingeLike(dimension=5, distance=2.0)
    run = method(spec, 1.0, sample_batch(spec, 200, seed=1), record_trace=True)
    assert run.accumulators.shape[0] == 200
    assert np.all(np.diff(run.accumulators, axis=0) >= 0.0)
    assert np.all(run.accumulators[-1] > 0.0)


def test_emd_defaults_to_the_radius_step():
    spec = EuclideanHingeLike(dimension=4, distance=2.0)
    batch = sample_batch(spec, 120, seed=2)
    default = ada_emd(spec, 1.5, batch).average_iterate
    np.testing.assert_array_equal(default, ada_emd(spec, 1.5, batch, step_rule="radius").average_iterate)
    assert not np.allclose(default, ada_emd(spec, 1.5, batch, step_rule="log_dim").average_iterate)


def test_batched_runs_match_single_runs():
    spec = AbsLinearAdversarial(n=500)
    batch = sample_batch(spec, 500, seed=2)
    radii = np.exp([0.0, 1.0, 2.0])
    stacked = ada_sgd_batch(spec, radii, np.repeat(batch.values[None, :], 3, axis=0))
    for row, radius in zip(stacked, radii):
        np.testing.assert_allclose(row, ada_sgd(spec, radius, batch).average_iterate)


def test_radius_must_be_positive(decreasing_line):
    with pytest.raises(InvalidParameterError):
        ada_sgd(decreasing_line, 0.0, sample_batch(decreasing_line, 3, seed=0))


def test_mismatched_domain_geometry_is_rejected(make_linear):
    spec = make_linear([1.0, -1.0], DomainConstraint("l2", 1.0))
    with pytest.raises(InvalidParameterError):
        ada_grad(spec, 1.0, sample_batch(spec, 3, seed=0))


def test_run_record_enforces_its_ball():
    with pytest.raises(InvalidParameterError):
        OptimizerRun("ada_sgd", 1.0, "l2", 1, np.array([2.0]))


def test_known_radius_sgd_reaches_the_rate_envelope():
    """Reduced smoke check of the rate envelope: 100 trials at one n.

    The 500-trial check over an n grid runs in the acceptance suite.
    """
    spec = AbsLinearAdversarial(n=1000, shift=1.0)
    envelope = 10.0 * math.sqrt(math.log(2.0 / 0.1)) / math.sqrt(1000)
    values = np.stack([sample_batch(spec, 1000, 0, 1000, t).values for t in range(100)])
    subopt = spec.oracle.suboptimality(ada_sgd_batch(spec, 1.0, values))
    assert np.quantile(subopt, 0.9) <= envelope


def test_strongly_convex_sgd_converges():
    spec = StronglyConvex1D()
    run = sgd_strongly_convex(spec, 1.0, spec.domain.radius, sample_batch(spec, 4000, seed=1))
    assert population_suboptimality(spec, run.average_iterate) < 1e-3


def test_erm_returns_origin_when_lambda_dominates():
    spec = AbsLinearAdversarial(n=100, shift=1.0)
    solution = regularized_erm(spec, sample_batch(spec, 100, seed=0), lam=1.0)
    assert solution.solver == "origin"
    np.testing.assert_array_equal(solution.minimizer, [0.0])
    assert solution.converged


def test_erm_absolute_value_example():
    spec = PiecewiseLinearFamily(a=(1.0,), c=(1.0,), b=(0.0,))
    solution = regularized_erm(spec, sample_batch(spec, 20, seed=0), lam=0.5)
    assert solution.solver == "exact_1d"
    assert solution.minimizer[0] == pytest.approx(1.0)
    assert solution.objective_value == pytest.approx(0.5)


def test_erm_rejects_nonpositive_lambda():
    spec = StronglyConvex1D()
    with pytest.raises(InvalidParameterError):
        regularized_erm(spec, sample_batch(spec, 10, seed=0), lam=0.0)


def _random_piecewise(seed):
    rng = np.random.default_rng(seed)
    return PiecewiseLinearFamily(
        a=tuple(rng.uniform(0.2, 1.0, 4)), c=tuple(rng.uniform(-2, 2, 4)), b=tuple(rng.uniform(-0.15, 0.15, 4))
    )


@pytest.mark.parametrize("seed", range(100))
def test_generic_solver_agrees_with_breakpoint_scan(seed):
    spec = _random_piecewise(seed)
    batch = sample_batch(spec, 60, seed=seed)
    exact = regularized_erm(spec, batch, 0.05, solver="exact_1d")
    generic = regularized_erm(spec, batch, 0.05, solver="generic")
    assert generic.converged
    assert generic.minimizer[0] == pytest.approx(exact.minimizer[0], abs=1e-4)
    assert generic.objective_value == pytest.approx(exact.objective_value, abs=1e-6)


def test_generic_solver_finds_a_distant_kink():
    spec = PiecewiseLinearFamily(a=(1.0,), c=(50.0,), b=(0.0,))
    batch = sample_batch(spec, 40, seed=0)
    generic = regularized_erm(spec, batch, 0.01, solver="generic")
    exact = regularized_erm(spec, batch, 0.01, solver="exact_1d")
    assert generic.minimizer[0] == pytest.approx(50.0)
    assert generic.objective_value == pytest.approx(0.5)
    assert generic.objective_value == pytest.approx(exact.objective_value)


def test_generic_solver_leaves_the_unit_bracket_for_a_distant_optimum():
    spec = EuclideanHingeLike(dimension=5, distance=8.0, noise=0.5)
    batch = sample_batch(spec, 200, seed=3)
    solution = regularized_erm(spec, batch, lam=0.05, max_iter=20000)
    at_optimum = regularized_objective(spec, batch, 0.05, "l2", spec.optimum)
    assert solution.converged
    assert np.linalg.norm(solution.minimizer - spec.optimum) <= 1e-3
    assert solution.objective_value <= at_optimum + solution.tolerance


def test_exhausted_budget_is_never_reported_as_converged():
    spec = EuclideanHingeLike(dimension=5, distance=8.0, noise=0.5)
    solution = regularized_erm(spec, sample_batch(spec, 200, seed=3), lam=0.05, max_iter=100)
    assert not solution.converged
    assert solution.solver_residual == math.inf
    with pytest.raises(InvariantViolation) as excinfo:
        solution.require_converged("distant optimum")
    assert excinfo.value.to_record()["invariant"] == "erm_residual_within_tolerance"


def test_generic_solver_in_several_dimensions():
    spec = EuclideanHingeLike(dimension=5, distance=1.0, noise=0.5)
    solution = regularized_erm(spec, sample_batch(spec, 200, seed=3), lam=0.2)
    assert solution.solver == "generic"
    assert np.linalg.norm(solution.minimizer - spec.optimum) <= 0.05
    assert math.isfinite(solution.solver_residual)
