"""Tests for concentration widths and their Monte-Carlo coverage"""

import math

import numpy as np
import pytest

from paramfree_sco.concentration import (
    COVERAGE_CHECKS,
    SubGammaTail,
    bennett_width,
    coverage_suite,
    dependent_sum_bound,
    empirical_bennett_width,
    hoeffding_width,
    union_bound_sum,
    vec_inf_width,
    vec_l1_width,
    vec_l2_width,
)
from paramfree_sco.errors import InvalidParameterError


def test_hoeffding_constant():
    assert hoeffding_width(1.0, 100, 0.05) == pytest.approx(0.13581, abs=1e-5)
    assert hoeffding_width(0.0, 100, 0.05) == 0.0


def test_bennett_reduces_to_linear_term_without_variance():
    assert bennett_width(0.0, 1.0, 30, 0.1) == pytest.approx(math.log(20) / 90)
    assert bennett_width(0.2, 1.0, 30, 0.1, two_sided=False) < bennett_width(0.2, 1.0, 30, 0.1)


def test_empirical_bennett_constant():
    assert empirical_bennett_width(np.full(101, 0.3), 1.0, 0.04, two_sided=True) == pytest.approx(0.10745, abs=1e-5)
    assert empirical_bennett_width(np.zeros(5), 0.0, 0.1) == 0.0


def test_empirical_bennett_needs_two_samples():
    with pytest.raises(InvalidParameterError):
        empirical_bennett_width([0.5], 1.0, 0.1)


def test_widths_shrink_with_n_and_grow_as_delta_falls():
    assert hoeffding_width(1.0, 400, 0.1) < hoeffding_width(1.0, 100, 0.1)
    assert hoeffding_width(1.0, 100, 0.01) > hoeffding_width(1.0, 100, 0.1)
    values = np.linspace(0, 1, 50)
    assert empirical_bennett_width(values, 1.0, 0.01) > empirical_bennett_width(values, 1.0, 0.1)


def test_vec_l2_constant_for_identical_vectors():
    vectors = np.tile([0.6, 0.8], (100, 1))
    assert vec_l2_width(vectors, 1.0, 0.06) == pytest.approx(0.46517, abs=1e-5)


def test_vec_l2_rejects_envelope_violation():
    with pytest.raises(InvalidParameterError):
        vec_l2_width(np.tile([3.0, 4.0], (10, 1)), 1.0, 0.1)


def test_vec_inf_identical_vectors():
    d, n, delta = 4, 50, 0.1
    width = vec_inf_width(np.full((n, d), 0.5), np.full(d, 2.0), delta)
    assert width == pytest.approx(14 * 2.0 * math.log(4 * d / delta) / (3 * (n - 1)))


def test_vec_inf_in_one_dimension_has_bennett_shape():
    values = np.linspace(-1, 1, 80)
    delta = 0.1
    log_term = math.log(4 / delta)
    s2 = np.var(values, ddof=1)
    expected = math.sqrt(2 * s2 * log_term / (80 - 1)) + 14 * log_term / (3 * (80 - 1))
    assert vec_inf_width(values[:, None], [1.0], delta) == pytest.approx(expected)


def test_vec_l1_identical_vectors():
    envelopes = np.array([1.0, 0.5, 0.25])
    width = vec_l1_width(np.full((20, 3), 0.1), envelopes, 0.1)
    assert width == pytest.approx(25 * math.log(300) * envelopes.sum() / 19)


def test_vec_l1_ignores_inactive_coordinates():
    rng = np.random.default_rng(4)
    active = rng.choice([-1.0, 1.0], size=(200, 1))
    padded = np.hstack([active, np.zeros((200, 999))])
    envelopes = np.concatenate([[1.0], np.zeros(999)])
    assert vec_l1_width(padded, envelopes, 0.1) == pytest.approx(vec_l1_width(active, [1.0], 0.1))


def test_vector_widths_accept_stacks():
    rng = np.random.default_rng(1)
    stack = rng.choice([-1.0, 1.0], size=(5, 40, 3))
    widths = vec_inf_width(stack, np.ones(3), 0.1)
    assert widths.shape == (5,)
    assert widths[2] == pytest.approx(vec_inf_width(stack[2], np.ones(3), 0.1))


def test_dependent_sum_constants():
    assert dependent_sum_bound(SubGammaTail(0.0, 0.0, count=5), 0.1) == 0.0
    assert dependent_sum_bound(SubGammaTail(1.0, 0.0, count=4), 0.06) == pytest.approx(19.3137, abs=1e-4)


def test_dependent_sum_against_union_bound():
    value = dependent_sum_bound(SubGammaTail(1.0, count=1000), 0.05)
    assert value == pytest.approx(2250 * math.sqrt(math.log(120)))
    assert value == pytest.approx(4922.9, abs=1.0)
    ratios = [
        dependent_sum_bound(SubGammaTail(1.0, count=d), 0.05) / union_bound_sum(SubGammaTail(1.0, count=d), 0.05)
        for d in (100, 1000, 10_000, 100_000)
    ]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    # Linear tails: the dependent bound wins once ln(d/δ) passes (9/4)·ln(6/δ)
    b_only = SubGammaTail(0.0, 1.0, count=10_000)
    assert dependent_sum_bound(b_only, 0.05) < union_bound_sum(b_only, 0.05)
    # Square-root tails need ln(d/δ) above (9/4)²·ln(6/δ)
    huge = SubGammaTail(1.0, count=2_000_000_000)
    assert dependent_sum_bound(huge, 0.05) < union_bound_sum(huge, 0.05)


@pytest.mark.parametrize("delta", [0.01, 0.05, 0.1])
def test_single_dependent_term_costs_at_most_the_log_ratio(delta):
    ratio = math.log(6.0 / delta) / math.log(1.0 / delta)
    root_tail, linear_tail, mixed_tail = SubGammaTail(1.0), SubGammaTail(0.0, 1.0), SubGammaTail(0.7, 0.3)
    # with d = 1 the union aggregate is the single-variable quantile
    quantile = 0.7 * math.sqrt(math.log(1.0 / delta)) + 0.3 * math.log(1.0 / delta)
    assert union_bound_sum(mixed_tail, delta) == pytest.approx(quantile)
    assert dependent_sum_bound(linear_tail, delta) / union_bound_sum(linear_tail, delta) == pytest.approx(2.25 * ratio)
    assert dependent_sum_bound(root_tail, delta) / union_bound_sum(root_tail, delta) == pytest.approx(
        2.25 * math.sqrt(ratio)
    )
    assert dependent_sum_bound(mixed_tail, delta) <= 2.25 * ratio * quantile


@pytest.mark.parametrize("scale", [0.1, 3.0, 25.0])
def test_widths_scale_with_the_data(scale):
    rng = np.random.default_rng(8)
    values = rng.uniform(-1.0, 1.0, 60)
    vectors = rng.uniform(-0.5, 0.5, (60, 4))
    envelopes = np.full(4, 0.5)
    envelope_l2 = float(np.linalg.norm(envelopes))
    assert hoeffding_width(2.0 * scale, 60, 0.1) == pytest.approx(scale * hoeffding_width(2.0, 60, 0.1))
    assert bennett_width(0.4 * scale, 2.0 * scale, 60, 0.1) == pytest.approx(scale * bennett_width(0.4, 2.0, 60, 0.1))
    assert empirical_bennett_width(scale * values, 2.0 * scale, 0.1) == pytest.approx(
        scale * empirical_bennett_width(values, 2.0, 0.1)
    )
    assert vec_l2_width(scale * vectors, scale * envelope_l2, 0.1) == pytest.approx(
        scale * vec_l2_width(vectors, envelope_l2, 0.1)
    )
    assert vec_inf_width(scale * vectors, scale * envelopes, 0.1) == pytest.approx(
        scale * vec_inf_width(vectors, envelopes, 0.1)
    )
    assert vec_l1_width(scale * vectors, scale * envelopes, 0.1) == pytest.approx(
        scale * vec_l1_width(vectors, envelopes, 0.1)
    )


def test_negative_tail_coefficients_are_rejected():
    with pytest.raises(InvalidParameterError):
        SubGammaTail(-1.0)


@pytest.mark.parametrize("name", sorted(COVERAGE_CHECKS))
def test_coverage_at_reduced_trials(name):
    result = COVERAGE_CHECKS[name](trials=2000, delta=0.1, seed=5)
    assert result.trials == 2000
    assert result.within_envelope, result.to_row()


@pytest.mark.slow
def test_full_coverage_suite():
    results = coverage_suite(seed=0, delta=0.1)
    assert {r.bound for r in results} == set(COVERAGE_CHECKS)
    for result in results:
        assert result.within_envelope, result.to_row()
