"""Tests for norms, projections, random streams and exact 1D piecewise-linear arithmetic"""

import numpy as np
import pytest

from paramfree_sco.errors import InvalidParameterError, UnboundedObjectiveError
from paramfree_sco.utils import counter_stream, dual_norm_name, matrix_l2_inf, norm, parse_norm, project_ball
from paramfree_sco.utils.piecewise import PiecewiseLinear1D


@pytest.mark.parametrize("raw, expected", [(2, "l2"), ("2.0", "l2"), (1, "l1"), ("inf", "linf"), ("L1", "l1"), ("linf", "linf")])
def test_parse_norm_spellings(raw, expected):
    assert parse_norm(raw) == expected


def test_parse_norm_rejects_unknown():
    with pytest.raises(InvalidParameterError):
        parse_norm("l3")


def test_dual_norms():
    assert dual_norm_name("l2") == "l2"
    assert dual_norm_name("l1") == "linf"
    assert dual_norm_name("linf") == "l1"


def test_matrix_l2_inf_is_largest_row_norm():
    assert matrix_l2_inf(np.array([[3.0, 4.0], [1.0, 0.0]])) == pytest.approx(5.0)


@pytest.mark.parametrize("p", ["l2", "l1", "linf"])
def test_projection_lands_in_ball_and_fixes_interior(p):
    rng = counter_stream(0, 1)
    points = rng.normal(scale=3.0, size=(200, 6))
    projected = project_ball(points, 1.5, p)
    assert np.all(norm(projected, p, axis=1) <= 1.5 + 1e-12)
    inside = points / (norm(points, p, axis=1)[:, None] + 1.0) * 0.5
    np.testing.assert_allclose(project_ball(inside, 1.5, p), inside)


def test_l1_projection_is_the_nearest_point():
    point = np.array([0.9, -0.6, 0.1])
    projected = project_ball(point, 1.0, "l1")
    # soft threshold at 0.25 keeps the first two coordinates
    np.testing.assert_allclose(projected, [0.65, -0.35, 0.0])


def test_projection_accepts_one_radius_per_row():
    points = np.array([[3.0, 4.0], [3.0, 4.0]])
    projected = project_ball(points, np.array([1.0, 10.0]), "l2")
    np.testing.assert_allclose(projected, [[0.6, 0.8], [3.0, 4.0]])


def test_projection_rejects_negative_radius():
    with pytest.raises(InvalidParameterError):
        project_ball(np.ones(2), -1.0, "l2")


def test_counter_streams_are_keyed_not_advanced():
    first = counter_stream(7, 3).random(5)
    counter_stream(7, 2).random(1000)
    np.testing.assert_array_equal(first, counter_stream(7, 3).random(5))
    assert not np.array_equal(first, counter_stream(7, 4).random(5))


def test_counter_stream_rejects_negative_keys():
    with pytest.raises(ValueError):
        counter_stream(1, -2)


def test_piecewise_value_matches_direct_sum():
    terms = PiecewiseLinear1D.from_terms(a=[1.0, 0.5, 2.0], c=[1.0, -0.5, 0.2], b=[0.2, -0.1, 0.0], e=[0.0, 1.0, -0.3])
    xs = np.linspace(-3, 3, 41)
    direct = np.mean(
        [a * np.abs(xs - c) + b * xs + e for a, c, b, e in zip([1.0, 0.5, 2.0], [1.0, -0.5, 0.2], [0.2, -0.1, 0.0], [0.0, 1.0, -0.3])],
        axis=0,
    )
    np.testing.assert_allclose(terms.value(xs), direct)
    np.testing.assert_allclose(terms.compact().value(xs), direct)


def test_piecewise_minimize_absolute_plus_regularizer():
    objective = PiecewiseLinear1D.from_terms(a=[1.0], c=[1.0], b=[0.0]).with_abs_term(0.5)
    x, value = objective.minimize()
    assert x == pytest.approx(1.0)
    assert value == pytest.approx(0.5)


def test_piecewise_minimize_prefers_smallest_magnitude_on_ties():
    # flat between the kinks at -1 and 2
    objective = PiecewiseLinear1D.from_terms(a=[1.0, 1.0], c=[-1.0, 2.0], b=[0.0, 0.0])
    x, _ = objective.minimize()
    assert x == 0.0


def test_piecewise_minimize_detects_unbounded():
    with pytest.raises(UnboundedObjectiveError):
        PiecewiseLinear1D.from_terms(a=[0.5], c=[0.0], b=[-1.0]).minimize()


def test_piecewise_rejects_negative_slopes():
    with pytest.raises(InvalidParameterError):
        PiecewiseLinear1D.from_terms(a=[-1.0], c=[0.0], b=[0.0])


def test_kink_walk_matches_the_full_scan():
    rng = np.random.default_rng(11)
    objective = PiecewiseLinear1D.from_terms(
        rng.uniform(0.2, 1.0, 30), rng.uniform(-5, 5, 30), rng.uniform(-0.1, 0.1, 30)
    ).with_abs_term(0.05)
    expected = objective.minimize()
    for start in (-40.0, -1.0, 0.0, 3.3, 100.0):
        assert objective.descend_from(start) == pytest.approx(expected)


def test_kink_walk_keeps_the_tie_rule():
    objective = PiecewiseLinear1D.from_terms(a=[1.0, 1.0], c=[-1.0, 2.0], b=[0.0, 0.0])
    assert objective.descend_from(1.9)[0] == 0.0
    assert objective.descend_from(-5.0)[0] == 0.0
