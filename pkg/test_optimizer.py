"""Tests for the simplex projection and the composite minimizer"""

import json
import logging
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from temporal_ghz.classical_bounds import closed_form_continuous_min, closed_form_qubit_min, evaluate
from temporal_ghz.errors import PreconditionError
from temporal_ghz.optimizer import (
    _TERMINATIONS,
    BoundsConfig,
    Termination,
    _stalled_status,
    minimize,
    project_to_simplex,
)

FAST = BoundsConfig(restarts=8, max_iters=300)
SMALL_SEARCH = BoundsConfig(support_search_cap=5000)


@pytest.mark.parametrize(
    "v, expected",
    [
        ([0.5, 0.5], [0.5, 0.5]),
        ([1.0, 1.0], [0.5, 0.5]),
        ([2.0, 0.0], [1.0, 0.0]),
        ([-1.0, -1.0, -1.0], [1 / 3, 1 / 3, 1 / 3]),
        ([0.2, 0.9, -0.3], [0.15, 0.85, 0.0]),
    ],
)
def test_project_to_simplex_examples(v, expected):
    np.testing.assert_allclose(project_to_simplex(np.array(v)), expected, atol=1e-15)


@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 8)), elements=st.floats(-10, 10)))
def test_projection_lands_on_simplex(v):
    p = project_to_simplex(v)
    assert np.all(p >= 0)
    np.testing.assert_allclose(p.sum(axis=-1), 1.0, atol=1e-12)
    np.testing.assert_allclose(project_to_simplex(p), p, atol=1e-12)


@given(arrays(np.float64, 5, elements=st.floats(-3, 3)), st.integers(0, 2**32 - 1))
def test_projection_is_nearest_point(v, seed):
    p = project_to_simplex(v)
    others = np.random.default_rng(seed).dirichlet(np.ones(5), size=20)
    assert np.all(np.linalg.norm(others - v, axis=1) >= np.linalg.norm(p - v) - 1e-12)


def test_qubit_n4_minimum():
    result = minimize(4, 2)
    assert result.best_value == pytest.approx(-1 / 16, abs=1e-6)
    assert abs(evaluate(result.best_distribution).value - result.best_value) < 1e-9
    assert result.restarts_run == 64
    assert result.seed == 0


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_qubit_family(n):
    value = minimize(n, 2, SMALL_SEARCH).best_value
    assert abs(value - closed_form_qubit_min(n)) < 1e-5
    assert value >= closed_form_qubit_min(n) - 1e-9


@pytest.mark.parametrize("n", [4, 6, pytest.param(8, marks=pytest.mark.slow)])
def test_default_run_never_beats_the_qubit_bound(n):
    assert minimize(n, 2).best_value >= closed_form_qubit_min(n) - 1e-9


@pytest.mark.parametrize("n, d", [(4, 2), (4, 3), (6, 2)])
def test_restarts_converge(n, d):
    result = minimize(n, d, BoundsConfig(restarts=16))
    assert result.converged_restarts > 0


def test_stalled_rows_are_labelled_by_stationarity():
    p = np.array([[0.5, 0.5], [1.0, 0.0], [0.5, 0.5]])
    labels = [_TERMINATIONS[i] for i in _stalled_status(p, np.ones((3, 2)), np.array([1e-9, 0.3, 0.3]))]
    assert labels == [Termination.GRADIENT_NORM, Termination.SUPPORT_EXHAUSTED, Termination.MAX_ITERS]


@pytest.mark.parametrize("n, d", [(4, 4), (4, 8), (3, 3), (3, 6)])
def test_divisible_dimensions_reach_continuous_bound(n, d):
    result = minimize(n, d, SMALL_SEARCH)
    assert abs(result.best_value - closed_form_continuous_min(n)) < 1e-5
    assert result.imag_residual <= 1e-9


@pytest.mark.parametrize("n, d", [(3, 2), (5, 2), (3, 4), (4, 3)])
def test_uncertified_cases_stay_in_range(n, d):
    result = minimize(n, d, FAST)
    assert -1.0 <= result.best_value <= 1.0
    assert result.best_value >= closed_form_continuous_min(n) - 1e-9
    assert result.imag_residual <= FAST.imag_tol
    assert isinstance(result.termination, Termination)


def test_minimize_is_deterministic():
    cfg = FAST.replace(seed=7)
    first, second = minimize(5, 3, cfg), minimize(5, 3, cfg)
    assert json.dumps(first.to_dict()) == json.dumps(second.to_dict())


def test_thread_workers_match_serial_run():
    serial = minimize(4, 3, FAST)
    threaded = minimize(4, 3, FAST.replace(workers=3))
    assert threaded.best_value == pytest.approx(serial.best_value, abs=1e-12)


def test_enumeration_cap_falls_back_with_warning():
    result = minimize(4, 2, FAST.replace(enumeration_cap=4))
    assert any("support search skipped" in w for w in result.warnings)
    assert result.best_value == pytest.approx(-0.0625, abs=1e-9)


def test_support_search_covers_every_small_support(caplog):
    with caplog.at_level(logging.INFO, logger="temporal_ghz.optimizer"):
        result = minimize(6, 2, FAST.replace(support_search_cap=None))
    assert not any("support search" in w for w in result.warnings)
    assert "covers 4992 canonical supports" in caplog.text


def test_support_search_cap_fills_part_of_a_level():
    result = minimize(6, 2, FAST.replace(support_search_cap=10))
    assert any("covered 9 of 31 supports of size 2" in w for w in result.warnings)
    assert any("support_search_cap=10" in w for w in result.warnings)


def test_result_document():
    doc = minimize(4, 2, FAST).to_dict()
    assert set(doc) >= {"best_value", "best_distribution", "restarts_run", "converged_restarts", "seed", "termination"}
    assert set(doc["best_distribution"]) == {"n", "d", "support", "probs"}
    assert doc["termination"] in {t.value for t in Termination}
    assert math.isclose(math.fsum(doc["best_distribution"]["probs"]), 1.0, abs_tol=1e-12)


@pytest.mark.parametrize(
    "changes",
    [
        {"restarts": 0},
        {"max_iters": -1},
        {"step_init": 0.0},
        {"grad_tol": math.nan},
        {"support_cap": 0},
        {"support_search_cap": 0},
        {"seed": -1},
    ],
)
def test_invalid_config_rejected(changes):
    with pytest.raises(PreconditionError):
        minimize(4, 2, BoundsConfig(**changes))


@pytest.mark.parametrize("n, d", [(2, 2), (4, 1)])
def test_minimize_preconditions(n, d):
    with pytest.raises(PreconditionError):
        minimize(n, d, FAST)


def test_config_from_dict_ignores_unknown_keys(caplog):
    with caplog.at_level(logging.WARNING, logger="temporal_ghz.optimizer"):
        cfg = BoundsConfig.from_dict({"restarts": 5, "colour": "blue"})
    assert cfg.restarts == 5
    assert "colour" in caplog.text
    assert cfg.support_cap_for(6) == 12
    assert BoundsConfig.from_dict(cfg.to_dict()) == cfg
