"""Cross-checks between the brute-force oracle, the closed forms and the optimizer"""

import itertools
import math

import numpy as np
import pytest

from temporal_ghz.classical_bounds import closed_form_continuous_min, closed_form_qubit_min
from temporal_ghz.errors import PreconditionError
from temporal_ghz.optimizer import BoundsConfig, minimize
from temporal_ghz.oracle import _grid_points, _support_classes, brute_force_min


def test_grid_points():
    np.testing.assert_allclose(_grid_points(10, 1), [[1.0]])
    np.testing.assert_allclose(_grid_points(4, 2), [[0.25, 0.75], [0.5, 0.5], [0.75, 0.25]])
    assert _grid_points(20, 4).shape == (math.comb(19, 3), 4)


def test_single_timeline_supports():
    assert brute_force_min(3, 2, 10, max_support=1) == pytest.approx(1.0)


def test_support_classes_start_at_the_zero_timeline():
    rows = np.array([ks for ks in itertools.product(range(4), repeat=4) if sum(ks) % 4 == 0])
    supports = np.array([rows[list(pair)] for pair in itertools.combinations(range(len(rows)), 2)])
    classes = _support_classes(supports, 4)
    assert 0 < len(classes) < len(supports)
    assert not classes[:, 0].any()
    assert np.all(classes.sum(axis=-1) % 4 == 0)


def test_support_classes_keep_the_grid_minimum():
    rows = np.array([ks for ks in itertools.product(range(3), repeat=3) if sum(ks) % 3 == 0])
    naive = math.inf
    for size in (1, 2, 3):
        grid = _grid_points(12, size)
        for support in itertools.combinations(range(len(rows)), size):
            products = np.prod(grid @ np.exp(2j * np.pi * rows[list(support)] / 3), axis=-1)
            physical = np.abs(products.imag) <= 1e-9
            if physical.any():
                naive = min(naive, float(products.real[physical].min()))
    assert brute_force_min(3, 3, 12, max_support=3) == pytest.approx(naive, abs=1e-12)


def test_qubit_oracle_on_coarse_grid():
    assert brute_force_min(4, 2, 20) == pytest.approx(closed_form_qubit_min(4), abs=1e-12)


def test_continuous_oracle_on_coarse_grid():
    assert brute_force_min(4, 4, 20) == pytest.approx(closed_form_continuous_min(4), abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize(
    "n, d, expected",
    [(4, 2, closed_form_qubit_min(4)), (4, 4, closed_form_continuous_min(4))],
)
def test_oracle_matches_closed_forms(n, d, expected):
    assert abs(brute_force_min(n, d, 100) - expected) < 2e-3


@pytest.mark.slow
def test_oracle_never_beats_the_continuous_bound():
    assert brute_force_min(3, 3, 200) >= -0.125 - 1e-9


def test_oracle_is_an_upper_bound_for_the_optimizer():
    oracle = brute_force_min(5, 2, 20)
    assert minimize(5, 2, BoundsConfig(restarts=16, max_iters=500)).best_value <= oracle + 5e-3


@pytest.mark.parametrize(
    "n, d, grid",
    [(6, 7, 20), (4, 2, 9), (1, 2, 20)],
)
def test_oracle_preconditions(n, d, grid):
    with pytest.raises(PreconditionError):
        brute_force_min(n, d, grid)
