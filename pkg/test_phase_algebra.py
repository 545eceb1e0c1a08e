"""Tests for root-of-unity arithmetic"""

import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from temporal_ghz.errors import DimensionMismatchError, PreconditionError
from temporal_ghz.phase_algebra import (
    PhaseExponent,
    distance_to_nearest_root,
    phase_mul,
    phase_to_complex,
    roots_of_unity,
    weighted_phase_sum,
)


@st.composite
def phase_pairs(draw, max_d=12):
    d = draw(st.integers(min_value=1, max_value=max_d))
    return PhaseExponent(draw(st.integers(0, d - 1)), d), PhaseExponent(draw(st.integers(0, d - 1)), d)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((0, 2), (1, 2), (1, 2)),
        ((1, 2), (1, 2), (0, 2)),
        ((3, 4), (2, 4), (1, 4)),
    ],
)
def test_phase_mul_examples(a, b, expected):
    assert phase_mul(PhaseExponent(*a), PhaseExponent(*b)) == PhaseExponent(*expected)


def test_phase_mul_rejects_mixed_dimensions():
    with pytest.raises(DimensionMismatchError, match="d=3 and d=4"):
        phase_mul(PhaseExponent(1, 3), PhaseExponent(1, 4))


def test_residues_are_canonical():
    assert PhaseExponent(7, 3).k == 1
    assert PhaseExponent(-1, 5).k == 4
    assert PhaseExponent(2, 5).inverse() == PhaseExponent(3, 5)


def test_zero_dimension_rejected():
    with pytest.raises(PreconditionError):
        PhaseExponent(0, 0)


@pytest.mark.parametrize(
    "k, d, expected",
    [(0, 7, 1 + 0j), (1, 2, -1 + 0j), (1, 4, 1j)],
)
def test_phase_to_complex_examples(k, d, expected):
    assert phase_to_complex(PhaseExponent(k, d)) == pytest.approx(expected, abs=1e-15)


def test_quarter_turns_are_exact():
    assert phase_to_complex(PhaseExponent(1, 2)) == -1
    assert phase_to_complex(PhaseExponent(3, 4)) == -1j
    assert phase_to_complex(PhaseExponent(2, 8)) == 1j


def test_group_laws_exhaustive():
    for d in range(1, 13):
        identity = PhaseExponent(0, d)
        elements = [PhaseExponent(k, d) for k in range(d)]
        for a in elements:
            assert a * identity == a
            for b in elements:
                assert a * b == b * a
                assert abs(phase_to_complex(a * b) - phase_to_complex(a) * phase_to_complex(b)) < 1e-12
                for c in elements:
                    assert (a * b) * c == a * (b * c)


@given(phase_pairs())
def test_embedding_is_unit_modulus(pair):
    for a in pair:
        z = phase_to_complex(a)
        assert abs(abs(z) - 1) < 1e-14
        assert z == pytest.approx(cmath.exp(2j * math.pi * a.k / a.d), abs=1e-14)


@pytest.mark.parametrize("d", [3, 5, 7, 9, 11])
def test_odd_dimensions_never_reach_minus_one(d):
    gap = 2 * math.sin(math.pi / (2 * d)) - 1e-12
    for k in range(d):
        assert abs(phase_to_complex(PhaseExponent(k, d)) + 1) > gap


@pytest.mark.parametrize(
    "phases, weights, expected",
    [
        ([(0, 2)], [1.0], 1 + 0j),
        ([(0, 2), (1, 2)], [0.5, 0.5], 0j),
        ([(0, 4), (1, 4)], [0.5, 0.5], 0.5 + 0.5j),
    ],
)
def test_weighted_phase_sum_examples(phases, weights, expected):
    result = weighted_phase_sum([PhaseExponent(*p) for p in phases], weights)
    assert result == pytest.approx(expected, abs=1e-15)


def test_weighted_phase_sum_rejects_bad_input():
    with pytest.raises(PreconditionError, match="equal lengths"):
        weighted_phase_sum([PhaseExponent(0, 2)], [0.5, 0.5])
    with pytest.raises(PreconditionError, match="non-negative"):
        weighted_phase_sum([PhaseExponent(0, 2)], [-1.0])
    with pytest.raises(DimensionMismatchError):
        weighted_phase_sum([PhaseExponent(0, 2), PhaseExponent(0, 3)], [0.5, 0.5])


@given(
    st.integers(min_value=2, max_value=12).flatmap(
        lambda d: st.lists(
            st.tuples(st.integers(0, d - 1), st.floats(0, 1)), min_size=1, max_size=8
        ).map(lambda items: (d, items))
    )
)
def test_weighted_sum_bounded_by_total_weight(case):
    d, items = case
    phases = [PhaseExponent(k, d) for k, _ in items]
    weights = [w for _, w in items]
    assert abs(weighted_phase_sum(phases, weights)) <= sum(weights) + 1e-12


def test_roots_table_is_read_only():
    table = roots_of_unity(6)
    assert len(table) == 6
    with pytest.raises(ValueError):
        table[0] = 2


def test_distance_to_nearest_root():
    assert distance_to_nearest_root(1j, 4) == pytest.approx(0.0)
    assert distance_to_nearest_root(-1, 3) == pytest.approx(abs(-1 - cmath.exp(2j * math.pi / 3)))
