from fractions import Fraction

import numpy as np
import pytest

from ghzbell import _kernels
from ghzbell.lhv import (
    EXHAUSTIVE_MAX_N,
    BoundsReport,
    DeterministicStrategy,
    SizeLimitError,
    classical_bounds_exhaustive,
    classical_bounds_reduced,
    compile_terms,
    strategy_from_index,
)
from ghzbell.polynomial import build_bell, evaluate_classical
from ghzbell.scenario import ScenarioError


@pytest.mark.parametrize("n,expected_min", [(2, -1), (3, -3), (7, -63)])
def test_exhaustive_bounds(n, expected_min):
    report = classical_bounds_exhaustive(n)
    assert report.max_value == 1
    assert report.min_value == expected_min
    assert report.strategies_checked == 2 ** (2 * n)


def test_reduced_three_parties():
    report = classical_bounds_reduced(3)
    assert report.max_value == 1
    assert report.min_value == -3
    assert report.strategies_checked <= 12


def test_reduced_twenty_parties():
    report = classical_bounds_reduced(20)
    assert report.max_value == 1
    assert report.min_value == -(2**19 - 1)
    assert report.strategies_checked == 20 * 21


def test_reduced_matches_exhaustive_for_two_parties():
    exhaustive = classical_bounds_exhaustive(2)
    reduced = classical_bounds_reduced(2)
    assert (exhaustive.max_value, exhaustive.min_value) == (reduced.max_value, reduced.min_value)


@pytest.mark.parametrize("n", range(2, 9))
def test_two_routes_agree(n):
    exhaustive = classical_bounds_exhaustive(n)
    reduced = classical_bounds_reduced(n)
    assert exhaustive.max_value == reduced.max_value == 1
    assert exhaustive.min_value == reduced.min_value == -(2 ** (n - 1) - 1)


@pytest.mark.parametrize("n", range(2, 7))
def test_witnesses_reproduce_bounds(n):
    poly = build_bell(n)
    for report in (classical_bounds_exhaustive(n), classical_bounds_reduced(n)):
        assert evaluate_classical(poly, report.argmax) == report.max_value
        assert evaluate_classical(poly, report.argmin) == report.min_value


@pytest.mark.parametrize("n", range(2, 7))
def test_argmax_has_vanishing_half_differences(n):
    report = classical_bounds_exhaustive(n)
    assert all(b0 == b1 for b0, b1 in report.argmax.bobs)


@pytest.mark.parametrize("n", range(3, 7))
def test_argmin_structure_up_to_global_flip(n):
    # For n >= 3 the minimum is below -1, so the half-differences all carry one
    # common sign s and Alice's first observable equals s.  (At n = 2 the
    # minimum -1 ties with the full-sum route and index order picks that one.)
    report = classical_bounds_exhaustive(n)
    diffs = {(b0 - b1) // 2 for b0, b1 in report.argmin.bobs}
    assert len(diffs) == 1
    sign = diffs.pop()
    assert sign in (1, -1)
    assert report.argmin.alice[0] == sign


def test_exhaustive_cap():
    with pytest.raises((SizeLimitError, ScenarioError)):
        classical_bounds_exhaustive(EXHAUSTIVE_MAX_N + 1)


def test_strategy_validation():
    with pytest.raises(ValueError):
        DeterministicStrategy((1, 0), ((1, 1),))
    with pytest.raises(ValueError):
        BoundsReport(2, Fraction(0), Fraction(1), None, None, 1)


def test_strategy_round_trip():
    strat = strategy_from_index(0b100110, 3)
    values = strat.assignment()
    assert values[(1, 0)] == 1 - 2 * (0b100110 & 1)
    assert set(values) == {(1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (3, 1)}


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_kernel_engines_agree(n):
    masks, coeffs, _ = compile_terms(build_bell(n))
    jitted = _kernels.strategy_values(masks, coeffs, 2 * n, engine="numba")
    plain = _kernels.strategy_values(masks, coeffs, 2 * n, engine="numpy")
    assert np.array_equal(jitted, plain)


@pytest.mark.parametrize("n", [3, 4])
def test_kernel_values_match_exact_evaluation(n):
    poly = build_bell(n)
    masks, coeffs, scale = compile_terms(poly)
    values = _kernels.strategy_values(masks, coeffs, 2 * n, engine="numpy")
    rng = np.random.default_rng(7)
    for index in rng.integers(0, 2 ** (2 * n), size=25):
        strat = strategy_from_index(int(index), n)
        assert Fraction(int(values[index]), scale) == evaluate_classical(poly, strat)


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("GHZBELL_NO_NUMBA", "1")
    assert _kernels.active_engine() == "numpy"
    monkeypatch.setenv("GHZBELL_NO_NUMBA", "")
    assert _kernels.active_engine() == ("numba" if _kernels.HAS_NUMBA else "numpy")


def test_engine_flag_does_not_change_results(monkeypatch):
    baseline = classical_bounds_exhaustive(4)
    monkeypatch.setenv("GHZBELL_NO_NUMBA", "1")
    fallback = classical_bounds_exhaustive(4)
    assert baseline == fallback
