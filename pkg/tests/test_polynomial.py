from fractions import Fraction
from itertools import product

import pytest

from ghzbell.polynomial import (
    BellPolynomial,
    PolynomialError,
    build_bell,
    evaluate_classical,
    from_json_dict,
    merge_inputs,
    parity_chsh,
    permute_bobs,
    reduce_party,
    to_json_dict,
)

F = Fraction


def assignment(a0, a1, bobs):
    values = {(1, 0): a0, (1, 1): a1}
    for j, (b0, b1) in enumerate(bobs, start=2):
        values[(j, 0)] = b0
        values[(j, 1)] = b1
    return values


def expand_bob_combination(prefix, bobs, signs, coeff):
    """Test-local expansion of products of (B0 +/- B1)/2, written independently."""
    terms = {}
    for choice in product((0, 1), repeat=len(bobs)):
        sign = 1
        for bit in choice:
            if bit == 1 and signs == "-":
                sign = -sign
        mono = tuple(prefix) + tuple((b, c) for b, c in zip(bobs, choice))
        terms[mono] = terms.get(mono, F(0)) + coeff * sign * F(1, 2 ** len(bobs))
    return terms


def add_terms(target, extra):
    for mono, coeff in extra.items():
        target[mono] = target.get(mono, F(0)) + coeff
    return target


def test_three_party_correlator_matches_hand_expansion():
    # <A1 B+ B+> - <A0 (B-^2 + B-^3)> - <B-^2 B-^3>, expanded by hand
    expected = {}
    add_terms(expected, expand_bob_combination([(1, 1)], (2, 3), "+", F(1)))
    add_terms(expected, expand_bob_combination([(1, 0)], (2,), "-", F(-1)))
    add_terms(expected, expand_bob_combination([(1, 0)], (3,), "-", F(-1)))
    add_terms(expected, expand_bob_combination([], (2, 3), "-", F(-1)))
    assert build_bell(3) == BellPolynomial(3, expected)


def test_two_party_correlator_is_half_chsh():
    poly = build_bell(2)
    assert poly.terms == {
        ((1, 0), (2, 0)): F(-1, 2),
        ((1, 0), (2, 1)): F(1, 2),
        ((1, 1), (2, 0)): F(1, 2),
        ((1, 1), (2, 1)): F(1, 2),
    }


def test_four_party_full_difference_term_present():
    poly = build_bell(4)
    # coefficient of A0 B0 B0 B0 from the full-length half-difference product
    assert poly.coefficient(((1, 0), (2, 0), (3, 0), (4, 0))) == F(-1, 8)
    # three setting-1 factors flip the sign three times
    assert poly.coefficient(((1, 0), (2, 1), (3, 1), (4, 1))) == F(1, 8)


@pytest.mark.parametrize("n", range(2, 9))
def test_term_count_and_dyadic_denominators(n):
    poly = build_bell(n)
    assert 0 < len(poly) < 4**n
    for coeff in poly.terms.values():
        den = coeff.denominator
        assert den & (den - 1) == 0, den


def test_evaluate_all_plus_one_gives_one():
    poly = build_bell(3)
    values = assignment(1, 1, [(1, 1), (1, 1)])
    assert evaluate_classical(poly, values) == 1


def test_evaluate_all_half_differences_plus_one():
    # B0 = +1, B1 = -1 for every Bob and A0 = +1
    assert evaluate_classical(build_bell(3), assignment(1, 1, [(1, -1)] * 2)) == -3
    assert evaluate_classical(build_bell(4), assignment(1, 1, [(1, -1)] * 3)) == -7


def test_evaluate_missing_assignment_raises():
    with pytest.raises(PolynomialError):
        evaluate_classical(build_bell(3), {(1, 0): 1, (1, 1): 1})


def test_evaluate_rejects_nonsign_values():
    values = assignment(1, 1, [(1, 1), (1, 1)])
    values[(2, 0)] = 2
    with pytest.raises(PolynomialError):
        evaluate_classical(build_bell(3), values)


@pytest.mark.parametrize("n", range(3, 9))
def test_reduce_last_party(n):
    assert reduce_party(build_bell(n), n) == build_bell(n - 1)


def test_iterated_reduction_reaches_chsh():
    poly = reduce_party(build_bell(3), 3)
    assert reduce_party(build_bell(4), 4) == build_bell(3)
    assert poly == build_bell(2)


def test_reduce_inner_party_relabels():
    assert reduce_party(build_bell(3), 2) == build_bell(2)


def test_reduce_unknown_party_raises():
    with pytest.raises(PolynomialError):
        reduce_party(build_bell(3), 4)
    with pytest.raises(PolynomialError):
        reduce_party(build_bell(3), 1)


def test_parity_chsh_hand_expansion():
    expected = {
        ((1, 1), (2, 0), (3, 0)): F(1, 2),
        ((1, 1), (2, 1), (3, 0)): F(1, 2),
        ((1, 0), (2, 0)): F(-1, 2),
        ((1, 0), (2, 1)): F(1, 2),
    }
    assert parity_chsh(3) == BellPolynomial(3, expected)


@pytest.mark.parametrize("n", range(3, 7))
def test_parity_chsh_is_merged_correlator(n):
    assert merge_inputs(build_bell(n), list(range(3, n + 1))) == parity_chsh(n)


def test_parity_reduces_to_half_chsh():
    assert reduce_party(parity_chsh(3), 3) == build_bell(2)


def test_parity_needs_three_parties():
    with pytest.raises(Exception):
        parity_chsh(2)


@pytest.mark.parametrize("n", range(3, 7))
def test_bob_permutation_invariance(n):
    bobs = list(range(2, n + 1))
    rotated = {j: bobs[(i + 1) % len(bobs)] for i, j in enumerate(bobs)}
    swapped = dict(zip(bobs, bobs))
    swapped[2], swapped[n] = n, 2
    assert permute_bobs(build_bell(n), rotated) == build_bell(n)
    assert permute_bobs(build_bell(n), swapped) == build_bell(n)


def test_canonical_form_idempotent():
    poly = build_bell(4)
    assert BellPolynomial(4, poly.terms) == poly


def test_zero_coefficients_dropped():
    poly = BellPolynomial(2, {((1, 0),): F(0), ((1, 1),): F(1, 2)})
    assert len(poly) == 1


def test_monomial_validation():
    with pytest.raises(PolynomialError):
        BellPolynomial(2, {((2, 0), (1, 0)): F(1)})  # parties out of order
    with pytest.raises(PolynomialError):
        BellPolynomial(2, {((1, 2),): F(1)})  # bad setting
    with pytest.raises(PolynomialError):
        BellPolynomial(2, {((3, 0),): F(1)})  # party beyond n


def test_json_round_trip():
    poly = build_bell(4)
    doc = to_json_dict(poly)
    assert doc["n"] == 4
    assert all(set(row) == {"parties", "observables", "num", "den"} for row in doc["terms"])
    assert from_json_dict(doc) == poly
