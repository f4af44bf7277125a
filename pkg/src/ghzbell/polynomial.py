"""Multilinear Bell correlators over abstract +/-1 observables.

A monomial is a product of observables of *distinct* parties, encoded as a
party-sorted tuple of ``(party, setting)`` pairs with setting 0 or 1; the
empty tuple is the identity.  Polynomials keep exact dyadic-rational
coefficients so that symbolic identities (party reduction, the Parity-CHSH
substitution) are testable as exact equality.

The half-sum and half-difference combinations of a Bob's two observables are
never stored; they are expanded into plain settings at build time.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping

from .scenario import ALICE, ScenarioError, bob_labels, check_party_count, enumerate_subsets

Monomial = tuple[tuple[int, int], ...]

RationalLike = Fraction | int


class PolynomialError(ValueError):
    """Malformed monomial, unknown party, or missing assignment."""


def _validated_monomial(mono: Monomial, n: int) -> Monomial:
    mono = tuple((int(p), int(s)) for p, s in mono)
    parties = [p for p, _ in mono]
    if parties != sorted(set(parties)):
        raise PolynomialError(f"monomial parties must be strictly increasing, got {mono}")
    for p, s in mono:
        if not 1 <= p <= n:
            raise PolynomialError(f"party {p} outside [1, {n}]")
        if s not in (0, 1):
            raise PolynomialError(f"setting must be 0 or 1, got {s}")
    return mono


class BellPolynomial:
    """Canonical multilinear polynomial over the observables of n parties.

    Terms are stored as a mapping from party-sorted monomials to nonzero
    ``Fraction`` coefficients; two polynomials are equal iff they have the
    same party count and identical term mappings.  Instances are treated as
    immutable after construction.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[Monomial, RationalLike]):
        check_party_count(n)
        self.n = n
        canonical: dict[Monomial, Fraction] = {}
        for mono, coeff in terms.items():
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            canonical[_validated_monomial(mono, n)] = coeff
        self._terms = canonical

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return self._terms

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        """Terms in canonical order (identity first, then lexicographic)."""
        return iter(sorted(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BellPolynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"BellPolynomial(n={self.n}, terms={len(self._terms)})"


def _add(terms: dict[Monomial, Fraction], mono: Monomial, coeff: Fraction) -> None:
    new = terms.get(mono, Fraction(0)) + coeff
    if new == 0:
        terms.pop(mono, None)
    else:
        terms[mono] = new


def _signed_expansions(subset: tuple[int, ...], signed: bool) -> Iterator[tuple[Monomial, Fraction]]:
    """Expand a product of (B0 +/- B1)/2 over `subset` into plain settings.

    `signed=True` expands the half-difference (each setting-1 factor flips the
    sign), `signed=False` the half-sum.  Yields (bob-part monomial, coeff).
    """
    l = len(subset)
    weight = Fraction(1, 2**l)
    for choice in product((0, 1), repeat=l):
        coeff = weight
        if signed and sum(choice) % 2 == 1:
            coeff = -coeff
        yield tuple(zip(subset, choice)), coeff


def build_bell(n: int) -> BellPolynomial:
    """The n-party Bell correlator, fully expanded into plain settings.

    Three pieces: Alice's setting-1 observable with the half-sum combination
    of every Bob; for even n the full-length half-difference product with
    Alice's setting-0 observable; and, for every subset size, the
    half-difference products over all ordered Bob subsets, odd sizes paired
    with Alice's setting-0 observable.  For n=2 this is CHSH scaled by 1/2.
    """
    check_party_count(n)
    bobs = bob_labels(n)
    terms: dict[Monomial, Fraction] = {}

    for bob_part, coeff in _signed_expansions(bobs, signed=False):
        _add(terms, ((ALICE, 1),) + bob_part, coeff)

    if n % 2 == 0:
        for bob_part, coeff in _signed_expansions(bobs, signed=True):
            _add(terms, ((ALICE, 0),) + bob_part, -coeff)

    for k in range(1, (n - 1) // 2 + 1):
        for l in (2 * k - 1, 2 * k):
            for subset in enumerate_subsets(n, l):
                for bob_part, coeff in _signed_expansions(subset, signed=True):
                    mono = ((ALICE, 0),) + bob_part if l % 2 == 1 else bob_part
                    _add(terms, mono, -coeff)

    return BellPolynomial(n, terms)


def reduce_party(poly: BellPolynomial, j: int) -> BellPolynomial:
    """Substitute both observables of Bob `j` by the identity and relabel.

    Remaining Bobs above `j` shift down by one, preserving order.  Applied to
    the n-party correlator this yields the (n-1)-party one exactly.
    """
    if not 2 <= j <= poly.n:
        raise PolynomialError(f"party {j} is not a Bob of an n={poly.n} polynomial")
    if poly.n == 2:
        raise PolynomialError("cannot reduce below two parties")
    terms: dict[Monomial, Fraction] = {}
    for mono, coeff in poly.terms.items():
        reduced = tuple((p - 1 if p > j else p, s) for p, s in mono if p != j)
        _add(terms, reduced, coeff)
    return BellPolynomial(poly.n - 1, terms)


def permute_bobs(poly: BellPolynomial, perm: Mapping[int, int]) -> BellPolynomial:
    """Relabel Bobs by a permutation of {2,...,n} (Alice is fixed)."""
    labels = set(bob_labels(poly.n))
    if set(perm) != labels or set(perm.values()) != labels:
        raise PolynomialError(f"perm must be a bijection on {sorted(labels)}")
    terms: dict[Monomial, Fraction] = {}
    for mono, coeff in poly.terms.items():
        relabeled = tuple(sorted((perm.get(p, p), s) for p, s in mono))
        _add(terms, relabeled, coeff)
    return BellPolynomial(poly.n, terms)


def merge_inputs(poly: BellPolynomial, parties: tuple[int, ...] | list[int]) -> BellPolynomial:
    """Replace setting 1 by setting 0 for the given Bobs (B1 := B0)."""
    chosen = set(parties)
    unknown = chosen - set(bob_labels(poly.n))
    if unknown:
        raise PolynomialError(f"not Bob labels of an n={poly.n} polynomial: {sorted(unknown)}")
    terms: dict[Monomial, Fraction] = {}
    for mono, coeff in poly.terms.items():
        merged = tuple((p, 0 if p in chosen else s) for p, s in mono)
        _add(terms, merged, coeff)
    return BellPolynomial(poly.n, terms)


def parity_chsh(n: int) -> BellPolynomial:
    """The Parity-CHSH correlator for n >= 3 parties.

    Alice's setting-1 observable with the half-sum of Bob 2's settings times
    the single observable (setting 0) of every further Bob, minus Alice's
    setting-0 observable with the half-difference of Bob 2's settings.
    Identical to `build_bell(n)` after merging the settings of Bobs >= 3.
    """
    check_party_count(n)
    if n < 3:
        raise ScenarioError(f"Parity-CHSH needs at least 3 parties, got {n}")
    half = Fraction(1, 2)
    tail = tuple((j, 0) for j in range(3, n + 1))
    terms: dict[Monomial, Fraction] = {}
    _add(terms, ((ALICE, 1), (2, 0)) + tail, half)
    _add(terms, ((ALICE, 1), (2, 1)) + tail, half)
    _add(terms, ((ALICE, 0), (2, 0)), -half)
    _add(terms, ((ALICE, 0), (2, 1)), half)
    return BellPolynomial(n, terms)


def evaluate_classical(poly: BellPolynomial, strategy) -> Fraction:
    """Exact value of `poly` under a deterministic +/-1 assignment.

    `strategy` is either a mapping ``(party, setting) -> +/-1`` or an object
    with an ``assignment()`` method returning one (e.g. a deterministic
    strategy from the LHV module).
    """
    values = strategy.assignment() if hasattr(strategy, "assignment") else strategy
    total = Fraction(0)
    for mono, coeff in poly.terms.items():
        prod_val = 1
        for key in mono:
            try:
                v = values[key]
            except KeyError:
                raise PolynomialError(f"strategy misses an assignment for {key}") from None
            if v not in (1, -1):
                raise PolynomialError(f"assignment for {key} must be +/-1, got {v!r}")
            prod_val *= v
        total += coeff * prod_val
    return total


def to_json_dict(poly: BellPolynomial) -> dict:
    """JSON document {n, terms: [{parties, observables, num, den}]}."""
    rows = []
    for mono, coeff in poly.items():
        rows.append(
            {
                "parties": [p for p, _ in mono],
                "observables": [s for _, s in mono],
                "num": coeff.numerator,
                "den": coeff.denominator,
            }
        )
    return {"n": poly.n, "terms": rows}


def from_json_dict(doc: Mapping) -> BellPolynomial:
    """Inverse of `to_json_dict`."""
    terms: dict[Monomial, Fraction] = {}
    for row in doc["terms"]:
        mono = tuple(zip(row["parties"], row["observables"]))
        _add(terms, mono, Fraction(row["num"], row["den"]))
    return BellPolynomial(int(doc["n"]), terms)
