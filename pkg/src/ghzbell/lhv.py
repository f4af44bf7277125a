"""Classical (local-hidden-variable) bounds by deterministic-strategy search.

Two independent routes: an exhaustive scan over all 2^(2n) sign assignments,
which evaluates the fully expanded correlator, and a symmetry-reduced
enumeration over at most n(n+1) equivalence classes that evaluates
binomial-count formulas directly.  Agreement of the two is a core test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

import numpy as np

from . import _kernels
from .polynomial import BellPolynomial, build_bell
from .scenario import check_party_count

# 2^(2n) strategies; n=10 is ~10^6 strategies over ~2*10^4 terms.
EXHAUSTIVE_MAX_N = 10


class SizeLimitError(ValueError):
    """Exhaustive enumeration requested beyond the strategy-count cap."""


@dataclass(frozen=True)
class DeterministicStrategy:
    """A +/-1 assignment to both settings of every party."""

    alice: tuple[int, int]
    bobs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for v in (*self.alice, *(x for pair in self.bobs for x in pair)):
            if v not in (1, -1):
                raise ValueError(f"strategy entries must be +/-1, got {v!r}")

    @property
    def n(self) -> int:
        return len(self.bobs) + 1

    def assignment(self) -> dict[tuple[int, int], int]:
        """Mapping (party, setting) -> +/-1 as consumed by the polynomial module."""
        values = {(1, 0): self.alice[0], (1, 1): self.alice[1]}
        for j, (b0, b1) in enumerate(self.bobs, start=2):
            values[(j, 0)] = b0
            values[(j, 1)] = b1
        return values


@dataclass(frozen=True)
class BoundsReport:
    n: int
    max_value: Fraction
    min_value: Fraction
    argmax: DeterministicStrategy
    argmin: DeterministicStrategy
    strategies_checked: int

    def __post_init__(self):
        if self.min_value > self.max_value:
            raise ValueError("min_value exceeds max_value")


def _observable_bit(party: int, setting: int) -> int:
    """Bit position of an observable in the 2n-bit strategy index."""
    return 2 * (party - 1) + setting


def strategy_from_index(index: int, n: int) -> DeterministicStrategy:
    """Decode a strategy index; bit set means the observable is assigned -1."""
    sign = lambda bit: 1 - 2 * ((index >> bit) & 1)
    alice = (sign(_observable_bit(1, 0)), sign(_observable_bit(1, 1)))
    bobs = tuple(
        (sign(_observable_bit(j, 0)), sign(_observable_bit(j, 1))) for j in range(2, n + 1)
    )
    return DeterministicStrategy(alice, bobs)


def compile_terms(poly: BellPolynomial) -> tuple[np.ndarray, np.ndarray, int]:
    """Encode a polynomial as (bitmasks, scaled integer coefficients, scale).

    The scale is the LCM of the coefficient denominators (a power of two for
    the correlators built here), so kernel arithmetic is exact in int64.
    """
    scale = 1
    for coeff in poly.terms.values():
        scale = scale * coeff.denominator // gcd(scale, coeff.denominator)
    masks, coeffs = [], []
    for mono, coeff in poly.items():
        mask = 0
        for party, setting in mono:
            mask |= 1 << _observable_bit(party, setting)
        scaled = coeff * scale
        assert scaled.denominator == 1
        masks.append(mask)
        coeffs.append(int(scaled))
    return np.array(masks, dtype=np.int64), np.array(coeffs, dtype=np.int64), int(scale)


def classical_bounds_exhaustive(n: int, engine: str | None = None) -> BoundsReport:
    """Extrema of the n-party correlator over all 2^(2n) strategies.

    Strategies are scanned in plain index order with no early exit, so ties
    resolve to the lowest strategy index on both paths.
    """
    check_party_count(n, maximum=EXHAUSTIVE_MAX_N)
    if n > EXHAUSTIVE_MAX_N:
        raise SizeLimitError(f"exhaustive scan capped at n={EXHAUSTIVE_MAX_N}")
    poly = build_bell(n)
    masks, coeffs, scale = compile_terms(poly)
    values = _kernels.strategy_values(masks, coeffs, 2 * n, engine=engine)
    imax = int(np.argmax(values))
    imin = int(np.argmin(values))
    return BoundsReport(
        n=n,
        max_value=Fraction(int(values[imax]), scale),
        min_value=Fraction(int(values[imin]), scale),
        argmax=strategy_from_index(imax, n),
        argmin=strategy_from_index(imin, n),
        strategies_checked=values.size,
    )


def _reduced_value(n: int, a0: int, q_plus: int, q_minus: int) -> int:
    """Correlator value for a class with q_plus/q_minus Bobs at half-difference +/-1.

    With at least one nonzero half-difference the full-sum piece vanishes, so
    the value is the alternating subset-count sum; signed subset counts follow
    from splitting each subset between the +1 and -1 Bobs.
    """
    q = q_plus + q_minus
    total = 0
    if n % 2 == 0 and q == n - 1:
        total -= a0 * (-1) ** q_minus
    for k in range(1, (n - 1) // 2 + 1):
        l_odd = 2 * k - 1
        t_odd = sum((-1) ** r * comb(q_plus, l_odd - r) * comb(q_minus, r) for r in range(l_odd + 1))
        l_even = 2 * k
        t_even = sum((-1) ** r * comb(q_plus, l_even - r) * comb(q_minus, r) for r in range(l_even + 1))
        total -= a0 * t_odd + t_even
    return total


def _representative(n: int, a0: int, a1: int, q_plus: int, q_minus: int) -> DeterministicStrategy:
    """Lowest-index strategy of a Bob-permutation class."""
    bobs = ((1, -1),) * q_plus + ((-1, 1),) * q_minus
    bobs += ((1, 1),) * (n - 1 - q_plus - q_minus)
    return DeterministicStrategy((a0, a1), bobs)


def classical_bounds_reduced(n: int) -> BoundsReport:
    """Extrema via Bob-permutation classes; n(n+1) classes, any n >= 2.

    Classes with all half-differences zero realize +/-1 through the full-sum
    piece alone; every other class is scored by the binomial formulas, an
    independent route from the expanded-polynomial scan.
    """
    check_party_count(n, maximum=1000)
    best = worst = None  # (value:int, class rank, strategy)
    checked = 0
    for a0 in (1, -1):
        for q_plus in range(n):
            for q_minus in range(n - q_plus):
                checked += 1
                if q_plus == 0 and q_minus == 0:
                    candidates = [(a1, _representative(n, a0, a1, 0, 0)) for a1 in (1, -1)]
                else:
                    value = _reduced_value(n, a0, q_plus, q_minus)
                    candidates = [(value, _representative(n, a0, 1, q_plus, q_minus))]
                for value, strat in candidates:
                    if best is None or value > best[0]:
                        best = (value, strat)
                    if worst is None or value < worst[0]:
                        worst = (value, strat)
    return BoundsReport(
        n=n,
        max_value=Fraction(best[0]),
        min_value=Fraction(worst[0]),
        argmax=best[1],
        argmin=worst[1],
        strategies_checked=checked,
    )
