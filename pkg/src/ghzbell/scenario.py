"""Party indexing and the ordered Bob-subset sets of the n-party scenario.

Party 1 is Alice; parties 2..n are the Bobs.  All public surfaces use these
1-based labels.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

ALICE = 1

# Dense 2^n matrices downstream make larger n impractical on a desk machine.
MAX_PARTIES = 12


class ScenarioError(ValueError):
    """Invalid party count or subset size."""


def check_party_count(n: int, maximum: int = MAX_PARTIES) -> None:
    """Reject party counts outside [2, maximum]."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise ScenarioError(f"party count must be an integer, got {n!r}")
    if n < 2:
        raise ScenarioError(f"need at least 2 parties, got {n}")
    if n > maximum:
        raise ScenarioError(f"party count {n} exceeds the cap of {maximum}")


def bob_labels(n: int) -> tuple[int, ...]:
    """The Bob labels 2..n."""
    check_party_count(n)
    return tuple(range(2, n + 1))


def subset_count(n: int, l: int) -> int:
    """Number of ordered l-subsets of the n-1 Bobs, C(n-1, l)."""
    return comb(n - 1, l)


def enumerate_subsets(n: int, l: int) -> list[tuple[int, ...]]:
    """All strictly increasing l-tuples of Bob labels from {2,...,n}.

    Returned in lexicographic order; there are exactly C(n-1, l) of them,
    e.g. ``enumerate_subsets(4, 2) == [(2, 3), (2, 4), (3, 4)]``.
    """
    check_party_count(n)
    if not isinstance(l, int) or isinstance(l, bool) or not 1 <= l <= n - 1:
        raise ScenarioError(f"subset size must lie in [1, {n - 1}], got {l!r}")
    return list(combinations(bob_labels(n), l))
