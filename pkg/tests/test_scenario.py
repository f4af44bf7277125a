from math import comb

import pytest

from ghzbell.scenario import ScenarioError, bob_labels, enumerate_subsets, subset_count


def brute_force_subsets(n, l):
    """Independent oracle: filter all integer tuples for sorted l-tuples of Bobs."""
    found = []

    def extend(prefix, start):
        if len(prefix) == l:
            found.append(tuple(prefix))
            return
        for nxt in range(start, n + 1):
            extend(prefix + [nxt], nxt + 1)

    extend([], 2)
    return found


def test_paper_example_pairs():
    assert enumerate_subsets(4, 2) == [(2, 3), (2, 4), (3, 4)]


def test_singletons():
    assert enumerate_subsets(3, 1) == [(2,), (3,)]


def test_five_choose_three_against_oracle():
    subsets = enumerate_subsets(5, 3)
    assert subsets == brute_force_subsets(5, 3)
    assert len(subsets) == comb(4, 3)
    assert subsets[0] == (2, 3, 4)
    assert subsets[-1] == (3, 4, 5)


@pytest.mark.parametrize("n", range(2, 13))
def test_cardinality_and_ordering(n):
    for l in range(1, n):
        subsets = enumerate_subsets(n, l)
        assert len(subsets) == comb(n - 1, l) == subset_count(n, l)
        assert len(set(subsets)) == len(subsets)
        for s in subsets:
            assert list(s) == sorted(s)
            assert all(2 <= j <= n for j in s)


def test_bob_labels():
    assert bob_labels(4) == (2, 3, 4)


@pytest.mark.parametrize("n,l", [(4, 0), (4, 4), (3, -1), (3, 5)])
def test_invalid_size_raises(n, l):
    with pytest.raises(ScenarioError):
        enumerate_subsets(n, l)


def test_invalid_party_count_raises():
    with pytest.raises(ScenarioError):
        enumerate_subsets(1, 1)
    with pytest.raises(ScenarioError):
        bob_labels(13)
