"""Moment-matrix relaxations of the n-party, 2-input, +/-1-outcome scenario.

Words are products of letters ``(party, setting)``; letters of distinct
parties commute and are sorted by party, letters within a party do not
commute but square to the identity.  The moment matrix is real symmetric:
a word and its reversal share one moment variable, which is sound for
Hermitian involution generators and halves the solver load.

Levels: 1 (singles), "1+ab" (singles plus cross-party pairs), 2 (all pairs),
"2+abb" (level 2 plus distinct-party triples).  The relaxation value is an
upper bound on the quantum value, non-increasing as the basis grows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import sdp
from .polynomial import BellPolynomial, build_bell
from .scenario import check_party_count

Letter = tuple[int, int]
Word = tuple[Letter, ...]

LEVELS = ("1", "1+ab", "2", "2+abb")


class NpaError(ValueError):
    """Unsupported level or polynomial not representable at the level."""


class LevelTooLowError(NpaError):
    """The hierarchy level cannot express a required moment."""


def normalize_level(level) -> str:
    key = str(level).strip().lower().replace(" ", "")
    if key not in LEVELS:
        raise NpaError(f"unsupported hierarchy level {level!r}; choose from {LEVELS}")
    return key


def default_level(n: int) -> str:
    """Level 2 up to three parties, cross-party pairs only beyond."""
    return "2" if n <= 3 else "1+ab"


def canonicalize_word(word: Iterable[Letter]) -> Word:
    """Sort letters by party (stable) and cancel equal neighbours per party."""
    blocks: dict[int, list[Letter]] = {}
    for letter in word:
        party, setting = int(letter[0]), int(letter[1])
        stack = blocks.setdefault(party, [])
        if stack and stack[-1] == (party, setting):
            stack.pop()
        else:
            stack.append((party, setting))
    out: list[Letter] = []
    for party in sorted(blocks):
        out.extend(blocks[party])
    return tuple(out)


def word_adjoint(word: Word) -> Word:
    """Adjoint of a product of Hermitian letters: the reversed word."""
    return canonicalize_word(reversed(word))


def word_class(word: Iterable[Letter]) -> Word:
    """Representative of {w, w^dagger}; moments of both coincide when real."""
    w = canonicalize_word(word)
    return min(w, word_adjoint(w))


def _letters(n: int) -> list[Letter]:
    return [(party, setting) for party in range(1, n + 1) for setting in (0, 1)]


def build_basis(n: int, level) -> list[Word]:
    """Monomial words indexing the moment matrix at the given level."""
    check_party_count(n)
    level = normalize_level(level)
    letters = _letters(n)
    basis: list[Word] = [()]
    basis += [(letter,) for letter in letters]
    if level == "1":
        return basis
    seen = set(basis)
    for first in letters:
        for second in letters:
            if level == "1+ab" and first[0] == second[0]:
                continue
            word = canonicalize_word((first, second))
            if len(word) == 2 and word not in seen:
                seen.add(word)
                basis.append(word)
    if level == "2+abb":
        for first in letters:
            for second in letters:
                for third in letters:
                    if len({first[0], second[0], third[0]}) != 3:
                        continue
                    word = canonicalize_word((first, second, third))
                    if word not in seen:
                        seen.add(word)
                        basis.append(word)
    return basis


@dataclass
class MomentProblem:
    """Symbolic moment matrix plus objective/constraint vectors over moment ids."""

    n: int
    level: str
    basis: list[Word]
    entry_ids: np.ndarray  # (d, d) moment id per matrix entry
    class_words: list[Word]  # representative word per moment id; id 0 is the identity
    rep_slots: list[tuple[int, int]]  # first matrix slot per moment id
    objective: dict[int, float]
    constraint: dict[int, float] | None = None
    constraint_lower: float | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def num_moments(self) -> int:
        return len(self.class_words)


def _index_moments(basis: list[Word]) -> tuple[np.ndarray, list[Word], list[tuple[int, int]]]:
    d = len(basis)
    entry_ids = np.zeros((d, d), dtype=np.int64)
    ids: dict[Word, int] = {}
    class_words: list[Word] = []
    rep_slots: list[tuple[int, int]] = []
    for i in range(d):
        for j in range(i, d):
            key = word_class(word_adjoint(basis[i]) + basis[j])
            moment = ids.get(key)
            if moment is None:
                moment = len(class_words)
                ids[key] = moment
                class_words.append(key)
                rep_slots.append((i, j))
            entry_ids[i, j] = moment
            entry_ids[j, i] = moment
    return entry_ids, class_words, rep_slots


def moment_vector(poly: BellPolynomial, class_index: dict[Word, int], level: str) -> dict[int, float]:
    """Map a correlator to a sparse vector over moment ids."""
    vec: dict[int, float] = {}
    for mono, coeff in poly.items():
        key = word_class(mono)
        moment = class_index.get(key)
        if moment is None:
            raise LevelTooLowError(
                f"moment {key} is absent from the level-{level} matrix; raise the level"
            )
        vec[moment] = vec.get(moment, 0.0) + float(coeff)
    return vec


def build_moment_problem(
    n: int,
    level,
    objective: BellPolynomial,
    constraint: BellPolynomial | None = None,
    constraint_lower: float | None = None,
) -> MomentProblem:
    level = normalize_level(level)
    basis = build_basis(n, level)
    entry_ids, class_words, rep_slots = _index_moments(basis)
    class_index = {w: k for k, w in enumerate(class_words)}
    problem = MomentProblem(
        n=n,
        level=level,
        basis=basis,
        entry_ids=entry_ids,
        class_words=class_words,
        rep_slots=rep_slots,
        objective=moment_vector(objective, class_index, level),
    )
    if constraint is not None:
        problem.constraint = moment_vector(constraint, class_index, level)
        problem.constraint_lower = float(constraint_lower)
    return problem


def _sym_slot(dim: int, slot: tuple[int, int], weight: float = 1.0) -> np.ndarray:
    mat = np.zeros((dim, dim))
    i, j = slot
    if i == j:
        mat[i, i] = weight
    else:
        mat[i, j] = weight / 2.0
        mat[j, i] = weight / 2.0
    return mat


def _vector_matrix(problem: MomentProblem, vec: dict[int, float]) -> np.ndarray:
    mat = np.zeros((problem.dim, problem.dim))
    for moment, weight in vec.items():
        mat += _sym_slot(problem.dim, problem.rep_slots[moment], weight)
    return mat


def to_sdp(problem: MomentProblem) -> sdp.SdpProblem:
    """Lower the moment problem to one PSD matrix variable.

    The moment matrix itself is the variable; entries sharing a moment id are
    tied to the id's first slot by trace equalities and the identity moment is
    pinned to 1.
    """
    d = problem.dim
    eqs: list[tuple[np.ndarray, float]] = [(_sym_slot(d, problem.rep_slots[0]), 1.0)]
    for moment, rep in enumerate(problem.rep_slots):
        rep_mat = _sym_slot(d, rep)
        for i in range(d):
            for j in range(i, d):
                if problem.entry_ids[i, j] == moment and (i, j) != rep:
                    eqs.append((_sym_slot(d, (i, j)) - rep_mat, 0.0))
    ineqs: list[tuple[np.ndarray, float]] = []
    if problem.constraint is not None:
        ineqs.append((_vector_matrix(problem, problem.constraint), problem.constraint_lower))
    return sdp.SdpProblem(
        dim=d,
        objective=_vector_matrix(problem, problem.objective),
        eq_constraints=eqs,
        ineq_constraints=ineqs,
    )


def _solve_moment_problem(problem: MomentProblem, config: sdp.SolverConfig | None) -> sdp.SdpSolution:
    solution = sdp.solve(to_sdp(problem), config)
    if solution.status == "max-iterations":
        raise sdp.SdpError(
            f"moment SDP did not reach tolerance; residuals {solution.residuals}"
        )
    return solution


def tsirelson_bound(
    n: int,
    level=None,
    poly: BellPolynomial | None = None,
    config: sdp.SolverConfig | None = None,
) -> float:
    """Upper bound on the maximal quantum value of the correlator."""
    check_party_count(n)
    level = normalize_level(level if level is not None else default_level(n))
    poly = poly if poly is not None else build_bell(n)
    problem = build_moment_problem(n, level, objective=poly)
    return _solve_moment_problem(problem, config).value


def _alice_marginal(n: int) -> BellPolynomial:
    from fractions import Fraction

    return BellPolynomial(n, {((1, 0),): Fraction(1)})


# Slack ladder for constraint values on the relaxation's boundary, where the
# feasible set loses interior; the bound is non-increasing in the constraint,
# so solving with a slightly smaller value stays a valid (conservative) bound.
BOUNDARY_SLACKS = (0.0, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5)


def guessing_probability(
    n: int,
    g_obs: float,
    level=None,
    poly: BellPolynomial | None = None,
    config: sdp.SolverConfig | None = None,
) -> float:
    """Upper bound on Eve's probability of guessing Alice's key outcome.

    Maximizes |<A_0>| over moment matrices whose correlator value is at least
    `g_obs`; with the inequality form the bound is concave and non-increasing
    in `g_obs`, so no extra concavification is needed.  Both outcome signs are
    maximized and the larger wins.  Raises `SdpInfeasibleError` when `g_obs`
    exceeds the relaxation's maximal value.
    """
    check_party_count(n)
    level = normalize_level(level if level is not None else default_level(n))
    poly = poly if poly is not None else build_bell(n)
    marginal = _alice_marginal(n)
    best = -np.inf
    for sign in (1, -1):
        objective = BellPolynomial(n, {mono: sign * c for mono, c in marginal.terms.items()})
        failure: Exception | None = None
        for slack in BOUNDARY_SLACKS:
            problem = build_moment_problem(
                n, level, objective=objective, constraint=poly,
                constraint_lower=float(g_obs) - slack,
            )
            try:
                best = max(best, _solve_moment_problem(problem, config).value)
                failure = None
                break
            except sdp.SdpError as exc:
                failure = exc
        if failure is not None:
            raise failure
    return float(min(1.0, max(0.5, 0.5 * (1.0 + best))))
