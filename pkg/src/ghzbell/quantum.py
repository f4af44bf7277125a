"""Dense qubit algebra: GHZ states, measurements, Bell operators and values.

Observables are Bloch-parametrized qubit operators; states are dense complex
density matrices of dimension 2^n with party 1 (Alice) on the leftmost tensor
factor.  The closed-form GHZ Bell value and the dense operator expectation
are two independent computation routes and must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .polynomial import BellPolynomial
from .scenario import MAX_PARTIES, check_party_count

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
IMAG_TOL = 1e-10

# Polar-angle guard band: the closed-form even-n branch is a 0/0 limit at the
# interval ends, so angles are clamped into [eps, pi - eps].
THETA_EPS = 1e-8


class QuantumError(ValueError):
    """Dimension mismatch, invalid state, or out-of-domain parameter."""


@dataclass(frozen=True)
class QubitObservable:
    """Unit-Bloch-vector observable with eigenvalues +/-1."""

    theta: float
    phi: float = 0.0

    def matrix(self) -> np.ndarray:
        st, ct = math.sin(self.theta), math.cos(self.theta)
        return math.cos(self.phi) * st * PAULI_X + math.sin(self.phi) * st * PAULI_Y + ct * PAULI_Z


@dataclass(frozen=True)
class MeasurementSpec:
    """Two observables for Alice and for each of the n-1 Bobs."""

    alice: tuple[QubitObservable, QubitObservable]
    bobs: tuple[tuple[QubitObservable, QubitObservable], ...]

    @property
    def n(self) -> int:
        return len(self.bobs) + 1

    def observable(self, party: int, setting: int) -> np.ndarray:
        if party == 1:
            return self.alice[setting].matrix()
        return self.bobs[party - 2][setting].matrix()


def ghz_optimal_spec(n: int, theta: float, phi: float = 0.0, phi_alice: float = 0.0) -> MeasurementSpec:
    """Sigma_z / sigma_x for Alice; every Bob at polar angles (theta, pi - theta).

    With phi = 0 the Bobs read sin(theta) X +/- cos(theta) Z.  Azimuths are a
    gauge freedom of the GHZ value only in combinations whose total vanishes:
    rotating every Bob by phi and Alice's second observable by -(n-1) phi
    leaves the value unchanged, a common rotation of everything does not.
    """
    check_party_count(n)
    alice = (QubitObservable(0.0), QubitObservable(math.pi / 2, phi_alice))
    bob = (QubitObservable(theta, phi), QubitObservable(math.pi - theta, phi))
    return MeasurementSpec(alice, (bob,) * (n - 1))


def parity_optimal_spec(n: int) -> MeasurementSpec:
    """Maximal-violation measurements for the Parity-CHSH correlator.

    Bob 2 at the CHSH angle 3pi/4, every further Bob measuring sigma_x only
    (both settings coincide at theta = pi/2).
    """
    check_party_count(n)
    if n < 3:
        raise QuantumError("Parity-CHSH spec needs at least 3 parties")
    alice = (QubitObservable(0.0), QubitObservable(math.pi / 2))
    bob2 = (QubitObservable(3 * math.pi / 4), QubitObservable(math.pi / 4))
    tail = (QubitObservable(math.pi / 2), QubitObservable(math.pi / 2))
    return MeasurementSpec(alice, (bob2,) + (tail,) * (n - 2))


class DenseState:
    """Density matrix over n qubits; Hermiticity and unit trace are enforced."""

    __slots__ = ("matrix", "n")

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise QuantumError(f"state matrix must be square, got shape {matrix.shape}")
        n = int(round(math.log2(matrix.shape[0])))
        if 2**n != matrix.shape[0] or not 1 <= n <= MAX_PARTIES:
            raise QuantumError(f"dimension {matrix.shape[0]} is not 2^n with n <= {MAX_PARTIES}")
        if np.max(np.abs(matrix - matrix.conj().T)) > HERMITICITY_TOL:
            raise QuantumError("state is not Hermitian within tolerance")
        if abs(np.trace(matrix).real - 1.0) > TRACE_TOL or abs(np.trace(matrix).imag) > TRACE_TOL:
            raise QuantumError("state trace differs from 1 beyond tolerance")
        self.matrix = matrix
        self.n = n

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate_psd(self, tol: float = PSD_TOL) -> None:
        """Eigenvalue check; separate from construction since it is O(dim^3)."""
        smallest = float(np.linalg.eigvalsh(self.matrix)[0])
        if smallest < -tol:
            raise QuantumError(f"state has negative eigenvalue {smallest}")


def ghz_state(n: int) -> DenseState:
    """Projector onto (|0...0> + |1...1>)/sqrt(2)."""
    if not isinstance(n, int) or not 1 <= n <= MAX_PARTIES:
        raise QuantumError(f"party count must lie in [1, {MAX_PARTIES}], got {n!r}")
    dim = 2**n
    rho = np.zeros((dim, dim), dtype=complex)
    for a in (0, dim - 1):
        for b in (0, dim - 1):
            rho[a, b] = 0.5
    return DenseState(rho)


def stabilizer_expansion(n: int) -> DenseState:
    """GHZ projector as the normalized sum of its 2^n stabilizer operators.

    Each bit string selects the full X layer (first bit) and a Z layer whose
    site exponents are consecutive-bit sums; per-site products X^a Z^b carry
    the phases that generate the Y-type terms.  Independent of `ghz_state`.
    """
    check_party_count(n, maximum=10)
    dim = 2**n
    acc = np.zeros((dim, dim), dtype=complex)
    for s in range(2**n):
        bits = [(s >> (n - 1 - i)) & 1 for i in range(n)]
        zexp = [bits[1]] + [bits[i] ^ bits[i + 1] for i in range(1, n - 1)] + [bits[n - 1]]
        site = [
            (PAULI_X if bits[0] else PAULI_I) @ (PAULI_Z if zexp[i] else PAULI_I)
            for i in range(n)
        ]
        acc += reduce(np.kron, site)
    return DenseState(acc / 2**n)


def bell_operator(poly: BellPolynomial, spec: MeasurementSpec) -> np.ndarray:
    """Dense Hermitian operator of a correlator under concrete measurements."""
    if spec.n != poly.n:
        raise QuantumError(f"spec is for {spec.n} parties, polynomial for {poly.n}")
    n = poly.n
    dim = 2**n
    op = np.zeros((dim, dim), dtype=complex)
    for mono, coeff in poly.items():
        chosen = dict(mono)
        mats = [
            spec.observable(party, chosen[party]) if party in chosen else PAULI_I
            for party in range(1, n + 1)
        ]
        op += float(coeff) * reduce(np.kron, mats)
    if np.max(np.abs(op - op.conj().T)) > HERMITICITY_TOL:
        raise QuantumError("assembled Bell operator is not Hermitian within tolerance")
    return op


def expectation(state: DenseState, operator: np.ndarray) -> float:
    """Real part of tr(operator @ state); rejects significant imaginary part."""
    operator = np.asarray(operator, dtype=complex)
    if operator.shape != state.matrix.shape:
        raise QuantumError(f"operator shape {operator.shape} != state shape {state.matrix.shape}")
    value = complex(np.einsum("ij,ji->", operator, state.matrix))
    if abs(value.imag) > IMAG_TOL:
        raise QuantumError(f"expectation has imaginary part {value.imag}")
    return value.real


def ghz_bell_value_closed(n: int, theta: float) -> float:
    """Closed-form Bell value of the n-GHZ state at common Bob angle theta.

    Odd n: 1 - (1 + cos t)^(n-1) + sin(t)^(n-1).  Even n replaces the last
    term by cot(t/2) sin(t)^n / (1 + cos t), evaluated through half-angle
    identities (1 -/+ cos t = 2 sin/cos^2(t/2)) so neither interval end
    divides by zero; angles are clamped into the guard band and the ends
    take their continuous limit values.
    """
    check_party_count(n, maximum=10**9)
    if not 0.0 <= theta <= math.pi:
        raise QuantumError(f"theta must lie in [0, pi], got {theta}")
    t = min(max(theta, THETA_EPS), math.pi - THETA_EPS)
    c, s = math.cos(t), math.sin(t)
    if c > 0.0 and (n - 1) * math.log1p(c) > 700.0:
        return -math.inf
    base = 1.0 - (1.0 + c) ** (n - 1)
    if n % 2 == 1:
        return base + s ** (n - 1)
    cot_half = s / (2.0 * math.sin(t / 2.0) ** 2)
    return base + cot_half * s**n / (2.0 * math.cos(t / 2.0) ** 2)


class ThetaOptimum(NamedTuple):
    theta: float
    value: float


@lru_cache(maxsize=None)
def optimize_theta(n: int, grid_points: int = 1000) -> ThetaOptimum:
    """Maximize the closed-form GHZ Bell value over the polar angle.

    A coarse grid locates the bracket, then bounded golden-section/parabolic
    refinement polishes it; on refinement failure the grid is restarted ten
    times finer around the incumbent.
    """
    check_party_count(n, maximum=10**9)
    lo, hi = THETA_EPS, math.pi - THETA_EPS

    def objective(t: float) -> float:
        return -ghz_bell_value_closed(n, t)

    grid = np.linspace(lo, hi, grid_points)
    values = np.array([ghz_bell_value_closed(n, t) for t in grid])
    i = int(np.argmax(values))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid_points - 1)]
    result = minimize_scalar(objective, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    if not result.success or -result.fun < values[i]:
        fine = np.linspace(a, b, 10 * grid_points)
        fine_values = np.array([ghz_bell_value_closed(n, t) for t in fine])
        j = int(np.argmax(fine_values))
        a, b = fine[max(j - 1, 0)], fine[min(j + 1, fine.size - 1)]
        result = minimize_scalar(objective, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    theta = float(result.x)
    return ThetaOptimum(theta, ghz_bell_value_closed(n, theta))


def apply_depolarizing(state: DenseState, p: float, qubits: tuple[int, ...] | None = None) -> DenseState:
    """Independent single-qubit depolarizing noise on the given parties.

    Each selected qubit is replaced by the maximally mixed qubit with
    probability p; defaults to all parties.
    """
    if not 0.0 <= p <= 1.0:
        raise QuantumError(f"noise probability must lie in [0, 1], got {p}")
    n = state.n
    if qubits is None:
        qubits = tuple(range(1, n + 1))
    rho = state.matrix
    dim = state.dim
    for party in qubits:
        if not 1 <= party <= n:
            raise QuantumError(f"party {party} outside [1, {n}]")
        i = party - 1
        d1, d2 = 2**i, 2 ** (n - 1 - i)
        t = rho.reshape(d1, 2, d2, d1, 2, d2)
        partial = t[:, 0, :, :, 0, :] + t[:, 1, :, :, 1, :]
        out = (1.0 - p) * t
        out[:, 0, :, :, 0, :] += 0.5 * p * partial
        out[:, 1, :, :, 1, :] += 0.5 * p * partial
        rho = out.reshape(dim, dim)
    return DenseState(rho)


def qber(state: DenseState) -> float:
    """Worst pairwise disagreement probability in the computational basis.

    For each Bob, the probability that Alice's and that Bob's Z-measurement
    outcomes differ, read off the diagonal; the maximum over Bobs is returned.
    """
    n = state.n
    if n < 2:
        raise QuantumError("QBER needs at least 2 parties")
    diag = np.real(np.diagonal(state.matrix))
    indices = np.arange(state.dim)
    alice_bit = (indices >> (n - 1)) & 1
    worst = 0.0
    for j in range(2, n + 1):
        bob_bit = (indices >> (n - j)) & 1
        worst = max(worst, float(diag[alice_bit != bob_bit].sum()))
    return worst
