"""Asymptotic device-independent conference key rates under local noise.

Honest implementation: the n-GHZ state with the fixed noiseless-optimal
measurement angles; per-qubit depolarizing noise with parameter p.  The rate
lower bound is 2(1 - P_guess) - h(QBER), with P_guess from the moment-matrix
relaxation; the bipartite CHSH protocol (optionally with the 1/(n-1)
bottleneck prefactor) is the closed-form comparison baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import npa, quantum, sdp
from .polynomial import build_bell, parity_chsh
from .scenario import check_party_count

QBER_CONSISTENCY_TOL = 1e-10


class KeyrateError(RuntimeError):
    """Pipeline inconsistency (propagated SDP errors keep their own type)."""


def binary_entropy(q: float) -> float:
    """h(q) in bits, with h(0) = h(1) = 0 by continuity."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {q}")
    if q in (0.0, 1.0):
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


@dataclass
class RatePoint:
    """One noise point of a key-rate curve; rates are bits per round."""

    n: int
    p: float
    g_obs: float
    qber: float
    p_guess: float
    rate_raw: float
    rate: float
    chsh_rate: float
    chsh_bottleneck_rate: float
    level: str
    parity_rate: float | None = None
    error: str | None = None


def noisy_ghz_observed(n: int, p: float, parity: bool = False) -> float:
    """Observed correlator value of the depolarized GHZ honest implementation."""
    state = quantum.apply_depolarizing(quantum.ghz_state(n), p)
    if parity:
        operator = quantum.bell_operator(parity_chsh(n), quantum.parity_optimal_spec(n))
    else:
        theta = quantum.optimize_theta(n).theta
        operator = quantum.bell_operator(build_bell(n), quantum.ghz_optimal_spec(n, theta))
    return quantum.expectation(state, operator)


def expected_qber(p: float) -> float:
    """QBER of the depolarized GHZ under all-Z key measurements, p(1 - p/2)."""
    return p * (1.0 - 0.5 * p)


def chsh_baseline(q: float, n: int = 2, bottleneck: bool = False) -> float:
    """Closed-form bipartite CHSH rate at QBER q, S = 2*sqrt(2)*(1 - 2q).

    Below the critical violation S = 2 the device-independent entropy term is
    total (one full bit lost) and the raw value -h(q) is returned.  With the
    bottleneck flag the rate carries the 1/(n-1) network prefactor.
    """
    if not 0.0 <= q <= 0.5:
        raise ValueError(f"QBER must lie in [0, 1/2], got {q}")
    s = 2.0 * math.sqrt(2.0) * (1.0 - 2.0 * q)
    radicand = s * s / 4.0 - 1.0
    if radicand < 0.0:
        rate = -binary_entropy(q)
    else:
        rate = 1.0 - binary_entropy(q) - binary_entropy(0.5 * (1.0 + math.sqrt(radicand)))
    if bottleneck:
        check_party_count(n)
        rate /= n - 1
    return rate


def _guess_bound(n: int, g_obs: float, level, poly) -> float:
    """P_guess with the classical no-violation shortcut."""
    if g_obs <= 1.0:
        return 1.0
    return npa.guessing_probability(n, g_obs, level, poly=poly)


def di_rate(n: int, p: float, level=None, parity: bool = False) -> RatePoint:
    """Key-rate point of the honest implementation at noise p.

    The model QBER p(1 - p/2) is cross-checked against the state-based value;
    a mismatch means the noise pipeline is broken and raises.  `parity`
    additionally scores the Parity-CHSH pipeline at the same level.
    """
    check_party_count(n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise parameter must lie in [0, 1], got {p}")
    level = npa.normalize_level(level if level is not None else npa.default_level(n))

    state = quantum.apply_depolarizing(quantum.ghz_state(n), p)
    q = expected_qber(p)
    q_state = quantum.qber(state)
    if abs(q - q_state) > QBER_CONSISTENCY_TOL:
        raise KeyrateError(f"model QBER {q} disagrees with state QBER {q_state}")

    g_obs = noisy_ghz_observed(n, p)
    p_guess = _guess_bound(n, g_obs, level, build_bell(n))
    rate_raw = 2.0 * (1.0 - p_guess) - binary_entropy(q)

    parity_value = None
    if parity:
        g_parity = noisy_ghz_observed(n, p, parity=True)
        p_guess_parity = _guess_bound(n, g_parity, level, parity_chsh(n))
        parity_value = max(0.0, 2.0 * (1.0 - p_guess_parity) - binary_entropy(q))

    return RatePoint(
        n=n,
        p=p,
        g_obs=g_obs,
        qber=q,
        p_guess=p_guess,
        rate_raw=rate_raw,
        rate=max(0.0, rate_raw),
        chsh_rate=chsh_baseline(q),
        chsh_bottleneck_rate=chsh_baseline(q, n, bottleneck=True),
        level=level,
        parity_rate=parity_value,
    )


def rate_curve(n: int, p_grid, level=None, parity: bool = False) -> list[RatePoint]:
    """di_rate over a noise grid in [0, 0.2]; SDP failures are recorded per point."""
    p_grid = [float(p) for p in p_grid]
    if any(not 0.0 <= p <= 0.2 for p in p_grid):
        raise ValueError("noise grid must lie within [0, 0.2]")
    points: list[RatePoint] = []
    for p in p_grid:
        try:
            points.append(di_rate(n, float(p), level=level, parity=parity))
        except (sdp.SdpError, KeyrateError) as exc:
            lvl = npa.normalize_level(level if level is not None else npa.default_level(n))
            nan = float("nan")
            points.append(
                RatePoint(
                    n=n, p=float(p), g_obs=nan, qber=nan, p_guess=nan,
                    rate_raw=nan, rate=nan, chsh_rate=nan,
                    chsh_bottleneck_rate=nan, level=lvl,
                    parity_rate=nan if parity else None,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return points


CSV_COLUMNS = (
    "n", "p", "g_obs", "qber", "p_guess", "rate_raw", "rate",
    "chsh_rate", "chsh_bottleneck_rate", "parity_rate", "level",
)


def csv_rows(points: list[RatePoint], fmt) -> list[str]:
    """Render points with the given float formatter; fixed column contract.

    The parity_rate column is present only when every point carries one.
    """
    with_parity = all(pt.parity_rate is not None for pt in points) and points
    columns = [c for c in CSV_COLUMNS if c != "parity_rate" or with_parity]
    rows = [",".join(columns)]
    for pt in points:
        cells = []
        for col in columns:
            value = getattr(pt, col)
            if col == "n":
                cells.append(str(value))
            elif col == "level":
                cells.append(value)
            else:
                cells.append(fmt(value))
        rows.append(",".join(cells))
    return rows
