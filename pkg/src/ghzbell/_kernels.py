"""Hot kernels for the deterministic-strategy scan.

Each monomial of a scaled-integer correlator is encoded as a bitmask over the
2n observables plus an integer coefficient; the value under strategy ``s``
(one sign bit per observable) is ``coeff * (-1)^popcount(s & mask)``, so the
full scan is pure integer bit-twiddling.  The numba-jitted kernel is used by
default; set ``GHZBELL_NO_NUMBA=1`` to force the pure-numpy path (results are
bit-identical, both paths are exact int64 arithmetic).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


def numba_disabled_by_env() -> bool:
    return os.environ.get("GHZBELL_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


def active_engine() -> str:
    """Engine selected by availability and the GHZBELL_NO_NUMBA flag."""
    return "numpy" if (not HAS_NUMBA or numba_disabled_by_env()) else "numba"


def strategy_values_numpy(masks: np.ndarray, coeffs: np.ndarray, n_bits: int) -> np.ndarray:
    """Scaled correlator value for every strategy index in [0, 2^n_bits)."""
    s = np.arange(1 << n_bits, dtype=np.int64)
    acc = np.zeros(s.size, dtype=np.int64)
    for mask, coeff in zip(masks, coeffs):
        parity = np.bitwise_count(s & mask).astype(np.int64) & 1
        acc += coeff * (1 - 2 * parity)
    return acc


@njit(cache=True)
def _strategy_values_jit(masks, coeffs, n_bits):  # pragma: no cover - exercised via dispatch
    n_strat = 1 << n_bits
    acc = np.zeros(n_strat, dtype=np.int64)
    for t in range(masks.shape[0]):
        mask = masks[t]
        coeff = coeffs[t]
        for s in range(n_strat):
            x = s & mask
            x ^= x >> 16
            x ^= x >> 8
            x ^= x >> 4
            x ^= x >> 2
            x ^= x >> 1
            if x & 1:
                acc[s] -= coeff
            else:
                acc[s] += coeff
    return acc


def strategy_values(masks: np.ndarray, coeffs: np.ndarray, n_bits: int, engine: str | None = None) -> np.ndarray:
    """Dispatch the strategy scan to the requested or auto-selected engine."""
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.int64)
    if n_bits < 0 or n_bits > 32:
        raise ValueError(f"n_bits must lie in [0, 32], got {n_bits}")
    if engine is None:
        engine = active_engine()
    if engine == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("numba engine requested but numba is unavailable")
        return _strategy_values_jit(masks, coeffs, n_bits)
    if engine == "numpy":
        return strategy_values_numpy(masks, coeffs, n_bits)
    raise ValueError(f"unknown engine {engine!r}")
