"""Deterministic, locale-free numeric rendering for CLI artifacts."""

from __future__ import annotations

import math

import numpy as np


def fixed(x: float) -> str:
    """Positional decimal with 10 significant digits; never scientific.

    Identical inputs render to identical bytes, which gives byte-stable
    output files across runs.
    """
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return np.format_float_positional(x, precision=10, unique=False, fractional=False, trim="k")
