"""GHZ-tailored multipartite Bell inequalities.

Classical-bound verification by strategy enumeration, quantum values on GHZ
states, moment-matrix (NPA) upper bounds on quantum values and on an
eavesdropper's guessing probability, and asymptotic device-independent
conference key rates under depolarizing noise.
"""

from .keyrate import RatePoint, binary_entropy, chsh_baseline, di_rate, rate_curve
from .lhv import (
    BoundsReport,
    DeterministicStrategy,
    classical_bounds_exhaustive,
    classical_bounds_reduced,
)
from .npa import build_basis, guessing_probability, tsirelson_bound
from .polynomial import (
    BellPolynomial,
    build_bell,
    evaluate_classical,
    merge_inputs,
    parity_chsh,
    permute_bobs,
    reduce_party,
)
from .quantum import (
    DenseState,
    MeasurementSpec,
    QubitObservable,
    apply_depolarizing,
    bell_operator,
    expectation,
    ghz_bell_value_closed,
    ghz_optimal_spec,
    ghz_state,
    optimize_theta,
    qber,
    stabilizer_expansion,
)
from .scenario import enumerate_subsets

__version__ = "0.1.0"

__all__ = [
    "BellPolynomial",
    "BoundsReport",
    "DenseState",
    "DeterministicStrategy",
    "MeasurementSpec",
    "QubitObservable",
    "RatePoint",
    "apply_depolarizing",
    "bell_operator",
    "binary_entropy",
    "build_basis",
    "build_bell",
    "chsh_baseline",
    "classical_bounds_exhaustive",
    "classical_bounds_reduced",
    "di_rate",
    "enumerate_subsets",
    "evaluate_classical",
    "expectation",
    "ghz_bell_value_closed",
    "ghz_optimal_spec",
    "ghz_state",
    "guessing_probability",
    "merge_inputs",
    "optimize_theta",
    "parity_chsh",
    "permute_bobs",
    "qber",
    "rate_curve",
    "reduce_party",
    "stabilizer_expansion",
    "tsirelson_bound",
]
