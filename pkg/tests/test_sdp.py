import io
import math

import numpy as np
import pytest

from ghzbell import npa
from ghzbell.polynomial import build_bell
from ghzbell.quantum import optimize_theta
from ghzbell.sdp import (
    SdpError,
    SdpInfeasibleError,
    SdpProblem,
    SolverConfig,
    dumps_problem,
    load_problem,
    loads_problem,
    solve,
)


def eigenvalue_problem():
    return SdpProblem(dim=2, objective=np.diag([1.0, -1.0]), eq_constraints=[(np.eye(2), 1.0)])


def test_eigenvalue_toy():
    solution = solve(eigenvalue_problem())
    assert solution.status == "optimal"
    assert abs(solution.value - 1.0) < 1e-8
    assert np.max(np.abs(solution.matrix - np.diag([1.0, 0.0]))) < 1e-6


def test_correlation_extreme_point():
    objective = np.array([[0.0, 1.0], [1.0, 0.0]])
    problem = SdpProblem(
        dim=2,
        objective=objective,
        eq_constraints=[(np.diag([1.0, 0.0]), 1.0), (np.diag([0.0, 1.0]), 1.0)],
    )
    solution = solve(problem)
    assert solution.status == "optimal"
    assert abs(solution.value - 2.0) < 1e-7
    assert np.max(np.abs(solution.matrix - np.ones((2, 2)))) < 1e-5


def test_chsh_level_one_matches_quantum_optimum():
    problem = npa.to_sdp(npa.build_moment_problem(2, 1, objective=build_bell(2)))
    solution = solve(problem)
    assert solution.status == "optimal"
    assert abs(solution.value - math.sqrt(2)) < 1e-6
    assert abs(solution.value - optimize_theta(2).value) < 1e-6


def test_solution_matrix_is_psd():
    problem = npa.to_sdp(npa.build_moment_problem(2, 2, objective=build_bell(2)))
    solution = solve(problem)
    assert float(np.linalg.eigvalsh(solution.matrix)[0]) >= -1e-9


def test_residuals_reported_within_tolerance_on_optimal():
    solution = solve(eigenvalue_problem())
    primal, dual, gap = solution.residuals
    assert primal <= 1e-8
    assert gap <= 1e-7
    assert dual <= 1e-6


def test_determinism_bitwise():
    problem = npa.to_sdp(npa.build_moment_problem(2, 2, objective=build_bell(2)))
    first = solve(problem)
    second = solve(problem)
    assert first.value == second.value
    assert first.iterations == second.iterations
    assert np.array_equal(first.matrix, second.matrix)


def test_infeasible_raises():
    problem = SdpProblem(
        dim=2,
        objective=np.eye(2),
        eq_constraints=[(np.diag([1.0, 0.0]), -1.0)],  # X00 = -1 impossible for PSD X
    )
    with pytest.raises(SdpInfeasibleError):
        solve(problem)


def test_asymmetric_constraint_rejected():
    with pytest.raises(SdpError):
        SdpProblem(dim=2, objective=np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_dimension_cap():
    with pytest.raises(SdpError):
        SdpProblem(dim=500, objective=np.eye(500))


def test_iteration_cap_respected():
    config = SolverConfig(max_iterations=3)
    solution = solve(eigenvalue_problem(), config)
    assert solution.iterations <= 3
    assert solution.status in ("optimal", "max-iterations")


def test_dump_load_round_trip():
    problem = SdpProblem(
        dim=3,
        objective=np.diag([1.0, 2.0, -1.0]),
        eq_constraints=[(np.eye(3), 1.0)],
        ineq_constraints=[(np.diag([0.0, 1.0, 0.0]), 0.25)],
    )
    text = dumps_problem(problem)
    loaded = loads_problem(text)
    assert loaded.dim == 3
    assert np.array_equal(loaded.objective, problem.objective)
    assert len(loaded.eq_constraints) == 1 and len(loaded.ineq_constraints) == 1
    assert np.array_equal(loaded.eq_constraints[0][0], problem.eq_constraints[0][0])
    assert loaded.ineq_constraints[0][1] == 0.25
    assert abs(solve(loaded).value - solve(problem).value) < 1e-10


def test_load_rejects_foreign_text():
    with pytest.raises(SdpError):
        load_problem(io.StringIO("not an sdp\n"))
