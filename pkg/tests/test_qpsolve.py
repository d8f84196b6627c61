import itertools

import numpy as np
import pytest

from dcmwalk.qpsolve import QpProblem, QpSolver, QpStatus, solve


def enumerate_active_sets(H, g, C, d, E=None, e=None):
    """Brute-force KKT oracle: try every active subset, keep the best feasible point."""
    n = H.shape[0]
    E = np.zeros((0, n)) if E is None else E
    e = np.zeros(0) if e is None else e
    best_x, best_val = None, np.inf
    for k in range(C.shape[0] + 1):
        for S in itertools.combinations(range(C.shape[0]), k):
            A = np.vstack([E, C[list(S)]])
            b = np.concatenate([e, d[list(S)]])
            m = A.shape[0]
            K = np.block([[H, A.T], [A, np.zeros((m, m))]])
            try:
                sol = np.linalg.solve(K, np.concatenate([-g, b]))
            except np.linalg.LinAlgError:
                continue
            x = sol[:n]
            if np.any(C @ x - d > 1e-9) or (m and np.abs(A @ x - b).max() > 1e-9):
                continue
            val = 0.5 * x @ H @ x + g @ x
            if val < best_val - 1e-12:
                best_x, best_val = x, val
    return best_x, best_val


def random_qp(rng, n=6, m=4):
    M = rng.normal(size=(n, n))
    H = M @ M.T + 0.1 * np.eye(n)
    g = rng.normal(size=n)
    C = rng.normal(size=(m, n))
    d = rng.normal(size=m) + 0.5
    return H, g, C, d


def test_unconstrained_stationary_point():
    sol = solve(QpProblem(H=[[2.0]], g=[-4.0]))
    assert sol.status is QpStatus.OPTIMAL
    assert sol.x[0] == pytest.approx(2.0, abs=1e-12)


def test_bound_forces_solution():
    sol = solve(QpProblem(H=[[2.0]], g=[0.0], lb=[1.0]))
    assert sol.optimal
    assert sol.x[0] == pytest.approx(1.0, abs=1e-12)
    assert len(sol.active_set) == 1
    assert sol.multipliers[sol.active_set[0]] > 0.0


@pytest.mark.parametrize("seed", range(100))
def test_matches_active_set_enumeration(seed):
    rng = np.random.default_rng(seed)
    H, g, C, d = random_qp(rng)
    x_ref, val_ref = enumerate_active_sets(H, g, C, d)
    sol = solve(QpProblem(H=H, g=g, A_ineq=C, b_ineq=d))
    if x_ref is None:
        assert sol.status is QpStatus.INFEASIBLE
        return
    assert sol.optimal
    assert np.abs(sol.x - x_ref).max() < 1e-6
    assert sol.kkt_residual <= 1e-8


@pytest.mark.parametrize("seed", range(30))
def test_equality_and_inequality_against_enumeration(seed):
    rng = np.random.default_rng(1000 + seed)
    H, g, C, d = random_qp(rng, n=5, m=5)
    E = rng.normal(size=(1, 5))
    e = rng.normal(size=1)
    x_ref, _ = enumerate_active_sets(H, g, C, d, E, e)
    sol = solve(QpProblem(H=H, g=g, A_eq=E, b_eq=e, A_ineq=C, b_ineq=d))
    if x_ref is None:
        assert sol.status is QpStatus.INFEASIBLE
        return
    assert sol.optimal
    assert np.abs(sol.x - x_ref).max() < 1e-6


@pytest.mark.parametrize("seed", range(20))
def test_optimality_certificate(seed):
    rng = np.random.default_rng(seed)
    H, g, C, d = random_qp(rng, n=8, m=12)
    sol = solve(QpProblem(H=H, g=g, A_ineq=C, b_ineq=d))
    if not sol.optimal:
        pytest.skip("instance infeasible")
    lam = sol.multipliers
    slack = C @ sol.x - d
    assert lam.min() >= -1e-8
    assert np.abs(lam * slack).max() <= 1e-8
    assert slack.max() <= 1e-8
    assert np.abs(H @ sol.x + g + C.T @ lam).max() <= 1e-8 * max(1.0, np.abs(g).max())


def test_infeasible_detected():
    # x >= 1 and x <= 0
    sol = solve(QpProblem(H=[[1.0]], g=[0.0], A_ineq=[[-1.0], [1.0]], b_ineq=[-1.0, 0.0]))
    assert sol.status is QpStatus.INFEASIBLE


def test_inconsistent_equalities_infeasible():
    sol = solve(QpProblem(H=np.eye(2), g=np.zeros(2), A_eq=[[1.0, 1.0], [1.0, 1.0]],
                          b_eq=[0.0, 1.0]))
    assert sol.status is QpStatus.INFEASIBLE


def test_max_iterations_reported():
    rng = np.random.default_rng(3)
    H, g, C, d = random_qp(rng, n=10, m=30)
    sol = QpSolver(max_iter=1, warm_start=False).solve(QpProblem(H=H, g=g, A_ineq=C, b_ineq=d))
    assert sol.status in (QpStatus.MAX_ITERATIONS, QpStatus.OPTIMAL, QpStatus.INFEASIBLE)
    full = solve(QpProblem(H=H, g=g, A_ineq=C, b_ineq=d))
    if full.optimal and full.iterations > 1:
        assert sol.status is not QpStatus.OPTIMAL


@pytest.mark.parametrize("seed", range(10))
def test_deterministic(seed):
    rng = np.random.default_rng(seed)
    H, g, C, d = random_qp(rng, n=8, m=10)
    p = QpProblem(H=H, g=g, A_ineq=C, b_ineq=d)
    a = solve(p)
    b = solve(p)
    assert a.x.tobytes() == b.x.tobytes()
    assert a.active_set == b.active_set


@pytest.mark.parametrize("seed", range(10))
def test_scaling_robustness(seed):
    rng = np.random.default_rng(seed)
    H, g, C, d = random_qp(rng)
    a = solve(QpProblem(H=H, g=g, A_ineq=C, b_ineq=d))
    b = solve(QpProblem(H=1000 * H, g=1000 * g, A_ineq=C, b_ineq=d))
    assert a.status == b.status
    if a.optimal:
        assert np.abs(a.x - b.x).max() < 1e-8


def test_semidefinite_cost_is_regularized():
    # min x0 s.t. x0 >= 1, x1 free in [-1, 1]: H singular
    H = np.zeros((2, 2))
    sol = solve(QpProblem(H=H, g=[1.0, 0.0], lb=[1.0, -1.0], ub=[5.0, 1.0]))
    assert sol.optimal
    assert sol.x[0] == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("seed", range(10))
def test_warm_start_does_not_change_answer(seed):
    rng = np.random.default_rng(seed)
    H, g, C, d = random_qp(rng, n=8, m=10)
    p = QpProblem(H=H, g=g, A_ineq=C, b_ineq=d)
    cold = QpSolver(warm_start=False).solve(p)
    solver = QpSolver(warm_start=True)
    solver.solve(QpProblem(H=H, g=g + 0.3, A_ineq=C, b_ineq=d))
    warm = solver.solve(p)
    assert cold.status == warm.status
    if cold.optimal:
        assert np.abs(cold.x - warm.x).max() < 1e-8
        wrong = solver.solve(p, active_set=tuple(range(C.shape[0])))
        assert np.abs(wrong.x - cold.x).max() < 1e-8


def test_problem_validation():
    with pytest.raises(ValueError):
        QpProblem(H=[[1.0, 2.0], [0.0, 1.0]], g=[0.0, 0.0])
    with pytest.raises(ValueError):
        QpProblem(H=np.eye(2), g=[0.0, 0.0, 0.0])
