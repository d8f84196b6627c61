"""Dense convex quadratic programming by a primal active-set method.

Solves::

    minimize    1/2 x^T H x + g^T x
    subject to  A_eq x == b_eq
                A_ineq x <= b_ineq
                lb <= x <= ub

Problems in this package are tiny (a dozen to a few dozen variables), so the
KKT system of the working set is refactorized at every iteration. A feasible
starting point comes either from the caller, from a warm-start working set,
or from a Phase-1 elastic program that minimizes a single constraint slack.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

STEP_TOL = 1e-9
BLOCK_TOL = 1e-10
EIG_THRESHOLD = 1e-9
DEFAULT_REGULARIZATION = 1e-10
DEFAULT_MAX_ITER = 200


class QpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITERATIONS = "max_iterations"


def _as_matrix(A, n):
    if A is None:
        return np.zeros((0, n))
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return np.zeros((0, n))
    return A


def _as_vector(b, m):
    if b is None:
        return np.zeros(m)
    return np.asarray(b, dtype=float).reshape(-1)


@dataclass(frozen=True)
class QpProblem:

    H: np.ndarray
    g: np.ndarray
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None
    A_ineq: np.ndarray = None
    b_ineq: np.ndarray = None
    lb: np.ndarray = None
    ub: np.ndarray = None

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=float))
        n = H.shape[0]
        if H.shape != (n, n):
            raise ValueError(f"H must be square, got {H.shape}")
        if not np.allclose(H, H.T, atol=1e-10, rtol=0.0):
            raise ValueError("H must be symmetric")
        g = np.asarray(self.g, dtype=float).reshape(-1)
        A_eq = _as_matrix(self.A_eq, n)
        b_eq = _as_vector(self.b_eq, A_eq.shape[0])
        A_in = _as_matrix(self.A_ineq, n)
        b_in = _as_vector(self.b_ineq, A_in.shape[0])
        if g.shape != (n,) or A_eq.shape[1] != n or A_in.shape[1] != n:
            raise ValueError("inconsistent QP dimensions")
        if b_eq.shape[0] != A_eq.shape[0] or b_in.shape[0] != A_in.shape[0]:
            raise ValueError("inconsistent constraint vector lengths")
        for name, bound in (("lb", self.lb), ("ub", self.ub)):
            if bound is not None:
                bound = np.broadcast_to(np.asarray(bound, dtype=float), (n,)).copy()
                object.__setattr__(self, name, bound)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "A_eq", A_eq)
        object.__setattr__(self, "b_eq", b_eq)
        object.__setattr__(self, "A_ineq", A_in)
        object.__setattr__(self, "b_ineq", b_in)

    @property
    def n(self) -> int:
        return self.H.shape[0]

    def stacked_inequalities(self):
        """All inequalities as ``C x <= d``, bounds appended after ``A_ineq``."""
        rows, rhs = [self.A_ineq], [self.b_ineq]
        eye = np.eye(self.n)
        if self.ub is not None:
            finite = np.isfinite(self.ub)
            rows.append(eye[finite])
            rhs.append(self.ub[finite])
        if self.lb is not None:
            finite = np.isfinite(self.lb)
            rows.append(-eye[finite])
            rhs.append(-self.lb[finite])
        return np.vstack(rows), np.concatenate(rhs)

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.H @ x + self.g @ x)


@dataclass(frozen=True)
class QpSolution:

    x: np.ndarray
    status: QpStatus
    kkt_residual: float
    active_set: tuple = ()
    multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    multipliers_eq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is QpStatus.OPTIMAL


def _independent_rows(A_fixed, C, candidates, tol=1e-10):
    """Greedy subset of ``candidates`` keeping ``[A_fixed; C[W]]`` full row rank."""
    chosen = []
    basis = A_fixed
    rank = np.linalg.matrix_rank(basis, tol) if basis.shape[0] else 0
    for i in candidates:
        trial = np.vstack([basis, C[i:i + 1]])
        r = np.linalg.matrix_rank(trial, tol)
        if r > rank:
            basis, rank = trial, r
            chosen.append(int(i))
    return chosen


def _solve_kkt(H, grad, A_W):
    """Step ``p`` and multipliers ``lam`` with ``H p + A_W^T lam = -grad``, ``A_W p = 0``."""
    n, m = H.shape[0], A_W.shape[0]
    if m == 0:
        return np.linalg.solve(H, -grad), np.zeros(0)
    K = np.zeros((n + m, n + m))
    K[:n, :n] = H
    K[:n, n:] = A_W.T
    K[n:, :n] = A_W
    rhs = np.concatenate([-grad, np.zeros(m)])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:n], sol[n:]


class QpSolver:

    """Primal active-set QP solver with optional warm start.

    Parameters
    ----------
    max_iter : int
        Cap on active-set iterations per phase.
    regularization : float
        Tikhonov term added to the diagonal of H when its smallest eigenvalue
        is below 1e-9.
    tol : float
        Feasibility and optimality tolerance.
    warm_start : bool
        Seed each solve with the working set of the previous successful solve
        of the same dimensions.
    """

    def __init__(self, max_iter=DEFAULT_MAX_ITER, regularization=DEFAULT_REGULARIZATION,
                 tol=1e-9, warm_start=True):
        self.max_iter = max_iter
        self.regularization = regularization
        self.tol = tol
        self.warm_start = warm_start
        self._last_active = None
        self._last_shape = None

    def reset(self):
        self._last_active = None
        self._last_shape = None

    def solve(self, problem: QpProblem, x0=None, active_set=None) -> QpSolution:
        H = 0.5 * (problem.H + problem.H.T)
        n = problem.n
        if n and np.linalg.eigvalsh(H)[0] < EIG_THRESHOLD:
            H = H + self.regularization * np.eye(n)
        g = problem.g
        E, e = problem.A_eq, problem.b_eq
        C, d = problem.stacked_inequalities()
        shape = (n, E.shape[0], C.shape[0])

        if active_set is None and self.warm_start and self._last_shape == shape:
            active_set = self._last_active

        start = None
        if active_set is not None:
            start = self._warm_point(H, g, E, e, C, d, active_set)
        if start is None and x0 is not None:
            x0 = np.asarray(x0, dtype=float)
            if self._feasible(x0, E, e, C, d):
                active = np.flatnonzero(C @ x0 - d >= -self.tol) if C.shape[0] else []
                start = (x0, _independent_rows(E, C, active))
        iters_phase1 = 0
        if start is None:
            start, x_best, iters_phase1 = self._phase1(E, e, C, d)
            if start is None:
                return QpSolution(x_best, QpStatus.INFEASIBLE, np.inf, (),
                                  np.zeros(C.shape[0]), np.zeros(E.shape[0]),
                                  iters_phase1)
        x, W = start
        x, W, lam_W, mu, status, iters = self._active_set(H, g, E, C, d, x, list(W))
        lam = np.zeros(C.shape[0])
        for k, i in enumerate(W):
            lam[i] = lam_W[k]
        residual = self._kkt_residual(problem.H, g, E, e, C, d, x, mu, lam)
        if status is QpStatus.OPTIMAL:
            self._last_active = tuple(W)
            self._last_shape = shape
        return QpSolution(x, status, residual, tuple(sorted(W)), lam, mu,
                          iters + iters_phase1)

    def _feasible(self, x, E, e, C, d):
        scale = 1.0 + np.abs(x).max(initial=0.0)
        if E.shape[0] and np.abs(E @ x - e).max() > self.tol * scale:
            return False
        if C.shape[0] and (C @ x - d).max() > self.tol * scale:
            return False
        return True

    def _warm_point(self, H, g, E, e, C, d, active_set):
        W = [i for i in active_set if 0 <= i < C.shape[0]]
        W = _independent_rows(E, C, W)
        A_W = np.vstack([E, C[W]])
        b_W = np.concatenate([e, d[W]])
        n = H.shape[0]
        m = A_W.shape[0]
        K = np.zeros((n + m, n + m))
        K[:n, :n] = H
        K[:n, n:] = A_W.T
        K[n:, :n] = A_W
        try:
            sol = np.linalg.solve(K, np.concatenate([-g, b_W]))
        except np.linalg.LinAlgError:
            return None
        x = sol[:n]
        if not self._feasible(x, E, e, C, d):
            return None
        return x, W

    def _phase1(self, E, e, C, d):
        """Feasible point from the elastic program ``min t`` s.t. ``C x - t <= d``."""
        n = C.shape[1] if C.shape[0] else E.shape[1]
        if E.shape[0]:
            x_ls = np.linalg.lstsq(E, e, rcond=None)[0]
            if np.abs(E @ x_ls - e).max() > self.tol * (1.0 + np.abs(e).max()):
                return None, x_ls, 0
        else:
            x_ls = np.zeros(n)
        if C.shape[0] == 0:
            return (x_ls, []), x_ls, 0
        viol = C @ x_ls - d
        if viol.max() <= 0.0:
            W = _independent_rows(E, C, np.flatnonzero(viol >= -self.tol))
            return (x_ls, W), x_ls, 0
        m = C.shape[0]
        delta = 1e-8
        H1 = delta * np.eye(n + 1)
        g1 = np.zeros(n + 1)
        g1[:n] = -delta * x_ls
        g1[n] = 1.0
        E1 = np.hstack([E, np.zeros((E.shape[0], 1))])
        C1 = np.vstack([np.hstack([C, -np.ones((m, 1))]),
                        np.hstack([np.zeros((1, n)), -np.ones((1, 1))])])
        d1 = np.concatenate([d, [0.0]])
        t0 = viol.max()
        y = np.concatenate([x_ls, [t0]])
        active = np.flatnonzero(viol >= t0 - self.tol)
        W = _independent_rows(E1, C1, active)
        y, W, _, _, status, iters = self._active_set(H1, g1, E1, C1, d1, y, W)
        x, t = y[:n], y[n]
        if t > self.tol * (1.0 + np.abs(d).max(initial=0.0)):
            return None, x, iters
        W = _independent_rows(E, C, [i for i in W if i < m])
        return (x, W), x, iters

    def _active_set(self, H, g, E, C, d, x, W):
        n = H.shape[0]
        m_e = E.shape[0]
        scale = max(1.0, np.abs(g).max(initial=0.0), np.abs(H).max(initial=0.0))
        lam_W = np.zeros(len(W))
        mu = np.zeros(m_e)
        for it in range(1, self.max_iter + 1):
            A_W = np.vstack([E, C[W]]) if W else E
            grad = H @ x + g
            p, lam = _solve_kkt(H, grad, A_W)
            # steps at the KKT solve noise level count as zero, otherwise a constraint
            # can be added and dropped forever at a degenerate vertex
            if np.abs(p).max(initial=0.0) <= STEP_TOL * max(1.0, np.abs(x).max(initial=0.0)):
                mu = lam[:m_e]
                lam_W = lam[m_e:]
                if len(W) == 0 or lam_W.min() >= -self.tol * scale:
                    return x, W, lam_W, mu, QpStatus.OPTIMAL, it
                k = int(np.argmin(lam_W))
                del W[k]
                continue
            alpha, blocking = 1.0, None
            if C.shape[0]:
                Cp = C @ p
                slack = d - C @ x
                # rows in the span of the working set only block on rounding noise
                mask = Cp > BLOCK_TOL * np.linalg.norm(C, axis=1) * np.linalg.norm(p)
                if W:
                    mask[W] = False
                idx = np.flatnonzero(mask)
                if idx.size:
                    ratios = np.maximum(slack[idx], 0.0) / Cp[idx]
                    j = int(np.argmin(ratios))
                    if ratios[j] < 1.0:
                        alpha, blocking = float(ratios[j]), int(idx[j])
            x = x + alpha * p
            if blocking is not None:
                W.append(blocking)
        A_W = np.vstack([E, C[W]]) if W else E
        _, lam = _solve_kkt(H, H @ x + g, A_W)
        return x, W, lam[m_e:], lam[:m_e], QpStatus.MAX_ITERATIONS, self.max_iter

    @staticmethod
    def _kkt_residual(H, g, E, e, C, d, x, mu, lam):
        scale = max(1.0, np.abs(g).max(initial=0.0), np.abs(H @ x).max(initial=0.0))
        stationarity = H @ x + g
        if E.shape[0]:
            stationarity = stationarity + E.T @ mu
        if C.shape[0]:
            stationarity = stationarity + C.T @ lam
        terms = [np.abs(stationarity).max(initial=0.0) / scale]
        xs = 1.0 + np.abs(x).max(initial=0.0)
        if E.shape[0]:
            terms.append(np.abs(E @ x - e).max() / xs)
        if C.shape[0]:
            slack = C @ x - d
            terms.append(max(0.0, slack.max()) / xs)
            terms.append(max(0.0, -lam.min()) / scale)
            terms.append(np.abs(lam * slack).max() / (scale * xs))
        return float(max(terms))


def solve(problem: QpProblem, **kwargs) -> QpSolution:
    """One-shot solve with a fresh :class:`QpSolver`."""
    return QpSolver(**kwargs).solve(problem)
