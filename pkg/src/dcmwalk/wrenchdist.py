"""Contact wrench cones and the wrench distribution QP.

Wrench coordinates are ordered ``(f_x, f_y, f_z, tau_x, tau_y, tau_z)``. The
double-support QP splits a desired net wrench between two sole frames; in
single support the same machinery projects the net wrench onto the cone of
the support foot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qpsolve import QpProblem, QpSolver, QpStatus
from .spatial import (FrameId, Transform, Wrench6, cop_of_wrench,
                      wrench_transform_matrix, zmp_on_plane)


@dataclass(frozen=True)
class ContactSpec:

    """Rectangular frictional contact.

    ``pose`` maps sole-center coordinates to the world frame. ``ankle_offset``
    is the origin of the ankle frame in sole coordinates.
    """

    pose: Transform = field(default_factory=Transform)
    half_length: float = 0.112
    half_width: float = 0.065
    friction: float = 0.7
    p_min: float = 15.0
    frame: FrameId = FrameId.LEFT_SOLE
    ankle_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not (self.half_length > 0 and self.half_width > 0 and self.friction > 0):
            raise ValueError("contact dimensions and friction must be positive")
        if self.p_min < 0:
            raise ValueError("p_min must be non-negative")
        object.__setattr__(self, "ankle_offset",
                           np.asarray(self.ankle_offset, dtype=float).reshape(3))

    def corners(self) -> np.ndarray:
        """Sole corners in world coordinates, shape (4, 3)."""
        X, Y = self.half_length, self.half_width
        local = np.array([[X, Y, 0.0], [X, -Y, 0.0], [-X, -Y, 0.0], [-X, Y, 0.0]])
        return local @ self.pose.rotation.T + self.pose.translation


@dataclass(frozen=True)
class DistributionWeights:

    net_wrench: float = 1e4
    ankle_torque: float = 1e2
    pressure_ratio: float = 1.0
    epsilon: float = 1e-4


def build_cwc(spec: ContactSpec) -> np.ndarray:
    """16x6 matrix ``U`` such that ``U w <= 0`` is the wrench cone of the sole.

    Rows 0-3 bound the friction pyramid, rows 4-7 keep the CoP in the sole
    rectangle, rows 8-15 bound the yaw moment. The latter come from
    ``tau_min <= tau_z <= tau_max`` with::

        tau_min = -mu (X + Y) f_z + |Y f_x - mu tau_x| + |X f_y - mu tau_y|
        tau_max = +mu (X + Y) f_z - |Y f_x + mu tau_x| - |X f_y + mu tau_y|

    each absolute value being expanded over both signs.
    """
    X, Y, mu = spec.half_length, spec.half_width, spec.friction
    rows = [
        [-1, 0, -mu, 0, 0, 0],
        [+1, 0, -mu, 0, 0, 0],
        [0, -1, -mu, 0, 0, 0],
        [0, +1, -mu, 0, 0, 0],
        [0, 0, -Y, -1, 0, 0],
        [0, 0, -Y, +1, 0, 0],
        [0, 0, -X, 0, -1, 0],
        [0, 0, -X, 0, +1, 0],
    ]
    for s1 in (-1, +1):
        for s2 in (-1, +1):
            # tau_z >= tau_min branch
            rows.append([s1 * Y, s2 * X, -mu * (X + Y), -s1 * mu, -s2 * mu, -1])
    for s1 in (-1, +1):
        for s2 in (-1, +1):
            # tau_z <= tau_max branch
            rows.append([s1 * Y, s2 * X, -mu * (X + Y), s1 * mu, s2 * mu, +1])
    return np.array(rows, dtype=float)


@dataclass(frozen=True)
class DistributionResult:

    w_left: Wrench6
    w_right: Wrench6
    z_qp: np.ndarray
    cop_left: np.ndarray
    cop_right: np.ndarray
    pressure_left: float
    pressure_right: float
    status: QpStatus = QpStatus.OPTIMAL
    cost: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status is QpStatus.OPTIMAL


def _ankle_matrix(spec: ContactSpec) -> np.ndarray:
    return wrench_transform_matrix(Transform.from_translation(-spec.ankle_offset))


def _cop_or_zero(w: Wrench6) -> np.ndarray:
    return cop_of_wrench(w) if w.force[2] > 0.0 else np.zeros(3)


def _net_zmp(wrenches, specs, height):
    total = np.zeros(6)
    for w, spec in zip(wrenches, specs):
        total += wrench_transform_matrix(spec.pose) @ w.vector()
    net = Wrench6.from_vector(total)
    if net.force[2] <= 0.0:
        return np.array([np.nan, np.nan, height])
    return zmp_on_plane(net, height)


def _infeasible_result(w_net, status):
    zero_l = Wrench6.zero(FrameId.LEFT_SOLE)
    zero_r = Wrench6.zero(FrameId.RIGHT_SOLE)
    nan3 = np.full(3, np.nan)
    return DistributionResult(zero_l, zero_r, nan3, nan3, nan3, 0.0, 0.0, status, np.inf)


def distribute_double(w_net: Wrench6, left: ContactSpec, right: ContactSpec, rho: float,
                      weights: DistributionWeights = DistributionWeights(),
                      zmp_height: float = None, solver: QpSolver = None,
                      ) -> DistributionResult:
    """Split the world-frame net wrench between both feet.

    The 12 decision variables are the left and right contact wrenches in their
    sole-center frames. ``rho`` is the prescribed fraction of the total
    pressure carried by the left foot.
    """
    if w_net.frame is not FrameId.WORLD:
        raise ValueError("net wrench must be expressed in the world frame")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"pressure ratio {rho} outside [0, 1]")
    solver = solver or QpSolver()
    w0 = w_net.vector()
    M = np.hstack([wrench_transform_matrix(left.pose), wrench_transform_matrix(right.pose)])
    W_ankle = np.diag([weights.epsilon] * 3 + [1.0, 1.0, weights.epsilon])
    A_l, A_r = _ankle_matrix(left), _ankle_matrix(right)
    ankle = np.zeros((12, 12))
    ankle[:6, :6] = A_l.T @ W_ankle @ A_l
    ankle[6:, 6:] = A_r.T @ W_ankle @ A_r
    a = np.zeros(12)
    a[2] = 1.0 - rho
    a[8] = -rho
    H = 2.0 * (weights.net_wrench * M.T @ M + weights.ankle_torque * ankle
               + weights.pressure_ratio * np.outer(a, a))
    g = -2.0 * weights.net_wrench * M.T @ w0
    U = np.zeros((34, 12))
    U[:16, :6] = build_cwc(left)
    U[16:32, 6:] = build_cwc(right)
    U[32, 2] = -1.0
    U[33, 8] = -1.0
    b = np.zeros(34)
    b[32] = -left.p_min
    b[33] = -right.p_min
    x0 = np.zeros(12)
    x0[2] = max(left.p_min, 1.0) * 1.01
    x0[8] = max(right.p_min, 1.0) * 1.01
    problem = QpProblem(H=0.5 * (H + H.T), g=g, A_ineq=U, b_ineq=b)
    sol = solver.solve(problem, x0=x0)
    if not sol.optimal:
        return _infeasible_result(w_net, sol.status)
    x = sol.x
    w_l = Wrench6.from_vector(x[:6], left.frame)
    w_r = Wrench6.from_vector(x[6:], right.frame)
    if zmp_height is None:
        zmp_height = 0.5 * (left.pose.translation[2] + right.pose.translation[2])
    cost = problem.objective(x) + weights.net_wrench * float(w0 @ w0)
    return DistributionResult(
        w_l, w_r, _net_zmp((w_l, w_r), (left, right), zmp_height),
        _cop_or_zero(w_l), _cop_or_zero(w_r), float(x[2]), float(x[8]),
        sol.status, cost)


def saturate_single(w_net: Wrench6, support: ContactSpec, zmp_height: float = None,
                    solver: QpSolver = None, support_is_left: bool = None,
                    ) -> DistributionResult:
    """Project the net wrench onto the contact wrench cone of the support foot."""
    if w_net.frame is not FrameId.WORLD:
        raise ValueError("net wrench must be expressed in the world frame")
    if support_is_left is None:
        support_is_left = support.frame in (FrameId.LEFT_SOLE, FrameId.LEFT_ANKLE)
    solver = solver or QpSolver()
    w0 = w_net.vector()
    M = wrench_transform_matrix(support.pose)
    U = np.vstack([build_cwc(support), [[0, 0, -1.0, 0, 0, 0]]])
    b = np.zeros(17)
    b[16] = -support.p_min
    problem = QpProblem(H=2.0 * M.T @ M, g=-2.0 * M.T @ w0, A_ineq=U, b_ineq=b)
    # the unconstrained optimum is the net wrench itself
    x_free = np.linalg.solve(M, w0)
    x0 = np.zeros(6)
    x0[2] = max(support.p_min, 1.0) * 1.01
    if np.all(U @ x_free <= b + 1e-12):
        x, status = x_free, QpStatus.OPTIMAL
    else:
        sol = solver.solve(problem, x0=x0)
        x, status = sol.x, sol.status
        if not sol.optimal:
            return _infeasible_result(w_net, status)
    w = Wrench6.from_vector(x, support.frame)
    if zmp_height is None:
        zmp_height = support.pose.translation[2]
    z_qp = _net_zmp((w,), (support,), zmp_height)
    cost = problem.objective(x) + float(w0 @ w0)
    cop, pressure = _cop_or_zero(w), float(x[2])
    zl, zr = Wrench6.zero(FrameId.LEFT_SOLE), Wrench6.zero(FrameId.RIGHT_SOLE)
    if support_is_left:
        return DistributionResult(w, zr, z_qp, cop, np.zeros(3), pressure, 0.0, status, cost)
    return DistributionResult(zl, w, z_qp, np.zeros(3), cop, 0.0, pressure, status, cost)
