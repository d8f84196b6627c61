"""Walking pattern generation over a predefined footstep plan.

The plan is turned into a schedule of gait phases, from which we derive the
reference ZMP (straight lines between ankle frames), swing-foot trajectories
and pressure ratios. Reference CoM/DCM/ZMP trajectories come from a linear
model predictive controller on the jerk of a triple integrator, re-solved
every sampling period and integrated open loop in between.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull

from .errors import EmptyPlan, OutOfPhase, QpInfeasible
from .qpsolve import QpProblem, QpSolver
from .spatial import Transform


class Foot(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def other(self) -> "Foot":
        return Foot.RIGHT if self is Foot.LEFT else Foot.LEFT


class PhaseKind(enum.Enum):
    STANDING = "standing"
    DOUBLE_SUPPORT = "double_support"
    SINGLE_SUPPORT = "single_support"


@dataclass(frozen=True)
class Footstep:

    sole_pose: Transform
    foot: Foot
    half_length: float = 0.112
    half_width: float = 0.065

    def __post_init__(self):
        if not (self.half_length > 0 and self.half_width > 0):
            raise ValueError("sole half-extents must be positive")

    @property
    def position(self) -> np.ndarray:
        return self.sole_pose.translation

    def corners(self, margin: float = 0.0) -> np.ndarray:
        """Sole rectangle corners in world x-y, shrunk by ``margin``."""
        X, Y = self.half_length - margin, self.half_width - margin
        local = np.array([[X, Y, 0.0], [X, -Y, 0.0], [-X, -Y, 0.0], [-X, Y, 0.0]])
        return (local @ self.sole_pose.rotation.T + self.sole_pose.translation)[:, :2]


@dataclass(frozen=True)
class GaitPhase:

    """One interval of the contact schedule.

    ``left`` and ``right`` are the footholds of each foot during the phase;
    in single support the swing foot travels from ``swing_from`` to
    ``swing_to``. Pressure ratios (fraction of pressure on the left foot) go
    linearly from ``rho_init`` to ``rho_end`` over double support.
    """

    kind: PhaseKind
    t_start: float
    duration: float
    left: Footstep
    right: Footstep
    support: frozenset = frozenset({Foot.LEFT, Foot.RIGHT})
    rho_init: float = None
    rho_end: float = None
    swing_from: Footstep = None
    swing_to: Footstep = None
    zmp_from: np.ndarray = None
    zmp_to: np.ndarray = None

    def __post_init__(self):
        if self.kind is PhaseKind.DOUBLE_SUPPORT:
            if not self.duration > 0:
                raise ValueError("double support needs a positive duration")
            if self.rho_init is None:
                raise ValueError("double support needs rho_init")
            if self.rho_end is None:
                object.__setattr__(self, "rho_end", 1.0 - self.rho_init)
        elif self.rho_init is not None and self.kind is PhaseKind.SINGLE_SUPPORT:
            raise ValueError("rho_init is only defined in double support")

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration

    @property
    def swing_foot(self):
        if self.kind is not PhaseKind.SINGLE_SUPPORT:
            return None
        return next(iter({Foot.LEFT, Foot.RIGHT} - set(self.support)))

    def foothold(self, foot: Foot) -> Footstep:
        return self.left if foot is Foot.LEFT else self.right


def pressure_ratio(phase: GaitPhase, t: float) -> float:
    """Prescribed fraction of the total pressure on the left foot."""
    if phase.kind is PhaseKind.STANDING:
        return 0.5 if phase.rho_init is None else phase.rho_init
    if phase.kind is not PhaseKind.DOUBLE_SUPPORT:
        raise OutOfPhase("pressure ratio is only defined in double support")
    if not phase.t_start - 1e-12 <= t <= phase.t_end + 1e-12:
        raise OutOfPhase(f"t={t} outside phase [{phase.t_start}, {phase.t_end}]")
    s = min(max((t - phase.t_start) / phase.duration, 0.0), 1.0)
    return (1.0 - s) * phase.rho_init + s * phase.rho_end


@dataclass(frozen=True)
class FootstepPlan:

    """Initial stance plus a sequence of footsteps, each taken by one foot."""

    initial_left: Footstep
    initial_right: Footstep
    steps: tuple = ()
    single_support: float = 1.4
    double_support: float = 0.2
    initial_standing: float = 1.0
    final_standing: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.initial_left.foot is not Foot.LEFT or self.initial_right.foot is not Foot.RIGHT:
            raise ValueError("initial stance must be one left and one right footstep")
        if self.single_support <= 0 or self.double_support <= 0:
            raise ValueError("phase durations must be positive")
        for prev, nxt in zip(self.steps, self.steps[1:]):
            if prev.foot is nxt.foot:
                raise ValueError("footsteps must alternate between feet")

    @property
    def duration(self) -> float:
        return self.phases()[-1].t_end

    def phases(self) -> list:
        return build_phases(self)


def _midpoint(a: Footstep, b: Footstep) -> np.ndarray:
    return 0.5 * (a.position + b.position)


def build_phases(plan: FootstepPlan) -> list:
    """Contact schedule of a footstep plan."""
    left, right = plan.initial_left, plan.initial_right
    t = 0.0
    phases = []
    if plan.initial_standing > 0:
        mid = _midpoint(left, right)
        phases.append(GaitPhase(PhaseKind.STANDING, t, plan.initial_standing, left, right,
                                rho_init=0.5, zmp_from=mid, zmp_to=mid))
        t += plan.initial_standing
    if not plan.steps:
        if not phases:
            raise EmptyPlan("plan has neither footsteps nor standing time")
        return phases
    first_support = plan.steps[0].foot.other
    target = (left if first_support is Foot.LEFT else right).position
    phases.append(GaitPhase(
        PhaseKind.DOUBLE_SUPPORT, t, plan.double_support, left, right,
        rho_init=0.5, rho_end=1.0 if first_support is Foot.LEFT else 0.0,
        zmp_from=_midpoint(left, right), zmp_to=target))
    t += plan.double_support
    for i, step in enumerate(plan.steps):
        support = step.foot.other
        support_step = left if support is Foot.LEFT else right
        swing_from = right if support is Foot.LEFT else left
        phases.append(GaitPhase(
            PhaseKind.SINGLE_SUPPORT, t, plan.single_support, left, right,
            support=frozenset({support}), swing_from=swing_from, swing_to=step,
            zmp_from=support_step.position, zmp_to=support_step.position))
        t += plan.single_support
        if step.foot is Foot.LEFT:
            left = step
        else:
            right = step
        rho_init = 1.0 if support is Foot.LEFT else 0.0
        if i + 1 < len(plan.steps):
            next_support = plan.steps[i + 1].foot.other
            target = (left if next_support is Foot.LEFT else right).position
            rho_end = 1.0 - rho_init
        else:
            target = _midpoint(left, right)
            rho_end = 0.5
        phases.append(GaitPhase(
            PhaseKind.DOUBLE_SUPPORT, t, plan.double_support, left, right,
            rho_init=rho_init, rho_end=rho_end,
            zmp_from=support_step.position, zmp_to=target))
        t += plan.double_support
    mid = _midpoint(left, right)
    phases.append(GaitPhase(PhaseKind.STANDING, t, plan.final_standing, left, right,
                            rho_init=0.5, zmp_from=mid, zmp_to=mid))
    return phases


class PhaseSchedule:

    """Time lookup over a list of phases; times past the end map to the last phase."""

    def __init__(self, phases):
        if not phases:
            raise EmptyPlan("no phases")
        self.phases = list(phases)
        self._starts = np.array([p.t_start for p in self.phases])

    @property
    def duration(self) -> float:
        return self.phases[-1].t_end

    def index_at(self, t: float, side: str = "right") -> int:
        """Phase index at ``t``; ``side="left"`` picks the phase ending at ``t``."""
        if side == "left":
            i = int(np.searchsorted(self._starts, t - 1e-9, side="right")) - 1
        else:
            i = int(np.searchsorted(self._starts, t + 1e-9, side="right")) - 1
        return min(max(i, 0), len(self.phases) - 1)

    def at(self, t: float, side: str = "right") -> GaitPhase:
        return self.phases[self.index_at(t, side)]


def zmp_reference(phases) -> "ZmpReference":
    """Reference ZMP: piecewise-linear path through the ankle frames."""
    if not phases:
        raise EmptyPlan("cannot build a ZMP reference without phases")
    return ZmpReference(PhaseSchedule(phases))


class ZmpReference:

    def __init__(self, schedule: PhaseSchedule):
        self.schedule = schedule

    def __call__(self, t: float) -> np.ndarray:
        phase = self.schedule.at(t)
        s = (t - phase.t_start) / phase.duration
        s = min(max(s, 0.0), 1.0)
        return (1.0 - s) * phase.zmp_from + s * phase.zmp_to


def support_polygon(phase: GaitPhase, margin: float = 0.0):
    """Half-planes ``(G, h)`` with ``G @ p <= h`` for the support area of a phase."""
    if phase.kind is PhaseKind.SINGLE_SUPPORT:
        foot = next(iter(phase.support))
        points = phase.foothold(foot).corners(margin)
    else:
        points = np.vstack([phase.left.corners(margin), phase.right.corners(margin)])
    return _hull_halfplanes(points)


def _hull_halfplanes(points):
    hull = ConvexHull(points)
    eq = hull.equations
    G = eq[:, :2]
    h = -eq[:, 2]
    norms = np.linalg.norm(G, axis=1)
    return G / norms[:, None], h / norms


def point_in_polygon(G, h, p, tol=1e-9) -> bool:
    return bool(np.all(G @ np.asarray(p)[:2] <= h + tol))


@dataclass(frozen=True)
class SwingSample:

    pose: Transform
    velocity: np.ndarray
    acceleration: np.ndarray


def _smoothstep5(s):
    """Quintic 0-to-1 profile with zero velocity and acceleration at both ends."""
    if s <= 0.0:
        return 0.0, 0.0, 0.0
    if s >= 1.0:
        return 1.0, 0.0, 0.0
    return (10 * s**3 - 15 * s**4 + 6 * s**5,
            30 * s**2 - 60 * s**3 + 30 * s**4,
            60 * s - 180 * s**2 + 120 * s**3)


def _hermite3(u):
    return 3 * u**2 - 2 * u**3, 6 * u - 6 * u**2, 6 - 12 * u


def swing_trajectory(start: Transform, end: Transform, apex_height: float, duration: float,
                     t: float, horizontal_window=(0.25, 0.75)) -> SwingSample:
    """Swing-foot pose, velocity and acceleration at time ``t`` into the swing.

    Vertically, a cubic Hermite lift to ``apex_height`` above the higher
    endpoint at mid-swing followed by a cubic Hermite landing, both at rest at
    their ends. Horizontal position and yaw follow a quintic profile over the
    given fraction of the swing, so the foot rises before moving forward.
    """
    if not -1e-12 <= t <= duration + 1e-12:
        raise OutOfPhase(f"t={t} outside swing of duration {duration}")
    t = min(max(t, 0.0), duration)
    tau = t / duration
    p0, p1 = start.translation, end.translation
    z_top = max(p0[2], p1[2]) + apex_height
    if tau <= 0.5:
        u = tau / 0.5
        s, ds, dds = _hermite3(u)
        z0, z1 = p0[2], z_top
    else:
        u = (tau - 0.5) / 0.5
        s, ds, dds = _hermite3(u)
        z0, z1 = z_top, p1[2]
    z = z0 + (z1 - z0) * s
    vz = (z1 - z0) * ds / (0.5 * duration)
    az = (z1 - z0) * dds / (0.5 * duration) ** 2
    w0, w1 = horizontal_window
    width = (w1 - w0) * duration
    h, dh, ddh = _smoothstep5((tau - w0) / (w1 - w0))
    delta = p1[:2] - p0[:2]
    xy = p0[:2] + h * delta
    vxy = dh / width * delta
    axy = ddh / width**2 * delta
    yaw0, yaw1 = start.yaw, end.yaw
    dyaw = math.atan2(math.sin(yaw1 - yaw0), math.cos(yaw1 - yaw0))
    pose = Transform.from_pose([xy[0], xy[1], z], yaw=yaw0 + h * dyaw)
    return SwingSample(pose, np.array([vxy[0], vxy[1], vz]), np.array([axy[0], axy[1], az]))


@dataclass(frozen=True)
class MpcParams:

    omega: float
    com_height: float = 0.78
    horizon: int = 16
    sampling_period: float = 0.1
    zmp_weight: float = 1000.0
    velocity_weight: float = 10.0
    jerk_weight: float = 1.0
    zmp_margin: float = 0.02


@dataclass(frozen=True)
class MpcSolveRecord:

    t: float
    terminal_dcm_error: float
    terminal_zmp_error: float
    min_polygon_slack: float
    iterations: int


def triple_integrator(T: float):
    A = np.array([[1.0, T, T**2 / 2], [0.0, 1.0, T], [0.0, 0.0, 1.0]])
    B = np.array([T**3 / 6, T**2 / 2, T])
    return A, B


class LinearMpc:

    """Jerk-input MPC of the LIPM over a fixed horizon.

    Decision variables are the x then y jerks over ``horizon`` samples.
    """

    def __init__(self, params: MpcParams, schedule: PhaseSchedule, zmp_ref: ZmpReference,
                 velocity_ref, solver: QpSolver = None):
        self.params = params
        self.schedule = schedule
        self.zmp_ref = zmp_ref
        self.velocity_ref = np.asarray(velocity_ref, dtype=float)[:2]
        self.solver = solver or QpSolver(max_iter=500)
        N, T, w = params.horizon, params.sampling_period, params.omega
        A, B = triple_integrator(T)
        P = np.zeros((N, 3, 3))
        U = np.zeros((N, 3, N))
        Ak = np.eye(3)
        for k in range(N):
            Ak = A @ Ak
            P[k] = Ak
        for k in range(N):
            for i in range(k + 1):
                U[k, :, i] = np.linalg.matrix_power(A, k - i) @ B
        self.P_pos, self.P_vel, self.P_acc = P[:, 0, :], P[:, 1, :], P[:, 2, :]
        self.U_pos, self.U_vel, self.U_acc = U[:, 0, :], U[:, 1, :], U[:, 2, :]
        self.P_zmp = self.P_pos - self.P_acc / w**2
        self.U_zmp = self.U_pos - self.U_acc / w**2
        self._poly_cache = {}

    def _polygons(self, t):
        """Half-planes valid at ``t``: both adjacent phases at a boundary."""
        idx = {self.schedule.index_at(t, "left"), self.schedule.index_at(t, "right")}
        Gs, hs = [], []
        for i in sorted(idx):
            if i not in self._poly_cache:
                self._poly_cache[i] = support_polygon(self.schedule.phases[i],
                                                      self.params.zmp_margin)
            G, h = self._poly_cache[i]
            Gs.append(G)
            hs.append(h)
        return np.vstack(Gs), np.concatenate(hs)

    def build_problem(self, t0, state_x, state_y):
        p = self.params
        N, T, w = p.horizon, p.sampling_period, p.omega
        times = t0 + T * np.arange(1, N + 1)
        zref = np.array([self.zmp_ref(t)[:2] for t in times])
        n = 2 * N
        H = np.zeros((n, n))
        g = np.zeros(n)
        A_eq = np.zeros((4, n))
        b_eq = np.zeros(4)
        for axis, s0 in enumerate((state_x, state_y)):
            sl = slice(axis * N, (axis + 1) * N)
            z_free = self.P_zmp @ s0
            v_free = self.P_vel @ s0
            H[sl, sl] = 2 * (p.zmp_weight * self.U_zmp.T @ self.U_zmp
                             + p.velocity_weight * self.U_vel.T @ self.U_vel
                             + p.jerk_weight * np.eye(N))
            g[sl] = 2 * (p.zmp_weight * self.U_zmp.T @ (z_free - zref[:, axis])
                         + p.velocity_weight * self.U_vel.T @ (v_free - self.velocity_ref[axis]))
            A_eq[2 * axis, sl] = self.U_zmp[-1]
            b_eq[2 * axis] = zref[-1, axis] - z_free[-1]
            dcm_row = self.U_pos[-1] + self.U_vel[-1] / w
            A_eq[2 * axis + 1, sl] = dcm_row
            b_eq[2 * axis + 1] = zref[-1, axis] - (self.P_pos[-1] + self.P_vel[-1] / w) @ s0
        rows, rhs, owners = [], [], []
        for k, t in enumerate(times):
            G, h = self._polygons(t)
            zx_free = self.P_zmp[k] @ state_x
            zy_free = self.P_zmp[k] @ state_y
            for j in range(G.shape[0]):
                row = np.zeros(n)
                row[:N] = G[j, 0] * self.U_zmp[k]
                row[N:] = G[j, 1] * self.U_zmp[k]
                rows.append(row)
                rhs.append(h[j] - G[j, 0] * zx_free - G[j, 1] * zy_free)
                owners.append(k)
        problem = QpProblem(H=0.5 * (H + H.T), g=g, A_eq=A_eq, b_eq=b_eq,
                            A_ineq=np.array(rows), b_ineq=np.array(rhs))
        return problem, zref, np.array(owners)

    def solve(self, t0, state_x, state_y):
        """Optimal jerks ``(jerk_x, jerk_y)`` over the horizon starting at ``t0``."""
        problem, zref, owners = self.build_problem(t0, np.asarray(state_x, float),
                                                   np.asarray(state_y, float))
        sol = self.solver.solve(problem)
        if not sol.optimal:
            C, d = problem.stacked_inequalities()
            viol = C @ sol.x - d
            k = int(owners[int(np.argmax(viol))]) if viol.size else None
            raise QpInfeasible(
                f"pattern QP {sol.status.value} at t={t0:.3f} s (sample {k})", sample_index=k)
        N = self.params.horizon
        jx, jy = sol.x[:N], sol.x[N:]
        w = self.params.omega
        sx = np.asarray(state_x, float)
        sy = np.asarray(state_y, float)
        errs_dcm, errs_zmp = [], []
        for axis, (s0, j) in enumerate(((sx, jx), (sy, jy))):
            cN = self.P_pos[-1] @ s0 + self.U_pos[-1] @ j
            vN = self.P_vel[-1] @ s0 + self.U_vel[-1] @ j
            zN = self.P_zmp[-1] @ s0 + self.U_zmp[-1] @ j
            errs_dcm.append(cN + vN / w - zref[-1, axis])
            errs_zmp.append(zN - zref[-1, axis])
        C, d = problem.stacked_inequalities()
        record = MpcSolveRecord(
            float(t0), float(np.hypot(*errs_dcm)), float(np.hypot(*errs_zmp)),
            float((d - C @ sol.x).min()), sol.iterations)
        return jx, jy, record


@dataclass
class WalkingPattern:

    """Reference trajectories sampled at the control period.

    Arrays have one row per control cycle. ``zmp`` carries the reference ZMP
    with its z-coordinate set to the height of the reference ZMP plane.
    """

    dt: float
    omega: float
    t: np.ndarray
    com: np.ndarray
    comd: np.ndarray
    comdd: np.ndarray
    dcm: np.ndarray
    dcmd: np.ndarray
    zmp: np.ndarray
    zmp_ideal: np.ndarray
    phase_index: np.ndarray
    rho: np.ndarray
    foot_pos: dict
    foot_vel: dict
    foot_acc: dict
    phases: list
    mpc_records: list = field(default_factory=list)

    def __len__(self):
        return len(self.t)

    @cached_property
    def schedule(self) -> PhaseSchedule:
        return PhaseSchedule(self.phases)

    def phase(self, k: int) -> GaitPhase:
        return self.phases[int(self.phase_index[k])]


def _com_height_profile(phases, com_height):
    """Vertical CoM reference: lifts during the second half of single support."""
    def base_height(phase):
        return min(phase.left.position[2], phase.right.position[2])

    def profile(t):
        sched_phase = None
        for phase in phases:
            if phase.t_start - 1e-9 <= t < phase.t_end - 1e-9:
                sched_phase = phase
                break
        if sched_phase is None:
            sched_phase = phases[-1] if t >= phases[-1].t_start else phases[0]
        before = base_height(sched_phase)
        if sched_phase.kind is not PhaseKind.SINGLE_SUPPORT:
            return before + com_height, 0.0, 0.0
        after_left = sched_phase.swing_to if sched_phase.swing_foot is Foot.LEFT else sched_phase.left
        after_right = sched_phase.swing_to if sched_phase.swing_foot is Foot.RIGHT else sched_phase.right
        after = min(after_left.position[2], after_right.position[2])
        half = 0.5 * sched_phase.duration
        s = (t - sched_phase.t_start - half) / half
        h, dh, ddh = _smoothstep5(s)
        dz = after - before
        return before + com_height + h * dz, dh * dz / half, ddh * dz / half**2
    return profile


def mpc_generate(plan, params: MpcParams, initial_com=None, dt: float = 0.005,
                 apex_height: float = 0.24, swing_window=(0.25, 0.75),
                 solver: QpSolver = None) -> WalkingPattern:
    """Generate the full walking pattern of a plan by receding-horizon MPC.

    ``plan`` is a :class:`FootstepPlan` or a list of phases. The initial CoM
    defaults to rest above the initial reference ZMP.
    """
    phases = plan.phases() if isinstance(plan, FootstepPlan) else list(plan)
    if not phases:
        raise EmptyPlan("no phases to generate a pattern for")
    schedule = PhaseSchedule(phases)
    zref = zmp_reference(phases)
    duration = schedule.duration
    ratio = params.sampling_period / dt
    substeps = int(round(ratio))
    if abs(ratio - substeps) > 1e-9:
        raise ValueError("MPC sampling period must be a multiple of the control period")
    p_start, p_end = zref(0.0), zref(duration)
    velocity_ref = (p_end - p_start) / duration
    mpc = LinearMpc(params, schedule, zref, velocity_ref, solver)

    if initial_com is None:
        initial_com = np.array([p_start[0], p_start[1], 0.0])
    sx = np.array([initial_com[0], 0.0, 0.0])
    sy = np.array([initial_com[1], 0.0, 0.0])
    A, B = triple_integrator(dt)
    n_samples = int(round(duration / dt)) + 1
    w = params.omega
    com = np.zeros((n_samples, 3))
    comd = np.zeros((n_samples, 3))
    comdd = np.zeros((n_samples, 3))
    records = []
    height = _com_height_profile(phases, params.com_height)
    jx = jy = 0.0
    for k in range(n_samples):
        t = k * dt
        if k % substeps == 0 and k < n_samples - 1:
            jerks_x, jerks_y, record = mpc.solve(t, sx, sy)
            jx, jy = jerks_x[0], jerks_y[0]
            records.append(record)
        cz, czd, czdd = height(t)
        com[k] = (sx[0], sy[0], cz)
        comd[k] = (sx[1], sy[1], czd)
        comdd[k] = (sx[2], sy[2], czdd)
        sx = A @ sx + B * jx
        sy = A @ sy + B * jy

    t_arr = dt * np.arange(n_samples)
    zmp = np.zeros((n_samples, 3))
    zmp[:, :2] = com[:, :2] - comdd[:, :2] / w**2
    zmp_ideal = np.array([zref(t) for t in t_arr])
    zmp[:, 2] = zmp_ideal[:, 2]
    dcm = np.zeros((n_samples, 3))
    dcm[:, :2] = com[:, :2] + comd[:, :2] / w
    dcmd = np.zeros((n_samples, 3))
    dcmd[:, :2] = w * (dcm[:, :2] - zmp[:, :2])
    phase_index = np.array([schedule.index_at(t) for t in t_arr])
    rho = np.array([
        pressure_ratio(phases[i], min(max(t, phases[i].t_start), phases[i].t_end))
        if phases[i].kind is not PhaseKind.SINGLE_SUPPORT else np.nan
        for i, t in zip(phase_index, t_arr)])

    foot_pos = {f: np.zeros((n_samples, 3)) for f in Foot}
    foot_vel = {f: np.zeros((n_samples, 3)) for f in Foot}
    foot_acc = {f: np.zeros((n_samples, 3)) for f in Foot}
    for k, (i, t) in enumerate(zip(phase_index, t_arr)):
        phase = phases[i]
        for f in Foot:
            if phase.swing_foot is f:
                sample = swing_trajectory(phase.swing_from.sole_pose, phase.swing_to.sole_pose,
                                          apex_height, phase.duration,
                                          min(t - phase.t_start, phase.duration), swing_window)
                foot_pos[f][k] = sample.pose.translation
                foot_vel[f][k] = sample.velocity
                foot_acc[f][k] = sample.acceleration
            else:
                foot_pos[f][k] = phase.foothold(f).position
    return WalkingPattern(dt, w, t_arr, com, comd, comdd, dcm, dcmd, zmp, zmp_ideal,
                          phase_index, rho, foot_pos, foot_vel, foot_acc, phases, records)
