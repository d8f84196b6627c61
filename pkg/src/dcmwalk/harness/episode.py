"""Closed-loop episode: pattern, DCM feedback, distribution, admittance, plant."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..admittance import FootCommand, com_admittance, ffdc, foot_damping
from ..dcmctl import DcmFeedback, DcmMeasurement, DcmReference, net_wrench_from_zmp
from ..errors import EmptyLog, Fall, NumericalDivergence
from ..estimator import Estimator
from ..lipm import LipmParams
from ..pattern import Foot, MpcParams, PhaseKind, WalkingPattern, mpc_generate
from ..plant import FootTarget, Plant, PlantCommand
from ..qpsolve import QpSolver, QpStatus
from ..spatial import FrameId
from ..wrenchdist import ContactSpec, distribute_double, saturate_single
from .scenario import Scenario

log = logging.getLogger(__name__)

PHASE_CODE = {PhaseKind.STANDING: 0, PhaseKind.DOUBLE_SUPPORT: 1, PhaseKind.SINGLE_SUPPORT: 2}
STATUS_CODE = {QpStatus.OPTIMAL: 0, QpStatus.INFEASIBLE: 1, QpStatus.MAX_ITERATIONS: 2}

COLUMNS = (
    ["t", "phase", "qp_status", "qp_fallback", "zmp_valid"]
    + [f"{name}_{a}" for name in ("xi_d", "xi_m", "z_d", "z_cmd", "z_qp", "z_m") for a in "xy"]
    + [f"{name}_{a}" for name in ("c_d", "c_m", "c") for a in "xyz"]
    + [f"{name}_{side}" for name in ("f_qp", "f_m") for side in ("l", "r")]
    + [f"{name}_{side}_{a}" for name in ("cop_qp", "cop_m") for side in ("l", "r") for a in "xy"]
    + [f"{name}_{side}" for name in ("roll_rate", "pitch_rate", "vz_cmd") for side in ("l", "r")]
    + ["cdd_cmd_x", "cdd_cmd_y"]
)
_INDEX = {name: i for i, name in enumerate(COLUMNS)}


@dataclass
class SimLog:

    """One row per control cycle in the fixed ``COLUMNS`` order.

    Solve times are wall-clock measurements and are kept out of the CSV so
    that replays are byte-identical.
    """

    rows: np.ndarray
    columns: tuple = tuple(COLUMNS)
    solve_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    cycle_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    fall: Fall = None
    pattern: WalkingPattern = None

    def __len__(self):
        return self.rows.shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def vec(self, name: str, axes: str = "xy") -> np.ndarray:
        return np.column_stack([self[f"{name}_{a}"] for a in axes])

    def to_csv(self, path, timing: bool = False):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = list(self.columns) + (["solve_time_ms"] if timing else [])
            writer.writerow(header)
            for i, row in enumerate(self.rows):
                cells = [repr(float(v)) for v in row]
                if timing:
                    cells.append(repr(float(self.solve_times[i] * 1e3)))
                writer.writerow(cells)

    @classmethod
    def from_csv(cls, path) -> "SimLog":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise EmptyLog(f"{path} is empty")
            data = [[float(v) for v in row] for row in reader]
        if not data:
            raise EmptyLog(f"{path} has no rows")
        arr = np.array(data)
        solve = np.zeros(len(arr))
        if header[-1] == "solve_time_ms":
            solve = arr[:, -1] / 1e3
            arr, header = arr[:, :-1], header[:-1]
        return cls(arr, tuple(header), solve)


def _contact_spec(step, scenario: Scenario, foot: Foot) -> ContactSpec:
    frame = FrameId.LEFT_SOLE if foot is Foot.LEFT else FrameId.RIGHT_SOLE
    return ContactSpec(step.sole_pose, step.half_length, step.half_width,
                       scenario.sole.friction, scenario.sole.p_min, frame)


def generate_pattern(scenario: Scenario) -> WalkingPattern:
    s = scenario
    params = MpcParams(omega=s.robot.omega, com_height=s.robot.com_height,
                       horizon=s.mpc.horizon, sampling_period=s.mpc.sampling_period,
                       zmp_weight=s.mpc.zmp_weight, velocity_weight=s.mpc.velocity_weight,
                       jerk_weight=s.mpc.jerk_weight, zmp_margin=s.mpc.zmp_margin)
    return mpc_generate(s.plan, params, dt=s.dt, apex_height=s.swing.apex_height,
                        swing_window=(s.swing.window_start, s.swing.window_end))


class Stabilizer:

    """Per-cycle controller: DCM feedback, wrench distribution, admittance."""

    def __init__(self, scenario: Scenario, pattern: WalkingPattern):
        self.s = scenario
        self.pattern = pattern
        self.lipm = LipmParams(scenario.robot.mass, scenario.robot.com_height,
                               scenario.robot.gravity)
        self.dcm = DcmFeedback(scenario.dcm, self.lipm.omega, scenario.dt)
        self.double_solver = QpSolver(max_iter=200)
        self.single_solver = QpSolver(max_iter=200)
        self.last_result = None
        self.failures = 0
        self.altitude = {f: pattern.foot_pos[f][0][2] for f in Foot}
        self.prev_phase = -1
        self.lead = int(round(scenario.swing.lead / scenario.dt))

    def _distribute(self, phase, w_net, rho, height, meas):
        s = self.s
        left = _contact_spec(phase.left, s, Foot.LEFT)
        right = _contact_spec(phase.right, s, Foot.RIGHT)
        if phase.kind is PhaseKind.SINGLE_SUPPORT:
            foot = next(iter(phase.support))
            spec = left if foot is Foot.LEFT else right
            return saturate_single(w_net, spec, height, self.single_solver, foot is Foot.LEFT)
        return distribute_double(w_net, left, right, rho, s.distribution, height,
                                 self.double_solver)

    def _fallback(self, phase, w_net, height, meas):
        """Hold the last distribution briefly, then saturate on the loaded foot."""
        self.failures += 1
        if self.last_result is not None and self.failures <= 3:
            return self.last_result
        foot = max(Foot, key=lambda f: meas.pressures[f])
        spec = _contact_spec(phase.foothold(foot), self.s, foot)
        return saturate_single(w_net, spec, height, self.single_solver, foot is Foot.LEFT)

    def step(self, k: int, meas):
        s, pat = self.s, self.pattern
        phase = pat.phase(k)
        pidx = int(pat.phase_index[k])
        height = float(pat.zmp[k, 2])
        ref = DcmReference(pat.dcm[k], pat.zmp[k], pat.dcmd[k])
        short_single = (phase.kind is PhaseKind.SINGLE_SUPPORT
                        and phase.duration < 2 * s.dt)
        z_cmd = self.dcm(ref, DcmMeasurement(meas.dcm, meas.zmp),
                         integrate=not (short_single or self.failures > 0))
        c_app = np.array([meas.c[0], meas.c[1], height + self.lipm.com_height])
        w_net = net_wrench_from_zmp(c_app, z_cmd, self.lipm)

        t0 = time.perf_counter()
        rho = 0.5 if np.isnan(pat.rho[k]) else float(pat.rho[k])
        result = self._distribute(phase, w_net, rho, height, meas)
        fallback = 0
        if result.ok:
            self.failures = 0
            self.last_result = result
        else:
            fallback = 1
            status = result.status
            result = self._fallback(phase, w_net, height, meas)
            result_status = status
        solve_time = time.perf_counter() - t0

        gains = s.admittance
        wrench_qp = {Foot.LEFT: result.w_left, Foot.RIGHT: result.w_right}
        cop_qp = {Foot.LEFT: result.cop_left, Foot.RIGHT: result.cop_right}
        contact = set(phase.support) if phase.kind is PhaseKind.SINGLE_SUPPORT else set(Foot)
        if pidx != self.prev_phase:
            # altitudes restart from the footholds at each contact change
            for f in Foot:
                self.altitude[f] = phase.foothold(f).position[2]
            self.prev_phase = pidx
        commands = {}
        for f in Foot:
            if f in contact:
                w_m = meas.wrenches[f]
                rr, pr = foot_damping(cop_qp[f], w_m.force, w_m.torque, gains)
                commands[f] = FootCommand(f, rr, pr, 0.0)
            else:
                commands[f] = FootCommand(f)
        if len(contact) == 2:
            p_d = tuple(phase.foothold(f).position[2] for f in Foot)
            v = ffdc((0.0, 0.0), tuple(wrench_qp[f].force[2] for f in Foot),
                     tuple(meas.pressures[f] for f in Foot), p_d,
                     tuple(self.altitude[f] for f in Foot), gains)
            for f, vz in zip(Foot, v):
                c = commands[f]
                commands[f] = FootCommand(f, c.roll_rate, c.pitch_rate, vz)
        commands = {f: c.clamped(gains) for f, c in commands.items()}

        targets = {}
        for f in Foot:
            if f in contact:
                hold = phase.foothold(f).position.copy()
                if len(contact) == 2:
                    self.altitude[f] += commands[f].vertical_velocity * s.dt
                    hold[2] = self.altitude[f]
                    targets[f] = FootTarget(hold, np.array([0.0, 0.0, commands[f].vertical_velocity]),
                                            stiffness=1.0, damping=300.0,
                                            ankle_rates=(commands[f].roll_rate,
                                                         commands[f].pitch_rate))
                else:
                    targets[f] = FootTarget(hold, stiffness=1000.0, damping=300.0,
                                            ankle_rates=(commands[f].roll_rate,
                                                         commands[f].pitch_rate))
            else:
                j = min(k + self.lead, len(pat) - 1)
                targets[f] = FootTarget(pat.foot_pos[f][j].copy(), pat.foot_vel[f][j].copy(),
                                        pat.foot_acc[f][j].copy(), stiffness=1000.0,
                                        reset_ankle=True)

        valid = meas.zmp is not None and result.ok and not np.isnan(result.z_qp).any()
        cdd = com_admittance(pat.comdd[k], meas.zmp, result.z_qp, gains, valid)
        cmd = PlantCommand(pat.com[k].copy(), pat.comd[k].copy(), cdd,
                           targets[Foot.LEFT], targets[Foot.RIGHT])

        nan2 = (np.nan, np.nan)

        def xy(v):
            return nan2 if v is None else (float(v[0]), float(v[1]))

        z_m = meas.zmp
        row = ([k * s.dt, PHASE_CODE[phase.kind],
                STATUS_CODE[result.status if not fallback else result_status], fallback,
                int(z_m is not None)]
               + [*xy(pat.dcm[k]), *xy(meas.dcm), *xy(pat.zmp[k]), *xy(z_cmd),
                  *xy(result.z_qp), *xy(z_m)]
               + [*pat.com[k], *meas.c])
        extra = dict(
            f_qp=(result.pressure_left, result.pressure_right),
            f_m=(meas.pressures[Foot.LEFT], meas.pressures[Foot.RIGHT]),
            cop_qp=(cop_qp[Foot.LEFT], cop_qp[Foot.RIGHT]),
            cop_m=(meas.cops[Foot.LEFT], meas.cops[Foot.RIGHT]),
            commands=commands, cdd=cdd)
        return cmd, row, extra, solve_time


def run_episode(scenario: Scenario, pattern: WalkingPattern = None, raise_on_fall: bool = False,
                ) -> SimLog:
    """Simulate a scenario and return its log.

    A fall (DCM error above the threshold, CoM collapse or numerical
    divergence) ends the episode early; it is recorded in ``SimLog.fall`` and
    raised when ``raise_on_fall`` is set.
    """
    s = scenario
    pattern = pattern if pattern is not None else generate_pattern(s)
    first = pattern.phases[0]
    plant = Plant.standing(first.left.sole_pose, first.right.sole_pose, s.plant, s.terrain,
                           com_xy=pattern.com[0, :2], disturbances=s.disturbances)
    omega = s.robot.omega
    est = Estimator(omega, s.dt, s.estimator.cutoff, s.noise, s.estimator.pressure_deadband)
    ctrl = Stabilizer(s, pattern)
    n = len(pattern)
    if s.duration is not None:
        n = min(n, int(round(s.duration / s.dt)) + 1)
    rows, solve_times, cycle_times = [], [], []
    fall = None
    for k in range(n):
        t_cycle = time.perf_counter()
        st = plant.state
        poses = {f: st.sole_pose(f) for f in Foot}
        wrenches = {f: st.feet[f].wrench for f in Foot}
        meas = est.measure(st.com.c, st.com.cdot, poses, wrenches, float(pattern.zmp[k, 2]))
        cmd, row, extra, solve_time = ctrl.step(k, meas)
        rows.append(_finish_row(row, st.com.c, extra))
        solve_times.append(solve_time)
        err = float(np.linalg.norm((meas.dcm - pattern.dcm[k])[:2]))
        if err > s.fall_threshold:
            fall = Fall(k * s.dt, f"DCM error {err:.3f} m above {s.fall_threshold} m")
        elif st.com.c[2] - pattern.zmp[k, 2] < 0.5 * s.robot.com_height:
            fall = Fall(k * s.dt, "CoM collapsed")
        if fall is None and k < n - 1:
            try:
                plant.step(cmd, s.dt)
            except NumericalDivergence as exc:
                fall = Fall(k * s.dt, str(exc))
        cycle_times.append(time.perf_counter() - t_cycle)
        if fall is not None:
            log.info("%s: %s", s.name, fall)
            break
    out = SimLog(np.array(rows, dtype=float), tuple(COLUMNS), np.array(solve_times),
                 np.array(cycle_times), fall, pattern)
    if fall is not None and raise_on_fall:
        raise fall
    return out


def _finish_row(row, c_true, extra):
    out = list(row)
    out.extend(float(v) for v in c_true)
    out.extend(extra["f_qp"])
    out.extend(extra["f_m"])
    for cops in (extra["cop_qp"], extra["cop_m"]):
        for cop in cops:
            out.extend((np.nan, np.nan) if cop is None else (float(cop[0]), float(cop[1])))
    cmds = extra["commands"]
    for attr in ("roll_rate", "pitch_rate", "vertical_velocity"):
        out.extend(getattr(cmds[f], attr) for f in Foot)
    out.extend((float(extra["cdd"][0]), float(extra["cdd"][1])))
    if len(out) != len(COLUMNS):
        raise AssertionError("log row does not match the column schema")
    return out
