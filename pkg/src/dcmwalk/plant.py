"""Reduced test plant: point-mass CoM on two massless compliant footplates.

The robot is position controlled: a kinematic CoM and two kinematic ankles are
servoed by PD-plus-feedforward laws and followed through a first-order
actuator lag. Between each ankle and its sole sits a roll/pitch flexure
(spring-damper). Soles touch horizontal terrain patches through four corner
spring-dampers. The true CoM is a point mass pushed by the contact forces:
vertically through the corner springs, horizontally as an inverted pendulum
pivoting on the pressure-weighted CoP. When the true CoM drifts from the
kinematic one, the whole body leans on the flexures, which shifts the CoP.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalDivergence
from .lipm import GRAVITY, LipmState
from .pattern import Foot
from .spatial import FrameId, Transform, Wrench6, rotation_rpy

_SOLE_FRAME = {Foot.LEFT: FrameId.LEFT_SOLE, Foot.RIGHT: FrameId.RIGHT_SOLE}


@dataclass(frozen=True)
class Patch:

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    height: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("patch must have positive area")

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


class Terrain:

    """Union of horizontal rectangular patches."""

    def __init__(self, patches):
        self.patches = tuple(patches)
        if not self.patches:
            raise ValueError("terrain needs at least one patch")
        for i, a in enumerate(self.patches):
            for b in self.patches[i + 1:]:
                if (min(a.x_max, b.x_max) > max(a.x_min, b.x_min)
                        and min(a.y_max, b.y_max) > max(a.y_min, b.y_min)):
                    raise ValueError("terrain patches overlap")

    @classmethod
    def flat(cls, height: float = 0.0, extent: float = 20.0) -> "Terrain":
        return cls([Patch(-extent, extent, -extent, extent, height)])

    @classmethod
    def stairs(cls, n: int, length: float, height: float, start: float = 0.12,
               width: float = 2.0, run_out: float = 5.0) -> "Terrain":
        """Flight of ``n`` steps whose first riser is at ``x = start``."""
        hw = 0.5 * width
        patches = [Patch(start - run_out, start, -hw, hw, 0.0)]
        for k in range(1, n + 1):
            x0 = start + (k - 1) * length
            x1 = x0 + length if k < n else x0 + run_out
            patches.append(Patch(x0, x1, -hw, hw, k * height))
        return cls(patches)

    def height_at(self, x: float, y: float) -> float:
        """Surface height under ``(x, y)``; ``-inf`` off the terrain.

        On a shared edge the higher patch wins.
        """
        h = -math.inf
        for p in self.patches:
            if p.contains(x, y) and p.height > h:
                h = p.height
        return h


@dataclass(frozen=True)
class ContactParams:

    stiffness: float = 1e5
    damping: float = 1e3
    friction: float = 0.7
    tangential_damping: float = 1e4
    half_length: float = 0.112
    half_width: float = 0.065

    def corner_offsets(self) -> np.ndarray:
        X, Y = self.half_length, self.half_width
        return np.array([[X, Y, 0.0], [X, -Y, 0.0], [-X, -Y, 0.0], [-X, Y, 0.0]])


def contact_wrench(pose: Transform, linear_velocity, angular_velocity, terrain: Terrain,
                   params: ContactParams = ContactParams(),
                   frame: FrameId = FrameId.LEFT_SOLE) -> Wrench6:
    """Ground wrench on a sole, in the sole frame at the sole center.

    Each corner below its surface gets a normal force ``k delta + d delta_dot``
    clamped at zero and a viscous tangential force clamped to the friction
    disc.
    """
    v = np.asarray(linear_velocity, dtype=float)
    omega = np.asarray(angular_velocity, dtype=float)
    center = pose.translation
    force = np.zeros(3)
    torque = np.zeros(3)
    for s in params.corner_offsets():
        r = pose.rotation @ s
        p = center + r
        depth = terrain.height_at(p[0], p[1]) - p[2]
        if not depth > 0.0:
            continue
        vc = v + np.cross(omega, r)
        fn = max(0.0, params.stiffness * depth - params.damping * vc[2])
        ft = -params.tangential_damping * vc[:2]
        norm = np.linalg.norm(ft)
        if norm > params.friction * fn:
            ft *= params.friction * fn / norm
        f = np.array([ft[0], ft[1], fn])
        force += f
        torque += np.cross(r, f)
    R = pose.rotation
    return Wrench6(R.T @ force, R.T @ torque, frame)


@dataclass(frozen=True)
class Disturbance:

    """External action over ``[t_start, t_start + duration]``.

    ``force`` acts on the CoM as a constant push. ``ankle_offset`` is a
    (roll, pitch) bias in radians added to the flexure rest angle of ``foot``
    with a half-sine profile.
    """

    t_start: float
    duration: float
    force: tuple = (0.0, 0.0, 0.0)
    foot: Foot = None
    ankle_offset: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("disturbance duration must be positive")

    @classmethod
    def impulse(cls, t_start: float, impulse, duration: float = 0.1) -> "Disturbance":
        if not duration > 0:
            raise ValueError("disturbance duration must be positive")
        return cls(t_start, duration, tuple(np.asarray(impulse, dtype=float) / duration))

    def active(self, t: float) -> bool:
        return self.t_start <= t < self.t_start + self.duration

    def window(self, t: float) -> float:
        if not self.active(t):
            return 0.0
        return math.sin(math.pi * (t - self.t_start) / self.duration)


@dataclass(frozen=True)
class PlantParams:

    mass: float = 40.0
    com_height: float = 0.78
    gravity: float = GRAVITY
    contact: ContactParams = ContactParams()
    flex_stiffness: float = 100.0
    flex_damping: float = 10.0
    actuator_lag: float = 0.05
    substep: float = 0.001
    com_stiffness: float = 25.0
    com_damping: float = None
    ankle_reset_time: float = 0.1
    divergence_bound: float = 100.0

    def __post_init__(self):
        if not (self.mass > 0 and self.com_height > 0 and self.substep > 0):
            raise ValueError("mass, height and substep must be positive")
        if self.actuator_lag < 0 or self.flex_stiffness < 0 or self.flex_damping < 0:
            raise ValueError("lag and flexure parameters must be non-negative")


@dataclass(frozen=True)
class FootTarget:

    """Servo target of one ankle and its ankle-joint rate commands."""

    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    acceleration: np.ndarray = field(default_factory=lambda: np.zeros(3))
    stiffness: float = 1000.0
    damping: float = None
    ankle_rates: tuple = (0.0, 0.0)
    reset_ankle: bool = False


@dataclass(frozen=True)
class PlantCommand:

    com_position: np.ndarray
    com_velocity: np.ndarray
    com_acceleration: np.ndarray
    left: FootTarget
    right: FootTarget

    def foot(self, f: Foot) -> FootTarget:
        return self.left if f is Foot.LEFT else self.right


@dataclass
class FootState:

    kin_pos: np.ndarray
    kin_vel: np.ndarray
    pos: np.ndarray
    yaw: float = 0.0
    ankle_kin: np.ndarray = field(default_factory=lambda: np.zeros(2))
    ankle: np.ndarray = field(default_factory=lambda: np.zeros(2))
    tilt: np.ndarray = field(default_factory=lambda: np.zeros(2))
    rest: np.ndarray = field(default_factory=lambda: np.zeros(2))
    sole_z: float = 0.0
    corner_forces: np.ndarray = field(default_factory=lambda: np.zeros(4))
    corner_depths: np.ndarray = field(default_factory=lambda: np.zeros(4))
    wrench: Wrench6 = None
    target_prev: np.ndarray = None


@dataclass
class PlantState:

    t: float
    com: LipmState
    com_kin_pos: np.ndarray
    com_kin_vel: np.ndarray
    com_act: np.ndarray
    feet: dict
    disturbances: tuple = ()

    def copy(self) -> "PlantState":
        return copy.deepcopy(self)

    def sole_pose(self, f: Foot) -> Transform:
        s = self.feet[f]
        return Transform(rotation_rpy(s.tilt[0], s.tilt[1], s.yaw),
                         np.array([s.pos[0], s.pos[1], s.sole_z]))


def apply_disturbance(state: PlantState, disturbance: Disturbance) -> PlantState:
    out = state.copy()
    out.disturbances = tuple(out.disturbances) + (disturbance,)
    return out


def _lag(tau: float, dt: float) -> float:
    return 1.0 if tau <= 0 else 1.0 - math.exp(-dt / tau)


class Plant:

    """Mutable plant integrator; :func:`plant_step` is its pure wrapper."""

    def __init__(self, state: PlantState, params: PlantParams, terrain: Terrain):
        self.state = state
        self.params = params
        self.terrain = terrain
        self._corner_xy = [(x, y) for x, y, _ in params.contact.corner_offsets()]
        self._last = None

    @classmethod
    def standing(cls, left, right, params: PlantParams, terrain: Terrain, com_xy=None,
                 disturbances=()) -> "Plant":
        """Plant at static equilibrium with both soles flat at the given poses."""
        feet = {}
        for f, pose in ((Foot.LEFT, left), (Foot.RIGHT, right)):
            p = np.array(pose.translation, dtype=float)
            feet[f] = FootState(kin_pos=p.copy(), kin_vel=np.zeros(3), pos=p.copy(),
                                yaw=pose.yaw, sole_z=p[2])
        base = min(left.translation[2], right.translation[2])
        if com_xy is None:
            com_xy = 0.5 * (left.translation[:2] + right.translation[:2])
        c_kin = np.array([com_xy[0], com_xy[1], base + params.com_height])
        sink = params.mass * params.gravity / (8 * params.contact.stiffness)
        c = c_kin - np.array([0.0, 0.0, sink])
        state = PlantState(0.0, LipmState(c.copy(), np.zeros(3), np.zeros(3)),
                           c_kin.copy(), np.zeros(3), c_kin.copy(), feet, tuple(disturbances))
        plant = cls(state, params, terrain)
        out, fz = plant._contact(0.0, params.substep)
        plant._record_wrenches(out, fz, (0.0, 0.0))
        return plant

    # contact -------------------------------------------------------------

    def _corners(self, yaw, roll, pitch):
        """World-frame offsets of the four corners from the sole center."""
        cr, sr = math.cos(roll), math.sin(roll)
        cp, sp = math.cos(pitch), math.sin(pitch)
        cy, sy = math.cos(yaw), math.sin(yaw)
        r00, r01 = cy * cp, cy * sp * sr - sy * cr
        r10, r11 = sy * cp, sy * sp * sr + cy * cr
        r20, r21 = -sp, cp * sr
        return [(r00 * x + r01 * y, r10 * x + r11 * y, r20 * x + r21 * y)
                for x, y in self._corner_xy]

    def _solve_tilt(self, s: FootState, sole_z, vz, target, target_prev, dt):
        """Massless-sole equilibrium between flexure and ground torques.

        Returns the (roll, pitch) tilt, corner normal forces, corner offsets
        and depths. Surface heights are looked up once at the initial tilt.
        """
        p = self.params
        k, d = p.contact.stiffness, p.contact.damping
        k_eff = p.flex_stiffness + p.flex_damping / dt
        b0 = p.flex_damping / dt * (target_prev[0] - s.tilt[0])
        b1 = p.flex_damping / dt * (target_prev[1] - s.tilt[1])
        cy, sy = math.cos(s.yaw), math.sin(s.yaw)
        x0, y0 = s.pos[0], s.pos[1]
        heights = [self.terrain.height_at(x0 + rx, y0 + ry)
                   for rx, ry, _ in self._corners(s.yaw, s.tilt[0], s.tilt[1])]

        def evaluate(roll, pitch):
            rs = self._corners(s.yaw, roll, pitch)
            fn, depth, active = [], [], []
            tx = ty = 0.0
            for (rx, ry, rz), h in zip(rs, heights):
                dep = h - sole_z - rz
                f = k * dep - d * vz if dep > 0.0 else 0.0
                if f < 0.0:
                    f = 0.0
                fn.append(f)
                depth.append(dep)
                active.append(f > 0.0)
                tx += ry * f
                ty -= rx * f
            res0 = k_eff * (target[0] - roll) - b0 + cy * tx + sy * ty
            res1 = k_eff * (target[1] - pitch) - b1 - sy * tx + cy * ty
            return res0, res1, fn, depth, active, rs

        roll, pitch = s.tilt[0], s.tilt[1]
        res0, res1, fn, depth, active, rs = evaluate(roll, pitch)
        for _ in range(30):
            norm = max(abs(res0), abs(res1))
            if norm < 1e-10:
                break
            j00 = j11 = -k_eff
            j01 = 0.0
            for (x, y), a in zip(self._corner_xy, active):
                if a:
                    j00 -= k * y * y
                    j11 -= k * x * x
                    j01 += k * x * y
            det = j00 * j11 - j01 * j01
            d0 = -(j11 * res0 - j01 * res1) / det
            d1 = -(j00 * res1 - j01 * res0) / det
            alpha = 1.0
            while True:
                trial = evaluate(roll + alpha * d0, pitch + alpha * d1)
                if max(abs(trial[0]), abs(trial[1])) < norm or alpha < 1e-4:
                    break
                alpha *= 0.5
            roll, pitch = roll + alpha * d0, pitch + alpha * d1
            res0, res1, fn, depth, active, rs = trial
        return np.array([roll, pitch]), fn, rs, depth

    def _contact(self, vz_com, dt):
        st = self.state
        total = 0.0
        out = {}
        for f, s in st.feet.items():
            sole_z = s.pos[2] + st.com.c[2] - st.com_act[2]
            target = -s.ankle + self._lean(s) + s.rest
            target_prev = target if s.target_prev is None else s.target_prev
            vz = self._sole_vz(f, vz_com)
            phi, fn, rs, depth = self._solve_tilt(s, sole_z, vz, target, target_prev, dt)
            s.sole_z, s.tilt, s.target_prev = sole_z, phi, target
            s.corner_forces, s.corner_depths = np.array(fn), np.array(depth)
            out[f] = (sole_z, fn, rs)
            total += sum(fn)
        return out, total

    def _lean(self, s: FootState) -> np.ndarray:
        st = self.state
        h = self.params.com_height
        dx0 = (st.com.c[0] - st.com_act[0]) / h
        dy0 = (st.com.c[1] - st.com_act[1]) / h
        cy, sy = math.cos(s.yaw), math.sin(s.yaw)
        return np.array([sy * dx0 - cy * dy0, cy * dx0 + sy * dy0])

    def _sole_vz(self, f, vz_com):
        s = self.state.feet[f]
        st = self.state
        tau = self.params.actuator_lag
        v_foot = (s.kin_pos[2] - s.pos[2]) / tau if tau > 0 else s.kin_vel[2]
        v_com = (st.com_kin_pos[2] - st.com_act[2]) / tau if tau > 0 else st.com_kin_vel[2]
        return v_foot + vz_com - v_com

    # integration -----------------------------------------------------------

    def _servo(self, cmd: PlantCommand, t_rel: float, dt: float):
        p, st = self.params, self.state
        B = p.com_damping if p.com_damping is not None else 2.0 * math.sqrt(p.com_stiffness)
        target = cmd.com_position + cmd.com_velocity * t_rel
        acc = (p.com_stiffness * (target - st.com_kin_pos)
               + B * (cmd.com_velocity - st.com_kin_vel) + cmd.com_acceleration)
        st.com_kin_vel = st.com_kin_vel + dt * acc
        st.com_kin_pos = st.com_kin_pos + dt * st.com_kin_vel
        a = _lag(p.actuator_lag, dt)
        st.com_act = st.com_act + a * (st.com_kin_pos - st.com_act)
        for f, s in st.feet.items():
            ft = cmd.foot(f)
            Bf = ft.damping if ft.damping is not None else 2.0 * math.sqrt(ft.stiffness)
            goal = ft.position + ft.velocity * t_rel
            acc = (ft.stiffness * (goal - s.kin_pos) + Bf * (ft.velocity - s.kin_vel)
                   + ft.acceleration)
            s.kin_vel = s.kin_vel + dt * acc
            s.kin_pos = s.kin_pos + dt * s.kin_vel
            s.pos = s.pos + a * (s.kin_pos - s.pos)
            if ft.reset_ankle:
                s.ankle_kin = s.ankle_kin * math.exp(-dt / p.ankle_reset_time)
            else:
                s.ankle_kin = s.ankle_kin + dt * np.asarray(ft.ankle_rates, dtype=float)
            s.ankle = s.ankle + a * (s.ankle_kin - s.ankle)

    def _external(self, t: float):
        force = np.zeros(3)
        rest = {f: np.zeros(2) for f in Foot}
        for d in self.state.disturbances:
            if d.active(t):
                force += np.asarray(d.force, dtype=float)
                if d.foot is not None:
                    rest[d.foot] += d.window(t) * np.asarray(d.ankle_offset, dtype=float)
        return force, rest

    def substep(self, cmd: PlantCommand, t_rel: float, dt: float):
        p, st = self.params, self.state
        self._servo(cmd, t_rel, dt)
        f_ext, rest = self._external(st.t)
        for f, s in st.feet.items():
            s.rest = rest[f]
        m, g = p.mass, p.gravity
        c, v = st.com.c, st.com.cdot
        out, fz = self._contact(v[2], dt)
        n_active = sum(1 for o in out.values() for f in o[1] if f > 0.0)
        kz = -p.contact.stiffness * n_active
        dz = -p.contact.damping * n_active
        # linearly implicit vertical step
        vz_new = (v[2] + dt * (fz / m - g + f_ext[2] / m) - dt / m * dz * v[2]) / (
            1.0 - dt * dt * kz / m - dt * dz / m)
        # horizontal inverted pendulum on the CoP of all corner forces
        fx = fy = 0.0
        if fz > 0.0:
            cx = cy = cz = 0.0
            for f, (sole_z, fn, rs) in out.items():
                s = st.feet[f]
                for fi, (rx, ry, rz) in zip(fn, rs):
                    cx += fi * (s.pos[0] + rx)
                    cy += fi * (s.pos[1] + ry)
                    cz += fi * (sole_z + rz)
            cx, cy, cz = cx / fz, cy / fz, cz / fz
            fx = fz * (c[0] - cx) / (c[2] - cz)
            fy = fz * (c[1] - cy) / (c[2] - cz)
        acc = np.array([(fx + f_ext[0]) / m, (fy + f_ext[1]) / m, (vz_new - v[2]) / dt])
        v_new = np.array([v[0] + dt * acc[0], v[1] + dt * acc[1], vz_new])
        st.com = LipmState(c + dt * v_new, v_new, acc)
        self._last = (out, fz, (fx, fy))
        st.t += dt
        if not (np.isfinite(st.com.c).all() and np.isfinite(st.com.cdot).all()) or \
                np.abs(st.com.cdot).max() > p.divergence_bound or \
                np.abs(st.com.c - st.com_act).max() > p.divergence_bound:
            raise NumericalDivergence(f"plant diverged at t={st.t:.3f} s")

    def _record_wrenches(self, out, fz, f_xy):
        """Sole-frame wrenches; horizontal force is shared in proportion to pressure."""
        st = self.state
        for f, (sole_z, fn, rs) in out.items():
            s = st.feet[f]
            forces = np.array([[fi * f_xy[0] / fz, fi * f_xy[1] / fz, fi] if fz > 0.0
                               else [0.0, 0.0, 0.0] for fi in fn])
            r = np.array(rs)
            R = rotation_rpy(s.tilt[0], s.tilt[1], s.yaw)
            force = forces.sum(axis=0)
            torque = np.cross(r, forces).sum(axis=0)
            s.wrench = Wrench6(R.T @ force, R.T @ torque, _SOLE_FRAME[f])

    def step(self, cmd: PlantCommand, dt: float):
        """Advance one control period made of physics substeps."""
        n = max(1, int(round(dt / self.params.substep)))
        h = dt / n
        for i in range(n):
            self.substep(cmd, i * h, h)
        self._record_wrenches(*self._last)
        return self.state

    def energy(self) -> float:
        """Kinetic, gravity, corner-spring and flexure energy."""
        p, st = self.params, self.state
        e = 0.5 * p.mass * float(st.com.cdot @ st.com.cdot) + p.mass * p.gravity * st.com.c[2]
        for s in st.feet.values():
            # depths at the current CoM height, not the ones cached by the last substep
            sole_z = s.pos[2] + st.com.c[2] - st.com_act[2]
            for rx, ry, rz in self._corners(s.yaw, s.tilt[0], s.tilt[1]):
                d = self.terrain.height_at(s.pos[0] + rx, s.pos[1] + ry) - sole_z - rz
                if d > 0.0:
                    e += 0.5 * p.contact.stiffness * d * d
            dev = -s.ankle + self._lean(s) + s.rest - s.tilt
            e += 0.5 * p.flex_stiffness * float(dev @ dev)
        return e


def plant_step(state: PlantState, command: PlantCommand, params: PlantParams,
               terrain: Terrain, dt: float = 0.005) -> PlantState:
    """Pure-function form of :meth:`Plant.step`; the input state is untouched."""
    plant = Plant(state.copy(), params, terrain)
    plant.step(command, dt)
    return plant.state
