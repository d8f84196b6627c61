"""Spatial vector algebra: rigid transforms and frame-tagged contact wrenches.

Vectors are plain ``(3,)`` numpy arrays. A :class:`Transform` ``X`` from
frame A to frame B maps point coordinates as ``p_B = R p_A + t``, i.e. ``t``
is the origin of A expressed in B.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositivePressure

ORTHONORMAL_TOL = 1e-9


def vec3(x=0.0, y=0.0, z=0.0) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


class FrameId(enum.Enum):
    WORLD = "world"
    LEFT_SOLE = "leftSoleCenter"
    RIGHT_SOLE = "rightSoleCenter"
    LEFT_ANKLE = "leftAnkle"
    RIGHT_ANKLE = "rightAnkle"


def rotation_rpy(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Rotation matrix ``Rz(yaw) @ Ry(pitch) @ Rx(roll)``."""
    cr, sr = np.cos(roll), np.sin(roll)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])


@dataclass(frozen=True)
class Transform:

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        if not np.allclose(R @ R.T, np.eye(3), atol=ORTHONORMAL_TOL) or \
                abs(np.linalg.det(R) - 1.0) > ORTHONORMAL_TOL:
            raise ValueError("rotation is not a proper orthonormal matrix")
        if not np.all(np.isfinite(t)):
            raise ValueError("translation must be finite")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def identity() -> "Transform":
        return Transform()

    @staticmethod
    def from_translation(t) -> "Transform":
        return Transform(np.eye(3), np.asarray(t, dtype=float))

    @staticmethod
    def from_pose(position, roll=0.0, pitch=0.0, yaw=0.0) -> "Transform":
        return Transform(rotation_rpy(roll, pitch, yaw), np.asarray(position, dtype=float))

    def inverse(self) -> "Transform":
        Rt = self.rotation.T
        return Transform(Rt, -Rt @ self.translation)

    def compose(self, other: "Transform") -> "Transform":
        """Return ``self ∘ other``: apply ``other`` first, then ``self``."""
        return Transform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation)

    def apply(self, p) -> np.ndarray:
        return self.rotation @ np.asarray(p, dtype=float) + self.translation

    @property
    def yaw(self) -> float:
        return float(np.arctan2(self.rotation[1, 0], self.rotation[0, 0]))


@dataclass(frozen=True)
class Wrench6:

    """Contact wrench: force [N] and torque [N.m] about the origin of ``frame``."""

    force: np.ndarray
    torque: np.ndarray
    frame: FrameId = FrameId.WORLD

    def __post_init__(self):
        f = np.asarray(self.force, dtype=float).reshape(3)
        tau = np.asarray(self.torque, dtype=float).reshape(3)
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(tau))):
            raise ValueError("wrench components must be finite")
        object.__setattr__(self, "force", f)
        object.__setattr__(self, "torque", tau)

    @staticmethod
    def from_vector(v, frame: FrameId = FrameId.WORLD) -> "Wrench6":
        v = np.asarray(v, dtype=float)
        return Wrench6(v[:3], v[3:], frame)

    @staticmethod
    def zero(frame: FrameId = FrameId.WORLD) -> "Wrench6":
        return Wrench6(np.zeros(3), np.zeros(3), frame)

    def vector(self) -> np.ndarray:
        """Stacked coordinates ``(f_x, f_y, f_z, tau_x, tau_y, tau_z)``."""
        return np.concatenate([self.force, self.torque])

    def __add__(self, other: "Wrench6") -> "Wrench6":
        if other.frame != self.frame:
            raise ValueError(f"cannot add wrenches in {self.frame} and {other.frame}")
        return Wrench6(self.force + other.force, self.torque + other.torque, self.frame)


def wrench_transform_matrix(X: Transform) -> np.ndarray:
    """6x6 matrix acting on ``(f, tau)`` coordinates, see :func:`transform_wrench`."""
    R, t = X.rotation, X.translation
    tx = np.array([[0.0, -t[2], t[1]], [t[2], 0.0, -t[0]], [-t[1], t[0], 0.0]])
    M = np.zeros((6, 6))
    M[:3, :3] = R
    M[3:, :3] = tx @ R
    M[3:, 3:] = R
    return M


def transform_wrench(w: Wrench6, X: Transform, target: FrameId) -> Wrench6:
    """Express a wrench in the target frame.

    ``X`` maps coordinates of ``w.frame`` to ``target``. The force is rotated
    and the torque is moved to the target origin: ``tau' = R tau + t x (R f)``.
    """
    f = X.rotation @ w.force
    tau = X.rotation @ w.torque + np.cross(X.translation, f)
    return Wrench6(f, tau, target)


def cop_of_wrench(w: Wrench6) -> np.ndarray:
    """Center of pressure of a wrench given in a sole frame (z-axis normal)."""
    fz = w.force[2]
    if not fz > 0.0:
        raise NonPositivePressure(f"pressure {fz} N is not positive")
    return np.array([-w.torque[1] / fz, w.torque[0] / fz, 0.0])


def zmp_on_plane(w: Wrench6, height: float) -> np.ndarray:
    """ZMP of a world-frame wrench on the horizontal plane ``z = height``."""
    f, tau = w.force, w.torque
    if not f[2] > 0.0:
        raise NonPositivePressure(f"pressure {f[2]} N is not positive")
    return np.array([
        (height * f[0] - tau[1]) / f[2],
        (height * f[1] + tau[0]) / f[2],
        height,
    ])
