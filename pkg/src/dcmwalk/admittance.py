"""Admittance laws turning force errors into motion commands.

Foot damping drives ankle roll/pitch rates from the CoP error, foot force
difference control (FFDC) drives opposite vertical foot velocities from the
pressure-difference error, and CoM admittance offsets the horizontal CoM
acceleration from the net ZMP error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pattern import Foot


@dataclass(frozen=True)
class AdmittanceGains:

    cop_x: float = 0.1
    cop_y: float = 0.1
    dfz: float = 1e-4
    vdc_period: float = 1.0
    com_x: float = 20.0
    com_y: float = 10.0
    pressure_deadband: float = 10.0
    max_ankle_rate: float = 1.0
    max_vertical_velocity: float = 0.1

    def __post_init__(self):
        for name in ("cop_x", "cop_y", "dfz", "com_x", "com_y", "pressure_deadband",
                     "max_ankle_rate", "max_vertical_velocity"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not self.vdc_period > 0:
            raise ValueError("vdc_period must be positive")


@dataclass(frozen=True)
class FootCommand:

    foot: Foot
    roll_rate: float = 0.0
    pitch_rate: float = 0.0
    vertical_velocity: float = 0.0

    def __post_init__(self):
        if not np.isfinite([self.roll_rate, self.pitch_rate, self.vertical_velocity]).all():
            raise ValueError("foot command must be finite")

    def clamped(self, gains: AdmittanceGains) -> "FootCommand":
        r, v = gains.max_ankle_rate, gains.max_vertical_velocity
        return FootCommand(self.foot, float(np.clip(self.roll_rate, -r, r)),
                           float(np.clip(self.pitch_rate, -r, r)),
                           float(np.clip(self.vertical_velocity, -v, v)))


def foot_damping(p_qp, f_m, tau_m, gains: AdmittanceGains):
    """Ankle ``(roll_rate, pitch_rate)`` tracking the target CoP ``p_qp``.

    All inputs are in the sole frame. Below the pressure deadband both rates
    are zero.
    """
    f_m = np.asarray(f_m, dtype=float)
    if f_m[2] <= gains.pressure_deadband:
        return 0.0, 0.0
    err = np.cross(np.asarray(p_qp, dtype=float), f_m) - np.asarray(tau_m, dtype=float)
    return gains.cop_y * err[0], gains.cop_x * err[1]


def ffdc(v_d, f_qp, f_m, p_d, p_c, gains: AdmittanceGains):
    """Vertical foot velocities ``(v_left, v_right)`` in double support.

    Every argument is a ``(left, right)`` pair: desired vertical velocities,
    target and measured pressures, desired and commanded altitudes.
    """
    v_dfz = gains.dfz * ((f_qp[0] - f_qp[1]) - (f_m[0] - f_m[1]))
    v_vdc = ((p_d[0] + p_d[1]) - (p_c[0] + p_c[1])) / gains.vdc_period
    return (v_d[0] - 0.5 * v_dfz + 0.5 * v_vdc,
            v_d[1] + 0.5 * v_dfz + 0.5 * v_vdc)


def com_admittance(cddot_d, z_m, z_qp, gains: AdmittanceGains, valid: bool = True) -> np.ndarray:
    """Commanded CoM acceleration; only the horizontal part is offset."""
    cddot_d = np.asarray(cddot_d, dtype=float)
    if not valid or z_m is None:
        return cddot_d.copy()
    err = np.asarray(z_m, dtype=float) - np.asarray(z_qp, dtype=float)
    return cddot_d + np.array([gains.com_x * err[0], gains.com_y * err[1], 0.0])


def task_tracking_accel(x, xd, x_c, xd_c, xdd_c, K: float, B: float = None):
    """PD plus feedforward acceleration; ``B`` defaults to the critical ``2 sqrt(K)``."""
    if K < 0 or (B is not None and B < 0):
        raise ValueError("gains must be non-negative")
    if B is None:
        B = 2.0 * np.sqrt(K)
    return (K * (np.asarray(x_c, float) - np.asarray(x, float))
            + B * (np.asarray(xd_c, float) - np.asarray(xd, float)) + np.asarray(xdd_c, float))
