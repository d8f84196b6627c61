"""Measured quantities from plant readings: CoM, DCM, per-foot and net ZMP."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .pattern import Foot
from .spatial import FrameId, Transform, Wrench6, cop_of_wrench, transform_wrench, zmp_on_plane

_XY = np.array([1.0, 1.0, 0.0])


@dataclass(frozen=True)
class NoiseConfig:

    force_sigma: float = 0.0
    torque_sigma: float = 0.0
    com_sigma: float = 0.0
    com_bias: tuple = (0.0, 0.0, 0.0)
    seed: int = 0

    def __post_init__(self):
        if min(self.force_sigma, self.torque_sigma, self.com_sigma) < 0:
            raise ValueError("noise standard deviations must be non-negative")


@dataclass(frozen=True)
class MeasuredState:

    """``zmp`` is None when the total pressure is below the deadband."""

    c: np.ndarray
    cdot: np.ndarray
    dcm: np.ndarray
    zmp: np.ndarray
    wrenches: dict
    pressures: dict
    cops: dict

    @property
    def zmp_valid(self) -> bool:
        return self.zmp is not None


def net_zmp(wrenches: dict, poses: dict, height: float, deadband: float = 0.0):
    """ZMP of the summed world wrench on the plane ``z = height``, or None."""
    total = Wrench6.zero(FrameId.WORLD)
    for f, w in wrenches.items():
        total = total + transform_wrench(w, poses[f], FrameId.WORLD)
    if not total.force[2] > deadband:
        return None
    return zmp_on_plane(total, height)


class Estimator:

    """Direct plant readout with optional noise and a low-pass velocity filter.

    The CoM velocity is the first-order low-pass filtered finite difference of
    the measured CoM position at ``cutoff`` Hz.
    """

    def __init__(self, omega: float, dt: float, cutoff: float = 40.0,
                 noise: NoiseConfig = NoiseConfig(), deadband: float = 10.0):
        self.omega = omega
        self.dt = dt
        self.noise = noise
        self.deadband = deadband
        rc = 1.0 / (2.0 * math.pi * cutoff)
        self.alpha = dt / (dt + rc)
        self._rng = np.random.default_rng(noise.seed)
        self._c_prev = None
        self._cdot = None

    def _noisy(self, w: Wrench6) -> Wrench6:
        n = self.noise
        if n.force_sigma == 0.0 and n.torque_sigma == 0.0:
            return w
        return Wrench6(w.force + self._rng.normal(0.0, n.force_sigma, 3) if n.force_sigma else w.force,
                       w.torque + self._rng.normal(0.0, n.torque_sigma, 3) if n.torque_sigma else w.torque,
                       w.frame)

    def measure(self, c, cdot, sole_poses: dict, sole_wrenches: dict,
                zmp_height: float) -> MeasuredState:
        """Measure from true CoM position/velocity and sole poses/wrenches.

        ``cdot`` only seeds the velocity filter on the first call.
        """
        c_m = np.asarray(c, dtype=float) + np.asarray(self.noise.com_bias, dtype=float)
        if self.noise.com_sigma:
            c_m = c_m + self._rng.normal(0.0, self.noise.com_sigma, 3)
        if self._c_prev is None:
            self._cdot = np.asarray(cdot, dtype=float).copy()
        else:
            raw = (c_m - self._c_prev) / self.dt
            self._cdot = self._cdot + self.alpha * (raw - self._cdot)
        self._c_prev = c_m
        wrenches = {f: self._noisy(sole_wrenches[f]) for f in Foot}
        pressures = {f: float(wrenches[f].force[2]) for f in Foot}
        cops = {f: cop_of_wrench(wrenches[f]) if pressures[f] > 0.0 else None for f in Foot}
        zmp = net_zmp(wrenches, sole_poses, zmp_height, self.deadband)
        dcm = (c_m + self._cdot / self.omega) * _XY
        return MeasuredState(c_m, self._cdot.copy(), dcm, zmp, wrenches, pressures, cops)


def measure(c, cdot, sole_poses: dict, sole_wrenches: dict, zmp_height: float,
            omega: float, deadband: float = 10.0) -> MeasuredState:
    """Noise-free, unfiltered single-shot measurement."""
    est = Estimator(omega, 1.0, noise=NoiseConfig(), deadband=deadband)
    return est.measure(c, cdot, sole_poses, sole_wrenches, zmp_height)
