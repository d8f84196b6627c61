"""DCM feedback: commanded ZMP and commanded net contact wrench."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lipm import LipmParams
from .spatial import FrameId, Transform, Wrench6, transform_wrench

_XY = np.array([1.0, 1.0, 0.0])


@dataclass(frozen=True)
class DcmGains:

    k_p: float = 5.0
    k_i: float = 20.0
    k_z: float = 2.0
    T_i: float = 20.0

    def __post_init__(self):
        if self.k_p < 0 or self.k_i < 0 or self.k_z < 0:
            raise ValueError("DCM gains must be non-negative")
        if not self.T_i > 0:
            raise ValueError("integrator time constant must be positive")


@dataclass(frozen=True)
class LeakyIntegrator:

    """Exponential moving average of its input."""

    value: np.ndarray = field(default_factory=lambda: np.zeros(3))
    time_constant: float = 20.0

    def __post_init__(self):
        if not self.time_constant > 0:
            raise ValueError("time constant must be positive")
        object.__setattr__(self, "value", np.asarray(self.value, dtype=float).reshape(3))

    def update(self, x, dt: float) -> "LeakyIntegrator":
        return leaky_update(self, x, dt)


def leaky_update(acc: LeakyIntegrator, x, dt: float) -> LeakyIntegrator:
    """Advance the moving average by ``dt`` with input ``x`` held constant.

    Uses the exact zero-order-hold discretization, a convex combination of the
    previous value and the input, so the output never leaves the hull of past
    inputs.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    decay = math.exp(-dt / acc.time_constant)
    x = np.asarray(x, dtype=float)
    value = decay * acc.value + (1.0 - decay) * x
    # rounding must not leave the segment between the old value and the input
    value = np.clip(value, np.minimum(acc.value, x), np.maximum(acc.value, x))
    return LeakyIntegrator(value, acc.time_constant)


@dataclass(frozen=True)
class DcmReference:

    dcm: np.ndarray
    zmp: np.ndarray
    dcm_rate: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass(frozen=True)
class DcmMeasurement:

    dcm: np.ndarray
    zmp: np.ndarray = None


def dcm_feedback(ref: DcmReference, meas: DcmMeasurement, gains: DcmGains,
                 integ: LeakyIntegrator, omega: float, dt: float = 0.005,
                 integrate: bool = True, zmp_term=None):
    """Commanded ZMP from the DCM error.

    Returns ``(z_cmd, integ, zmp_term)``. The ZMP term is
    ``k_z / omega (z_d - z_m)``; when ``meas.zmp`` is None it is replaced by
    ``zmp_term`` (the last valid value, zero by default). The integrator is
    held when ``integrate`` is false.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    z_d = np.asarray(ref.zmp, dtype=float)
    error = (np.asarray(ref.dcm, dtype=float) - np.asarray(meas.dcm, dtype=float)) * _XY
    if integrate:
        integ = leaky_update(integ, error, dt)
    if meas.zmp is not None:
        zmp_term = gains.k_z / omega * (z_d - np.asarray(meas.zmp, dtype=float)) * _XY
    elif zmp_term is None:
        zmp_term = np.zeros(3)
    z_cmd = (z_d - (1.0 + gains.k_p / omega) * error
             - gains.k_i / omega * integ.value * _XY + zmp_term)
    return z_cmd, integ, zmp_term


class DcmFeedback:

    """Stateful wrapper holding the integrator and the last valid ZMP term."""

    def __init__(self, gains: DcmGains, omega: float, dt: float):
        self.gains = gains
        self.omega = omega
        self.dt = dt
        self.integrator = LeakyIntegrator(np.zeros(3), gains.T_i)
        self.zmp_term = np.zeros(3)

    def __call__(self, ref: DcmReference, meas: DcmMeasurement, integrate: bool = True):
        z_cmd, self.integrator, self.zmp_term = dcm_feedback(
            ref, meas, self.gains, self.integrator, self.omega, self.dt, integrate,
            self.zmp_term)
        return z_cmd


def net_wrench_from_zmp(c, z_cmd, params: LipmParams, frame: FrameId = FrameId.WORLD) -> Wrench6:
    """Net contact wrench realizing the commanded ZMP, about the world origin.

    The force ``m (omega^2 (c - z), g)`` is applied at ``c``; when the height
    of ``c`` above the ZMP plane equals the model height, the ZMP of the
    returned wrench on the plane through ``z_cmd`` is exactly ``z_cmd``.
    """
    c = np.asarray(c, dtype=float)
    z = np.asarray(z_cmd, dtype=float)
    m, w = params.mass, params.omega
    force = np.array([m * w**2 * (c[0] - z[0]), m * w**2 * (c[1] - z[1]), m * params.gravity])
    at_com = Wrench6(force, np.zeros(3), frame)
    return transform_wrench(at_com, Transform.from_translation(c), frame)
