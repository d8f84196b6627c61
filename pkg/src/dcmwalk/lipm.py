"""Linear inverted pendulum model and its DCM decomposition.

All functions work on horizontal coordinates: z-components of the returned
vectors are zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveHeight

GRAVITY = 9.81

_XY = np.array([1.0, 1.0, 0.0])


def natural_frequency(g: float, h: float) -> float:
    if not h > 0.0:
        raise NonPositiveHeight(f"CoM height must be positive, got {h}")
    if not g > 0.0:
        raise ValueError(f"gravity must be positive, got {g}")
    return math.sqrt(g / h)


@dataclass(frozen=True)
class LipmParams:

    mass: float = 40.0
    com_height: float = 0.78
    gravity: float = GRAVITY

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError("mass must be positive")
        natural_frequency(self.gravity, self.com_height)

    @property
    def omega(self) -> float:
        return natural_frequency(self.gravity, self.com_height)


@dataclass
class LipmState:

    c: np.ndarray = field(default_factory=lambda: np.zeros(3))
    cdot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    cddot: np.ndarray = field(default_factory=lambda: np.zeros(3))


def lipm_accel(c, z, omega: float) -> np.ndarray:
    """CoM acceleration ``omega^2 (c - z)`` of the LIPM."""
    return omega ** 2 * (np.asarray(c, float) - np.asarray(z, float)) * _XY


def dcm_of_state(s: LipmState, omega: float) -> np.ndarray:
    return (s.c + s.cdot / omega) * _XY


def dcm_derivative(xi, z, omega: float) -> np.ndarray:
    return omega * (np.asarray(xi, float) - np.asarray(z, float)) * _XY


def com_derivative(c, xi, omega: float) -> np.ndarray:
    return omega * (np.asarray(xi, float) - np.asarray(c, float)) * _XY
