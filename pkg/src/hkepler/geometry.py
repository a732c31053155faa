from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np
from .constants import AXIS_THRESHOLD
from .exceptions import AxisSingularityError, InvalidArgumentError


def _check_finite(name: str, *values: float):
    for value in values:
        if not math.isfinite(value):
            raise InvalidArgumentError(f"{name} must have finite components")


@dataclass(frozen=True)
class CartPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        _check_finite('CartPoint', self.x, self.y, self.z)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class CartState:
    point: CartPoint
    p_X: float
    p_Y: float

    def __post_init__(self):
        _check_finite('CartState', self.p_X, self.p_Y)


@dataclass(frozen=True)
class CylState:
    """Phase point in cylindrical coordinates. theta is stored unwrapped."""

    r: float
    theta: float
    z: float
    p_R: float
    p_S: float

    def __post_init__(self):
        _check_finite('CylState', self.r, self.theta, self.z, self.p_R, self.p_S)
        if self.r < 0:
            raise InvalidArgumentError("Radius must be non-negative")

    def to_array(self) -> np.ndarray:
        return np.array([self.r, self.theta, self.z, self.p_R, self.p_S], dtype=float)

    @classmethod
    def from_array(cls, values) -> CylState:
        r, theta, z, p_R, p_S = (float(v) for v in values)
        return cls(r, theta, z, p_R, p_S)

    def rotated(self, alpha: float) -> CylState:
        """Rotate the state about the Oz axis

        :param alpha: rotation angle
        :return: rotated state
        """

        return CylState(self.r, self.theta + alpha, self.z, self.p_R, self.p_S)

    def cartesian_xy(self) -> tuple[float, float]:
        return self.r * math.cos(self.theta), self.r * math.sin(self.theta)


def group_mul(p: CartPoint, q: CartPoint) -> CartPoint:
    """Heisenberg group product p·q

    :param p: left factor
    :param q: right factor
    :return: product
    """

    return CartPoint(p.x + q.x, p.y + q.y, p.z + q.z + (p.x * q.y - q.x * p.y) / 2)


def group_inverse(p: CartPoint) -> CartPoint:
    return CartPoint(-p.x, -p.y, -p.z)


def dilate(scale: float, p: CartPoint) -> CartPoint:
    """Apply the anisotropic dilation δ_λ(x, y, z) = (λx, λy, λ²z)

    :param scale: dilation factor λ (must be positive)
    :param p: point to dilate
    :return: dilated point
    """

    if not scale > 0:
        raise InvalidArgumentError("Dilation factor must be positive")
    return CartPoint(scale * p.x, scale * p.y, scale * scale * p.z)


def frame_x(p: CartPoint) -> np.ndarray:
    """Left-invariant field X = ∂x − (y/2)∂z at p"""
    return np.array([1.0, 0.0, -p.y / 2])


def frame_y(p: CartPoint) -> np.ndarray:
    """Left-invariant field Y = ∂y + (x/2)∂z at p"""
    return np.array([0.0, 1.0, p.x / 2])


def constraint_form(p: CartPoint, velocity) -> float:
    """Evaluate τ = dz + (y dx − x dy)/2 on a velocity at p.
    Horizontal velocities give zero.

    :param p: base point
    :param velocity: (ẋ, ẏ, ż)
    :return: value of the constraint form
    """

    dx, dy, dz = (float(v) for v in velocity)
    return dz + (p.y * dx - p.x * dy) / 2


def to_cylindrical(s: CartState) -> CylState:
    """Convert a Cartesian phase point to cylindrical coordinates

    :param s: Cartesian state off the Oz axis
    :return: cylindrical state with theta in (−π, π]
    """

    x, y = s.point.x, s.point.y
    r = math.hypot(x, y)
    if r < AXIS_THRESHOLD:
        raise AxisSingularityError("Cylindrical momenta are undefined on the z-axis")

    theta = math.atan2(y, x)
    cos_t, sin_t = x / r, y / r
    p_R = s.p_X * cos_t + s.p_Y * sin_t
    p_S = r * (s.p_Y * cos_t - s.p_X * sin_t)
    return CylState(r, theta, s.point.z, p_R, p_S)


def from_cylindrical(s: CylState) -> CartState:
    """Convert a cylindrical phase point back to Cartesian coordinates

    :param s: cylindrical state with r > 0
    :return: Cartesian state
    """

    if s.r < AXIS_THRESHOLD:
        raise AxisSingularityError("Cylindrical state lies on the z-axis")

    cos_t, sin_t = math.cos(s.theta), math.sin(s.theta)
    transverse = s.p_S / s.r
    point = CartPoint(s.r * cos_t, s.r * sin_t, s.z)
    return CartState(point, s.p_R * cos_t - transverse * sin_t, s.p_R * sin_t + transverse * cos_t)
