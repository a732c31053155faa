from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional
import numpy as np
from .constants import RHO_MIN, GAUGE_COEFFICIENT, SUBLAPLACIAN_STEP, SUBLAPLACIAN_MARGIN
from .exceptions import InvalidArgumentError, OriginSingularityError
from .geometry import CartPoint, dilate, frame_x, frame_y
from .utils import Utils


@dataclass(frozen=True)
class PotentialParams:
    k: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise InvalidArgumentError("Coupling constant k must be positive")


def gauge_rho(p: CartPoint, gauge_coefficient: float = GAUGE_COEFFICIENT) -> float:
    """Homogeneous gauge ρ = ((x² + y²)² + 16z²)^(1/4)

    :param p: point
    :param gauge_coefficient: coefficient of z² (16 for the sub-Laplacian gauge)
    :return: gauge value
    """

    planar = p.x * p.x + p.y * p.y
    return (planar * planar + gauge_coefficient * p.z * p.z) ** 0.25


def gauge_rho_cyl(r: float, z: float) -> float:
    return (r ** 4 + GAUGE_COEFFICIENT * z * z) ** 0.25


def potential_U(p: CartPoint, params: PotentialParams,
                gauge_coefficient: float = GAUGE_COEFFICIENT) -> float:
    """Gravitational potential U = −k/ρ²

    :param p: point away from the origin
    :param params: potential parameters
    :param gauge_coefficient: coefficient of z² inside the gauge
    :return: potential energy
    """

    rho = gauge_rho(p, gauge_coefficient)
    if rho <= RHO_MIN:
        raise OriginSingularityError("Potential is singular at the origin")
    return -params.k / (rho * rho)


def potential_cyl(r: float, z: float, params: PotentialParams) -> float:
    """Potential in cylindrical form −k/√(r⁴ + 16z²)"""

    root = math.sqrt(r ** 4 + GAUGE_COEFFICIENT * z * z)
    if root <= RHO_MIN * RHO_MIN:
        raise OriginSingularityError("Potential is singular at the origin")
    return -params.k / root


def _along(p: CartPoint, direction: np.ndarray, t: float) -> CartPoint:
    # Straight lines along X and Y are exactly their flow lines
    return CartPoint(p.x + t * direction[0], p.y + t * direction[1], p.z + t * direction[2])


def horizontal_gradient(p: CartPoint, params: PotentialParams) -> tuple[float, float]:
    """Central-difference values of (XU, YU) at p

    :param p: point away from the origin
    :param params: potential parameters
    :return: derivatives of U along X and Y
    """

    values = []

    for direction in (frame_x(p), frame_y(p)):
        values.append(Utils.central_difference(
            lambda t: potential_U(_along(p, direction, t), params), 0.0))
    return values[0], values[1]


def sublaplacian_step(p: CartPoint) -> float:
    """Default step of the second difference: eps^(1/4) · max(1, |coordinate|)"""
    return SUBLAPLACIAN_STEP * max(1.0, abs(p.x), abs(p.y), abs(p.z))


def sublaplacian_residual(p: CartPoint, params: PotentialParams, h: Optional[float] = None,
                          gauge_coefficient: float = GAUGE_COEFFICIENT) -> float:
    """Finite-difference value of (X² + Y²)U at p. Vanishes up to O(h²)
    away from the origin when the gauge coefficient is 16.

    :param p: point with ρ(p) much larger than h
    :param params: potential parameters
    :param h: difference step along each frame field (None for sublaplacian_step(p))
    :param gauge_coefficient: coefficient of z² inside the gauge
    :return: residual of the sub-Laplacian
    """

    if h is None:
        h = sublaplacian_step(p)
    if h <= 0:
        raise InvalidArgumentError("Difference step must be positive")
    rho = gauge_rho(p, gauge_coefficient)
    if rho <= RHO_MIN or rho < SUBLAPLACIAN_MARGIN * h:
        raise OriginSingularityError("Point is too close to the origin for the difference step")

    def u(q: CartPoint) -> float:
        return potential_U(q, params, gauge_coefficient)

    center = u(p)
    total = 0.0

    # X(XU) and Y(YU) as nested central differences
    for direction in (frame_x(p), frame_y(p)):
        total += (u(_along(p, direction, h)) - 2 * center + u(_along(p, direction, -h))) / (h * h)
    return total


def point_at_gauge(direction: CartPoint, rho: float) -> CartPoint:
    """Move a nonzero point along its dilation orbit to the given gauge value

    :param direction: any point other than the origin
    :param rho: target gauge value
    :return: dilated point with gauge rho
    """

    current = gauge_rho(direction)
    if current <= RHO_MIN:
        raise OriginSingularityError("Cannot dilate the origin")
    return dilate(rho / current, direction)


def random_gauge_point(rng: np.random.Generator, rho: float) -> CartPoint:
    x, y, z = rng.standard_normal(3)
    return point_at_gauge(CartPoint(float(x), float(y), float(z)), rho)
