from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional
from scipy.optimize import brentq
from .constants import CLASSIFY_TOL
from .exceptions import InconsistentStateError, InvalidArgumentError, NoStationarySolutionError, OutOfRangeError
from .geometry import CylState
from .potential import PotentialParams


@dataclass(frozen=True)
class StationaryPoint:
    z: float
    H: float
    F3: float
    J_squared: float
    k: float

    def as_row(self) -> list[float]:
        return [self.z, self.H, self.F3, self.J_squared]


@dataclass(frozen=True)
class HeteroclinicCurve:
    """Minimal-energy solution connecting (0, 0, −z0) and (0, 0, z0)"""

    k: float
    z0: float
    theta_at_0: float = 0.0

    def __post_init__(self):
        if not self.z0 > 0:
            raise InvalidArgumentError("Pole height z0 must be positive")
        if not self.k > 0:
            raise InvalidArgumentError("Coupling constant k must be positive")

    @staticmethod
    def from_energy(params: PotentialParams, H: float, theta_at_0: float = 0.0) -> HeteroclinicCurve:
        if H >= 0:
            raise NoStationarySolutionError("Heteroclinic curves need negative energy")
        return HeteroclinicCurve(params.k, params.k / (4 * abs(H)), theta_at_0)

    @property
    def energy(self) -> float:
        return -self.k / (4 * self.z0)

    @property
    def F3(self) -> float:
        return 2 * self.k * self.z0


def stationary_points(params: PotentialParams, H: float) -> tuple[StationaryPoint, StationaryPoint]:
    """The two equilibria on the Oz axis for energy H

    :param params: potential parameters
    :param H: negative energy
    :return: stationary points at z = −k/(4|H|) and z = +k/(4|H|)
    """

    if H >= 0:
        raise NoStationarySolutionError("Stationary points exist only for negative energy")

    k = params.k
    height = k / (4 * abs(H))
    points = []

    for z in (-height, height):
        root = math.sqrt(16 * z * z)
        energy = -k / root
        F3 = 8 * k * z * z / root
        j_squared = k * k + 2 * energy * F3
        if abs(j_squared) > CLASSIFY_TOL * max(1.0, k * k):
            raise InconsistentStateError(f"Stationary point has J² = {j_squared}")
        points.append(StationaryPoint(z, energy, F3, j_squared, k))
    return points[0], points[1]


def _check_height(curve: HeteroclinicCurve, z: float):
    if not abs(z) < curve.z0:
        raise OutOfRangeError(f"|z| = {abs(z)} must be below z0 = {curve.z0}")


def heteroclinic_speed(curve: HeteroclinicCurve, z: float) -> float:
    """Vertical speed ż = (√k/2)(z0² − z²)/(z0² + z²) of the ascending solution"""

    _check_height(curve, z)
    z0_sq = curve.z0 * curve.z0
    return math.sqrt(curve.k) / 2 * (z0_sq - z * z) / (z0_sq + z * z)


def heteroclinic_point(curve: HeteroclinicCurve, z: float) -> CylState:
    """Point and momenta of the ascending heteroclinic solution at height z

    :param curve: heteroclinic curve
    :param z: height with |z| < z0
    :return: cylindrical state (r(z), θ(z), z, p_R, p_S)
    """

    _check_height(curve, z)
    z0 = curve.z0
    r = math.sqrt(2 * (z0 * z0 - z * z) / z0)
    theta = 0.5 * math.log((z0 + z) / (z0 - z)) + curve.theta_at_0
    speed = heteroclinic_speed(curve, z)
    p_R = -2 * z * speed / (z0 * r)
    return CylState(r, theta, z, p_R, 2 * speed)


def heteroclinic_integrand(curve: HeteroclinicCurve, z: float) -> float:
    """dt/dz = 1/ż along the ascending solution"""
    return 1.0 / heteroclinic_speed(curve, z)


def heteroclinic_time(curve: HeteroclinicCurve, z1: float) -> float:
    """Time to rise from z = 0 to z = z1 (negative for z1 < 0)

    :param curve: heteroclinic curve
    :param z1: target height with |z1| < z0
    :return: (2/√k)(z0 ln((z0+z1)/(z0−z1)) − z1)
    """

    _check_height(curve, z1)
    z0 = curve.z0
    return 2 / math.sqrt(curve.k) * (z0 * math.log((z0 + z1) / (z0 - z1)) - z1)


def heteroclinic_height_at(curve: HeteroclinicCurve, t: float) -> float:
    """Invert heteroclinic_time: the height reached after time t.
    Past the last representable height below z0 the result stays there.

    :param curve: heteroclinic curve
    :param t: time since the crossing of z = 0 (negative before it)
    :return: height with |z| < z0
    """

    if t == 0:
        return 0.0
    bound = curve.z0 * (1 - 1e-15)
    if abs(t) >= heteroclinic_time(curve, bound):
        return math.copysign(bound, t)
    return brentq(lambda z: heteroclinic_time(curve, z) - t, -bound, bound, xtol=1e-15)


@dataclass(frozen=True)
class RadialSolution:
    """Straight motion along z = 0, θ = const with ṙ²/2 = H + k/r².
    The signed quantity s(t) = ±√(2(Hr² + k)) is linear in time."""

    k: float
    H: float
    r0: float
    outgoing: bool = True
    theta: float = 0.0

    @property
    def turning_radius(self) -> Optional[float]:
        return math.sqrt(self.k / abs(self.H)) if self.H < 0 else None

    @property
    def initial_speed(self) -> float:
        return math.sqrt(max(2 * (self.H * self.r0 ** 2 + self.k), 0.0)) / self.r0

    def _signed_root(self, r: float) -> float:
        return math.sqrt(max(2 * (self.H * r * r + self.k), 0.0))

    def _s(self, t: float) -> float:
        s0 = self._signed_root(self.r0)
        return (s0 if self.outgoing else -s0) + 2 * self.H * t

    def time_to_origin(self) -> float:
        """Time until the solution reaches r = 0"""

        s0 = self._signed_root(self.r0)
        if self.H == 0:
            if self.outgoing:
                raise OutOfRangeError("Outgoing zero-energy motion never returns")
            return self.r0 ** 2 / (2 * math.sqrt(2 * self.k))
        # r = 0 when s = −√(2k)
        start = s0 if self.outgoing else -s0
        t = (-math.sqrt(2 * self.k) - start) / (2 * self.H)
        if t < 0:
            raise OutOfRangeError("Outgoing positive-energy motion never returns")
        return t

    def time_to_turn(self) -> float:
        if self.H >= 0:
            raise OutOfRangeError("Only negative-energy radial motion turns")
        if not self.outgoing:
            raise OutOfRangeError("Incoming motion reaches the origin before turning")
        return self._signed_root(self.r0) / (2 * abs(self.H))

    def time_to_radius(self, r: float) -> float:
        """Time to reach radius r on the outgoing branch"""

        if not self.outgoing or r < self.r0:
            raise OutOfRangeError("Radius is not reached on the outgoing branch")
        if self.H < 0 and r > self.turning_radius * (1 + 1e-12):
            raise OutOfRangeError("Radius lies beyond the turning point")
        if self.H == 0:
            return (r * r - self.r0 ** 2) / (2 * math.sqrt(2 * self.k))
        return (self._signed_root(r) - self._signed_root(self.r0)) / (2 * self.H)

    def radius_at(self, t: float) -> float:
        """Radius after time t, valid until the solution reaches the origin"""

        if t < 0:
            raise OutOfRangeError("Time must be non-negative")
        if self.H == 0:
            sign = 1.0 if self.outgoing else -1.0
            squared = self.r0 ** 2 + 2 * sign * math.sqrt(2 * self.k) * t
        else:
            s = self._s(t)
            squared = (s * s / 2 - self.k) / self.H
        if squared < 0:
            raise OutOfRangeError("Solution has already reached the origin")
        return math.sqrt(squared)

    def state_at(self, t: float) -> CylState:
        r = self.radius_at(t)
        if self.H == 0:
            speed = math.sqrt(2 * self.k) / r
            p_R = speed if self.outgoing else -speed
        else:
            p_R = self._s(t) / r
        return CylState(r, self.theta, 0.0, p_R, 0.0)

    def initial_state(self) -> CylState:
        return self.state_at(0.0)


def radial_solution(params: PotentialParams, H: float, r0: float, outgoing: bool = True,
                    theta: float = 0.0) -> RadialSolution:
    """Closed-form radial solution through the origin

    :param params: potential parameters
    :param H: energy
    :param r0: starting radius
    :param outgoing: whether r increases initially
    :param theta: constant angle of the line
    :return: radial solution
    """

    if not r0 > 0:
        raise InvalidArgumentError("Starting radius must be positive")
    if H < 0 and r0 > math.sqrt(params.k / abs(H)) * (1 + 1e-12):
        raise InconsistentStateError("Starting radius lies beyond the turning radius")
    return RadialSolution(params.k, H, r0, outgoing, theta)
