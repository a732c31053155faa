from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable
import numpy as np
from .constants import AXIS_THRESHOLD, RHO_MIN, GAUGE_COEFFICIENT
from .exceptions import AxisSingularityError, OriginSingularityError
from .geometry import CylState
from .potential import PotentialParams
from .utils import Utils


@dataclass(frozen=True)
class StateDerivative:
    dr: float
    dtheta: float
    dz: float
    dp_R: float
    dp_S: float

    def to_array(self) -> np.ndarray:
        return np.array([self.dr, self.dtheta, self.dz, self.dp_R, self.dp_S], dtype=float)


@dataclass(frozen=True)
class Observable:
    """Named real-valued function of a cylindrical state and the potential parameters"""

    name: str
    function: Callable[[CylState, PotentialParams], float]

    def __call__(self, s: CylState, params: PotentialParams) -> float:
        return float(self.function(s, params))

    @staticmethod
    def coordinate(name: str) -> Observable:
        """Observable returning one of the state fields r, theta, z, p_R, p_S"""
        return Observable(name, lambda s, params: getattr(s, name))

    def combine(self, other: Observable, alpha: float, beta: float) -> Observable:
        """Linear combination alpha*self + beta*other"""
        return Observable(f'{alpha}*{self.name}+{beta}*{other.name}',
                          lambda s, params: alpha * self(s, params) + beta * other(s, params))


def check_admissible(r: float, z: float):
    """Raise if (r, z) lies on the Oz axis or at the origin

    :param r: radius
    :param z: height
    """

    if r < AXIS_THRESHOLD:
        raise AxisSingularityError(f"State lies on the z-axis (r = {r})")
    if math.sqrt(r ** 4 + GAUGE_COEFFICIENT * z * z) <= RHO_MIN * RHO_MIN:
        raise OriginSingularityError("State lies at the origin")


def hamiltonian(s: CylState, params: PotentialParams) -> float:
    """Reduced Hamiltonian H = (p_R² + p_S²/r²)/2 − k/√(r⁴ + 16z²)

    :param s: admissible state
    :param params: potential parameters
    :return: energy
    """

    check_admissible(s.r, s.z)
    kinetic = (s.p_R * s.p_R + s.p_S * s.p_S / (s.r * s.r)) / 2
    return kinetic - params.k / math.sqrt(s.r ** 4 + GAUGE_COEFFICIENT * s.z * s.z)


def vector_field_array(y: np.ndarray, k: float) -> np.ndarray:
    """Equations of motion on a raw state array (r, θ, z, p_R, p_S)

    :param y: state array
    :param k: coupling constant
    :return: array of rates
    """

    r, _, z, p_R, p_S = y
    check_admissible(r, z)
    d = r ** 4 + GAUGE_COEFFICIENT * z * z
    d32 = d * math.sqrt(d)
    r2 = r * r
    return np.array([
        p_R,
        p_S / r2,
        p_S / 2,
        p_S * p_S / (r2 * r) - 2 * k * r2 * r / d32,
        -8 * k * r2 * z / d32,
    ])


def vector_field(s: CylState, params: PotentialParams) -> StateDerivative:
    """Rates of the reduced equations of motion

    :param s: admissible state
    :param params: potential parameters
    :return: state derivative
    """

    return StateDerivative(*(float(v) for v in vector_field_array(s.to_array(), params.k)))


def almost_poisson(F: Observable, G: Observable, s: CylState, params: PotentialParams) -> float:
    """Almost Poisson bracket {F, G} in the frame R = ∂r, S = ∂θ + (r²/2)∂z.
    All partials are central differences.

    :param F: first observable
    :param G: second observable
    :param s: admissible state
    :param params: potential parameters
    :return: bracket value
    """

    check_admissible(s.r, s.z)
    grad_f = Utils.state_gradient(lambda q: F(q, params), s)
    grad_g = Utils.state_gradient(lambda q: G(q, params), s)

    half_r2 = s.r * s.r / 2
    rf, sf = grad_f[0], grad_f[1] + half_r2 * grad_f[2]
    rg, sg = grad_g[0], grad_g[1] + half_r2 * grad_g[2]

    # Grouped so that swapping F and G negates the result exactly
    first = grad_g[3] * rf + grad_g[4] * sf
    second = grad_f[3] * rg + grad_f[4] * sg
    return float(first - second)


def time_reversed(s: CylState) -> CylState:
    """Time-reversal map (p_R, p_S) → (−p_R, −p_S)"""
    return CylState(s.r, s.theta, s.z, -s.p_R, -s.p_S)


HAMILTONIAN = Observable('H', hamiltonian)
