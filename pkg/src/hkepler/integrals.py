from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional
import numpy as np
from .constants import CLASSIFY_TOL, GAUGE_COEFFICIENT
from .dynamics import Observable, check_admissible, hamiltonian, HAMILTONIAN
from .geometry import CylState
from .kepler_enums import IntegralCase
from .potential import PotentialParams
from .utils import Utils


@dataclass(frozen=True)
class IntegralValues:
    """Conserved fingerprint of a trajectory"""

    k: float
    H: float
    F1: float
    F2: float
    F3: float
    J: float
    theta0: Optional[float]
    case: IntegralCase

    def as_dict(self) -> dict:
        return {
            'k': self.k, 'H': self.H, 'F1': self.F1, 'F2': self.F2, 'F3': self.F3,
            'J': self.J, 'theta0': self.theta0, 'case': self.case.name,
        }


def default_tolerance(k: float) -> float:
    return CLASSIFY_TOL * max(1.0, k * k)


def _rotating_parts(s: CylState, params: PotentialParams, corrupt: bool = False) -> tuple[float, float]:
    # F1 = A cos2θ + B sin2θ and F2 = −A sin2θ + B cos2θ
    r, z, p_R, p_S = s.r, s.z, s.p_R, s.p_S
    check_admissible(r, z)
    potential_term = params.k * r * r / math.sqrt(r ** 4 + GAUGE_COEFFICIENT * z * z)
    if corrupt:
        potential_term = -potential_term
    a = p_R * p_S * r - 2 * p_R * p_R * z + 2 * p_S * p_S * z / (r * r)
    b = 4 * p_R * p_S * z / r - p_S * p_S + potential_term
    return a, b


def f1(s: CylState, params: PotentialParams, corrupt: bool = False) -> float:
    """First integral F₁

    :param s: admissible state
    :param params: potential parameters
    :param corrupt: flip the sign of the potential term (negative control)
    :return: value of F₁
    """

    a, b = _rotating_parts(s, params, corrupt)
    return a * math.cos(2 * s.theta) + b * math.sin(2 * s.theta)


def f2(s: CylState, params: PotentialParams) -> float:
    a, b = _rotating_parts(s, params)
    return -a * math.sin(2 * s.theta) + b * math.cos(2 * s.theta)


def f3(s: CylState, params: PotentialParams) -> float:
    """First integral F₃ in expanded form"""

    r, z, p_R, p_S = s.r, s.z, s.p_R, s.p_S
    check_admissible(r, z)
    root = math.sqrt(r ** 4 + GAUGE_COEFFICIENT * z * z)
    return (4 * z * z * p_R * p_R - 4 * r * z * p_R * p_S
            + (r ** 4 + 4 * z * z) * p_S * p_S / (r * r)
            + 8 * params.k * z * z / root)


def f3_compact(s: CylState, params: PotentialParams) -> float:
    """F₃ as a square plus a nonnegative term"""

    r, z, p_R, p_S = s.r, s.z, s.p_R, s.p_S
    check_admissible(r, z)
    root = math.sqrt(r ** 4 + GAUGE_COEFFICIENT * z * z)
    square = 2 * z * p_R - r * p_S
    return square * square + 4 * z * z * (p_S * p_S / (r * r) + 2 * params.k / root)


def classify(v: IntegralValues, tol: float | None = None) -> IntegralCase:
    """Classify integral values into the general case or one of the special cases

    :param v: integral values
    :param tol: tolerance (None for 1e-9 * max(1, k²))
    :return: case
    """

    if tol is None:
        tol = default_tolerance(v.k)
    if v.F3 <= tol:
        return IntegralCase.DEGENERATE
    if v.J <= tol:
        return IntegralCase.MIN_ENERGY
    return IntegralCase.GENERAL


def normalized_theta0(F1: float, F2: float) -> float:
    theta0 = 0.5 * math.atan2(F1, F2)
    if theta0 < 0:
        theta0 += math.pi
    return theta0


def evaluate_integrals(s: CylState, params: PotentialParams, tol: float | None = None) -> IntegralValues:
    """Evaluate H, F₁, F₂, F₃ and the derived J, θ₀ and case

    :param s: admissible state
    :param params: potential parameters
    :param tol: classification tolerance (None for the default)
    :return: integral values
    """

    if tol is None:
        tol = default_tolerance(params.k)

    H = hamiltonian(s, params)
    F1, F2, F3 = f1(s, params), f2(s, params), f3(s, params)
    J = math.hypot(F1, F2)
    theta0 = normalized_theta0(F1, F2) if J > tol else None

    values = IntegralValues(params.k, H, F1, F2, F3, J, theta0, IntegralCase.GENERAL)
    return IntegralValues(params.k, H, F1, F2, F3, J, theta0, classify(values, tol))


def relation_residual(v: IntegralValues, params: PotentialParams) -> float:
    """Residual of F₁² + F₂² = 2HF₃ + k²"""
    return v.F1 * v.F1 + v.F2 * v.F2 - 2 * v.H * v.F3 - params.k * params.k


def surface_identity_residual(s: CylState, params: PotentialParams) -> float:
    """Residual of F₃ = 8z²H + k√(r⁴+16z²) − r²(F₁ sin2θ + F₂ cos2θ), which holds
    on the whole phase space

    :param s: admissible state
    :param params: potential parameters
    :return: signed residual
    """

    v = evaluate_integrals(s, params)
    root = math.sqrt(s.r ** 4 + GAUGE_COEFFICIENT * s.z * s.z)
    rotated = v.F1 * math.sin(2 * s.theta) + v.F2 * math.cos(2 * s.theta)
    return 8 * s.z * s.z * v.H + params.k * root - s.r * s.r * rotated - v.F3


def independence_margin(s: CylState, params: PotentialParams) -> float:
    """Smallest singular value of the row-normalized Jacobian of (H, F₁, F₃)

    :param s: admissible state
    :param params: potential parameters
    :return: margin (positive where the integrals are independent)
    """

    rows = [Utils.state_gradient(lambda q, fn=fn: fn(q, params), s) for fn in (hamiltonian, f1, f3)]
    jacobian = np.array(rows)
    jacobian /= np.linalg.norm(jacobian, axis=1, keepdims=True)
    return float(np.linalg.svd(jacobian, compute_uv=False)[-1])


F1_OBSERVABLE = Observable('F1', f1)
F2_OBSERVABLE = Observable('F2', f2)
F3_OBSERVABLE = Observable('F3', f3)
CORRUPTED_F1_OBSERVABLE = Observable('F1_corrupted', lambda s, params: f1(s, params, corrupt=True))
FIRST_INTEGRALS = (HAMILTONIAN, F1_OBSERVABLE, F2_OBSERVABLE, F3_OBSERVABLE)
