from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence
import numpy as np
import sympy as sp
from .constants import *
from .exceptions import InconsistentStateError, InvalidArgumentError, InvalidCaseError
from .integrals import IntegralValues, default_tolerance
from .kepler_enums import ConicKind, IntegralCase, SurfaceBranch


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SurfaceSpec:
    """Parameters (k, H, F₃, θ₀) of one invariant surface"""

    k: float
    H: float
    F3: float
    theta0: Optional[float]
    J: float
    case: IntegralCase

    def __post_init__(self):
        if not self.k > 0:
            raise InvalidArgumentError("Coupling constant k must be positive")
        if self.F3 < 0:
            raise InvalidArgumentError("F3 must be non-negative")

    @staticmethod
    def from_parameters(k: float, H: float, F3: float, theta0: float | None = 0.0,
                        tol: float | None = None) -> SurfaceSpec:
        """Build a spec from (k, H, F₃, θ₀), deriving J and the case

        :param k: coupling constant
        :param H: energy
        :param F3: value of F₃
        :param theta0: orientation angle (ignored when J = 0)
        :param tol: classification tolerance
        :return: surface spec
        """

        if tol is None:
            tol = default_tolerance(k)
        j_squared = k * k + 2 * H * F3
        if j_squared < -tol:
            raise InconsistentStateError(f"k² + 2HF₃ = {j_squared} is negative")
        J = math.sqrt(max(j_squared, 0.0))

        if F3 <= tol:
            case = IntegralCase.DEGENERATE
        elif J <= tol:
            case = IntegralCase.MIN_ENERGY
        else:
            case = IntegralCase.GENERAL
        if case == IntegralCase.MIN_ENERGY:
            theta0 = None
        elif theta0 is not None:
            theta0 = math.fmod(theta0, math.pi)
            if theta0 < 0:
                theta0 += math.pi
        return SurfaceSpec(k, H, F3, theta0, J, case)

    @staticmethod
    def from_integrals(v: IntegralValues) -> SurfaceSpec:
        return SurfaceSpec(v.k, v.H, v.F3, v.theta0, v.J, v.case)

    @property
    def orientation(self) -> float:
        return self.theta0 if self.theta0 is not None else 0.0

    def as_dict(self) -> dict:
        return {'k': self.k, 'H': self.H, 'F3': self.F3, 'theta0': self.theta0,
                'J': self.J, 'case': self.case.name}


@dataclass
class SurfaceMesh:
    spec: SurfaceSpec
    r: np.ndarray
    theta: np.ndarray
    z: np.ndarray
    branch: list[SurfaceBranch] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.r)

    def points(self):
        return zip(self.r, self.theta, self.z)


@dataclass(frozen=True)
class DegenerateLine:
    """The horizontal line z = 0, θ = θ₀ mod π"""

    theta0: float
    z: float = 0.0

    @property
    def direction(self) -> tuple[float, float]:
        return math.cos(self.theta0), math.sin(self.theta0)

    def distance(self, point: Sequence[float]) -> float:
        """Euclidean distance of a cylindrical point (r, θ, z) to the line"""
        r, theta, z = point
        offset = r * math.sin(theta - self.theta0)
        return math.hypot(offset, z - self.z)


@dataclass(frozen=True)
class TraceConic:
    """Trace of the surface on z = 0: (k − J)u² + (k + J)v² = F₃ with
    u along θ₀ and v along θ₀ + π/2"""

    kind: ConicKind
    theta0: float
    k: float
    J: float
    F3: float
    semiaxes: tuple[float, ...] = ()
    axis_angle: float = 0.0
    line_offset: Optional[float] = None
    conjugate_semiaxis: Optional[float] = None

    def residual(self, x: float, y: float) -> float:
        u = x * math.cos(self.theta0) + y * math.sin(self.theta0)
        v = -x * math.sin(self.theta0) + y * math.cos(self.theta0)
        return (self.k - self.J) * u * u + (self.k + self.J) * v * v - self.F3

    def as_dict(self) -> dict:
        return {
            'kind': self.kind.name,
            'theta0': self.theta0,
            'semiaxes': list(self.semiaxes),
            'axis_angle': self.axis_angle,
            'line_offset': self.line_offset,
            'line_separation': None if self.line_offset is None else 2 * self.line_offset,
            'conjugate_semiaxis': self.conjugate_semiaxis,
        }


def _require_case(spec: SurfaceSpec, *cases: IntegralCase):
    if spec.case not in cases:
        names = ', '.join(case.name for case in cases)
        raise InvalidCaseError(f"Operation requires case {names}, got {spec.case.name}")


def equation_residual(point: Sequence[float], spec: SurfaceSpec) -> float:
    """Residual of 8z²H + k√(r⁴+16z²) − J r² cos(2(θ−θ₀)) − F₃ for any case"""

    r, theta, z = point
    root = math.sqrt(r ** 4 + GAUGE_COEFFICIENT * z * z)
    return (8 * z * z * spec.H + spec.k * root
            - spec.J * r * r * math.cos(2 * (theta - spec.orientation)) - spec.F3)


def surface_residual(point: Sequence[float], spec: SurfaceSpec) -> float:
    """Signed residual of the invariant surface equation

    :param point: cylindrical point (r, θ, z)
    :param spec: general-case surface spec
    :return: residual, zero on the surface
    """

    _require_case(spec, IntegralCase.GENERAL)
    return equation_residual(point, spec)


def min_energy_residual(point: Sequence[float], spec: SurfaceSpec) -> float:
    """Residual of the ellipsoid 4k²z² + kF₃r² − F₃² = 0"""

    _require_case(spec, IntegralCase.MIN_ENERGY)
    r, _, z = point
    return 4 * spec.k * spec.k * z * z + spec.k * spec.F3 * r * r - spec.F3 * spec.F3


def degenerate_locus(spec: SurfaceSpec) -> DegenerateLine:
    _require_case(spec, IntegralCase.DEGENERATE)
    return DegenerateLine(spec.orientation)


def solve_cell(spec: SurfaceSpec, r: float, theta: float,
               tol: float = DEFAULT_MESH_TOL) -> list[tuple[float, SurfaceBranch]]:
    """Solve the squared surface equation for w = z² at one (r, θ) node

    :param spec: surface spec
    :param r: radius
    :param theta: angle
    :param tol: tolerance for clamping tiny negative roots
    :return: list of (w, branch label) for every nonnegative real root
    """

    k, H = spec.k, spec.H
    a_part = spec.F3 + spec.J * r * r * math.cos(2 * (theta - spec.orientation))

    # 64H²w² − 16(AH + k²)w + (A² − k²r⁴) = 0
    qa = 64 * H * H
    qb = -16 * (a_part * H + k * k)
    qc = a_part * a_part - k * k * r ** 4
    roots = []

    if H == 0:
        if qb != 0:
            roots.append(-qc / qb)
    else:
        disc = qb * qb - 4 * qa * qc
        if disc < 0:
            if disc < -tol * qb * qb:
                return []
            disc = 0.0
        q = -(qb + math.copysign(math.sqrt(disc), qb)) / 2
        roots.append(q / qa)
        if disc > 0 and q != 0:
            roots.append(qc / q)

    result = []

    for w in roots:
        if w < -tol:
            continue
        w = max(w, 0.0)
        if a_part - 8 * H * w < -tol * max(1.0, abs(a_part)):
            branch = SurfaceBranch.SPURIOUS
        elif H < 0 and math.sqrt(r ** 4 + GAUGE_COEFFICIENT * w) > k / abs(H) * (1 + ENERGY_SHELL_RTOL):
            branch = SurfaceBranch.OUTSIDE_ENERGY_SHELL
        else:
            branch = SurfaceBranch.REACHABLE
        result.append((w, branch))
    return result


def default_r_max(spec: SurfaceSpec) -> float:
    if spec.H < 0:
        return math.sqrt(spec.F3 / (spec.k - spec.J))
    return DEFAULT_SURFACE_R_MAX


def sample_surface(spec: SurfaceSpec, n_r: int = DEFAULT_N_R, n_theta: int = DEFAULT_N_THETA,
                   r_max: float | None = None, include_rejected: bool = False,
                   tol: float = DEFAULT_MESH_TOL) -> SurfaceMesh:
    """Sample the invariant surface on a uniform (r, θ) grid

    :param spec: general or minimal-energy surface spec
    :param n_r: number of radial nodes
    :param n_theta: number of angular nodes
    :param r_max: outer radius (None for the trace extent when H < 0, a fixed clip otherwise)
    :param include_rejected: also emit spurious and out-of-shell roots
    :param tol: mesh tolerance
    :return: mesh of ±z points
    """

    _require_case(spec, IntegralCase.GENERAL, IntegralCase.MIN_ENERGY)
    if n_r < 2 or n_theta < 1:
        raise InvalidArgumentError("Mesh needs at least two radial nodes and one angular node")
    if r_max is None:
        r_max = default_r_max(spec)

    rs, thetas, zs, branches = [], [], [], []

    for r in np.linspace(0.0, r_max, n_r):
        for theta in np.linspace(0.0, 2 * math.pi, n_theta, endpoint=False):
            for w, branch in solve_cell(spec, float(r), float(theta), tol):
                if branch != SurfaceBranch.REACHABLE and not include_rejected:
                    continue
                z = math.sqrt(w)
                for signed_z in ((z, -z) if z > 0 else (0.0,)):
                    rs.append(r)
                    thetas.append(theta)
                    zs.append(signed_z)
                    branches.append(branch)

    logger.info("Sampled %d surface points (case %s)", len(rs), spec.case.name)
    return SurfaceMesh(spec, np.array(rs), np.array(thetas), np.array(zs), branches)


def mesh_max_residual(mesh: SurfaceMesh) -> float:
    values = [abs(equation_residual(p, mesh.spec)) for p, branch in zip(mesh.points(), mesh.branch)
              if branch != SurfaceBranch.SPURIOUS]
    return max(values, default=0.0)


def trace_conic(spec: SurfaceSpec) -> TraceConic:
    """Describe the trace of the surface on the plane z = 0

    :param spec: non-degenerate surface spec
    :return: ellipse (H < 0), pair of parallel lines (H = 0) or hyperbola (H > 0)

    For H = 0 the lines sit at distance √(F₃/(2k)) from the θ₀ axis (1/√2, not 1,
    when k = F₃ = 1).
    """

    _require_case(spec, IntegralCase.GENERAL, IntegralCase.MIN_ENERGY)
    k, J, F3, theta0 = spec.k, spec.J, spec.F3, spec.orientation

    if spec.H < 0:
        semiaxes = (math.sqrt(F3 / (k - J)), math.sqrt(F3 / (k + J)))
        return TraceConic(ConicKind.ELLIPSE, theta0, k, J, F3, semiaxes, theta0)
    if spec.H == 0:
        # J = k, so the u² term drops and |v| is constant
        offset = math.sqrt(F3 / (2 * k))
        return TraceConic(ConicKind.PARALLEL_LINES, theta0, k, J, F3, (), theta0, line_offset=offset)
    transverse = math.sqrt(F3 / (k + J))
    conjugate = math.sqrt(F3 / (J - k))
    return TraceConic(ConicKind.HYPERBOLA, theta0, k, J, F3, (transverse,),
                      theta0 + math.pi / 2, conjugate_semiaxis=conjugate)


@lru_cache(maxsize=1)
def _symbolic_quartic():
    x, y, w, k, H, F3, J, C, S = sp.symbols('x y w k H F3 J C S', real=True)
    rotated = C * (x ** 2 - y ** 2) + 2 * S * x * y
    expression = k ** 2 * ((x ** 2 + y ** 2) ** 2 + 16 * w) - (F3 - 8 * w * H + J * rotated) ** 2
    poly = sp.Poly(sp.expand(expression), x, y, w)
    parameters = (k, H, F3, J, C, S)
    return {monom: sp.lambdify(parameters, coeff, 'math') for monom, coeff in poly.terms()}


@dataclass(frozen=True)
class QuarticSurface:
    """Polynomial k²((x²+y²)²+16w) − (F₃ − 8wH + J(C(x²−y²) + 2Sxy))² in (x, y, w = z²)"""

    coefficients: dict

    def evaluate(self, x: float, y: float, z: float) -> float:
        w = z * z
        return sum(c * x ** i * y ** j * w ** l for (i, j, l), c in self.coefficients.items())

    def relative_residual(self, x: float, y: float, z: float) -> float:
        w = z * z
        scale = sum(abs(c * x ** i * y ** j * w ** l) for (i, j, l), c in self.coefficients.items())
        return self.evaluate(x, y, z) / max(scale, 1e-300)

    def coefficient(self, x_power: int, y_power: int, w_power: int) -> float:
        return self.coefficients.get((x_power, y_power, w_power), 0.0)


def cartesian_quartic(spec: SurfaceSpec) -> QuarticSurface:
    """Coefficient table of the squared surface equation in Cartesian form

    :param spec: general-case surface spec
    :return: quartic polynomial in (x, y, z²)
    """

    _require_case(spec, IntegralCase.GENERAL)
    values = (spec.k, spec.H, spec.F3, spec.J,
              math.cos(2 * spec.orientation), math.sin(2 * spec.orientation))
    coefficients = {monom: float(fn(*values)) for monom, fn in _symbolic_quartic().items()}
    return QuarticSurface(coefficients)
