from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence
import numpy as np
from scipy import linalg
from .config import ToleranceProfile
from .constants import *
from .dynamics import Observable, HAMILTONIAN, almost_poisson, check_admissible, vector_field_array
from .exceptions import InvalidArgumentError, InvalidEnsembleError
from .geometry import CartPoint, CylState
from .integrals import (CORRUPTED_F1_OBSERVABLE, F1_OBSERVABLE, F2_OBSERVABLE, F3_OBSERVABLE,
                        evaluate_integrals, f3_compact, relation_residual)
from .integrator import IntegratorConfig, Trajectory, integrate
from .potential import PotentialParams, potential_U, random_gauge_point, sublaplacian_residual
from .utils import Utils


logger = logging.getLogger(__name__)

Coefficient = Callable[[float, float, float, float], float]


@dataclass(frozen=True)
class AppendixConstants:
    c2: float = 0.0
    c3: float = 0.0
    c4: float = 0.0


@dataclass(frozen=True)
class QuadraticCandidate:
    """F = a p_R² + d p_R p_S + b p_S² + h with coefficients depending on (r, θ, z, k)"""

    a: Coefficient
    d: Coefficient
    b: Coefficient
    h: Coefficient
    name: str = 'candidate'

    def value(self, s: CylState, params: PotentialParams) -> float:
        args = (s.r, s.theta, s.z, params.k)
        return (self.a(*args) * s.p_R * s.p_R + self.d(*args) * s.p_R * s.p_S
                + self.b(*args) * s.p_S * s.p_S + self.h(*args))

    def observable(self) -> Observable:
        return Observable(self.name, self.value)


def _root(r: float, z: float) -> float:
    return math.sqrt(r ** 4 + GAUGE_COEFFICIENT * z * z)


def tilde_coefficients(c: AppendixConstants) -> QuadraticCandidate:
    """Coefficient functions of F̃ = c₂F₁ + c₃F₂ + c₄F₃

    :param c: constants (c₂, c₃, c₄)
    :return: quadratic candidate
    """

    c2, c3, c4 = c.c2, c.c3, c.c4

    def a(r, theta, z, k):
        return 2 * z * (2 * c4 * z - c2 * math.cos(2 * theta) + c3 * math.sin(2 * theta))

    def d(r, theta, z, k):
        return ((c2 * r + 4 * c3 * z / r) * math.cos(2 * theta)
                - (c3 * r - 4 * c2 * z / r) * math.sin(2 * theta) - 4 * c4 * r * z)

    def b(r, theta, z, k):
        return (((-c3 * r * r + 2 * c2 * z) * math.cos(2 * theta)
                 - (c2 * r * r + 2 * c3 * z) * math.sin(2 * theta)
                 + c4 * (r ** 4 + 4 * z * z)) / (r * r))

    def h(r, theta, z, k):
        return k * (r * r * (c3 * math.cos(2 * theta) + c2 * math.sin(2 * theta)) + 8 * c4 * z * z) / _root(r, z)

    return QuadraticCandidate(a, d, b, h, f'F~({c2}, {c3}, {c4})')


def hamiltonian_candidate() -> QuadraticCandidate:
    """Coefficients of 2H: a = 1, d = 0, b = 1/r², h = 2U"""

    return QuadraticCandidate(
        lambda r, theta, z, k: 1.0,
        lambda r, theta, z, k: 0.0,
        lambda r, theta, z, k: 1.0 / (r * r),
        lambda r, theta, z, k: -2 * k / _root(r, z),
        '2H',
    )


def integral_residual(F: Observable, s: CylState, params: PotentialParams) -> float:
    """dF/dt along the equations of motion, with central-difference partials of F

    :param F: observable
    :param s: admissible state
    :param params: potential parameters
    :return: time derivative of F (zero where F is conserved)
    """

    rates = vector_field_array(s.to_array(), params.k)
    gradient = Utils.state_gradient(lambda q: F(q, params), s)
    return float(np.dot(gradient, rates))


def pde_residuals(cand: QuadraticCandidate, point: Sequence[float], params: PotentialParams) -> tuple[float, ...]:
    """Residuals of the six coefficient equations a quadratic integral must solve.
    The two h-equations are divided by 2r³D^(3/2) and rD^(3/2).

    :param cand: quadratic candidate
    :param point: (r, θ, z) away from the axis and the origin
    :param params: potential parameters
    :return: six residuals
    """

    r, theta, z = (float(v) for v in point)
    check_admissible(r, z)
    k = params.k
    position = np.array([r, theta, z])

    def partials(fn: Coefficient) -> np.ndarray:
        return Utils.gradient(lambda q: fn(q[0], q[1], q[2], k), position)

    a_r, a_t, a_z = partials(cand.a)
    d_r, d_t, d_z = partials(cand.d)
    b_r, b_t, b_z = partials(cand.b)
    h_r, h_t, h_z = partials(cand.h)
    a, d, b = cand.a(r, theta, z, k), cand.d(r, theta, z, k), cand.b(r, theta, z, k)
    d32 = _root(r, z) ** 3

    return (
        a_r,
        2 * a_t + r * r * (a_z + 2 * d_r),
        4 * a + r ** 3 * d_z + 2 * r * (d_t + r * r * b_r),
        2 * d + r ** 3 * b_z + 2 * r * b_t,
        h_r - (4 * k * r ** 3 * a + 8 * k * r * r * z * d) / d32,
        r * r * h_z + 2 * h_t - (4 * k * r ** 5 * d + 32 * k * r ** 4 * z * b) / d32,
    )


@dataclass
class ProbeResult:
    residual: float
    basis_size: int
    momentum_degree: int
    n_trajectories: int
    n_samples: int
    flagged: bool = False
    note: str = ''

    def as_dict(self) -> dict:
        return {
            'residual': self.residual, 'basis_size': self.basis_size,
            'momentum_degree': self.momentum_degree, 'n_trajectories': self.n_trajectories,
            'n_samples': self.n_samples, 'flagged': self.flagged, 'note': self.note,
        }


def _positional_basis(r, theta, z, degree: int, modes: int) -> list[np.ndarray]:
    inv_root = 1.0 / np.sqrt(r ** 4 + GAUGE_COEFFICIENT * z * z)
    fourier = [np.ones_like(theta)]
    for m in range(1, modes + 1):
        fourier += [np.cos(m * theta), np.sin(m * theta)]

    columns = []
    for a in range(-2, degree + 1):
        for b in range(0, degree + 1):
            if a + b > degree:
                continue
            monomial = r ** a * z ** b
            for wave in fourier:
                columns.append(monomial * wave)
                columns.append(monomial * wave * inv_root)
    return columns


def _momentum_monomials(p_R, p_S, momentum_degree: int) -> list[np.ndarray]:
    monomials = [np.ones_like(p_R), p_R, p_S]
    if momentum_degree >= 2:
        monomials += [p_R * p_R, p_R * p_S, p_S * p_S]
    return monomials


def probe_features(states: np.ndarray, degree: int, momentum_degree: int,
                   modes: int = PROBE_FOURIER_MODES) -> np.ndarray:
    """Feature matrix of f(r,θ,z)·(momentum monomial) products over a function basis

    :param states: array of (r, θ, z, p_R, p_S) rows
    :param degree: total degree bound of the r^a z^b factors
    :param momentum_degree: 1 for linear-in-momenta functions, 2 for quadratic
    :param modes: highest Fourier mode in θ
    :return: feature matrix
    """

    r, theta, z, p_R, p_S = states.T
    positional = _positional_basis(r, theta, z, degree, modes)
    momenta = _momentum_monomials(p_R, p_S, momentum_degree)
    return np.column_stack([f * m for m in momenta for f in positional])


def _fingerprint(traj: Trajectory) -> np.ndarray:
    return traj.integral_history[0]


def linear_probe(params: PotentialParams, ensemble: Sequence[Trajectory], basis_size: int = PROBE_DEGREE,
                 momentum_degree: int = 1, max_samples: int = PROBE_MAX_SAMPLES) -> ProbeResult:
    """Best conserved-quantity fit over a finite basis: the minimum over basis
    combinations of within-trajectory variance divided by ensemble variance.
    A value bounded away from zero is evidence that no such integral exists.

    :param params: potential parameters
    :param ensemble: trajectories with distinct integral fingerprints
    :param basis_size: degree bound of the positional basis
    :param momentum_degree: 1 to search linear-in-momenta functions, 2 for the quadratic control
    :param max_samples: samples used per trajectory
    :return: probe result
    """

    if not ensemble:
        raise InvalidEnsembleError("Ensemble is empty")

    fingerprints = np.array([_fingerprint(traj) for traj in ensemble])
    distinct = 1 + sum(
        1 for i in range(1, len(fingerprints))
        if np.min(np.max(np.abs(fingerprints[:i] - fingerprints[i]), axis=1)) > DEFAULT_IDENTITY_TOL
    )
    if len(ensemble) > 1 and distinct == 1:
        raise InvalidEnsembleError("All trajectories in the ensemble share one level set")

    blocks, labels = [], []

    for index, traj in enumerate(ensemble):
        stride = max(1, int(math.ceil(len(traj) / max_samples)))
        rows = traj.states[::stride]
        blocks.append(rows)
        labels.append(np.full(len(rows), index))
    states = np.vstack(blocks)
    labels = np.concatenate(labels)

    features = probe_features(states, basis_size, momentum_degree)
    features = features - features.mean(axis=0)
    spread = features.std(axis=0)
    features = features[:, spread > 0] / spread[spread > 0]

    # Orthonormal basis of the feature span in sample space
    u, singular, _ = linalg.svd(features, full_matrices=False)
    kept = u[:, singular > PROBE_RCOND * singular[0]]

    within = kept.copy()
    for index in range(len(ensemble)):
        mask = labels == index
        within[mask] -= within[mask].mean(axis=0)
    residual = float(linalg.svd(within, compute_uv=False)[-1] ** 2)

    flagged = distinct < PROBE_MIN_TRAJECTORIES
    note = 'evidence only; basis: r^a z^b (a >= -2, a+b <= degree) x Fourier modes x {1, 1/sqrt(r^4+16z^2)}'
    if flagged:
        note = f'ensemble has only {distinct} distinct level sets; residual may be spuriously small. ' + note

    logger.info("Probe with momentum degree %d: residual %.3g over %d columns",
                momentum_degree, residual, kept.shape[1])
    return ProbeResult(residual, features.shape[1], momentum_degree, len(ensemble), len(states), flagged, note)


def probe_ensemble(params: PotentialParams, count: int = PROBE_MIN_TRAJECTORIES, t_end: float = 30.0) -> list[Trajectory]:
    """Bounded trajectories starting near the unit circle at rotated angles,
    so that their configuration surfaces intersect

    :param params: potential parameters
    :param count: number of trajectories
    :param t_end: integration horizon
    :return: list of trajectories
    """

    cfg = IntegratorConfig(t_end=t_end, sample_interval=t_end / PROBE_MAX_SAMPLES)
    ensemble = []

    for i in range(count):
        start = CylState(1.0, 2 * math.pi * i / count, 0.05 * i, 0.1, 0.3 + 0.05 * i)
        ensemble.append(integrate(start, cfg, params))
    return ensemble


@dataclass
class SuiteResult:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {'passed': self.passed, 'measured': self.measured, 'thresholds': self.thresholds}


@dataclass(frozen=True)
class SuiteSizes:
    bracket_states: int = 1000
    identity_states: int = 10000
    pde_points: int = 100
    harmonic_points: int = 100
    probe_trajectories: int = PROBE_MIN_TRAJECTORIES


def bracket_suite(params: PotentialParams, profile: ToleranceProfile, rng: np.random.Generator,
                  count: int, corrupt_f1: bool = False) -> SuiteResult:
    first = CORRUPTED_F1_OBSERVABLE if corrupt_f1 else F1_OBSERVABLE
    integrals = (first, F2_OBSERVABLE, F3_OBSERVABLE)
    bracket_max = {obs.name: 0.0 for obs in integrals}
    residual_max = {obs.name: 0.0 for obs in integrals}
    antisymmetry = oracle_gap = 0.0

    for s in Utils.random_admissible_states(rng, count):
        for obs in integrals:
            bracket = almost_poisson(obs, HAMILTONIAN, s, params)
            residual = integral_residual(obs, s, params)
            bracket_max[obs.name] = max(bracket_max[obs.name], abs(bracket))
            residual_max[obs.name] = max(residual_max[obs.name], abs(residual))
            oracle_gap = max(oracle_gap, abs(bracket - residual))
        antisymmetry = max(antisymmetry, abs(almost_poisson(first, F3_OBSERVABLE, s, params)
                                             + almost_poisson(F3_OBSERVABLE, first, s, params)))

    worst = max(max(bracket_max.values()), max(residual_max.values()))
    passed = worst <= profile.bracket_tol and antisymmetry <= 1e-10
    return SuiteResult('bracket', passed,
                       {'bracket_max': bracket_max, 'integral_residual_max': residual_max,
                        'antisymmetry_max': antisymmetry, 'oracle_gap_max': oracle_gap},
                       {'bracket_tol': profile.bracket_tol, 'antisymmetry': 1e-10})


def relation_suite(params: PotentialParams, profile: ToleranceProfile, rng: np.random.Generator,
                   count: int) -> SuiteResult:
    relation_max = forms_max = 0.0
    f3_min = math.inf

    for s in Utils.random_admissible_states(rng, count):
        v = evaluate_integrals(s, params)
        scale = max(params.k * params.k, abs(2 * v.H * v.F3))
        relation_max = max(relation_max, abs(relation_residual(v, params)) / scale)
        compact = f3_compact(s, params)
        forms_max = max(forms_max, abs(v.F3 - compact) / max(abs(compact), 1e-300))
        f3_min = min(f3_min, v.F3)

    passed = relation_max <= profile.identity_tol and forms_max <= F3_FORMS_TOL and f3_min >= 0
    return SuiteResult('relation', passed,
                       {'relation_residual_max': relation_max, 'f3_forms_max': forms_max, 'f3_min': f3_min},
                       {'identity_tol': profile.identity_tol, 'f3_forms': F3_FORMS_TOL})


def pde_suite(params: PotentialParams, profile: ToleranceProfile, rng: np.random.Generator,
              count: int) -> SuiteResult:
    pde_max = [0.0] * 6
    identity_max = hamiltonian_max = 0.0
    hamiltonian_cand = hamiltonian_candidate()
    observables = (F1_OBSERVABLE, F2_OBSERVABLE, F3_OBSERVABLE)

    for s in Utils.random_admissible_states(rng, count):
        c = AppendixConstants(*(float(v) for v in rng.uniform(-1, 1, 3)))
        cand = tilde_coefficients(c)
        point = (s.r, s.theta, s.z)
        for i, value in enumerate(pde_residuals(cand, point, params)):
            pde_max[i] = max(pde_max[i], abs(value))
        hamiltonian_max = max(hamiltonian_max, *(abs(v) for v in pde_residuals(hamiltonian_cand, point, params)))

        expected = sum(coef * obs(s, params) for coef, obs in zip((c.c2, c.c3, c.c4), observables))
        scale = sum(abs(coef * obs(s, params)) for coef, obs in zip((c.c2, c.c3, c.c4), observables))
        identity_max = max(identity_max, abs(cand.value(s, params) - expected) / max(scale, 1e-300))

    passed = max(pde_max) <= profile.fd_tol and hamiltonian_max <= profile.fd_tol and identity_max <= 1e-12
    return SuiteResult('pde', passed,
                       {'system_max': pde_max, 'hamiltonian_max': hamiltonian_max, 'identity_max': identity_max},
                       {'fd_tol': profile.fd_tol, 'identity': 1e-12})


def harmonic_suite(params: PotentialParams, profile: ToleranceProfile, rng: np.random.Generator,
                   count: int) -> SuiteResult:
    relative_max = 0.0

    for _ in range(count):
        p = random_gauge_point(rng, float(rng.uniform(0.5, 5.0)))
        relative_max = max(relative_max, abs(sublaplacian_residual(p, params)) / abs(potential_U(p, params)))

    # Second-order convergence and the wrong-coefficient control
    probe_point = CartPoint(1.0, 0.5, 0.3)
    coarse = sublaplacian_residual(probe_point, params, h=1e-2)
    fine = sublaplacian_residual(probe_point, params, h=5e-3)
    ratio = coarse / fine
    control = abs(sublaplacian_residual(probe_point, params, gauge_coefficient=1 / 16)) \
        / abs(potential_U(probe_point, params, gauge_coefficient=1 / 16))

    passed = relative_max <= profile.harmonic_tol and 3.5 <= ratio <= 4.5 and control > profile.harmonic_tol
    return SuiteResult('harmonic', passed,
                       {'relative_max': relative_max, 'convergence_ratio': ratio, 'control_relative': control},
                       {'harmonic_tol': profile.harmonic_tol, 'convergence_ratio': [3.5, 4.5]})


def probe_suite(params: PotentialParams, profile: ToleranceProfile, count: int) -> SuiteResult:
    ensemble = probe_ensemble(params, count)
    linear = linear_probe(params, ensemble, momentum_degree=1)
    quadratic = linear_probe(params, ensemble, momentum_degree=2)
    passed = linear.residual >= profile.probe_floor and quadratic.residual <= profile.probe_control
    return SuiteResult('probe', passed, {'linear': linear.as_dict(), 'quadratic_control': quadratic.as_dict()},
                       {'probe_floor': profile.probe_floor, 'probe_control': profile.probe_control})


SUITES = ('bracket', 'relation', 'pde', 'harmonic', 'probe')


def run_suites(params: PotentialParams, profile: ToleranceProfile, seed: int, sizes: SuiteSizes = SuiteSizes(),
               suites: Optional[Sequence[str]] = None, corrupt_f1: bool = False) -> dict[str, SuiteResult]:
    """Run the selected verification suites with one seeded generator each

    :param params: potential parameters
    :param profile: tolerance profile
    :param seed: random seed
    :param sizes: sample counts
    :param suites: names of the suites to run (None for all)
    :param corrupt_f1: use the sign-flipped F₁ in the bracket suite
    :return: results by suite name
    """

    selected = list(SUITES if suites is None else suites)
    unknown = set(selected) - set(SUITES)
    if unknown:
        raise InvalidArgumentError(f"Unknown verification suites: {sorted(unknown)}")

    results = {}

    for offset, name in enumerate(SUITES):
        if name not in selected:
            continue
        rng = np.random.default_rng([seed, offset])
        if name == 'bracket':
            result = bracket_suite(params, profile, rng, sizes.bracket_states, corrupt_f1)
        elif name == 'relation':
            result = relation_suite(params, profile, rng, sizes.identity_states)
        elif name == 'pde':
            result = pde_suite(params, profile, rng, sizes.pde_points)
        elif name == 'harmonic':
            result = harmonic_suite(params, profile, rng, sizes.harmonic_points)
        else:
            result = probe_suite(params, profile, sizes.probe_trajectories)
        logger.info("Suite %s: %s", name, 'passed' if result.passed else 'FAILED')
        results[name] = result
    return results
