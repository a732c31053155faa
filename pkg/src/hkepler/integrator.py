from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional
import numpy as np
from scipy.integrate import RK45
from .constants import *
from .dynamics import vector_field_array, hamiltonian
from .exceptions import DivergedError, InvalidArgumentError, SingularityError, StepSingularityError
from .geometry import CylState
from .integrals import IntegralValues, evaluate_integrals, f1, f2, f3
from .kepler_enums import TerminationReason
from .potential import PotentialParams


logger = logging.getLogger(__name__)

INTEGRAL_NAMES = ('H', 'F1', 'F2', 'F3')


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    max_step: float = MAX_STEP
    min_step: float = MIN_STEP
    t_end: float = DEFAULT_T_END
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL
    max_steps: int = DEFAULT_MAX_STEPS
    project: bool = False

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidArgumentError("Tolerances must be positive")
        if not 0 < self.min_step <= self.max_step:
            raise InvalidArgumentError("Step bounds must satisfy 0 < min_step <= max_step")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise InvalidArgumentError("Integration horizon must be non-negative")
        if not self.sample_interval > 0:
            raise InvalidArgumentError("Sample interval must be positive")
        if self.max_steps < 1:
            raise InvalidArgumentError("max_steps must be at least 1")


@dataclass
class Trajectory:
    """Time-stamped cylindrical states with the first integrals at every sample"""

    times: np.ndarray
    states: np.ndarray
    integral_history: np.ndarray
    params: PotentialParams
    integrals_at_start: IntegralValues
    termination: TerminationReason = TerminationReason.COMPLETED
    steps_accepted: int = 0
    steps_rejected: int = 0

    def __len__(self) -> int:
        return len(self.times)

    def state(self, index: int) -> CylState:
        return CylState.from_array(self.states[index])

    @property
    def final_state(self) -> CylState:
        return self.state(-1)

    def samples(self) -> list[tuple[float, CylState]]:
        return [(float(t), CylState.from_array(y)) for t, y in zip(self.times, self.states)]

    @property
    def drift(self) -> dict[str, float]:
        """Per-integral maximum absolute deviation from the initial values"""
        deviation = np.abs(self.integral_history - self.integral_history[0])
        return {name: float(deviation[:, i].max()) for i, name in enumerate(INTEGRAL_NAMES)}

    def relative_drift(self) -> np.ndarray:
        """Per-sample max over integrals of |I − I₀| / max(1, |I₀|)"""
        start = self.integral_history[0]
        scaled = np.abs(self.integral_history - start) / np.maximum(1.0, np.abs(start))
        return scaled.max(axis=1)


@dataclass
class DriftReport:
    max_abs: dict[str, float]
    mean_abs: dict[str, float]
    relation_residual_max: float
    max_gauge: float
    energy_bound: Optional[float] = None
    bounded: Optional[bool] = None
    termination: str = TerminationReason.COMPLETED.name
    samples: int = 0
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            'max_abs': self.max_abs,
            'mean_abs': self.mean_abs,
            'relation_residual_max': self.relation_residual_max,
            'max_gauge': self.max_gauge,
            'energy_bound': self.energy_bound,
            'bounded': self.bounded,
            'termination': self.termination,
            'samples': self.samples,
            **self.extra,
        }


def _integral_row(y: np.ndarray, params: PotentialParams) -> list[float]:
    s = CylState.from_array(y)
    return [hamiltonian(s, params), f1(s, params), f2(s, params), f3(s, params)]


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(values * values)))


def _project_energy(y: np.ndarray, energy: float, k: float) -> np.ndarray:
    # Rescale momenta so that the kinetic energy matches energy − U
    r, _, z, p_R, p_S = y
    kinetic = (p_R * p_R + p_S * p_S / (r * r)) / 2
    target = energy + k / math.sqrt(r ** 4 + GAUGE_COEFFICIENT * z * z)
    if kinetic <= 0 or target < 0:
        return y
    scale = math.sqrt(target / kinetic)
    projected = y.copy()
    projected[3:] *= scale
    return projected


def _near_singular(y: np.ndarray) -> bool:
    r, z = y[0], y[2]
    return r < STEP_GUARD or (r ** 4 + GAUGE_COEFFICIENT * z * z) ** 0.25 < STEP_GUARD


def step_fixed_rk4(s: CylState, dt: float, params: PotentialParams) -> CylState:
    """One classical fourth-order Runge-Kutta step

    :param s: admissible state
    :param dt: positive step
    :param params: potential parameters
    :return: state after the step
    """

    if not dt > 0:
        raise InvalidArgumentError("Step must be positive")

    y = s.to_array()
    try:
        k1 = vector_field_array(y, params.k)
        k2 = vector_field_array(y + dt / 2 * k1, params.k)
        k3 = vector_field_array(y + dt / 2 * k2, params.k)
        k4 = vector_field_array(y + dt * k3, params.k)
    except SingularityError as e:
        raise StepSingularityError(f"Runge-Kutta stage reached a singular state: {e}") from e

    y_new = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(y_new)):
        raise DivergedError("Non-finite state after Runge-Kutta step")
    return CylState.from_array(y_new)


def integrate_fixed(s0: CylState, dt: float, t_end: float, params: PotentialParams) -> Trajectory:
    """Integrate with fixed RK4 steps, recording every step

    :param s0: initial state
    :param dt: step size
    :param t_end: horizon
    :param params: potential parameters
    :return: trajectory
    """

    start = evaluate_integrals(s0, params)
    times, states = [0.0], [s0.to_array()]
    n_steps = int(math.ceil(t_end / dt - 1e-12)) if t_end > 0 else 0
    s = s0

    for i in range(n_steps):
        h = min(dt, t_end - times[-1])
        s = step_fixed_rk4(s, h, params)
        times.append(times[-1] + h)
        states.append(s.to_array())

    history = np.array([_integral_row(y, params) for y in states])
    return Trajectory(np.array(times), np.array(states), history, params, start,
                      steps_accepted=n_steps)


class DormandPrince:
    """Embedded 5(4) pair with PI step control and fourth-order dense output"""

    A = RK45.A
    B = RK45.B
    C = RK45.C
    E = RK45.E
    P = RK45.P
    n_stages = RK45.n_stages
    error_order = 4

    def __init__(self, params: PotentialParams, cfg: IntegratorConfig):
        self.params = params
        self.cfg = cfg

    def rhs(self, y: np.ndarray) -> np.ndarray:
        rates = vector_field_array(y, self.params.k)
        if not np.all(np.isfinite(rates)):
            raise DivergedError("Non-finite rates")
        return rates

    def initial_step(self, y: np.ndarray, f0: np.ndarray) -> float:
        scale = self.cfg.abs_tol + np.abs(y) * self.cfg.rel_tol
        d0, d1 = _rms(y / scale), _rms(f0 / scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        return min(max(h0, self.cfg.min_step), self.cfg.max_step)

    def attempt(self, y: np.ndarray, f0: np.ndarray, h: float):
        """Try one step of size h

        :return: (y_new, K, error_norm)
        """

        K = np.empty((self.n_stages + 1, y.size))
        K[0] = f0

        for s, (a, c) in enumerate(zip(self.A[1:], self.C[1:]), start=1):
            dy = np.dot(K[:s].T, a[:s]) * h
            K[s] = self.rhs(y + dy)

        y_new = y + h * np.dot(K[:-1].T, self.B)
        if not np.all(np.isfinite(y_new)):
            raise DivergedError("Non-finite state during integration")
        if _near_singular(y_new):
            raise StepSingularityError("Step would approach the singular set")
        K[-1] = self.rhs(y_new)

        scale = self.cfg.abs_tol + np.maximum(np.abs(y), np.abs(y_new)) * self.cfg.rel_tol
        error = h * np.dot(K.T, self.E) / scale
        return y_new, K, _rms(error)

    def dense(self, y: np.ndarray, K: np.ndarray, h: float, x: float) -> np.ndarray:
        # x in [0, 1] is the fraction of the step
        Q = K.T.dot(self.P)
        powers = np.cumprod(np.full(self.P.shape[1], x))
        return y + h * Q.dot(powers)


def integrate(s0: CylState, cfg: IntegratorConfig, params: PotentialParams) -> Trajectory:
    """Integrate the equations of motion with adaptive step control

    :param s0: admissible initial state
    :param cfg: integrator configuration
    :param params: potential parameters
    :return: trajectory sampled every cfg.sample_interval up to cfg.t_end
    """

    start = evaluate_integrals(s0, params)
    method = DormandPrince(params, cfg)
    y = s0.to_array()
    t = 0.0
    energy = start.H

    sample_times = list(np.arange(0.0, cfg.t_end, cfg.sample_interval))
    if not sample_times or sample_times[-1] < cfg.t_end:
        sample_times.append(cfg.t_end)
    times, states = [0.0], [y.copy()]
    next_sample = 1

    termination = TerminationReason.COMPLETED
    accepted = rejected = 0
    previous_error = 1.0
    step_rejected = False
    f0 = method.rhs(y)
    h = method.initial_step(y, f0)

    logger.info("Integrating to t=%g (rel_tol=%g, abs_tol=%g)", cfg.t_end, cfg.rel_tol, cfg.abs_tol)

    while t < cfg.t_end:
        if accepted + rejected >= cfg.max_steps:
            termination = TerminationReason.MAX_STEPS
            break

        h = min(h, cfg.max_step, cfg.t_end - t)

        try:
            y_new, K, error = method.attempt(y, f0, h)
        except SingularityError:
            # Halve the step near the axis or the origin
            h /= 2
            rejected += 1
            logger.debug("Singularity guard halved the step to %g at t=%g", h, t)
            if h < cfg.min_step:
                termination = TerminationReason.SINGULARITY_APPROACH
                break
            continue

        if error > 1:
            factor = max(MIN_FACTOR, SAFETY * error ** (-PI_ALPHA))
            h *= factor
            step_rejected = True
            rejected += 1
            logger.debug("Rejected step at t=%g (error %.3g)", t, error)
            if h < cfg.min_step:
                termination = TerminationReason.SINGULARITY_APPROACH
                break
            continue

        # Record samples inside the accepted step
        t_new = t + h
        while next_sample < len(sample_times) and sample_times[next_sample] <= t_new:
            x = (sample_times[next_sample] - t) / h
            sample = y_new if x >= 1 else method.dense(y, K, h, x)
            if cfg.project:
                sample = _project_energy(sample, energy, params.k)
            times.append(sample_times[next_sample])
            states.append(sample)
            next_sample += 1

        if cfg.project:
            y_new = _project_energy(y_new, energy, params.k)
            f0 = method.rhs(y_new)
        else:
            f0 = K[-1]

        t, y = t_new, y_new
        accepted += 1

        if error == 0:
            factor = MAX_FACTOR
        else:
            factor = SAFETY * error ** (-PI_ALPHA) * previous_error ** PI_BETA
        if step_rejected:
            factor = min(1.0, factor)
            step_rejected = False
        h *= min(MAX_FACTOR, max(MIN_FACTOR, factor))
        previous_error = max(error, 1e-4)

    # Partial runs end with the last accepted state
    if termination != TerminationReason.COMPLETED and t > times[-1]:
        times.append(t)
        states.append(y.copy())

    logger.info("Integration finished at t=%g: %s (%d accepted, %d rejected)",
                t, termination.name, accepted, rejected)

    states_array = np.array(states)
    history = np.array([_integral_row(row, params) for row in states_array])
    return Trajectory(np.array(times), states_array, history, params, start,
                      termination, accepted, rejected)


def drift_report(traj: Trajectory) -> DriftReport:
    """Summarize integral drift, the relation residual and the energy bound

    :param traj: nonempty trajectory
    :return: drift report
    """

    if len(traj) == 0:
        raise InvalidArgumentError("Trajectory has no samples")

    history = traj.integral_history
    deviation = np.abs(history - history[0])
    k = traj.params.k
    relation = np.abs(history[:, 1] ** 2 + history[:, 2] ** 2 - 2 * history[:, 0] * history[:, 3] - k * k)
    gauge = np.sqrt(traj.states[:, 0] ** 4 + GAUGE_COEFFICIENT * traj.states[:, 2] ** 2)

    report = DriftReport(
        max_abs={name: float(deviation[:, i].max()) for i, name in enumerate(INTEGRAL_NAMES)},
        mean_abs={name: float(deviation[:, i].mean()) for i, name in enumerate(INTEGRAL_NAMES)},
        relation_residual_max=float(relation.max()),
        max_gauge=float(gauge.max()),
        termination=traj.termination.name,
        samples=len(traj),
    )

    # Orbits with negative energy stay inside √(r⁴+16z²) ≤ k/|H|
    energy = traj.integrals_at_start.H
    if energy < 0:
        report.energy_bound = k / abs(energy)
        report.bounded = bool(report.max_gauge <= report.energy_bound + DEFAULT_DRIFT_TOL)
    return report
