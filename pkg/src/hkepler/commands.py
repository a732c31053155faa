from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional
import numpy as np
from scipy.integrate import quad
from .config import RunConfig, ToleranceProfile
from .constants import *
from .dynamics import hamiltonian
from .exceptions import (ConfigError, DivergedError, InconsistentStateError, InvalidArgumentError, InvalidCaseError,
                         InvalidEnsembleError, NoStationarySolutionError, OutOfRangeError, SingularityError)
from .integrals import evaluate_integrals
from .integrator import IntegratorConfig, Trajectory, drift_report, integrate
from .io_utils import IoUtils
from .kepler_enums import ExitCode, IntegralCase, SpecialKind, SurfaceBranch, TerminationReason
from .potential import PotentialParams
from .special import (HeteroclinicCurve, heteroclinic_height_at, heteroclinic_integrand, heteroclinic_point,
                      heteroclinic_time, radial_solution, stationary_points)
from .surfaces import (SurfaceMesh, SurfaceSpec, cartesian_quartic, degenerate_locus, equation_residual,
                       mesh_max_residual, min_energy_residual, sample_surface, trace_conic)
from .verifier import SUITES, SuiteSizes, run_suites


logger = logging.getLogger(__name__)

COMMANDS = ('simulate', 'surface', 'verify', 'special', 'sweep')

CONFIG_ERRORS = (ConfigError, InvalidArgumentError, InconsistentStateError, InvalidCaseError,
                 OutOfRangeError, NoStationarySolutionError, InvalidEnsembleError)
NUMERICAL_ERRORS = (SingularityError, DivergedError)


@dataclass
class CommandResult:
    exit_code: ExitCode
    report: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)


def exit_code_for(error: BaseException) -> ExitCode:
    """Map an exception raised by a command to the process exit code

    :param error: exception
    :return: exit code
    """

    if isinstance(error, CONFIG_ERRORS):
        return ExitCode.CONFIG_ERROR
    if isinstance(error, NUMERICAL_ERRORS):
        return ExitCode.SINGULARITY
    logger.exception("Unexpected %s", type(error).__name__, exc_info=error)
    return ExitCode.INTERNAL_ERROR


def report_header(config: RunConfig, command: str) -> dict:
    return {
        'command': command,
        'version': VERSION,
        'seed': config.seed,
        'k': config.k,
        'tolerances': config.tolerances.as_dict(),
    }


def _number(section: dict, key: str, default: Optional[float] = None) -> Optional[float]:
    value = section.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' must be a number, got {value!r}")
    return float(value)


def _integer(section: dict, key: str, default: int) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{key}' must be an integer, got {value!r}")
    return value


def _angular_deviation(theta: np.ndarray, theta0: float) -> np.ndarray:
    # Distance of θ − θ₀ to the nearest multiple of π
    offset = np.mod(theta - theta0, math.pi)
    return np.minimum(offset, math.pi - offset)


def trajectory_checks(traj: Trajectory, tolerances: ToleranceProfile) -> dict:
    """Drift, energy bound and invariant-surface checks along a trajectory

    :param traj: trajectory
    :param tolerances: tolerance profile
    :return: report entries
    """

    report = drift_report(traj).as_dict()
    start = traj.integrals_at_start
    spec = SurfaceSpec.from_integrals(start)
    points = traj.states[:, :3]

    report['integrals_at_start'] = start.as_dict()
    report['within_drift_tol'] = all(value <= tolerances.drift_tol for value in report['max_abs'].values())
    report['surface_residual_max'] = max(abs(equation_residual(p, spec)) for p in points)
    report['bound_margin'] = None if report['energy_bound'] is None \
        else report['energy_bound'] - report['max_gauge']
    report['steps_accepted'] = traj.steps_accepted
    report['steps_rejected'] = traj.steps_rejected

    if spec.case == IntegralCase.MIN_ENERGY:
        report['min_energy_residual_max'] = max(abs(min_energy_residual(p, spec)) for p in points)
    if spec.case == IntegralCase.DEGENERATE:
        line = degenerate_locus(spec)
        report['max_abs_z'] = float(np.abs(traj.states[:, 2]).max())
        report['max_angle_deviation'] = float(_angular_deviation(traj.states[:, 1], line.theta0).max())
    return report


def cmd_simulate(config: RunConfig, out: Optional[Path] = None) -> CommandResult:
    """Integrate one trajectory and write its CSV, drift report and plot script

    :param config: run configuration with an initial state
    :param out: output directory (None for config.out)
    :return: command result
    """

    out = Path(config.out if out is None else out)
    traj = integrate(config.initial_state(), config.integrator, config.params)

    report = report_header(config, 'simulate')
    report['integrator'] = asdict(config.integrator)
    report.update(trajectory_checks(traj, config.tolerances))

    outputs = [
        IoUtils.write_trajectory(out / 'trajectory.csv', traj),
        IoUtils.write_json(out / 'drift.json', report),
        IoUtils.write_text(out / 'trajectory.gp', IoUtils.trajectory_script('trajectory.csv')),
    ]

    if traj.termination == TerminationReason.SINGULARITY_APPROACH:
        logger.error("Integration stopped near a singularity at t=%g; partial output written", traj.times[-1])
        return CommandResult(ExitCode.SINGULARITY, report, [str(p) for p in outputs])
    if traj.termination == TerminationReason.MAX_STEPS:
        logger.warning("Integration stopped after the maximum number of steps at t=%g", traj.times[-1])
    return CommandResult(ExitCode.SUCCESS, report, [str(p) for p in outputs])


def surface_spec(config: RunConfig) -> SurfaceSpec:
    """Surface parameters from the 'surface' section, or from the initial state

    :param config: run configuration
    :return: surface spec
    """

    section = config.surface
    H, F3 = _number(section, 'H'), _number(section, 'F3')

    if H is not None or F3 is not None:
        if H is None or F3 is None:
            raise ConfigError("Surface needs both H and F3")
        return SurfaceSpec.from_parameters(config.k, H, F3, _number(section, 'theta0', 0.0))
    if config.initial is not None:
        return SurfaceSpec.from_integrals(evaluate_integrals(config.initial_state(), config.params))
    raise ConfigError("Surface needs (H, F3) or an initial state")


def _trace_fit(spec: SurfaceSpec, samples: int = 360) -> dict:
    conic = trace_conic(spec)
    conic_max = surface_max = 0.0

    for theta in np.linspace(0.0, 2 * math.pi, samples, endpoint=False):
        denominator = spec.k - spec.J * math.cos(2 * (theta - spec.orientation))
        if denominator <= 0:
            continue
        r = math.sqrt(spec.F3 / denominator)
        conic_max = max(conic_max, abs(conic.residual(r * math.cos(theta), r * math.sin(theta))))
        surface_max = max(surface_max, abs(equation_residual((r, theta, 0.0), spec)))
    return {'conic': conic.as_dict(), 'trace_conic_residual_max': conic_max,
            'trace_surface_residual_max': surface_max}


def _symmetry_checks(mesh: SurfaceMesh) -> dict:
    spec = mesh.spec
    reachable = [p for p, branch in zip(mesh.points(), mesh.branch) if branch == SurfaceBranch.REACHABLE]
    reflection = max((abs(equation_residual((r, theta, -z), spec)) for r, theta, z in reachable), default=0.0)
    half_turn = max((abs(equation_residual((r, theta + math.pi, z), spec)) for r, theta, z in reachable),
                    default=0.0)
    checks = {'reflection_residual_max': reflection, 'half_turn_residual_max': half_turn}

    if spec.case == IntegralCase.MIN_ENERGY:
        checks['rotation_residual_max'] = max(
            (abs(equation_residual((r, theta + 0.37, z), spec)) for r, theta, z in reachable), default=0.0)
        checks['ellipsoid_residual_max'] = max(
            (abs(min_energy_residual(p, spec)) for p in reachable), default=0.0)
    if spec.case == IntegralCase.GENERAL:
        quartic = cartesian_quartic(spec)
        checks['quartic_relative_residual_max'] = max(
            (abs(quartic.relative_residual(r * math.cos(theta), r * math.sin(theta), z))
             for r, theta, z in reachable), default=0.0)
    return checks


def cmd_surface(config: RunConfig, out: Optional[Path] = None) -> CommandResult:
    """Sample an invariant surface and report its trace conic and symmetries

    :param config: run configuration
    :param out: output directory (None for config.out)
    :return: command result
    """

    out = Path(config.out if out is None else out)
    section = config.surface
    spec = surface_spec(config)
    n_r = _integer(section, 'n_r', DEFAULT_N_R)
    n_theta = _integer(section, 'n_theta', DEFAULT_N_THETA)
    r_max = _number(section, 'r_max')

    report = report_header(config, 'surface')
    report['spec'] = spec.as_dict()

    if spec.case == IntegralCase.DEGENERATE:
        line = degenerate_locus(spec)
        radii = np.linspace(0.0, DEFAULT_SURFACE_R_MAX if r_max is None else r_max, n_r)
        points = [(r, angle, 0.0) for angle in (line.theta0, line.theta0 + math.pi) for r in radii]
        mesh = SurfaceMesh(spec, *(np.array(column) for column in zip(*points)),
                           [SurfaceBranch.REACHABLE] * len(points))
        report['line'] = {'theta0': line.theta0, 'z': line.z, 'direction': list(line.direction)}
    else:
        mesh = sample_surface(spec, n_r, n_theta, r_max, bool(section.get('include_rejected', False)),
                              config.tolerances.mesh_tol)
        report.update(_trace_fit(spec))
        report['symmetry'] = _symmetry_checks(mesh)
        report['mesh_residual_max'] = mesh_max_residual(mesh)

    report['mesh_points'] = len(mesh)
    report['branch_counts'] = {branch.name: mesh.branch.count(branch) for branch in SurfaceBranch}

    outputs = [
        IoUtils.write_mesh(out / 'mesh.csv', mesh),
        IoUtils.write_json(out / 'surface.json', report),
        IoUtils.write_text(out / 'mesh.gp', IoUtils.mesh_script('mesh.csv')),
    ]
    return CommandResult(ExitCode.SUCCESS, report, [str(p) for p in outputs])


def cmd_verify(config: RunConfig, out: Optional[Path] = None) -> CommandResult:
    """Run the verification suites and write a pass/fail report

    :param config: run configuration
    :param out: output directory (None for config.out)
    :return: command result, exit code 1 when any suite fails
    """

    out = Path(config.out if out is None else out)
    section = config.verify
    defaults = SuiteSizes()
    sizes = SuiteSizes(*(_integer(section, name, getattr(defaults, name)) for name in asdict(defaults)))

    suites = list(section.get('suites', SUITES))
    if not section.get('probe', True) and 'probe' in suites:
        suites.remove('probe')

    results = run_suites(config.params, config.tolerances, config.seed, sizes, suites,
                         bool(section.get('corrupt_f1', False)))

    report = report_header(config, 'verify')
    report['sizes'] = asdict(sizes)
    report['corrupt_f1'] = bool(section.get('corrupt_f1', False))
    report['suites'] = {name: result.as_dict() for name, result in results.items()}
    report['passed'] = all(result.passed for result in results.values())

    path = IoUtils.write_json(out / 'verify.json', report)
    code = ExitCode.SUCCESS if report['passed'] else ExitCode.VERIFICATION_FAILURE
    if code != ExitCode.SUCCESS:
        failed = [name for name, result in results.items() if not result.passed]
        logger.error("Verification failed: %s", ', '.join(failed))
    return CommandResult(code, report, [str(path)])


def _stationary_table(config: RunConfig, section: dict) -> tuple[list[str], list[list], dict]:
    H = _number(section, 'H', -config.k / 4)
    rows, report = [], {'H': H}

    for point in stationary_points(config.params, H):
        spec = SurfaceSpec.from_parameters(point.k, point.H, point.F3)
        rows.append(point.as_row() + [min_energy_residual((0.0, 0.0, point.z), spec)])
    report['heights'] = [row[0] for row in rows]
    report['J_squared_max'] = max(abs(row[3]) for row in rows)
    return ['z', 'H', 'F3', 'J2', 'ellipsoid_residual'], rows, report


def heteroclinic_shadowing(curve: HeteroclinicCurve, params: PotentialParams, t_end: float,
                           integrator: IntegratorConfig) -> dict:
    """Integrate from the crossing of z = 0 and compare with the closed form

    :param curve: heteroclinic curve
    :param params: potential parameters
    :param t_end: horizon
    :param integrator: integrator settings (t_end is replaced)
    :return: maximum deviations and the largest height reached
    """

    cfg = replace(integrator, t_end=t_end)
    traj = integrate(heteroclinic_point(curve, 0.0), cfg, params)
    error = 0.0

    for t, y in zip(traj.times, traj.states):
        exact = heteroclinic_point(curve, heteroclinic_height_at(curve, float(t))).to_array()
        error = max(error, float(np.abs(y[:3] - exact[:3]).max()))
    return {
        't_end': t_end,
        'shadowing_error_max': error,
        'z_max': float(traj.states[:, 2].max()),
        'below_pole': bool(traj.states[:, 2].max() < curve.z0),
        'termination': traj.termination.name,
    }


def _heteroclinic_table(config: RunConfig, section: dict) -> tuple[list[str], list[list], dict]:
    H = _number(section, 'H', -config.k / 4)
    curve = HeteroclinicCurve.from_energy(config.params, H, _number(section, 'theta', 0.0))
    samples = _integer(section, 'samples', 101)
    span = _number(section, 'z_fraction', 0.99) * curve.z0
    spec = SurfaceSpec.from_parameters(curve.k, curve.energy, curve.F3)
    rows = []

    for z in np.linspace(-span, span, samples):
        s = heteroclinic_point(curve, float(z))
        rows.append([z, heteroclinic_time(curve, float(z)), s.r, s.theta, s.p_R, s.p_S,
                     hamiltonian(s, config.params) - curve.energy, min_energy_residual((s.r, s.theta, s.z), spec)])

    half = 0.5 * curve.z0
    numeric, _ = quad(lambda z: heteroclinic_integrand(curve, z), 0.0, half, epsabs=1e-13, epsrel=1e-13)
    thetas = [row[3] for row in rows]

    report = {
        'H': H, 'z0': curve.z0, 'F3': curve.F3,
        'theta_monotone': bool(all(b > a for a, b in zip(thetas, thetas[1:]))),
        'time_to_half_height': heteroclinic_time(curve, half),
        'time_to_half_height_quadrature': numeric,
        'quadrature_gap': abs(numeric - heteroclinic_time(curve, half)),
        'energy_residual_max': max(abs(row[6]) for row in rows),
        'ellipsoid_residual_max': max(abs(row[7]) for row in rows),
    }
    if section.get('shadow', True):
        report['shadowing'] = heteroclinic_shadowing(curve, config.params, _number(section, 't_end', 10.0),
                                                     config.integrator)
    return ['z', 't', 'r', 'theta', 'pR', 'pS', 'energy_residual', 'ellipsoid_residual'], rows, report


def _radial_table(config: RunConfig, section: dict) -> tuple[list[str], list[list], dict]:
    H = _number(section, 'H', -1.0)
    solution = radial_solution(config.params, H, _number(section, 'r0', 0.5),
                               bool(section.get('outgoing', True)), _number(section, 'theta', 0.0))
    samples = _integer(section, 'samples', 101)

    try:
        horizon = solution.time_to_origin()
    except OutOfRangeError:
        horizon = _number(section, 't_end', 10.0)

    rows = []
    for t in np.linspace(0.0, horizon, samples, endpoint=False):
        s = solution.state_at(float(t))
        rows.append([t, s.r, s.p_R, hamiltonian(s, config.params) - H])

    report = {
        'H': H, 'r0': solution.r0, 'outgoing': solution.outgoing,
        'turning_radius': solution.turning_radius,
        'horizon': horizon,
        'energy_residual_max': max(abs(row[3]) for row in rows),
    }
    if H < 0 and solution.outgoing:
        report['time_to_turn'] = solution.time_to_turn()
    return ['t', 'r', 'pR', 'energy_residual'], rows, report


def cmd_special(config: RunConfig, out: Optional[Path] = None) -> CommandResult:
    """Tabulate one of the closed-form special solutions with cross-check columns

    :param config: run configuration with 'special.kind'
    :param out: output directory (None for config.out)
    :return: command result
    """

    out = Path(config.out if out is None else out)
    section = config.special
    try:
        kind = SpecialKind(section.get('kind'))
    except ValueError:
        raise ConfigError(f"'special.kind' must be one of {[k.value for k in SpecialKind]}")

    if kind == SpecialKind.STATIONARY:
        header, rows, details = _stationary_table(config, section)
    elif kind == SpecialKind.HETEROCLINIC:
        header, rows, details = _heteroclinic_table(config, section)
    else:
        header, rows, details = _radial_table(config, section)

    report = report_header(config, 'special')
    report['kind'] = kind.value
    report.update(details)

    outputs = [
        IoUtils.write_csv(out / f'{kind.value}.csv', header, rows),
        IoUtils.write_json(out / f'{kind.value}.json', report),
    ]
    return CommandResult(ExitCode.SUCCESS, report, [str(p) for p in outputs])


def _sweep_cell(index: int, initial: dict, k: float, integrator: IntegratorConfig,
                tolerances: ToleranceProfile, seed: int, out: str) -> dict:
    # Runs in a worker process; every error stays inside its cell
    cell_out = Path(out) / f'cell_{index:03d}'
    row = {'cell': index, 'k': k, 'status': 'ok', 'termination': '', 'H': math.nan, 'F1': math.nan,
           'F2': math.nan, 'F3': math.nan, 'max_drift': math.nan, 'exit_code': int(ExitCode.SUCCESS)}

    try:
        config = RunConfig(k=k, initial=initial, integrator=integrator, tolerances=tolerances,
                           seed=seed, out=str(cell_out))
        result = cmd_simulate(config)
    except CONFIG_ERRORS + NUMERICAL_ERRORS as e:
        code = exit_code_for(e)
        logging.getLogger(__name__).warning("Sweep cell %d failed: %s", index, e)
        row.update(status='error', termination=type(e).__name__, exit_code=int(code))
        return row

    start = result.report['integrals_at_start']
    row.update(termination=result.report['termination'], H=start['H'], F1=start['F1'], F2=start['F2'],
               F3=start['F3'], max_drift=max(result.report['max_abs'].values()), exit_code=int(result.exit_code))
    if result.exit_code != ExitCode.SUCCESS:
        row['status'] = 'singularity'
    return row


def cmd_sweep(config: RunConfig, out: Optional[Path] = None) -> CommandResult:
    """Run a grid of simulations, one cell per (value, k) pair, and write a summary

    :param config: run configuration with a base initial state and a 'sweep' section
    :param out: output directory (None for config.out)
    :return: command result, exit code 0 unless every cell failed
    """

    out = Path(config.out if out is None else out)
    section = config.sweep
    if config.initial is None:
        raise ConfigError("Sweep needs a base initial state")

    vary = section.get('vary', 'p_Y')
    if vary not in config.initial or vary == 'form':
        raise ConfigError(f"Sweep variable '{vary}' is not a key of the initial state")
    values = [float(v) for v in section.get('values', [config.initial[vary]])]
    k_values = [float(v) for v in section.get('k_values', [config.k])]
    workers = _integer(section, 'workers', 1)
    if not values or not k_values or workers < 1:
        raise ConfigError("Sweep needs nonempty value lists and at least one worker")

    jobs = []
    for index, (value, k) in enumerate(itertools.product(values, k_values)):
        initial = dict(config.initial, **{vary: value})
        jobs.append((index, initial, k, config.integrator, config.tolerances, config.seed, str(out)))

    if workers == 1:
        rows = [_sweep_cell(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(_sweep_cell, *zip(*jobs)))

    for row, (value, _) in zip(rows, itertools.product(values, k_values)):
        row[vary] = value

    header = ['cell', 'k', vary, 'status', 'termination', 'H', 'F1', 'F2', 'F3', 'max_drift']
    summary = IoUtils.write_csv(out / 'summary.csv', header, [[row[name] for name in header] for row in rows])

    report = report_header(config, 'sweep')
    report['vary'] = vary
    report['cells'] = rows
    report['failed'] = sum(1 for row in rows if row['status'] != 'ok')
    path = IoUtils.write_json(out / 'sweep.json', report)

    code = ExitCode.SUCCESS
    if report['failed'] == len(rows):
        code = ExitCode(rows[0]['exit_code'])
        logger.error("Every sweep cell failed")
    return CommandResult(code, report, [str(summary), str(path)])


def run_command(command: str, config: RunConfig, out: Optional[Path] = None) -> CommandResult:
    """Dispatch one of the commands by name

    :param command: command name
    :param config: run configuration
    :param out: output directory (None for config.out)
    :return: command result
    """

    handlers = {
        'simulate': cmd_simulate,
        'surface': cmd_surface,
        'verify': cmd_verify,
        'special': cmd_special,
        'sweep': cmd_sweep,
    }
    if command not in handlers:
        raise ConfigError(f"Unknown command '{command}'")
    return handlers[command](config, out)
