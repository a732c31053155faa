from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence
from .commands import CommandResult, exit_code_for, run_command
from .config import RunConfig, load_config
from .constants import HK_LOG_ENV, VERSION
from .kepler_enums import ExitCode, LogLevel, SpecialKind
from .recipes import available_recipes, recipe_run


logger = logging.getLogger(__name__)

LOG_LEVELS = {
    LogLevel.OFF: logging.WARNING,
    LogLevel.INFO: logging.INFO,
    LogLevel.DEBUG: logging.DEBUG,
}


def configure_logging(level: Optional[str] = None):
    """Configure the package logger from --log-level or the HK_LOG environment variable

    :param level: 'off', 'info' or 'debug' (None to read HK_LOG)
    """

    if level is None:
        level = os.environ.get(HK_LOG_ENV, LogLevel.OFF.value)
    try:
        log_level = LogLevel(level.strip().lower())
    except ValueError:
        log_level = LogLevel.OFF

    package_logger = logging.getLogger(__package__)
    package_logger.setLevel(LOG_LEVELS[log_level])

    for handler in package_logger.handlers:
        if getattr(handler, '_hkepler', False):
            handler.setStream(sys.stderr)
            return

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    handler._hkepler = True
    package_logger.addHandler(handler)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON run configuration')
    common.add_argument('--seed', type=int, help='random seed')
    common.add_argument('--out', help='output directory')
    common.add_argument('--k', type=float, help='coupling constant k > 0')
    common.add_argument('--log-level', choices=[level.value for level in LogLevel],
                        help=f'log verbosity (overrides {HK_LOG_ENV})')

    parser = argparse.ArgumentParser(prog='hkepler',
                                     description='Nonholonomic Kepler problem on the Heisenberg group')
    parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', parents=[common], help='integrate one trajectory')
    initial = simulate.add_mutually_exclusive_group()
    initial.add_argument('--cartesian', nargs=5, type=float, metavar=('X', 'Y', 'Z', 'P_X', 'P_Y'))
    initial.add_argument('--cylindrical', nargs=5, type=float, metavar=('R', 'THETA', 'Z', 'P_R', 'P_S'))
    simulate.add_argument('--t-end', type=float)
    simulate.add_argument('--rel-tol', type=float)
    simulate.add_argument('--abs-tol', type=float)
    simulate.add_argument('--sample-interval', type=float)
    simulate.add_argument('--project', action='store_true', default=None,
                          help='project the momenta back onto the initial energy level')

    surface = commands.add_parser('surface', parents=[common], help='sample an invariant surface')
    surface.add_argument('--H', type=float, dest='H')
    surface.add_argument('--F3', type=float, dest='F3')
    surface.add_argument('--theta0', type=float)
    surface.add_argument('--n-r', type=int)
    surface.add_argument('--n-theta', type=int)
    surface.add_argument('--r-max', type=float)
    surface.add_argument('--include-rejected', action='store_true', default=None)

    verify = commands.add_parser('verify', parents=[common], help='run the verification suites')
    verify.add_argument('--corrupt-f1', action='store_true', default=None,
                        help='flip the sign of the potential term of F1 (negative control)')
    verify.add_argument('--no-probe', action='store_false', dest='probe', default=None)
    verify.add_argument('--suite', action='append', dest='suites')

    special = commands.add_parser('special', parents=[common], help='tabulate a closed-form solution')
    special.add_argument('kind', choices=[kind.value for kind in SpecialKind])
    special.add_argument('--H', type=float, dest='H')
    special.add_argument('--samples', type=int)
    special.add_argument('--r0', type=float)
    special.add_argument('--theta', type=float)
    special.add_argument('--incoming', action='store_false', dest='outgoing', default=None)

    sweep = commands.add_parser('sweep', parents=[common], help='run a grid of simulations')
    sweep.add_argument('--vary', help='initial-state key to vary (default p_Y)')
    sweep.add_argument('--values', nargs='+', type=float)
    sweep.add_argument('--k-values', nargs='+', type=float)
    sweep.add_argument('--workers', type=int)

    recipe = commands.add_parser('recipe', help='run a reproduction recipe')
    recipe.add_argument('name', nargs='?')
    recipe.add_argument('--list', action='store_true', help='list the available recipes')
    recipe.add_argument('--out', help='output directory')
    recipe.add_argument('--log-level', choices=[level.value for level in LogLevel])
    return parser


def _initial_override(args: argparse.Namespace) -> Optional[dict]:
    if getattr(args, 'cartesian', None):
        return dict(zip(('form', 'x', 'y', 'z', 'p_X', 'p_Y'), ['cartesian', *args.cartesian]))
    if getattr(args, 'cylindrical', None):
        return dict(zip(('form', 'r', 'theta', 'z', 'p_R', 'p_S'), ['cylindrical', *args.cylindrical]))
    return None


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Load --config and apply the command-line overrides

    :param args: parsed arguments
    :return: run configuration
    """

    config = load_config(args.config) if args.config else RunConfig()
    command = args.command
    overrides = {'k': args.k, 'seed': args.seed, 'out': args.out, 'initial': _initial_override(args)}

    if command == 'simulate':
        overrides.update({'integrator.t_end': args.t_end, 'integrator.rel_tol': args.rel_tol,
                          'integrator.abs_tol': args.abs_tol, 'integrator.sample_interval': args.sample_interval,
                          'integrator.project': args.project})
    elif command == 'surface':
        for name in ('H', 'F3', 'theta0', 'n_r', 'n_theta', 'r_max', 'include_rejected'):
            overrides[f'surface.{name}'] = getattr(args, name)
    elif command == 'verify':
        for name in ('corrupt_f1', 'probe', 'suites'):
            overrides[f'verify.{name}'] = getattr(args, name)
    elif command == 'special':
        for name in ('kind', 'H', 'samples', 'r0', 'theta', 'outgoing'):
            overrides[f'special.{name}'] = getattr(args, name)
    elif command == 'sweep':
        for name in ('vary', 'values', 'k_values', 'workers'):
            overrides[f'sweep.{name}'] = getattr(args, name)
    return config.with_overrides(**overrides)


def run_recipe_command(args: argparse.Namespace) -> CommandResult:
    if args.list or not args.name:
        names = available_recipes()
        print('\n'.join(names))
        return CommandResult(ExitCode.SUCCESS, {'recipes': names})
    return recipe_run(args.name, args.out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the hkepler command

    :param argv: arguments (None for sys.argv)
    :return: process exit code
    """

    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        if args.command == 'recipe':
            result = run_recipe_command(args)
        else:
            result = run_command(args.command, config_from_args(args))
    except Exception as e:
        code = exit_code_for(e)
        if code != ExitCode.INTERNAL_ERROR:
            logger.error("%s: %s", type(e).__name__, e)
        return int(code)

    for path in result.outputs:
        logger.info("Wrote %s", path)
    return int(result.exit_code)


if __name__ == '__main__':
    sys.exit(main())
