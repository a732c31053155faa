from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional
from .commands import CommandResult, exit_code_for, run_command
from .config import RunConfig
from .constants import VERSION
from .exceptions import ConfigError
from .io_utils import IoUtils
from .kepler_enums import ExitCode
from .utils import Utils


logger = logging.getLogger(__name__)

OPERATORS = {
    '<=': lambda measured, value, tol: measured <= value,
    '>=': lambda measured, value, tol: measured >= value,
    '<': lambda measured, value, tol: measured < value,
    '>': lambda measured, value, tol: measured > value,
    '==': lambda measured, value, tol: measured == value,
    '~=': lambda measured, value, tol: abs(measured - value) <= tol,
}


@dataclass(frozen=True)
class Check:
    metric: str
    op: str
    value: Any
    tol: float = 0.0

    def evaluate(self, report: dict) -> dict:
        """Compare one report entry with its threshold

        :param report: command report
        :return: check outcome with the measured value
        """

        measured = lookup(report, self.metric)
        passed = measured is not None and bool(OPERATORS[self.op](measured, self.value, self.tol))
        return {'metric': self.metric, 'op': self.op, 'value': self.value, 'tol': self.tol,
                'measured': measured, 'passed': passed}


def lookup(report: Any, path: str) -> Any:
    """Follow a dotted path such as 'conic.semiaxes.1' into a report"""

    value = report
    for part in path.split('.'):
        if isinstance(value, dict) and part in value:
            value = value[part]
        elif isinstance(value, list) and part.isdigit() and int(part) < len(value):
            value = value[int(part)]
        else:
            return None
    return value


def recipes_directory() -> Path:
    return Path(Utils.get_current_directory()) / 'recipes'


def available_recipes() -> list[str]:
    return sorted(name[:-5] for name in os.listdir(recipes_directory()) if name.endswith('.json'))


def load_recipe(name: str) -> dict:
    """Load a recipe by id

    :param name: recipe id
    :return: recipe document
    """

    if name not in available_recipes():
        raise ConfigError(f"Unknown recipe '{name}'; available: {', '.join(available_recipes())}")
    with (recipes_directory() / f'{name}.json').open('r', encoding='utf-8') as f:
        recipe = json.load(f)

    for step in recipe.get('steps', []):
        for check in step.get('checks', []):
            if check.get('op') not in OPERATORS:
                raise ConfigError(f"Recipe '{name}' uses unknown check operator {check.get('op')!r}")
    return recipe


def _step_config(recipe: dict, step: dict) -> RunConfig:
    data = dict(step.get('config', {}))
    data['seed'] = recipe.get('seed', 0)
    data['tolerances'] = dict(recipe.get('tolerances', {}), **data.get('tolerances', {}))
    return RunConfig.from_dict(data)


def recipe_run(name: str, out: Optional[str | Path] = None) -> CommandResult:
    """Run every step of a recipe and check its acceptance thresholds

    :param name: recipe id
    :param out: output directory (None for out/recipes/<name>)
    :return: command result, exit code 1 when a check fails
    """

    recipe = load_recipe(name)
    out = Path('out') / 'recipes' / name if out is None else Path(out)
    steps, outputs = [], []
    code = ExitCode.SUCCESS

    logger.info("Running recipe %s", name)

    for index, step in enumerate(recipe.get('steps', [])):
        command = step.get('command')
        step_out = out / f'step_{index}_{command}'
        expected = ExitCode(step.get('expect_exit', 0))
        entry = {'command': command, 'label': step.get('label', command)}

        try:
            result = run_command(command, _step_config(recipe, step), step_out)
        except Exception as e:
            entry.update(exit_code=int(exit_code_for(e)), error=str(e), checks=[], passed=False)
            steps.append(entry)
            code = ExitCode.VERIFICATION_FAILURE
            logger.error("Recipe %s step %d failed: %s", name, index, e)
            continue

        checks = [Check(**check).evaluate(result.report) for check in step.get('checks', [])]
        passed = result.exit_code == expected and all(check['passed'] for check in checks)
        entry.update(exit_code=int(result.exit_code), checks=checks, passed=passed)
        steps.append(entry)
        outputs += result.outputs

        if not passed:
            code = ExitCode.VERIFICATION_FAILURE
            logger.error("Recipe %s step %d (%s) did not pass", name, index, entry['label'])

    report = {
        'recipe': name,
        'description': recipe.get('description', ''),
        'seed': recipe.get('seed', 0),
        'tolerance_overrides': recipe.get('tolerances', {}),
        'version': VERSION,
        'steps': steps,
        'passed': code == ExitCode.SUCCESS,
    }
    outputs.append(str(IoUtils.write_json(out / 'recipe.json', report)))
    return CommandResult(code, report, outputs)
