import json
import pytest
from src.hkepler.exceptions import ConfigError
from src.hkepler.kepler_enums import ExitCode
from src.hkepler.recipes import Check, available_recipes, load_recipe, lookup, recipe_run

RECIPES = ['appendix-pde', 'fig1-surfaces', 'fig2-trajectory', 'thm3-bound', 'thm4-conservation',
           'thm5-surface-residual', 'thm7-stationary', 'thm8-heteroclinic']


def test_available_recipes():
    """Test that every reproduction recipe ships with the package"""

    assert available_recipes() == RECIPES


@pytest.mark.parametrize('name', RECIPES)
def test_recipes_load(name):
    """Test that every recipe parses and names a known command"""

    recipe = load_recipe(name)

    assert recipe['description']
    assert recipe['steps']
    for step in recipe['steps']:
        assert step['command'] in ('simulate', 'surface', 'verify', 'special', 'sweep')


def test_unknown_recipe():
    """Test that an unknown recipe id is a configuration error"""

    with pytest.raises(ConfigError):
        load_recipe('fig9-nothing')


def test_lookup():
    """Test following dotted paths into a report"""

    report = {'conic': {'semiaxes': [1.0, 0.07]}, 'passed': True}

    assert lookup(report, 'conic.semiaxes.1') == 0.07
    assert lookup(report, 'passed') is True
    assert lookup(report, 'conic.kind') is None
    assert lookup(report, 'conic.semiaxes.5') is None


def test_check_operators():
    """Test evaluating checks against a report"""

    report = {'value': 1.0000001, 'flag': True}

    assert Check('value', '~=', 1.0, 1e-6).evaluate(report)['passed']
    assert not Check('value', '~=', 1.0, 1e-8).evaluate(report)['passed']
    assert Check('value', '<=', 2.0).evaluate(report)['passed']
    assert Check('flag', '==', True).evaluate(report)['passed']
    assert not Check('missing', '<=', 2.0).evaluate(report)['passed']


def test_recipe_run(tmp_path):
    """Test running the stationary-point recipe end to end"""

    result = recipe_run('thm7-stationary', tmp_path)
    report = json.loads((tmp_path / 'recipe.json').read_text(encoding='utf-8'))

    assert result.exit_code == ExitCode.SUCCESS
    assert report['passed'] is True
    assert len(report['steps']) == 2
    assert all(check['passed'] for step in report['steps'] for check in step['checks'])
    assert (tmp_path / 'step_0_special' / 'stationary.json').exists()


@pytest.mark.slow
@pytest.mark.parametrize('name', RECIPES)
def test_recipe_passes(tmp_path, name):
    """Test that every recipe meets its acceptance thresholds"""

    assert recipe_run(name, tmp_path).exit_code == ExitCode.SUCCESS
