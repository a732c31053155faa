from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional
from .constants import *
from .exceptions import ConfigError, HeisenbergKeplerError, InvalidArgumentError, SingularityError
from .geometry import CartPoint, CartState, CylState, to_cylindrical
from .integrator import IntegratorConfig
from .kepler_enums import InitialStateForm
from .potential import PotentialParams


CARTESIAN_KEYS = ('x', 'y', 'z', 'p_X', 'p_Y')
CYLINDRICAL_KEYS = ('r', 'theta', 'z', 'p_R', 'p_S')
SECTION_KEYS = ('surface', 'special', 'sweep', 'verify')
TOP_LEVEL_KEYS = ('k', 'initial', 'integrator', 'tolerances', 'seed', 'out') + SECTION_KEYS


@dataclass(frozen=True)
class ToleranceProfile:
    """Versioned tolerance set shared by the verify command, the recipes and the tests"""

    fd_tol: float = DEFAULT_FD_TOL
    drift_tol: float = DEFAULT_DRIFT_TOL
    identity_tol: float = DEFAULT_IDENTITY_TOL
    mesh_tol: float = DEFAULT_MESH_TOL
    bracket_tol: float = DEFAULT_BRACKET_TOL
    harmonic_tol: float = DEFAULT_HARMONIC_TOL
    probe_floor: float = DEFAULT_PROBE_FLOOR
    probe_control: float = DEFAULT_PROBE_CONTROL
    version: int = TOLERANCE_PROFILE_VERSION

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if name != 'version' and not value > 0:
                raise InvalidArgumentError(f"Tolerance {name} must be positive")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def overridden(self, overrides: Optional[dict]) -> ToleranceProfile:
        """Copy of the profile with some entries replaced

        :param overrides: mapping of tolerance names to values
        :return: new profile
        """

        if not overrides:
            return self
        unknown = set(overrides) - {f.name for f in fields(self)} | ({'version'} & set(overrides))
        if unknown:
            raise ConfigError(f"Unknown or fixed tolerance entries: {sorted(unknown)}")
        try:
            return replace(self, **{name: float(value) for name, value in overrides.items()})
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid tolerance override: {e}") from e


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs: k, the initial state, the integrator
    settings and the command-specific sections"""

    k: float = 1.0
    initial: Optional[dict] = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    tolerances: ToleranceProfile = field(default_factory=ToleranceProfile)
    seed: int = 0
    out: str = 'out'
    surface: dict = field(default_factory=dict)
    special: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (isinstance(self.k, (int, float)) and math.isfinite(self.k) and self.k > 0):
            raise ConfigError(f"k must be a positive number, got {self.k!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.initial is not None:
            _initial_form(self.initial)

    @property
    def params(self) -> PotentialParams:
        return PotentialParams(self.k)

    @staticmethod
    def from_dict(data: dict) -> RunConfig:
        """Build a run configuration from a parsed JSON document

        :param data: JSON object
        :return: run configuration
        """

        if not isinstance(data, dict):
            raise ConfigError("Configuration root must be a JSON object")
        unknown = set(data) - set(TOP_LEVEL_KEYS)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {sorted(unknown)}")

        sections = {}
        for name in SECTION_KEYS:
            section = data.get(name, {})
            if not isinstance(section, dict):
                raise ConfigError(f"Section '{name}' must be a JSON object")
            sections[name] = dict(section)

        return RunConfig(
            k=_number(data.get('k', 1.0), 'k'),
            initial=data.get('initial'),
            integrator=integrator_config(data.get('integrator')),
            tolerances=ToleranceProfile().overridden(data.get('tolerances')),
            seed=data.get('seed', 0),
            out=str(data.get('out', 'out')),
            **sections,
        )

    def with_overrides(self, **overrides: Any) -> RunConfig:
        """Apply command-line overrides; None values are ignored

        :param overrides: top-level keys, or 'integrator.<name>' / '<section>.<name>' entries
        :return: new configuration
        """

        top, integrator, sections = {}, {}, {name: dict(getattr(self, name)) for name in SECTION_KEYS}

        for key, value in overrides.items():
            if value is None:
                continue
            prefix, _, name = key.partition('.')
            if prefix == 'integrator' and name:
                integrator[name] = value
            elif prefix in SECTION_KEYS and name:
                sections[prefix][name] = value
            elif key in TOP_LEVEL_KEYS:
                top[key] = value
            else:
                raise ConfigError(f"Unknown override '{key}'")

        if integrator:
            top['integrator'] = _replace_integrator(self.integrator, integrator)
        return replace(self, **top, **sections)

    def initial_state(self) -> CylState:
        """Cylindrical initial state of the configuration

        :return: admissible cylindrical state
        """

        if self.initial is None:
            raise ConfigError("Configuration has no initial state")
        form = _initial_form(self.initial)
        values = {key: _number(value, key) for key, value in self.initial.items() if key != 'form'}

        try:
            if form == InitialStateForm.CARTESIAN:
                point = CartPoint(values['x'], values['y'], values['z'])
                return to_cylindrical(CartState(point, values['p_X'], values['p_Y']))
            return CylState(*(values[key] for key in CYLINDRICAL_KEYS))
        except SingularityError as e:
            raise ConfigError(f"Initial state is not admissible: {e}") from e
        except InvalidArgumentError as e:
            raise ConfigError(f"Invalid initial state: {e}") from e


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{name}' must be a number, got {value!r}")
    return float(value)


def _initial_form(initial: dict) -> InitialStateForm:
    if not isinstance(initial, dict):
        raise ConfigError("'initial' must be a JSON object")
    try:
        form = InitialStateForm(initial.get('form'))
    except ValueError:
        raise ConfigError(f"'initial.form' must be 'cartesian' or 'cylindrical', got {initial.get('form')!r}")

    expected = CARTESIAN_KEYS if form == InitialStateForm.CARTESIAN else CYLINDRICAL_KEYS
    keys = set(initial) - {'form'}
    if keys != set(expected):
        missing = sorted(set(expected) - keys)
        extra = sorted(keys - set(expected))
        raise ConfigError(f"Initial state in {form.value} form: missing {missing}, unexpected {extra}")
    return form


def _replace_integrator(base: IntegratorConfig, overrides: dict) -> IntegratorConfig:
    known = {f.name for f in fields(IntegratorConfig)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(f"Unknown integrator keys: {sorted(unknown)}")
    try:
        return replace(base, **overrides)
    except (InvalidArgumentError, TypeError) as e:
        raise ConfigError(f"Invalid integrator configuration: {e}") from e


def integrator_config(data: Optional[dict]) -> IntegratorConfig:
    if data is None:
        return IntegratorConfig()
    if not isinstance(data, dict):
        raise ConfigError("'integrator' must be a JSON object")
    return _replace_integrator(IntegratorConfig(), data)


def load_config(path: str | Path) -> RunConfig:
    """Load a run configuration from a JSON file

    :param path: configuration file path
    :return: run configuration
    """

    path = Path(path)
    try:
        with path.open('r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"Configuration file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Configuration file is not valid JSON: {e}") from e
    try:
        return RunConfig.from_dict(data)
    except ConfigError:
        raise
    except HeisenbergKeplerError as e:
        raise ConfigError(str(e)) from e
