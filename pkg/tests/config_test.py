import json
import pytest
from src.hkepler import CylState, RunConfig, ToleranceProfile, load_config
from src.hkepler.exceptions import ConfigError


@pytest.fixture
def bounded_document():
    return {
        'k': 1.0,
        'initial': {'form': 'cartesian', 'x': 1.0, 'y': 0.0, 'z': 0.0, 'p_X': 0.0, 'p_Y': 0.1},
        'integrator': {'rel_tol': 1e-9, 't_end': 10.0},
        'tolerances': {'drift_tol': 1e-7},
        'seed': 3,
    }


def test_defaults():
    """Test the default configuration"""

    config = RunConfig()

    assert config.k == 1.0
    assert config.initial is None
    assert config.seed == 0
    assert config.tolerances == ToleranceProfile()
    assert config.integrator.rel_tol == 1e-10
    assert config.integrator.abs_tol == 1e-12


def test_from_dict(bounded_document):
    """Test parsing a complete document"""

    config = RunConfig.from_dict(bounded_document)

    assert config.integrator.rel_tol == 1e-9
    assert config.integrator.t_end == 10.0
    assert config.tolerances.drift_tol == 1e-7
    assert config.tolerances.fd_tol == 1e-5
    assert config.seed == 3
    assert config.params.k == 1.0


def test_cartesian_initial_state(bounded_document):
    """Test converting a Cartesian initial state"""

    s = RunConfig.from_dict(bounded_document).initial_state()

    assert (s.r, s.theta, s.z, s.p_R) == (1.0, 0.0, 0.0, 0.0)
    assert s.p_S == pytest.approx(0.1, abs=1e-15)


def test_cylindrical_initial_state():
    """Test passing a cylindrical initial state through"""

    config = RunConfig.from_dict({'initial': {'form': 'cylindrical', 'r': 1.0, 'theta': 0.5,
                                              'z': 0.1, 'p_R': 0.2, 'p_S': 0.3}})

    assert config.initial_state() == CylState(1.0, 0.5, 0.1, 0.2, 0.3)


@pytest.mark.parametrize('document', [
    {'unknown': 1},
    {'k': 0.0},
    {'k': 'one'},
    {'k': True},
    {'seed': -1},
    {'integrator': {'rel_tol': -1.0}},
    {'integrator': {'nothing': 1.0}},
    {'tolerances': {'nothing': 1.0}},
    {'tolerances': {'version': 2}},
    {'tolerances': {'fd_tol': 0.0}},
    {'surface': []},
    {'initial': {'form': 'polar'}},
    {'initial': {'form': 'cylindrical', 'r': 1.0}},
])
def test_invalid_documents(document):
    """Test that malformed configurations raise ConfigError"""

    with pytest.raises(ConfigError):
        RunConfig.from_dict(document)


def test_singular_initial_states():
    """Test that initial states on the axis or with negative radius are refused"""

    on_axis = RunConfig.from_dict({'initial': {'form': 'cartesian', 'x': 0.0, 'y': 0.0, 'z': 1.0,
                                               'p_X': 0.0, 'p_Y': 0.0}})
    negative = RunConfig.from_dict({'initial': {'form': 'cylindrical', 'r': -1.0, 'theta': 0.0,
                                                'z': 0.0, 'p_R': 0.0, 'p_S': 0.0}})

    with pytest.raises(ConfigError):
        on_axis.initial_state()
    with pytest.raises(ConfigError):
        negative.initial_state()
    with pytest.raises(ConfigError):
        RunConfig().initial_state()


def test_overrides(bounded_document):
    """Test applying command-line overrides"""

    config = RunConfig.from_dict(bounded_document).with_overrides(
        k=2.0, seed=None, **{'integrator.t_end': 5.0, 'surface.H': -0.5})

    assert config.k == 2.0
    assert config.seed == 3
    assert config.integrator.t_end == 5.0
    assert config.integrator.rel_tol == 1e-9
    assert config.surface == {'H': -0.5}

    with pytest.raises(ConfigError):
        config.with_overrides(nothing=1)
    with pytest.raises(ConfigError):
        config.with_overrides(**{'integrator.t_end': -1.0})


def test_tolerance_overrides():
    """Test replacing tolerance entries"""

    profile = ToleranceProfile().overridden({'bracket_tol': 1e-8})

    assert profile.bracket_tol == 1e-8
    assert profile.version == ToleranceProfile().version
    assert ToleranceProfile().overridden(None) == ToleranceProfile()
    assert profile.as_dict()['bracket_tol'] == 1e-8


def test_load_config(tmp_path, bounded_document):
    """Test loading configuration files"""

    path = tmp_path / 'run.json'
    path.write_text(json.dumps(bounded_document), encoding='utf-8')
    broken = tmp_path / 'broken.json'
    broken.write_text('{"k": ', encoding='utf-8')

    assert load_config(path).seed == 3

    with pytest.raises(ConfigError):
        load_config(tmp_path / 'missing.json')
    with pytest.raises(ConfigError):
        load_config(broken)
