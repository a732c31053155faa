import numpy as np
import pytest
from src.hkepler import CylState, Observable, PotentialParams, hamiltonian, vector_field, almost_poisson, time_reversed
from src.hkepler.dynamics import HAMILTONIAN, vector_field_array
from src.hkepler.exceptions import AxisSingularityError, OriginSingularityError
from src.hkepler.integrals import F1_OBSERVABLE, F3_OBSERVABLE
from src.hkepler.utils import Utils


@pytest.fixture
def params():
    return PotentialParams(1.0)


@pytest.fixture
def bounded_state():
    return CylState(1.0, 0.0, 0.0, 0.0, 0.1)


def test_hamiltonian(bounded_state, params):
    """Test the energy of the bounded-trajectory initial state"""

    assert hamiltonian(bounded_state, params) == pytest.approx(-0.995, abs=1e-15)
    assert hamiltonian(CylState(2.0, 0.0, 0.0, 1.0, 2.0), PotentialParams(4.0)) == pytest.approx(0.5 + 0.5 - 1.0)


def test_vector_field(bounded_state, params):
    """Test the rates at the bounded-trajectory initial state"""

    rates = vector_field(bounded_state, params)

    assert rates.dr == 0.0
    assert rates.dtheta == pytest.approx(0.1)
    assert rates.dz == pytest.approx(0.05)
    assert rates.dp_R == pytest.approx(-1.99)
    assert rates.dp_S == 0.0


def test_vertical_rate_follows_constraint(params):
    """Test that ż = (r²/2)θ̇ everywhere"""

    rng = np.random.default_rng(5)

    for s in Utils.random_admissible_states(rng, 50):
        rates = vector_field(s, params)
        assert rates.dz == pytest.approx(s.r * s.r / 2 * rates.dtheta, rel=1e-14)


def test_singular_states(params):
    """Test that the field refuses the axis and the origin"""

    with pytest.raises(AxisSingularityError):
        vector_field(CylState(0.0, 0.0, 1.0, 0.0, 0.0), params)
    with pytest.raises(AxisSingularityError):
        hamiltonian(CylState(1e-13, 0.0, 0.5, 0.0, 0.0), params)
    with pytest.raises(OriginSingularityError):
        vector_field_array(np.array([1e-11, 0.0, 0.0, 0.0, 0.0]), params.k)


def test_bracket_with_hamiltonian_gives_rates(params):
    """Test that {q, H} reproduces every component of the equations of motion"""

    rng = np.random.default_rng(9)
    names = ('r', 'theta', 'z', 'p_R', 'p_S')

    for s in Utils.random_admissible_states(rng, 20):
        rates = vector_field_array(s.to_array(), params.k)
        for name, rate in zip(names, rates):
            bracket = almost_poisson(Observable.coordinate(name), HAMILTONIAN, s, params)
            assert bracket == pytest.approx(rate, abs=1e-7)


def test_bracket_antisymmetry(params):
    """Test that swapping the arguments negates the bracket exactly"""

    rng = np.random.default_rng(13)

    for s in Utils.random_admissible_states(rng, 20):
        assert almost_poisson(F1_OBSERVABLE, F3_OBSERVABLE, s, params) \
            == -almost_poisson(F3_OBSERVABLE, F1_OBSERVABLE, s, params)
        assert almost_poisson(HAMILTONIAN, HAMILTONIAN, s, params) == 0.0


def test_time_reversal(params):
    """Test that reversing momenta negates position rates and keeps momentum rates"""

    s = CylState(1.2, 0.3, -0.4, 0.2, -0.5)
    forward = vector_field_array(s.to_array(), params.k)
    backward = vector_field_array(time_reversed(s).to_array(), params.k)

    assert np.array_equal(backward[:3], -forward[:3])
    assert np.array_equal(backward[3:], forward[3:])
    assert hamiltonian(time_reversed(s), params) == hamiltonian(s, params)


def test_observable_combination(bounded_state, params):
    """Test linear combinations of observables"""

    combined = HAMILTONIAN.combine(Observable.coordinate('p_S'), 2.0, 10.0)

    assert combined(bounded_state, params) == pytest.approx(2 * -0.995 + 1.0)
