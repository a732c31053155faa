import numpy as np
import pytest
from src.hkepler import (AppendixConstants, CylState, IntegratorConfig, PotentialParams, ToleranceProfile,
                         integral_residual, integrate, linear_probe, pde_residuals, tilde_coefficients)
from src.hkepler.dynamics import HAMILTONIAN, Observable, almost_poisson
from src.hkepler.exceptions import InvalidArgumentError, InvalidEnsembleError
from src.hkepler.integrals import CORRUPTED_F1_OBSERVABLE, F1_OBSERVABLE, F2_OBSERVABLE, F3_OBSERVABLE, f1, f2, f3
from src.hkepler.utils import Utils
from src.hkepler.verifier import (QuadraticCandidate, SuiteSizes, hamiltonian_candidate, probe_ensemble, probe_features,
                                  run_suites)


@pytest.fixture
def params():
    return PotentialParams(1.0)


@pytest.fixture
def states():
    return Utils.random_admissible_states(np.random.default_rng(17), 30)


@pytest.fixture
def small_sizes():
    return SuiteSizes(bracket_states=30, identity_states=200, pde_points=10, harmonic_points=10)


def test_tilde_candidate_matches_integrals(states, params):
    """Test that the coefficient functions reproduce c₂F₁ + c₃F₂ + c₄F₃"""

    c = AppendixConstants(0.3, -0.7, 1.1)
    cand = tilde_coefficients(c)

    for s in states:
        expected = 0.3 * f1(s, params) - 0.7 * f2(s, params) + 1.1 * f3(s, params)
        assert cand.value(s, params) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_tilde_candidate_solves_coefficient_equations(states, params):
    """Test that every combination of F₁, F₂, F₃ satisfies the six coefficient equations"""

    for c in (AppendixConstants(1.0, 0.0, 0.0), AppendixConstants(0.0, 1.0, 0.0),
              AppendixConstants(0.0, 0.0, 1.0), AppendixConstants(0.5, -0.25, 2.0)):
        cand = tilde_coefficients(c)
        for s in states[:10]:
            assert max(abs(v) for v in pde_residuals(cand, (s.r, s.theta, s.z), params)) <= 1e-5


def test_hamiltonian_solves_coefficient_equations(states, params):
    """Test that 2H satisfies the coefficient equations"""

    for s in states[:10]:
        assert max(abs(v) for v in pde_residuals(hamiltonian_candidate(), (s.r, s.theta, s.z), params)) <= 1e-5


def test_wrong_candidate_fails(params):
    """Test that a quadratic function which is not conserved violates the equations"""

    cand = QuadraticCandidate(lambda r, t, z, k: r, lambda r, t, z, k: 0.0,
                              lambda r, t, z, k: 0.0, lambda r, t, z, k: 0.0)

    assert abs(pde_residuals(cand, (1.0, 0.2, 0.3), params)[0]) == pytest.approx(1.0, abs=1e-6)


def test_integral_residual(states, params):
    """Test that the first integrals have vanishing time derivative and the corrupted F₁ does not"""

    corrupted = 0.0

    for s in states:
        for obs in (F1_OBSERVABLE, F2_OBSERVABLE, F3_OBSERVABLE):
            assert abs(integral_residual(obs, s, params)) <= 1e-6
        corrupted = max(corrupted, abs(integral_residual(CORRUPTED_F1_OBSERVABLE, s, params)))

    assert corrupted > 1e-3


def test_integral_residual_is_linear(states, params):
    """Test that the time derivative of a combination is the combination of time derivatives"""

    r, z = Observable.coordinate('r'), Observable.coordinate('z')
    combined = r.combine(z, 2.0, -3.0)

    for s in states:
        expected = 2.0 * integral_residual(r, s, params) - 3.0 * integral_residual(z, s, params)
        assert integral_residual(combined, s, params) == pytest.approx(expected, abs=1e-8)
        assert integral_residual(combined, s, params) == pytest.approx(2.0 * s.p_R - 1.5 * s.p_S, abs=1e-6)


def test_integral_residual_matches_bracket(states, params):
    """Test that dF/dt along the flow equals the bracket {F, H}"""

    observables = (Observable.coordinate('r'), Observable.coordinate('theta'), F1_OBSERVABLE,
                   CORRUPTED_F1_OBSERVABLE, F3_OBSERVABLE)

    for s in states:
        for obs in observables:
            assert almost_poisson(obs, HAMILTONIAN, s, params) == pytest.approx(
                integral_residual(obs, s, params), abs=1e-6)


def test_bracket_suite_records_oracle_gap(params, small_sizes):
    """Test that the bracket and the residual oracle agree inside the bracket suite"""

    for corrupt in (False, True):
        result = run_suites(params, ToleranceProfile(), 3, small_sizes, ['bracket'], corrupt_f1=corrupt)['bracket']
        assert result.measured['oracle_gap_max'] <= 1e-6


def test_suites_pass(params, small_sizes):
    """Test that the bracket, relation, coefficient and harmonicity suites pass"""

    results = run_suites(params, ToleranceProfile(), 0, small_sizes, ['bracket', 'relation', 'pde', 'harmonic'])

    assert set(results) == {'bracket', 'relation', 'pde', 'harmonic'}
    for name, result in results.items():
        assert result.passed, name
    assert 3.5 <= results['harmonic'].measured['convergence_ratio'] <= 4.5


def test_corrupted_bracket_suite_fails(params, small_sizes):
    """Test the negative control of the bracket suite"""

    result = run_suites(params, ToleranceProfile(), 0, small_sizes, ['bracket'], corrupt_f1=True)['bracket']

    assert not result.passed
    assert result.measured['bracket_max']['F1_corrupted'] > 1e-3


def test_suites_are_deterministic(params, small_sizes):
    """Test that a fixed seed reproduces the measured values"""

    first = run_suites(params, ToleranceProfile(), 42, small_sizes, ['relation'])['relation']
    second = run_suites(params, ToleranceProfile(), 42, small_sizes, ['relation'])['relation']

    assert first.measured == second.measured


def test_unknown_suite(params):
    """Test that suite names are validated"""

    with pytest.raises(InvalidArgumentError):
        run_suites(params, ToleranceProfile(), 0, suites=['bracket', 'nothing'])


def test_probe_features_shape():
    """Test the size of the probe feature matrix"""

    states = np.array([[1.0, 0.1, 0.2, 0.3, 0.4], [1.5, 0.2, -0.1, 0.0, 0.2]])

    assert probe_features(states, 0, 1, modes=0).shape == (2, 3 * 3 * 2)
    assert probe_features(states, 0, 2, modes=1).shape == (2, 6 * 3 * 3 * 2)


def test_probe_rejects_bad_ensembles(params):
    """Test that empty ensembles and ensembles on one level set are refused"""

    traj = integrate(CylState(1.0, 0.0, 0.0, 0.1, 0.3), IntegratorConfig(t_end=1.0), params)

    with pytest.raises(InvalidEnsembleError):
        linear_probe(params, [])
    with pytest.raises(InvalidEnsembleError):
        linear_probe(params, [traj, traj])


def test_probe_flags_small_ensembles(params):
    """Test that an ensemble with few level sets is flagged rather than refused"""

    ensemble = probe_ensemble(params, count=2, t_end=5.0)
    result = linear_probe(params, ensemble)

    assert result.flagged
    assert result.n_trajectories == 2
    assert 'distinct level sets' in result.note


@pytest.mark.slow
def test_probe_separates_linear_and_quadratic(params):
    """Test that no linear-in-momenta integral fits while the quadratic control does"""

    ensemble = probe_ensemble(params)
    linear = linear_probe(params, ensemble, momentum_degree=1)
    quadratic = linear_probe(params, ensemble, momentum_degree=2)

    assert not linear.flagged
    assert linear.residual >= 1e-2
    assert quadratic.residual <= 1e-6
