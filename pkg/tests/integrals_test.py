import math
import numpy as np
import pytest
from src.hkepler import CylState, IntegralCase, PotentialParams, f1, f2, f3, evaluate_integrals, classify, relation_residual
from src.hkepler.exceptions import AxisSingularityError
from src.hkepler.integrals import (f3_compact, independence_margin, normalized_theta0,
                                   surface_identity_residual)
from src.hkepler.utils import Utils


@pytest.fixture
def params():
    return PotentialParams(1.0)


@pytest.fixture
def bounded_state():
    return CylState(1.0, 0.0, 0.0, 0.0, 0.1)


@pytest.fixture
def random_states():
    return Utils.random_admissible_states(np.random.default_rng(2024), 200)


def test_bounded_state_values(bounded_state, params):
    """Test the integrals of the bounded-trajectory initial state"""

    v = evaluate_integrals(bounded_state, params)

    assert v.H == pytest.approx(-0.995, abs=1e-15)
    assert v.F1 == pytest.approx(0.0, abs=1e-15)
    assert v.F2 == pytest.approx(0.99, abs=1e-15)
    assert v.F3 == pytest.approx(0.01, abs=1e-15)
    assert v.J == pytest.approx(0.99, abs=1e-15)
    assert v.theta0 == pytest.approx(0.0, abs=1e-15)
    assert v.case == IntegralCase.GENERAL
    assert v.F1 ** 2 + v.F2 ** 2 == pytest.approx(0.9801, abs=1e-14)
    assert 2 * v.H * v.F3 + 1 == pytest.approx(0.9801, abs=1e-14)


def test_relation_identity(random_states):
    """Test F₁² + F₂² = 2HF₃ + k² on random states for several k"""

    for k in (0.5, 1.0, 3.0):
        params = PotentialParams(k)
        for s in random_states:
            v = evaluate_integrals(s, params)
            scale = max(k * k, abs(2 * v.H * v.F3))
            assert abs(relation_residual(v, params)) <= 1e-9 * scale


def test_f3_forms_agree(random_states, params):
    """Test that the expanded and compact forms of F₃ agree"""

    for s in random_states:
        compact = f3_compact(s, params)
        assert compact >= 0
        assert f3(s, params) == pytest.approx(compact, rel=1e-12)


def test_surface_identity(random_states, params):
    """Test that the surface-function identity holds on the whole phase space"""

    for s in random_states:
        v = evaluate_integrals(s, params)
        scale = max(1.0, abs(v.F3), abs(v.J) * s.r * s.r, abs(v.H) * s.z * s.z)
        assert abs(surface_identity_residual(s, params)) <= 1e-12 * scale


def test_rotation_covariance(random_states, params):
    """Test that rotating a state rotates (F₁, F₂) by 2α and keeps H and F₃"""

    alpha = 0.7

    for s in random_states[:50]:
        before, after = evaluate_integrals(s, params), evaluate_integrals(s.rotated(alpha), params)
        rotated = complex(before.F2, before.F1) * complex(math.cos(2 * alpha), math.sin(2 * alpha))
        assert after.H == pytest.approx(before.H, abs=1e-14)
        assert after.F3 == pytest.approx(before.F3, abs=1e-13)
        assert after.F2 == pytest.approx(rotated.real, abs=1e-12)
        assert after.F1 == pytest.approx(rotated.imag, abs=1e-12)


def test_minimal_energy_case(params):
    """Test the classification of a state with J = 0"""

    v = evaluate_integrals(CylState(math.sqrt(2.0), 0.0, 0.0, 0.0, 1.0), params)

    assert v.H == pytest.approx(-0.25)
    assert v.F3 == pytest.approx(2.0)
    assert v.J <= 1e-12
    assert v.theta0 is None
    assert v.case == IntegralCase.MIN_ENERGY


def test_degenerate_case(params):
    """Test the classification of a radial state"""

    v = evaluate_integrals(CylState(1.0, 0.4, 0.0, 0.5, 0.0), params)

    assert v.F3 == 0.0
    assert v.J == pytest.approx(1.0)
    assert v.theta0 == pytest.approx(0.4)
    assert v.case == IntegralCase.DEGENERATE


def test_classify_tolerance(bounded_state, params):
    """Test that the tolerance decides the case"""

    v = evaluate_integrals(bounded_state, params)

    assert classify(v) == IntegralCase.GENERAL
    assert classify(v, tol=0.5) == IntegralCase.DEGENERATE


def test_normalized_theta0():
    """Test that θ₀ is reported in [0, π)"""

    assert normalized_theta0(0.0, 1.0) == 0.0
    assert normalized_theta0(1.0, 0.0) == pytest.approx(math.pi / 4)
    assert normalized_theta0(-1.0, 0.0) == pytest.approx(3 * math.pi / 4)
    assert 0 <= normalized_theta0(-1e-3, -1.0) < math.pi


def test_corrupted_f1_differs(bounded_state, params):
    """Test that the sign-flipped negative control changes F₁"""

    s = bounded_state.rotated(0.3)

    assert f1(s, params, corrupt=True) != pytest.approx(f1(s, params))
    assert f2(s, params) == pytest.approx(evaluate_integrals(s, params).F2)


def test_independence_margin(random_states, params):
    """Test that H, F₁ and F₃ are functionally independent on random states"""

    for s in random_states[:20]:
        assert independence_margin(s, params) > 1e-8


def test_axis_is_refused(params):
    """Test that integrals refuse states on the axis"""

    with pytest.raises(AxisSingularityError):
        f3(CylState(0.0, 0.0, 1.0, 0.0, 1.0), params)
