import math
import numpy as np
import pytest
from src.hkepler import CartPoint, CartState, CylState, group_mul, group_inverse, dilate, to_cylindrical, from_cylindrical
from src.hkepler.exceptions import AxisSingularityError, InvalidArgumentError
from src.hkepler.geometry import constraint_form, frame_x, frame_y
from src.hkepler.potential import gauge_rho


@pytest.fixture
def bounded_cartesian():
    return CartState(CartPoint(1.0, 0.0, 0.0), 0.0, 0.1)


def test_group_product():
    """Test the twisted product of two points"""

    product = group_mul(CartPoint(1.0, 0.0, 0.0), CartPoint(0.0, 1.0, 0.0))

    assert product == CartPoint(1.0, 1.0, 0.5)
    assert group_mul(CartPoint(0.0, 1.0, 0.0), CartPoint(1.0, 0.0, 0.0)) == CartPoint(1.0, 1.0, -0.5)


def test_group_inverse():
    """Test that p·p⁻¹ is the identity and that the product is associative"""

    p, q, s = CartPoint(1.0, 2.0, 3.0), CartPoint(-0.5, 0.25, 1.0), CartPoint(2.0, -1.0, 0.5)

    assert group_mul(p, group_inverse(p)) == CartPoint(0.0, 0.0, 0.0)
    assert group_mul(group_inverse(p), p) == CartPoint(0.0, 0.0, 0.0)
    assert np.allclose(group_mul(group_mul(p, q), s).to_array(), group_mul(p, group_mul(q, s)).to_array())


def test_dilation():
    """Test the anisotropic dilation and the homogeneity of the gauge"""

    p = CartPoint(1.0, 2.0, 3.0)

    assert dilate(2.0, p) == CartPoint(2.0, 4.0, 12.0)
    assert gauge_rho(dilate(3.0, p)) == pytest.approx(3.0 * gauge_rho(p), rel=1e-14)

    with pytest.raises(InvalidArgumentError):
        dilate(0.0, p)
    with pytest.raises(InvalidArgumentError):
        dilate(-1.0, p)


def test_frame_fields_are_horizontal():
    """Test that the constraint form vanishes on X and Y but not on ∂z"""

    p = CartPoint(1.0, 2.0, 3.0)

    assert np.array_equal(frame_x(p), [1.0, 0.0, -1.0])
    assert np.array_equal(frame_y(p), [0.0, 1.0, 0.5])
    assert constraint_form(p, frame_x(p)) == 0.0
    assert constraint_form(p, frame_y(p)) == 0.0
    assert constraint_form(p, (0.0, 0.0, 1.0)) == 1.0


def test_to_cylindrical(bounded_cartesian):
    """Test converting the bounded-trajectory initial state"""

    s = to_cylindrical(bounded_cartesian)

    assert s.r == 1.0
    assert s.theta == 0.0
    assert s.z == 0.0
    assert s.p_R == 0.0
    assert s.p_S == pytest.approx(0.1, abs=1e-15)


def test_coordinate_round_trip():
    """Test that both conversions invert each other off the axis"""

    rng = np.random.default_rng(3)

    for _ in range(50):
        x, y, z, p_X, p_Y = rng.uniform(-2, 2, 5)
        s = CartState(CartPoint(x, y, z), p_X, p_Y)
        back = from_cylindrical(to_cylindrical(s))
        assert back.point.x == pytest.approx(x, abs=1e-12)
        assert back.point.y == pytest.approx(y, abs=1e-12)
        assert back.point.z == z
        assert back.p_X == pytest.approx(p_X, abs=1e-12)
        assert back.p_Y == pytest.approx(p_Y, abs=1e-12)


def test_axis_singularity():
    """Test that conversions refuse points on the Oz axis"""

    with pytest.raises(AxisSingularityError):
        to_cylindrical(CartState(CartPoint(0.0, 0.0, 1.0), 1.0, 0.0))
    with pytest.raises(AxisSingularityError):
        from_cylindrical(CylState(0.0, 0.0, 1.0, 0.0, 0.0))


def test_state_validation():
    """Test that states reject negative radii and non-finite values"""

    with pytest.raises(InvalidArgumentError):
        CylState(-1.0, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        CylState(1.0, math.nan, 0.0, 0.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        CartPoint(math.inf, 0.0, 0.0)


def test_rotated_state():
    """Test rotating a state about the Oz axis"""

    s = CylState(1.0, 0.5, 0.2, 0.1, 0.3)
    rotated = s.rotated(1.0)

    assert rotated == CylState(1.0, 1.5, 0.2, 0.1, 0.3)
    assert CylState.from_array(s.to_array()) == s
    assert s.cartesian_xy() == pytest.approx((math.cos(0.5), math.sin(0.5)))
