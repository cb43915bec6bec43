import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.errors import JetDomainError, JetOrderExhausted
from services import jet as jets
from services.jet import Jet, lift, value_of


class TestJetArithmetic:
    """Truncated Taylor arithmetic against hand-computed derivatives"""

    @pytest.fixture
    def x(self):
        """First parameter at 0.5"""
        return Jet.variable(0, 0.5)

    @pytest.fixture
    def y(self):
        """Second parameter at -1.5"""
        return Jet.variable(1, -1.5)

    def test_variable_has_unit_gradient(self, x, y):
        assert x.partials[1] == (1.0, 0.0)
        assert y.partials[1] == (0.0, 1.0)

    def test_product_rule(self, x, y):
        f = x * x * y
        assert f.value == pytest.approx(0.25 * -1.5)
        assert f.derivative(1, 0) == pytest.approx(2 * 0.5 * -1.5)
        assert f.derivative(0, 1) == pytest.approx(0.25)
        assert f.derivative(2, 1) == pytest.approx(2.0)
        assert f.derivative(3, 0) == pytest.approx(0.0)

    def test_quotient_matches_reciprocal(self, x, y):
        q = (x + 2.0) / (y - 1.0)
        r = (x + 2.0) * jets.reciprocal(y - 1.0)
        np.testing.assert_allclose(q.coef, r.coef, rtol=1e-14)

    def test_integer_power_by_squaring(self, x):
        f = x ** 5
        assert f.derivative(1, 0) == pytest.approx(5 * 0.5 ** 4)
        assert f.derivative(3, 0) == pytest.approx(60 * 0.5 ** 2)

    def test_negative_power(self, x):
        f = x ** -2
        assert f.derivative(2, 0) == pytest.approx(6 * 0.5 ** -4)

    def test_real_power_requires_positive_base(self, y):
        with pytest.raises(JetDomainError):
            y ** 0.5

    def test_scalar_on_left(self, x):
        f = 3.0 - x
        assert f.value == pytest.approx(2.5)
        assert f.derivative(1, 0) == pytest.approx(-1.0)
        g = 2.0 ** x
        assert g.derivative(1, 0) == pytest.approx(2.0 ** 0.5 * math.log(2.0))

    def test_numpy_defers_to_jet(self, x):
        vector = np.array([1.0, 2.0]) * x
        assert isinstance(vector[1], Jet)
        assert vector[1].derivative(1, 0) == pytest.approx(2.0)

    def test_partial_lowers_order(self, x, y):
        f = jets.sin(x) * y
        d = f.partial(0)
        assert d.order == 2
        assert d.value == pytest.approx(math.cos(0.5) * -1.5)
        assert d.derivative(0, 1) == pytest.approx(math.cos(0.5))

    def test_order_exhausted(self, x):
        with pytest.raises(JetOrderExhausted):
            x.truncate(1).derivative(2, 0)
        with pytest.raises(JetOrderExhausted):
            Jet.constant(1.0, 0).partial(0)

    def test_from_derivatives_round_trip(self):
        f = Jet.from_derivatives({(0, 0): 1.0, (2, 1): 6.0})
        assert f.derivative(2, 1) == pytest.approx(6.0)


class TestJetFunctions:
    @pytest.mark.parametrize("name, fn, d1, d2, d3", [
        ("sin", jets.sin, math.cos, lambda a: -math.sin(a), lambda a: -math.cos(a)),
        ("cos", jets.cos, lambda a: -math.sin(a), lambda a: -math.cos(a), math.sin),
        ("exp", jets.exp, math.exp, math.exp, math.exp),
        ("log", jets.log, lambda a: 1 / a, lambda a: -1 / a ** 2, lambda a: 2 / a ** 3),
        ("sqrt", jets.sqrt, lambda a: 0.5 / math.sqrt(a), lambda a: -0.25 * a ** -1.5, lambda a: 0.375 * a ** -2.5),
    ])
    def test_univariate_derivatives(self, name, fn, d1, d2, d3):
        a = 0.7
        f = fn(Jet.variable(0, a))
        assert f.derivative(1, 0) == pytest.approx(d1(a), rel=1e-13)
        assert f.derivative(2, 0) == pytest.approx(d2(a), rel=1e-13)
        assert f.derivative(3, 0) == pytest.approx(d3(a), rel=1e-13)

    def test_functions_accept_floats(self):
        assert jets.sqrt(4.0) == 2.0
        assert jets.log(1.0) == 0.0

    @pytest.mark.parametrize("fn, argument", [
        (jets.log, 0.0),
        (jets.log, -1.0),
        (jets.sqrt, -1.0),
        (jets.reciprocal, 0.0),
    ])
    def test_domain_errors(self, fn, argument):
        with pytest.raises(JetDomainError):
            fn(Jet.variable(0, argument))
        with pytest.raises(JetDomainError):
            fn(argument)

    def test_value_of_and_lift_on_arrays(self):
        field = lift(np.array([1.0, 2.0]))
        assert all(isinstance(item, Jet) for item in field)
        np.testing.assert_array_equal(value_of(field), [1.0, 2.0])


@settings(max_examples=50, deadline=None)
@given(
    a=st.floats(min_value=-2.0, max_value=2.0),
    b=st.floats(min_value=-2.0, max_value=2.0),
)
def test_mixed_partials_of_exp_product(a, b):
    f = jets.exp(Jet.variable(0, a) * Jet.variable(1, b))
    e = math.exp(a * b)
    assert f.derivative(1, 1) == pytest.approx((1 + a * b) * e, rel=1e-12, abs=1e-12)
    assert f.derivative(2, 1) == pytest.approx((2 * b + a * b * b) * e, rel=1e-12, abs=1e-12)
