import math

import numpy as np
import pytest

from services.oracle import extrapolate, fd_jet, line_derivative


class TestExtrapolate:
    def test_removes_even_error_terms(self):
        # f(h) = 1 + h^2 at h = 1, 1/2, 1/4
        value, err = extrapolate([2.0, 1.25, 1.0625])
        assert value == pytest.approx(1.0)
        assert err == pytest.approx(0.0, abs=1e-12)

    def test_single_estimate_has_no_error_bound(self):
        value, err = extrapolate([3.0])
        assert value == 3.0
        assert err == math.inf


class TestLineDerivative:
    @pytest.mark.parametrize("order, expected", [(1, math.cos(0.2)), (2, -math.sin(0.2)), (3, -math.cos(0.2))])
    def test_sine(self, order, expected):
        unit = 1e-2
        value, _ = line_derivative(lambda k: math.sin(0.2 + k * unit), order)
        assert value / unit ** order == pytest.approx(expected, rel=1e-5)

    def test_order_zero(self):
        value, err = line_derivative(lambda k: np.array([k + 1.0]), 0)
        assert value == pytest.approx([1.0])
        assert err == 0.0


class TestFdJet:
    def test_matches_closed_form(self):
        (f,) = fd_jet(lambda q: [math.exp(q[0]) * math.sin(q[1])], (0.1, 0.7))
        e = math.exp(0.1)
        assert f.value == pytest.approx(e * math.sin(0.7))
        assert f.derivative(1, 0) == pytest.approx(e * math.sin(0.7), rel=1e-7)
        assert f.derivative(1, 1) == pytest.approx(e * math.cos(0.7), rel=1e-7)
        assert f.derivative(0, 3) == pytest.approx(-e * math.cos(0.7), rel=1e-4)

    def test_polynomials_are_exact(self):
        (f,) = fd_jet(lambda q: [q[0] ** 3 + q[0] * q[1] ** 2], (0.5, -1.0))
        assert f.derivative(3, 0) == pytest.approx(6.0, rel=1e-8)
        assert f.derivative(1, 2) == pytest.approx(2.0, rel=1e-8)

    @pytest.mark.parametrize("h", [0.0, -1e-2])
    def test_rejects_non_positive_step(self, h):
        with pytest.raises(ValueError):
            fd_jet(lambda q: [q[0]], (0.0, 0.0), h=h)
