import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.geometry import AmbientMetric
from models.models import CausalCharacter
from services.ambient import (
    R41,
    R42,
    causal_character,
    euclidean,
    inner,
    relative_bivector_residual,
    relative_wedge_residual,
    triple_wedge,
)


class TestMetric:
    def test_signatures(self):
        assert R41.index == 1
        assert R42.index == 2

    @pytest.mark.parametrize("signs", [(1, 1, 1, 1), (-1, -1, -1, 1), (-1, 1, 1), (2, 1, 1, 1)])
    def test_rejects_other_signatures(self, signs):
        with pytest.raises(ValueError):
            AmbientMetric(signs)

    def test_inner_product(self):
        assert inner(R42, [1, 1, 1, 1], [1, 2, 3, 4]) == pytest.approx(4.0)
        assert inner(R41, [1, 1, 0, 0], [1, 1, 0, 0]) == pytest.approx(0.0)

    @pytest.mark.parametrize("x, expected", [
        ([1, 1, 0, 0], CausalCharacter.null),
        ([1, 0, 0, 0], CausalCharacter.timelike),
        ([0, 0, 1, 0], CausalCharacter.spacelike),
        ([0, 0, 0, 0], CausalCharacter.zero),
    ])
    def test_causal_character(self, x, expected):
        assert causal_character(R41, x) == expected


class TestWedge:
    def test_triple_wedge_is_orthogonal_to_its_factors(self):
        a, b, c = np.array([1.0, 2, 0, 1]), np.array([0.0, 1, 3, -1]), np.array([2.0, 0, 1, 1])
        w = triple_wedge(a, b, c)
        for x in (a, b, c):
            assert euclidean(x, w) == pytest.approx(0.0, abs=1e-12)

    def test_triple_wedge_is_a_determinant(self):
        e = np.eye(4)
        assert euclidean(e[0], triple_wedge(e[1], e[2], e[3])) == pytest.approx(1.0)

    def test_coordinate_axes_give_unit_residual(self):
        e = np.eye(4)
        assert relative_wedge_residual(e[0], e[1], e[2]) == pytest.approx(1.0)

    def test_dependent_vectors_give_zero(self):
        a, b = np.array([1.0, 2, 3, 4]), np.array([0.0, 1, 0, 1])
        assert relative_wedge_residual(a, b, 2 * a - b) == pytest.approx(0.0, abs=1e-14)

    def test_residual_is_scale_free(self):
        a, b, c = np.array([1.0, 0, 0, 1]), np.array([0.0, 1, 0, 0]), np.array([1.0, 1, 1, 0])
        assert relative_wedge_residual(1e6 * a, b, 1e-6 * c) == pytest.approx(relative_wedge_residual(a, b, c))

    def test_short_factor_still_counts(self):
        e = np.eye(4)
        assert relative_wedge_residual(e[0], 1e-9 * e[1], e[2], negligible=1e-12) == pytest.approx(1.0)

    def test_uniformly_small_factors_keep_their_verdict(self):
        e = np.eye(4)
        assert relative_wedge_residual(1e-9 * e[0], 1e-9 * e[1], 1e-9 * e[2], negligible=1e-12) == pytest.approx(1.0)

    def test_factor_at_rounding_level_of_the_longest_is_zero(self):
        e = np.eye(4)
        assert relative_wedge_residual(1e6 * e[0], e[1], 1e-8 * e[2], negligible=1e-12) == 0.0

    def test_reference_zeroes_pure_noise(self):
        e = np.eye(4)
        assert relative_bivector_residual(1e-17 * e[0], 1e-17 * e[1], negligible=1e-12, reference=1.0) == 0.0
        assert relative_bivector_residual(1e-17 * e[0], 1e-17 * e[1], negligible=1e-12) == pytest.approx(1.0)

    def test_bivector_residual(self):
        e = np.eye(4)
        assert relative_bivector_residual(e[0], 3 * e[0]) == pytest.approx(0.0)
        assert relative_bivector_residual(e[0], e[1]) == pytest.approx(1.0)


vectors = st.lists(st.floats(min_value=-10.0, max_value=10.0), min_size=4, max_size=4).map(np.array)
metrics = st.sampled_from([R41, R42])


@settings(max_examples=60, deadline=None)
@given(g=metrics, x=vectors, y=vectors, z=vectors, a=st.floats(min_value=-5.0, max_value=5.0))
def test_inner_product_is_symmetric_and_bilinear(g, x, y, z, a):
    scale = 1e-9 * (1.0 + np.linalg.norm(x) + np.linalg.norm(y)) * (1.0 + abs(a)) * (1.0 + np.linalg.norm(z))
    assert inner(g, x, y) == pytest.approx(inner(g, y, x), abs=scale)
    assert inner(g, a * x + y, z) == pytest.approx(a * inner(g, x, z) + inner(g, y, z), abs=scale)


@settings(max_examples=60, deadline=None)
@given(a=vectors, b=vectors, c=vectors)
def test_triple_wedge_alternates(a, b, c):
    w = triple_wedge(a, b, c)
    scale = 1e-9 * (1.0 + np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c))
    np.testing.assert_allclose(triple_wedge(b, a, c), -w, atol=scale)
    np.testing.assert_allclose(triple_wedge(a, c, b), -w, atol=scale)
    np.testing.assert_allclose(triple_wedge(b, c, a), w, atol=scale)
    np.testing.assert_allclose(triple_wedge(a, b, a), np.zeros(4), atol=scale)


factors = st.one_of(st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=-10.0, max_value=-0.1))
sizable = st.lists(
    st.floats(min_value=-10.0, max_value=10.0).filter(lambda x: x == 0.0 or abs(x) > 1e-3), min_size=4, max_size=4
).map(np.array)


@settings(max_examples=60, deadline=None)
@given(a=sizable, b=sizable, c=sizable, s=factors, t=factors, r=factors)
def test_wedge_residual_ignores_rescaling(a, b, c, s, t, r):
    residual = relative_wedge_residual(a, b, c)
    assert relative_wedge_residual(s * a, t * b, r * c) == pytest.approx(residual, abs=1e-9)
