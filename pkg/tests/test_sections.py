import math

import numpy as np
import pytest

from models.errors import CoefficientUndefined
from models.models import DirectionKind
from services.ambient import R41
from services.forms import V, XI, induced_fields
from services.jet import value_of
from services.sections import (
    degenerate_equivalences,
    degenerate_section,
    h_parallel_residuals,
    l_values,
    nondegenerate_section,
    planarity,
    radical_plane_coefficients,
    radical_plane_residual,
    radical_shape_residual,
    screen_plane_residuals,
    section,
    stay_in_plane,
    tangential_acceleration,
)
from tests.utils.surfaces import fixture_data, make_config, make_fields


def _config_fields(config, p):
    return induced_fields(config.immersion_model(), config.metric(), p, config.frame_options())


def _helix(scale):
    """Null helix cylinder scaled by ``scale``, with the frame built from the tangents alone"""
    coordinates = {"x1": f"{scale}*u1", "x2": f"{scale}*cos(u1)", "x3": f"{scale}*sin(u1)", "x4": f"{scale}*u2"}
    config = make_config("null_helix_cylinder", immersion={"form": "parametric", "coordinates": coordinates},
                         frame={"pins": {}})
    return _config_fields(config, (0.25, 0.0))


class TestPlanarity:
    def test_coordinate_axes_are_not_planar(self):
        e = np.eye(4)
        planar, residual = planarity((e[0], e[1], e[2]))
        assert not planar
        assert residual == pytest.approx(1.0)

    def test_vanishing_higher_derivatives_are_planar(self):
        planar, residual = planarity((np.array([1.0, 1.0, 0.0, 0.0]), np.zeros(4), np.zeros(4)))
        assert planar
        assert residual == 0.0

    @pytest.mark.parametrize("size", [1e-9, 1e-6])
    def test_short_curvature_is_not_planar(self, size):
        e = np.eye(4)
        planar, residual = planarity((e[0], size * e[1], e[2]))
        assert not planar
        assert residual == pytest.approx(1.0)


class TestStayInPlane:
    def test_drift_removes_the_plane_normal_components(self):
        m, partner = np.array([-0.5, 0.5, 0.0, 0.0]), np.array([1.0, 1.0, 0.0, 0.0])
        flow = (np.array([0.0, -1.0, 0.0, 0.0]), np.array([0.0, 0.0, -1.0, 0.0]))
        cross = np.array([0.0, 0.0, 3.0, 0.0])
        d2, d3, drift = stay_in_plane(flow, partner, m, cross, R41)
        assert drift["phi1"] == pytest.approx(0.5)
        assert drift["phi2"] == pytest.approx(0.0)
        np.testing.assert_allclose(d2, [0.5, -0.5, 0.0, 0.0])
        np.testing.assert_allclose(d3, [0.0, 0.0, 0.5, 0.0])


class TestRadicalSections:
    @pytest.fixture
    def ruled_graph(self):
        """Pinned ruled graph at the origin, where the null rulings are straight"""
        return make_fields("example_ex1", (0.0, 0.0))

    @pytest.fixture
    def helix(self):
        """Null helix cylinder, whose radical sections are helices"""
        return make_fields("null_helix_cylinder", (0.25, 0.0))

    def test_ruling_is_a_planar_geodesic(self, ruled_graph):
        jet = degenerate_section(ruled_graph)
        assert jet.kind == DirectionKind.degenerate
        np.testing.assert_allclose(jet.d2, np.zeros(4), atol=1e-12)
        assert jet.planar
        assert jet.geodesic_arc

    def test_ruling_has_no_log_coefficient(self, ruled_graph):
        with pytest.raises(CoefficientUndefined):
            radical_plane_coefficients(ruled_graph)

    def test_ruling_satisfies_every_equivalence(self, ruled_graph):
        values = degenerate_equivalences(ruled_graph)
        assert max(values.values()) < 1e-9, values
        assert radical_plane_residual(ruled_graph) < 1e-8

    def test_helix_is_not_planar(self, helix):
        jet = degenerate_section(helix)
        assert not jet.planar
        assert jet.kappa_sq == pytest.approx(1.0)
        assert radical_plane_residual(helix) > 0.1

    def test_helix_stays_in_its_plane_without_drift(self, helix):
        jet = degenerate_section(helix)
        assert jet.drift["phi1"] == pytest.approx(0.0, abs=1e-14)
        assert jet.drift["phi2"] == pytest.approx(0.0, abs=1e-14)
        np.testing.assert_allclose(jet.d3, jet.flow[1], atol=1e-14)

    @pytest.mark.parametrize("scale", [1000, 1000000000])
    def test_helix_verdict_does_not_depend_on_size(self, scale):
        unit, scaled = degenerate_section(_helix(1)), degenerate_section(_helix(scale))
        assert not scaled.planar
        assert scaled.planarity_residual == pytest.approx(unit.planarity_residual, rel=1e-6)
        assert radical_plane_residual(_helix(scale)) == pytest.approx(radical_plane_residual(_helix(1)), rel=1e-6)

    def test_helix_plane_coefficients(self, helix):
        result = radical_plane_coefficients(helix)
        assert result["a"] == pytest.approx(0.0, abs=1e-12)
        assert result["b"] == pytest.approx(-0.5)
        assert result["residual"] == pytest.approx(math.sqrt(0.5))

    def test_plane_coefficients_leave_the_normal_component(self, helix):
        D = value_of(helix.D2[XI][XI])
        eps1 = value_of(helix.eps1[XI])
        n = helix.frame.at_base().n
        assert eps1 == pytest.approx(-helix.frame.eps * D)
        residual = radical_plane_coefficients(helix)["residual"]
        assert residual == pytest.approx(abs(D * eps1) * np.linalg.norm(n))

    def test_negative_radical_curvature_has_no_log_coefficient(self):
        pins = fixture_data("null_helix_cylinder")["frame"]["pins"]
        config = make_config("null_helix_cylinder",
                             frame={"pins": {"xi": pins["xi"], "u": ["0", "cos(u1)", "sin(u1)", "0"]}})
        fields = _config_fields(config, (0.25, 0.0))
        assert value_of(fields.D2[XI][XI]) == pytest.approx(-1.0)
        with pytest.raises(CoefficientUndefined):
            radical_plane_coefficients(fields)

    def test_term_sum_matches_direct_derivative(self, helix):
        jet = degenerate_section(helix)
        direct_d2, direct_d3 = jet.direct
        np.testing.assert_allclose(jet.flow[0], direct_d2, atol=1e-12)
        np.testing.assert_allclose(jet.flow[1], direct_d3, atol=1e-12)

    def test_radical_shape_for_helix(self, helix):
        assert radical_shape_residual(helix) < 1e-12

    def test_l_value_is_zero_on_straight_rulings(self, ruled_graph):
        assert l_values(ruled_graph)["degenerate"] == pytest.approx(0.0, abs=1e-20)

    def test_helicoid_rulings_are_planar_but_radical_shape_fails(self):
        fields = make_fields("null_helicoid", (1.0, 0.0))
        assert degenerate_section(fields).planar
        assert radical_shape_residual(fields) == pytest.approx(np.linalg.norm([0.0, 0.0, 1.0, 1.0]) / 2 ** 1.5)


class TestScreenSections:
    def test_circle_is_planar_with_unit_curvature(self):
        fields = make_fields("example_r41", (0.0, 0.0))
        jet = nondegenerate_section(fields)
        assert jet.planar
        assert jet.kappa_sq == pytest.approx(1.0)
        assert jet.d_kappa_sq == pytest.approx(0.0, abs=1e-12)
        assert screen_plane_residuals(fields, jet)["residual"] < 1e-8

    def test_sheared_circle_section_is_planar_while_flow_line_twists(self):
        fields = make_fields("sheared_circle", (0.0, 0.0))
        jet = section(fields, "nondegenerate")
        np.testing.assert_allclose(jet.flow[1], [6.0, 6.0, 0.0, -1.0], atol=1e-10)
        assert jet.flow_residual == pytest.approx(math.sqrt(72.0 / 73.0))
        assert jet.drift["phi2"] == pytest.approx(-6.0)
        np.testing.assert_allclose(jet.d3, [0.0, 0.0, 0.0, -1.0], atol=1e-10)
        assert jet.planar
        assert jet.kappa_sq == pytest.approx(1.0)
        assert jet.d_kappa_sq == pytest.approx(0.0, abs=1e-10)

    @pytest.mark.parametrize("t", [0.5, 1.0, 1.5])
    def test_helicoid_screen_section_twists(self, t):
        fields = make_fields("null_helicoid", (t, 0.0))
        jet = nondegenerate_section(fields)
        r2 = 1.0 + t * t
        assert jet.drift["phi1"] == pytest.approx(t / (2 * r2))
        np.testing.assert_allclose(jet.d2, [t / (2 * r2), -t / (2 * r2), 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(jet.d3, t / (2 * r2 ** 2.5) * np.array([0.0, 0.0, 1.0, -t]), atol=1e-12)
        assert jet.kappa_sq == pytest.approx(0.0, abs=1e-12)
        assert jet.d_kappa_sq == pytest.approx(0.0, abs=1e-12)
        assert not jet.planar

    @pytest.mark.parametrize("name, p", [
        ("example_ex1", (0.2, -0.3)),
        ("example_r41", (0.1, 0.4)),
        ("sheared_circle", (0.0, 0.2)),
        ("null_helicoid", (0.8, 0.3)),
    ])
    def test_term_sum_matches_direct_derivative(self, name, p):
        jet = nondegenerate_section(make_fields(name, p))
        direct_d2, direct_d3 = jet.direct
        np.testing.assert_allclose(jet.flow[0], direct_d2, atol=1e-10)
        np.testing.assert_allclose(jet.flow[1], direct_d3, atol=1e-10)

    def test_bare_bivector_misses_planar_sections(self):
        fields = make_fields("example_ex1", (0.0, 0.0))
        jet = nondegenerate_section(fields)
        residuals = screen_plane_residuals(fields, jet)
        assert jet.planar
        assert residuals["residual"] < 1e-8
        assert residuals["bivector"] == pytest.approx(1.0)

    def test_l_value_of_circle(self):
        assert l_values(make_fields("example_r41", (0.0, 0.0)))["nondegenerate"] == pytest.approx(1.0)


class TestSecondFormDerivatives:
    def test_null_plane_has_parallel_h(self):
        fields = make_fields("null_plane", (0.1, 0.1))
        residuals = h_parallel_residuals(fields)
        assert residuals["degenerate"] == 0.0
        assert residuals["nondegenerate"] == 0.0

    @pytest.mark.parametrize("X", [XI, V])
    def test_straight_flow_lines_have_no_acceleration(self, X):
        first, second = tangential_acceleration(make_fields("null_plane", (0.0, 0.0)), X)
        assert first == pytest.approx(0.0, abs=1e-14)
        assert second == pytest.approx(0.0, abs=1e-14)
