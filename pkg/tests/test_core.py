"""Coordinate models, metric, frame, conversions, and distances."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etau.core import (
    AmbientPoint,
    BasePoint,
    InvalidPointError,
    Model,
    ModelMismatchError,
    chord_length,
    conformal_factor,
    convert_model,
    distance_to_vertical_geodesic,
    frame_at,
    hyperbolic_distance,
    metric_at,
    polyline_length,
    project,
)

halfspace_points = st.builds(
    lambda x, y, t: AmbientPoint(BasePoint(Model.HALF_SPACE, x, y), t),
    st.floats(-3.0, 3.0),
    st.floats(0.05, 5.0),
    st.floats(-3.0, 3.0),
)
cylinder_points = st.builds(
    lambda angle, radius, t: AmbientPoint(
        BasePoint(Model.CYLINDER, radius * math.cos(angle), radius * math.sin(angle)), t
    ),
    st.floats(0.0, 2.0 * math.pi),
    st.floats(0.0, 0.9),
    st.floats(-3.0, 3.0),
)
taus = st.sampled_from([0.0, 0.5, -0.5, 1.0])


def hp(x: float, y: float, t: float = 0.0) -> AmbientPoint:
    return AmbientPoint(BasePoint(Model.HALF_SPACE, x, y), t)


def cyl(x: float, y: float, t: float = 0.0) -> AmbientPoint:
    return AmbientPoint(BasePoint(Model.CYLINDER, x, y), t)


class TestValidation:
    def test_halfspace_needs_positive_y(self):
        with pytest.raises(InvalidPointError):
            BasePoint(Model.HALF_SPACE, 0.0, 0.0)
        with pytest.raises(InvalidPointError):
            BasePoint(Model.HALF_SPACE, 1.0, -0.3)

    def test_disc_needs_interior(self):
        with pytest.raises(InvalidPointError):
            BasePoint(Model.CYLINDER, 1.0, 0.0)
        with pytest.raises(InvalidPointError):
            BasePoint(Model.CYLINDER, 0.8, 0.7)

    def test_mixed_models_rejected(self):
        with pytest.raises(ModelMismatchError):
            hyperbolic_distance(BasePoint(Model.HALF_SPACE, 0.0, 1.0), BasePoint(Model.CYLINDER, 0.0, 0.0))


class TestConformalFactor:
    def test_halfspace_unit(self):
        assert conformal_factor(BasePoint(Model.HALF_SPACE, 0.0, 1.0)) == 1.0

    def test_disc_center(self):
        assert conformal_factor(BasePoint(Model.CYLINDER, 0.0, 0.0)) == 2.0

    def test_disc_half_radius(self):
        assert conformal_factor(BasePoint(Model.CYLINDER, 0.0, 0.5)) == pytest.approx(8.0 / 3.0, rel=1e-15)


class TestMetric:
    def test_product_case_halfspace(self):
        assert np.allclose(metric_at(hp(0.0, 1.0), 0.0), np.eye(3))

    def test_product_case_disc(self):
        assert np.allclose(metric_at(cyl(0.0, 0.0), 0.0), np.diag([4.0, 4.0, 1.0]))

    def test_twisted_halfspace_entries(self):
        g = metric_at(hp(0.0, 1.0), 0.5)
        assert g[0, 0] == pytest.approx(2.0, rel=1e-15)
        assert g[0, 2] == pytest.approx(-1.0, rel=1e-15)
        assert g[1, 1] == pytest.approx(1.0, rel=1e-15)
        assert g[2, 2] == pytest.approx(1.0, rel=1e-15)
        assert np.allclose(g, g.T)

    def test_killing_field_t_independence(self):
        a = metric_at(hp(0.3, 0.7, -2.0), 0.5)
        b = metric_at(hp(0.3, 0.7, 11.0), 0.5)
        assert np.array_equal(a, b)

    @settings(max_examples=30, deadline=None)
    @given(halfspace_points, taus)
    def test_positive_definite(self, p, tau):
        eigenvalues = np.linalg.eigvalsh(metric_at(p, tau))
        assert np.all(eigenvalues > 0.0)


class TestFrame:
    @settings(max_examples=30, deadline=None)
    @given(st.one_of(halfspace_points, cylinder_points), taus)
    def test_orthonormal(self, p, tau):
        g = metric_at(p, tau)
        basis = np.array([e.coords() for e in frame_at(p, tau)])
        gram = basis @ g @ basis.T
        assert np.max(np.abs(gram - np.eye(3))) < 1e-12

    def test_vertical_leg_is_killing_direction(self):
        _, _, e3 = frame_at(hp(0.4, 1.5), 0.5)
        assert (e3.dx, e3.dy, e3.dt) == (0.0, 0.0, 1.0)

    def test_disc_origin_scaling(self):
        e1, _, _ = frame_at(cyl(0.0, 0.0), 1.0)
        assert e1.dx == pytest.approx(0.5, rel=1e-15)
        assert e1.dy == 0.0


class TestConversion:
    def test_axis_point_fixed(self):
        q = convert_model(hp(0.0, 1.0, 0.7), 1.0)
        assert q.model is Model.CYLINDER
        assert (q.x, q.y) == pytest.approx((0.0, 0.0), abs=1e-15)
        assert q.t == pytest.approx(0.7, abs=1e-15)

    def test_tau_zero_keeps_fiber(self):
        q = convert_model(hp(1.3, 0.4, 5.0), 0.0)
        assert q.t == 5.0

    def test_reference_value(self):
        # Fiber correction sign is forced by the isometry property of the
        # conversion (see test_isometries for the metric pullback check);
        # the base image is phi(1+i) = (2+i)/5.
        q = convert_model(hp(1.0, 1.0, 0.0), 1.0)
        assert (q.x, q.y) == pytest.approx((0.4, 0.2), rel=1e-15)
        assert q.t == pytest.approx(-4.0 * math.atan(0.5), rel=1e-14)
        assert q.t == pytest.approx(-1.8545904360032244, rel=1e-14)

    def test_projection_commutes(self):
        p = hp(0.6, 2.1, 0.3)
        assert project(convert_model(p, 0.7)) == convert_model(p, 0.7).base

    @settings(max_examples=40, deadline=None)
    @given(st.one_of(halfspace_points, cylinder_points), taus)
    def test_round_trip(self, p, tau):
        back = convert_model(convert_model(p, tau), tau)
        assert back.model is p.model
        assert np.max(np.abs(back.coords() - p.coords())) < 1e-10


class TestDistances:
    def test_vertical_geodesic_log(self):
        a = BasePoint(Model.HALF_SPACE, 0.0, 1.0)
        b = BasePoint(Model.HALF_SPACE, 0.0, math.e)
        assert hyperbolic_distance(a, b) == pytest.approx(1.0, rel=1e-14)

    def test_coincident_points(self):
        a = BasePoint(Model.HALF_SPACE, 0.3, 0.9)
        assert hyperbolic_distance(a, a) == 0.0

    def test_disc_radial(self):
        a = BasePoint(Model.CYLINDER, 0.0, 0.0)
        b = BasePoint(Model.CYLINDER, 0.0, 0.37)
        assert hyperbolic_distance(a, b) == pytest.approx(2.0 * math.atanh(0.37), rel=1e-14)

    def test_conversion_preserves_distance(self):
        a = BasePoint(Model.HALF_SPACE, -0.7, 0.4)
        b = BasePoint(Model.HALF_SPACE, 1.1, 2.6)
        ca = convert_model(AmbientPoint(a, 0.0), 0.0).base
        cb = convert_model(AmbientPoint(b, 0.0), 0.0).base
        assert hyperbolic_distance(a, b) == pytest.approx(hyperbolic_distance(ca, cb), rel=1e-12)

    def test_distance_to_vertical_geodesic(self):
        assert distance_to_vertical_geodesic(BasePoint(Model.HALF_SPACE, 1.0, 1.0), 1.0) == 0.0
        expected = math.asinh(1.0)
        assert distance_to_vertical_geodesic(
            BasePoint(Model.HALF_SPACE, 2.0, 1.0), 1.0
        ) == pytest.approx(expected, rel=1e-14)

    def test_geodesic_distance_scaling_invariance(self):
        p = BasePoint(Model.HALF_SPACE, 1.7, 0.8)
        scaled = BasePoint(Model.HALF_SPACE, 1.0 + 2.5 * (p.x - 1.0), 2.5 * p.y)
        assert distance_to_vertical_geodesic(p, 1.0) == pytest.approx(
            distance_to_vertical_geodesic(scaled, 1.0), rel=1e-13
        )


class TestChords:
    def test_chord_vanishes_at_zero_separation(self):
        p = hp(0.2, 1.1, 0.4)
        assert chord_length(p, p, 0.5) == 0.0

    def test_vertical_chord_is_euclidean(self):
        p, q = hp(0.2, 1.1, 0.0), hp(0.2, 1.1, 0.25)
        assert chord_length(p, q, 0.7) == pytest.approx(0.25, rel=1e-14)

    def test_polyline_converges_to_distance(self):
        a = BasePoint(Model.HALF_SPACE, 0.0, 1.0)
        b = BasePoint(Model.HALF_SPACE, 0.0, 2.0)
        ys = np.linspace(1.0, 2.0, 400)
        coords = np.column_stack([np.zeros_like(ys), ys, np.zeros_like(ys)])
        assert polyline_length(Model.HALF_SPACE, 0.0, coords) == pytest.approx(
            hyperbolic_distance(a, b), rel=1e-6
        )
