"""Tests for the ambient isometry families and their pullback checks."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etau.core import (
    AmbientPoint,
    BasePoint,
    Model,
    ParameterError,
    chord_length,
    convert_model,
    hyperbolic_distance,
)
from etau.isometries import (
    AmbientIsometry,
    MobiusMap,
    Orientation,
    apply,
    apply_to_coords,
    arg_derivative,
    axis_translation_angle,
    axis_translation_isometry,
    compose,
    conversion_pullback_residual,
    disc_point_isometry,
    halfplane_graph_isometry,
    halfplane_reflection,
    identity_isometry,
    inverse,
    isometry_from_json,
    isometry_to_json,
    point_translation_angle,
    pullback_residual,
    rotation_isometry,
    scale_isometry,
    vertical_translation,
    _map_pullback_residual,
)

RESIDUAL_TOL = 1e-9

TAUS = [0.0, 0.5, -0.5]


def halfspace_point(x: float, y: float, t: float) -> AmbientPoint:
    return AmbientPoint(BasePoint(Model.HALF_SPACE, x, y), t)


def cylinder_point(x: float, y: float, t: float) -> AmbientPoint:
    return AmbientPoint(BasePoint(Model.CYLINDER, x, y), t)


HALF_PROBES = [
    halfspace_point(0.4, 1.1, 0.2),
    halfspace_point(-1.3, 0.35, -0.8),
    halfspace_point(2.2, 2.6, 1.5),
]

CYL_PROBES = [
    cylinder_point(0.0, 0.0, 0.3),
    cylinder_point(0.45, -0.3, -1.1),
    cylinder_point(-0.6, 0.15, 0.9),
]


def family_members(tau: float) -> list[AmbientIsometry]:
    return [
        identity_isometry(tau, Model.HALF_SPACE),
        vertical_translation(0.7, tau, Model.CYLINDER),
        scale_isometry(2.5, tau),
        axis_translation_isometry(1.0, tau),
        disc_point_isometry(0.3 + 0.2j, tau),
        halfplane_graph_isometry(2.0, 0.5, 1.25, tau),
        rotation_isometry(0.9, tau),
        halfplane_reflection(0.5, tau),
    ]


def probes_for(iso: AmbientIsometry) -> list[AmbientPoint]:
    return HALF_PROBES if iso.model is Model.HALF_SPACE else CYL_PROBES


# -- pullback residuals --------------------------------------------------------


@pytest.mark.parametrize("tau", TAUS)
def test_all_families_have_tiny_pullback_residual(tau: float) -> None:
    for iso in family_members(tau):
        for p in probes_for(iso):
            assert pullback_residual(iso, p) < RESIDUAL_TOL, iso.family


@pytest.mark.parametrize("tau", TAUS)
def test_model_conversion_pullback_residual(tau: float) -> None:
    for p in HALF_PROBES + CYL_PROBES:
        assert conversion_pullback_residual(p, tau) < RESIDUAL_TOL


def test_pullback_detects_fiber_shear() -> None:
    # (x, y, t) -> (x, y, t + x) is not an isometry; the detector must see it.
    p = halfspace_point(0.4, 1.1, 0.2)
    shear = lambda c: np.array([c[0], c[1], c[2] + c[0]])
    assert _map_pullback_residual(shear, p, Model.HALF_SPACE, 0.5, 2e-3) > 1.0


def test_pullback_detects_base_squeeze() -> None:
    p = halfspace_point(0.4, 1.1, 0.2)
    squeeze = lambda c: np.array([1.1 * c[0], c[1], c[2]])
    assert _map_pullback_residual(squeeze, p, Model.HALF_SPACE, 0.5, 2e-3) > 0.1


# -- named family behaviour ----------------------------------------------------


def test_identity_fixes_points() -> None:
    iso = identity_isometry(0.5, Model.HALF_SPACE)
    p = HALF_PROBES[0]
    q = apply(iso, p)
    assert (q.x, q.y, q.t) == (p.x, p.y, p.t)


def test_vertical_translation_shifts_fiber_only() -> None:
    iso = vertical_translation(0.7, 0.5, Model.CYLINDER)
    p = CYL_PROBES[1]
    q = apply(iso, p)
    assert (q.x, q.y) == (p.x, p.y)
    assert q.t == pytest.approx(p.t + 0.7, abs=1e-15)


def test_scale_isometry_fixes_fiber_coordinate() -> None:
    iso = scale_isometry(2.0, 0.5)
    q = apply(iso, halfspace_point(0.7, 1.2, -0.3))
    assert (q.x, q.y, q.t) == pytest.approx((1.4, 2.4, -0.3), abs=1e-14)


def test_scale_isometry_rejects_nonpositive_factor() -> None:
    with pytest.raises(ParameterError):
        scale_isometry(0.0, 0.5)


def test_axis_translation_frozen_image() -> None:
    iso = axis_translation_isometry(1.0, 0.5)
    q = apply(iso, halfspace_point(0.2, 0.8, 0.1))
    assert q.x == pytest.approx(0.20588235294117646, abs=1e-15)
    assert q.y == pytest.approx(1.176470588235294, abs=1e-15)
    assert q.t == pytest.approx(2.751635327336065, abs=1e-12)


def test_axis_translation_branch_matches_closed_form() -> None:
    iso = axis_translation_isometry(1.3, 0.5)
    for p in HALF_PROBES:
        got = arg_derivative(iso, p.base)
        want = axis_translation_angle(complex(p.x, p.y))
        assert got == pytest.approx(want, abs=1e-12)


def test_disc_point_isometry_exchanges_origin_and_center() -> None:
    z0 = 0.3 + 0.2j
    iso = disc_point_isometry(z0, 0.5)
    origin = cylinder_point(0.0, 0.0, 0.0)
    center = cylinder_point(z0.real, z0.imag, 0.0)
    img = apply(iso, origin)
    assert (img.x, img.y) == pytest.approx((z0.real, z0.imag), abs=1e-15)
    assert img.t == pytest.approx(0.0, abs=1e-14)
    back = apply(iso, center)
    assert (back.x, back.y) == pytest.approx((0.0, 0.0), abs=1e-15)
    assert back.t == pytest.approx(0.0, abs=1e-14)


def test_disc_point_isometry_is_an_involution() -> None:
    iso = disc_point_isometry(0.3 + 0.2j, 0.5)
    p = cylinder_point(-0.4, 0.25, 0.7)
    q = apply(iso, apply(iso, p))
    assert (q.x, q.y, q.t) == pytest.approx((p.x, p.y, p.t), abs=1e-13)


def test_disc_point_branch_matches_closed_form() -> None:
    z0 = -0.25 + 0.4j
    iso = disc_point_isometry(z0, 0.5)
    for p in CYL_PROBES:
        got = arg_derivative(iso, p.base)
        want = point_translation_angle(z0, complex(p.x, p.y))
        assert got == pytest.approx(want, abs=1e-12)


def test_disc_point_isometry_rejects_boundary_center() -> None:
    with pytest.raises(ParameterError):
        disc_point_isometry(1.0 + 0.0j, 0.5)


def test_halfplane_graph_isometry_hits_target() -> None:
    iso = halfplane_graph_isometry(2.0, 0.5, 1.25, 0.5)
    q = apply(iso, halfspace_point(0.0, 1.0, 0.0))
    assert (q.x, q.y, q.t) == pytest.approx((2.0, 0.5, 1.25), abs=1e-14)


def test_rotation_fixes_origin_fiber() -> None:
    iso = rotation_isometry(0.9, 0.5)
    q = apply(iso, cylinder_point(0.0, 0.0, 0.55))
    assert (q.x, q.y) == pytest.approx((0.0, 0.0), abs=1e-15)
    assert q.t == pytest.approx(0.55, abs=1e-13)


def test_rotation_turns_base_by_angle() -> None:
    angle = 0.9
    iso = rotation_isometry(angle, 0.0)
    q = apply(iso, cylinder_point(0.5, 0.0, 0.0))
    assert q.x == pytest.approx(0.5 * math.cos(angle), abs=1e-14)
    assert q.y == pytest.approx(0.5 * math.sin(angle), abs=1e-14)


def test_reflection_mirrors_base_and_flips_fiber() -> None:
    iso = halfplane_reflection(0.5, 0.5)
    q = apply(iso, halfspace_point(0.2, 0.9, 0.3))
    assert (q.x, q.y, q.t) == pytest.approx((0.8, 0.9, -0.3), abs=1e-14)


# -- algebra: composition, inverses, coordinates -------------------------------


def test_compose_matches_sequential_apply() -> None:
    tau = 0.5
    outer = axis_translation_isometry(1.0, tau)
    inner = scale_isometry(1.7, tau)
    combo = compose(outer, inner)
    for p in HALF_PROBES:
        lhs = apply(combo, p)
        rhs = apply(outer, apply(inner, p))
        assert (lhs.x, lhs.y, lhs.t) == pytest.approx((rhs.x, rhs.y, rhs.t), abs=1e-12)


def test_inverse_round_trip() -> None:
    tau = -0.5
    for iso in family_members(tau):
        inv = inverse(iso)
        for p in probes_for(iso):
            q = apply(inv, apply(iso, p))
            assert (q.x, q.y, q.t) == pytest.approx((p.x, p.y, p.t), abs=1e-11), iso.family


def test_apply_to_coords_matches_pointwise_apply() -> None:
    iso = disc_point_isometry(0.3 + 0.2j, 0.5)
    coords = np.array([[p.x, p.y, p.t] for p in CYL_PROBES])
    batch = apply_to_coords(iso, coords)
    for row, p in zip(batch, CYL_PROBES):
        q = apply(iso, p)
        assert row == pytest.approx([q.x, q.y, q.t], abs=1e-13)


def test_isometries_preserve_base_distance() -> None:
    p, q = HALF_PROBES[0], HALF_PROBES[2]
    ref = hyperbolic_distance(p.base, q.base)
    for iso in family_members(0.5):
        if iso.model is not Model.HALF_SPACE:
            continue
        got = hyperbolic_distance(apply(iso, p).base, apply(iso, q).base)
        assert got == pytest.approx(ref, rel=1e-12), iso.family


def test_isometries_preserve_short_chords() -> None:
    # chord_length is a short-segment quantity; its image error is cubic in
    # the separation, so a ~1e-3 chord should be preserved to ~1e-6 relative.
    tau = 0.5
    p = halfspace_point(0.4, 1.1, 0.2)
    q = halfspace_point(0.4008, 1.1005, 0.2007)
    ref = chord_length(p, q, tau)
    for iso in family_members(tau):
        if iso.model is not Model.HALF_SPACE:
            continue
        got = chord_length(apply(iso, p), apply(iso, q), tau)
        assert got == pytest.approx(ref, rel=1e-6), iso.family


def test_conversion_commutes_with_rotation() -> None:
    # Conjugating a disc rotation by the model change gives a half-space isometry.
    tau = 0.5
    rot = rotation_isometry(0.7, tau)
    for p in HALF_PROBES:
        lhs = convert_model(apply(rot, convert_model(p, tau)), tau)
        direct = apply(rot, convert_model(p, tau))
        rhs = convert_model(direct, tau)
        assert (lhs.x, lhs.y, lhs.t) == pytest.approx((rhs.x, rhs.y, rhs.t), abs=1e-13)


# -- serialization --------------------------------------------------------------


def test_json_round_trip_reproduces_action() -> None:
    for tau in (0.0, 0.5):
        for iso in family_members(tau):
            clone = isometry_from_json(isometry_to_json(iso))
            for p in probes_for(iso):
                a, b = apply(iso, p), apply(clone, p)
                assert (a.x, a.y, a.t) == pytest.approx((b.x, b.y, b.t), abs=1e-14)


def test_json_payload_fields() -> None:
    data = isometry_to_json(disc_point_isometry(0.3 + 0.2j, 0.5))
    assert data["family"] == "disc_point"
    assert data["model"] == "cylinder"
    assert data["tau"] == 0.5
    assert "matrix" in data and "shift" in data and "branch_offset" in data


# -- property tests -------------------------------------------------------------


@st.composite
def halfspace_points(draw) -> AmbientPoint:
    x = draw(st.floats(-3.0, 3.0))
    y = draw(st.floats(0.05, 5.0))
    t = draw(st.floats(-3.0, 3.0))
    return halfspace_point(x, y, t)


@settings(max_examples=25, deadline=None)
@given(p=halfspace_points(), factor=st.floats(0.2, 5.0), tau=st.sampled_from(TAUS))
def test_scale_family_is_isometric_everywhere(p: AmbientPoint, factor: float, tau: float) -> None:
    assert pullback_residual(scale_isometry(factor, tau), p) < RESIDUAL_TOL


@settings(max_examples=25, deadline=None)
@given(p=halfspace_points(), tau=st.sampled_from(TAUS))
def test_conversion_is_isometric_everywhere(p: AmbientPoint, tau: float) -> None:
    assert conversion_pullback_residual(p, tau) < RESIDUAL_TOL


@settings(max_examples=25, deadline=None)
@given(
    p=halfspace_points(),
    x0=st.floats(-2.0, 2.0),
    y0=st.floats(0.2, 3.0),
    h=st.floats(-2.0, 2.0),
    tau=st.sampled_from(TAUS),
)
def test_graph_family_inverse_round_trip(
    p: AmbientPoint, x0: float, y0: float, h: float, tau: float
) -> None:
    iso = halfplane_graph_isometry(x0, y0, h, tau)
    q = apply(inverse(iso), apply(iso, p))
    assert (q.x, q.y, q.t) == pytest.approx((p.x, p.y, p.t), abs=1e-10)
