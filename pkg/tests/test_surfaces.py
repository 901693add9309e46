"""Tests for the model surfaces: catenoids, invariant surfaces, leaves."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ellipk

from etau.core import (
    AmbientPoint,
    BasePoint,
    Model,
    ModelMismatchError,
    ParameterError,
)
from etau.isometries import apply, scale_isometry
from etau.surfaces import (
    CatenoidSpec,
    InvariantSurfaceSpec,
    LeafSpec,
    Sheet,
    apply_isometry_to_mesh,
    catenoid_height,
    catenoid_neck_radius,
    catenoid_profile,
    catenoid_profile_derivative,
    catenoid_profile_inverse,
    convert_surface_to_cylinder,
    foliation_leaf_find,
    invariant_angle_max,
    invariant_asymptotic_levels,
    invariant_height,
    invariant_height_substituted,
    invariant_profile,
    invariant_profile_inverse,
    leaf_mesh,
    leaf_side,
    mesh_catenoid,
    mesh_invariant_surface,
    normal_vertical_component,
    tangent_vertical_components,
    transversality_delta,
    transversality_margin,
    transversality_window_check,
)

CAT = CatenoidSpec(0.5, 2.0)
INV = InvariantSurfaceSpec(0.5, 1.4, side=Sheet.PLUS)


# -- catenoid profile -----------------------------------------------------------


def test_catenoid_spec_validation() -> None:
    with pytest.raises(ParameterError):
        CatenoidSpec(0.5, 0.0)
    with pytest.raises(ParameterError):
        CatenoidSpec(0.5, -1.0)


def test_catenoid_neck_radius_frozen() -> None:
    assert catenoid_neck_radius(CAT) == pytest.approx(1.4436354751788103, abs=1e-13)


def test_catenoid_neck_radius_grows_with_d() -> None:
    radii = [catenoid_neck_radius(CatenoidSpec(0.5, d)) for d in (1.0, 2.0, 4.0, 8.0)]
    assert all(a < b for a, b in zip(radii, radii[1:]))


def test_catenoid_profile_vanishes_at_neck() -> None:
    assert catenoid_profile(CAT, catenoid_neck_radius(CAT)) == 0.0


def test_catenoid_profile_frozen_value() -> None:
    rho = catenoid_neck_radius(CAT) + 1.3
    assert catenoid_profile(CAT, rho) == pytest.approx(1.4992495369762744, abs=1e-10)


def test_catenoid_profile_derivative_frozen() -> None:
    rho = catenoid_neck_radius(CAT) + 1.3
    assert catenoid_profile_derivative(CAT, rho) == pytest.approx(0.356169057492921, abs=1e-9)


def test_catenoid_profile_inverse_round_trip() -> None:
    rho = catenoid_neck_radius(CAT) + 1.3
    u = catenoid_profile(CAT, rho)
    assert catenoid_profile_inverse(CAT, u) == pytest.approx(rho, abs=1e-9)


def test_catenoid_height_is_twice_the_profile_limit() -> None:
    # The profile saturates quickly; far from the neck it sits at height/2.
    rho = catenoid_neck_radius(CAT) + 40.0
    assert catenoid_height(CAT) == pytest.approx(2.0 * catenoid_profile(CAT, rho), abs=1e-8)


def test_catenoid_height_frozen() -> None:
    assert catenoid_height(CAT) == pytest.approx(3.713335061199561, abs=1e-10)


def test_catenoid_height_large_d_limit() -> None:
    for tau in (0.0, 0.5, 1.0):
        want = math.pi * math.sqrt(1.0 + 4.0 * tau * tau)
        assert catenoid_height(CatenoidSpec(tau, 1e3)) == pytest.approx(want, abs=5e-2)


# -- invariant surface heights ---------------------------------------------------


@pytest.mark.parametrize("d", [1.1, 2.0, 10.0, 100.0])
def test_invariant_height_matches_elliptic_integral(d: float) -> None:
    # tau = 0 reduces the height to the complete elliptic integral K(1/d).
    assert invariant_height(d, 0.0) == pytest.approx(float(ellipk((1.0 / d) ** 2)), abs=1e-12)


@pytest.mark.parametrize("d,tau", [(1.3, 0.0), (2.0, 0.5), (5.0, 1.0)])
def test_height_routes_agree(d: float, tau: float) -> None:
    a = invariant_height(d, tau)
    b = invariant_height_substituted(d, tau)
    assert abs(a - b) < 1e-12


def test_invariant_height_large_d_limit() -> None:
    for tau in (0.0, 0.5, 1.0):
        want = 0.5 * math.pi * math.sqrt(1.0 + 4.0 * tau * tau)
        assert invariant_height(1e4, tau) == pytest.approx(want, abs=1e-6)


def test_invariant_angle_max() -> None:
    assert invariant_angle_max(1.4) == math.asin(1.0 / 1.4)
    with pytest.raises(ParameterError):
        invariant_angle_max(1.0)


def test_asymptotic_levels_frozen() -> None:
    lo, hi = invariant_asymptotic_levels(InvariantSurfaceSpec(0.5, 1.4))
    assert lo == pytest.approx(-1.6457599250922659, abs=1e-12)
    assert hi == pytest.approx(3.236965832061337, abs=1e-12)


def test_asymptotic_levels_symmetric_at_zero_tau() -> None:
    lo, hi = invariant_asymptotic_levels(InvariantSurfaceSpec(0.0, 1.2))
    assert hi == pytest.approx(2.067254931448671, abs=1e-12)
    assert lo == -hi


# -- invariant profile ------------------------------------------------------------


def test_invariant_profile_needs_specific_sheet() -> None:
    with pytest.raises(ParameterError):
        invariant_profile(InvariantSurfaceSpec(0.5, 1.4), 0.3)


def test_invariant_profile_frozen_value() -> None:
    assert invariant_profile(INV, 0.5) == pytest.approx(1.6717033729604491, abs=1e-10)


def test_invariant_profile_vanishes_at_wedge_edge() -> None:
    assert invariant_profile(INV, invariant_angle_max(1.4)) == 0.0


def test_invariant_profile_rejects_outside_wedge() -> None:
    with pytest.raises(ParameterError):
        invariant_profile(INV, 0.9)


def test_invariant_profile_inverse_round_trip() -> None:
    v = invariant_profile(INV, 0.5)
    assert invariant_profile_inverse(INV, v) == pytest.approx(0.5, abs=1e-9)


def test_normal_vertical_component_frozen() -> None:
    assert normal_vertical_component(INV, 0.5) == pytest.approx(0.5571564905840402, abs=1e-10)


def test_tangent_vertical_components_frozen() -> None:
    a, b = tangent_vertical_components(INV, 0.5)
    assert a == pytest.approx(-0.7694451669364178, abs=1e-10)
    assert b == pytest.approx(-0.6596032833744311, abs=1e-10)


def test_vertical_components_are_unit_bounded() -> None:
    for theta in (0.2, 0.45, 0.7):
        nv = normal_vertical_component(INV, theta)
        t1, t2 = tangent_vertical_components(INV, theta)
        assert 0.0 < nv <= 1.0
        assert abs(t1) <= 1.0 and abs(t2) <= 1.0


def test_surface_turns_vertical_at_wedge_edge() -> None:
    # At theta* the normal is horizontal and the profile tangent is vertical.
    theta_star = invariant_angle_max(1.4)
    assert normal_vertical_component(INV, theta_star) == pytest.approx(0.0, abs=1e-7)
    along, _ = tangent_vertical_components(INV, theta_star)
    assert along == pytest.approx(-1.0, abs=1e-12)


def test_tangent_profile_component_flips_with_sheet() -> None:
    minus = InvariantSurfaceSpec(0.5, 1.4, side=Sheet.MINUS)
    a_plus, c_plus = tangent_vertical_components(INV, 0.5)
    a_minus, c_minus = tangent_vertical_components(minus, 0.5)
    assert a_minus == pytest.approx(-a_plus, abs=1e-14)
    assert c_minus == c_plus


# -- transversality estimate -------------------------------------------------------


def margin_formula(delta: float, h0: float, tau: float) -> float:
    e = math.exp(2.0 * (h0 + 2.0 * abs(tau) * math.pi))
    return 4.0 * (2.0 * delta + delta * delta) * e / (2.0 + delta * (1.0 + e)) ** 2


def test_margin_matches_closed_form() -> None:
    for delta in (0.01, 0.1, 0.5):
        for h0, tau in ((1.0, 0.0), (1.0, 0.5), (2.0, 1.0)):
            assert transversality_margin(delta, h0, tau) == pytest.approx(
                margin_formula(delta, h0, tau), rel=1e-14
            )


def test_transversality_delta_frozen() -> None:
    assert transversality_delta(0.5, 1.0, 0.0) == pytest.approx(0.01962395112550424, rel=1e-12)
    assert transversality_delta(0.5, 1.0, 0.5) == pytest.approx(3.6291181683195e-05, rel=1e-12)


def test_transversality_delta_satisfies_strict_inequality() -> None:
    for tau in (0.0, 0.5):
        delta = transversality_delta(0.5, 1.0, tau)
        assert transversality_margin(delta, 1.0, tau) < 0.25
        # The returned delta is essentially the largest admissible one.
        assert not transversality_margin(delta * 1.001, 1.0, tau) < 0.25


def test_window_check_frozen() -> None:
    d0 = transversality_delta(0.5, 1.0, 0.0)
    sup, ok = transversality_window_check(1.0 + d0 / 2, 1.0, 0.5, 0.0)
    assert ok and sup == pytest.approx(0.16197754002753667, abs=1e-9)
    d5 = transversality_delta(0.5, 1.0, 0.5)
    sup5, ok5 = transversality_window_check(1.0 + d5 / 2, 1.0, 0.5, 0.5)
    assert ok5 and sup5 == pytest.approx(0.006985202933174667, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(
    eps=st.floats(0.05, 0.9),
    h0=st.floats(0.1, 2.0),
    tau=st.sampled_from([0.0, 0.5, -0.5]),
)
def test_transversality_delta_property(eps: float, h0: float, tau: float) -> None:
    delta = transversality_delta(eps, h0, tau)
    assert delta > 0.0
    assert transversality_margin(delta, h0, tau) < eps * eps


# -- meshes -----------------------------------------------------------------------


def test_catenoid_mesh_shape_and_model() -> None:
    mesh = mesh_catenoid(CatenoidSpec(0.5, 1.2), rho_max=3.0, resolution=(17, 16))
    assert mesh.model is Model.CYLINDER
    assert mesh.vertices.shape == (17 * 16, 3)
    assert mesh.triangles.shape == (2 * 16 * 16, 3)
    assert mesh.metadata["kind"] == "catenoid"


def test_catenoid_mesh_pads_even_rows() -> None:
    mesh = mesh_catenoid(CatenoidSpec(0.5, 1.2), rho_max=3.0, resolution=(16, 16))
    assert mesh.grid_shape == (17, 16)


def test_catenoid_mesh_nu_vanishes_on_neck() -> None:
    mesh = mesh_catenoid(CatenoidSpec(0.5, 1.2), rho_max=3.0, resolution=(17, 16))
    seam = mesh.metadata["seam_row"]
    nu = mesh.nu.reshape(17, 16)
    assert np.max(np.abs(nu[seam])) < 1e-12
    assert float(np.max(mesh.nu)) == pytest.approx(0.7512741885730151, abs=1e-9)


def test_catenoid_mesh_rejects_small_radius() -> None:
    with pytest.raises(ParameterError):
        mesh_catenoid(CatenoidSpec(0.5, 1.2), rho_max=1.0)


def test_invariant_mesh_shape() -> None:
    mesh = mesh_invariant_surface(InvariantSurfaceSpec(0.5, 1.4), resolution=(9, 11))
    assert mesh.model is Model.HALF_SPACE
    assert mesh.vertices.shape == (9 * 11, 3)
    assert mesh.triangles.shape == (2 * 8 * 10, 3)
    assert np.min(mesh.vertices[:, 1]) > 0.0


def test_apply_isometry_to_mesh_scales_base() -> None:
    mesh = mesh_invariant_surface(InvariantSurfaceSpec(0.5, 1.4), resolution=(9, 11))
    moved = apply_isometry_to_mesh(scale_isometry(2.0, 0.5), mesh)
    assert np.max(np.abs(moved.vertices[:, :2] - 2.0 * mesh.vertices[:, :2])) < 1e-12
    assert np.max(np.abs(moved.vertices[:, 2] - mesh.vertices[:, 2])) == 0.0


def test_apply_isometry_to_mesh_model_mismatch() -> None:
    mesh = mesh_catenoid(CatenoidSpec(0.5, 1.2), rho_max=3.0, resolution=(17, 16))
    with pytest.raises(ModelMismatchError):
        apply_isometry_to_mesh(scale_isometry(2.0, 0.5), mesh)


def test_convert_surface_to_cylinder() -> None:
    mesh = mesh_invariant_surface(InvariantSurfaceSpec(0.5, 1.4), resolution=(9, 11))
    converted = convert_surface_to_cylinder(mesh)
    assert converted.model is Model.CYLINDER
    radii = converted.vertices[:, 0] ** 2 + converted.vertices[:, 1] ** 2
    assert np.max(radii) < 1.0
    with pytest.raises(ModelMismatchError):
        convert_surface_to_cylinder(converted)


def test_leaf_mesh_metadata() -> None:
    mesh = leaf_mesh(LeafSpec(0.5, 1.4, 1.0, 2.0), resolution=(9, 11))
    assert mesh.model is Model.HALF_SPACE
    assert mesh.metadata["kind"] == "leaf"
    assert mesh.metadata["scale"] == 2.0


def test_leaf_spec_validation() -> None:
    with pytest.raises(ParameterError):
        LeafSpec(0.5, 0.9)
    with pytest.raises(ParameterError):
        LeafSpec(0.5, 1.4, -1.0)
    with pytest.raises(ParameterError):
        LeafSpec(0.5, 1.4, 1.0, 0.0)


# -- foliation ---------------------------------------------------------------------


def test_foliation_leaf_find_frozen() -> None:
    p0 = AmbientPoint(BasePoint(Model.HALF_SPACE, 2.0, 0.5), 0.0)
    result = foliation_leaf_find(p0, 1.2, 1.0, 0.0)
    assert result.scale == pytest.approx(4.8394475616353, rel=1e-10)
    assert result.residual < 1e-12
    assert result.iterations < 200


def test_leaf_side_flips_across_found_scale() -> None:
    p0 = AmbientPoint(BasePoint(Model.HALF_SPACE, 2.0, 0.5), 0.0)
    lam = foliation_leaf_find(p0, 1.2, 1.0, 0.0).scale
    assert leaf_side(p0, 1.2, 1.0, 0.0, scale=lam * 0.9) == -1
    assert leaf_side(p0, 1.2, 1.0, 0.0, scale=lam * 1.1) == 1


def test_foliation_scale_equivariance() -> None:
    p0 = AmbientPoint(BasePoint(Model.HALF_SPACE, 2.0, 0.5), 0.0)
    lam = foliation_leaf_find(p0, 1.2, 1.0, 0.0).scale
    mu = 1.7
    moved = apply(scale_isometry(mu, 0.0), p0)
    lam_mu = foliation_leaf_find(moved, 1.2, 1.0, 0.0).scale
    assert lam_mu == pytest.approx(mu * lam, rel=1e-9)


def test_foliation_leaf_find_needs_halfspace() -> None:
    p = AmbientPoint(BasePoint(Model.CYLINDER, 0.1, 0.2), 0.0)
    with pytest.raises(ModelMismatchError):
        foliation_leaf_find(p, 1.2, 1.0, 0.0)


@settings(max_examples=15, deadline=None)
@given(
    x=st.floats(-2.0, 4.0),
    y=st.floats(0.3, 2.0),
    t=st.floats(-1.5, 1.5),
)
def test_foliation_find_has_small_residual(x: float, y: float, t: float) -> None:
    p = AmbientPoint(BasePoint(Model.HALF_SPACE, x, y), t)
    result = foliation_leaf_find(p, 1.2, 1.0, 0.0)
    assert result.residual < 1e-6
