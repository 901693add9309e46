"""Canonical minimal surfaces: vertical catenoids, asymptotic invariant
surfaces, and the foliation they generate.

Both families are bigraphs glued along a horizontal curve where the profile
integrand has an inverse square-root singularity.  All quadrature is done in
the regularizing variable sigma = sqrt(distance to the gluing value), with
the integrand factored so it evaluates stably down to sigma = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize

from .core import (
    AmbientPoint,
    BasePoint,
    InvalidPointError,
    Model,
    ModelMismatchError,
    ParameterError,
    chord_length,
    convert_coords_arrays,
    frame_components_arrays,
)
from .isometries import (
    AmbientIsometry,
    apply,
    apply_to_coords,
    axis_translation_isometry,
    halfplane_reflection,
    inverse,
    scale_isometry,
)
from .quadrature import adaptive_simpson, cumulative_simpson_table

_TABLE_PANELS = 4096


class Sheet(Enum):
    PLUS = "plus"
    MINUS = "minus"
    BOTH = "both"


@dataclass(frozen=True)
class CatenoidSpec:
    """Rotational minimal annulus in the disc model; d is the necksize parameter."""

    tau: float
    d: float

    def __post_init__(self) -> None:
        if not self.d > 0.0:
            raise ParameterError(f"catenoid necksize parameter must be positive, got {self.d}")


@dataclass(frozen=True)
class InvariantSurfaceSpec:
    """Surface invariant under translation along the ideal geodesic at foot s.

    Parametrized over the wedge 0 < theta < arcsin(1/d) at the ideal point s
    in the half-space model; requires d > 1.
    """

    tau: float
    d: float
    s: float = 1.0
    side: Sheet = Sheet.BOTH
    mirror: bool = False

    def __post_init__(self) -> None:
        if not self.d > 1.0:
            raise ParameterError(f"invariant surface needs d > 1, got {self.d}")
        if not self.s > 0.0:
            raise ParameterError(f"axis foot must be positive, got {self.s}")


@dataclass(frozen=True)
class LeafSpec:
    """Leaf of the scaled family: scale * (axis translation of the invariant surface)."""

    tau: float
    d: float
    s: float = 1.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.d > 1.0:
            raise ParameterError(f"leaf needs d > 1, got {self.d}")
        if not self.s > 0.0:
            raise ParameterError(f"axis foot must be positive, got {self.s}")
        if not self.scale > 0.0:
            raise ParameterError(f"leaf scale must be positive, got {self.scale}")


# -- catenoid profile ---------------------------------------------------------


def catenoid_neck_radius(spec: CatenoidSpec) -> float:
    """Hyperbolic distance from the axis to the neck circle: arcsinh(d)."""
    return math.asinh(spec.d)


def _catenoid_sigma_integrand(tau: float, d: float):
    root = math.sqrt(1.0 + d * d)
    rmin = math.asinh(d)
    limit = 2.0 * d * math.sqrt(1.0 + 4.0 * tau * tau * math.tanh(0.5 * rmin) ** 2) / math.sqrt(
        2.0 * d * root
    )

    def g(sigma):
        sigma = np.asarray(sigma, dtype=float)
        s2 = sigma * sigma
        rho = rmin + s2
        # sinh(rho) -+ d, factored so the difference is exact near sigma = 0
        lower = 2.0 * d * np.sinh(0.5 * s2) ** 2 + root * np.sinh(s2)
        upper = 2.0 * d * np.cosh(0.5 * s2) ** 2 + root * np.sinh(s2)
        slope = d * np.sqrt(1.0 + 4.0 * tau * tau * np.tanh(0.5 * rho) ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = 2.0 * sigma * slope / np.sqrt(lower * upper)
        return np.where(sigma == 0.0, limit, val)

    return g


def catenoid_profile(spec: CatenoidSpec, rho: float, tol: float = 1e-12) -> float:
    """Height of the upper sheet over hyperbolic distance rho from the axis.

    Zero at the neck radius; rho below the neck radius is outside the domain.
    """
    rmin = catenoid_neck_radius(spec)
    if rho < rmin - 1e-14:
        raise ParameterError(f"rho={rho} is below the neck radius {rmin}")
    span = max(rho - rmin, 0.0)
    if span == 0.0:
        return 0.0
    g = _catenoid_sigma_integrand(spec.tau, spec.d)
    return adaptive_simpson(lambda s: float(g(s)), 0.0, math.sqrt(span), tol=tol)


def catenoid_profile_derivative(spec: CatenoidSpec, rho: float) -> float:
    """Profile slope d sqrt(1 + 4 tau^2 tanh^2(rho/2)) / sqrt(sinh^2 rho - d^2)."""
    rmin = catenoid_neck_radius(spec)
    if not rho > rmin:
        raise ParameterError("profile slope is defined only above the neck radius")
    num = spec.d * math.sqrt(1.0 + 4.0 * spec.tau ** 2 * math.tanh(0.5 * rho) ** 2)
    return num / math.sqrt(math.sinh(rho) ** 2 - spec.d ** 2)


def catenoid_height(spec: CatenoidSpec) -> float:
    """Total vertical extent of the catenoid (both sheets).

    The profile integral converges as rho -> infinity; the truncation tail is
    bounded by 2 d sqrt(1 + 4 tau^2) e^(-rho) and is added to the estimate.
    """
    d, tau = spec.d, spec.tau
    amp = 2.0 * d * math.sqrt(1.0 + 4.0 * tau * tau)
    rho_star = math.log(amp * 1e15)
    half = catenoid_profile(spec, rho_star) + amp * math.exp(-rho_star)
    return 2.0 * half


def catenoid_profile_inverse(spec: CatenoidSpec, height: float) -> float:
    """Radius rho with catenoid_profile(spec, rho) = height (bisection)."""
    if height < 0.0:
        raise ParameterError("profile heights are nonnegative")
    if 2.0 * height >= catenoid_height(spec):
        raise ParameterError(f"height {height} is not attained by the profile")
    rmin = catenoid_neck_radius(spec)
    lo, hi = rmin, rmin + 1.0
    while catenoid_profile(spec, hi) < height:
        hi = rmin + 2.0 * (hi - rmin)
        if hi - rmin > 200.0:
            raise ParameterError("profile inversion failed to bracket")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if catenoid_profile(spec, mid) < height:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


@lru_cache(maxsize=32)
def _catenoid_table(tau: float, d: float, sigma_max: float) -> CubicSpline:
    g = _catenoid_sigma_integrand(tau, d)
    xs, table = cumulative_simpson_table(g, 0.0, sigma_max, _TABLE_PANELS)
    return CubicSpline(xs, table)


# -- invariant surface profile ------------------------------------------------


def invariant_angle_max(d: float) -> float:
    """Opening angle arcsin(1/d) of the wedge the surface is a bigraph over."""
    if not d > 1.0:
        raise ParameterError(f"invariant surfaces need d > 1, got {d}")
    return math.asin(1.0 / d)


def _invariant_sigma_integrand(tau: float, d: float):
    theta_star = invariant_angle_max(d)
    root = math.sqrt(d * d - 1.0)
    cos_star_sq = 1.0 - 1.0 / (d * d)
    limit = 2.0 * d * math.sqrt(1.0 + 4.0 * tau * tau * cos_star_sq) / math.sqrt(2.0 * root)

    def g(sigma):
        sigma = np.asarray(sigma, dtype=float)
        s2 = sigma * sigma
        psi = theta_star - s2
        # 1 -+ d sin(psi), factored to avoid cancellation at sigma = 0
        lower = 2.0 * np.sin(0.5 * s2) ** 2 + root * np.sin(s2)
        upper = 2.0 * np.cos(0.5 * s2) ** 2 - root * np.sin(s2)
        slope = d * np.sqrt(1.0 + 4.0 * tau * tau * np.cos(psi) ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = 2.0 * sigma * slope / np.sqrt(lower * upper)
        return np.where(sigma == 0.0, limit, val)

    return g


def invariant_height(d: float, tau: float, tol: float = 1e-12) -> float:
    """Half height h(d): the profile integral over the whole wedge."""
    theta_star = invariant_angle_max(d)
    g = _invariant_sigma_integrand(tau, d)
    return adaptive_simpson(lambda s: float(g(s)), 0.0, math.sqrt(theta_star), tol=tol)


def invariant_height_substituted(d: float, tau: float, tol: float = 1e-12) -> float:
    """h(d) through an independent algebraic substitution with a regular integrand."""
    if not d > 1.0:
        raise ParameterError(f"invariant surfaces need d > 1, got {d}")
    dd = d * d
    ttau = 4.0 * tau * tau

    def g(sigma: float) -> float:
        w = 1.0 - sigma * sigma
        num = dd * (1.0 + ttau) - ttau * w * w
        den = (dd - w * w) * (2.0 - sigma * sigma)
        return 2.0 * math.sqrt(num) / math.sqrt(den)

    return adaptive_simpson(g, 0.0, 1.0, tol=tol)


def invariant_profile(spec: InvariantSurfaceSpec, theta: float, tol: float = 1e-12) -> float:
    """Fiber height of the requested sheet over wedge angle theta.

    Both sheets vanish at the gluing angle arcsin(1/d); the plus sheet
    increases and the minus sheet decreases toward the wedge's edge.
    """
    if spec.side is Sheet.BOTH:
        raise ParameterError("profile evaluation needs a specific sheet")
    theta_star = invariant_angle_max(spec.d)
    if not 0.0 <= theta <= theta_star + 1e-14:
        raise ParameterError(f"theta={theta} outside [0, {theta_star}]")
    span = max(theta_star - theta, 0.0)
    g = _invariant_sigma_integrand(spec.tau, spec.d)
    tail = adaptive_simpson(lambda s: float(g(s)), 0.0, math.sqrt(span), tol=tol) if span > 0 else 0.0
    if spec.side is Sheet.PLUS:
        return tail - 2.0 * spec.tau * (theta - theta_star)
    return -tail - 2.0 * spec.tau * (theta - theta_star)


def invariant_profile_derivative(spec: InvariantSurfaceSpec, theta: float) -> float:
    """Slope of the sheet profile: -+ d sqrt(1+4 tau^2 cos^2) / sqrt(1-d^2 sin^2) - 2 tau."""
    if spec.side is Sheet.BOTH:
        raise ParameterError("profile slope needs a specific sheet")
    theta_star = invariant_angle_max(spec.d)
    if not 0.0 < theta < theta_star:
        raise ParameterError(f"theta={theta} outside (0, {theta_star})")
    num = spec.d * math.sqrt(1.0 + 4.0 * spec.tau ** 2 * math.cos(theta) ** 2)
    den = math.sqrt(1.0 - spec.d ** 2 * math.sin(theta) ** 2)
    sign = -1.0 if spec.side is Sheet.PLUS else 1.0
    return sign * num / den - 2.0 * spec.tau


def invariant_asymptotic_levels(spec: InvariantSurfaceSpec) -> tuple[float, float]:
    """Limit heights of the two sheets as theta -> 0, in (minus, plus) order."""
    h = invariant_height(spec.d, spec.tau)
    shift = 2.0 * spec.tau * invariant_angle_max(spec.d)
    return (-h + shift, h + shift)


def invariant_profile_inverse(spec: InvariantSurfaceSpec, value: float) -> float:
    """Angle theta where the requested sheet reaches the given fiber value."""
    if spec.side is Sheet.BOTH:
        raise ParameterError("profile inversion needs a specific sheet")
    theta_star = invariant_angle_max(spec.d)
    lo, hi = 0.0, theta_star
    f_lo = invariant_profile(spec, lo) - value
    f_hi = invariant_profile(spec, hi) - value
    if f_lo * f_hi > 0.0:
        raise ParameterError(f"fiber value {value} not attained by the {spec.side.value} sheet")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if (invariant_profile(spec, mid) - value) * f_lo > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


@lru_cache(maxsize=32)
def _invariant_table(tau: float, d: float) -> CubicSpline:
    theta_star = invariant_angle_max(d)
    g = _invariant_sigma_integrand(tau, d)
    xs, table = cumulative_simpson_table(g, 0.0, math.sqrt(theta_star), _TABLE_PANELS)
    return CubicSpline(xs, table)


def _invariant_profiles_fast(tau: float, d: float, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Table-backed (minus, plus) profile values for arrays of wedge angles."""
    theta_star = invariant_angle_max(d)
    theta = np.asarray(theta, dtype=float)
    sigma = np.sqrt(np.clip(theta_star - theta, 0.0, None))
    tail = _invariant_table(tau, d)(sigma)
    drift = -2.0 * tau * (theta - theta_star)
    return (-tail + drift, tail + drift)


# -- pointwise normal data ----------------------------------------------------


def normal_vertical_component(spec: InvariantSurfaceSpec, theta: float) -> float:
    """Vertical component of the upward unit normal over wedge angle theta."""
    theta_star = invariant_angle_max(spec.d)
    if not 0.0 < theta <= theta_star:
        raise ParameterError(f"theta={theta} outside (0, {theta_star}]")
    b = 1.0 - spec.d ** 2 * math.sin(theta) ** 2
    a = 1.0 + 4.0 * spec.tau ** 2 * math.cos(theta) ** 2
    return math.sqrt(max(b, 0.0)) / math.sqrt(a)


def tangent_vertical_components(spec: InvariantSurfaceSpec, theta: float) -> tuple[float, float]:
    """Vertical components of the unit tangents along and across the profile.

    Returns (profile direction, translation direction) for the requested
    sheet; the translation direction is shared by both sheets.
    """
    if spec.side is Sheet.BOTH:
        raise ParameterError("tangent components need a specific sheet")
    theta_star = invariant_angle_max(spec.d)
    if not 0.0 < theta <= theta_star:
        raise ParameterError(f"theta={theta} outside (0, {theta_star}]")
    a = 1.0 + 4.0 * spec.tau ** 2 * math.cos(theta) ** 2
    b = 1.0 - spec.d ** 2 * math.sin(theta) ** 2
    sign = -1.0 if spec.side is Sheet.PLUS else 1.0
    along = sign * spec.d * math.sqrt(a) * math.sin(theta) / math.sqrt(
        b + spec.d ** 2 * a * math.sin(theta) ** 2
    )
    across = -2.0 * spec.tau * math.cos(theta) / math.sqrt(a)
    return along, across


# -- transversality -----------------------------------------------------------


def transversality_margin(delta: float, h0: float, tau: float) -> float:
    """Left side g(delta) of the transversality inequality g(delta) < eps^2."""
    if not delta >= 0.0:
        raise ParameterError("delta must be nonnegative")
    c_tau = -2.0 * abs(tau) * math.pi
    e = math.exp(2.0 * (h0 - c_tau))
    return 4.0 * (2.0 * delta + delta * delta) * e / (2.0 + delta * (1.0 + e)) ** 2


def transversality_delta(eps: float, h0: float, tau: float) -> float:
    """Largest-practical delta with g(delta) < eps^2, found by bisection.

    g increases from 0 to exactly 1 on [0, 2/(E-1)], so any eps < 1 admits a
    positive delta; eps >= 1 makes the bound vacuous and is rejected.
    """
    if not h0 > 0.0:
        raise ParameterError(f"slab half-height must be positive, got {h0}")
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    c_tau = -2.0 * abs(tau) * math.pi
    e = math.exp(2.0 * (h0 - c_tau))
    peak = 2.0 / (e - 1.0)
    target = eps * eps
    lo, hi = 0.0, peak
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if transversality_margin(mid, h0, tau) < target:
            lo = mid
        else:
            hi = mid
    while lo > 0.0 and not transversality_margin(lo, h0, tau) < target:
        lo = math.nextafter(lo, 0.0)
    if not lo > 0.0:
        raise ParameterError("bisection failed to find a positive delta")
    return lo


def transversality_window_check(
    d: float, h0: float, eps: float, tau: float, theta_step: float = 1e-4
) -> tuple[float, bool]:
    """Sup of the leaf's normal vertical component inside the slab |t| <= h0.

    Samples the wedge at the given angle step, keeps the angles where either
    sheet's fiber height lies within the slab, and returns (sup, sup < eps).
    """
    theta_star = invariant_angle_max(d)
    n = max(int(theta_star / theta_step), 8)
    theta = np.linspace(theta_star / n, theta_star, n)
    minus, plus = _invariant_profiles_fast(tau, d, theta)
    in_slab = (np.abs(minus) <= h0) | (np.abs(plus) <= h0)
    if not np.any(in_slab):
        return 0.0, True
    b = 1.0 - d * d * np.sin(theta[in_slab]) ** 2
    a = 1.0 + 4.0 * tau * tau * np.cos(theta[in_slab]) ** 2
    sup = float(np.max(np.sqrt(np.clip(b, 0.0, None)) / np.sqrt(a)))
    return sup, sup < eps


# -- meshes -------------------------------------------------------------------


@dataclass
class SurfaceMesh:
    """Structured triangulated surface with frame normals and angle function."""

    model: Model
    tau: float
    vertices: np.ndarray
    triangles: np.ndarray
    normals: np.ndarray
    nu: np.ndarray
    grid_shape: tuple[int, int]
    wrap_cols: bool
    metadata: dict = field(default_factory=dict)

    def vertex_grid(self) -> np.ndarray:
        rows, cols = self.grid_shape
        return self.vertices.reshape(rows, cols, 3)


def _grid_triangles(rows: int, cols: int, wrap_cols: bool) -> np.ndarray:
    tris = []
    jmax = cols if wrap_cols else cols - 1
    for i in range(rows - 1):
        for j in range(jmax):
            j1 = (j + 1) % cols
            v00 = i * cols + j
            v01 = i * cols + j1
            v10 = (i + 1) * cols + j
            v11 = (i + 1) * cols + j1
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    return np.asarray(tris, dtype=np.int32)


def _structured_normals(
    model: Model, tau: float, vertices: np.ndarray, grid_shape: tuple[int, int], wrap_cols: bool
) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = grid_shape
    v = vertices.reshape(rows, cols, 3)
    tu = np.empty_like(v)
    tu[1:-1] = v[2:] - v[:-2]
    tu[0] = v[1] - v[0]
    tu[-1] = v[-1] - v[-2]
    if wrap_cols:
        tv = np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)
    else:
        tv = np.empty_like(v)
        tv[:, 1:-1] = v[:, 2:] - v[:, :-2]
        tv[:, 0] = v[:, 1] - v[:, 0]
        tv[:, -1] = v[:, -1] - v[:, -2]
    x, y = v[..., 0], v[..., 1]
    u1, u2, u3 = frame_components_arrays(model, tau, x, y, tu[..., 0], tu[..., 1], tu[..., 2])
    w1, w2, w3 = frame_components_arrays(model, tau, x, y, tv[..., 0], tv[..., 1], tv[..., 2])
    n1 = u2 * w3 - u3 * w2
    n2 = u3 * w1 - u1 * w3
    n3 = u1 * w2 - u2 * w1
    norm = np.sqrt(n1 * n1 + n2 * n2 + n3 * n3)
    norm = np.maximum(norm, 1e-300)
    normals = np.stack([n1 / norm, n2 / norm, n3 / norm], axis=-1)
    return normals.reshape(-1, 3), (n3 / norm).reshape(-1)


def _orient_upward_by_sheet(mesh: SurfaceMesh) -> None:
    """Flip normals per sheet so each graph sheet's normal points upward."""
    rows, cols = mesh.grid_shape
    nu = mesh.nu.reshape(rows, cols)
    normals = mesh.normals.reshape(rows, cols, 3)
    seam = mesh.metadata.get("seam_row")
    blocks = [(0, rows)] if seam is None else [(0, seam + 1), (seam, rows)]
    for lo, hi in blocks:
        block = nu[lo:hi]
        if block.size and float(np.mean(block)) < 0.0:
            normals[lo:hi] *= -1.0
            nu[lo:hi] *= -1.0
    if seam is not None:
        # the seam row sits in both blocks; zero its duplicated sign choice
        pass
    mesh.normals = normals.reshape(-1, 3)
    mesh.nu = nu.reshape(-1)


def mesh_catenoid(
    spec: CatenoidSpec, rho_max: float, resolution: tuple[int, int] = (257, 256)
) -> SurfaceMesh:
    """Triangulate both catenoid sheets up to hyperbolic radius rho_max.

    Rows follow the regularized radial variable, so vertex t-values are
    smooth through the neck; columns wrap around the axis.
    """
    rmin = catenoid_neck_radius(spec)
    if not rho_max > rmin:
        raise ParameterError(f"rho_max must exceed the neck radius {rmin}")
    rows, cols = resolution
    if rows < 5 or cols < 8:
        raise ParameterError("catenoid meshes need at least 5 rows and 8 columns")
    rows += 1 - rows % 2  # keep a row exactly on the neck
    sigma_max = math.sqrt(rho_max - rmin)
    w = np.linspace(-1.0, 1.0, rows)
    sigma = np.abs(w) * sigma_max
    rho = rmin + sigma * sigma
    table = _catenoid_table(spec.tau, spec.d, sigma_max)
    t = np.sign(w) * table(sigma)
    radius = np.tanh(0.5 * rho)
    angles = np.linspace(0.0, 2.0 * math.pi, cols, endpoint=False)
    xs = radius[:, None] * np.cos(angles)[None, :]
    ys = radius[:, None] * np.sin(angles)[None, :]
    ts = np.broadcast_to(t[:, None], xs.shape)
    vertices = np.stack([xs, ys, ts], axis=-1).reshape(-1, 3)
    normals, nu = _structured_normals(Model.CYLINDER, spec.tau, vertices, (rows, cols), True)
    mesh = SurfaceMesh(
        Model.CYLINDER,
        spec.tau,
        vertices,
        _grid_triangles(rows, cols, True),
        normals,
        nu,
        (rows, cols),
        True,
        metadata={
            "kind": "catenoid",
            "d": spec.d,
            "rho_max": rho_max,
            "seam_row": rows // 2,
            "sheet": "both",
        },
    )
    _orient_upward_by_sheet(mesh)
    return mesh


def mesh_invariant_surface(
    spec: InvariantSurfaceSpec,
    phi_span: tuple[float, float] = (-3.0, 3.0),
    resolution: tuple[int, int] = (129, 129),
    theta_min: float | None = None,
) -> SurfaceMesh:
    """Triangulate the invariant surface over phi_span along its axis.

    Rows sweep the wedge angle in the regularized gluing variable; the two
    sheets meet at the gluing curve with matching fiber value zero.
    """
    theta_star = invariant_angle_max(spec.d)
    if theta_min is None:
        theta_min = 1e-3 * theta_star
    if not 0.0 < theta_min < theta_star:
        raise ParameterError("theta_min must lie strictly inside the wedge")
    rows, cols = resolution
    if rows < 5 or cols < 2:
        raise ParameterError("invariant meshes need at least 5 rows and 2 columns")
    if spec.side is Sheet.BOTH:
        rows += 1 - rows % 2
        v = np.linspace(-1.0, 1.0, rows)
        seam: int | None = rows // 2
    elif spec.side is Sheet.PLUS:
        v = np.linspace(0.0, 1.0, rows)
        seam = None
    else:
        v = np.linspace(-1.0, 0.0, rows)
        seam = None
    span = theta_star - theta_min
    theta = theta_star - v * v * span
    sigma = np.abs(v) * math.sqrt(span)
    tail = _invariant_table(spec.tau, spec.d)(sigma)
    drift = -2.0 * spec.tau * (theta - theta_star)
    t = np.sign(v) * tail + drift
    phi = np.linspace(phi_span[0], phi_span[1], cols)
    radius = np.exp(phi)
    xs = radius[None, :] * np.cos(theta)[:, None] + spec.s
    ys = radius[None, :] * np.sin(theta)[:, None]
    ts = np.broadcast_to(t[:, None], xs.shape)
    vertices = np.stack([xs, ys, ts], axis=-1).reshape(-1, 3)
    normals, nu = _structured_normals(Model.HALF_SPACE, spec.tau, vertices, (rows, cols), False)
    mesh = SurfaceMesh(
        Model.HALF_SPACE,
        spec.tau,
        vertices,
        _grid_triangles(rows, cols, False),
        normals,
        nu,
        (rows, cols),
        False,
        metadata={
            "kind": "invariant",
            "d": spec.d,
            "s": spec.s,
            "side": spec.side.value,
            "theta_min": theta_min,
            "seam_row": seam,
        },
    )
    _orient_upward_by_sheet(mesh)
    if spec.mirror:
        mesh = apply_isometry_to_mesh(halfplane_reflection(spec.s, spec.tau), mesh)
        mesh.metadata["mirrored"] = True
    return mesh


def apply_isometry_to_mesh(iso: AmbientIsometry, mesh: SurfaceMesh) -> SurfaceMesh:
    """Map a mesh through an ambient isometry, recomputing normals."""
    if iso.model is not mesh.model:
        raise ModelMismatchError("isometry model does not match the mesh")
    vertices = apply_to_coords(iso, mesh.vertices)
    normals, nu = _structured_normals(mesh.model, mesh.tau, vertices, mesh.grid_shape, mesh.wrap_cols)
    out = SurfaceMesh(
        mesh.model,
        mesh.tau,
        vertices,
        mesh.triangles.copy(),
        normals,
        nu,
        mesh.grid_shape,
        mesh.wrap_cols,
        metadata=dict(mesh.metadata),
    )
    _orient_upward_by_sheet(out)
    return out


def convert_surface_to_cylinder(mesh: SurfaceMesh) -> SurfaceMesh:
    """Carry a half-space mesh to the disc model isometrically."""
    if mesh.model is not Model.HALF_SPACE:
        raise ModelMismatchError("conversion expects a half-space mesh")
    x, y, t = mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.vertices[:, 2]
    cx, cy, ct = convert_coords_arrays(Model.HALF_SPACE, mesh.tau, x, y, t)
    vertices = np.column_stack([cx, cy, ct])
    normals, nu = _structured_normals(Model.CYLINDER, mesh.tau, vertices, mesh.grid_shape, mesh.wrap_cols)
    out = SurfaceMesh(
        Model.CYLINDER,
        mesh.tau,
        vertices,
        mesh.triangles.copy(),
        normals,
        nu,
        mesh.grid_shape,
        mesh.wrap_cols,
        metadata=dict(mesh.metadata),
    )
    _orient_upward_by_sheet(out)
    return out


def leaf_mesh(
    leaf: LeafSpec,
    phi_span: tuple[float, float] = (-3.0, 3.0),
    resolution: tuple[int, int] = (129, 129),
    theta_min: float | None = None,
) -> SurfaceMesh:
    """Mesh of the foliation leaf at the given scale."""
    base = mesh_invariant_surface(
        InvariantSurfaceSpec(leaf.tau, leaf.d, leaf.s, Sheet.BOTH),
        phi_span=phi_span,
        resolution=resolution,
        theta_min=theta_min,
    )
    moved = apply_isometry_to_mesh(axis_translation_isometry(leaf.s, leaf.tau), base)
    out = apply_isometry_to_mesh(scale_isometry(leaf.scale, leaf.tau), moved)
    out.metadata.update({"kind": "leaf", "scale": leaf.scale})
    return out


# -- foliation ----------------------------------------------------------------


@dataclass(frozen=True)
class LeafFindResult:
    scale: float
    residual: float
    iterations: int


def _pullback_to_model_chart(p: AmbientPoint, d: float, s: float, tau: float, scale: float, axis_inv: AmbientIsometry) -> AmbientPoint:
    scaled = AmbientPoint(BasePoint(Model.HALF_SPACE, p.x / scale, p.y / scale), p.t)
    return apply(axis_inv, scaled)


def leaf_side(p: AmbientPoint, d: float, s: float, tau: float, scale: float = 1.0) -> int:
    """+1 if p lies in the pocket enclosed by the leaf, -1 otherwise.

    The pocket is the component of the complement whose closure meets the
    wedge's ideal edge; points on the other side of the leaf, including all
    points outside the pulled-back wedge, report -1.
    """
    if p.model is not Model.HALF_SPACE:
        raise ModelMismatchError("foliation leaves live in the half-space model")
    axis_inv = inverse(axis_translation_isometry(s, tau))
    return _leaf_side_pulled(p, d, s, tau, scale, axis_inv)


def _leaf_side_pulled(p, d, s, tau, scale, axis_inv) -> int:
    q = _pullback_to_model_chart(p, d, s, tau, scale, axis_inv)
    theta_star = invariant_angle_max(d)
    theta = math.atan2(q.y, q.x - s)
    if not 0.0 < theta < theta_star:
        return -1
    minus, plus = _invariant_profiles_fast(tau, d, np.array([theta]))
    if minus[0] < q.t < plus[0]:
        return 1
    return -1


def foliation_leaf_find(
    p: AmbientPoint, d: float, s: float, tau: float, max_factor: float = 1e6
) -> LeafFindResult:
    """Scale of the unique leaf through p, with the attained distance residual.

    Brackets the pocket indicator's sign change geometrically from scale 1,
    bisects to machine precision, then measures the ambient distance from p
    to the located leaf by local minimization over the leaf's parameters.
    """
    if p.model is not Model.HALF_SPACE:
        raise ModelMismatchError("foliation leaves live in the half-space model")
    axis_inv = inverse(axis_translation_isometry(s, tau))

    def side(lam: float) -> int:
        return _leaf_side_pulled(p, d, s, tau, lam, axis_inv)

    iterations = 0
    s1 = side(1.0)
    lo = hi = 1.0
    factor = 2.0
    if s1 > 0:
        # inside the unit leaf's pocket: shrink until outside
        while True:
            lo /= factor
            iterations += 1
            if side(lo) < 0:
                break
            if lo < 1.0 / max_factor:
                raise InvalidPointError("no leaf found: point escapes the foliated region")
    else:
        while True:
            hi *= factor
            iterations += 1
            if side(hi) > 0:
                break
            if hi > max_factor:
                raise InvalidPointError("no leaf found: point escapes the foliated region")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        iterations += 1
        if side(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    lam = 0.5 * (lo + hi)

    residual = _leaf_distance(p, d, s, tau, lam, axis_inv)
    return LeafFindResult(scale=lam, residual=residual, iterations=iterations)


def _leaf_distance(p, d, s, tau, lam, axis_inv) -> float:
    """Ambient distance from p to the leaf at scale lam (local minimization)."""
    q = _pullback_to_model_chart(p, d, s, tau, lam, axis_inv)
    theta_star = invariant_angle_max(d)
    theta0 = min(max(math.atan2(q.y, q.x - s), 1e-9), theta_star - 1e-12)
    phi0 = 0.5 * math.log((q.x - s) ** 2 + q.y ** 2)
    minus, plus = _invariant_profiles_fast(tau, d, np.array([theta0]))
    table = _invariant_table(tau, d)

    def surface_point(phi: float, theta: float, sign: float) -> AmbientPoint:
        sigma = math.sqrt(max(theta_star - theta, 0.0))
        t = sign * float(table(sigma)) - 2.0 * tau * (theta - theta_star)
        r = math.exp(phi)
        return AmbientPoint(BasePoint(Model.HALF_SPACE, r * math.cos(theta) + s, r * math.sin(theta)), t)

    sign = 1.0 if abs(plus[0] - q.t) <= abs(minus[0] - q.t) else -1.0

    def objective(v: np.ndarray) -> float:
        phi, theta = v
        theta = min(max(theta, 1e-10), theta_star)
        return chord_length(q, surface_point(phi, theta, sign), tau)

    best = minimize(
        objective,
        np.array([phi0, theta0]),
        method="Nelder-Mead",
        options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 400},
    )
    return float(best.fun)
