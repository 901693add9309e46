"""Coordinate models of the twisted line bundles over the hyperbolic plane.

The base is the hyperbolic plane in one of two conformal models: the upper
half plane (y > 0, conformal factor 1/y) or the unit disc (conformal factor
2/(1 - x^2 - y^2)).  The total space carries coordinates (x, y, t) and the
ambient metric

    lam^2 (dx^2 + dy^2) + (omega + dt)^2,

where omega = 2 * tau * (lam_y / lam dx - lam_x / lam dy) is the connection
form of the bundle and tau is the bundle curvature parameter.  tau = 0 is the
Riemannian product of the hyperbolic plane with the line.  Vertical
translation in t is an isometry for every tau, so all metric quantities
depend on the base point only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

BOUNDARY_MARGIN = 1e-12


class GeometryError(ValueError):
    """Base class for geometric precondition failures."""


class InvalidPointError(GeometryError):
    """Point lies outside the open model domain."""


class ModelMismatchError(GeometryError):
    """Operands live in different base models."""


class ParameterError(GeometryError):
    """Parameter outside the admissible range."""


class FeasibilityError(GeometryError):
    """Requested construction has no admissible parameters."""


class ConvergenceError(GeometryError):
    """Iterative procedure failed to converge."""


class Model(Enum):
    HALF_SPACE = "half_space"
    CYLINDER = "cylinder"


@dataclass(frozen=True)
class SpaceParams:
    """Bundle curvature together with the base model in use."""

    tau: float
    model: Model = Model.HALF_SPACE


@dataclass(frozen=True)
class BasePoint:
    """Point of the hyperbolic base in the coordinates of its model."""

    model: Model
    x: float
    y: float

    def __post_init__(self) -> None:
        if self.model is Model.HALF_SPACE:
            if not self.y > BOUNDARY_MARGIN:
                raise InvalidPointError(
                    f"half-space point needs y > {BOUNDARY_MARGIN}, got y={self.y}"
                )
        else:
            if not self.x * self.x + self.y * self.y < 1.0 - BOUNDARY_MARGIN:
                raise InvalidPointError(
                    f"disc point needs x^2+y^2 < 1 - {BOUNDARY_MARGIN}, "
                    f"got ({self.x}, {self.y})"
                )

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class AmbientPoint:
    """Point of the total space: a base point plus fiber coordinate t."""

    base: BasePoint
    t: float

    @property
    def model(self) -> Model:
        return self.base.model

    @property
    def x(self) -> float:
        return self.base.x

    @property
    def y(self) -> float:
        return self.base.y

    def coords(self) -> np.ndarray:
        return np.array([self.base.x, self.base.y, self.t])


@dataclass(frozen=True)
class TangentVector:
    """Coordinate components (dx, dy, dt) attached to an ambient point."""

    point: AmbientPoint
    dx: float
    dy: float
    dt: float

    def coords(self) -> np.ndarray:
        return np.array([self.dx, self.dy, self.dt])


@dataclass(frozen=True)
class FrameComponents:
    """Components of a tangent vector in the orthonormal frame (E1, E2, E3)."""

    a1: float
    a2: float
    a3: float

    def norm(self) -> float:
        return math.sqrt(self.a1 ** 2 + self.a2 ** 2 + self.a3 ** 2)


def ensure_same_model(p: BasePoint, q: BasePoint) -> None:
    if p.model is not q.model:
        raise ModelMismatchError(f"mixed models {p.model} and {q.model}")


# -- conformal data ----------------------------------------------------------
#
# The array kernels below accept numpy arrays and are the single source of
# truth for the conformal factor and the connection form; the scalar API
# wraps them.


def conformal_data_arrays(model: Model, x, y):
    """Return (lam, lam_x, lam_y) of the model's conformal factor."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if model is Model.HALF_SPACE:
        lam = 1.0 / y
        lam_x = np.zeros_like(lam)
        lam_y = -1.0 / (y * y)
        return lam, lam_x, lam_y
    s = 1.0 - x * x - y * y
    lam = 2.0 / s
    lam_x = 4.0 * x / (s * s)
    lam_y = 4.0 * y / (s * s)
    return lam, lam_x, lam_y


def vertical_form_arrays(model: Model, tau: float, x, y):
    """Components (w1, w2) of the connection form omega = w1 dx + w2 dy."""
    lam, lam_x, lam_y = conformal_data_arrays(model, x, y)
    w1 = 2.0 * tau * lam_y / lam
    w2 = -2.0 * tau * lam_x / lam
    return w1, w2


def frame_components_arrays(model: Model, tau: float, x, y, vx, vy, vt):
    """Frame components (a1, a2, a3) of coordinate vectors (vx, vy, vt)."""
    lam, _, _ = conformal_data_arrays(model, x, y)
    w1, w2 = vertical_form_arrays(model, tau, x, y)
    a1 = lam * np.asarray(vx, dtype=float)
    a2 = lam * np.asarray(vy, dtype=float)
    a3 = np.asarray(vt, dtype=float) + w1 * vx + w2 * vy
    return a1, a2, a3


def metric_arrays(model: Model, tau: float, x, y) -> np.ndarray:
    """Coordinate metric matrices, shape (..., 3, 3)."""
    x = np.asarray(x, dtype=float)
    lam, _, _ = conformal_data_arrays(model, x, y)
    w1, w2 = vertical_form_arrays(model, tau, x, y)
    g = np.empty(x.shape + (3, 3))
    g[..., 0, 0] = lam * lam + w1 * w1
    g[..., 0, 1] = w1 * w2
    g[..., 0, 2] = w1
    g[..., 1, 0] = w1 * w2
    g[..., 1, 1] = lam * lam + w2 * w2
    g[..., 1, 2] = w2
    g[..., 2, 0] = w1
    g[..., 2, 1] = w2
    g[..., 2, 2] = np.ones_like(lam)
    return g


# -- scalar API --------------------------------------------------------------


def conformal_factor(p: BasePoint) -> float:
    lam, _, _ = conformal_data_arrays(p.model, p.x, p.y)
    return float(lam)


def conformal_factor_gradient(p: BasePoint) -> tuple[float, float]:
    _, lam_x, lam_y = conformal_data_arrays(p.model, p.x, p.y)
    return float(lam_x), float(lam_y)


def vertical_form(p: BasePoint, tau: float) -> tuple[float, float]:
    w1, w2 = vertical_form_arrays(p.model, tau, p.x, p.y)
    return float(w1), float(w2)


def metric_at(p: AmbientPoint, tau: float) -> np.ndarray:
    """Coordinate metric at p as a 3x3 array.  Its determinant is lam^4."""
    return metric_arrays(p.model, tau, p.x, p.y)


def frame_at(p: AmbientPoint, tau: float) -> tuple[TangentVector, TangentVector, TangentVector]:
    """Orthonormal frame (E1, E2, E3) with E3 the unit vertical field."""
    lam = conformal_factor(p.base)
    w1, w2 = vertical_form(p.base, tau)
    e1 = TangentVector(p, 1.0 / lam, 0.0, -w1 / lam)
    e2 = TangentVector(p, 0.0, 1.0 / lam, -w2 / lam)
    e3 = TangentVector(p, 0.0, 0.0, 1.0)
    return e1, e2, e3


def frame_components(p: AmbientPoint, v: tuple[float, float, float], tau: float) -> FrameComponents:
    """Expand the coordinate vector v at p in the orthonormal frame."""
    a1, a2, a3 = frame_components_arrays(p.model, tau, p.x, p.y, v[0], v[1], v[2])
    return FrameComponents(float(a1), float(a2), float(a3))


def coordinate_components(p: AmbientPoint, fc: FrameComponents, tau: float) -> tuple[float, float, float]:
    """Coordinate components of a vector given in the orthonormal frame."""
    lam = conformal_factor(p.base)
    w1, w2 = vertical_form(p.base, tau)
    vx = fc.a1 / lam
    vy = fc.a2 / lam
    vt = fc.a3 - w1 * vx - w2 * vy
    return vx, vy, vt


def ambient_inner(p: AmbientPoint, v, w, tau: float) -> float:
    """Metric pairing of two coordinate vectors at p."""
    g = metric_at(p, tau)
    va = np.asarray(v, dtype=float)
    wa = np.asarray(w, dtype=float)
    return float(va @ g @ wa)


def project(p: AmbientPoint) -> BasePoint:
    """Bundle projection onto the base."""
    return p.base


# -- model conversion --------------------------------------------------------
#
# The base models are identified by the Moebius map phi(z) = (i z + 1)/(z + i)
# from the half plane onto the disc.  The fiber coordinate transforms by
# t -> t + 4 * tau * arctan(x / (y + 1)), which makes the identification an
# isometry of the ambient metrics for every tau.


def convert_base(p: BasePoint) -> BasePoint:
    if p.model is Model.HALF_SPACE:
        x, y = p.x, p.y
        den = x * x + (y + 1.0) ** 2
        return BasePoint(Model.CYLINDER, 2.0 * x / den, (x * x + y * y - 1.0) / den)
    u, v = p.x, p.y
    den = u * u + (1.0 - v) ** 2
    return BasePoint(Model.HALF_SPACE, 2.0 * u / den, (1.0 - u * u - v * v) / den)


def convert_model(p: AmbientPoint, tau: float) -> AmbientPoint:
    """Isometric change of model, in whichever direction p requires.

    The fiber correction sign is fixed by the isometry requirement
    J^T G_cyl J = G_half for the connection form of vertical_form_arrays;
    see the numeric pullback check in the isometries module.
    """
    if p.model is Model.HALF_SPACE:
        base = convert_base(p.base)
        t = p.t - 4.0 * tau * math.atan2(p.x, p.y + 1.0)
        return AmbientPoint(base, t)
    base = convert_base(p.base)
    t = p.t + 4.0 * tau * math.atan2(p.x, 1.0 - p.y)
    return AmbientPoint(base, t)


def convert_coords_arrays(model: Model, tau: float, x, y, t):
    """Vectorized convert_model on coordinate arrays; returns (x', y', t')."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    if model is Model.HALF_SPACE:
        den = x * x + (y + 1.0) ** 2
        return (
            2.0 * x / den,
            (x * x + y * y - 1.0) / den,
            t - 4.0 * tau * np.arctan2(x, y + 1.0),
        )
    den = x * x + (1.0 - y) ** 2
    return (
        2.0 * x / den,
        (1.0 - x * x - y * y) / den,
        t + 4.0 * tau * np.arctan2(x, 1.0 - y),
    )


# -- hyperbolic distances ----------------------------------------------------


def hyperbolic_distance(p: BasePoint, q: BasePoint) -> float:
    """Distance in the base hyperbolic plane."""
    ensure_same_model(p, q)
    if p.model is Model.HALF_SPACE:
        dx = p.x - q.x
        dy = p.y - q.y
        arg = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y)
        return math.acosh(max(arg, 1.0))
    num = abs(p.z - q.z)
    den = abs(1.0 - p.z * q.z.conjugate())
    r = num / den
    r = min(r, 1.0 - 1e-16)
    return 2.0 * math.atanh(r)


def distance_to_vertical_geodesic(p: BasePoint, s: float) -> float:
    """Distance from p to the half-space geodesic {x = s}."""
    if p.model is not Model.HALF_SPACE:
        raise ModelMismatchError("vertical geodesics live in the half-space model")
    return math.asinh(abs(p.x - s) / p.y)


# -- lengths -----------------------------------------------------------------


def chord_length(p: AmbientPoint, q: AmbientPoint, tau: float) -> float:
    """Length of the coordinate chord pq in the metric at its midpoint."""
    ensure_same_model(p.base, q.base)
    delta = q.coords() - p.coords()
    mx, my = 0.5 * (p.x + q.x), 0.5 * (p.y + q.y)
    g = metric_arrays(p.model, tau, mx, my)
    return float(math.sqrt(delta @ g @ delta))


def polyline_length(model: Model, tau: float, coords: np.ndarray) -> float:
    """Sum of midpoint-metric chord lengths along a coordinate polyline (n, 3)."""
    pts = np.asarray(coords, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
        raise ParameterError("polyline needs shape (n, 3) with n >= 2")
    mid = 0.5 * (pts[:-1] + pts[1:])
    delta = pts[1:] - pts[:-1]
    g = metric_arrays(model, tau, mid[:, 0], mid[:, 1])
    sq = np.einsum("ni,nij,nj->n", delta, g, delta)
    return float(np.sum(np.sqrt(np.maximum(sq, 0.0))))
