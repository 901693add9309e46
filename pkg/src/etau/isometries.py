"""Ambient isometries built from Moebius maps of the base.

Every isometry considered here covers a Moebius isometry f of the base and
acts on the fiber affinely:

    direct:     (z, t) -> (f(z), t - 2 tau Theta(z) + shift)
    reversing:  (z, t) -> (R(f(z)), -t + 2 tau Theta(z) + shift)

where Theta is a continuous branch of arg f' on the model domain and R is the
model's standard reflection (R(z) = -conj(z) in the half space, R(z) = conj(z)
in the disc).  The branch is represented as the generic continuous formula
plus a stored constant offset, so composed maps stay exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    AmbientPoint,
    BasePoint,
    GeometryError,
    Model,
    ModelMismatchError,
    ParameterError,
    convert_coords_arrays,
    metric_arrays,
    metric_at,
)

_COEFF_TOL = 1e-12

KNOWN_FAMILIES = frozenset(
    {
        "generic",
        "identity",
        "vertical_translation",
        "scale",
        "axis_translation",
        "disc_point",
        "halfplane_graph",
        "rotation",
        "halfplane_reflection",
    }
)


class Orientation(Enum):
    DIRECT = "direct"
    REVERSING = "reversing"


@dataclass(frozen=True)
class MobiusMap:
    """Normalized Moebius map z -> (a z + b) / (c z + d) with a d - b c = 1."""

    a: complex
    b: complex
    c: complex
    d: complex
    model: Model

    @classmethod
    def normalized(cls, a: complex, b: complex, c: complex, d: complex, model: Model) -> "MobiusMap":
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        if abs(det) < _COEFF_TOL:
            raise ParameterError("Moebius matrix is singular")
        scale_ref = max(abs(a), abs(b), abs(c), abs(d))
        if model is Model.HALF_SPACE:
            if max(abs(a.imag), abs(b.imag), abs(c.imag), abs(d.imag)) > _COEFF_TOL * scale_ref:
                raise ParameterError("half-space Moebius maps need real coefficients")
            if det.real <= 0.0:
                raise ParameterError("half-space Moebius maps need positive determinant")
        s = 1.0 / cmath.sqrt(det)
        a, b, c, d = a * s, b * s, c * s, d * s
        if model is Model.HALF_SPACE:
            a, b, c, d = (complex(w.real, 0.0) for w in (a, b, c, d))
        else:
            if abs(d) <= abs(c) * (1.0 + 1e-12):
                raise ParameterError("disc Moebius maps must keep the pole outside the closed disc")
        return cls(a, b, c, d, model)

    def apply_complex(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z: complex) -> complex:
        w = self.c * z + self.d
        return 1.0 / (w * w)

    def matrix(self) -> tuple[complex, complex, complex, complex]:
        return (self.a, self.b, self.c, self.d)


def _matmul(m1, m2):
    a1, b1, c1, d1 = m1
    a2, b2, c2, d2 = m2
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )


def _reflection_adjusted(m: MobiusMap):
    """Matrix of R o f o R, the positive part seen behind a reflection."""
    a, b, c, d = m.matrix()
    if m.model is Model.HALF_SPACE:
        return (a, -b, -c, d)
    return (a.conjugate(), b.conjugate(), c.conjugate(), d.conjugate())


@dataclass(frozen=True)
class AmbientIsometry:
    """Isometry of the total space covering a Moebius map of the base."""

    mobius: MobiusMap
    orientation: Orientation
    shift: float
    branch_offset: float
    tau: float
    family: str = "generic"
    parameters: tuple[tuple[str, float], ...] = ()

    @property
    def model(self) -> Model:
        return self.mobius.model


def _reference_point(model: Model) -> AmbientPoint:
    if model is Model.HALF_SPACE:
        return AmbientPoint(BasePoint(Model.HALF_SPACE, 0.0, 1.0), 0.0)
    return AmbientPoint(BasePoint(Model.CYLINDER, 0.0, 0.0), 0.0)


def arg_derivative(iso: AmbientIsometry, z: complex | BasePoint) -> float:
    """Continuous branch of arg f'(z) for the covered Moebius map."""
    if isinstance(z, BasePoint):
        if z.model is not iso.model:
            raise ModelMismatchError("point model does not match the isometry")
        z = z.z
    m = iso.mobius
    w = m.c * z + m.d
    if iso.model is Model.HALF_SPACE:
        carg = math.atan2(w.imag, w.real)
    else:
        # |c/d| < 1 on the closed disc keeps Re(1 + (c/d) z) > 0, so the
        # principal argument below is continuous in z.
        carg = cmath.phase(m.d) + cmath.phase(1.0 + (m.c / m.d) * z)
    return -2.0 * carg + iso.branch_offset


def _arg_derivative_arrays(iso: AmbientIsometry, z: np.ndarray) -> np.ndarray:
    m = iso.mobius
    if iso.model is Model.HALF_SPACE:
        w = m.c * z + m.d
        carg = np.arctan2(w.imag, w.real)
    else:
        carg = cmath.phase(m.d) + np.angle(1.0 + (m.c / m.d) * z)
    return -2.0 * carg + iso.branch_offset


def apply(iso: AmbientIsometry, p: AmbientPoint) -> AmbientPoint:
    """Apply the isometry to an ambient point."""
    if p.model is not iso.model:
        raise ModelMismatchError("point model does not match the isometry")
    z = p.base.z
    w = iso.mobius.apply_complex(z)
    theta = arg_derivative(iso, z)
    if iso.orientation is Orientation.DIRECT:
        t = p.t - 2.0 * iso.tau * theta + iso.shift
    else:
        w = -w.conjugate() if iso.model is Model.HALF_SPACE else w.conjugate()
        t = -p.t + 2.0 * iso.tau * theta + iso.shift
    return AmbientPoint(BasePoint(iso.model, w.real, w.imag), t)


def apply_to_coords(iso: AmbientIsometry, coords: np.ndarray) -> np.ndarray:
    """Vectorized apply on an (n, 3) coordinate array."""
    pts = np.asarray(coords, dtype=float)
    z = pts[..., 0] + 1j * pts[..., 1]
    m = iso.mobius
    w = (m.a * z + m.b) / (m.c * z + m.d)
    theta = _arg_derivative_arrays(iso, z)
    out = np.empty_like(pts)
    if iso.orientation is Orientation.DIRECT:
        out[..., 0] = w.real
        out[..., 1] = w.imag
        out[..., 2] = pts[..., 2] - 2.0 * iso.tau * theta + iso.shift
    else:
        sign = -1.0 if iso.model is Model.HALF_SPACE else 1.0
        out[..., 0] = sign * w.real
        out[..., 1] = w.imag
        out[..., 2] = -pts[..., 2] + 2.0 * iso.tau * theta + iso.shift
    return out


def compose(outer: AmbientIsometry, inner: AmbientIsometry) -> AmbientIsometry:
    """Composition outer o inner (inner acts first)."""
    if outer.model is not inner.model:
        raise ModelMismatchError("cannot compose isometries of different models")
    if outer.tau != inner.tau:
        raise ParameterError("cannot compose isometries with different tau")
    m_outer = outer.mobius.matrix()
    if inner.orientation is Orientation.REVERSING:
        m_outer = _reflection_adjusted(outer.mobius)
    raw = _matmul(m_outer, inner.mobius.matrix())
    mob = MobiusMap.normalized(*raw, outer.model)
    orientation = (
        Orientation.REVERSING
        if (outer.orientation is Orientation.REVERSING) != (inner.orientation is Orientation.REVERSING)
        else Orientation.DIRECT
    )
    candidate = AmbientIsometry(mob, orientation, 0.0, 0.0, outer.tau)
    ref = _reference_point(outer.model)
    expected = apply(outer, apply(inner, ref))
    got = apply(candidate, ref)
    if abs(expected.x - got.x) > 1e-9 or abs(expected.y - got.y) > 1e-9:
        raise GeometryError("composed base maps disagree; inconsistent isometries")
    return AmbientIsometry(
        mob, orientation, expected.t - got.t, 0.0, outer.tau, family="generic"
    )


def inverse(iso: AmbientIsometry) -> AmbientIsometry:
    """Inverse isometry, with the fiber constants matched exactly."""
    a, b, c, d = iso.mobius.matrix()
    inv = (d, -b, -c, a)
    if iso.orientation is Orientation.REVERSING:
        tmp = MobiusMap.normalized(*inv, iso.model)
        inv = _reflection_adjusted(tmp)
    mob = MobiusMap.normalized(*inv, iso.model)
    candidate = AmbientIsometry(mob, iso.orientation, 0.0, 0.0, iso.tau)
    ref = _reference_point(iso.model)
    q = apply(iso, ref)
    r = apply(candidate, q)
    if abs(r.x - ref.x) > 1e-9 or abs(r.y - ref.y) > 1e-9:
        raise GeometryError("inverse base map disagrees; inconsistent isometry")
    return AmbientIsometry(
        mob, iso.orientation, ref.t - r.t, 0.0, iso.tau, family="generic"
    )


def _map_pullback_residual(push, p: AmbientPoint, model_to: Model, tau: float, step: float) -> float:
    coords = p.coords()

    def fourth_order_column(i: int, h: float) -> np.ndarray:
        samples = []
        for k in (-2.0, -1.0, 1.0, 2.0):
            shifted = coords.copy()
            shifted[i] += k * h
            samples.append(push(shifted))
        m2, m1, p1, p2 = samples
        return (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h)

    jac = np.empty((3, 3))
    for i in range(3):
        h = step * max(1.0, abs(coords[i]))
        coarse = fourth_order_column(i, h)
        fine = fourth_order_column(i, 0.5 * h)
        jac[:, i] = (16.0 * fine - coarse) / 15.0
    image = push(coords)
    g_image = metric_arrays(model_to, tau, image[0], image[1])
    g_here = metric_at(p, tau)
    return float(np.linalg.norm(jac.T @ g_image @ jac - g_here))


def pullback_residual(iso: AmbientIsometry, p: AmbientPoint, step: float = 2e-3) -> float:
    """Frobenius norm of J^T G(F p) J - G(p) with a finite-difference Jacobian.

    Vanishes (to truncation error) exactly when the map is isometric near p.
    The Jacobian uses Richardson-extrapolated five-point stencils; the wide
    step keeps the roundoff floor near 1e-10 even where the conformal factor
    is large, which a plain 1e-6 central difference cannot achieve.
    """
    return _map_pullback_residual(
        lambda coords: apply_to_coords(iso, coords), p, iso.model, iso.tau, step
    )


def conversion_pullback_residual(p: AmbientPoint, tau: float, step: float = 2e-3) -> float:
    """Pullback residual of the model conversion map at p (same stencil)."""
    target = Model.CYLINDER if p.model is Model.HALF_SPACE else Model.HALF_SPACE

    def push(coords: np.ndarray) -> np.ndarray:
        x, y, t = convert_coords_arrays(p.model, tau, coords[0], coords[1], coords[2])
        return np.array([float(x), float(y), float(t)])

    return _map_pullback_residual(push, p, target, tau, step)


# -- named families ----------------------------------------------------------


def identity_isometry(tau: float, model: Model) -> AmbientIsometry:
    mob = MobiusMap.normalized(1.0, 0.0, 0.0, 1.0, model)
    return AmbientIsometry(mob, Orientation.DIRECT, 0.0, 0.0, tau, family="identity")


def vertical_translation(offset: float, tau: float, model: Model) -> AmbientIsometry:
    mob = MobiusMap.normalized(1.0, 0.0, 0.0, 1.0, model)
    return AmbientIsometry(
        mob,
        Orientation.DIRECT,
        float(offset),
        0.0,
        tau,
        family="vertical_translation",
        parameters=(("offset", float(offset)),),
    )


def scale_isometry(factor: float, tau: float) -> AmbientIsometry:
    """Half-space homothety z -> factor * z; it fixes t for every tau."""
    if not factor > 0.0:
        raise ParameterError(f"scale factor must be positive, got {factor}")
    mob = MobiusMap.normalized(factor, 0.0, 0.0, 1.0, Model.HALF_SPACE)
    return AmbientIsometry(
        mob,
        Orientation.DIRECT,
        0.0,
        0.0,
        tau,
        family="scale",
        parameters=(("factor", float(factor)),),
    )


def axis_translation_isometry(axis_foot: float, tau: float) -> AmbientIsometry:
    """Half-space map z -> axis_foot/2 - axis_foot^2 / z.

    Swaps the ideal points 0 and infinity with the pair -axis_foot/2,
    +axis_foot/2; its branch satisfies Theta(z) = -2 atan2(y, x).
    """
    s = float(axis_foot)
    if not s > 0.0:
        raise ParameterError(f"axis foot must be positive, got {s}")
    mob = MobiusMap.normalized(0.5, -s, 1.0 / s, 0.0, Model.HALF_SPACE)
    return AmbientIsometry(
        mob,
        Orientation.DIRECT,
        0.0,
        0.0,
        tau,
        family="axis_translation",
        parameters=(("axis_foot", s),),
    )


def disc_point_isometry(center: complex, tau: float) -> AmbientIsometry:
    """Disc involution z -> (z - center) / (conj(center) z - 1).

    Exchanges the origin with center; the fiber constant is chosen so the
    origin's fiber maps to t = 0 over the center.
    """
    z0 = complex(center)
    if abs(z0) >= 1.0 - 1e-12:
        raise ParameterError(f"center must lie in the open disc, got {z0}")
    mob = MobiusMap.normalized(1.0, -z0, z0.conjugate(), -1.0, Model.CYLINDER)
    offset = math.pi + 2.0 * cmath.phase(mob.d)
    return AmbientIsometry(
        mob,
        Orientation.DIRECT,
        2.0 * tau * math.pi,
        offset,
        tau,
        family="disc_point",
        parameters=(("center_x", z0.real), ("center_y", z0.imag)),
    )


def halfplane_graph_isometry(x0: float, y0: float, height: float, tau: float) -> AmbientIsometry:
    """Half-space map z -> y0 z + x0 lifted with a constant fiber shift.

    Sends the point (i, 0) to ((x0, y0), height); arg f' vanishes, so the
    fiber rule is a plain shift for every tau.
    """
    if not y0 > 0.0:
        raise ParameterError(f"target height y0 must be positive, got {y0}")
    mob = MobiusMap.normalized(y0, x0, 0.0, 1.0, Model.HALF_SPACE)
    return AmbientIsometry(
        mob,
        Orientation.DIRECT,
        float(height),
        0.0,
        tau,
        family="halfplane_graph",
        parameters=(("x0", float(x0)), ("y0", float(y0)), ("height", float(height))),
    )


def rotation_isometry(angle: float, tau: float) -> AmbientIsometry:
    """Disc rotation about the origin; fixes t for every tau."""
    half = 0.5 * float(angle)
    mob = MobiusMap.normalized(
        cmath.exp(1j * half), 0.0, 0.0, cmath.exp(-1j * half), Model.CYLINDER
    )
    theta0 = -2.0 * cmath.phase(mob.d)
    return AmbientIsometry(
        mob,
        Orientation.DIRECT,
        2.0 * tau * theta0,
        0.0,
        tau,
        family="rotation",
        parameters=(("angle", float(angle)),),
    )


def halfplane_reflection(axis_x: float, tau: float) -> AmbientIsometry:
    """Orientation-reversing reflection about the vertical plane x = axis_x."""
    mob = MobiusMap.normalized(1.0, -2.0 * float(axis_x), 0.0, 1.0, Model.HALF_SPACE)
    return AmbientIsometry(
        mob,
        Orientation.REVERSING,
        0.0,
        0.0,
        tau,
        family="halfplane_reflection",
        parameters=(("axis_x", float(axis_x)),),
    )


# -- closed-form angle branches (used as cross-checks) ------------------------


def axis_translation_angle(z: complex) -> float:
    """Closed-form branch of arg f' for the axis translation family."""
    return -2.0 * math.atan2(z.imag, z.real)


def point_translation_angle(center: complex, z: complex) -> float:
    """Closed-form smooth branch of arg f' for the disc point translation.

    Quadrant-corrected so it agrees with the continuous branch on the whole
    disc, not only where the naive arctangent formula avoids its cuts.
    """
    x0, y0 = center.real, center.imag
    x, y = z.real, z.imag
    p = x0 * x + y0 * y - 1.0
    q = x * y0 - x0 * y
    return math.pi + math.atan2(2.0 * p * q, p * p - q * q)


# -- serialization ------------------------------------------------------------


def isometry_to_json(iso: AmbientIsometry) -> dict:
    return {
        "schema_version": 1,
        "kind": "ambient_isometry",
        "family": iso.family,
        "model": iso.model.value,
        "tau": iso.tau,
        "orientation": iso.orientation.value,
        "shift": iso.shift,
        "branch_offset": iso.branch_offset,
        "matrix": [[w.real, w.imag] for w in iso.mobius.matrix()],
        "parameters": dict(iso.parameters),
    }


def isometry_from_json(data: dict) -> AmbientIsometry:
    family = data.get("family")
    if family not in KNOWN_FAMILIES:
        raise ParameterError(f"unknown isometry family {family!r}")
    try:
        model = Model(data["model"])
        orientation = Orientation(data["orientation"])
        coeffs = [complex(re, im) for re, im in data["matrix"]]
        mob = MobiusMap(coeffs[0], coeffs[1], coeffs[2], coeffs[3], model)
        return AmbientIsometry(
            mob,
            orientation,
            float(data["shift"]),
            float(data["branch_offset"]),
            float(data["tau"]),
            family=family,
            parameters=tuple((k, float(v)) for k, v in sorted(data.get("parameters", {}).items())),
        )
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed isometry record: {exc}") from exc
