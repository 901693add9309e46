"""Generalized slabs: bounding-graph checks, annulus families, and audits.

A slab is the region between two vertical graphs swept by a family of
pairwise-isometric minimal annuli whose boundary circles escape the region,
one above and one below.  This module constructs the two example families
(translated catenoids over a flat slab, and catenoid stand-ins over tilted
graphs certified by the Douglas criterion) and audits the defining
conditions on sampled interior points.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.ndimage import label as _ndimage_label
from scipy.optimize import minimize
from scipy.special import sici

from .core import (
    AmbientPoint,
    BasePoint,
    FeasibilityError,
    InvalidPointError,
    Model,
    ParameterError,
    SpaceParams,
    chord_length,
    convert_coords_arrays,
    metric_arrays,
)
from .graphs import (
    Chart,
    GraphDomain,
    GraphFunction,
    douglas_check,
    graph_nu,
    hyperbolic_gradient_norm,
)
from .isometries import (
    AmbientIsometry,
    apply,
    apply_to_coords,
    compose,
    disc_point_isometry,
    inverse,
    axis_translation_isometry,
    vertical_translation,
)
from .surfaces import (
    CatenoidSpec,
    LeafSpec,
    SurfaceMesh,
    _catenoid_table,
    _leaf_side_pulled,
    apply_isometry_to_mesh,
    catenoid_height,
    catenoid_neck_radius,
    catenoid_profile_inverse,
    mesh_catenoid,
)

__all__ = [
    "AnnulusCheck",
    "AnnulusInstance",
    "BoundingGraphCheck",
    "CatenoidAnnulusGenerator",
    "SeparationReport",
    "SlabReport",
    "SlabSpec",
    "build_example1",
    "build_example2",
    "check_annulus_family",
    "check_bounding_graphs",
    "disc_window_domain",
    "edge_length_spectrum",
    "graph_separation_probe",
    "halfplane_window_domain",
    "sample_interior_points",
    "slab_report_to_json",
    "slab_spec_descriptor",
    "with_overlapping_graphs",
    "with_shrunken_annuli",
]


# -- sampled windows for entire graphs ----------------------------------------


def disc_window_domain(hyperbolic_radius: float, n: int) -> GraphDomain:
    """Square grid over the disc of the given hyperbolic radius, nodes masked
    to the inscribed coordinate circle."""
    if not hyperbolic_radius > 0.0:
        raise ParameterError("window radius must be positive")
    rc = math.tanh(0.5 * hyperbolic_radius)
    axis = np.linspace(-rc, rc, n)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    mask = x * x + y * y <= rc * rc
    return GraphDomain(
        chart=Chart.DISC_XY, bounds=((-rc, rc), (-rc, rc)), shape=(n, n), mask=mask
    )


def halfplane_window_domain(
    center: tuple[float, float], hyperbolic_radius: float, n: int
) -> GraphDomain:
    """Bounding box of a hyperbolic disc in the half-plane, masked to the disc.

    A hyperbolic disc of radius r around (x0, y0) is the Euclidean disc with
    center (x0, y0 cosh r) and radius y0 sinh r.
    """
    x0, y0 = center
    if not y0 > 0.0:
        raise ParameterError("window center must lie in the upper half-plane")
    r = float(hyperbolic_radius)
    half_width = y0 * math.sinh(r)
    bounds = ((x0 - half_width, x0 + half_width), (y0 * math.exp(-r), y0 * math.exp(r)))
    dom = GraphDomain(chart=Chart.HALFPLANE_XY, bounds=bounds, shape=(n, n))
    x, y = dom.node_grids()
    cosh_dist = 1.0 + ((x - x0) ** 2 + (y - y0) ** 2) / (2.0 * y * y0)
    mask = cosh_dist <= math.cosh(r)
    return GraphDomain(chart=Chart.HALFPLANE_XY, bounds=bounds, shape=(n, n), mask=mask)


# -- annulus family ------------------------------------------------------------


@lru_cache(maxsize=8)
def _model_annulus_mesh(
    tau: float, d: float, rho_boundary: float, rows: int, cols: int
) -> SurfaceMesh:
    return mesh_catenoid(CatenoidSpec(tau=tau, d=d), rho_boundary, (rows, cols))


@lru_cache(maxsize=8)
def _model_annulus_edges(
    tau: float, d: float, rho_boundary: float, rows: int, cols: int
) -> np.ndarray:
    mesh = _model_annulus_mesh(tau, d, rho_boundary, rows, cols)
    tri = mesh.triangles
    pairs = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    pairs.sort(axis=1)
    return np.unique(pairs, axis=0)


@dataclass(frozen=True)
class AnnulusInstance:
    """One member of the annulus family: an isometric image of the model
    catenoid piece, positioned to pass through the requested point."""

    point: AmbientPoint
    placement: AmbientIsometry
    mesh: SurfaceMesh
    tau: float
    d: float
    rho_boundary: float
    w_reference: float

    def surface_coords(self, phi: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Ambient coordinates of the parametrized annulus.

        w in [-1, 1] is the signed regularized radial variable; |w| = 1 is
        the boundary pair and w = 0 the neck.
        """
        spec = CatenoidSpec(tau=self.tau, d=self.d)
        rmin = catenoid_neck_radius(spec)
        sigma_max = math.sqrt(self.rho_boundary - rmin)
        phi = np.asarray(phi, dtype=float)
        w = np.asarray(w, dtype=float)
        sigma = np.abs(w) * sigma_max
        rho = rmin + sigma * sigma
        table = _catenoid_table(self.tau, self.d, sigma_max)
        t = np.sign(w) * table(sigma)
        radius = np.tanh(0.5 * rho)
        coords = np.stack(
            [radius * np.cos(phi), radius * np.sin(phi), t], axis=-1
        ).reshape(-1, 3)
        return apply_to_coords(self.placement, coords)

    def boundary_coords(self, samples: int = 512) -> tuple[np.ndarray, np.ndarray]:
        """Finely sampled boundary circles, (top, bottom) ordered by mean t."""
        phi = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
        upper = self.surface_coords(phi, np.ones_like(phi))
        lower = self.surface_coords(phi, -np.ones_like(phi))
        if float(np.mean(upper[:, 2])) >= float(np.mean(lower[:, 2])):
            return upper, lower
        return lower, upper

    def distance_to(self, q: AmbientPoint) -> float:
        """Ambient chord distance from q to the smooth annulus (local search)."""
        if q.model is not Model.CYLINDER:
            raise ParameterError("annulus instances live in the cylinder model")

        def objective(v: np.ndarray) -> float:
            phi, w = float(v[0]), float(v[1])
            penalty = 0.0
            if abs(w) > 1.0:
                penalty = 10.0 * (abs(w) - 1.0)
                w = math.copysign(1.0, w)
            c = self.surface_coords(np.array([phi]), np.array([w]))[0]
            p = AmbientPoint(BasePoint(Model.CYLINDER, c[0], c[1]), c[2])
            return chord_length(p, q, self.tau) + penalty

        start = np.array([0.0, self.w_reference])
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 400},
        )
        return float(res.fun)


@dataclass(frozen=True)
class CatenoidAnnulusGenerator:
    """Family rule p -> isometric image of one truncated catenoid through p.

    The placement composes two disc involutions (axis to the requested
    projection) with the vertical translation that pins the reference vertex
    to p exactly; every instance is therefore an isometric copy of the same
    model annulus.
    """

    tau: float
    d: float
    rho_boundary: float
    fiber_center: Callable[[AmbientPoint], float]
    resolution: tuple[int, int] = (65, 96)

    def model_mesh(self) -> SurfaceMesh:
        rows, cols = self.resolution
        return _model_annulus_mesh(self.tau, self.d, self.rho_boundary, rows, cols)

    def __call__(self, p: AmbientPoint) -> AnnulusInstance:
        pc = p if p.model is Model.CYLINDER else _to_cylinder_point(p, self.tau)
        spec = CatenoidSpec(tau=self.tau, d=self.d)
        rmin = catenoid_neck_radius(spec)
        sigma_max = math.sqrt(self.rho_boundary - rmin)
        center_t = float(self.fiber_center(p))
        offset = pc.t - center_t
        table = _catenoid_table(self.tau, self.d, sigma_max)
        boundary_height = float(table(sigma_max))
        if abs(offset) >= boundary_height:
            raise InvalidPointError(
                f"fiber offset {offset} exceeds the annulus half-height {boundary_height}"
            )
        sign = 1.0 if offset >= 0.0 else -1.0
        rho_p = catenoid_profile_inverse(spec, abs(offset)) if offset != 0.0 else rmin
        rho_p = min(rho_p, self.rho_boundary)
        b_ref = math.tanh(0.5 * rho_p)
        move = compose(
            disc_point_isometry(complex(pc.x, pc.y), self.tau),
            disc_point_isometry(complex(b_ref, 0.0), self.tau),
        )
        image = apply(move, AmbientPoint(BasePoint(Model.CYLINDER, b_ref, 0.0), sign * abs(offset)))
        lift = pc.t - image.t
        placement = compose(vertical_translation(lift, self.tau, Model.CYLINDER), move)
        mesh = apply_isometry_to_mesh(placement, self.model_mesh())
        w_ref = sign * math.sqrt(max(rho_p - rmin, 0.0)) / sigma_max
        return AnnulusInstance(
            point=p,
            placement=placement,
            mesh=mesh,
            tau=self.tau,
            d=self.d,
            rho_boundary=self.rho_boundary,
            w_reference=w_ref,
        )


def _to_cylinder_point(p: AmbientPoint, tau: float) -> AmbientPoint:
    x, y, t = convert_coords_arrays(
        p.model, tau, np.array([p.x]), np.array([p.y]), np.array([p.t])
    )
    return AmbientPoint(BasePoint(Model.CYLINDER, float(x[0]), float(y[0])), float(t[0]))


def _batched_polyline_lengths(model: Model, tau: float, pts: np.ndarray) -> np.ndarray:
    delta = pts[:, 1:, :] - pts[:, :-1, :]
    mid = 0.5 * (pts[:, 1:, :] + pts[:, :-1, :])
    g = metric_arrays(model, tau, mid[..., 0], mid[..., 1])
    sq = np.einsum("...i,...ij,...j->...", delta, g, delta)
    return np.sqrt(np.maximum(sq, 0.0)).sum(axis=1)


def _segment_lengths(
    instance: AnnulusInstance, a: np.ndarray, b: np.ndarray, m: int
) -> np.ndarray:
    frac = np.linspace(0.0, 1.0, m + 1)
    pts = a[:, None, :] * (1.0 - frac)[None, :, None] + b[:, None, :] * frac[None, :, None]
    mapped = apply_to_coords(instance.placement, pts.reshape(-1, 3))
    return _batched_polyline_lengths(
        Model.CYLINDER, instance.tau, mapped.reshape(a.shape[0], m + 1, 3)
    )


def edge_length_spectrum(instance: AnnulusInstance, target_step: float = 0.015) -> np.ndarray:
    """Sorted lengths of the instance's mesh edges.

    Each edge is measured as the image of the corresponding model-coordinate
    segment, subdivided until the sub-chords shrink below target_step and
    Richardson-extrapolated, so isometric instances produce matching spectra
    well below the comparison tolerance.  Boundary-rim edges of a large
    annulus span tens of hyperbolic units and dominate the cost; edges are
    bucketed by the subdivision level they need.
    """
    rows, cols = instance.mesh.grid_shape
    model = _model_annulus_mesh(instance.tau, instance.d, instance.rho_boundary, rows, cols)
    edges = _model_annulus_edges(instance.tau, instance.d, instance.rho_boundary, rows, cols)
    a = model.vertices[edges[:, 0]]
    b = model.vertices[edges[:, 1]]
    rough = _segment_lengths(instance, a, b, 4)
    levels = np.clip(
        np.ceil(np.log2(np.maximum(rough / target_step, 1.0))), 3, 13
    ).astype(int)
    out = np.empty(edges.shape[0])
    for level in np.unique(levels):
        sel = levels == level
        m = 1 << int(level)
        coarse = _segment_lengths(instance, a[sel], b[sel], m)
        fine = _segment_lengths(instance, a[sel], b[sel], 2 * m)
        out[sel] = (4.0 * fine - coarse) / 3.0
    return np.sort(out)


# -- slab specification and checks ---------------------------------------------


@dataclass(frozen=True)
class SlabSpec:
    """Region between two sampled entire graphs with its annulus family.

    The graphs share one chart window; "entire" is window-relative.  The
    generator must produce pairwise-isometric annuli through interior points.
    """

    lower: GraphFunction
    upper: GraphFunction
    annulus_generator: Callable[[AmbientPoint], AnnulusInstance]
    metadata: dict


@dataclass(frozen=True)
class BoundingGraphCheck:
    height_bound: float
    normal_bound: float
    disjoint: bool
    min_gap: float


@dataclass(frozen=True)
class AnnulusCheck:
    point: AmbientPoint
    contains_point: bool
    boundary_above: bool
    boundary_below: bool
    distance: float
    above_margin: float
    below_margin: float


@dataclass(frozen=True)
class SlabReport:
    height_bound: float
    normal_bound: float
    disjoint: bool
    annulus_checks: tuple[AnnulusCheck, ...]
    spectra_deviation: float
    spectra_ok: bool
    passed: bool
    metadata: dict


def _require_matching_domains(slab: SlabSpec) -> None:
    dl, du = slab.lower.domain, slab.upper.domain
    same = (
        dl.chart is du.chart
        and dl.bounds == du.bounds
        and dl.shape == du.shape
        and dl.axis_foot == du.axis_foot
        and np.array_equal(dl.active_mask(), du.active_mask())
    )
    if not same:
        raise ParameterError("bounding graphs must be sampled on matching grids")
    if slab.lower.tau != slab.upper.tau:
        raise ParameterError("bounding graphs must share the bundle curvature")


def check_bounding_graphs(slab: SlabSpec, max_samples: int | None = None) -> BoundingGraphCheck:
    """Height bound, vertical-component bound, and disjointness of the graphs."""
    _require_matching_domains(slab)
    active = slab.lower.domain.active_mask()
    if max_samples is not None and int(np.sum(active)) > max_samples:
        stride = int(math.ceil(math.sqrt(np.sum(active) / max_samples)))
        keep = np.zeros_like(active)
        keep[::stride, ::stride] = True
        active = active & keep
    h0 = float(
        max(np.max(np.abs(slab.lower.values[active])), np.max(np.abs(slab.upper.values[active])))
    )
    c = float(min(np.min(graph_nu(slab.lower)[active]), np.min(graph_nu(slab.upper)[active])))
    gap = float(np.min((slab.upper.values - slab.lower.values)[active]))
    return BoundingGraphCheck(height_bound=h0, normal_bound=c, disjoint=gap > 0.0, min_gap=gap)


def _graph_interpolator(gf: GraphFunction) -> RegularGridInterpolator:
    if gf.domain.chart not in (Chart.DISC_XY, Chart.HALFPLANE_XY):
        raise ParameterError("slab graphs are expected on coordinate charts")
    q1, q2 = gf.domain.axes()
    return RegularGridInterpolator(
        (q1, q2), gf.values, method="linear", bounds_error=False, fill_value=None
    )


def _heights_at(interp: RegularGridInterpolator, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return interp(np.stack([x, y], axis=-1))


def _point_in_window(domain: GraphDomain, x: float, y: float) -> bool:
    (a1, b1), (a2, b2) = domain.bounds
    if not (a1 <= x <= b1 and a2 <= y <= b2):
        return False
    q1, q2 = domain.axes()
    i = int(np.clip(np.searchsorted(q1, x), 0, domain.shape[0] - 1))
    j = int(np.clip(np.searchsorted(q2, y), 0, domain.shape[1] - 1))
    return bool(domain.active_mask()[i, j])


def check_annulus_family(
    slab: SlabSpec,
    points: list[AmbientPoint],
    seed: int = 0,
    spectra_pairs: int = 2,
    boundary_samples: int = 512,
    contains_tol: float = 1e-6,
    spectra_tol: float = 1e-6,
    workers: int | None = None,
) -> SlabReport:
    """Audit the slab definition at the given interior points.

    Per point: the generated annulus passes through it (ambient distance
    below contains_tol times the slab scale) and its boundary circles clear
    the graphs along fibers, one above and one below.  Random instance pairs
    must have matching edge-length spectra.
    """
    bounding = check_bounding_graphs(slab)
    base_report = dict(
        height_bound=bounding.height_bound,
        normal_bound=bounding.normal_bound,
        disjoint=bounding.disjoint,
        metadata=dict(slab.metadata),
    )
    if not bounding.disjoint or bounding.normal_bound <= 0.0:
        return SlabReport(
            annulus_checks=(),
            spectra_deviation=float("nan"),
            spectra_ok=False,
            passed=False,
            **base_report,
        )

    tau = slab.lower.tau
    model = slab.lower.domain.model
    lower_interp = _graph_interpolator(slab.lower)
    upper_interp = _graph_interpolator(slab.upper)
    scale = max(1.0, 2.0 * bounding.height_bound)

    for p in points:
        q = p if p.model is model else _convert_point(p, model, tau)
        if not _point_in_window(slab.lower.domain, q.x, q.y):
            raise InvalidPointError(f"point projection {(q.x, q.y)} is outside the window")
        lo = _heights_at(lower_interp, np.array(q.x), np.array(q.y)).item()
        hi = _heights_at(upper_interp, np.array(q.x), np.array(q.y)).item()
        if not lo < q.t < hi:
            raise InvalidPointError(f"point at t={q.t} is not strictly between the graphs")

    def check_one(p: AmbientPoint) -> tuple[AnnulusCheck, AnnulusInstance | None]:
        try:
            instance = slab.annulus_generator(p)
        except InvalidPointError:
            failed = AnnulusCheck(
                point=p,
                contains_point=False,
                boundary_above=False,
                boundary_below=False,
                distance=float("inf"),
                above_margin=float("-inf"),
                below_margin=float("-inf"),
            )
            return failed, None
        distance = instance.distance_to(
            p if p.model is Model.CYLINDER else _to_cylinder_point(p, tau)
        )
        top, bottom = instance.boundary_coords(boundary_samples)
        above_margin = _fiber_margin(top, slab.upper, upper_interp, tau, side=+1)
        below_margin = _fiber_margin(bottom, slab.lower, lower_interp, tau, side=-1)
        return (
            AnnulusCheck(
                point=p,
                contains_point=distance < contains_tol * scale,
                boundary_above=above_margin > 0.0,
                boundary_below=below_margin > 0.0,
                distance=distance,
                above_margin=above_margin,
                below_margin=below_margin,
            ),
            instance,
        )

    if len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers or min(8, len(points))) as pool:
            results = list(pool.map(check_one, points))
    else:
        results = [check_one(p) for p in points]
    checks = tuple(r[0] for r in results)
    instances = [r[1] for r in results if r[1] is not None]

    deviation = 0.0
    if len(instances) >= 2 and spectra_pairs > 0:
        rng = np.random.default_rng(seed)
        cache: dict[int, np.ndarray] = {}

        def spectrum(k: int) -> np.ndarray:
            if k not in cache:
                cache[k] = edge_length_spectrum(instances[k])
            return cache[k]

        for _ in range(spectra_pairs):
            i, j = rng.choice(len(instances), size=2, replace=False)
            deviation = max(deviation, float(np.max(np.abs(spectrum(i) - spectrum(j)))))
    spectra_ok = deviation < spectra_tol

    passed = (
        bounding.disjoint
        and bounding.normal_bound > 0.0
        and spectra_ok
        and all(c.contains_point and c.boundary_above and c.boundary_below for c in checks)
    )
    return SlabReport(
        annulus_checks=checks,
        spectra_deviation=deviation,
        spectra_ok=spectra_ok,
        passed=passed,
        **base_report,
    )


def _convert_point(p: AmbientPoint, model: Model, tau: float) -> AmbientPoint:
    if p.model is model:
        return p
    x, y, t = convert_coords_arrays(
        p.model, tau, np.array([p.x]), np.array([p.y]), np.array([p.t])
    )
    return AmbientPoint(BasePoint(model, float(x[0]), float(y[0])), float(t[0]))


def _fiber_margin(
    circle: np.ndarray,
    graph: GraphFunction,
    interp: RegularGridInterpolator,
    tau: float,
    side: int,
) -> float:
    """Signed clearance of a boundary circle from a graph along fibers."""
    model = graph.domain.model
    x, y, t = circle[:, 0], circle[:, 1], circle[:, 2]
    if model is not Model.CYLINDER:
        x, y, t = convert_coords_arrays(Model.CYLINDER, tau, x, y, t)
    heights = _heights_at(interp, x, y)
    if side > 0:
        return float(np.min(t - heights))
    return float(np.min(heights - t))


# -- example constructions -------------------------------------------------------


def _solve_catenoid_half_height(tau: float, target: float) -> float:
    """Neck parameter whose catenoid half-height equals the target (bisection)."""
    limit = 0.5 * math.pi * math.sqrt(1.0 + 4.0 * tau * tau)
    if not 0.0 < target < limit:
        raise FeasibilityError(
            f"half-height target {target} outside the attainable range (0, {limit})"
        )

    def half_height(d: float) -> float:
        return 0.5 * catenoid_height(CatenoidSpec(tau=tau, d=d))

    lo, hi = 1e-3, 1.0
    while half_height(hi) < target:
        hi *= 2.0
        if hi > 1e8:
            raise FeasibilityError(f"no neck parameter reaches half-height {target}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if half_height(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * hi:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class _ConstantFiberCenter:
    value: float

    def __call__(self, p: AmbientPoint) -> float:
        return self.value


def build_example1(
    sp: SpaceParams,
    epsilon: float,
    window_radius: float = 10.0,
    grid: int = 129,
    annulus_resolution: tuple[int, int] = (65, 96),
) -> SlabSpec:
    """Flat slab of height pi sqrt(1+4 tau^2) - |tau| pi - epsilon in the
    cylinder model, swept by translated rotational catenoids.

    The neck parameter is root-found so the catenoid half-height exceeds
    (pi/2) sqrt(1+4 tau^2) - epsilon/4, and the truncation radius places the
    boundary circles halfway between the slab top and the attainable height.
    """
    tau = sp.tau
    root = math.sqrt(1.0 + 4.0 * tau * tau)
    eps_max = math.pi * root - 2.0 * abs(tau) * math.pi
    if not 0.0 < epsilon < eps_max:
        raise FeasibilityError(
            f"epsilon must lie in (0, {eps_max}) = (0, pi sqrt(1+4 tau^2) - 2|tau| pi), "
            f"got {epsilon}"
        )
    height = math.pi * root - abs(tau) * math.pi - epsilon
    half = 0.5 * height
    target = 0.5 * math.pi * root - 0.25 * epsilon
    d = _solve_catenoid_half_height(tau, target)
    spec = CatenoidSpec(tau=tau, d=d)
    half_height = 0.5 * catenoid_height(spec)
    boundary_height = 0.5 * (half + half_height)
    rho_boundary = catenoid_profile_inverse(spec, boundary_height)

    domain = disc_window_domain(window_radius, grid)
    lower = GraphFunction.constant(domain, tau, -half)
    upper = GraphFunction.constant(domain, tau, half)
    generator = CatenoidAnnulusGenerator(
        tau=tau,
        d=d,
        rho_boundary=rho_boundary,
        fiber_center=_ConstantFiberCenter(0.0),
        resolution=annulus_resolution,
    )
    chain_left = 0.5 * math.pi * root - abs(tau) * math.pi - 0.5 * epsilon
    metadata = {
        "construction": "example1",
        "tau": tau,
        "epsilon": epsilon,
        "height": height,
        "half_height": half,
        "d": d,
        "catenoid_half_height": half_height,
        "boundary_height": boundary_height,
        "rho_boundary": rho_boundary,
        "window_radius": window_radius,
        "height_chain_ok": chain_left < half_height - abs(tau) * math.pi,
    }
    return SlabSpec(lower=lower, upper=upper, annulus_generator=generator, metadata=metadata)


@dataclass(frozen=True)
class _LinearHeight:
    alpha: float
    beta: float

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.alpha * x + self.beta * y


@dataclass(frozen=True)
class _SineIntegralHeight:
    """Si(y) normalized to vanish at the reference fiber y = 1."""

    offset: float

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        si, _ = sici(y)
        return si - self.offset


def build_example2(
    sp: SpaceParams,
    graph_choice: str,
    r: float,
    h: float,
    C: float,
    alpha: float = 0.4,
    beta: float = 0.0,
    window_radius: float = 10.0,
    grid: int = 129,
    margin: float = 0.3,
    annulus_resolution: tuple[int, int] = (65, 96),
) -> SlabSpec:
    """Slab between vertical translates of a gradient-bounded entire graph.

    The Douglas criterion 2 C r < h < (cosh r - 1)/sinh r certifies the
    least-area annulus over every r-ball; the sweeping family itself uses a
    truncated catenoid whose boundary circles clear both translates.  The
    translate offset is (h + V)/2 for window variation V, and infeasible
    parameter triples raise with the violated inequality.
    """
    tau = sp.tau
    if graph_choice not in ("linear", "si"):
        raise ParameterError(f"graph choice must be 'linear' or 'si', got {graph_choice!r}")
    if not (r > 0.0 and h > 0.0 and C > 0.0):
        raise ParameterError("r, h, C must be positive")
    douglas_bound = (math.cosh(r) - 1.0) / math.sinh(r)
    if not 2.0 * C * r < h:
        raise FeasibilityError(f"need 2 C r < h: 2 C r = {2.0 * C * r} >= h = {h}")
    if not h < douglas_bound:
        raise FeasibilityError(
            f"need h < (cosh r - 1)/sinh r = {douglas_bound}: got h = {h}"
        )
    gradient_cap = (math.cosh(r) - 1.0) / (2.0 * r * math.sinh(r))
    if not C < gradient_cap:
        raise FeasibilityError(
            f"need C < (cosh r - 1)/(2 r sinh r) = {gradient_cap}: got C = {C}"
        )

    if graph_choice == "linear":
        domain = disc_window_domain(window_radius, grid)
        height_fn = _LinearHeight(alpha, beta)
    else:
        domain = halfplane_window_domain((0.0, 1.0), window_radius, grid)
        si_ref, _ = sici(1.0)
        height_fn = _SineIntegralHeight(float(si_ref))

    base_graph = GraphFunction.from_base_callable(domain, tau, height_fn)
    active = domain.active_mask()
    sup_gradient = float(np.max(hyperbolic_gradient_norm(base_graph)[active]))
    if sup_gradient > C + 1e-12:
        raise FeasibilityError(
            f"gradient bound violated on the window: sup |grad u| = {sup_gradient} > C = {C}"
        )

    values = base_graph.values
    variation = float(np.max(values[active]) - np.min(values[active]))
    h_prime = 0.5 * (h + variation)
    sup_height = float(np.max(np.abs(values[active])))
    boundary_height = h_prime + sup_height + margin
    limit = 0.5 * math.pi * math.sqrt(1.0 + 4.0 * tau * tau)
    if boundary_height >= limit - 1e-3:
        raise FeasibilityError(
            f"annulus boundary height {boundary_height} unreachable (catenoid limit {limit})"
        )
    target = 0.5 * (boundary_height + limit)
    d = _solve_catenoid_half_height(tau, target)
    spec = CatenoidSpec(tau=tau, d=d)
    rho_boundary = catenoid_profile_inverse(spec, boundary_height)

    lower = GraphFunction(domain, values - h_prime, tau)
    upper = GraphFunction(domain, values + h_prime, tau)
    generator = CatenoidAnnulusGenerator(
        tau=tau,
        d=d,
        rho_boundary=rho_boundary,
        fiber_center=_ConstantFiberCenter(0.0),
        resolution=annulus_resolution,
    )
    douglas = douglas_check(r, h)
    metadata = {
        "construction": "example2",
        "graph": graph_choice,
        "tau": tau,
        "r": r,
        "h": h,
        "C": C,
        "alpha": alpha,
        "beta": beta,
        "sup_gradient": sup_gradient,
        "variation": variation,
        "h_prime": h_prime,
        "boundary_height": boundary_height,
        "d": d,
        "rho_boundary": rho_boundary,
        "window_radius": window_radius,
        "douglas_threshold": douglas.threshold_half_height,
        "douglas_annulus_wins": douglas.annulus_wins,
    }
    return SlabSpec(lower=lower, upper=upper, annulus_generator=generator, metadata=metadata)


# -- sampling and negative controls ----------------------------------------------


def sample_interior_points(
    slab: SlabSpec, count: int, seed: int = 0, radial_fraction: float = 0.8
) -> list[AmbientPoint]:
    """Seeded points strictly between the graphs, inside the sampled window."""
    if count < 1:
        raise ParameterError("need at least one sample point")
    rng = np.random.default_rng(seed)
    domain = slab.lower.domain
    model = domain.model
    lower_interp = _graph_interpolator(slab.lower)
    upper_interp = _graph_interpolator(slab.upper)
    radius = float(slab.metadata.get("window_radius", 10.0))
    points: list[AmbientPoint] = []
    while len(points) < count:
        rho = radial_fraction * radius * math.sqrt(rng.uniform())
        angle = rng.uniform(0.0, 2.0 * math.pi)
        if model is Model.CYLINDER:
            rc = math.tanh(0.5 * rho)
            x, y = rc * math.cos(angle), rc * math.sin(angle)
        else:
            # Hyperbolic circle around (0, 1): Euclidean center (0, cosh rho).
            x = math.sinh(rho) * math.cos(angle)
            y = math.cosh(rho) + math.sinh(rho) * math.sin(angle)
        if not _point_in_window(domain, x, y):
            continue
        lo = _heights_at(lower_interp, np.array(x), np.array(y)).item()
        hi = _heights_at(upper_interp, np.array(x), np.array(y)).item()
        t = lo + (0.1 + 0.8 * rng.uniform()) * (hi - lo)
        points.append(AmbientPoint(BasePoint(model, x, y), t))
    return points


def with_shrunken_annuli(slab: SlabSpec, factor: float = 0.6) -> SlabSpec:
    """Negative control: truncate the annuli inside the slab so the boundary
    escape fails."""
    gen = slab.annulus_generator
    if not isinstance(gen, CatenoidAnnulusGenerator):
        raise ParameterError("shrinking is defined for catenoid annulus generators")
    if not 0.0 < factor < 1.0:
        raise ParameterError("shrink factor must lie in (0, 1)")
    half = float(slab.metadata.get("half_height", slab.metadata.get("h_prime", 0.0)))
    if half <= 0.0:
        raise ParameterError("slab metadata does not record a usable half-height")
    spec = CatenoidSpec(tau=gen.tau, d=gen.d)
    rho_small = catenoid_profile_inverse(spec, factor * half)
    shrunken = replace(gen, rho_boundary=rho_small)
    metadata = dict(slab.metadata)
    metadata["negative_control"] = f"annuli shrunken to {factor} of the half-height"
    return SlabSpec(
        lower=slab.lower,
        upper=slab.upper,
        annulus_generator=shrunken,
        metadata=metadata,
    )


def with_overlapping_graphs(slab: SlabSpec) -> SlabSpec:
    """Negative control: collapse the slab by using the lower graph twice."""
    metadata = dict(slab.metadata)
    metadata["negative_control"] = "upper graph replaced by the lower graph"
    return SlabSpec(
        lower=slab.lower,
        upper=slab.lower,
        annulus_generator=slab.annulus_generator,
        metadata=metadata,
    )


# -- separation probe -------------------------------------------------------------


@dataclass(frozen=True)
class SeparationReport:
    verdict: str
    positive_components: int
    negative_components: int
    positive_count: int
    negative_count: int
    interface_components: int


def graph_separation_probe(graph: GraphFunction, leaf: LeafSpec) -> SeparationReport:
    """Classify graph nodes by the leaf's side function and count components.

    Verdicts: 'two_components' when each side forms a single connected
    region, 'no_intersection' when the leaf misses the sampled window, and
    'inconclusive' otherwise (resolution too coarse for the interface).
    """
    domain = graph.domain
    tau = graph.tau
    if leaf.tau != tau:
        raise ParameterError("graph and leaf must share the bundle curvature")
    x, y = domain.base_grids()
    t = graph.values
    if domain.model is not Model.HALF_SPACE:
        x, y, t = convert_coords_arrays(domain.model, tau, x, y, t)
    axis_inv = inverse(axis_translation_isometry(leaf.s, tau))
    labels = np.zeros(domain.shape, dtype=int)
    for i in range(domain.shape[0]):
        for j in range(domain.shape[1]):
            p = AmbientPoint(BasePoint(Model.HALF_SPACE, float(x[i, j]), float(y[i, j])), float(t[i, j]))
            labels[i, j] = _leaf_side_pulled(p, leaf.d, leaf.s, tau, leaf.scale, axis_inv)
    active = domain.active_mask()
    labels = np.where(active, labels, 0)

    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    _, pos_n = _ndimage_label(labels > 0, structure=structure)
    _, neg_n = _ndimage_label(labels < 0, structure=structure)
    pos_count = int(np.sum(labels > 0))
    neg_count = int(np.sum(labels < 0))

    cells = (
        (labels[:-1, :-1] > 0) | (labels[1:, :-1] > 0) | (labels[:-1, 1:] > 0) | (labels[1:, 1:] > 0)
    ) & (
        (labels[:-1, :-1] < 0) | (labels[1:, :-1] < 0) | (labels[:-1, 1:] < 0) | (labels[1:, 1:] < 0)
    )
    _, interface_n = _ndimage_label(cells, structure=np.ones((3, 3), dtype=int))

    if pos_count == 0 or neg_count == 0:
        verdict = "no_intersection"
    elif pos_n == 1 and neg_n == 1:
        verdict = "two_components"
    else:
        verdict = "inconclusive"
    return SeparationReport(
        verdict=verdict,
        positive_components=int(pos_n),
        negative_components=int(neg_n),
        positive_count=pos_count,
        negative_count=neg_count,
        interface_components=int(interface_n),
    )


# -- serialization ------------------------------------------------------------------


def slab_spec_descriptor(
    spec: SlabSpec, lower_path: str | None = None, upper_path: str | None = None
) -> dict:
    """JSON-ready description of a slab: window, generator, and graph references."""
    domain = spec.lower.domain
    gen = spec.annulus_generator
    descriptor: dict = {
        "chart": domain.chart.name,
        "bounds": [list(domain.bounds[0]), list(domain.bounds[1])],
        "shape": list(domain.shape),
        "tau": spec.lower.tau,
        "metadata": dict(spec.metadata),
    }
    if isinstance(gen, CatenoidAnnulusGenerator):
        descriptor["generator"] = {
            "kind": "translated_catenoid",
            "d": gen.d,
            "rho_boundary": gen.rho_boundary,
            "resolution": list(gen.resolution),
        }
    if lower_path is not None:
        descriptor["lower_csv"] = lower_path
    if upper_path is not None:
        descriptor["upper_csv"] = upper_path
    return descriptor


def slab_report_to_json(report: SlabReport) -> dict:
    return {
        "height_bound": report.height_bound,
        "normal_bound": report.normal_bound,
        "disjoint": report.disjoint,
        "spectra_deviation": report.spectra_deviation,
        "spectra_ok": report.spectra_ok,
        "pass": report.passed,
        "annulus_checks": [
            {
                "point": {
                    "model": c.point.model.name,
                    "x": c.point.x,
                    "y": c.point.y,
                    "t": c.point.t,
                },
                "contains_point": c.contains_point,
                "boundary_above": c.boundary_above,
                "boundary_below": c.boundary_below,
                "distance": c.distance,
                "above_margin": c.above_margin,
                "below_margin": c.below_margin,
            }
            for c in report.annulus_checks
        ],
        "metadata": report.metadata,
    }
