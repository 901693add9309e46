"""Command-line front end: surfaces, verification suites, solver runs, slab audits.

Exit codes: 0 = all checks pass, 1 = invalid input, 2 = computational
failure or a failed check.  Every command emits a machine-readable JSON
report (stdout by default); reports carry no timestamps and all sampling
is seeded, so identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import meshio
from .core import (
    AmbientPoint,
    BasePoint,
    ConvergenceError,
    GeometryError,
    Model,
    SpaceParams,
)
from .graphs import (
    Chart,
    GraphDomain,
    GraphFunction,
    mean_curvature,
    solve_dirichlet,
)
from .isometries import (
    apply,
    axis_translation_isometry,
    conversion_pullback_residual,
    disc_point_isometry,
    halfplane_graph_isometry,
    pullback_residual,
    scale_isometry,
)
from .lifts import PlanarCurve, horizontal_lift, lift_geodesic_semicircle
from .quadrature import elliptic_k
from .slabs import (
    build_example1,
    build_example2,
    check_annulus_family,
    sample_interior_points,
    slab_report_to_json,
    slab_spec_descriptor,
)
from .surfaces import (
    CatenoidSpec,
    InvariantSurfaceSpec,
    LeafSpec,
    Sheet,
    catenoid_height,
    catenoid_neck_radius,
    catenoid_profile,
    foliation_leaf_find,
    invariant_angle_max,
    invariant_height,
    invariant_height_substituted,
    invariant_profile,
    leaf_mesh,
    mesh_catenoid,
    mesh_invariant_surface,
    transversality_delta,
    transversality_margin,
    transversality_window_check,
)

SUITES = ("limits", "isometries", "minimality", "lifts", "transversality", "foliation")


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors follow the exit-code contract (1, not 2)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        print(json.dumps({"status": "invalid_input", "message": message}))
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    common.add_argument("--config", type=str, default=None, help="JSON config file; flags override")
    common.add_argument("--out", type=str, default=None, help="output path (JSON report, or OBJ for surface)")

    parser = _Parser(prog="etau", description=__doc__, allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_surface = sub.add_parser("surface", parents=[common], allow_abbrev=False)
    p_surface.add_argument("kind", choices=("catenoid", "invariant", "leaf"))
    p_surface.add_argument("--tau", type=float, default=None)
    p_surface.add_argument("--d", type=float, default=None)
    p_surface.add_argument("--s", type=float, default=None)
    p_surface.add_argument("--scale", type=float, default=None)
    p_surface.add_argument("--rho-max", type=float, default=None)
    p_surface.add_argument("--phi-span", type=float, default=None)
    p_surface.add_argument("--rows", type=int, default=None)
    p_surface.add_argument("--cols", type=int, default=None)

    p_verify = sub.add_parser("verify", parents=[common], allow_abbrev=False)
    p_verify.add_argument("suite", choices=SUITES)
    p_verify.add_argument("--tau", type=float, default=None)
    p_verify.add_argument("--d", type=float, default=None)
    p_verify.add_argument("--s", type=float, default=None)
    p_verify.add_argument("--surface", choices=("catenoid", "invariant"), default=None)
    p_verify.add_argument("--points", type=int, default=None)

    p_solve = sub.add_parser("solve", parents=[common], allow_abbrev=False)
    p_solve.add_argument("--boundary", choices=("zero", "catenoid", "invariant", "wild"), default=None)
    p_solve.add_argument("--tau", type=float, default=None)
    p_solve.add_argument("--d", type=float, default=None)
    p_solve.add_argument("--s", type=float, default=None)
    p_solve.add_argument("--n", type=int, default=None)
    p_solve.add_argument("--max-newton", type=int, default=None)
    p_solve.add_argument("--csv-out", type=str, default=None)

    p_slab = sub.add_parser("slab", parents=[common], allow_abbrev=False)
    p_slab.add_argument("example", choices=("example1", "example2"))
    p_slab.add_argument("--tau", type=float, default=None)
    p_slab.add_argument("--eps", type=float, default=None)
    p_slab.add_argument("--r", type=float, default=None)
    p_slab.add_argument("--C", dest="grad_cap", type=float, default=None)
    p_slab.add_argument("--h", dest="h", type=float, default=None)
    p_slab.add_argument("--graph", choices=("linear", "si"), default=None)
    p_slab.add_argument("--alpha", type=float, default=None)
    p_slab.add_argument("--beta", type=float, default=None)
    p_slab.add_argument("--points", type=int, default=None)
    p_slab.add_argument("--window-radius", type=float, default=None)
    p_slab.add_argument("--grid", type=int, default=None)
    return parser


_DEFAULTS: dict[str, dict] = {
    "surface": {
        "seed": 0, "out": None, "tau": 0.0, "d": None, "s": 1.0, "scale": 1.0,
        "rho_max": None, "phi_span": 2.0, "rows": 129, "cols": 128,
    },
    "verify": {
        "seed": 0, "out": None, "tau": 0.0, "d": 1.5, "s": 1.0,
        "surface": "catenoid", "points": 200,
    },
    "solve": {
        "seed": 0, "out": None, "boundary": "zero", "tau": 0.0, "d": 2.0, "s": 1.0,
        "n": 33, "max_newton": None, "csv_out": None,
    },
    "slab": {
        "seed": 0, "out": None, "tau": 0.0, "eps": 0.1, "r": 1.0, "grad_cap": 0.2,
        "h": 0.45, "graph": "linear", "alpha": 0.4, "beta": 0.0, "points": 8,
        "window_radius": 10.0, "grid": 129,
    },
}


def merge_config(ns: argparse.Namespace) -> dict:
    """Layer hard defaults, then the JSON config file, then explicit flags."""
    cfg = dict(_DEFAULTS[ns.command])
    fixed = {"command", "kind", "suite", "example", "boundary", "config"}
    if ns.config is not None:
        loaded = json.loads(Path(ns.config).read_text())
        for key, value in loaded.items():
            if key not in cfg and key not in fixed:
                raise GeometryError(f"unknown config key {key!r} for command {ns.command!r}")
            cfg[key] = value
    for key, value in vars(ns).items():
        if key in ("config",):
            continue
        if key in cfg:
            if value is not None:
                cfg[key] = value
        else:
            cfg[key] = value
    return cfg


# -- surface ------------------------------------------------------------------


def cmd_surface(cfg: dict) -> tuple[dict, int]:
    kind = cfg["kind"]
    tau = float(cfg["tau"])
    if cfg["d"] is None:
        raise GeometryError("surface generation requires --d")
    d = float(cfg["d"])
    resolution = (int(cfg["rows"]), int(cfg["cols"]))
    if kind == "catenoid":
        spec = CatenoidSpec(tau, d)
        rho_max = cfg["rho_max"]
        rho_max = catenoid_neck_radius(spec) + 2.5 if rho_max is None else float(rho_max)
        mesh = mesh_catenoid(spec, rho_max, resolution)
    elif kind == "invariant":
        span = float(cfg["phi_span"])
        mesh = mesh_invariant_surface(
            InvariantSurfaceSpec(tau, d, float(cfg["s"])), (-span, span), resolution
        )
    else:
        span = float(cfg["phi_span"])
        mesh = leaf_mesh(
            LeafSpec(tau, d, float(cfg["s"]), float(cfg["scale"])), (-span, span), resolution
        )
    out = Path(cfg["out"] if cfg["out"] is not None else f"{kind}.obj")
    meshio.write_obj(out, mesh)
    sidecar = meshio.write_nu_csv(meshio.nu_sidecar_path(out), mesh)
    report = {
        "command": "surface",
        "kind": kind,
        "parameters": {k: cfg[k] for k in ("tau", "d", "s", "scale") if cfg[k] is not None},
        "files": [str(out), str(sidecar)],
        "vertices": int(len(mesh.vertices)),
        "triangles": int(len(mesh.triangles)),
        "nu_range": [float(np.min(mesh.nu)), float(np.max(mesh.nu))],
    }
    return report, 0


# -- verify -------------------------------------------------------------------


def _check(name: str, value: float, bound: float) -> dict:
    return {"name": name, "value": float(value), "bound": float(bound), "pass": bool(value < bound)}


def _suite_limits(cfg: dict) -> list[dict]:
    tau = float(cfg["tau"])
    checks = []
    for d in (1.1, 2.0, 10.0, 100.0):
        err = abs(invariant_height(d, 0.0) - elliptic_k(1.0 / d))
        checks.append(_check(f"elliptic_oracle_d_{d:g}", err, 1e-8))
    half_limit = 0.5 * math.pi * math.sqrt(1.0 + 4.0 * tau * tau)
    checks.append(_check("invariant_height_limit", abs(invariant_height(1e4, tau) - half_limit), 1e-3))
    checks.append(
        _check("catenoid_height_limit", abs(catenoid_height(CatenoidSpec(tau, 1e3)) - 2.0 * half_limit), 5e-2)
    )
    worst = 0.0
    for d in (1.5, 3.0, 8.0):
        for t in (0.0, 0.4, 1.0):
            worst = max(worst, abs(invariant_height(d, t) - invariant_height_substituted(d, t)))
    checks.append(_check("substitution_route", worst, 1e-8))
    return checks


def _halfspace_points(rng: np.random.Generator, n: int) -> list[AmbientPoint]:
    return [
        AmbientPoint(
            BasePoint(Model.HALF_SPACE, rng.uniform(-2.0, 2.0), rng.uniform(0.2, 3.0)),
            rng.uniform(-2.0, 2.0),
        )
        for _ in range(n)
    ]


def _cylinder_points(rng: np.random.Generator, n: int) -> list[AmbientPoint]:
    out = []
    for _ in range(n):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        radius = rng.uniform(0.0, 0.8)
        out.append(
            AmbientPoint(
                BasePoint(Model.CYLINDER, radius * math.cos(angle), radius * math.sin(angle)),
                rng.uniform(-2.0, 2.0),
            )
        )
    return out


def _suite_isometries(cfg: dict) -> list[dict]:
    tau = float(cfg["tau"])
    rng = np.random.default_rng(int(cfg["seed"]))
    per_family = max(int(cfg["points"]) // 5, 1)
    checks = []
    delta = 0.37

    def family_checks(name, make_iso, points):
        worst = fiber = 0.0
        for p in points:
            iso = make_iso()
            worst = max(worst, pullback_residual(iso, p))
            lifted = AmbientPoint(p.base, p.t + delta)
            fiber = max(fiber, abs((apply(iso, lifted).t - apply(iso, p).t) - delta))
        checks.append(_check(f"{name}_pullback", worst, 1e-9))
        checks.append(_check(f"{name}_fiber", fiber, 1e-12))

    half = _halfspace_points(rng, per_family)
    cyl = _cylinder_points(rng, per_family)
    conv_worst = 0.0
    for p in half + cyl:
        conv_worst = max(conv_worst, conversion_pullback_residual(p, tau))
    checks.append(_check("conversion_pullback", conv_worst, 1e-9))
    family_checks("scale", lambda: scale_isometry(rng.uniform(0.3, 3.0), tau), half)
    family_checks("axis_translation", lambda: axis_translation_isometry(rng.uniform(0.5, 2.0), tau), half)
    family_checks(
        "disc_point",
        lambda: disc_point_isometry(complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)), tau),
        cyl,
    )
    family_checks(
        "halfplane_graph",
        lambda: halfplane_graph_isometry(
            rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0), tau
        ),
        half,
    )
    return checks


def reference_problem(kind: str, tau: float, d: float, s: float, n: int):
    """Chart window and exact node values for a canonical minimal graph."""
    if kind == "catenoid":
        spec = CatenoidSpec(tau, d)
        rmin = catenoid_neck_radius(spec)
        domain = GraphDomain(Chart.DISC_POLAR, ((rmin + 0.3, rmin + 1.3), (0.2, 1.2)), (n, n))
        axis_rho, _ = domain.axes()
        profile = np.array([catenoid_profile(spec, rho) for rho in axis_rho])
        return GraphFunction(domain, np.tile(profile[:, None], (1, n)), tau)
    if kind == "invariant":
        spec = InvariantSurfaceSpec(tau, d, s, Sheet.PLUS)
        theta_hi = invariant_angle_max(d) - 0.25
        domain = GraphDomain(
            Chart.HALFPLANE_IDEAL_POLAR, ((-0.5, 0.5), (0.15, theta_hi)), (n, n), axis_foot=s
        )
        _, axis_theta = domain.axes()
        profile = np.array([invariant_profile(spec, theta) for theta in axis_theta])
        return GraphFunction(domain, np.tile(profile[None, :], (n, 1)), tau)
    raise GeometryError(f"no reference problem named {kind!r}")


def _suite_minimality(cfg: dict) -> list[dict]:
    kind = cfg["surface"]
    tau, d, s = float(cfg["tau"]), float(cfg["d"]), float(cfg["s"])
    sups = []
    for n in (33, 65, 129):
        sups.append(mean_curvature(reference_problem(kind, tau, d, s, n)).sup())
    orders = [math.log2(sups[i] / sups[i + 1]) for i in range(2)]
    checks = [_check("residual_sup_fine", sups[-1], 1e-3)]
    for i, order in enumerate(orders):
        checks.append(
            {
                "name": f"convergence_order_{i}",
                "value": float(order),
                "bound": [1.7, 2.3],
                "pass": bool(1.7 <= order <= 2.3),
            }
        )
    return checks


def _suite_lifts(cfg: dict) -> list[dict]:
    tau = float(cfg["tau"])
    closed = lift_geodesic_semicircle(0.5, 2.0, 0.3, math.pi - 0.3, tau, t_start=0.7)
    quad = horizontal_lift(closed.curve, tau, t_start=0.7)
    checks = [
        _check("semicircle_closed_form_vs_quadrature", float(np.max(np.abs(closed.t - quad.t))), 1e-10),
        _check("lift_variation_bound", quad.fiber_variation(), 2.0 * abs(tau) * math.pi + 1e-12),
    ]
    flat = horizontal_lift(PlanarCurve.geodesic_semicircle(0.0, 1.0, 0.4, 2.6), 0.0, t_start=0.2)
    checks.append(_check("tau_zero_constant", float(np.max(np.abs(flat.t - 0.2))), 1e-15))
    return checks


def _suite_transversality(cfg: dict) -> list[dict]:
    checks = []
    for eps, h0, tau in ((0.5, 1.0, 0.0), (0.5, 1.0, 0.5)):
        delta = transversality_delta(eps, h0, tau)
        margin = transversality_margin(delta, h0, tau)
        sup, ok = transversality_window_check(1.0 + 0.5 * delta, h0, eps, tau)
        label = f"eps_{eps:g}_h0_{h0:g}_tau_{tau:g}"
        checks.append(_check(f"closed_form_margin_{label}", margin, eps * eps))
        checks.append(
            {"name": f"window_sup_{label}", "value": float(sup), "bound": float(eps), "pass": bool(ok)}
        )
    return checks


def _suite_foliation(cfg: dict) -> list[dict]:
    tau, d, s = float(cfg["tau"]), float(cfg["d"]), float(cfg["s"])
    rng = np.random.default_rng(int(cfg["seed"]))
    count = min(int(cfg["points"]), 100)
    worst_res = worst_eqv = 0.0
    for _ in range(count):
        p = AmbientPoint(
            BasePoint(Model.HALF_SPACE, rng.uniform(-2.0, 2.0), rng.uniform(0.2, 2.5)),
            rng.uniform(-1.5, 1.5),
        )
        found = foliation_leaf_find(p, d, s, tau)
        worst_res = max(worst_res, found.residual)
        mu = rng.uniform(0.5, 2.0)
        moved = apply(scale_isometry(mu, tau), p)
        worst_eqv = max(
            worst_eqv, abs(foliation_leaf_find(moved, d, s, tau).scale - mu * found.scale)
        )
    return [
        _check("leaf_find_residual", worst_res, 1e-6),
        _check("scale_equivariance", worst_eqv, 1e-6),
    ]


_SUITE_RUNNERS = {
    "limits": _suite_limits,
    "isometries": _suite_isometries,
    "minimality": _suite_minimality,
    "lifts": _suite_lifts,
    "transversality": _suite_transversality,
    "foliation": _suite_foliation,
}


def cmd_verify(cfg: dict) -> tuple[dict, int]:
    checks = _SUITE_RUNNERS[cfg["suite"]](cfg)
    passed = all(c["pass"] for c in checks)
    report = {
        "command": "verify",
        "suite": cfg["suite"],
        "parameters": {k: cfg[k] for k in ("tau", "d", "s", "surface", "seed", "points")},
        "checks": checks,
        "passed": passed,
    }
    return report, 0 if passed else 2


# -- solve --------------------------------------------------------------------


def _solve_setup(cfg: dict):
    kind = cfg["boundary"]
    tau, d, s, n = float(cfg["tau"]), float(cfg["d"]), float(cfg["s"]), int(cfg["n"])
    if kind == "zero":
        domain = GraphDomain(Chart.DISC_XY, ((-0.4, 0.4), (-0.4, 0.4)), (n, n))
        exact = GraphFunction.constant(domain, tau, 0.0)
        return domain, exact.values, exact
    if kind in ("catenoid", "invariant"):
        exact = reference_problem(kind, tau, d, s, n)
        return exact.domain, exact.values, exact
    domain = GraphDomain(Chart.HALFPLANE_XY, ((-1.0, 1.0), (0.5, 1.5)), (n, n))
    x, y = domain.node_grids()
    return domain, 50.0 * np.sin(9.0 * x) / y, None


def cmd_solve(cfg: dict) -> tuple[dict, int]:
    domain, boundary_values, exact = _solve_setup(cfg)
    max_newton = cfg["max_newton"]
    if max_newton is None:
        max_newton = 6 if cfg["boundary"] == "wild" else 30
    result = solve_dirichlet(
        domain,
        float(cfg["tau"]),
        boundary_values,
        max_newton=int(max_newton),
    )
    report = {"command": "solve", "boundary": cfg["boundary"], "n": int(cfg["n"])}
    report.update(result.report)
    if exact is not None:
        report["sup_error_vs_exact"] = float(np.max(np.abs(result.graph.values - exact.values)))
    csv_out = cfg["csv_out"]
    if csv_out is not None:
        meshio.write_graph_csv(csv_out, result.graph)
        report["csv"] = str(csv_out)
    return report, 0 if result.report["converged"] else 2


# -- slab ---------------------------------------------------------------------


def cmd_slab(cfg: dict) -> tuple[dict, int]:
    sp = SpaceParams(float(cfg["tau"]), Model.CYLINDER)
    if cfg["example"] == "example1":
        slab = build_example1(
            sp, float(cfg["eps"]), window_radius=float(cfg["window_radius"]), grid=int(cfg["grid"])
        )
    else:
        slab = build_example2(
            sp,
            cfg["graph"],
            r=float(cfg["r"]),
            h=float(cfg["h"]),
            C=float(cfg["grad_cap"]),
            alpha=float(cfg["alpha"]),
            beta=float(cfg["beta"]),
            window_radius=float(cfg["window_radius"]),
            grid=int(cfg["grid"]),
        )
    points = sample_interior_points(slab, int(cfg["points"]), seed=int(cfg["seed"]))
    audit = check_annulus_family(slab, points, seed=int(cfg["seed"]))
    report = {
        "command": "slab",
        "example": cfg["example"],
        "spec": slab_spec_descriptor(slab),
        "report": slab_report_to_json(audit),
    }
    return report, 0 if audit.passed else 2


# -- entry point ----------------------------------------------------------------


_HANDLERS = {
    "surface": cmd_surface,
    "verify": cmd_verify,
    "solve": cmd_solve,
    "slab": cmd_slab,
}


def _emit(payload: dict, out: str | None, command: str) -> None:
    path = out if command != "surface" else None
    text = meshio.write_json_report(payload, path)
    if path is None:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = merge_config(ns)
    except (GeometryError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"status": "invalid_input", "message": str(exc)}))
        return 1
    try:
        report, code = _HANDLERS[ns.command](cfg)
    except ConvergenceError as exc:
        _emit({"status": "computational_failure", "message": str(exc)}, cfg.get("out"), ns.command)
        return 2
    except GeometryError as exc:
        _emit({"status": "invalid_input", "message": str(exc)}, cfg.get("out"), ns.command)
        return 1
    _emit(report, cfg.get("out"), ns.command)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
