"""Serialization: OBJ meshes, CSV curves and grids, JSON reports.

Formats are deliberately plain so that external tools can consume them:
OBJ uses only ``v``/``f`` records, every CSV carries a header row, and
graph grids prepend a single ``#``-prefixed JSON line with the chart
metadata needed to rebuild the domain.  JSON reports embed a schema
version and are serialized with sorted keys so identical inputs yield
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import ParameterError
from .graphs import Chart, GraphDomain, GraphFunction
from .lifts import LiftedCurve
from .surfaces import SurfaceMesh

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "write_obj",
    "write_nu_csv",
    "nu_sidecar_path",
    "write_profile_csv",
    "write_lift_csv",
    "write_graph_csv",
    "read_graph_csv",
    "json_report",
    "write_json_report",
]


def write_obj(path: str | Path, mesh: SurfaceMesh) -> Path:
    """Write a triangulated mesh as ASCII OBJ (v/f records only)."""
    path = Path(path)
    lines = [
        f"v {float(x)!r} {float(y)!r} {float(t)!r}"
        for x, y, t in np.asarray(mesh.vertices, float)
    ]
    for a, b, c in np.asarray(mesh.triangles, int):
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    path.write_text("\n".join(lines) + "\n")
    return path


def nu_sidecar_path(obj_path: str | Path) -> Path:
    obj_path = Path(obj_path)
    return obj_path.with_name(obj_path.stem + "_nu.csv")


def write_nu_csv(path: str | Path, mesh: SurfaceMesh) -> Path:
    """Per-vertex angle function; vertex indices match the OBJ (1-based)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex", "x", "y", "t", "nu"])
        for i, ((x, y, t), nu) in enumerate(zip(mesh.vertices, mesh.nu), start=1):
            writer.writerow([i, repr(float(x)), repr(float(y)), repr(float(t)), repr(float(nu))])
    return path


def write_profile_csv(path: str | Path, parameter_label: str, parameter, values) -> Path:
    path = Path(path)
    parameter = np.asarray(parameter, float)
    values = np.asarray(values, float)
    if parameter.shape != values.shape:
        raise ParameterError("profile parameter and values must have matching shapes")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([parameter_label, "value"])
        for p, v in zip(parameter, values):
            writer.writerow([repr(float(p)), repr(float(v))])
    return path


def write_lift_csv(path: str | Path, lifted: LiftedCurve) -> Path:
    path = Path(path)
    coords = lifted.coords()
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameter", "x", "y", "t"])
        for p, (x, y, t) in zip(lifted.curve.params, coords):
            writer.writerow([repr(float(p)), repr(float(x)), repr(float(y)), repr(float(t))])
    return path


def write_graph_csv(path: str | Path, gf: GraphFunction) -> Path:
    """Grid dump with one node per row; a JSON comment line carries the domain."""
    path = Path(path)
    dom = gf.domain
    header = {
        "model": dom.model.value,
        "chart": dom.chart.value,
        "bounds": [list(map(float, b)) for b in dom.bounds],
        "shape": list(dom.shape),
        "axis_foot": float(dom.axis_foot),
        "tau": float(gf.tau),
    }
    q1, q2 = dom.node_grids()
    active = dom.active_mask()
    with path.open("w", newline="") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "q1", "q2", "value", "active"])
        n1, n2 = dom.shape
        for i in range(n1):
            for j in range(n2):
                writer.writerow(
                    [
                        i,
                        j,
                        repr(float(q1[i, j])),
                        repr(float(q2[i, j])),
                        repr(float(gf.values[i, j])),
                        int(active[i, j]),
                    ]
                )
    return path


def read_graph_csv(path: str | Path) -> GraphFunction:
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ParameterError(f"{path} is missing the JSON metadata line")
        header = json.loads(first[1:])
        rows = list(csv.DictReader(fh))
    shape = tuple(int(n) for n in header["shape"])
    values = np.full(shape, math.nan)
    mask = np.zeros(shape, dtype=bool)
    for row in rows:
        i, j = int(row["i"]), int(row["j"])
        values[i, j] = float(row["value"])
        mask[i, j] = bool(int(row["active"]))
    if np.any(np.isnan(values)):
        raise ParameterError(f"{path} does not cover the full {shape} grid")
    domain = GraphDomain(
        chart=Chart(header["chart"]),
        bounds=tuple(tuple(b) for b in header["bounds"]),
        shape=shape,
        axis_foot=float(header.get("axis_foot", 1.0)),
        mask=None if mask.all() else mask,
    )
    return GraphFunction(domain, values, float(header["tau"]))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def json_report(payload: dict) -> str:
    """Serialize a report with the schema version; keys sorted for stable bytes."""
    body = {"schema_version": SCHEMA_VERSION}
    body.update(_jsonable(payload))
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def write_json_report(payload: dict, path: str | Path | None = None) -> str:
    text = json_report(payload)
    if path is not None:
        Path(path).write_text(text)
    return text
