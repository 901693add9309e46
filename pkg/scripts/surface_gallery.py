"""Mesh the canonical surfaces over a small parameter sweep and export OBJ files.

Usage: python3 scripts/surface_gallery.py [--out-dir gallery] [--tau 0.5]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from etau import (
    CatenoidSpec,
    InvariantSurfaceSpec,
    LeafSpec,
    catenoid_neck_radius,
    leaf_mesh,
    mesh_catenoid,
    mesh_invariant_surface,
)
from etau.meshio import nu_sidecar_path, write_nu_csv, write_obj


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("gallery"))
    ap.add_argument("--tau", type=float, default=0.5)
    ap.add_argument("--resolution", type=int, default=97)
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    index = []
    res = (args.resolution, args.resolution - 1)
    for d in (1.0, 2.0, 4.0):
        spec = CatenoidSpec(args.tau, d)
        mesh = mesh_catenoid(spec, catenoid_neck_radius(spec) + 2.0, res)
        path = args.out_dir / f"catenoid_d{d:g}.obj"
        write_obj(path, mesh)
        write_nu_csv(nu_sidecar_path(path), mesh)
        index.append({"kind": "catenoid", "d": d, "file": path.name, "vertices": len(mesh.vertices)})
    for d in (1.2, 1.5, 3.0):
        mesh = mesh_invariant_surface(InvariantSurfaceSpec(args.tau, d), (-2.0, 2.0), res)
        path = args.out_dir / f"invariant_d{d:g}.obj"
        write_obj(path, mesh)
        write_nu_csv(nu_sidecar_path(path), mesh)
        index.append({"kind": "invariant", "d": d, "file": path.name, "vertices": len(mesh.vertices)})
    for scale in (0.5, 1.0, 2.0):
        mesh = leaf_mesh(LeafSpec(args.tau, 1.3, 1.0, scale), (-2.0, 2.0), res)
        path = args.out_dir / f"leaf_scale{scale:g}.obj"
        write_obj(path, mesh)
        write_nu_csv(nu_sidecar_path(path), mesh)
        index.append({"kind": "leaf", "scale": scale, "file": path.name, "vertices": len(mesh.vertices)})
    (args.out_dir / "index.json").write_text(json.dumps(index, indent=2) + "\n")
    print(f"wrote {len(index)} meshes to {args.out_dir}/")


if __name__ == "__main__":
    main()
