"""Audit both slab constructions and their negative controls, printing a summary.

Usage: python3 scripts/slab_audit.py [--points 12] [--eps 0.1] [--seed 0]
"""

from __future__ import annotations

import argparse

from etau import (
    FeasibilityError,
    Model,
    SpaceParams,
    build_example1,
    build_example2,
    check_annulus_family,
    sample_interior_points,
    with_overlapping_graphs,
    with_shrunken_annuli,
)


def audit(label: str, slab, points, seed: int) -> None:
    report = check_annulus_family(slab, points, seed=seed)
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{label:28s} {status}  height_bound={report.height_bound:.4f} "
        f"normal_bound={report.normal_bound:.4f} disjoint={report.disjoint} "
        f"spectra_dev={report.spectra_deviation:.2e}"
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=12)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sp = SpaceParams(0.0, Model.CYLINDER)
    flat = build_example1(sp, args.eps)
    pts = sample_interior_points(flat, args.points, seed=args.seed)
    audit("example1 (flat slab)", flat, pts, args.seed)
    audit("example1 shrunken annuli", with_shrunken_annuli(flat), pts, args.seed)

    tilted = build_example2(sp, "linear", r=1.0, h=0.45, C=0.2)
    pts2 = sample_interior_points(tilted, args.points, seed=args.seed)
    audit("example2 (tilted graphs)", tilted, pts2, args.seed)
    overlap = with_overlapping_graphs(tilted)
    report = check_annulus_family(overlap, pts2, seed=args.seed)
    print(f"{'example2 overlapping':28s} {'FAIL' if not report.passed else 'PASS'}  disjoint={report.disjoint}")

    try:
        build_example2(sp, "si", r=1.0, h=0.45, C=0.2)
        print("example2 si variant          built (unexpected)")
    except FeasibilityError as exc:
        print(f"example2 si variant          infeasible: {exc}")


if __name__ == "__main__":
    main()
