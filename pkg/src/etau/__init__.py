"""Geometry, canonical minimal surfaces, and slab verification in E(-1, tau).

The package works in two coordinate models of the space (upper half-space
and cylinder over the disc), provides the ambient isometry group and
horizontal lifts, meshes the rotational catenoids and translation-invariant
surfaces, evaluates and solves the vertical-graph minimal-surface operator,
and audits generalized-slab constructions end to end.
"""

from .core import (
    AmbientPoint,
    BasePoint,
    ConvergenceError,
    FeasibilityError,
    GeometryError,
    InvalidPointError,
    Model,
    ModelMismatchError,
    ParameterError,
    SpaceParams,
    chord_length,
    conformal_factor,
    convert_model,
    distance_to_vertical_geodesic,
    frame_at,
    hyperbolic_distance,
    metric_at,
    polyline_length,
    project,
)
from .graphs import (
    Chart,
    DouglasReport,
    GraphDomain,
    GraphFunction,
    SolveResult,
    cylinder_area,
    disc_area,
    douglas_check,
    graph_area,
    graph_nu,
    hyperbolic_gradient_norm,
    mean_curvature,
    solve_dirichlet,
    variation,
)
from .isometries import (
    AmbientIsometry,
    apply,
    apply_to_coords,
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
    pullback_residual,
    rotation_isometry,
    scale_isometry,
    vertical_translation,
)
from .lifts import (
    LiftedCurve,
    PlanarCurve,
    horizontal_lift,
    horizontality_residuals,
    lift_geodesic_semicircle,
)
from .quadrature import adaptive_simpson, cumulative_simpson_table, elliptic_k
from .slabs import (
    AnnulusInstance,
    CatenoidAnnulusGenerator,
    SeparationReport,
    SlabReport,
    SlabSpec,
    build_example1,
    build_example2,
    check_annulus_family,
    check_bounding_graphs,
    disc_window_domain,
    edge_length_spectrum,
    graph_separation_probe,
    halfplane_window_domain,
    sample_interior_points,
    slab_report_to_json,
    slab_spec_descriptor,
    with_overlapping_graphs,
    with_shrunken_annuli,
)
from .surfaces import (
    CatenoidSpec,
    InvariantSurfaceSpec,
    LeafSpec,
    Sheet,
    SurfaceMesh,
    apply_isometry_to_mesh,
    catenoid_height,
    catenoid_neck_radius,
    catenoid_profile,
    catenoid_profile_inverse,
    convert_surface_to_cylinder,
    foliation_leaf_find,
    invariant_angle_max,
    invariant_asymptotic_levels,
    invariant_height,
    invariant_height_substituted,
    invariant_profile,
    leaf_mesh,
    leaf_side,
    mesh_catenoid,
    mesh_invariant_surface,
    transversality_delta,
    transversality_margin,
    transversality_window_check,
)

__version__ = "0.1.0"
