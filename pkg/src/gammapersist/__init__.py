"""Exact constructible sheaves on the line, their convolution distance, and
cone-adapted polyhedral topology in several variables."""

from .barcodes1d import Barcode, BarcodeMorphism, GradedBarcode, Interval, compose, hom_dim
from .cellular1d import (
    CriticalGrid,
    ZigzagModule,
    decompose,
    decompose_graded,
    dualize,
    from_barcode,
    gammafy,
    global_sections,
    sheaf_hom,
    tensor,
)
from .convolution1d import chi, convolve, distance_bounds, is_a_isomorphic, kernel
from .foundations import NEG_INF, POS_INF, DomainError, ExtRat, Field, Matrix, rat
from .gamma_geometry import (
    Cone,
    HalfSpace,
    HPolyhedron,
    gamma_predicates,
    minkowski_cone,
    minkowski_sum,
    omega_to_z,
    z_to_omega,
)
from .pipeline import (
    MeshFunction,
    PointCloud,
    SimplicialMesh,
    distance_function,
    pl_approximate,
    stability_experiment,
    sublevel_persistence,
)
from .stratify_nd import (
    Arrangement,
    BarcodeSheafND,
    Hyperplane,
    PLGammaSheafSpec,
    enumerate_cells,
    hom_dim_nd,
    stratify,
    validate_stratification,
)

__version__ = "0.1.0"

__all__ = [
    "Arrangement",
    "Barcode",
    "BarcodeMorphism",
    "BarcodeSheafND",
    "Cone",
    "CriticalGrid",
    "DomainError",
    "ExtRat",
    "Field",
    "GradedBarcode",
    "HPolyhedron",
    "HalfSpace",
    "Hyperplane",
    "Interval",
    "Matrix",
    "MeshFunction",
    "NEG_INF",
    "PLGammaSheafSpec",
    "POS_INF",
    "PointCloud",
    "SimplicialMesh",
    "ZigzagModule",
    "chi",
    "compose",
    "convolve",
    "decompose",
    "decompose_graded",
    "distance_bounds",
    "distance_function",
    "dualize",
    "enumerate_cells",
    "from_barcode",
    "gamma_predicates",
    "gammafy",
    "global_sections",
    "hom_dim",
    "hom_dim_nd",
    "is_a_isomorphic",
    "kernel",
    "minkowski_cone",
    "minkowski_sum",
    "omega_to_z",
    "pl_approximate",
    "rat",
    "sheaf_hom",
    "stability_experiment",
    "stratify",
    "sublevel_persistence",
    "tensor",
    "validate_stratification",
    "z_to_omega",
]
