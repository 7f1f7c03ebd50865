"""Equivariant moment n-tuples for n-dimensional point distributions.

Derives integer coefficient sets turning moment monomials into vectors
that rotate and reflect exactly like points of the underlying
distribution, then uses them to classify global symmetry (point, planar,
axial), to locate mirror planes and rotation axes, and to recover the
orthogonal transform between two poses of the same object.
"""

from .derivation import (
    ConstraintSystem,
    TupleDefinition,
    assemble_constraints,
    derive_tuples,
    derive_tuples_cached,
    evaluate_tuple,
    exact_nullspace,
    largest_principal_angle,
    load_tuples,
    nullspace_contains,
    save_tuples,
    verify_equivariance,
)
from .errors import AmbiguityError, DegenerateInputError, StateError, TupleFileError
from .estimation import (
    MODE_ALLOW_REFLECTION,
    MODE_ROTATION_ONLY,
    OrthogonalEstimate,
    alignment_residual,
    canonical_reflection,
    estimate_orthogonal,
    estimate_reflection_composition,
)
from .generators import (
    BasisSpec,
    GeneratorId,
    MomentOperator,
    MonomialBasis,
    MonomialOperator,
    build_monomial_basis,
    build_monomial_operator,
    evaluate_monomials,
    generator_matrix,
    generators_for_dimension,
    moment_rotation_generator,
    plane_rotation,
)
from .moments import (
    DensityImage,
    MomentVector,
    MultiIndex,
    PointCloud,
    center_cloud,
    compute_central_moments,
    compute_raw_moments,
    enumerate_multi_indices,
    gravity_center,
    image_to_cloud,
    multi_index_count,
    normalize_scale,
)
from .pipeline import analyze_cloud, battery_definitions, tuple_set_of_cloud
from .refinement import (
    CandidatePlane,
    NeighborIndex,
    RefinementConfig,
    RefinementResult,
    build_neighbor_index,
    refine_planes,
    reflection_residual,
)
from .symmetry import (
    CLASS_ASYMMETRIC,
    CLASS_AXIAL,
    CLASS_PLANAR,
    CLASS_POINT,
    SymmetryReport,
    Thresholds,
    TupleSet,
    classify_symmetry,
    default_battery,
    evaluate_tuple_set,
    reflect_moments,
    reflection_parity,
    symmetry_axis,
    symmetry_plane,
)

__version__ = "0.1.0"
