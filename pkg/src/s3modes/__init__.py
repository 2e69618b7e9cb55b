"""Laplacian eigenmode bases on the three-sphere and its quotients.

Closed-form toroidal (B2) and null-power (B3) eigenfunction bases of each
eigenspace, exact transforms between them, the coefficient action of any
SO(4) rotation, and invariant eigenmodes with multiplicities for lens and
prism spherical space forms — all backed by independent quadrature and
finite-difference oracles (see ``s3modes.verify`` and the CLI).
"""

from .algebra import (
    ALPHA,
    ALPHA_BAR,
    BETA,
    DELTA,
    J,
    ComplexQuaternion,
    Quaternion,
    RootsOfUnity,
    Rotation,
    ToroidalPoint,
    jacobi_poly,
    null_vector,
    point_to_quaternion,
    quat_mul,
    quaternion_to_point,
    rotation_apply,
    rotation_compose,
    rotation_to_matrix,
    scalar_product,
)
from .bases import (
    CoeffMatrix,
    ModeB2,
    ModeB3,
    b2_from_b3_matrix,
    b3_from_b2_matrix,
    eval_b2,
    eval_b3,
    eval_b3_via_quaternions,
    eval_coherent,
    modes_b2,
    modes_b3,
    null_power_coeff,
    null_power_coeff_vector,
)
from .quad import (
    VOLUME,
    QuadratureRule,
    fd_laplacian,
    gram_matrix,
    harmonicity_residual,
    inner_product,
    integrate,
    make_rule,
    norm_sq,
    project_onto_level,
    rule_for_level,
)
from .quotients import (
    FiniteGroup,
    GroupSpec,
    InvariantSubspace,
    close_group,
    invariant_basis,
    invariant_projector,
    lens_modes,
    lens_rotation,
    multiplicity,
    prism_generators,
    prism_modes,
    prism_reference_count,
)
from .rotations import (
    RotationCoeffs,
    RotationScalars,
    act_on_coeffs,
    rotation_coeffs,
    rotation_coeffs_lstsq,
    rotation_scalars,
    to_b2_frame,
)
from .verify import run_verify

__version__ = "0.1.0"

__all__ = [
    "ALPHA",
    "ALPHA_BAR",
    "BETA",
    "DELTA",
    "J",
    "VOLUME",
    "CoeffMatrix",
    "ComplexQuaternion",
    "FiniteGroup",
    "GroupSpec",
    "InvariantSubspace",
    "ModeB2",
    "ModeB3",
    "QuadratureRule",
    "Quaternion",
    "RootsOfUnity",
    "Rotation",
    "RotationCoeffs",
    "RotationScalars",
    "ToroidalPoint",
    "act_on_coeffs",
    "b2_from_b3_matrix",
    "b3_from_b2_matrix",
    "close_group",
    "eval_b2",
    "eval_b3",
    "eval_b3_via_quaternions",
    "eval_coherent",
    "fd_laplacian",
    "gram_matrix",
    "harmonicity_residual",
    "inner_product",
    "integrate",
    "invariant_basis",
    "invariant_projector",
    "jacobi_poly",
    "lens_modes",
    "lens_rotation",
    "make_rule",
    "modes_b2",
    "modes_b3",
    "multiplicity",
    "norm_sq",
    "null_power_coeff",
    "null_power_coeff_vector",
    "null_vector",
    "point_to_quaternion",
    "prism_generators",
    "prism_modes",
    "prism_reference_count",
    "project_onto_level",
    "quat_mul",
    "quaternion_to_point",
    "rotation_apply",
    "rotation_coeffs",
    "rotation_coeffs_lstsq",
    "rotation_compose",
    "rotation_scalars",
    "rotation_to_matrix",
    "rule_for_level",
    "run_verify",
    "scalar_product",
    "to_b2_frame",
]
