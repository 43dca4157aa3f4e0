"""Flat umbilical surfaces in products of space forms.

Build the two hyperbolic families, extract their extrinsic geometry through
the flat embedding of the product, and verify the structure equations,
curvature identities and Frenet data of the factor curves.
"""

from .errors import (
    CheckError,
    ConfigError,
    CurvatureError,
    DegenerateCurveError,
    DegenerateFrameError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    GeometryError,
    ImmersionError,
    InvalidFrameError,
    ModuliError,
    RegimeError,
    SignatureError,
)
from .families import (
    Example1Params,
    Example2Params,
    Family,
    build_example1,
    build_example2,
    build_family,
    closed_form_H,
    mean_curvature_norm_sq,
    predicted_curve_invariants,
)
from .frenet import frenet_at, frenet_generic, frenet_null, split_product_curves, summarize_curve
from .metric import CausalType, Signature, causal_type, orthonormalize_against, project_tangent
from .product import (
    GridSpec,
    ProductSpaceForm,
    SurfaceGrid,
    fundamental_equation_residuals,
    geometry_at,
    membership_residual,
    pointwise_geometry,
    tensor_identity_residuals,
    umbilicity_residual,
)
from .verification import CheckSpec, VerificationReport, cross_orthogonality_check, run_suite

__version__ = "0.1.0"
