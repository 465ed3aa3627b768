"""Polar decompositions ``F = W S`` and ``F = S' W`` with respect to bilinear
and sesquilinear scalar products, built on generalized matrix sign functions.
"""

__version__ = "0.1.0"

from .core import (
    FormKind,
    ProductPair,
    ScalarProductSpace,
    Tolerances,
    adjoint_mn,
    adjoint_n,
    double_adjoint_holds,
    has_orthonormal_columns,
    has_orthonormal_rows,
    is_r_positive_definite,
    sharp,
)
from .eigenkernels import SchurForm, eigenvalues, reorder, schur, sylvester_triangular
from .errors import *  # noqa: F401,F403
from .matfunc import (
    SIGN1,
    SIGN2,
    SIGN3,
    SignFunctionSpec,
    SignKind,
    generalized_sign,
    principal_sqrt,
    stem_value,
)
from .polar import (
    CertificationReport,
    PolarFactors,
    Side,
    both_polar_square_two_products,
    certify,
    certify_both,
    left_polar_rect,
    left_polar_square,
    right_polar_rect,
    right_polar_square,
)
