"""Standard and box-regularized Christoffel functions for density estimation
and support inference."""

from .christoffel import (
    ChristoffelModel,
    JitterPolicy,
    NotPositiveDefinite,
    build,
    cd_kernel,
    christoffel_function,
    fit,
    lambda_inv,
    orthonormal_basis,
)
from .index import IndexSet, enumerate_indices, monomial_matrix, monomial_vector
from .measures import (
    Chebyshev1D,
    EmpiricalMeasure,
    LebesgueBox,
    MomentMatrix,
    ProductMeasure,
    SampleCloud,
    moment,
    moment_matrix,
    pushforward,
)
from .regularized import (
    BoxQuery,
    EmptyIntersection,
    ZeroWidth,
    box_avg_monomial,
    box_avg_vector,
    classify_support,
    density_estimate,
    density_estimate_boundary_corrected,
    lambda_tilde,
    lambda_tilde_inv,
    optimal_polynomial,
)

__version__ = "0.1.0"
