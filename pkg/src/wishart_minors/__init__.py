"""Closed-form and Monte Carlo moments of principal minors of Wishart matrices."""

from .errors import (
    ConvergenceFailure,
    DomainError,
    NonFinite,
    NotConverged,
    NotPositiveDefinite,
    SingularBlock,
    WishartMinorsError,
)
from .gpi import ContractionMatrix, GpiReport, conjecture_probe, hypergeom_bound, wishart_gpi_bound
from .hyperfun import HypergeomParams, HypergeomResult, gauss_2f1, hypergeom_matrix, zonal
from .linalg import BlockSplit, SpdMatrix, SymMatrix
from .mc import McConfig, McEstimate, estimate_general_product, estimate_moment, sample_wishart
from .wishart import (
    MomentQuery,
    WishartModel,
    coupling,
    det_moment,
    generalized_moment,
    mgf,
    minor_moment,
    product_moment,
)

__version__ = "0.1.0"

__all__ = [
    "BlockSplit",
    "ContractionMatrix",
    "ConvergenceFailure",
    "DomainError",
    "GpiReport",
    "HypergeomParams",
    "HypergeomResult",
    "McConfig",
    "McEstimate",
    "MomentQuery",
    "NonFinite",
    "NotConverged",
    "NotPositiveDefinite",
    "SingularBlock",
    "SpdMatrix",
    "SymMatrix",
    "WishartMinorsError",
    "WishartModel",
    "conjecture_probe",
    "coupling",
    "det_moment",
    "estimate_general_product",
    "estimate_moment",
    "gauss_2f1",
    "generalized_moment",
    "hypergeom_bound",
    "hypergeom_matrix",
    "mgf",
    "minor_moment",
    "product_moment",
    "sample_wishart",
    "wishart_gpi_bound",
    "zonal",
]
