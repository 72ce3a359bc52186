"""Hypergeometric functions of matrix argument."""

from .partitions import Partition, count_partitions, partitions_of
from .series import HypergeomParams, HypergeomResult, gauss_2f1, hypergeom_eigs, hypergeom_matrix
from .special import multivariate_log_gamma, partitional_rising, rising_factorial
from .zonal import zonal

__all__ = [
    "HypergeomParams",
    "HypergeomResult",
    "Partition",
    "count_partitions",
    "gauss_2f1",
    "hypergeom_eigs",
    "hypergeom_matrix",
    "multivariate_log_gamma",
    "partitional_rising",
    "partitions_of",
    "rising_factorial",
    "zonal",
]
