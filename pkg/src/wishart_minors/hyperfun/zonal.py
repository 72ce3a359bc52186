"""Zonal polynomials evaluated on eigenvalues.

Normalisation: the zonal polynomials of degree ``k`` sum to ``(tr M)^k``.  They
are obtained from the monic Jack polynomials ``P_kappa`` at parameter 2 through

    C_kappa = 2^k k! / prod_{s in kappa} (2 (arm(s) + 1) + leg(s)) * P_kappa.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import _kernels
from .partitions import Partition, partition_table


def canonical_eigenvalues(eigenvalues: Sequence[float]) -> np.ndarray:
    """Eigenvalues sorted in decreasing order.

    Every evaluation goes through this ordering so that results are bitwise
    invariant under permutations of the input.
    """
    x = np.asarray(eigenvalues, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("eigenvalues must be finite")
    return np.sort(x)[::-1].copy()


def jack_p_table(x: np.ndarray, max_degree: int, specialised: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """``P_kappa(x)`` for every partition with ``<= len(x)`` parts and weight ``<= max_degree``.

    Returns ``(parts, values)`` with ``parts`` as produced by
    :func:`partition_table`.  ``x`` is used in the given order.  Two and three
    variables go through dedicated kernels unless ``specialised`` is False.
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64), np.ones(1)
    base = max_degree + 1
    if m * math.log(base) > 62 * math.log(2):
        raise ValueError(f"{m} variables at degree {max_degree} exceed the partition index range")
    F = _kernels.branching_tables(m, max_degree)
    G = np.exp(F)
    powers = [x[i] ** np.arange(max_degree + 1, dtype=float) for i in range(m)]
    vals = powers[0]
    prev_parts = partition_table(1, max_degree)
    n = 2
    if specialised and m >= 2:
        prev_parts = partition_table(2, max_degree)
        dense, _, _ = _kernels.make_index(prev_parts, base)
        vals = _kernels.level2(prev_parts, powers[0], powers[1], x[0] * x[1], dense, base, G[0])
        n = 3
        if m >= 3 and base**3 <= _kernels.DENSE_LIMIT:
            prev = np.zeros((base, base))
            prev[prev_parts[:, 0], prev_parts[:, 1]] = vals
            prev_parts = partition_table(3, max_degree)
            dense, _, _ = _kernels.make_index(prev_parts, base)
            vals = _kernels.level3(prev_parts, powers[2], float(np.prod(x[:3])), prev, dense, base,
                                   G[0], G[1], 1.0 / G[1])
            n = 4
    for n in range(n, m + 1):
        parts = partition_table(n, max_degree)
        vals = _kernels.branch_level(
            parts, powers[n - 1], float(np.prod(x[:n])), vals,
            *_kernels.make_index(prev_parts, base), *_kernels.make_index(parts, base), base, F,
        )
        prev_parts = parts
    return partition_table(m, max_degree), vals


def log_zonal_scale(parts: np.ndarray) -> np.ndarray:
    """``log(2^k / prod(2 (arm + 1) + leg))`` so that ``C/k! = exp(.) * P``."""
    if parts.shape[1] == 0:
        return np.zeros(parts.shape[0])
    max_degree = int(parts[:, 0].max()) if parts.size else 0
    H = _kernels.upper_hook_tables(parts.shape[1], max_degree)
    k = parts.sum(axis=1)
    return k * math.log(2.0) - _kernels.log_upper_hooks(parts, H)


def zonal(kappa: Sequence[int], eigenvalues: Sequence[float]) -> float:
    """Zonal polynomial ``C_kappa(M)`` from the eigenvalues of ``M``.

    Returns exactly 0.0 when ``kappa`` has more parts than there are
    eigenvalues.
    """
    kappa = Partition(kappa)
    x = canonical_eigenvalues(eigenvalues)
    m = x.shape[0]
    if len(kappa) > m:
        return 0.0
    k = kappa.weight
    parts, vals = jack_p_table(x, k)
    row = np.flatnonzero((parts == np.array(kappa.padded(m))).all(axis=1))[0]
    scale = log_zonal_scale(parts[row : row + 1])[0] + math.lgamma(k + 1)
    return float(math.exp(scale) * vals[row])
