"""Truncated hypergeometric functions of matrix argument.

    pFq(a; b; M) = sum_k sum_{|kappa| = k} prod (a_i)_kappa / prod (b_j)_kappa * C_kappa(M) / k!

summed degree-layer by degree-layer on the eigenvalues of ``M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..errors import DomainError, NotConverged
from ..linalg import SymMatrix, sym_eigen
from .special import log_rising_table
from .zonal import canonical_eigenvalues, jack_p_table, log_zonal_scale

DEFAULT_TOL = 1e-12
DEFAULT_MAX_DEGREE = 200
#: spectral norm above which non-terminating 2F1/1F0 series are refused
NEAR_BOUNDARY = 0.999
_FIRST_DEGREE = 24


@dataclass(frozen=True)
class HypergeomParams:
    upper: tuple[float, ...] = ()
    lower: tuple[float, ...] = ()
    tolerance: float = DEFAULT_TOL
    max_degree: int = DEFAULT_MAX_DEGREE

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(float(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(float(b) for b in self.lower))
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if int(self.max_degree) != self.max_degree or self.max_degree < 1:
            raise ValueError("max_degree must be a positive integer")


@dataclass(frozen=True)
class HypergeomResult:
    value: float
    degree_reached: int
    last_layer_abs: float
    terminated_exactly: bool
    method: str = field(default="direct", compare=False)


def _nonpositive_integer(a: float) -> bool:
    return a <= 0 and float(a).is_integer()


def termination_degree(upper: Sequence[float], m: int) -> int | None:
    """Degree beyond which every term vanishes, if an upper parameter forces it.

    ``(-n)_kappa`` is zero as soon as the first part exceeds ``n``, so the
    series stops at weight ``m * n``.
    """
    bounds = [int(-a) for a in upper if _nonpositive_integer(a)]
    if not bounds:
        return None
    return m * min(bounds)


def check_lower(lower: Sequence[float], m: int) -> None:
    for b in lower:
        for j in range(m):
            if _nonpositive_integer(b - j / 2.0):
                raise DomainError(
                    f"lower parameter {b} makes (b)_kappa vanish (b - {j}/2 is a non-positive integer)"
                )


def _layers(upper, lower, x: np.ndarray, degree: int) -> np.ndarray:
    """Sum of the series terms of each weight ``0..degree``."""
    layers = np.zeros(degree + 1)
    m = x.shape[0]
    if m == 0:
        layers[0] = 1.0
        return layers
    scale = float(np.max(np.abs(x)))
    parts, pvals = jack_p_table(x / scale, degree)
    k = parts.sum(axis=1)
    logabs = log_zonal_scale(parts) + k * math.log(scale)
    sign = np.sign(pvals)
    with np.errstate(divide="ignore"):
        logabs = logabs + np.log(np.abs(pvals))
    rows = np.arange(m)
    for a in upper:
        la, sa = log_rising_table(a, m, degree)
        logabs = logabs + la[rows, parts].sum(axis=1)
        sign = sign * sa[rows, parts].prod(axis=1)
    for b in lower:
        lb, sb = log_rising_table(b, m, degree)
        logabs = logabs - lb[rows, parts].sum(axis=1)
        sign = sign * sb[rows, parts].prod(axis=1)
    live = sign != 0
    terms = np.zeros_like(logabs)
    terms[live] = sign[live] * np.exp(logabs[live])
    return np.bincount(k, weights=terms, minlength=degree + 1)


def hypergeom_eigs(
    upper: Sequence[float],
    lower: Sequence[float],
    eigenvalues: Sequence[float],
    tol: float = DEFAULT_TOL,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> HypergeomResult:
    """pFq evaluated from the eigenvalues of its (symmetric) argument."""
    upper = [float(a) for a in upper]
    lower = [float(b) for b in lower]
    x_all = canonical_eigenvalues(eigenvalues)
    m = x_all.shape[0]
    check_lower(lower, m)
    # zero eigenvalues do not contribute: P_kappa vanishes on them beyond the nonzero count
    x = x_all[x_all != 0.0]
    stop = termination_degree(upper, x.shape[0])
    if x.shape[0] == 0 or stop == 0:
        return HypergeomResult(1.0, 0, 0.0, True)
    norm = float(np.max(np.abs(x)))
    p, q = len(upper), len(lower)
    if stop is None or stop > max_degree:
        if p > q + 1:
            raise DomainError(f"{p}F{q} series diverges for a non-zero argument unless it terminates")
        if p == q + 1:
            if norm >= 1.0:
                raise DomainError(f"{p}F{q} needs spectral norm < 1, got {norm:.17g}")
            if norm > NEAR_BOUNDARY:
                raise NotConverged(f"spectral norm {norm:.6g} is too close to 1 for the series")
    if stop is not None and stop <= max_degree:
        layers = _layers(upper, lower, x, stop)
        return HypergeomResult(float(math.fsum(layers)), stop, abs(float(layers[-1])), True)

    degree = min(_FIRST_DEGREE, max_degree)
    while True:
        layers = _layers(upper, lower, x, degree)
        running = np.cumsum(layers)
        small = np.abs(layers) < tol * np.abs(running)
        hits = np.flatnonzero(small[1:] & small[:-1])
        if hits.size:
            k = int(hits[0]) + 1
            value = float(math.fsum(layers[: k + 1]))
            return HypergeomResult(value, k, abs(float(layers[k])), False)
        if degree >= max_degree:
            raise NotConverged(
                f"series not converged at degree {degree}: last layer {abs(layers[-1]):.3g}, "
                f"value {running[-1]:.17g}"
            )
        degree = min(2 * degree, max_degree)


def _eigs(M: Any) -> np.ndarray:
    if isinstance(M, SymMatrix):
        return sym_eigen(M)[0]
    a = np.asarray(M, dtype=float)
    if a.ndim <= 1:
        return a.reshape(-1)
    return sym_eigen(SymMatrix(a))[0]


def hypergeom_matrix(params: HypergeomParams, M: Any) -> HypergeomResult:
    """pFq(upper; lower; M) for a real symmetric matrix ``M``."""
    return hypergeom_eigs(params.upper, params.lower, _eigs(M), params.tolerance, params.max_degree)


def gauss_2f1(
    a: float,
    b: float,
    c: float,
    M: Any,
    tol: float = DEFAULT_TOL,
    max_degree: int = DEFAULT_MAX_DEGREE,
    method: str = "auto",
) -> HypergeomResult:
    """Gaussian hypergeometric function 2F1(a, b; c; M).

    ``method="direct"`` sums the defining series.  ``method="euler"`` sums
    ``|I - M|^{c-a-b} 2F1(c-a, c-b; c; M)`` instead.  ``"auto"`` takes the
    terminating direct series when ``a`` or ``b`` is a non-positive integer and
    otherwise the direct series as well; see the README for the trade-off.
    """
    x = _eigs(M)
    m = x.shape[0]
    if not c > (m - 1) / 2.0:
        raise DomainError(f"2F1 needs c > (m-1)/2 = {(m - 1) / 2}, got c = {c}")
    if method == "auto":
        method = "direct"
    if method == "direct":
        res = hypergeom_eigs((a, b), (c,), x, tol, max_degree)
        return HypergeomResult(res.value, res.degree_reached, res.last_layer_abs, res.terminated_exactly, "direct")
    if method == "euler":
        if np.max(np.abs(x)) >= 1.0:
            raise DomainError("Euler transformation needs spectral norm < 1")
        res = hypergeom_eigs((c - a, c - b), (c,), x, tol, max_degree)
        factor = math.exp((c - a - b) * float(np.sum(np.log1p(-x))))
        return HypergeomResult(
            factor * res.value, res.degree_reached, factor * res.last_layer_abs, res.terminated_exactly, "euler"
        )
    raise ValueError(f"unknown method {method!r}")
