"""Rising factorials and the multivariate gamma function."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from ..errors import DomainError


def rising_factorial(a: float, k: int) -> float:
    """``(a)_k = a (a + 1) ... (a + k - 1)``, with ``(a)_0 = 1``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def partitional_rising(a: float, kappa: Sequence[int], m: int | None = None) -> float:
    """Partitional rising factorial ``prod_j (a - (j - 1)/2)_{k_j}``."""
    parts = [int(p) for p in kappa]
    if m is not None and sum(1 for p in parts if p) > m:
        raise ValueError(f"{tuple(parts)} has more than {m} parts")
    out = 1.0
    for j, kj in enumerate(parts):
        out *= rising_factorial(a - j / 2.0, kj)
    return out


def multivariate_log_gamma(m: int, beta: float) -> float:
    """``log Gamma_m(beta)`` for real ``beta > (m - 1)/2``."""
    if m < 1 or int(m) != m:
        raise ValueError("m must be a positive integer")
    if not beta > (m - 1) / 2.0:
        raise DomainError(f"multivariate gamma needs beta > (m-1)/2 = {(m - 1) / 2}, got {beta}")
    j = np.arange(m)
    return m * (m - 1) / 4.0 * math.log(math.pi) + float(np.sum(gammaln(beta - j / 2.0)))


def log_rising_table(a: float, rows: int, max_len: int) -> tuple[np.ndarray, np.ndarray]:
    """Signed log-magnitude tables of ``(a - j/2)_t`` for ``j < rows``, ``t <= max_len``.

    Returns ``(logabs, sign)`` of shape ``(rows, max_len + 1)``; a vanishing
    factorial has ``sign == 0`` and ``logabs == -inf``.
    """
    t = np.arange(max_len)
    shifted = a - np.arange(rows)[:, None] / 2.0 + t[None, :]
    logabs = np.zeros((rows, max_len + 1))
    sign = np.ones((rows, max_len + 1))
    with np.errstate(divide="ignore"):
        logabs[:, 1:] = np.cumsum(np.log(np.abs(shifted)), axis=1)
    sign[:, 1:] = np.cumprod(np.sign(shifted), axis=1)
    return logabs, sign
