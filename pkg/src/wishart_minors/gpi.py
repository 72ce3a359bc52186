"""Product-inequality bounds for two Wishart minors and a Monte Carlo probe
for more than two blocks.

For ``a, b >= 0`` and ``M`` with ``0 < M < I``::

    2F1(-a, -b; c; M) >= 1 + |I - M|^{c+a+b} (0F1(c; ab M) - 1) >= 1

With ``a, b`` the minor exponents and ``M = P P^T`` this bounds the product
moment from below by the product of the marginal moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import DomainError
from .hyperfun.series import DEFAULT_MAX_DEGREE, DEFAULT_TOL, gauss_2f1, hypergeom_eigs
from .linalg import SpdMatrix, SymMatrix, sym_eigen
from .mc import McConfig, McEstimate, _check_product, estimate_general_product
from .wishart import MomentQuery, WishartModel, coupling, log_block_minor_moment, moment_factors

#: relative slack tolerated before the chain counts as violated
CHAIN_RTOL = 1e-12


class ContractionMatrix:
    """Symmetric ``M`` with ``M`` and ``I - M`` positive definite."""

    __slots__ = ("matrix", "eigenvalues")

    def __init__(self, m: Any):
        self.matrix = m if isinstance(m, SymMatrix) else SymMatrix(m)
        w, _ = sym_eigen(self.matrix)
        if not (w.min() > 0.0 and w.max() < 1.0):
            raise DomainError(f"eigenvalues must lie in (0, 1), got [{w.min():.6g}, {w.max():.6g}]")
        self.eigenvalues = w

    @property
    def dim(self) -> int:
        return self.matrix.dim


@dataclass(frozen=True)
class GpiReport:
    lhs: float
    middle: float
    slack_upper: float
    slack_lower: float

    def holds(self, rtol: float = CHAIN_RTOL) -> bool:
        """Whether ``lhs >= middle >= 1`` up to relative slack ``rtol``."""
        return self.slack_upper >= -rtol * abs(self.lhs) and self.slack_lower >= -rtol * abs(self.middle)

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "middle": self.middle,
            "slack_upper": self.slack_upper,
            "slack_lower": self.slack_lower,
        }


@dataclass(frozen=True)
class WishartGpiResult:
    """The expectation, the middle bound and the product of marginal factors."""

    expectation: float
    middle_bound: float
    product_bound: float
    report: GpiReport

    def to_json(self) -> dict:
        return {
            "expectation": self.expectation,
            "middle_bound": self.middle_bound,
            "product_bound": self.product_bound,
            **self.report.to_json(),
        }


def _bound_from_eigs(a: float, b: float, c: float, x: np.ndarray, tol: float, max_degree: int) -> GpiReport:
    lhs = gauss_2f1(-a, -b, c, x, tol, max_degree).value
    if a * b == 0.0 or not np.any(x):
        excess = 0.0
    else:
        f01 = hypergeom_eigs((), (c,), a * b * x, tol, max_degree).value
        excess = math.exp((c + a + b) * float(np.sum(np.log1p(-x)))) * (f01 - 1.0)
    middle = 1.0 + excess
    return GpiReport(lhs, middle, lhs - middle, excess)


def hypergeom_bound(
    a: float,
    b: float,
    c: float,
    M: ContractionMatrix | Any,
    tol: float = DEFAULT_TOL,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> GpiReport:
    """Both sides of ``2F1(-a, -b; c; M) >= 1 + |I-M|^{c+a+b}(0F1(c; abM) - 1) >= 1``."""
    M = M if isinstance(M, ContractionMatrix) else ContractionMatrix(M)
    if not (a >= 0 and b >= 0):
        raise DomainError(f"a and b must be non-negative, got a = {a}, b = {b}")
    if not c > (M.dim - 1) / 2:
        raise DomainError(f"c must exceed (m-1)/2 = {(M.dim - 1) / 2}, got {c}")
    return _bound_from_eigs(float(a), float(b), float(c), M.eigenvalues, tol, max_degree)


def wishart_gpi_bound(
    model: WishartModel,
    q: MomentQuery,
    tol: float = DEFAULT_TOL,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> WishartGpiResult:
    """Lower bounds on ``E{etr(T X) |X|^nu0 |X11|^nu1 |X22|^nu2}`` for ``nu1, nu2 >= 0``.

    ``M = P_T P_T^T`` may be singular here; the chain extends to it by
    continuity.
    """
    if not (q.nu1 >= 0 and q.nu2 >= 0):
        raise DomainError(f"nu1 and nu2 must be non-negative, got {q.nu1:g} and {q.nu2:g}")
    factors = moment_factors(model, q, tol, max_degree)
    tilted = model if (not np.any(q.tilt_matrix(model.p)) and q.nu0 == 0) else model.tilted(q.tilt_matrix(model.p), q.nu0)
    data = coupling(tilted.swapped() if model.split.p1 > model.split.p2 else tilted)
    report = _bound_from_eigs(q.nu1, q.nu2, tilted.alpha / 2, data.ppt_eigenvalues, tol, max_degree)
    base = factors.mgf * factors.det_moment_inv * factors.minor1 * factors.minor2
    return WishartGpiResult(base * report.lhs, base * report.middle, base, report)


@dataclass(frozen=True)
class ProbeReport:
    estimate: McEstimate
    marginal_product: float

    @property
    def gap(self) -> float:
        return self.estimate.mean - self.marginal_product

    @property
    def z_score(self) -> float:
        if self.estimate.std_error == 0.0:
            return 0.0 if self.gap == 0.0 else math.copysign(math.inf, self.gap)
        return self.gap / self.estimate.std_error

    def to_json(self) -> dict:
        return {
            "product_estimate": self.estimate.to_json(),
            "marginal_product": self.marginal_product,
            "gap": self.gap,
            "z_score": self.z_score,
        }


def marginal_product(alpha: float, sigma: Any, splits: Sequence[int], nus: Sequence[float]) -> float:
    """``prod_i E|X_ii|^nu_i`` from the closed-form minor moments."""
    sigma = sigma if isinstance(sigma, SpdMatrix) else SpdMatrix(SymMatrix(sigma).entries)
    splits = _check_product(float(alpha), sigma, splits, nus)
    edges = np.concatenate([[0], np.cumsum(splits)]).astype(int)
    s = sigma.entries
    total = 0.0
    for lo, hi, nu in zip(edges[:-1], edges[1:], nus):
        total += log_block_minor_moment(float(alpha), s[lo:hi, lo:hi], float(nu))
    return math.exp(total)


def conjecture_probe(
    alpha: float,
    sigma: Any,
    splits: Sequence[int],
    nus: Sequence[float],
    mc: McConfig,
) -> ProbeReport:
    """Compare a Monte Carlo estimate of ``E prod_i |X_ii|^nu_i`` with the product of marginals.

    A positive gap is what super-multiplicativity predicts.  The z-score is
    evidence only; a strongly negative value marks a case worth a closer look.
    """
    if any(nu < 0 for nu in nus):
        raise DomainError("exponents must be non-negative")
    exact = marginal_product(alpha, sigma, splits, nus)
    return ProbeReport(estimate_general_product(alpha, sigma, splits, nus, mc), exact)


@dataclass(frozen=True)
class FuzzSummary:
    draws: int
    violations: int
    worst_upper: float
    worst_lower: float
    seed: int

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "draws": self.draws,
            "violations": self.violations,
            "worst_relative_slack_upper": self.worst_upper,
            "worst_relative_slack_lower": self.worst_lower,
            "seed": self.seed,
        }


def random_contraction(m: int, rng: np.random.Generator, low: float = 1e-3, high: float = 0.99) -> ContractionMatrix:
    """``Q diag(w) Q^T`` with Haar-random ``Q`` and ``w`` uniform in ``[low, high]``."""
    w = rng.uniform(low, high, m)
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    q = q * np.sign(np.diag(r))
    return ContractionMatrix((q * w) @ q.T)


def fuzz_chain(
    draws: int,
    seed: int = 0,
    max_dim: int = 3,
    max_exponent: float = 5.0,
    max_c: float = 10.0,
    max_eigenvalue: float = 0.95,
    tol: float = DEFAULT_TOL,
    max_degree: int = DEFAULT_MAX_DEGREE,
    rtol: float = CHAIN_RTOL,
) -> FuzzSummary:
    """Check the bound chain on random ``(a, b, c, M)``.

    ``a, b`` are uniform on ``[0, max_exponent]``, ``c`` on
    ``((m-1)/2, max_c]`` and ``M`` comes from :func:`random_contraction`
    with eigenvalues up to ``max_eigenvalue``.  Closer to 1, small ``a, b, c``
    make the 2F1 series too slow for the default degree cap.
    """
    rng = np.random.default_rng(seed)
    violations = 0
    worst_upper = worst_lower = math.inf
    for _ in range(draws):
        m = int(rng.integers(1, max_dim + 1))
        M = random_contraction(m, rng, high=max_eigenvalue)
        a, b = rng.uniform(0.0, max_exponent, 2)
        lo = (m - 1) / 2
        c = max_c - rng.uniform(0.0, max_c - lo)  # in (lo, max_c]
        r = hypergeom_bound(a, b, c, M, tol, max_degree)
        worst_upper = min(worst_upper, r.slack_upper / abs(r.lhs))
        worst_lower = min(worst_lower, r.slack_lower / abs(r.middle))
        violations += not r.holds(rtol)
    return FuzzSummary(draws, violations, worst_upper, worst_lower, seed)
