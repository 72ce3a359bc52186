"""Wishart model, its moment-generating function, and closed-form moments of
principal minors.

For ``X ~ W_p(alpha, Sigma)`` split into blocks ``X11`` (``p1 x p1``) and
``X22`` (``p2 x p2``)::

    E|X11|^nu1 |X22|^nu2 = E|X11|^nu1 * E|X22|^nu2 * 2F1(-nu1, -nu2; alpha/2; P P^T)

with ``A = Sigma^{-1}/2`` and ``P = A11^{-1/2} A12 A22^{-1/2}``.  The tilted
version multiplies the integrand by ``etr(T X) |X|^nu0`` and reduces to the
same formula for ``W_p(alpha + 2 nu0, (Sigma^{-1} - 2T)^{-1})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError, NotPositiveDefinite
from .hyperfun.series import DEFAULT_MAX_DEGREE, DEFAULT_TOL, HypergeomResult, gauss_2f1
from .hyperfun.special import multivariate_log_gamma
from .linalg import (
    BlockSplit,
    SpdMatrix,
    SymMatrix,
    blocks,
    logdet,
    spd_inv_sqrt,
    spd_inverse,
    swap_blocks,
    sym_eigen,
)


@dataclass(frozen=True)
class WishartModel:
    """``W_p(alpha, sigma)`` with the first ``split.p1`` coordinates forming block 1."""

    alpha: float
    sigma: SpdMatrix
    split: BlockSplit

    def __post_init__(self):
        try:
            sigma = self.sigma if isinstance(self.sigma, SpdMatrix) else SpdMatrix(self.sigma)
        except NotPositiveDefinite as exc:
            raise DomainError(f"sigma is not positive definite: {exc}") from exc
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "alpha", float(self.alpha))
        if sigma.dim != self.split.p:
            raise DomainError(f"sigma is {sigma.dim}x{sigma.dim} but the split needs p = {self.split.p}")
        if not self.alpha > self.p - 1:
            raise DomainError(f"alpha must exceed p - 1 = {self.p - 1}, got {self.alpha}")

    @classmethod
    def from_blocks(cls, alpha: float, sigma: Any, p1: int) -> "WishartModel":
        sigma = SymMatrix(sigma)
        return cls(alpha, sigma, BlockSplit(p1, sigma.dim - p1))

    @property
    def p(self) -> int:
        return self.split.p

    def block(self, i: int) -> np.ndarray:
        s11, _, _, s22 = blocks(self.sigma.entries, self.split)
        if i == 1:
            return s11
        if i == 2:
            return s22
        raise ValueError(f"block must be 1 or 2, not {i!r}")

    def swapped(self) -> "WishartModel":
        """Same law with the two diagonal blocks exchanged."""
        return WishartModel(self.alpha, SpdMatrix(swap_blocks(self.sigma.entries, self.split)), self.split.swapped)

    def tilted(self, tilt: Any, nu0: float) -> "WishartModel":
        """``W_p(alpha + 2 nu0, (Sigma^{-1} - 2T)^{-1})``."""
        precision = _tilted_precision(self, tilt)
        return WishartModel(self.alpha + 2.0 * nu0, spd_inverse(precision), self.split)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "sigma": self.sigma.to_json(), "p1": self.split.p1}

    @classmethod
    def from_json(cls, obj: dict) -> "WishartModel":
        missing = {"alpha", "sigma", "p1"} - set(obj)
        if missing:
            raise ValueError(f"model descriptor lacks {sorted(missing)}")
        sigma = obj["sigma"]
        sigma = SymMatrix.from_json(sigma) if isinstance(sigma, dict) else SymMatrix(sigma)
        return cls.from_blocks(float(obj["alpha"]), sigma, int(obj["p1"]))


@dataclass(frozen=True)
class MomentQuery:
    """Exponents and tilt of ``E{etr(T X) |X|^nu0 |X11|^nu1 |X22|^nu2}``."""

    nu0: float = 0.0
    nu1: float = 0.0
    nu2: float = 0.0
    tilt: SymMatrix | None = None

    def __post_init__(self):
        for name in ("nu0", "nu1", "nu2"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.tilt is not None and not isinstance(self.tilt, SymMatrix):
            object.__setattr__(self, "tilt", SymMatrix(self.tilt))

    def tilt_matrix(self, p: int) -> np.ndarray:
        if self.tilt is None:
            return np.zeros((p, p))
        if self.tilt.dim != p:
            raise DomainError(f"tilt is {self.tilt.dim}x{self.tilt.dim}, model has p = {p}")
        return self.tilt.entries

    def validate(self, model: WishartModel) -> None:
        """Raise :class:`DomainError` naming the first violated range."""
        a, p1, p2 = model.alpha, model.split.p1, model.split.p2
        _tilted_precision(model, self.tilt_matrix(model.p))
        bound0 = -a / 2 + (model.p - 1) / 2
        if not self.nu0 > bound0:
            raise DomainError(f"nu0 must exceed -alpha/2 + (p-1)/2 = {bound0:g}, got {self.nu0:g}")
        bound1 = -a / 2 - self.nu0 + (p1 - 1) / 2
        if not self.nu1 > bound1:
            raise DomainError(f"nu1 must exceed -alpha/2 - nu0 + (p1-1)/2 = {bound1:g}, got {self.nu1:g}")
        bound2 = -a / 2 - self.nu0 + (p2 - 1) / 2
        if not self.nu2 > bound2:
            raise DomainError(f"nu2 must exceed -alpha/2 - nu0 + (p2-1)/2 = {bound2:g}, got {self.nu2:g}")

    def to_json(self) -> dict:
        return {
            "nu0": self.nu0,
            "nu1": self.nu1,
            "nu2": self.nu2,
            "tilt": None if self.tilt is None else self.tilt.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MomentQuery":
        tilt = obj.get("tilt")
        if isinstance(tilt, dict):
            tilt = SymMatrix.from_json(tilt)
        return cls(obj.get("nu0", 0.0), obj.get("nu1", 0.0), obj.get("nu2", 0.0), tilt)


@dataclass(frozen=True)
class CouplingData:
    a_mat: SpdMatrix
    p_mat: np.ndarray
    ppt_eigenvalues: np.ndarray


@dataclass(frozen=True)
class MomentFactors:
    """Factors of the tilted closed form; ``value`` is their product."""

    mgf: float
    det_moment_inv: float
    minor1: float
    minor2: float
    f21: HypergeomResult

    @property
    def value(self) -> float:
        return self.mgf * self.det_moment_inv * self.minor1 * self.minor2 * self.f21.value

    def as_dict(self) -> dict:
        return {
            "mgf": self.mgf,
            "det_moment_inv": self.det_moment_inv,
            "minor1": self.minor1,
            "minor2": self.minor2,
            "f21": self.f21.value,
        }


def _tilted_precision(model: WishartModel, tilt: Any) -> SpdMatrix:
    precision = spd_inverse(model.sigma).entries
    t = np.zeros_like(precision) if tilt is None else np.asarray(SymMatrix(tilt).entries)
    if t.shape != precision.shape:
        raise DomainError(f"tilt has shape {t.shape}, model has p = {model.p}")
    try:
        return SpdMatrix(precision - 2.0 * t)
    except NotPositiveDefinite as exc:
        raise DomainError(f"Sigma^-1 - 2T is not positive definite: {exc}") from exc


def log_mgf(model: WishartModel, t: Any = None) -> float:
    """``log E etr(T X) = -alpha/2 log|I - 2 T Sigma|``."""
    if t is None or not np.any(np.asarray(SymMatrix(t).entries)):
        return 0.0
    precision = _tilted_precision(model, t)
    # |I - 2T Sigma| = |Sigma| |Sigma^{-1} - 2T|
    return -model.alpha / 2.0 * (logdet(model.sigma) + logdet(precision))


def mgf(model: WishartModel, t: Any = None) -> float:
    return math.exp(log_mgf(model, t))


def coupling(model: WishartModel, t: Any = None) -> CouplingData:
    """``A_T = Sigma^{-1}/2 - T`` and ``P_T = (A_T)11^{-1/2} (A_T)12 (A_T)22^{-1/2}``."""
    a_mat = SpdMatrix(_tilted_precision(model, t).entries / 2.0)
    a11, a12, _, a22 = blocks(a_mat.entries, model.split)
    p_mat = spd_inv_sqrt(a11).entries @ a12 @ spd_inv_sqrt(a22).entries
    w, _ = sym_eigen(SymMatrix(p_mat @ p_mat.T))
    w = np.clip(w, 0.0, None)
    return CouplingData(a_mat, p_mat, w)


def log_block_minor_moment(alpha: float, block: Any, nu: float) -> float:
    """``log E|X_ii|^nu = nu log|2 Sigma_ii| + log Gamma_q(alpha/2 + nu) - log Gamma_q(alpha/2)``."""
    b = SymMatrix(block)
    q = b.dim
    bound = -alpha / 2 + (q - 1) / 2
    if not nu > bound:
        raise DomainError(f"exponent must exceed -alpha/2 + ({q}-1)/2 = {bound:g}, got {nu:g}")
    if nu == 0:
        return 0.0
    return (
        nu * (q * math.log(2.0) + logdet(b))
        + multivariate_log_gamma(q, alpha / 2 + nu)
        - multivariate_log_gamma(q, alpha / 2)
    )


def minor_moment(model: WishartModel, block: int, nu: float) -> float:
    """``E|X_ii|^nu`` for ``block`` 1 or 2."""
    return math.exp(log_block_minor_moment(model.alpha, model.block(block), nu))


def det_moment(model: WishartModel, nu: float) -> float:
    """``E|X|^nu``."""
    return math.exp(log_block_minor_moment(model.alpha, model.sigma, nu))


def moment_factors(
    model: WishartModel,
    q: MomentQuery,
    tol: float = DEFAULT_TOL,
    max_degree: int = DEFAULT_MAX_DEGREE,
    method: str = "auto",
) -> MomentFactors:
    """Closed-form factors of ``E{etr(T X) |X|^nu0 |X11|^nu1 |X22|^nu2}``.

    When ``p1 > p2`` the hypergeometric argument is taken on the smaller
    block (blocks exchanged internally); the value is unchanged.
    """
    q.validate(model)
    tilt = q.tilt_matrix(model.p)
    if not np.any(tilt) and q.nu0 == 0:
        tilted = model
        log_m = 0.0
        log_d = 0.0
    else:
        tilted = model.tilted(tilt, q.nu0)
        log_m = log_mgf(model, tilt)
        log_d = -log_block_minor_moment(tilted.alpha, tilted.sigma, -q.nu0)
    log1 = log_block_minor_moment(tilted.alpha, tilted.block(1), q.nu1)
    log2 = log_block_minor_moment(tilted.alpha, tilted.block(2), q.nu2)
    if model.split.p1 > model.split.p2:
        data = coupling(tilted.swapped())
        a, b = -q.nu2, -q.nu1
    else:
        data = coupling(tilted)
        a, b = -q.nu1, -q.nu2
    f21 = gauss_2f1(a, b, tilted.alpha / 2.0, data.ppt_eigenvalues, tol, max_degree, method)
    return MomentFactors(math.exp(log_m), math.exp(log_d), math.exp(log1), math.exp(log2), f21)


def generalized_moment(
    model: WishartModel,
    q: MomentQuery,
    tol: float = DEFAULT_TOL,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> tuple[float, HypergeomResult]:
    """``E{etr(T X) |X|^nu0 |X11|^nu1 |X22|^nu2}`` and the 2F1 diagnostics."""
    factors = moment_factors(model, q, tol, max_degree)
    return factors.value, factors.f21


def product_moment(
    model: WishartModel,
    nu1: float,
    nu2: float,
    tol: float = DEFAULT_TOL,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> tuple[float, HypergeomResult]:
    """``E(|X11|^nu1 |X22|^nu2)`` and the 2F1 diagnostics."""
    return generalized_moment(model, MomentQuery(0.0, nu1, nu2), tol, max_degree)
