"""Monte Carlo estimates of Wishart expectations.

Draws use the Bartlett decomposition ``X = L B B^T L^T`` (``Sigma = L L^T``,
``B`` lower triangular with ``B_jj^2 ~ chi2(alpha - j)`` for 0-based ``j`` and
standard normal entries below the diagonal), which is valid for any real
``alpha > p - 1``.

Samples are generated in fixed-size blocks.  Block ``b`` has its own PCG64
stream, obtained from the seed by ``b`` jumps, so the draws do not depend on
how blocks are grouped into shards.  Weights are evaluated in log space and
accumulated as ``(n, mean, M2)`` relative to a per-block max shift; blocks are
merged in order within a shard and shards are merged pairwise in a fixed tree.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NonFinite, NotPositiveDefinite
from .linalg import SpdMatrix, SymMatrix
from .wishart import MomentQuery, WishartModel

#: samples per RNG block; changing it changes every estimate
BLOCK_SIZE = 1 << 15


@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int = 0
    shards: int = 1
    workers: int = 1

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 2:
            raise ValueError("samples must be an integer >= 2")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.shards) != self.shards or self.shards < 1:
            raise ValueError("shards must be a positive integer")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValueError("workers must be a positive integer")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int
    seed: int
    resampled: int = 0

    def to_json(self) -> dict:
        return {"mean": self.mean, "se": self.std_error, "n": self.n, "seed": self.seed}


@dataclass(frozen=True)
class _Stats:
    """Streaming summary of ``w * exp(shift)``."""

    n: int
    mean: float
    m2: float
    shift: float
    resampled: int = 0

    @classmethod
    def of(cls, logw: np.ndarray, resampled: int = 0) -> "_Stats":
        if not np.all(np.isfinite(logw)):
            raise NonFinite("a per-sample log weight is not finite")
        shift = float(np.max(logw))
        w = np.exp(logw - shift)
        mean = float(np.mean(w))
        return cls(w.shape[0], mean, float(np.sum((w - mean) ** 2)), shift, resampled)

    def merge(self, other: "_Stats") -> "_Stats":
        shift = max(self.shift, other.shift)
        sa, sb = math.exp(self.shift - shift), math.exp(other.shift - shift)
        ma, mb = self.mean * sa, other.mean * sb
        n = self.n + other.n
        delta = mb - ma
        mean = ma + delta * other.n / n
        m2 = self.m2 * sa * sa + other.m2 * sb * sb + delta * delta * self.n * other.n / n
        return _Stats(n, mean, m2, shift, self.resampled + other.resampled)


def _tree_merge(stats: list[_Stats]) -> _Stats:
    while len(stats) > 1:
        merged = [stats[i].merge(stats[i + 1]) for i in range(0, len(stats) - 1, 2)]
        if len(stats) % 2:
            merged.append(stats[-1])
        stats = merged
    return stats[0]


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed).jumped(block))


def bartlett_factors(alpha: float, chol: np.ndarray, rng: np.random.Generator, size: int) -> tuple[np.ndarray, int]:
    """Lower-triangular ``C = L B`` for ``size`` draws, so that ``X = C C^T``.

    Returns the factors and the number of draws regenerated because a chi
    variate underflowed to zero.
    """
    p = chol.shape[0]
    z = np.tril(rng.standard_normal((size, p, p)), -1)
    df = alpha - np.arange(p)
    chi2 = rng.chisquare(df, size=(size, p))
    resampled = 0
    bad = np.flatnonzero(~(chi2 > 0).all(axis=1))
    while bad.size:
        resampled += bad.size
        chi2[bad] = rng.chisquare(df, size=(bad.size, p))
        bad = bad[~(chi2[bad] > 0).all(axis=1)]
    idx = np.arange(p)
    z[:, idx, idx] = np.sqrt(chi2)
    return np.matmul(chol, z), resampled


def sample_wishart(model: WishartModel, rng: np.random.Generator, size: int | None = None):
    """Draw from ``W_p(alpha, Sigma)``.

    Returns one :class:`SpdMatrix` when ``size`` is None, otherwise an array
    of shape ``(size, p, p)``.
    """
    if size is None:
        while True:
            c, _ = bartlett_factors(model.alpha, model.sigma.chol, rng, 1)
            try:
                return SpdMatrix(c[0] @ c[0].T)
            except NotPositiveDefinite:
                continue
    c, _ = bartlett_factors(model.alpha, model.sigma.chol, rng, size)
    return np.matmul(c, np.swapaxes(c, -1, -2))


def _chol_logdet(c: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """``log|X[lo:hi, lo:hi]|`` from lower-triangular factors ``C`` with ``X = C C^T``."""
    if lo == 0:
        d = np.abs(np.diagonal(c[:, :hi, :hi], axis1=1, axis2=2))
        return 2.0 * np.log(d).sum(axis=1)
    rows = c[:, lo:hi, :hi]
    sign, ld = np.linalg.slogdet(np.matmul(rows, np.swapaxes(rows, -1, -2)))
    return np.where(sign > 0, ld, -np.inf)


def _run(alpha: float, sigma: SpdMatrix, log_weight: Callable[[np.ndarray], np.ndarray], cfg: McConfig) -> McEstimate:
    chol = sigma.chol
    n_blocks = -(-cfg.samples // BLOCK_SIZE)
    shards = min(cfg.shards, n_blocks)
    bounds = [round(s * n_blocks / shards) for s in range(shards + 1)]

    def block_stats(b: int) -> _Stats:
        size = min(BLOCK_SIZE, cfg.samples - b * BLOCK_SIZE)
        c, resampled = bartlett_factors(alpha, chol, _block_rng(cfg.seed, b), size)
        return _Stats.of(log_weight(c), resampled)

    def shard_stats(s: int) -> _Stats:
        acc = block_stats(bounds[s])
        for b in range(bounds[s] + 1, bounds[s + 1]):
            acc = acc.merge(block_stats(b))
        return acc

    if cfg.workers > 1 and shards > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            per_shard = list(pool.map(shard_stats, range(shards)))
    else:
        per_shard = [shard_stats(s) for s in range(shards)]
    total = _tree_merge(per_shard)
    scale = math.exp(total.shift) if total.shift < 709.0 else math.inf
    mean = total.mean * scale
    se = math.sqrt(total.m2 / (total.n - 1) / total.n) * scale
    if not (math.isfinite(mean) and math.isfinite(se)):
        raise NonFinite(f"estimate overflows: log shift {total.shift:.6g}")
    return McEstimate(mean, se, total.n, cfg.seed, total.resampled)


def estimate_moment(model: WishartModel, q: MomentQuery, cfg: McConfig) -> McEstimate:
    """Estimate ``E{etr(T X) |X|^nu0 |X11|^nu1 |X22|^nu2}``."""
    q.validate(model)
    p, p1 = model.p, model.split.p1
    tilt = q.tilt_matrix(p)
    use_tilt = q.tilt is not None and bool(np.any(tilt))

    def log_weight(c: np.ndarray) -> np.ndarray:
        out = np.zeros(c.shape[0])
        if use_tilt:
            # tr(T C C^T) = sum((T C) * C)
            out += np.einsum("ij,njk,nik->n", tilt, c, c)
        if q.nu0:
            out += q.nu0 * _chol_logdet(c, 0, p)
        if q.nu1:
            out += q.nu1 * _chol_logdet(c, 0, p1)
        if q.nu2:
            out += q.nu2 * _chol_logdet(c, p1, p)
        return out

    return _run(model.alpha, model.sigma, log_weight, cfg)


def _check_product(alpha: float, sigma: SpdMatrix, splits: Sequence[int], nus: Sequence[float]) -> list[int]:
    splits = [int(s) for s in splits]
    if any(s < 1 for s in splits):
        raise DomainError("block sizes must be positive")
    if sum(splits) != sigma.dim:
        raise DomainError(f"block sizes {splits} do not add up to p = {sigma.dim}")
    if len(nus) != len(splits):
        raise DomainError("need one exponent per block")
    if not alpha > sigma.dim - 1:
        raise DomainError(f"alpha must exceed p - 1 = {sigma.dim - 1}, got {alpha}")
    for s, nu in zip(splits, nus):
        bound = -alpha / 2 + (s - 1) / 2
        if not nu > bound:
            raise DomainError(f"exponent {nu:g} for a block of size {s} must exceed {bound:g}")
    return splits


def estimate_general_product(
    alpha: float, sigma, splits: Sequence[int], nus: Sequence[float], cfg: McConfig
) -> McEstimate:
    """Estimate ``E prod_i |X_ii|^nu_i`` over consecutive diagonal blocks."""
    sigma = sigma if isinstance(sigma, SpdMatrix) else SpdMatrix(SymMatrix(sigma).entries)
    alpha = float(alpha)
    splits = _check_product(alpha, sigma, splits, nus)
    edges = np.concatenate([[0], np.cumsum(splits)]).astype(int)

    def log_weight(c: np.ndarray) -> np.ndarray:
        out = np.zeros(c.shape[0])
        for lo, hi, nu in zip(edges[:-1], edges[1:], nus):
            if nu:
                out += float(nu) * _chol_logdet(c, int(lo), int(hi))
        return out

    return _run(alpha, sigma, log_weight, cfg)
