"""Dense real symmetric matrix kernel.

Small dense matrices only (dimension up to a few dozen).  Everything here is a
pure function of its inputs; matrix objects are immutable once built and carry
read-only arrays, so they can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ConvergenceFailure, NotPositiveDefinite, SingularBlock

#: relative pivot tolerance of the positive-definiteness test
PIVOT_RTOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


class SymMatrix:
    """Real symmetric matrix.

    Input is symmetrised as ``(E + E.T) / 2`` so that matrices read back from
    JSON with rounding noise are accepted.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Any):
        if isinstance(entries, SymMatrix):
            entries = entries.entries
        a = np.atleast_2d(np.asarray(entries, dtype=float))
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        self._entries = _frozen((a + a.T) / 2.0)

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self._entries.tolist()!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    __hash__ = None  # type: ignore[assignment]

    def to_json(self) -> dict:
        return {"dim": self.dim, "rows": self._entries.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "SymMatrix":
        rows = obj["rows"]
        m = cls(rows)
        if "dim" in obj and int(obj["dim"]) != m.dim:
            raise ValueError(f"'dim' is {obj['dim']} but rows describe a {m.dim}x{m.dim} matrix")
        return m


class SpdMatrix(SymMatrix):
    """Symmetric positive definite matrix.

    The Cholesky factor and the eigendecomposition are computed once at
    construction; construction fails with :class:`NotPositiveDefinite` if the
    matrix is not positive definite.
    """

    __slots__ = ("_chol", "_eigvals", "_eigvecs")

    def __init__(self, entries: Any):
        super().__init__(entries)
        self._chol = _frozen(_cholesky(self._entries))
        w, v = _eigh(self._entries)
        if w[0] <= 0.0:
            raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3g} is not positive")
        self._eigvals = _frozen(w)
        self._eigvecs = _frozen(v)

    @property
    def chol(self) -> np.ndarray:
        return self._chol

    @property
    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        return self._eigvals, self._eigvecs


@dataclass(frozen=True)
class BlockSplit:
    """Partition of ``p = p1 + p2`` rows/columns into two diagonal blocks."""

    p1: int
    p2: int

    def __post_init__(self):
        if int(self.p1) != self.p1 or int(self.p2) != self.p2:
            raise ValueError("block sizes must be integers")
        if self.p1 < 1 or self.p2 < 1:
            raise ValueError(f"block sizes must be >= 1, got ({self.p1}, {self.p2})")

    @property
    def p(self) -> int:
        return self.p1 + self.p2

    @property
    def swapped(self) -> "BlockSplit":
        return BlockSplit(self.p2, self.p1)


def _cholesky(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    tol = PIVOT_RTOL * max(float(np.max(np.diag(a))), 0.0)
    L = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > tol:
            raise NotPositiveDefinite(f"Cholesky pivot {j} is {pivot:.3g} (tolerance {tol:.3g})")
        L[j, j] = np.sqrt(pivot)
        L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def _eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return w, v


def _as_array(m: Any) -> np.ndarray:
    if isinstance(m, SymMatrix):
        return m.entries
    return SymMatrix(m).entries


def as_spd(m: Any) -> SpdMatrix:
    return m if isinstance(m, SpdMatrix) else SpdMatrix(m)


def is_positive_definite(m: Any) -> bool:
    try:
        _cholesky(_as_array(m))
    except NotPositiveDefinite:
        return False
    return True


def cholesky(m: Any) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == m``.

    Raises :class:`NotPositiveDefinite` when a pivot falls below
    ``1e-12 * max(diag(m))``.
    """
    if isinstance(m, SpdMatrix):
        return m.chol
    return _cholesky(_as_array(m))


def sym_eigen(m: Any) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in ascending order and an orthonormal eigenbasis (columns)."""
    if isinstance(m, SpdMatrix):
        return m.eig
    return _eigh(_as_array(m))


def _spd_function(m: Any, power: float) -> SpdMatrix:
    w, v = sym_eigen(as_spd(m))
    return SpdMatrix((v * w**power) @ v.T)


def spd_sqrt(m: Any) -> SpdMatrix:
    """Principal (positive definite) square root."""
    return _spd_function(m, 0.5)


def spd_inv_sqrt(m: Any) -> SpdMatrix:
    """Inverse of the principal square root."""
    return _spd_function(m, -0.5)


def spd_inverse(m: Any) -> SpdMatrix:
    L = cholesky(as_spd(m))
    Linv = np.linalg.solve(L, np.eye(L.shape[0]))
    return SpdMatrix(Linv.T @ Linv)


def blocks(m: Any, split: BlockSplit) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(M11, M12, M21, M22)``."""
    a = np.asarray(m, dtype=float)
    if a.shape[0] != split.p:
        raise ValueError(f"split {split.p1}+{split.p2} does not match dimension {a.shape[0]}")
    k = split.p1
    return a[:k, :k], a[:k, k:], a[k:, :k], a[k:, k:]


def swap_blocks(m: Any, split: BlockSplit) -> np.ndarray:
    """Conjugate by the block permutation that exchanges the two diagonal blocks."""
    a = np.asarray(m, dtype=float)
    perm = np.r_[np.arange(split.p1, split.p), np.arange(split.p1)]
    return a[np.ix_(perm, perm)]


def _solve_block(pivot: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        if np.linalg.cond(pivot) > 1e14:
            raise SingularBlock("pivot block is numerically singular")
        return np.linalg.solve(pivot, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularBlock(str(exc)) from exc


def schur_complement(m: Any, split: BlockSplit, which: str = "over-22") -> SymMatrix:
    """``M/M22 = M11 - M12 M22^{-1} M21`` or ``M/M11 = M22 - M21 M11^{-1} M12``."""
    m11, m12, m21, m22 = blocks(_as_array(m), split)
    if which == "over-22":
        return SymMatrix(m11 - m12 @ _solve_block(m22, m21))
    if which == "over-11":
        return SymMatrix(m22 - m21 @ _solve_block(m11, m12))
    raise ValueError(f"which must be 'over-11' or 'over-22', not {which!r}")


def block_inverse(m: Any, split: BlockSplit, pivot: str = "22") -> SpdMatrix:
    """Inverse of a positive definite matrix assembled blockwise.

    ``pivot="22"`` inverts through ``M22`` and ``M/M22``; ``pivot="11"`` goes
    through ``M11`` and ``M/M11``.  The two assemblies are algebraically equal.
    """
    m = as_spd(m)
    m11, m12, m21, m22 = blocks(m.entries, split)
    if pivot == "22":
        s_inv = spd_inverse(schur_complement(m, split, "over-22")).entries
        m22_inv = spd_inverse(m22).entries
        upper = -s_inv @ m12 @ m22_inv
        lower = m22_inv + m22_inv @ m21 @ s_inv @ m12 @ m22_inv
        out = np.block([[s_inv, upper], [upper.T, lower]])
    elif pivot == "11":
        s_inv = spd_inverse(schur_complement(m, split, "over-11")).entries
        m11_inv = spd_inverse(m11).entries
        upper_left = m11_inv + m11_inv @ m12 @ s_inv @ m21 @ m11_inv
        upper = -m11_inv @ m12 @ s_inv
        out = np.block([[upper_left, upper], [upper.T, s_inv]])
    else:
        raise ValueError(f"pivot must be '11' or '22', not {pivot!r}")
    return SpdMatrix(out)


def logdet(m: Any) -> float:
    """``log |m|`` for positive definite ``m`` via the Cholesky diagonal."""
    return 2.0 * float(np.sum(np.log(np.diag(cholesky(m)))))


def spectral_norm(m: Any) -> float:
    w, _ = sym_eigen(m)
    return float(np.max(np.abs(w)))
