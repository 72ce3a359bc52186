"""Integer partitions indexing zonal polynomials."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np


class Partition(tuple):
    """Weakly decreasing tuple of positive integers.

    Trailing zeros are dropped on construction, so ``Partition((2, 1, 0))``
    equals ``Partition((2, 1))``.  The empty partition is the partition of 0.
    """

    def __new__(cls, parts: Iterable[int] = ()):
        parts = [int(p) for p in parts]
        while parts and parts[-1] == 0:
            parts.pop()
        for i, p in enumerate(parts):
            if p < 1:
                raise ValueError(f"partition parts must be non-negative, got {parts}")
            if i and p > parts[i - 1]:
                raise ValueError(f"partition parts must be weakly decreasing, got {parts}")
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    def conjugate(self) -> "Partition":
        if not self:
            return self
        return Partition(sum(1 for p in self if p > j) for j in range(self[0]))

    def padded(self, m: int) -> tuple[int, ...]:
        if len(self) > m:
            raise ValueError(f"{tuple(self)} has more than {m} parts")
        return tuple(self) + (0,) * (m - len(self))

    def __repr__(self) -> str:
        return f"Partition({tuple(self)!r})"


def _descend(k: int, m: int, cap: int) -> Iterator[tuple[int, ...]]:
    if k == 0:
        yield ()
        return
    if m == 0:
        return
    for first in range(min(k, cap), 0, -1):
        for rest in _descend(k - first, m - 1, first):
            yield (first,) + rest


def partitions_of(k: int, max_parts: int) -> Iterator[Partition]:
    """Partitions of ``k`` with at most ``max_parts`` parts, reverse-lexicographic."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if max_parts < 1:
        raise ValueError("max_parts must be positive")
    for parts in _descend(k, max_parts, k):
        yield Partition(parts)


def count_partitions(k: int, max_parts: int) -> int:
    """Number of partitions of ``k`` into at most ``max_parts`` parts."""
    # p(k, m) = p(k, m - 1) + p(k - m, m)
    table = [[0] * (max_parts + 1) for _ in range(k + 1)]
    for m in range(max_parts + 1):
        table[0][m] = 1
    for n in range(1, k + 1):
        for m in range(1, max_parts + 1):
            table[n][m] = table[n][m - 1] + (table[n - m][m] if n >= m else 0)
    return table[k][max_parts]


@lru_cache(maxsize=32)
def partition_table(n: int, max_degree: int) -> np.ndarray:
    """All partitions with at most ``n`` parts and weight <= ``max_degree``.

    Rows are zero-padded to length ``n`` and sorted by weight, then
    reverse-lexicographically within a weight.  The returned array is
    read-only because it is cached.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        rows = np.arange(max_degree + 1, dtype=np.int64)[:, None]
    else:
        # prepend a first part >= the old first part to every shorter partition
        tail = partition_table(n - 1, max_degree)
        room = max_degree - tail.sum(axis=1) - tail[:, 0]
        keep = room >= 0
        tail, room = tail[keep], room[keep]
        counts = room + 1
        rep = np.repeat(np.arange(tail.shape[0]), counts)
        offset = np.arange(rep.shape[0]) - np.repeat(np.cumsum(counts) - counts, counts)
        rows = np.empty((rep.shape[0], n), dtype=np.int64)
        rows[:, 0] = tail[rep, 0] + offset
        rows[:, 1:] = tail[rep]
    weight = rows.sum(axis=1)
    order = np.lexsort(tuple(-rows[:, j] for j in range(n - 1, -1, -1)) + (weight,))
    out = np.ascontiguousarray(rows[order])
    out.setflags(write=False)
    return out
