"""Compiled kernels for evaluating Jack P-polynomials (parameter 2) on all
partitions up to a degree, one variable at a time.

Adding the variable ``x_n`` uses the branching rule

    P_lam(x_1..x_n) = sum_mu psi_{lam/mu} x_n^{|lam|-|mu|} P_mu(x_1..x_{n-1})

over ``mu`` interlacing ``lam`` (a horizontal strip).  With ``g_l(a) =
log((2a + l + 1) / (2a + l + 2))`` and its cumulative sum ``F_l``, the
coefficient collapses to

    log psi = sum_{i <= r} F_{r-i}(mu_i - lam_{r+1}) - F_{r-i}(mu_i - mu_r)
                         - F_{r-i}(lam_i - lam_{r+1}) + F_{r-i}(lam_i - mu_r)

(rows 0-based, ``r <= n - 2``).  Partitions with ``lam_n > 0`` are not
branched: ``P_lam = (x_1 ... x_n)^{lam_n} P_{lam - lam_n}`` in ``n`` variables.
"""

from __future__ import annotations

import numpy as np
from numba import njit

#: largest dense lookup table (entries) before falling back to binary search
DENSE_LIMIT = 1 << 24


def branching_tables(max_rows: int, max_degree: int) -> np.ndarray:
    """``F[l, A] = sum_{a < A} log((2a + l + 1) / (2a + l + 2))``."""
    a = np.arange(max_degree)[None, :]
    l = np.arange(max(max_rows, 1))[:, None]
    F = np.zeros((l.shape[0], max_degree + 1))
    F[:, 1:] = np.cumsum(np.log((2.0 * a + l + 1.0) / (2.0 * a + l + 2.0)), axis=1)
    return F


def upper_hook_tables(max_rows: int, max_degree: int) -> np.ndarray:
    """``H[l, A] = sum_{t=1..A} log(2t + l)``."""
    t = np.arange(1, max_degree + 1)[None, :]
    l = np.arange(max(max_rows, 1))[:, None]
    H = np.zeros((l.shape[0], max_degree + 1))
    H[:, 1:] = np.cumsum(np.log(2.0 * t + l), axis=1)
    return H


def log_upper_hooks(parts: np.ndarray, H: np.ndarray) -> np.ndarray:
    """``log prod_{s in kappa} (2 (arm(s) + 1) + leg(s))`` for each row of ``parts``."""
    n = parts.shape[1]
    padded = np.concatenate([parts, np.zeros((parts.shape[0], 1), dtype=parts.dtype)], axis=1)
    out = np.zeros(parts.shape[0])
    for i in range(n):
        for r in range(i, n):
            out += H[r - i, padded[:, i] - padded[:, r + 1]] - H[r - i, padded[:, i] - padded[:, r]]
    return out


def make_index(parts: np.ndarray, base: int):
    """Lookup structures mapping a partition key to its row in ``parts``.

    Keys are ``sum_i parts[i] * base**i``.  Returns ``(dense, keys, pos)``;
    exactly one of ``dense`` and ``keys`` is non-empty.
    """
    n = parts.shape[1]
    weights = base ** np.arange(n, dtype=np.int64)
    keys = parts @ weights
    if base**n <= DENSE_LIMIT:
        dense = np.full(base**n, -1, dtype=np.int64)
        dense[keys] = np.arange(parts.shape[0])
        return dense, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    order = np.argsort(keys, kind="stable")
    return np.zeros(0, dtype=np.int64), keys[order], order.astype(np.int64)


@njit(cache=True)
def _lookup(key, dense, keys, pos):
    if dense.shape[0] > 0:
        return dense[key]
    lo = 0
    hi = keys.shape[0] - 1
    while lo <= hi:
        mid = (lo + hi) >> 1
        if keys[mid] < key:
            lo = mid + 1
        elif keys[mid] > key:
            hi = mid - 1
        else:
            return pos[mid]
    return -1


@njit(cache=True)
def _row_terms(t, lam, mu, F, fixed):
    """Sum of the log-coefficient terms pairing rows ``i <= t`` with block ``t``."""
    acc = 0.0
    for i in range(t + 1):
        l = t - i
        acc += F[l, mu[i] - lam[t + 1]] - F[l, mu[i] - mu[t]] + F[l, lam[i] - mu[t]] - fixed[i, t]
    return acc


@njit(cache=True)
def branch_level(parts, xpow, e_n, prev_vals, prev_dense, prev_keys, prev_pos,
                 cur_dense, cur_keys, cur_pos, base, F):
    """Values of ``P_lam`` in ``n`` variables for every row ``lam`` of ``parts``.

    ``parts`` must be sorted by weight.  ``xpow[d] = x_n**d``; ``e_n`` is the
    product of all ``n`` variables; ``prev_vals`` holds the ``n - 1`` variable
    values indexed through ``prev_*``.
    """
    N = parts.shape[0]
    n = parts.shape[1]
    rows = n - 1
    out = np.zeros(N)
    mu = np.zeros(rows, dtype=np.int64)
    fixed = np.zeros((rows, rows))
    # running sums over the odometer prefix mu[0..t]
    logpsi = np.zeros(rows)
    key = np.zeros(rows, dtype=np.int64)
    mu_weight = np.zeros(rows, dtype=np.int64)
    powers = np.ones(rows, dtype=np.int64)
    for r in range(1, rows):
        powers[r] = powers[r - 1] * base
    for idx in range(N):
        lam = parts[idx]
        weight = 0
        for i in range(n):
            weight += lam[i]
        s = lam[n - 1]
        if s > 0:
            shifted = 0
            mult = 1
            for i in range(n):
                shifted += (lam[i] - s) * mult
                mult *= base
            out[idx] = e_n**s * out[_lookup(shifted, cur_dense, cur_keys, cur_pos)]
            continue
        for i in range(rows):
            for r in range(i, rows):
                fixed[i, r] = F[r - i, lam[i] - lam[r + 1]]
        for r in range(rows):
            mu[r] = lam[r + 1]
        start = 0
        total = 0.0
        while True:
            for t in range(start, rows):
                if t == 0:
                    logpsi[0] = _row_terms(0, lam, mu, F, fixed)
                    key[0] = mu[0]
                    mu_weight[0] = mu[0]
                else:
                    logpsi[t] = logpsi[t - 1] + _row_terms(t, lam, mu, F, fixed)
                    key[t] = key[t - 1] + mu[t] * powers[t]
                    mu_weight[t] = mu_weight[t - 1] + mu[t]
            pv = prev_vals[_lookup(key[rows - 1], prev_dense, prev_keys, prev_pos)]
            total += np.exp(logpsi[rows - 1]) * xpow[weight - mu_weight[rows - 1]] * pv
            # odometer over lam[r+1] <= mu[r] <= lam[r], last row fastest
            r = rows - 1
            while r >= 0:
                if mu[r] < lam[r]:
                    mu[r] += 1
                    break
                mu[r] = lam[r + 1]
                r -= 1
            if r < 0:
                break
            start = r
        out[idx] = total
    return out


@njit(cache=True)
def level2(parts, x1pow, x2pow, e_n, cur_dense, base, G0):
    """Two-variable specialisation; ``G0 = exp(F[0])``."""
    N = parts.shape[0]
    out = np.zeros(N)
    for idx in range(N):
        l0 = parts[idx, 0]
        l1 = parts[idx, 1]
        if l1 > 0:
            out[idx] = e_n**l1 * out[cur_dense[l0 - l1]]
            continue
        total = 0.0
        for m0 in range(l0 + 1):
            total += G0[m0] * G0[l0 - m0] * x2pow[l0 - m0] * x1pow[m0]
        out[idx] = total / G0[l0]
    return out


@njit(cache=True)
def level3(parts, x3pow, e_n, prev, cur_dense, base, G0, G1, G1inv):
    """Three-variable specialisation.

    ``prev[m0, m1]`` holds the two-variable values; ``G0``/``G1`` are
    ``exp(F[0])``/``exp(F[1])`` and ``G1inv = 1 / G1``.
    """
    N = parts.shape[0]
    out = np.zeros(N)
    col = np.empty(base)
    for idx in range(N):
        l0 = parts[idx, 0]
        l1 = parts[idx, 1]
        l2 = parts[idx, 2]
        w = l0 + l1 + l2
        if l2 > 0:
            out[idx] = e_n**l2 * out[cur_dense[(l0 - l2) + (l1 - l2) * base]]
            continue
        # l2 == 0 from here on
        for m1 in range(l1 + 1):
            col[m1] = G1[l0 - m1] * G0[m1] * G0[l1 - m1]
        const = 1.0 / (G0[l0 - l1] * G1[l0] * G0[l1])
        total = 0.0
        for m0 in range(l1, l0 + 1):
            a = const * G0[m0 - l1] * G0[l0 - m0] * G1[m0]
            inner = 0.0
            for m1 in range(l1 + 1):
                inner += G1inv[m0 - m1] * col[m1] * x3pow[w - m0 - m1] * prev[m0, m1]
            total += a * inner
        out[idx] = total
    return out
