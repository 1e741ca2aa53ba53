"""Finite-sample rank statistics: ranks, Kendall's T, Spearman's S and S-tilde.

Ties are rejected rather than mid-ranked. Kendall's T is computed in
O(n log n): sort on x, then count inversions of y with a merge sort; the
inversion count is the number of discordant pairs.
"""
from __future__ import annotations

from math import comb

import numpy as np
from numba import njit

from .errors import SampleSizeError, TieError
from .model_core import PairedSample


@njit(cache=True)
def _merge_count(a, buf):
    """Bottom-up merge sort of ``a`` in place; returns the inversion count."""
    n = a.size
    count = 0
    width = 1
    while width < n:
        lo = 0
        while lo < n - width:
            mid = lo + width
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[j] < a[i]:
                    buf[k] = a[j]
                    count += mid - i
                    j += 1
                else:
                    buf[k] = a[i]
                    i += 1
                k += 1
            while i < mid:
                buf[k] = a[i]
                i += 1
                k += 1
            while j < hi:
                buf[k] = a[j]
                j += 1
                k += 1
            for t in range(lo, hi):
                a[t] = buf[t]
            lo += 2 * width
        width *= 2
    return count


@njit(cache=True)
def count_inversions(values):
    """Number of pairs ``i < j`` with ``values[i] > values[j]``."""
    a = values.copy()
    buf = np.empty_like(a)
    return _merge_count(a, buf)


@njit(cache=True)
def _inversions_rows(a):
    reps = a.shape[0]
    out = np.empty(reps, dtype=np.int64)
    buf = np.empty(a.shape[1], dtype=a.dtype)
    for r in range(reps):
        row = a[r].copy()
        out[r] = _merge_count(row, buf)
    return out


def _columns(sample):
    if isinstance(sample, PairedSample):
        return sample.x, sample.y
    if isinstance(sample, tuple) and len(sample) == 2 and np.ndim(sample[0]) == 1:
        x, y = sample
        s = PairedSample(x, y)
        return s.x, s.y
    s = PairedSample.from_pairs(sample)
    return s.x, s.y


def ranks(values):
    """``1 + #{j : v_i > v_j}`` for pairwise distinct values."""
    v = np.asarray(values, dtype=float).ravel()
    order = np.argsort(v, kind="mergesort")
    if v.size > 1 and np.any(np.diff(v[order]) == 0):
        raise TieError("values")
    r = np.empty(v.size, dtype=np.int64)
    r[order] = np.arange(1, v.size + 1)
    return r


def concordance_counts(sample):
    """``(concordant, discordant)`` pair counts."""
    x, y = _columns(sample)
    n = x.size
    order = np.argsort(x, kind="mergesort")
    d = int(count_inversions(np.ascontiguousarray(y[order])))
    return comb(n, 2) - d, d


def kendall_t(sample):
    x, _ = _columns(sample)
    if x.size < 2:
        raise SampleSizeError(f"Kendall's T needs n >= 2, got {x.size}")
    c, d = concordance_counts(sample)
    return (c - d) / comb(x.size, 2)


def _rank_product(x, y):
    rx = ranks(x)
    ry = ranks(y)
    return int(np.dot(rx, ry))


def spearman_s(sample):
    """Spearman's S in the simplified ranks form."""
    x, y = _columns(sample)
    n = x.size
    if n < 3:
        raise SampleSizeError(f"Spearman's S needs n >= 3, got {n}")
    s = _rank_product(x, y)
    # single division of exact integers
    return (12 * s - 3 * n * (n + 1) ** 2) / (n * (n * n - 1))


def spearman_u_tilde(sample):
    """U-statistic with kernel h3, via ``sum R_i R'_i = n^2 + K_n + C(n,3) S~``.

    ``K_n`` is the number of concordant pairs.
    """
    x, y = _columns(sample)
    n = x.size
    if n < 3:
        raise SampleSizeError(f"S-tilde needs n >= 3, got {n}")
    s = _rank_product(x, y)
    k, _ = concordance_counts((x, y))
    return (s - n * n - k) / comb(n, 3)


def h2_kernel(p, q):
    """Difference-sign kernel ``sign((x_p - x_q)(y_p - y_q))``."""
    dx = float(p[0]) - float(q[0])
    dy = float(p[1]) - float(q[1])
    if dx == 0.0:
        raise TieError("x")
    if dy == 0.0:
        raise TieError("y")
    return 1 if dx * dy > 0 else -1


# batch versions for Monte Carlo -------------------------------------------

def kendall_t_batch(x, y, n=None):
    """Kendall's T of every row of two ``(reps, N)`` arrays, using the first ``n`` columns."""
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n = x.shape[1] if n is None else int(n)
    if n < 2:
        raise SampleSizeError(f"Kendall's T needs n >= 2, got {n}")
    order = np.argsort(x[:, :n], axis=1, kind="stable")
    ys = np.ascontiguousarray(np.take_along_axis(y[:, :n], order, axis=1))
    d = _inversions_rows(ys).astype(float)
    pairs = n * (n - 1) / 2.0
    return (pairs - 2.0 * d) / pairs


def _row_ranks(a):
    order = np.argsort(a, axis=1, kind="stable")
    r = np.empty_like(order)
    rows = np.arange(a.shape[0])[:, None]
    r[rows, order] = np.arange(1, a.shape[1] + 1)
    return r


def spearman_s_batch(x, y, n=None):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[1] if n is None else int(n)
    if n < 3:
        raise SampleSizeError(f"Spearman's S needs n >= 3, got {n}")
    rx = _row_ranks(x[:, :n])
    ry = _row_ranks(y[:, :n])
    s = np.einsum("ij,ij->i", rx, ry)
    return (12 * s - 3 * n * (n + 1) ** 2) / float(n * (n * n - 1))
