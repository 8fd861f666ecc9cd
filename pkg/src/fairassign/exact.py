"""Exact integer scaling of rational matrices for vectorized comparisons.

A matrix of Fractions is multiplied by the lcm of its denominators so prefix
sums can be compared with numpy integer arrays. int64 is used when every
prefix sum provably fits; otherwise the arrays fall back to Python ints.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from fractions import Fraction

import numpy as np

_INT64_SAFE = 2**62


def scaled_integers(rows: Sequence[Sequence[Fraction]]) -> np.ndarray:
    """Return an integer array ``A`` with ``A / D == rows`` for a common ``D``.

    Entries are assumed to lie in [0, 1]; any row's prefix sums are then bounded
    by ``D * len(row)``, which decides the dtype.
    """
    denom = math.lcm(*(x.denominator for row in rows for x in row if x))
    width = max((len(r) for r in rows), default=0)
    ints = [[x.numerator * (denom // x.denominator) if x else 0 for x in row] for row in rows]
    if denom * max(width, 1) < _INT64_SAFE:
        return np.array(ints, dtype=np.int64)
    return np.array(ints, dtype=object)


def weakly_dominates_all(prefix: np.ndarray) -> np.ndarray:
    """``out[i, j]`` is True iff every prefix of row i is >= that of row j."""
    n = prefix.shape[0]
    out = np.empty((n, n), dtype=bool)
    for i in range(n):
        out[i] = (prefix[i][None, :] >= prefix).all(axis=1)
    return out


def priority_dominance(priority) -> np.ndarray:
    """``out[i, j]`` iff agent i's rank distribution weakly dominates agent j's."""
    counts = np.array(priority.rank_counts, dtype=object)
    prefix = np.cumsum(counts, axis=1)
    if priority.common_denominator() * priority.n < _INT64_SAFE:
        prefix = prefix.astype(np.int64)
    return weakly_dominates_all(prefix)


def allocation_dominance(rows: Sequence[Sequence[Fraction]], preferences: Sequence[Sequence[int]]) -> np.ndarray:
    """``out[i, j]`` iff row i weakly dominates row j under agent i's preference order."""
    ints = scaled_integers(rows)
    n = ints.shape[0]
    out = np.empty((n, n), dtype=bool)
    for i in range(n):
        prefix = np.cumsum(ints[:, list(preferences[i])], axis=1)
        out[i] = (prefix[i][None, :] >= prefix).all(axis=1)
    return out
