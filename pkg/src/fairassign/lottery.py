"""Lottery mechanisms and Birkhoff-von Neumann decomposition."""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction

from .model import (
    ONE,
    ZERO,
    Instance,
    InvalidInput,
    Lottery,
    RandomAssignment,
    RandomPriority,
    SimpleAssignment,
)


def serial_dictatorship(order: Sequence[int], inst: Instance) -> SimpleAssignment:
    """Agents pick their favourite remaining item in ``order`` (best first)."""
    taken = [False] * inst.m
    f = [-1] * inst.n
    for i in order:
        for j in inst.preferences[i]:
            if not taken[j]:
                taken[j] = True
                f[i] = j
                break
    return tuple(f)


def rsd(inst: Instance, priority: RandomPriority) -> Lottery:
    """Random serial dictatorship as the lottery {(SD(sigma_k), rho_k)}."""
    if priority.n != inst.n:
        raise InvalidInput("priority and instance disagree on the number of agents")
    return Lottery(((serial_dictatorship(order, inst), w) for order, w in priority.entries), m=inst.m)


def _perfect_matching(support: list[list[int]], size: int) -> list[int] | None:
    """Kuhn's augmenting-path matching; rows seeded in index order.

    ``support[r]`` lists the columns with positive mass in row r, ascending.
    Returns ``match[r] = column`` or None if no perfect matching exists.
    """
    col_owner = [-1] * size

    def augment(r: int, seen: list[bool]) -> bool:
        for c in support[r]:
            if seen[c]:
                continue
            seen[c] = True
            if col_owner[c] == -1 or augment(col_owner[c], seen):
                col_owner[c] = r
                return True
        return False

    for r in range(size):
        if not augment(r, [False] * size):
            return None
    match = [-1] * size
    for c, r in enumerate(col_owner):
        match[r] = c
    return match


def bvn_decompose(p: RandomAssignment) -> Lottery:
    """Decompose ``p`` into a lottery over simple assignments.

    Columns with spare mass are filled by dummy rows so the matrix becomes
    doubly stochastic; each round removes the largest multiple of a perfect
    matching on the positive entries, zeroing at least one entry.
    """
    n, m = p.n, p.m
    mat = [list(row) for row in p.rows]
    slack = [ONE - s for s in p.column_sums()]
    col = 0
    for _ in range(m - n):
        row = [ZERO] * m
        need = ONE
        while need:
            while not slack[col]:
                col += 1
            take = min(need, slack[col])
            row[col] += take
            slack[col] -= take
            need -= take
        mat.append(row)

    entries: list[tuple[SimpleAssignment, Fraction]] = []
    remaining = ONE
    while remaining:
        support = [[j for j, x in enumerate(row) if x] for row in mat]
        match = _perfect_matching(support, m)
        if match is None:
            raise InvalidInput("matrix is not a valid random assignment (no perfect matching on its support)")
        weight = min(mat[r][match[r]] for r in range(m))
        for r in range(m):
            mat[r][match[r]] -= weight
        remaining -= weight
        entries.append((tuple(match[:n]), weight))
    return Lottery(entries, m=m)
