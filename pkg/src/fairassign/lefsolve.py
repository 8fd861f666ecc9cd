"""Decide whether any lottery inducing a random assignment satisfies LEF.

The lottery weights are LP variables, one per simple assignment that fits in
the support of P. Feasibility is decided by an exact phase-1 simplex; an
infeasible program comes back with a Farkas certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import simplex
from .model import Instance, InvalidInput, Lottery, RandomAssignment, RandomPriority, SimpleAssignment

MAX_AGENTS = 8


class SizeGuardExceeded(InvalidInput):
    pass


def enumerate_support_assignments(p: RandomAssignment, inst: Instance | None = None) -> list[SimpleAssignment]:
    """All injective agent -> item maps using only positive entries of P, lexicographically."""
    if p.n > MAX_AGENTS:
        raise SizeGuardExceeded(f"support enumeration is limited to {MAX_AGENTS} agents, got {p.n}")
    options = [[j for j, x in enumerate(row) if x] for row in p.rows]
    out: list[SimpleAssignment] = []
    used = [False] * p.m
    current: list[int] = []

    def dfs(i: int) -> None:
        if i == p.n:
            out.append(tuple(current))
            return
        for j in options[i]:
            if not used[j]:
                used[j] = True
                current.append(j)
                dfs(i + 1)
                current.pop()
                used[j] = False

    dfs(0)
    return out


@dataclass
class LefProgram:
    assignments: list[SimpleAssignment]
    rows: list[simplex.Row]
    pairs: list[tuple[int, int, Fraction]]


def build_program(p: RandomAssignment, priority: RandomPriority, inst: Instance) -> LefProgram:
    support = enumerate_support_assignments(p, inst)
    rows: list[simplex.Row] = []
    for i in range(p.n):
        for j in range(p.m):
            if p[i][j]:
                coeffs = {k: Fraction(1) for k, f in enumerate(support) if f[i] == j}
                rows.append((coeffs, "==", p[i][j]))
    pairs = []
    for i in range(p.n):
        for j in range(p.n):
            need = priority.precedence[i][j] if i != j else 0
            if need:
                coeffs = {k: Fraction(1) for k, f in enumerate(support) if inst.prefers(i, f[i], f[j])}
                rows.append((coeffs, ">=", need))
                pairs.append((i, j, need))
    return LefProgram(support, rows, pairs)


@dataclass
class LefResult:
    feasible: bool
    lottery: Lottery | None = None
    farkas: list[Fraction] | None = None
    std_matrix: list[list[Fraction]] | None = None
    std_rhs: list[Fraction] | None = None
    note: str = ""

    def certificate_valid(self) -> bool:
        if self.feasible or self.farkas is None:
            return False
        return simplex.verify_farkas(self.std_matrix, self.std_rhs, self.farkas)


def lef_feasible(p: RandomAssignment, priority: RandomPriority, inst: Instance) -> LefResult:
    if p.n != inst.n or p.m != inst.m or priority.n != inst.n:
        raise InvalidInput("assignment, priority and instance dimensions disagree")
    prog = build_program(p, priority, inst)
    res = simplex.solve(prog.rows, len(prog.assignments))
    if res.status != "optimal":
        return LefResult(
            False,
            farkas=res.farkas,
            std_matrix=res.std_matrix,
            std_rhs=res.std_rhs,
            note=(
                f"no lottery over the {len(prog.assignments)} support assignments induces P while "
                f"meeting all {len(prog.pairs)} pairwise likelihood bounds (Farkas certificate attached)"
            ),
        )
    lottery = Lottery(((f, w) for f, w in zip(prog.assignments, res.x) if w), m=inst.m)
    return LefResult(True, lottery=lottery)
