"""Audits for efficiency and fairness of random assignments and lotteries.

Every check returns an :class:`AuditReport`. A failing report carries
witnesses: JSON-ready dicts naming agents and items, which can be replayed
against the inputs to reproduce the violation.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import simplex
from .exact import allocation_dominance, priority_dominance
from .graphs import shortest_path, strongly_connected_components
from .model import (
    ONE,
    ZERO,
    Instance,
    InvalidInput,
    Lottery,
    RandomAssignment,
    RandomPriority,
    assignment_from_lottery,
    assignment_to_json,
    format_rational,
    rank_distribution,
)


@dataclass
class AuditReport:
    property: str
    passed: bool
    witnesses: list[dict[str, Any]] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict[str, Any]:
        return {"property": self.property, "verdict": self.verdict, "witnesses": self.witnesses}

    def __bool__(self) -> bool:
        return self.passed


def _prefix_sums(x: Sequence[Fraction], order: Sequence[int]) -> list[Fraction]:
    out = []
    acc = ZERO
    for k in order:
        acc += x[k]
        out.append(acc)
    return out


def first_violation(x: Sequence[Fraction], y: Sequence[Fraction], order: Sequence[int] | None = None) -> int | None:
    """1-based prefix length where x's prefix sum drops below y's, or None."""
    if len(x) != len(y):
        raise InvalidInput(f"length mismatch: {len(x)} vs {len(y)}")
    order = range(len(x)) if order is None else order
    acc_x = acc_y = ZERO
    for t, k in enumerate(order, start=1):
        acc_x += x[k]
        acc_y += y[k]
        if acc_x < acc_y:
            return t
    return None


def sd_dominates(x: Sequence[Fraction], y: Sequence[Fraction], order: Sequence[int] | None = None) -> bool:
    """Weak first-order stochastic dominance of x over y.

    ``order`` lists indices from best to worst (the inverse of a preference
    permutation); the identity is used when omitted.
    """
    return first_violation(x, y, order) is None


def _check_dims(p: RandomAssignment, inst: Instance, priority: RandomPriority | None = None) -> None:
    if p.n != inst.n or p.m != inst.m:
        raise InvalidInput(f"assignment is {p.n}x{p.m} but the instance is {inst.n}x{inst.m}")
    if priority is not None and priority.n != inst.n:
        raise InvalidInput("priority and instance disagree on the number of agents")


def _sef_violations(p: RandomAssignment, priority: RandomPriority, inst: Instance) -> list[tuple[int, int]]:
    prio = priority_dominance(priority)
    alloc = allocation_dominance(p.rows, inst.preferences)
    bad = np.argwhere(prio & ~alloc)
    return [(int(i), int(j)) for i, j in bad]


def check_sef(p: RandomAssignment, priority: RandomPriority, inst: Instance) -> AuditReport:
    _check_dims(p, inst, priority)
    witnesses = []
    for i, j in _sef_violations(p, priority, inst):
        order = inst.preferences[i]
        t = first_violation(p[i], p[j], order)
        witnesses.append(
            {
                "agents": [inst.agents[i], inst.agents[j]],
                "prefix": t,
                "own": format_rational(_prefix_sums(p[i], order)[t - 1]),
                "other": format_rational(_prefix_sums(p[j], order)[t - 1]),
            }
        )
    return AuditReport("sef", not witnesses, witnesses)


def count_envy_pairs(p: RandomAssignment, priority: RandomPriority, inst: Instance) -> tuple[int, list[tuple[int, int]]]:
    """Ordered pairs whose priority dominance is not matched by allocation dominance."""
    _check_dims(p, inst, priority)
    pairs = _sef_violations(p, priority, inst)
    return len(pairs), pairs


def _envy_assignment(lottery: Lottery, inst: Instance, i: int, j: int) -> tuple[int, ...] | None:
    for f, _ in lottery.entries:
        if not inst.prefers(i, f[i], f[j]):
            return f
    return None


def _lottery_witness(inst: Instance, i: int, j: int, f: Sequence[int]) -> dict[str, str]:
    return {inst.agents[a]: inst.items[x] for a, x in enumerate(f)}


def check_lef_lottery(lottery: Lottery, priority: RandomPriority, inst: Instance) -> AuditReport:
    """Check Pr_L[f(i) >_i f(j)] >= Pr[sigma(i) < sigma(j)] for every ordered pair."""
    if lottery.n != inst.n or lottery.m != inst.m:
        raise InvalidInput("lottery and instance dimensions disagree")
    witnesses = []
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            need = priority.precedence[i][j]
            if not need:
                continue
            got = sum((w for f, w in lottery.entries if inst.prefers(i, f[i], f[j])), ZERO)
            if got < need:
                f = _envy_assignment(lottery, inst, i, j)
                witnesses.append(
                    {
                        "agents": [inst.agents[i], inst.agents[j]],
                        "required": format_rational(need),
                        "achieved": format_rational(got),
                        "assignment": _lottery_witness(inst, i, j, f),
                    }
                )
    return AuditReport("lef", not witnesses, witnesses)


def check_1lef(
    p: RandomAssignment, priority: RandomPriority, inst: Instance, lottery: Lottery | None = None
) -> AuditReport:
    """1-LEF for pairs ranked with certainty.

    Without a lottery, the sufficient matrix condition is checked: agent j
    holds nothing agent i ranks above something agent i holds, so every
    inducing lottery passes. With a lottery, that lottery is checked directly.
    """
    _check_dims(p, inst, priority)
    if lottery is not None and assignment_from_lottery(lottery) != p:
        raise InvalidInput("lottery does not induce the given assignment")
    witnesses = []
    for i in range(inst.n):
        rank = inst.rank[i]
        held = [j for j in range(inst.m) if p[i][j]]
        worst_own = max(held, key=lambda x: rank[x])
        for k in range(inst.n):
            if k == i or priority.precedence[i][k] != 1:
                continue
            if lottery is None:
                better = [a for a in range(inst.m) if p[k][a] and rank[a] < rank[worst_own]]
                if better:
                    a = min(better, key=lambda x: rank[x])
                    witnesses.append(
                        {
                            "agents": [inst.agents[i], inst.agents[k]],
                            "other_holds": inst.items[a],
                            "own_holds": inst.items[worst_own],
                        }
                    )
            else:
                f = _envy_assignment(lottery, inst, i, k)
                if f is not None:
                    witnesses.append(
                        {"agents": [inst.agents[i], inst.agents[k]], "assignment": _lottery_witness(inst, i, k, f)}
                    )
    name = "1lef" if lottery is None else "1lef-lottery"
    return AuditReport(name, not witnesses, witnesses)


def baseline_allocation(priority: RandomPriority, i: int, inst: Instance) -> list[Fraction]:
    """Rank-r probability mass placed on agent i's r-th favourite item."""
    dist = rank_distribution(priority, i)
    out = [ZERO] * inst.m
    for r, prob in enumerate(dist):
        out[inst.preferences[i][r]] = prob
    return out


def check_prop(p: RandomAssignment, priority: RandomPriority, inst: Instance) -> AuditReport:
    _check_dims(p, inst, priority)
    witnesses = []
    for i in range(inst.n):
        base = baseline_allocation(priority, i, inst)
        order = inst.preferences[i]
        t = first_violation(p[i], base, order)
        if t is not None:
            witnesses.append(
                {
                    "agent": inst.agents[i],
                    "prefix": t,
                    "own": format_rational(_prefix_sums(p[i], order)[t - 1]),
                    "baseline": format_rational(_prefix_sums(base, order)[t - 1]),
                }
            )
    return AuditReport("prop", not witnesses, witnesses)


def _item_graph(p: RandomAssignment, inst: Instance) -> tuple[list[set[int]], set[tuple[int, int]], list[Fraction]]:
    """Trading graph on items.

    Edge a -> b means some holder of b would swap it for a: either an agent with
    a >_i b and p_ib > 0 ("real" edges), or the unassigned remainder of b,
    which accepts anything.
    """
    m = inst.m
    succ: list[set[int]] = [set() for _ in range(m)]
    real: set[tuple[int, int]] = set()
    for i in range(inst.n):
        pref = inst.preferences[i]
        for pos, b in enumerate(pref):
            if p[i][b]:
                for a in pref[:pos]:
                    succ[a].add(b)
                    real.add((a, b))
    slack = [ONE - s for s in p.column_sums()]
    for b in range(m):
        if slack[b]:
            for a in range(m):
                if a != b:
                    succ[a].add(b)
    return succ, real, slack


def check_oe(p: RandomAssignment, inst: Instance) -> AuditReport:
    """Ordinal efficiency via acyclicity of the item trading relation.

    A real trading edge lying on a cycle yields an exchange that makes every
    agent on it strictly better off; on failure that exchange is emitted as a
    dominating assignment.
    """
    _check_dims(p, inst)
    succ, real, slack = _item_graph(p, inst)
    comps = strongly_connected_components(inst.m, succ)
    comp_of = [0] * inst.m
    for c, members in enumerate(comps):
        for x in members:
            comp_of[x] = c
    cyclic = sorted((a, b) for a, b in real if comp_of[a] == comp_of[b])
    if not cyclic:
        return AuditReport("oe", True)

    a, b = cyclic[0]
    back = shortest_path(succ, b, a, allowed=set(comps[comp_of[a]]))
    cycle = [a] + back  # a -> b -> ... -> a
    trades = []
    for x, y in zip(cycle, cycle[1:]):
        holder = next(
            (i for i in range(inst.n) if p[i][y] and inst.prefers(i, x, y)),
            None,
        )
        available = p[holder][y] if holder is not None else slack[y]
        trades.append((holder, x, y, available))
    eps = min(t[3] for t in trades)
    q = [list(row) for row in p.rows]
    for holder, x, y, _ in trades:
        if holder is not None:
            q[holder][y] -= eps
            q[holder][x] += eps
    dominating = RandomAssignment(q)
    witness = {
        "cycle": [inst.items[x] for x in cycle],
        "trades": [
            {
                "agent": inst.agents[h] if h is not None else None,
                "gives": inst.items[y],
                "gets": inst.items[x],
                "amount": format_rational(eps),
            }
            for h, x, y, _ in trades
        ],
        "dominating_assignment": assignment_to_json(dominating, inst),
    }
    return AuditReport("oe", False, [witness])


BRUTEFORCE_LIMIT = 4


def check_oe_bruteforce(p: RandomAssignment, inst: Instance) -> AuditReport:
    """Search for a dominating assignment with an exact LP (small instances only).

    Variables: q_ij, then one non-negative gain per agent and proper prefix.
    The total gain is maximised; a positive optimum gives a dominating Q.
    """
    _check_dims(p, inst)
    n, m = inst.n, inst.m
    if n > BRUTEFORCE_LIMIT or m > BRUTEFORCE_LIMIT:
        raise InvalidInput(f"brute-force OE check is limited to {BRUTEFORCE_LIMIT}x{BRUTEFORCE_LIMIT}")

    def q(i: int, j: int) -> int:
        return i * m + j

    gains: dict[tuple[int, int], int] = {}
    for i in range(n):
        for t in range(m - 1):
            gains[i, t] = n * m + len(gains)
    rows: list[simplex.Row] = []
    for i in range(n):
        rows.append(({q(i, j): ONE for j in range(m)}, "==", ONE))
    for j in range(m):
        rows.append(({q(i, j): ONE for i in range(n)}, "<=", ONE))
    for i in range(n):
        pref = inst.preferences[i]
        target = ZERO
        for t in range(m - 1):
            target += p[i][pref[t]]
            coeffs = {q(i, pref[r]): ONE for r in range(t + 1)}
            coeffs[gains[i, t]] = -ONE
            rows.append((coeffs, "==", target))
    res = simplex.solve(rows, n * m + len(gains), objective={v: ONE for v in gains.values()})
    if res.status != "optimal":
        raise RuntimeError(f"dominance LP unexpectedly {res.status}")
    if res.objective == 0:
        return AuditReport("oe-bruteforce", True)
    dominating = RandomAssignment([[res.x[q(i, j)] for j in range(m)] for i in range(n)])
    witness = {
        "total_gain": format_rational(res.objective),
        "dominating_assignment": assignment_to_json(dominating, inst),
    }
    return AuditReport("oe-bruteforce", False, [witness])
