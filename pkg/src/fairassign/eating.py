"""Simultaneous eating: Probabilistic Serial, Cycle Elimination, Unit-Time Eating.

All three procedures are event driven. Between two events every eating agent
keeps the same target, so the next event time is a ratio of remaining supply
to eating rate and the whole run stays in exact rational arithmetic.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import priority_dominance
from .graphs import strongly_connected_components
from .model import ONE, ZERO, Instance, InvalidInput, RandomAssignment, RandomPriority


@dataclass(frozen=True)
class EatingState:
    """Snapshot taken at an event boundary."""

    time: Fraction
    remaining: tuple[Fraction, ...]
    consumed: tuple[Fraction, ...]
    targets: dict[int, int]


Observer = Callable[[EatingState], None]


@dataclass(frozen=True)
class SDGraph:
    """Weak stochastic-dominance graph over agents' rank distributions."""

    n: int
    successors: tuple[tuple[int, ...], ...]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.successors[i]

    def edges(self) -> set[tuple[int, int]]:
        return {(i, j) for i, succ in enumerate(self.successors) for j in succ}


@dataclass(frozen=True)
class Condensation:
    components: tuple[tuple[int, ...], ...]
    component_of: tuple[int, ...]
    dag_edges: frozenset[tuple[int, int]]

    def in_degree(self, c: int) -> int:
        return sum(1 for _, dst in self.dag_edges if dst == c)

    def sources(self) -> list[int]:
        """Components with no incoming DAG edge."""
        targets = {dst for _, dst in self.dag_edges}
        return [c for c in range(len(self.components)) if c not in targets]

    def layers(self) -> list[tuple[int, ...]]:
        """Peel zero-in-degree components repeatedly; each layer is a sorted agent tuple."""
        indeg = [0] * len(self.components)
        out: list[list[int]] = [[] for _ in self.components]
        for src, dst in sorted(self.dag_edges):
            indeg[dst] += 1
            out[src].append(dst)
        frontier = [c for c, d in enumerate(indeg) if d == 0]
        result = []
        while frontier:
            result.append(tuple(sorted(a for c in frontier for a in self.components[c])))
            nxt = []
            for c in frontier:
                for d in out[c]:
                    indeg[d] -= 1
                    if indeg[d] == 0:
                        nxt.append(d)
            frontier = sorted(nxt)
        return result


def build_sd_graph(priority: RandomPriority) -> SDGraph:
    """Edge i -> j iff agent i's rank distribution weakly dominates j's."""
    dom = priority_dominance(priority)
    succ = tuple(tuple(int(j) for j in np.flatnonzero(dom[i]) if j != i) for i in range(priority.n))
    return SDGraph(priority.n, succ)


def condense(graph: SDGraph) -> Condensation:
    comps = strongly_connected_components(graph.n, graph.successors)
    comps.sort(key=lambda c: c[0])
    comp_of = [0] * graph.n
    for c, members in enumerate(comps):
        for a in members:
            comp_of[a] = c
    dag = {
        (comp_of[i], comp_of[j])
        for i, succ in enumerate(graph.successors)
        for j in succ
        if comp_of[i] != comp_of[j]
    }
    return Condensation(tuple(tuple(c) for c in comps), tuple(comp_of), frozenset(dag))


def _next_available(pref: Sequence[int], start: int, supply: Sequence[Fraction]) -> int:
    k = start
    while not supply[pref[k]]:
        k += 1
    return k


def _serial_eat(
    inst: Instance,
    agents: Sequence[int],
    supply: list[Fraction],
    observer: Observer | None = None,
    consumed_base: Sequence[Fraction] | None = None,
    start: Fraction = ZERO,
) -> dict[int, list[Fraction]]:
    """Run PS for ``agents`` on ``supply`` (mutated in place).

    Observer times are reported as ``start + t`` for local time t in [0, 1].
    """
    m = inst.m
    rows = {i: [ZERO] * m for i in agents}
    if not agents:
        return rows
    if sum(supply, ZERO) < len(agents):
        raise InvalidInput(f"total supply {sum(supply, ZERO)} is below the {len(agents)} agents to feed")
    ptr = dict.fromkeys(agents, 0)
    now = ZERO
    while now < 1:
        eaters: dict[int, list[int]] = {}
        for i in agents:
            k = ptr[i] = _next_available(inst.preferences[i], ptr[i], supply)
            eaters.setdefault(inst.preferences[i][k], []).append(i)
        step = ONE - now
        for j, who in eaters.items():
            cand = supply[j] / len(who)
            if cand < step:
                step = cand
        for j, who in eaters.items():
            for i in who:
                rows[i][j] += step
            supply[j] -= step * len(who)
        now += step
        if observer is not None:
            consumed = list(consumed_base) if consumed_base is not None else [ZERO] * inst.n
            for i in agents:
                consumed[i] += now
            targets = {i: j for j, who in eaters.items() for i in who}
            observer(EatingState(start + now, tuple(supply), tuple(consumed), targets))
    return rows


def probabilistic_serial(
    inst: Instance,
    agents: Sequence[int] | None = None,
    supply: Sequence[Fraction] | None = None,
    observer: Observer | None = None,
) -> dict[int, list[Fraction]]:
    """Probabilistic Serial restricted to ``agents`` and a (possibly fractional) supply.

    Returns one allocation row per participating agent.
    """
    agents = list(range(inst.n)) if agents is None else list(agents)
    supply = [ONE] * inst.m if supply is None else [Fraction(s) for s in supply]
    if len(supply) != inst.m:
        raise InvalidInput("supply vector must have one entry per item")
    return _serial_eat(inst, agents, supply, observer)


def probabilistic_serial_assignment(inst: Instance) -> RandomAssignment:
    rows = probabilistic_serial(inst)
    return RandomAssignment(rows[i] for i in range(inst.n))


def _check_agents(inst: Instance, priority: RandomPriority) -> None:
    if priority.n != inst.n:
        raise InvalidInput(f"priority ranks {priority.n} agents but the instance has {inst.n}")


def cycle_elimination(
    inst: Instance, priority: RandomPriority, observer: Observer | None = None
) -> RandomAssignment:
    """Run PS layer by layer down the condensed SD-graph.

    Agents in source components eat first; later layers eat whatever mass is
    left, including partially eaten items.
    """
    _check_agents(inst, priority)
    cond = condense(build_sd_graph(priority))
    supply = [ONE] * inst.m
    rows: list[list[Fraction] | None] = [None] * inst.n
    done = [ZERO] * inst.n
    for k, layer in enumerate(cond.layers()):
        part = _serial_eat(inst, layer, supply, observer, consumed_base=done, start=Fraction(k))
        for i, row in part.items():
            rows[i] = row
            done[i] = ONE
    return RandomAssignment(rows)


def unit_time_eating(
    inst: Instance, priority: RandomPriority, observer: Observer | None = None
) -> RandomAssignment:
    """n unit phases; in phase t each agent eats at its probability of holding rank t."""
    _check_agents(inst, priority)
    n, m = inst.n, inst.m
    phases: list[dict[int, Fraction]] = [{} for _ in range(n)]
    for order, w in priority.entries:
        for t, i in enumerate(order):
            phases[t][i] = phases[t].get(i, ZERO) + w
    supply = [ONE] * m
    rows = [[ZERO] * m for _ in range(n)]
    consumed = [ZERO] * n
    ptr = [0] * n
    for t, rates in enumerate(phases):
        eaters = sorted(rates.items())
        now = ZERO
        while now < 1:
            load: dict[int, Fraction] = {}
            target = {}
            for i, r in eaters:
                k = ptr[i] = _next_available(inst.preferences[i], ptr[i], supply)
                j = inst.preferences[i][k]
                target[i] = j
                load[j] = load.get(j, ZERO) + r
            step = ONE - now
            for j, rate in load.items():
                cand = supply[j] / rate
                if cand < step:
                    step = cand
            for i, r in eaters:
                gain = r * step
                rows[i][target[i]] += gain
                consumed[i] += gain
            for j, rate in load.items():
                supply[j] -= rate * step
            now += step
            if observer is not None:
                observer(EatingState(t + now, tuple(supply), tuple(consumed), target))
    return RandomAssignment(rows)
