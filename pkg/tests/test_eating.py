import random
from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_orders, random_instance, random_priority
from fairassign.audit import check_oe, check_prop, check_sef, sd_dominates
from fairassign.eating import (
    build_sd_graph,
    condense,
    cycle_elimination,
    probabilistic_serial,
    probabilistic_serial_assignment,
    unit_time_eating,
)
from fairassign.fixtures import load_fixture
from fairassign.graphs import shortest_path, strongly_connected_components
from fairassign.model import Instance, InvalidInput, RandomPriority

H = F(1, 2)
SAME = Instance.from_lists([["a", "b"], ["a", "b"]])


def test_ps_symmetric_split():
    assert probabilistic_serial_assignment(SAME).rows == ((H, H), (H, H))


def test_ps_disjoint_favorites():
    inst = Instance.from_lists([["a", "b"], ["b", "a"]])
    assert probabilistic_serial_assignment(inst).rows == ((1, 0), (0, 1))


def test_ps_three_agent_hand_trace():
    # a goes at t=1/2, b at t=3/4, c at t=1
    inst = Instance.from_lists([["a", "b", "c"], ["a", "c", "b"], ["b", "a", "c"]])
    p = probabilistic_serial_assignment(inst)
    assert p.rows == (
        (H, F(1, 4), F(1, 4)),
        (H, 0, H),
        (0, F(3, 4), F(1, 4)),
    )


def test_ps_top_layer_of_thm1():
    inst, _ = load_fixture("thm1")
    rows = probabilistic_serial(inst, agents=[2, 3])
    assert rows == {2: [1, 0, 0, 0], 3: [0, 1, 0, 0]}


def test_ps_on_leftover_supply():
    rows = probabilistic_serial(SAME, agents=[1], supply=[H, H])
    assert rows == {1: [H, H]}
    with pytest.raises(InvalidInput):
        probabilistic_serial(SAME, agents=[0, 1], supply=[H, H])


def test_sd_graph_thm1():
    _, pr = load_fixture("thm1")
    g = build_sd_graph(pr)
    expected = {(2, 3), (3, 2), (0, 1), (1, 0), (2, 0), (2, 1), (3, 0), (3, 1)}
    assert g.edges() == expected


def test_sd_graph_deterministic_is_tournament():
    g = build_sd_graph(RandomPriority.deterministic([0, 1, 2, 3]))
    assert g.edges() == {(i, j) for i in range(4) for j in range(4) if i < j}


def test_sd_graph_uniform_is_complete():
    g = build_sd_graph(RandomPriority.uniform(all_orders(3)))
    assert g.edges() == {(i, j) for i in range(3) for j in range(3) if i != j}


def test_condense_thm1():
    _, pr = load_fixture("thm1")
    cond = condense(build_sd_graph(pr))
    comps = {frozenset(c) for c in cond.components}
    assert comps == {frozenset({2, 3}), frozenset({0, 1})}
    top = cond.component_of[2]
    assert cond.in_degree(top) == 0 and cond.sources() == [top]
    assert cond.layers() == [(2, 3), (0, 1)]


def test_condense_chain_and_single():
    cond = condense(build_sd_graph(RandomPriority.deterministic([2, 0, 1])))
    assert cond.layers() == [(2,), (0,), (1,)]
    cond = condense(build_sd_graph(RandomPriority.uniform(all_orders(3))))
    assert cond.components == ((0, 1, 2),)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 7), st.integers(1, 5), st.integers(0, 10**6))
def test_condensation_matches_networkx(n, k, seed):
    pr = random_priority(random.Random(seed), n, k)
    g = build_sd_graph(pr)
    ref = nx.DiGraph()
    ref.add_nodes_from(range(n))
    ref.add_edges_from(g.edges())
    ours = {frozenset(c) for c in condense(g).components}
    assert ours == {frozenset(c) for c in nx.strongly_connected_components(ref)}


def test_tarjan_and_bfs_helpers():
    succ = [[1], [2], [0, 3], [], [4]]
    comps = {frozenset(c) for c in strongly_connected_components(5, succ)}
    assert comps == {frozenset({0, 1, 2}), frozenset({3}), frozenset({4})}
    assert shortest_path(succ, 0, 3) == [0, 1, 2, 3]
    assert shortest_path(succ, 3, 0) is None


def test_ce_examples():
    assert cycle_elimination(SAME, RandomPriority.deterministic([0, 1])).rows == ((1, 0), (0, 1))
    assert cycle_elimination(SAME, RandomPriority.uniform([[0, 1], [1, 0]])).rows == ((H, H), (H, H))
    inst, pr = load_fixture("thm1")
    assert cycle_elimination(inst, pr).rows == (
        (0, 0, H, H),
        (0, 0, H, H),
        (1, 0, 0, 0),
        (0, 1, 0, 0),
    )


def test_ute_examples():
    assert unit_time_eating(SAME, RandomPriority.deterministic([0, 1])).rows == ((1, 0), (0, 1))
    assert unit_time_eating(SAME, RandomPriority.uniform([[0, 1], [1, 0]])).rows == ((H, H), (H, H))
    inst, pr = load_fixture("thm1")
    assert unit_time_eating(inst, pr).rows == (
        (H, 0, 0, H),
        (0, H, 0, H),
        (H, 0, H, 0),
        (0, H, H, 0),
    )


def test_disjoint_tops_get_top_item():
    inst = Instance.from_lists([["a", "b", "c"], ["b", "c", "a"], ["c", "a", "b"]])
    for pr in (RandomPriority.deterministic([2, 1, 0]), RandomPriority.uniform(all_orders(3))):
        for alg in (cycle_elimination, unit_time_eating):
            assert alg(inst, pr).rows == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_priority_size_mismatch():
    with pytest.raises(InvalidInput):
        cycle_elimination(SAME, RandomPriority.deterministic([0, 1, 2]))


@pytest.mark.parametrize("alg", [cycle_elimination, unit_time_eating])
def test_observer_conserves_mass(alg):
    rng = random.Random(7)
    inst = random_instance(rng, 5, 6)
    pr = random_priority(rng, 5, 3)
    states = []
    p = alg(inst, pr, observer=states.append)
    assert states
    times = [s.time for s in states]
    assert times == sorted(times)
    for s in states:
        eaten = sum(s.consumed)
        assert eaten + sum(s.remaining) == inst.m
        assert all(0 <= r <= 1 for r in s.remaining)
    assert states[-1].consumed == (1,) * inst.n
    # every event ends a phase or layer, or exhausts an item
    assert len(states) <= inst.n + inst.m
    assert [sum(r) for r in p.rows] == [1] * inst.n


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2), st.integers(1, 4), st.integers(0, 10**6))
def test_eating_properties(n, extra, k, seed):
    rng = random.Random(seed)
    inst = random_instance(rng, n, n + extra)
    pr = random_priority(rng, n, k)
    ps = probabilistic_serial_assignment(inst)
    # PS is envy-free under each agent's own preferences
    for i in range(n):
        for j in range(n):
            assert sd_dominates(ps[i], ps[j], inst.preferences[i])
    ce = cycle_elimination(inst, pr)
    ute = unit_time_eating(inst, pr)
    assert check_oe(ps, inst) and check_oe(ce, inst) and check_oe(ute, inst)
    assert check_sef(ce, pr, inst) and check_sef(ute, pr, inst)
    assert check_prop(ute, pr, inst)


def test_uniform_priority_reduces_to_ps():
    rng = random.Random(3)
    for _ in range(20):
        inst = random_instance(rng, 4, 5)
        pr = RandomPriority.uniform(all_orders(4))
        ps = probabilistic_serial_assignment(inst)
        assert cycle_elimination(inst, pr) == ps
        assert unit_time_eating(inst, pr) == ps
