import itertools
import random
from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_orders, random_assignment, random_instance, random_priority
from fairassign.audit import check_oe
from fairassign.eating import cycle_elimination
from fairassign.fixtures import load_fixture
from fairassign.lottery import bvn_decompose, rsd, serial_dictatorship
from fairassign.model import Instance, RandomAssignment, RandomPriority, assignment_from_lottery

H = F(1, 2)
SAME = Instance.from_lists([["a", "b"], ["a", "b"]])


def test_serial_dictatorship_examples():
    assert serial_dictatorship([0, 1], SAME) == (0, 1)
    inst, _ = load_fixture("thm1")
    # order 4,2,3,1
    assert serial_dictatorship([3, 1, 2, 0], inst) == (3, 0, 2, 1)
    disjoint = Instance.from_lists([["a", "b", "c"], ["b", "a", "c"], ["c", "a", "b"]])
    for order in all_orders(3):
        assert serial_dictatorship(order, disjoint) == (0, 1, 2)


def test_rsd_examples():
    lot = rsd(SAME, RandomPriority.deterministic([1, 0]))
    assert lot.entries == (((1, 0), 1),)
    lot = rsd(SAME, RandomPriority.uniform([[0, 1], [1, 0]]))
    assert dict(lot.entries) == {(0, 1): H, (1, 0): H}


def test_rsd_inefficiency_matrix():
    inst, pr = load_fixture("rsd_inefficiency")
    assert len(pr) == 24
    p = assignment_from_lottery(rsd(inst, pr))
    hi, lo, q = F(5, 12), F(1, 12), F(1, 4)
    assert p.rows == ((hi, lo, q, q), (hi, lo, q, q), (lo, hi, q, q), (lo, hi, q, q))
    assert not check_oe(p, inst)


def test_bvn_examples():
    lot = bvn_decompose(RandomAssignment([[0, 1, 0], [0, 0, 1], [1, 0, 0]]))
    assert lot.entries == (((1, 2, 0), 1),)
    lot = bvn_decompose(RandomAssignment([[H, H], [H, H]]))
    assert dict(lot.entries) == {(0, 1): H, (1, 0): H}
    inst, pr = load_fixture("thm1")
    p = cycle_elimination(inst, pr)
    lot = bvn_decompose(p)
    assert len(lot) == 2
    assert assignment_from_lottery(lot) == p


def test_bvn_rectangular():
    p = RandomAssignment([[H, 0, H], [0, H, H]])
    lot = bvn_decompose(p)
    assert assignment_from_lottery(lot) == p
    assert all(len(f) == 2 for f, _ in lot.entries)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 8), st.integers(0, 3), st.integers(1, 8), st.integers(0, 10**6))
def test_bvn_round_trip(n, extra, k, seed):
    m = min(n + extra, 8)
    p = random_assignment(random.Random(seed), n, m, k)
    lot = bvn_decompose(p)
    assert assignment_from_lottery(lot) == p
    assert len(lot) <= (m - 1) ** 2 + 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2), st.integers(1, 4), st.integers(0, 10**6))
def test_rsd_matches_enumeration(n, extra, k, seed):
    rng = random.Random(seed)
    inst = random_instance(rng, n, n + extra)
    pr = random_priority(rng, n, k)
    expected: dict[tuple, F] = {}
    for order, w in pr.entries:
        taken: set[int] = set()
        f = [0] * n
        for i in order:
            f[i] = next(j for j in inst.preferences[i] if j not in taken)
            taken.add(f[i])
        expected[tuple(f)] = expected.get(tuple(f), 0) + w
    assert dict(rsd(inst, pr).entries) == expected


def test_all_permutation_matrices_decompose_to_themselves():
    for perm in itertools.permutations(range(4)):
        rows = [[1 if j == perm[i] else 0 for j in range(4)] for i in range(4)]
        assert bvn_decompose(RandomAssignment(rows)).entries == ((perm, 1),)
