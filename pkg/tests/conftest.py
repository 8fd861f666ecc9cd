import itertools
import random
import sys
from fractions import Fraction

from fairassign.model import Instance, Lottery, RandomPriority, assignment_from_lottery


def random_weights(rng: random.Random, k: int, max_den: int = 12) -> list[Fraction]:
    raw = [rng.randint(1, max_den) for _ in range(k)]
    total = sum(raw)
    return [Fraction(r, total) for r in raw]


def random_instance(rng: random.Random, n: int, m: int) -> Instance:
    prefs = []
    for _ in range(n):
        p = list(range(m))
        rng.shuffle(p)
        prefs.append(p)
    return Instance.from_lists(prefs)


def random_priority(rng: random.Random, n: int, k: int, max_den: int = 12) -> RandomPriority:
    orders = []
    for _ in range(k):
        o = list(range(n))
        rng.shuffle(o)
        orders.append(o)
    return RandomPriority(zip(orders, random_weights(rng, k, max_den)), n=n)


def random_lottery(rng: random.Random, n: int, m: int, k: int, max_den: int = 12) -> Lottery:
    entries = []
    for w in random_weights(rng, k, max_den):
        entries.append((rng.sample(range(m), n), w))
    return Lottery(entries, m)


def random_assignment(rng: random.Random, n: int, m: int, k: int | None = None):
    if k is None:
        k = rng.randint(1, 4)
    return assignment_from_lottery(random_lottery(rng, n, m, k))


def all_orders(n: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(n)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
