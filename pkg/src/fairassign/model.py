"""Core types for random assignment under an uncertain priority.

Agents and items are addressed by integer index internally; the names given
in an instance document are kept on :class:`Instance` for serialization.
Every probability is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

ZERO = Fraction(0)
ONE = Fraction(1)

DUMMY_PREFIX = "__dummy_"


class InvalidInput(ValueError):
    """Raised when a document or object violates a model invariant."""


def parse_rational(text: Any) -> Fraction:
    """Parse ``"num/den"`` (or an integer string) into an exact Fraction."""
    if isinstance(text, bool):
        raise InvalidInput(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidInput(f"rationals must be given as 'num/den' strings, got {text!r}")
    try:
        num, _, den = text.strip().partition("/")
        value = Fraction(int(num), int(den)) if den else Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational: {text!r}") from exc
    return value


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _check_permutation(seq: Sequence[int], size: int, what: str) -> None:
    if len(seq) != size or sorted(seq) != list(range(size)):
        raise InvalidInput(f"{what} is not a bijection over {size} elements: {list(seq)}")


@dataclass(frozen=True)
class Instance:
    """Agents, items and strict preferences.

    ``preferences[i]`` lists item indices from most to least preferred.
    """

    agents: tuple[str, ...]
    items: tuple[str, ...]
    preferences: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(set(self.agents)) != len(self.agents):
            raise InvalidInput("duplicate agent identifiers")
        if len(set(self.items)) != len(self.items):
            raise InvalidInput("duplicate item identifiers")
        if len(self.preferences) != len(self.agents):
            raise InvalidInput("one preference list is required per agent")
        for name, pref in zip(self.agents, self.preferences):
            _check_permutation(pref, len(self.items), f"preference of agent {name}")
        if len(self.items) < len(self.agents):
            raise InvalidInput("fewer items than agents; pad with dummy items first")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.items)

    @cached_property
    def rank(self) -> tuple[tuple[int, ...], ...]:
        """``rank[i][j]`` is the 0-based position of item j in agent i's list."""
        out = []
        for pref in self.preferences:
            r = [0] * self.m
            for pos, item in enumerate(pref):
                r[item] = pos
            out.append(tuple(r))
        return tuple(out)

    def prefers(self, i: int, a: int, b: int) -> bool:
        """True iff agent i strictly prefers item a to item b."""
        return self.rank[i][a] < self.rank[i][b]

    @cached_property
    def agent_index(self) -> dict[str, int]:
        return {a: k for k, a in enumerate(self.agents)}

    @cached_property
    def item_index(self) -> dict[str, int]:
        return {a: k for k, a in enumerate(self.items)}

    @classmethod
    def from_lists(
        cls,
        preferences: Sequence[Sequence[Any]],
        agents: Sequence[str] | None = None,
        items: Sequence[str] | None = None,
    ) -> Instance:
        """Build an instance from per-agent lists of item names or indices.

        Missing item names default to ``a, b, c, ...`` when there are at most 26
        items and ``i1, i2, ...`` otherwise. Agent names default to ``1..n``.
        """
        n = len(preferences)
        if items is None:
            m = len(preferences[0]) if preferences else 0
            items = [chr(ord("a") + k) for k in range(m)] if m <= 26 else [f"i{k + 1}" for k in range(m)]
        if agents is None:
            agents = [str(k + 1) for k in range(n)]
        lookup = {name: k for k, name in enumerate(items)}
        prefs = []
        for pref in preferences:
            prefs.append(tuple(p if isinstance(p, int) else lookup[p] for p in pref))
        return cls(tuple(agents), tuple(items), tuple(prefs))


def padded(agents: Sequence[str], items: Sequence[str], preferences: Sequence[Sequence[int]]) -> Instance:
    """Append dummy items, least preferred by everyone, until m >= n."""
    items = list(items)
    prefs = [list(p) for p in preferences]
    k = 0
    while len(items) < len(agents):
        k += 1
        name = f"{DUMMY_PREFIX}{k}"
        if name in items:
            raise InvalidInput(f"item name {name} is reserved for padding")
        items.append(name)
        for p in prefs:
            p.append(len(items) - 1)
    return Instance(tuple(agents), tuple(items), tuple(tuple(p) for p in prefs))


def priority_positions(order: Sequence[int]) -> list[int]:
    """Map a priority order (agents best-first) to 1-based positions sigma(i)."""
    pos = [0] * len(order)
    for r, agent in enumerate(order):
        pos[agent] = r + 1
    return pos


@dataclass(frozen=True)
class RandomPriority:
    """A distribution over simple priorities.

    Each entry is ``(order, weight)`` where ``order`` lists agents from highest
    to lowest priority. Duplicate orders are merged on construction.
    """

    entries: tuple[tuple[tuple[int, ...], Fraction], ...]
    n: int

    def __init__(self, entries: Iterable[tuple[Sequence[int], Any]], n: int | None = None):
        merged: dict[tuple[int, ...], Fraction] = {}
        for order, weight in entries:
            order = tuple(order)
            weight = Fraction(weight)
            if weight <= 0:
                raise InvalidInput(f"priority weights must be positive, got {weight}")
            merged[order] = merged.get(order, ZERO) + weight
        if not merged:
            raise InvalidInput("a random priority needs at least one order")
        if n is None:
            n = len(next(iter(merged)))
        for order in merged:
            _check_permutation(order, n, "priority order")
        total = sum(merged.values(), ZERO)
        if total != 1:
            raise InvalidInput(f"priority weights sum to {total}, not 1")
        object.__setattr__(self, "entries", tuple(merged.items()))
        object.__setattr__(self, "n", n)

    @classmethod
    def deterministic(cls, order: Sequence[int]) -> RandomPriority:
        return cls([(order, ONE)])

    @classmethod
    def uniform(cls, orders: Sequence[Sequence[int]]) -> RandomPriority:
        w = Fraction(1, len(orders))
        return cls([(o, w) for o in orders], n=len(orders[0]))

    def __len__(self) -> int:
        return len(self.entries)

    def common_denominator(self) -> int:
        return math.lcm(*(w.denominator for _, w in self.entries))

    @cached_property
    def rank_counts(self) -> tuple[tuple[int, ...], ...]:
        """Integer rank distributions scaled by :meth:`common_denominator`.

        ``rank_counts[i][r]`` equals ``D * Pr[agent i is ranked r+1]``.
        """
        d = self.common_denominator()
        counts = [[0] * self.n for _ in range(self.n)]
        for order, w in self.entries:
            scaled = w.numerator * (d // w.denominator)
            for r, agent in enumerate(order):
                counts[agent][r] += scaled
        return tuple(tuple(row) for row in counts)

    @cached_property
    def precedence(self) -> tuple[tuple[Fraction, ...], ...]:
        """``precedence[i][j]`` is Pr[sigma(i) < sigma(j)]."""
        out = [[ZERO] * self.n for _ in range(self.n)]
        for order, w in self.entries:
            for r, i in enumerate(order):
                row = out[i]
                for j in order[r + 1:]:
                    row[j] += w
        return tuple(tuple(row) for row in out)


def rank_distribution(priority: RandomPriority, i: int) -> tuple[Fraction, ...]:
    """Probability that agent i occupies each priority position (1-based r -> index r-1)."""
    probs = [ZERO] * priority.n
    for order, w in priority.entries:
        probs[order.index(i)] += w
    return tuple(probs)


@dataclass(frozen=True)
class RandomAssignment:
    """Exact n x m matrix of allocation probabilities."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __init__(self, rows: Iterable[Iterable[Any]]):
        rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if not rows:
            raise InvalidInput("empty assignment")
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise InvalidInput("ragged assignment matrix")
        if m < len(rows):
            raise InvalidInput("assignment has fewer items than agents")
        cols = [ZERO] * m
        for i, row in enumerate(rows):
            total = ZERO
            for j, x in enumerate(row):
                if x:
                    if x < 0 or x > 1:
                        raise InvalidInput(f"entry ({i},{j}) = {x} outside [0,1]")
                    total += x
                    cols[j] += x
            if total != 1:
                raise InvalidInput(f"row {i} sums to {total}, not 1")
        for j, c in enumerate(cols):
            if c > 1:
                raise InvalidInput(f"column {j} sums to {c} > 1")
            if m == len(rows) and c != 1:
                raise InvalidInput(f"column {j} sums to {c}, not 1 (square assignment)")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, idx: int) -> tuple[Fraction, ...]:
        return self.rows[idx]

    def column_sums(self) -> list[Fraction]:
        return [sum((row[j] for row in self.rows), ZERO) for j in range(self.m)]


SimpleAssignment = tuple[int, ...]
"""``f[i]`` is the item index assigned to agent i; entries are distinct."""


@dataclass(frozen=True)
class Lottery:
    """A distribution over simple assignments; duplicates merged on construction."""

    entries: tuple[tuple[SimpleAssignment, Fraction], ...]
    m: int

    def __init__(self, entries: Iterable[tuple[Sequence[int], Any]], m: int):
        merged: dict[SimpleAssignment, Fraction] = {}
        for f, w in entries:
            f = tuple(f)
            w = Fraction(w)
            if w <= 0:
                raise InvalidInput(f"lottery weights must be positive, got {w}")
            if len(set(f)) != len(f):
                raise InvalidInput(f"assignment {f} is not injective")
            if any(j < 0 or j >= m for j in f):
                raise InvalidInput(f"assignment {f} references an unknown item")
            merged[f] = merged.get(f, ZERO) + w
        if not merged:
            raise InvalidInput("empty lottery")
        sizes = {len(f) for f in merged}
        if len(sizes) != 1:
            raise InvalidInput("lottery assignments cover different agent sets")
        total = sum(merged.values(), ZERO)
        if total != 1:
            raise InvalidInput(f"lottery weights sum to {total}, not 1")
        object.__setattr__(self, "entries", tuple(merged.items()))
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return len(self.entries[0][0])

    def __len__(self) -> int:
        return len(self.entries)


def assignment_from_lottery(lottery: Lottery) -> RandomAssignment:
    rows = [[ZERO] * lottery.m for _ in range(lottery.n)]
    for f, w in lottery.entries:
        for i, j in enumerate(f):
            rows[i][j] += w
    return RandomAssignment(rows)


def is_valid_simple(f: Sequence[int], m: int) -> bool:
    return len(set(f)) == len(f) and all(0 <= j < m for j in f)


# ---------------------------------------------------------------------------
# JSON documents


def load_instance(document: str | Mapping[str, Any]) -> tuple[Instance, RandomPriority]:
    """Parse and validate an instance document (JSON text or decoded mapping)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"malformed JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise InvalidInput("instance document must be a JSON object")
    for key in ("agents", "items", "preferences", "priority"):
        if key not in document:
            raise InvalidInput(f"instance document is missing '{key}'")
    agents = [str(a) for a in document["agents"]]
    items = [str(x) for x in document["items"]]
    if len(set(agents)) != len(agents):
        raise InvalidInput("duplicate agent identifiers")
    if len(set(items)) != len(items):
        raise InvalidInput("duplicate item identifiers")
    item_idx = {x: k for k, x in enumerate(items)}
    agent_idx = {a: k for k, a in enumerate(agents)}

    raw_prefs = document["preferences"]
    if not isinstance(raw_prefs, Mapping) or set(map(str, raw_prefs)) != set(agents):
        raise InvalidInput("preferences must give exactly one list per agent")
    prefs = []
    for a in agents:
        lst = raw_prefs[a]
        try:
            pref = [item_idx[str(x)] for x in lst]
        except KeyError as exc:
            raise InvalidInput(f"agent {a} ranks unknown item {exc.args[0]}") from None
        _check_permutation(pref, len(items), f"preference of agent {a}")
        prefs.append(pref)
    inst = padded(agents, items, prefs)

    entries = []
    for entry in document["priority"]:
        try:
            order = [agent_idx[str(a)] for a in entry["order"]]
        except KeyError as exc:
            raise InvalidInput(f"priority references unknown agent or field {exc.args[0]}") from None
        _check_permutation(order, len(agents), "priority order")
        entries.append((order, parse_rational(entry["weight"])))
    return inst, RandomPriority(entries, n=len(agents))


def dump_instance(inst: Instance, priority: RandomPriority) -> dict[str, Any]:
    return {
        "agents": list(inst.agents),
        "items": list(inst.items),
        "preferences": {a: [inst.items[j] for j in inst.preferences[i]] for i, a in enumerate(inst.agents)},
        "priority": [
            {"order": [inst.agents[i] for i in order], "weight": format_rational(w)}
            for order, w in priority.entries
        ],
    }


def assignment_to_json(p: RandomAssignment, inst: Instance) -> dict[str, Any]:
    return {
        "matrix": {
            a: {x: format_rational(p[i][j]) for j, x in enumerate(inst.items)}
            for i, a in enumerate(inst.agents)
        }
    }


def assignment_from_json(
    document: Mapping[str, Any], inst: Instance | None = None
) -> tuple[RandomAssignment, tuple[str, ...], tuple[str, ...]]:
    """Parse an assignment document.

    With an instance, rows/columns are aligned to its agents and items (missing
    entries are zero). Without one, names are taken in document order.
    Returns ``(P, agent_names, item_names)``.
    """
    if not isinstance(document, Mapping) or not isinstance(document.get("matrix"), Mapping):
        raise InvalidInput("assignment document must contain a 'matrix' object")
    matrix = document["matrix"]
    if inst is not None:
        agents, items = inst.agents, inst.items
        if set(map(str, matrix)) != set(agents):
            raise InvalidInput("assignment rows do not match the instance agents")
    else:
        agents = tuple(str(a) for a in matrix)
        seen: dict[str, None] = {}
        for row in matrix.values():
            for x in row:
                seen.setdefault(str(x), None)
        items = tuple(seen)
    item_idx = {x: k for k, x in enumerate(items)}
    rows = []
    for a in agents:
        row = [ZERO] * len(items)
        for x, v in matrix[a].items():
            if str(x) not in item_idx:
                raise InvalidInput(f"assignment references unknown item {x}")
            row[item_idx[str(x)]] = parse_rational(v)
        rows.append(row)
    return RandomAssignment(rows), agents, items


def lottery_to_json(lottery: Lottery, agents: Sequence[str], items: Sequence[str]) -> list[dict[str, Any]]:
    return [
        {"assignment": {agents[i]: items[j] for i, j in enumerate(f)}, "weight": format_rational(w)}
        for f, w in lottery.entries
    ]


def lottery_from_json(document: Sequence[Mapping[str, Any]], inst: Instance) -> Lottery:
    if not isinstance(document, Sequence) or isinstance(document, (str, bytes)):
        raise InvalidInput("lottery document must be a JSON list")
    entries = []
    for entry in document:
        try:
            mapping = entry["assignment"]
            if set(map(str, mapping)) != set(inst.agents):
                raise InvalidInput("lottery assignment does not cover exactly the instance agents")
            f = [inst.item_index[str(mapping[a])] for a in inst.agents]
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed lottery entry: {entry!r}") from exc
        entries.append((f, parse_rational(entry["weight"])))
    return Lottery(entries, m=inst.m)
