"""Strongly connected components for small dense digraphs."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence


def strongly_connected_components(n: int, successors: Sequence[Iterable[int]]) -> list[list[int]]:
    """Iterative Tarjan; components come out in reverse topological order."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(successors[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(successors[w])))
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def shortest_path(successors: Sequence[Iterable[int]], src: int, dst: int, allowed: set[int] | None = None) -> list[int] | None:
    """BFS path ``[src, ..., dst]`` visiting neighbours in ascending order."""
    prev = {src: src}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst:
            path = [v]
            while v != src:
                v = prev[v]
                path.append(v)
            return path[::-1]
        for w in sorted(successors[v]):
            if w not in prev and (allowed is None or w in allowed):
                prev[w] = v
                queue.append(w)
    return None
