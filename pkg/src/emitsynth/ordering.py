"""Emission orderings: scoring, constructive heuristics and local search.

The score of an ordering is the maximal height it induces, i.e. the number
of emitters needed. Finding the best ordering is NP-complete, so this module
offers cheap constructive orderings plus a hill climb over adjacent swaps.

Every cut is evaluated on its own: for a graph, ``h(x)`` is the GF(2) rank of
the adjacency block between the first ``x`` emitted vertices and the rest;
for a general stabilizer target it is ``rank(rows restricted to the last
n - x qubits) + x - n``. Swapping the photons at positions ``k`` and ``k+1``
changes only the cut ``x = k+1``, which is all a search step recomputes.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Sequence, Union

import numpy as np

from .gf2 import bits, rank
from .graphs import Graph, check_ordering
from .pauli import StabilizerTableau

__all__ = ["Target", "cut_heights", "score", "heuristics", "local_search", "best_ordering"]

Target = Union[Graph, StabilizerTableau]


def _size(target: Target) -> int:
    return target.n_vertices if isinstance(target, Graph) else target.n_photons


def _cut_function(target: Target) -> Callable[[Sequence[int], int], int]:
    """``cut(order, x)`` with ``order`` a 0-based vertex/qubit list."""
    n = _size(target)
    if isinstance(target, Graph):
        adj = target.adj

        def cut(order, x):
            mask = 0
            for v in order[x:]:
                mask |= 1 << v
            return rank(adj[v] & mask for v in order[:x])
    else:
        if target.n_emitters:
            raise ValueError("orderings apply to photon-only targets")
        rows = [(target._x[k], target._z[k]) for k in range(len(target))]

        def cut(order, x):
            mask = 0
            for v in order[x:]:
                mask |= 1 << v
            return rank((xr & mask) | ((zr & mask) << n) for xr, zr in rows) + x - n
    return cut


def cut_heights(target: Target, ordering: Sequence[int] | None = None) -> list[int]:
    """Height function ``h(0..n)`` of ``target`` emitted in ``ordering`` (1-based ids)."""
    n = _size(target)
    order = [v - 1 for v in check_ordering(ordering, n)]
    cut = _cut_function(target)
    return [cut(order, x) for x in range(n + 1)]


def score(target: Target, ordering: Sequence[int] | None = None) -> int:
    """Emitters needed for ``ordering``: the maximum of the height function."""
    return max(cut_heights(target, ordering))


def _objective(h: Sequence[int]) -> tuple[int, int]:
    return max(h), sum(h)


def _interaction_graph(target: Target) -> Graph:
    if isinstance(target, Graph):
        return target
    n = target.n_photons
    edges = set()
    for k in range(len(target)):
        sup = bits(target._x[k] | target._z[k])
        edges.update((a + 1, b + 1) for i, a in enumerate(sup) for b in sup[i + 1:])
    return Graph(n, edges)


def _bfs_levels(g: Graph, root: int, seen: list[bool]) -> list[int]:
    seen[root] = True
    queue, out = deque([root]), []
    while queue:
        v = queue.popleft()
        out.append(v)
        for w in bits(g.adj[v]):
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    return out


def _eccentricity(g: Graph, root: int) -> tuple[int, int]:
    """(depth, last vertex reached) of a BFS from ``root``."""
    dist = {root: 0}
    queue = deque([root])
    last = root
    while queue:
        v = queue.popleft()
        last = v
        for w in bits(g.adj[v]):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist[last], last


def _peripheral(g: Graph, start: int) -> int:
    # move to the farthest vertex while that deepens the BFS
    root = start
    depth, far = _eccentricity(g, root)
    while True:
        d, nxt = _eccentricity(g, far)
        if d <= depth:
            return root
        root, depth, far = far, d, nxt


def _bfs(g: Graph, peripheral: bool = False) -> tuple[int, ...]:
    n = g.n_vertices
    seen = [False] * n
    out: list[int] = []
    for start in sorted(range(n), key=lambda v: (-g.degree(v + 1), v)):
        if seen[start]:
            continue
        root = _peripheral(g, start) if peripheral else start
        out += _bfs_levels(g, root, seen)
    return tuple(v + 1 for v in out)


def _dfs(g: Graph) -> tuple[int, ...]:
    n = g.n_vertices
    seen = [False] * n
    out: list[int] = []
    for root in sorted(range(n), key=lambda v: (-g.degree(v + 1), v)):
        if seen[root]:
            continue
        stack = [root]
        while stack:
            v = stack.pop()
            if seen[v]:
                continue
            seen[v] = True
            out.append(v + 1)
            stack.extend(w for w in reversed(bits(g.adj[v])) if not seen[w])
    return tuple(out)


def _greedy(g: Graph) -> tuple[int, ...]:
    # next vertex: most edges into the emitted set, then fewest edges leaving it
    n = g.n_vertices
    if n == 0:
        return ()
    placed = 0
    out = []
    remaining = set(range(n))
    while remaining:
        v = min(remaining, key=lambda u: (-(g.adj[u] & placed).bit_count(),
                                          (g.adj[u] & ~placed).bit_count(), u))
        remaining.remove(v)
        placed |= 1 << v
        out.append(v + 1)
    return tuple(out)


def heuristics(target: Target) -> dict[str, tuple[int, ...]]:
    """Constructive orderings keyed by name: identity, bfs, dfs, greedy.

    BFS and DFS start at a maximum-degree vertex (lowest id on ties) and visit
    neighbours in increasing id. For BFS a second root, a pseudo-peripheral
    vertex of the same component, is also tried and the better-scoring of the
    two kept (a path is only emitted in a single sweep from one of its ends).
    General stabilizer targets use the graph linking qubits that share a
    generator.
    """
    g = _interaction_graph(target)
    bfs = min((_bfs(g), _bfs(g, peripheral=True)),
              key=lambda o: _objective(cut_heights(target, o)))
    return {
        "identity": tuple(range(1, g.n_vertices + 1)),
        "bfs": bfs,
        "dfs": _dfs(g),
        "greedy": _greedy(g),
    }


def local_search(target: Target, start: Sequence[int] | None = None, budget: int = 1000,
                 seed: int = 0) -> tuple[int, ...]:
    """Hill climb over adjacent transpositions.

    Minimizes ``(h_max, sum of h)``. Each of the ``budget`` steps proposes a
    random adjacent swap and keeps it unless it makes the objective worse, so
    plateaus can be crossed. The best ordering seen is returned; it is never
    worse than ``start``.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    n = _size(target)
    order = [v - 1 for v in check_ordering(start, n)]
    if n < 2:
        return tuple(v + 1 for v in order)
    cut = _cut_function(target)
    h = [cut(order, x) for x in range(n + 1)]
    current = best = _objective(h)
    best_order = list(order)
    rng = np.random.default_rng(seed)
    for k in rng.integers(0, n - 1, size=budget):
        k = int(k)
        order[k], order[k + 1] = order[k + 1], order[k]
        old = h[k + 1]
        h[k + 1] = cut(order, k + 1)
        cand = _objective(h)
        if cand <= current:
            current = cand
            if cand < best:
                best, best_order = cand, list(order)
        else:
            order[k], order[k + 1] = order[k + 1], order[k]
            h[k + 1] = old
    return tuple(v + 1 for v in best_order)


def best_ordering(target: Target, budget: int = 1000, seed: int = 0) -> tuple[int, ...]:
    """Best constructive ordering, refined by :func:`local_search`."""
    cands = heuristics(target)
    start = min(cands.values(), key=lambda o: _objective(cut_heights(target, o)))
    return local_search(target, start, budget, seed)
