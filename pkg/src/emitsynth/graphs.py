"""Graphs, graph-state stabilizers, built-in target families and random graphs.

Vertex ids are 1-based everywhere. An *ordering* is a tuple listing vertex ids
in photon emission order: ``ordering[k]`` is the vertex emitted ``k+1``-th.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .gf2 import bits, rank
from .pauli import HeightProfile, PauliRow, StabilizerTableau

__all__ = [
    "GraphError",
    "Graph",
    "check_ordering",
    "parse_edge_list",
    "graph_stabilizers",
    "rank_height",
    "cut_rank",
    "erdos_renyi",
    "builtin",
    "builtin_graph",
    "FAMILIES",
]


class GraphError(ValueError):
    """Malformed graph input or invalid family parameters."""


class Graph:
    """Simple undirected graph stored as one neighbour bit set per vertex.

    Bit ``w - 1`` of ``adj[v - 1]`` is set iff ``v`` and ``w`` are adjacent,
    which is row ``v`` of the GF(2) adjacency matrix.
    """

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]] = ()):
        if n_vertices < 0:
            raise GraphError("negative vertex count")
        self.n_vertices = n_vertices
        adj = [0] * n_vertices
        for u, v in edges:
            if not (1 <= u <= n_vertices and 1 <= v <= n_vertices):
                raise GraphError(f"edge ({u}, {v}) has a vertex outside 1..{n_vertices}")
            if u == v:
                raise GraphError(f"self-loop on vertex {u}")
            adj[u - 1] |= 1 << (v - 1)
            adj[v - 1] |= 1 << (u - 1)
        self.adj = tuple(adj)

    @classmethod
    def from_matrix(cls, matrix) -> "Graph":
        a = np.asarray(matrix).astype(np.uint8) % 2
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GraphError("adjacency matrix must be square")
        if (a != a.T).any() or a.diagonal().any():
            raise GraphError("adjacency matrix must be symmetric with zero diagonal")
        n = a.shape[0]
        return cls(n, [(i + 1, j + 1) for i, j in zip(*np.nonzero(np.triu(a, 1)))])

    def matrix(self) -> np.ndarray:
        n = self.n_vertices
        a = np.zeros((n, n), dtype=np.uint8)
        for v, row in enumerate(self.adj):
            a[v, bits(row)] = 1
        return a

    def neighbors(self, v: int) -> list[int]:
        return [w + 1 for w in bits(self.adj[v - 1])]

    def degree(self, v: int) -> int:
        return self.adj[v - 1].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v in range(1, self.n_vertices + 1)
                for w in self.neighbors(v) if w > v]

    @property
    def n_edges(self) -> int:
        return sum(r.bit_count() for r in self.adj) // 2

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by smallest vertex."""
        seen = 0
        out = []
        for start in range(self.n_vertices):
            if seen >> start & 1:
                continue
            comp = 1 << start
            frontier = comp
            while frontier:
                nxt = 0
                for v in bits(frontier):
                    nxt |= self.adj[v]
                frontier = nxt & ~comp
                comp |= frontier
            seen |= comp
            out.append([v + 1 for v in bits(comp)])
        return out

    def is_connected(self) -> bool:
        return self.n_vertices > 0 and len(self.components()) == 1

    def subgraph(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled ``1..len(vertices)`` in the given order."""
        index = {v: k + 1 for k, v in enumerate(vertices)}
        return Graph(len(vertices), [(index[u], index[v]) for u, v in self.edges()
                                     if u in index and v in index])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed ``perm[v - 1]``."""
        return Graph(self.n_vertices, [(perm[u - 1], perm[v - 1]) for u, v in self.edges()])

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph({self.n_vertices}, {self.edges()})"


def check_ordering(ordering: Sequence[int] | None, n: int) -> tuple[int, ...]:
    """Validate an emission ordering; ``None`` means ``1..n``."""
    if ordering is None:
        return tuple(range(1, n + 1))
    ordering = tuple(int(v) for v in ordering)
    if sorted(ordering) != list(range(1, n + 1)):
        raise GraphError(f"ordering is not a permutation of 1..{n}")
    return ordering


def parse_edge_list(text: str) -> Graph:
    """Parse ``u v`` lines; ``n <count>`` header optional; ``#`` comments.

    Without a header the vertex count is the largest id seen.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or not parts[1].isdigit() or n is not None or edges:
                raise GraphError(f"line {lineno}: malformed header {raw!r}")
            n = int(parts[1])
            continue
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise GraphError(f"line {lineno}: expected 'u v', got {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise GraphError(f"line {lineno}: self-loop on vertex {u}")
        if u < 1 or v < 1 or (n is not None and max(u, v) > n):
            raise GraphError(f"line {lineno}: vertex id out of range")
        edges.append((u, v))
    if n is None:
        n = max((max(e) for e in edges), default=0)
    return Graph(n, edges)


def _position_adjacency(graph: Graph, ordering: Sequence[int]) -> list[int]:
    """Adjacency bit sets re-indexed by emission position (0-based)."""
    pos = [0] * graph.n_vertices
    for k, v in enumerate(ordering):
        pos[v - 1] = k
    out = [0] * graph.n_vertices
    for k, v in enumerate(ordering):
        row = 0
        for w in bits(graph.adj[v - 1]):
            row |= 1 << pos[w]
        out[k] = row
    return out


def graph_stabilizers(graph: Graph, ordering: Sequence[int] | None = None) -> StabilizerTableau:
    """Generators ``X_v prod_{w in N(v)} Z_w`` with qubits in emission order."""
    n = graph.n_vertices
    ordering = check_ordering(ordering, n)
    padj = _position_adjacency(graph, ordering)
    rows = [PauliRow(1 << k, padj[k], 0, n) for k in range(n)]
    return StabilizerTableau(rows, n_photons=n, validate=False)


def cut_rank(padj: Sequence[int], x: int) -> int:
    """GF(2) rank of the block between positions ``< x`` and ``>= x``."""
    return rank(row >> x for row in padj[:x])


def rank_height(graph: Graph, ordering: Sequence[int] | None = None) -> HeightProfile:
    """Height function from cut ranks of the adjacency matrix."""
    n = graph.n_vertices
    padj = _position_adjacency(graph, check_ordering(ordering, n))
    return HeightProfile(tuple(cut_rank(padj, x) for x in range(n + 1)), n)


def erdos_renyi(n: int, p: float, seed: int, max_tries: int = 1000) -> Graph:
    """Connected G(n, p) sample; disconnected draws are discarded.

    Uses ``numpy.random.default_rng(seed)`` (PCG64). Each attempt draws one
    uniform per vertex pair in lexicographic order ``(1,2), (1,3), ..., (n-1,n)``
    and keeps the pair when the draw is below ``p``.
    """
    if not 0.0 <= p <= 1.0:
        raise GraphError("edge probability must lie in [0, 1]")
    if n < 1:
        raise GraphError("need at least one vertex")
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(1, n + 1), 2))
    for _ in range(max_tries):
        keep = rng.random(len(pairs)) < p
        g = Graph(n, [e for e, k in zip(pairs, keep) if k])
        if g.is_connected():
            return g
    raise GraphError(f"no connected G({n}, {p}) sample in {max_tries} tries")


# -- built-in families --------------------------------------------------------

def _rgs(m: int, ordering: str = "alternating", deleted: Sequence[tuple[int, int]] = ()):
    # cores 1..m form a complete graph, leaf m+k hangs off core k
    if m < 2:
        raise GraphError("rgs needs m >= 2")
    deleted = {tuple(sorted(e)) for e in deleted}
    edges = [e for e in combinations(range(1, m + 1), 2) if e not in deleted]
    edges += [(k, m + k) for k in range(1, m + 1)]
    g = Graph(2 * m, edges)
    if ordering == "alternating":
        order = [v for k in range(1, m + 1) for v in (m + k, k)]
    elif ordering == "external-first":
        order = [*range(m + 1, 2 * m + 1), *range(1, m + 1)]
    else:
        raise GraphError(f"unknown rgs ordering {ordering!r}")
    return g, tuple(order)


# Core edges removed from the 6-core repeater state. Among all 4-edge
# deletions keeping two emitters under the alternating ordering, this is the
# lexicographically first one whose circuit needs 4 emitter CNOTs and 2
# measurements (no choice reaches a single measurement: the height function
# always has at least two descents).
RGS_REDUCED_DELETED = ((1, 3), (1, 4), (2, 4), (4, 5))


def _rgs_reduced(m: int = 6, ordering: str = "alternating"):
    if m != 6:
        raise GraphError("rgs_reduced is defined for m = 6 only")
    return _rgs(6, ordering, RGS_REDUCED_DELETED)


def _modified_rgs(m: int):
    """2m cores, each with two leaves; cores 2k-1 and 2k are not adjacent.

    Vertex ``3k-2`` is core ``k`` and ``3k-1``, ``3k`` are its leaves, so the
    identity ordering emits each core followed by its two leaves.
    """
    if m <= 3:
        raise GraphError("modified_rgs requires m > 3")
    core = [3 * k - 2 for k in range(1, 2 * m + 1)]
    edges = []
    for a, b in combinations(range(2 * m), 2):
        if a // 2 != b // 2:
            edges.append((core[a], core[b]))
    for c in core:
        edges += [(c, c + 1), (c, c + 2)]
    g = Graph(6 * m, edges)
    return g, tuple(range(1, 6 * m + 1))


def _line(n: int):
    if n < 1:
        raise GraphError("line needs n >= 1")
    return Graph(n, [(k, k + 1) for k in range(1, n)]), tuple(range(1, n + 1))


def _ring(n: int):
    if n < 3:
        raise GraphError("ring needs n >= 3")
    return Graph(n, [(k, k % n + 1) for k in range(1, n + 1)]), tuple(range(1, n + 1))


def _star(n: int):
    if n < 2:
        raise GraphError("star needs n >= 2")
    return Graph(n, [(1, k) for k in range(2, n + 1)]), tuple(range(1, n + 1))


def _grid(rows: int, cols: int):
    if rows < 1 or cols < 1:
        raise GraphError("grid needs positive dimensions")
    vid = lambda r, c: r * cols + c + 1  # noqa: E731  row-major
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((vid(r, c), vid(r, c + 1)))
            if r + 1 < rows:
                edges.append((vid(r, c), vid(r + 1, c)))
    return Graph(rows * cols, edges), tuple(range(1, rows * cols + 1))


_GRAPH_FAMILIES = {
    "rgs": _rgs,
    "rgs_reduced": _rgs_reduced,
    "modified_rgs": _modified_rgs,
    "line": _line,
    "ring": _ring,
    "star": _star,
    "grid": _grid,
}


def _shor(sign: int) -> StabilizerTableau:
    labels = []
    for j in (1, 2, 4, 5, 7, 8):
        s = ["I"] * 9
        s[j - 1] = s[j] = "Z"
        labels.append((j, "".join(s)))
    labels.append((3, "X" * 6 + "III"))
    labels.append((6, "III" + "X" * 6))
    labels.sort()
    labels.append((9, ("+" if sign > 0 else "-") + "Z" * 9))
    return StabilizerTableau([PauliRow.from_label(lab) for _, lab in labels])


FAMILIES = (*_GRAPH_FAMILIES, "shor_plus", "shor_minus")


def builtin_graph(family: str, **params) -> tuple[Graph, tuple[int, ...]]:
    """Graph and emission ordering of a graph-state family.

    ``rgs(m, ordering)`` with ordering ``"alternating"`` or ``"external-first"``;
    ``rgs_reduced(m=6)``; ``modified_rgs(m)`` with ``m > 3``; ``line(n)``;
    ``ring(n)``; ``star(n)``; ``grid(rows, cols)`` in row-major order.
    """
    try:
        fn = _GRAPH_FAMILIES[family]
    except KeyError:
        raise GraphError(f"unknown graph family {family!r}") from None
    try:
        return fn(**params)
    except TypeError as exc:
        raise GraphError(f"bad parameters for {family}: {exc}") from None


def builtin(family: str, **params) -> tuple[StabilizerTableau, tuple[int, ...]]:
    """Target stabilizers (qubits in emission order) and the emission ordering.

    Besides the graph families of :func:`builtin_graph`, ``shor_plus`` and
    ``shor_minus`` give the nine-qubit Shor code with the last generator
    ``+Z^9`` or ``-Z^9`` (the code's logical X in this labelling).
    """
    if family in ("shor_plus", "shor_minus"):
        if params:
            raise GraphError(f"{family} takes no parameters")
        return _shor(1 if family == "shor_plus" else -1), tuple(range(1, 10))
    g, order = builtin_graph(family, **params)
    return graph_stabilizers(g, order), order
