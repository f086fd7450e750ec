import itertools
import math

import numpy as np
import pytest

from emitsynth.graphs import (FAMILIES, RGS_REDUCED_DELETED, Graph, GraphError, builtin,
                              builtin_graph, erdos_renyi, graph_stabilizers, parse_edge_list,
                              rank_height)
from emitsynth.pauli import height

FIG1A = [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]


def gf2_rank_dense(m: np.ndarray) -> int:
    """Plain row reduction on a 0/1 numpy matrix."""
    m = m.copy() % 2
    r = 0
    rows, cols = m.shape
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    return r


def oracle_heights(g: Graph, ordering) -> list[int]:
    a = g.matrix()
    idx = [v - 1 for v in ordering]
    a = a[np.ix_(idx, idx)]
    n = g.n_vertices
    return [gf2_rank_dense(a[:x, x:]) if 0 < x < n else 0 for x in range(n + 1)]


def test_parse_edge_list_worked_example():
    text = "# worked example\nn 4\n1 2\n1 3\n2 3\n2 4\n3 4\n3 4\n"
    g = parse_edge_list(text)
    assert g == Graph(4, FIG1A)
    assert g.n_edges == 5
    rows = [str(r) for r in graph_stabilizers(g).rows]
    assert rows == ["+XZZI", "+ZXZZ", "+ZZXZ", "+IZZX"]


def test_parse_edge_list_single_vertex():
    g = parse_edge_list("n 1\n")
    assert g.n_vertices == 1 and g.n_edges == 0
    assert [str(r) for r in graph_stabilizers(g).rows] == ["+X"]


@pytest.mark.parametrize("text, needle", [
    ("1 1\n", "self-loop"),
    ("1 2 3\n", "line 1"),
    ("1 x\n", "line 1"),
    ("n 3\n1 4\n", "line 2"),
    ("0 1\n", "out of range"),
])
def test_parse_edge_list_errors(text, needle):
    with pytest.raises(GraphError, match=needle):
        parse_edge_list(text)


def test_graph_matrix_is_symmetric():
    g = erdos_renyi(12, 0.4, 5)
    a = g.matrix()
    assert (a == a.T).all() and not a.diagonal().any()
    assert Graph.from_matrix(a) == g


def test_path_stabilizers():
    g, order = builtin_graph("line", n=3)
    assert [str(r) for r in graph_stabilizers(g, order).rows] == ["+XZI", "+ZXZ", "+IZX"]


def test_graph_stabilizers_valid_for_random_graphs():
    for seed in range(30):
        g = erdos_renyi(10, 0.5, seed)
        graph_stabilizers(g, tuple(np.random.default_rng(seed).permutation(10) + 1)).validate()


def test_rank_height_examples():
    g = Graph(4, FIG1A)
    assert rank_height(g).h_max == 2
    assert rank_height(Graph(5)).values == (0,) * 6
    k6 = Graph(6, itertools.combinations(range(1, 7), 2))
    for order in itertools.islice(itertools.permutations(range(1, 7)), 0, 720, 37):
        assert rank_height(k6, order).values == (0, 1, 1, 1, 1, 1, 0)
    assert oracle_heights(k6, range(1, 7)) == [0, 1, 1, 1, 1, 1, 0]


def test_rank_height_matches_dense_oracle_and_tableau():
    rng = np.random.default_rng(11)
    for trial in range(100):
        n = int(rng.integers(2, 33))
        g = erdos_renyi(n, float(rng.uniform(0.1, 0.9)), trial)
        order = tuple(int(v) + 1 for v in rng.permutation(n))
        rh = list(rank_height(g, order).values)
        assert rh == oracle_heights(g, order)
        assert rh == list(height(graph_stabilizers(g, order)).values)


def test_two_photon_graph_height():
    assert rank_height(Graph(2, [(1, 2)])).values == (0, 1, 0)


def test_relabel_invariance():
    rng = np.random.default_rng(3)
    for seed in range(20):
        g = erdos_renyi(9, 0.5, seed)
        perm = [int(v) + 1 for v in rng.permutation(9)]  # vertex v -> perm[v-1]
        order = [int(v) + 1 for v in rng.permutation(9)]
        g2 = g.relabel(perm)
        order2 = [perm[v - 1] for v in order]
        assert rank_height(g, order).values == rank_height(g2, order2).values


# -- random graphs -------------------------------------------------------------

def test_erdos_renyi_limits():
    g = erdos_renyi(7, 1.0, 0)
    assert g.n_edges == 21
    with pytest.raises(GraphError, match="no connected"):
        erdos_renyi(3, 0.0, 0, max_tries=20)
    with pytest.raises(GraphError):
        erdos_renyi(3, 1.5, 0)


def test_erdos_renyi_edge_count_statistics():
    mean, sd = 0.95 * 120, math.sqrt(120 * 0.95 * 0.05)
    for seed in range(20):
        g = erdos_renyi(16, 0.95, seed)
        assert g.is_connected()
        assert abs(g.n_edges - mean) <= 5 * sd


def test_erdos_renyi_reproducible():
    a = erdos_renyi(20, 0.3, 1234)
    b = erdos_renyi(20, 0.3, 1234)
    assert a == b and a.edges() == b.edges()
    assert a != erdos_renyi(20, 0.3, 1235)


def test_erdos_renyi_pinned_stream():
    # numpy PCG64 stream, one uniform per pair in lexicographic order, redrawn until connected
    pairs = list(itertools.combinations(range(1, 5), 2))
    rng = np.random.default_rng(42)
    while True:
        keep = rng.random(6) < 0.5
        expect = Graph(4, [e for e, k in zip(pairs, keep) if k])
        if expect.is_connected():
            break
    assert erdos_renyi(4, 0.5, 42) == expect


# -- families --------------------------------------------------------------------

def test_rgs_orderings():
    g, ext = builtin_graph("rgs", m=6, ordering="external-first")
    _, alt = builtin_graph("rgs", m=6, ordering="alternating")
    assert g.n_vertices == 12 and g.n_edges == 15 + 6
    assert rank_height(g, ext).h_max == 6
    assert rank_height(g, alt).h_max == 2
    assert sorted(ext) == sorted(alt) == list(range(1, 13))


def test_rgs_reduced_fixture():
    g, order = builtin_graph("rgs_reduced")
    assert len(RGS_REDUCED_DELETED) == 4
    assert g.n_edges == 15 - 4 + 6
    for u, v in RGS_REDUCED_DELETED:
        assert v not in g.neighbors(u)
    assert rank_height(g, order).h_max == 2


def test_modified_rgs_structure():
    for m in (4, 5):
        g, order = builtin_graph("modified_rgs", m=m)
        assert g.n_vertices == 6 * m
        assert g.is_connected()
        assert rank_height(g, order).h_max == 2
    with pytest.raises(GraphError):
        builtin_graph("modified_rgs", m=3)


def test_shor_generators():
    t, order = builtin("shor_plus")
    rows = [str(r) for r in t.rows]
    assert rows[2] == "+XXXXXXIII"
    assert rows[5] == "+IIIXXXXXX"
    assert rows[8] == "+ZZZZZZZZZ"
    assert rows[0] == "+ZZIIIIIII" and rows[7] == "+IIIIIIIZZ"
    t_minus, _ = builtin("shor_minus")
    assert str(t_minus.row(8)) == "-ZZZZZZZZZ"
    assert order == tuple(range(1, 10))
    assert height(t).h_max == 2


def test_other_families():
    g, _ = builtin_graph("ring", n=5)
    assert g.n_edges == 5 and all(g.degree(v) == 2 for v in range(1, 6))
    g, _ = builtin_graph("star", n=5)
    assert g.degree(1) == 4
    g, order = builtin_graph("grid", rows=4, cols=3)
    assert g.n_edges == 4 * 2 + 3 * 3
    assert rank_height(g, order).h_max == 3
    t, _ = builtin("line", n=2)
    assert [str(r) for r in t.rows] == ["+XZ", "+ZX"]


def test_builtin_errors():
    with pytest.raises(GraphError, match="unknown"):
        builtin("nope")
    with pytest.raises(GraphError):
        builtin("line", n=2, bogus=1)
    with pytest.raises(GraphError):
        builtin("shor_plus", m=3)
    assert "shor_minus" in FAMILIES and "grid" in FAMILIES


def test_disconnected_components():
    g = Graph(5, [(1, 2), (4, 5)])
    assert not g.is_connected()
    assert sorted(map(sorted, g.components())) == [[1, 2], [3], [4, 5]]
