import io
import pickle

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from private_ppr.graph import (
    EdgeListFormat,
    EdgeListParseError,
    Graph,
    GraphError,
    load_edge_list,
    make_clique,
    make_random_regular,
    make_sbm,
    with_edge_toggled,
    write_edge_list,
)
from conftest import path_graph


def test_load_path():
    g = load_edge_list(b"0 1\n1 2\n")
    assert g.n == 3
    assert g.degrees.tolist() == [1, 2, 1]


def test_load_drops_duplicates_and_self_loops(caplog):
    g = load_edge_list(b"a b\nb a\na a\n")
    assert g.n == 2 and g.num_edges == 1
    assert g.degrees.tolist() == [1, 1]
    assert "dropped 1 duplicate edges and 1 self-loops" in caplog.text


def test_load_labels_in_first_appearance_order():
    g = load_edge_list(io.StringIO("# header\nz y\n\ny x\n"))
    assert g.labels == ("z", "y", "x")


def test_load_custom_delimiter():
    g = load_edge_list(b"a,b\nb,c\n", EdgeListFormat(comment="%", delimiter=","))
    assert g.num_edges == 2


def test_load_from_path(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("1 2\n2 3\n3 1\n")
    assert load_edge_list(str(path)) == make_clique(3)


def test_malformed_line_reports_line_number():
    with pytest.raises(EdgeListParseError) as info:
        load_edge_list(b"0 1\n# ok\n1 2 3\n")
    assert info.value.line_number == 3
    assert "line 3" in str(info.value)


@pytest.mark.parametrize("content", [b"", b"# nothing\n", b"a a\n"])
def test_empty_graph_is_an_error(content):
    with pytest.raises(GraphError):
        load_edge_list(content)


@pytest.mark.parametrize("n,edges,degree", [(2, 1, 1), (5, 10, 4), (101, 5050, 100)])
def test_clique(n, edges, degree):
    g = make_clique(n)
    assert g.num_edges == edges
    assert set(g.degrees.tolist()) == {degree}


def test_clique_too_small():
    with pytest.raises(GraphError):
        make_clique(1)


@pytest.mark.parametrize("seed", range(5))
def test_regular_4_3_is_k4(seed):
    assert make_random_regular(4, 3, seed) == make_clique(4)


def test_regular_degrees_and_determinism():
    a = make_random_regular(100, 10, 7)
    b = make_random_regular(100, 10, 7)
    assert set(a.degrees.tolist()) == {10}
    assert np.array_equal(a.edges(), b.edges())


def test_regular_parity_error():
    with pytest.raises(GraphError, match="even"):
        make_random_regular(5, 3, 0)


def test_regular_budget_exhausted_advises_seed():
    with pytest.raises(GraphError, match="another seed"):
        make_random_regular(8, 6, 0, max_attempts=0)


@given(st.integers(6, 40), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_regular_is_simple_and_regular(n, d, seed):
    if n * d % 2:
        n += 1
    g = make_random_regular(n, d, seed)
    assert np.all(g.degrees == d)
    edges = g.edges()
    assert np.all(edges[:, 0] < edges[:, 1])
    assert len({tuple(e) for e in edges.tolist()}) == len(edges)


def test_toggle_removes_from_k5():
    g = with_edge_toggled(make_clique(5), 0, 1)
    assert g.degrees.tolist() == [3, 3, 4, 4, 4]


def test_toggle_adds_to_path():
    assert with_edge_toggled(path_graph(3), 0, 2) == make_clique(3)


def test_toggle_self_loop_rejected():
    with pytest.raises(GraphError):
        with_edge_toggled(make_clique(3), 1, 1)


@given(st.integers(0, 9), st.integers(0, 9))
def test_toggle_is_an_involution(u, v):
    g = make_random_regular(10, 4, 1)
    if u == v:
        return
    once = with_edge_toggled(g, u, v)
    assert once.has_edge(u, v) != g.has_edge(u, v)
    assert abs(once.num_edges - g.num_edges) == 1
    assert with_edge_toggled(once, v, u) == g


def test_graph_is_immutable():
    g = make_clique(3)
    with pytest.raises(AttributeError):
        g.indices = None
    with pytest.raises(ValueError):
        g.indices[0] = 2


def test_pickle_roundtrip():
    g = load_edge_list(b"a b\nb c\n")
    h = pickle.loads(pickle.dumps(g))
    assert h == g and h.labels == g.labels


@given(st.sets(st.tuples(st.integers(0, 15), st.integers(0, 15)), min_size=1, max_size=40))
def test_write_then_load_roundtrip(pairs):
    pairs = {(min(u, v), max(u, v)) for u, v in pairs if u != v}
    if not pairs:
        return
    g = Graph.from_edges(16, sorted(pairs))
    buf = io.StringIO()
    write_edge_list(g, buf)
    h = load_edge_list(buf.getvalue().encode())
    # isolated nodes vanish and ids are relabelled, so compare labelled edge sets
    relabel = {frozenset((h.labels[u], h.labels[v])) for u, v in h.edges().tolist()}
    assert relabel == {frozenset((str(u), str(v))) for u, v in pairs}


def test_from_edges_rejects_bad_input():
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(1, 1)])


def test_adjacency_matches_neighbors():
    g = make_random_regular(30, 4, 3)
    dense = g.adjacency.toarray()
    assert np.array_equal(dense, dense.T)
    for v in range(g.n):
        assert np.flatnonzero(dense[v]).tolist() == g.neighbors(v).tolist()


def test_sbm_blocks_and_density():
    g, blocks = make_sbm([100, 100], 0.5, 0.02, seed=0)
    assert blocks.tolist() == [0] * 100 + [1] * 100
    edges = g.edges()
    same = blocks[edges[:, 0]] == blocks[edges[:, 1]]
    assert abs(same.sum() / (2 * 4950) - 0.5) < 0.03
    assert abs((~same).sum() / 10000 - 0.02) < 0.01
