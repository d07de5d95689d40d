import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legalsys.graph import (
    Graph, GraphFormatError, Matching, complement, connected_components, d0_short_path_violation,
    from_hex, greedy_maximal_matching, is_connected_subset, is_maximal_matching, k23_witness,
    members, to_hex, vset,
)

from oracles import codegree_max, edges_of, uf_connected


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, b in zip(pairs, mask) if b])


def all_graphs(n):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for code in range(1 << len(pairs)):
        yield Graph.from_edges(n, [p for i, p in enumerate(pairs) if code >> i & 1])


# -- connectivity --------------------------------------------------------------


def test_connected_examples(cherry):
    assert is_connected_subset(cherry, 0b111)
    assert not is_connected_subset(cherry, 0b101)
    assert not is_connected_subset(cherry, 0)
    assert not is_connected_subset(Graph.complete(4), 0)


@pytest.mark.parametrize("n", range(1, 6))
def test_connected_matches_union_find_small(n):
    # n <= 5 here; the full n = 6 sweep runs in the acceptance suite
    for g in all_graphs(n):
        for s in range(1 << n):
            assert is_connected_subset(g, s) == uf_connected(g, members(s))


@given(graphs())
def test_components_partition(g):
    comps = connected_components(g)
    union = 0
    for c in comps:
        assert is_connected_subset(g, c)
        assert not union & c
        union |= c
    assert union == g.vertex_set


# -- complement ----------------------------------------------------------------


def test_complement_examples(cherry):
    assert complement(Graph.complete(4)) == Graph.empty(4)
    assert complement(Graph.empty(3)) == Graph.complete(3)
    assert edges_of(complement(cherry)) == [(0, 2)]


@given(graphs())
def test_complement_involution(g):
    h = complement(g)
    assert complement(h) == g
    assert g.edge_count + h.edge_count == g.n * (g.n - 1) // 2
    for v in range(g.n):
        assert not h.rows[v] >> v & 1


@given(graphs())
def test_degree_sum(g):
    assert int(g.degrees.sum()) == 2 * g.edge_count
    assert list(g.edges()) == edges_of(g)


# -- matchings -----------------------------------------------------------------


def test_matching_examples():
    assert greedy_maximal_matching(Graph.empty(4), 0).pairs == ()
    assert greedy_maximal_matching(Graph.from_edges(2, [(0, 1)]), 0).pairs == ((0, 1),)
    tri = Graph.complete(3)
    m = greedy_maximal_matching(tri, 5)
    assert len(m) == 1
    left = members(tri.vertex_set & ~m.covered)[0]
    assert all(tri.has_edge(left, x) for x in members(m.covered))


@given(graphs(max_n=12), st.integers(0, 2**32))
def test_matching_is_maximal(g, seed):
    m = greedy_maximal_matching(g, seed)
    assert is_maximal_matching(g, m)
    assert m == greedy_maximal_matching(g, seed)


# -- K_{2,3} -------------------------------------------------------------------


def test_k23_examples():
    w = k23_witness(Graph.complete_bipartite(2, 3))
    assert w == ((0, 1), (2, 3, 4))
    assert k23_witness(Graph.path(10)) is None
    assert k23_witness(Graph.star(6)) is None
    assert k23_witness(Graph.cycle(4)) is None


@settings(max_examples=60)
@given(graphs(max_n=14))
def test_k23_matches_codegree_oracle(g):
    w = k23_witness(g)
    assert (w is None) == (codegree_max(g) <= 2)
    if w is not None:
        (u, v), common = w
        assert len(set(common)) == 3
        assert all(g.has_edge(u, c) and g.has_edge(v, c) for c in common)


# -- short D0 paths ------------------------------------------------------------


def test_d0_path_examples():
    p6 = Graph.path(6)
    assert d0_short_path_violation(p6, vset([2]), 4) is None
    star = Graph.star(2)
    assert d0_short_path_violation(star, vset([1, 2]), 4) == [1, 0, 2]
    assert d0_short_path_violation(p6, vset([0, 5]), 4) is None
    assert d0_short_path_violation(p6, vset([0, 4]), 4) == [0, 1, 2, 3, 4]


@given(graphs(max_n=10), st.integers(0, 2**10 - 1))
def test_d0_path_is_real_path(g, raw):
    d0 = raw & g.vertex_set
    path = d0_short_path_violation(g, d0, 4)
    if path is None:
        return
    assert 2 <= len(path) <= 5 and len(set(path)) == len(path)
    assert d0 >> path[0] & 1 and d0 >> path[-1] & 1
    assert all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


# -- file format ---------------------------------------------------------------


@given(graphs(max_n=12))
def test_text_roundtrip(g):
    assert Graph.parse(g.to_text()) == g


def test_parse_comments_and_blanks():
    g = Graph.parse("# cherry\n3 2\n\n0 1\n# mid\n1 2\n")
    assert g == Graph.path(3)


@pytest.mark.parametrize("text", ["", "garbage\n", "3 2\n0 1\n", "3 1\n0 3\n", "3 1\n1 0\n", "3 1\n1 1\n", "2 1\n0 x\n"])
def test_parse_errors(text):
    with pytest.raises(GraphFormatError):
        Graph.parse(text)


def test_hex_roundtrip():
    assert from_hex(to_hex(0)) == 0
    assert from_hex(to_hex(vset([0, 70, 3]))) == vset([0, 3, 70])


def test_matching_covered():
    assert Matching(((0, 2), (3, 5))).covered == vset([0, 2, 3, 5])
