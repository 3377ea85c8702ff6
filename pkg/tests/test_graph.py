from __future__ import annotations

import itertools
import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphs import PRISM_TEXT, bipartite, complete, k4_minus_edge, octahedron, prism, triangle
from oracles import brute_cliques, brute_cut_vertices, brute_maxwell
from rigibound.graph import (
    ExtendedDegree,
    Graph,
    GraphError,
    ParseError,
    Pseudograph,
    block_cut_tree,
    build_pseudograph,
    connected_components,
    extended_degree,
    find_cliques,
    henneberg1_generate,
    maxwell_check,
    parse_graph,
    serialize_graph,
)


# -- parsing ------------------------------------------------------------------

def test_parse_triangle():
    g = parse_graph("3 3\n1 2\n2 3\n1 3")
    assert g.vertices == (1, 2, 3)
    assert g.edges == ((1, 2), (1, 3), (2, 3))


def test_parse_prism():
    g = parse_graph(PRISM_TEXT)
    assert g.n == 6 and g.m == 9
    assert (3, 6) in g.edges


def test_parse_self_loop_names_line():
    with pytest.raises(ParseError, match="line 2: self-loop"):
        parse_graph("2 1\n1 1")


def test_parse_duplicate_edge():
    with pytest.raises(ParseError, match="line 3: duplicate edge"):
        parse_graph("2 2\n1 2\n2 1")


@pytest.mark.parametrize("text", ["3 1\n1 x", "3 1\n1 2 3", "3\n", "3 1\n-1 2"])
def test_parse_malformed(text):
    with pytest.raises(ParseError):
        parse_graph(text)


def test_parse_comments_crlf_and_blank_lines():
    g = parse_graph("# a comment\r\n3 3\r\n\r\n1 2\r\n# mid\r\n2 3\r\n1 3\r\n")
    assert g == triangle()


def test_parse_edge_count_mismatch():
    with pytest.raises(ParseError, match="declares 3 edges"):
        parse_graph("3 3\n1 2\n2 3")


def test_parse_declared_isolated_vertices():
    g = parse_graph("4 1\n1 2")
    assert g.vertices == (0, 1, 2, 3)


def test_serialize_roundtrip_prism():
    g = prism()
    assert parse_graph(serialize_graph(g)) == g


@st.composite
def simple_graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    labels = draw(st.lists(st.integers(0, 60), min_size=n, max_size=n, unique=True))
    pairs = list(itertools.combinations(sorted(labels), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(edges, labels)


@given(simple_graphs())
def test_parse_serialize_identity(g):
    # canonical documents only mention vertices through edges
    g = Graph.from_edges(g.edges) if g.edges else g
    if g.m:
        text = serialize_graph(g)
        assert serialize_graph(parse_graph(text)) == text


def test_graph_rejects_bad_input():
    with pytest.raises(GraphError):
        Graph((1, 2), ((1, 1),))
    with pytest.raises(GraphError):
        Graph((1, 2), ((1, 2), (2, 1)))
    with pytest.raises(GraphError):
        Graph((1, 2), ((1, 3),))


# -- rigidity counts ------------------------------------------------------------

def test_maxwell_prism_passes():
    rep = maxwell_check(prism(), 2)
    assert rep.global_ok and not rep.necessary_only


def test_maxwell_k4_fails_d2():
    rep = maxwell_check(complete(4), 2)
    assert not rep.global_ok and not rep.count_ok
    assert rep.m == 6 and rep.required == 5


def test_maxwell_octahedron_d3():
    rep = maxwell_check(octahedron(), 3)
    assert rep.global_ok and rep.necessary_only
    assert brute_maxwell(octahedron(), 3)


def test_maxwell_invalid_dimension():
    with pytest.raises(GraphError):
        maxwell_check(triangle(), 1)


def test_maxwell_finds_overdense_subgraph():
    # K4 with a loosely attached triangle: right total count, dense core
    edges = list(itertools.combinations(range(1, 5), 2)) + [(4, 5), (5, 6), (4, 6)]
    g = Graph.from_edges(edges)
    assert g.m == 2 * g.n - 3
    rep = maxwell_check(g, 2)
    assert rep.count_ok and not rep.sparse
    assert rep.violating_edges > 2 * len(rep.violating_subgraph) - 3


@given(simple_graphs(max_n=8), st.sampled_from([2, 3]))
def test_maxwell_matches_brute_force(g, d):
    assert maxwell_check(g, d).global_ok == brute_maxwell(g, d)


@given(st.integers(4, 8), st.integers(0, 10 ** 6))
def test_maxwell_on_near_rigid_graphs(n, seed):
    # move one edge of a minimally rigid graph: the count stays, sparsity may break
    g = henneberg1_generate(n, 2, seed)
    rng = random.Random(seed)
    edges = list(g.edges)
    edges.pop(rng.randrange(len(edges)))
    free = [e for e in itertools.combinations(g.vertices, 2) if e not in g.edges]
    edges.append(rng.choice(free))
    h = Graph.from_edges(edges, g.vertices)
    assert maxwell_check(h, 2).global_ok == brute_maxwell(h, 2)


# -- generator -----------------------------------------------------------------

def test_henneberg_base_cases():
    assert henneberg1_generate(3, 2, 5) == triangle()
    g = henneberg1_generate(5, 3, 11)
    assert g.n == 5 and g.m == 9


def test_henneberg_seed_zero():
    g = henneberg1_generate(6, 2, 0)
    assert g.n == 6 and g.m == 9
    assert maxwell_check(g, 2).global_ok


def test_henneberg_deterministic():
    assert henneberg1_generate(9, 3, 4) == henneberg1_generate(9, 3, 4)


def test_henneberg_too_small():
    with pytest.raises(GraphError):
        henneberg1_generate(3, 3, 0)


@pytest.mark.parametrize("n", range(3, 13))
def test_henneberg_always_laman(n):
    for seed in range(15):
        assert maxwell_check(henneberg1_generate(n, 2, seed), 2).global_ok


# -- cliques and pseudographs ---------------------------------------------------------

def test_find_cliques_examples():
    assert find_cliques(triangle(), 2) == [(1, 2), (1, 3), (2, 3)]
    assert find_cliques(prism(), 3) == [(1, 2, 3), (4, 5, 6)]
    assert find_cliques(bipartite(3, 3), 3) == []


@given(simple_graphs(max_n=8), st.integers(2, 4))
def test_find_cliques_matches_brute_force(g, d):
    assert [list(c) for c in find_cliques(g, d)] == brute_cliques(g, d)


def test_build_pseudograph_prism():
    L = build_pseudograph(prism(), (1, 2))
    assert L.U == (3, 4, 5, 6)
    assert sorted(L.F) == [(3, 6), (4, 5), (4, 6), (5, 6)]
    assert L.H == {3: 2, 4: 1, 5: 1}
    degrees = {v: extended_degree(L, v) for v in L.U}
    assert degrees == {3: (3, 2), 4: (3, 1), 5: (3, 1), 6: (3, 0)}


def test_build_pseudograph_k4_minus_edge():
    L = build_pseudograph(k4_minus_edge(), (1, 2))
    assert L.U == (3, 4) and L.F == () and L.H == {3: 2, 4: 2}
    comps = connected_components(L)
    assert [(c.U, c.H) for c in comps] == [((3,), {3: 2}), ((4,), {4: 2})]


def test_build_pseudograph_triangle():
    L = build_pseudograph(triangle(), (1, 2))
    assert L.U == (3,) and L.F == () and L.H == {3: 2}


def test_build_pseudograph_rejects_non_clique():
    with pytest.raises(GraphError):
        build_pseudograph(prism(), (1, 5))


@given(st.integers(2, 4), st.integers(0, 10 ** 6), st.data())
def test_pseudograph_edge_count(d, seed, data):
    n = data.draw(st.integers(d + 1, 10))
    g = henneberg1_generate(n, d, seed)
    for k in find_cliques(g, d):
        L = build_pseudograph(g, k)
        assert len(L.F) + L.k == d * L.n
        for v in L.U:
            assert extended_degree(L, v).normal == L.normal_degree(v)


def test_connected_components_examples():
    L = build_pseudograph(prism(), (1, 2))
    assert connected_components(L) == [L]
    assert connected_components(Pseudograph.make([], [], {})) == []


def test_extended_degree_examples():
    L = build_pseudograph(prism(), (1, 2))
    assert extended_degree(L, 3) == ExtendedDegree(3, 2)
    assert extended_degree(L, 6) == ExtendedDegree(3, 0)
    single = Pseudograph.make([7], [], {7: 2})
    assert extended_degree(single, 7) == (2, 2)
    with pytest.raises(GraphError):
        extended_degree(L, 1)


# -- block-cut tree ------------------------------------------------------------

def test_bct_path():
    t = block_cut_tree(Graph.from_edges([(1, 2), (2, 3)]))
    assert sorted(map(sorted, t.blocks)) == [[1, 2], [2, 3]]
    assert t.cut_vertices == {2}
    assert len(t.edges) == 2


def test_bct_triangle():
    t = block_cut_tree(triangle())
    assert t.blocks == [frozenset({1, 2, 3})]
    assert not t.cut_vertices


def test_bct_bowtie():
    g = Graph.from_edges([(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)])
    t = block_cut_tree(g)
    assert len(t.blocks) == 2 and t.cut_vertices == {3}


def test_bct_disconnected_raises():
    with pytest.raises(GraphError):
        block_cut_tree(Graph.from_edges([(1, 2), (3, 4)]))


@st.composite
def connected_multigraphs(draw):
    n = draw(st.integers(1, 10))
    edges = [(draw(st.integers(0, i - 1)), i) for i in range(1, n)]
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8))
    edges += [tuple(sorted(e)) for e in extra if e[0] != e[1]]
    return list(range(n)), edges


@given(connected_multigraphs())
def test_bct_properties(data):
    vertices, edges = data
    L = Pseudograph.make(vertices, edges, {})
    t = block_cut_tree(L)
    assert t.cut_vertices == brute_cut_vertices(vertices, edges)
    assert len(t.nodes) == len(t.blocks) + len(t.cut_vertices)
    tree = nx.Graph()
    tree.add_nodes_from(range(len(t.nodes)))
    tree.add_edges_from(t.edges)
    assert nx.is_tree(tree)
    for a, b in t.edges:
        assert {t.nodes[a].kind, t.nodes[b].kind} == {"block", "cut"}
    for i, node in enumerate(t.nodes):
        if tree.degree(i) <= 1 and len(t.nodes) > 1:
            assert node.kind == "block"
    # the blocks agree with networkx on the underlying simple graph
    simple = nx.Graph(edges)
    simple.add_nodes_from(vertices)
    if simple.number_of_edges():
        ref = sorted(sorted(c) for c in nx.biconnected_components(simple))
        assert sorted(sorted(b) for b in t.blocks) == ref
