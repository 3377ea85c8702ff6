from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphs import bipartite, k4_minus_edge, octahedron, prism, triangle
from oracles import brute_orientations, brute_valid, dp_permanent, replicated_incidence
from rigibound._ryser import ryser_repeated
from rigibound.graph import (
    Graph,
    GraphError,
    Pseudograph,
    build_pseudograph,
    connected_components,
    find_cliques,
    henneberg1_generate,
)
from rigibound.orient import (
    DimensionMismatch,
    TimeLimitExceeded,
    b_from_permanent,
    count_valid_orientations,
    count_with_profile,
    embedding_bound_orientations,
    incidence_permanent,
    partial_profile_candidates,
    partial_profile_pseudograph,
    profile_count_from_permanent,
    pseudograph_permanent,
)

# frozen from the brute-force oracle (2^15 direction assignments)
K64_PROFILE_COUNT = {((1, 7), 2): 36, ((1, 7), 8): 30}


def prism_pseudograph():
    return build_pseudograph(prism(), (1, 2))


# -- examples ------------------------------------------------------------------

def test_prism_count():
    r = count_valid_orientations(prism_pseudograph(), 2)
    assert r.count == 2 and r.method == "backtracking"


def test_small_counts():
    assert count_valid_orientations(build_pseudograph(triangle(), (1, 2)), 2).count == 1
    assert count_valid_orientations(Pseudograph.make([1], [], {1: 3}), 2).count == 0
    assert count_valid_orientations(build_pseudograph(k4_minus_edge(), (1, 2)), 2).count == 1


def test_profile_examples():
    L = prism_pseudograph()
    assert count_with_profile(L, {v: 2 for v in L.U}).count == 2
    assert count_with_profile(Pseudograph.make([5], [], {5: 2}), {5: 2}).count == 1
    with pytest.raises(GraphError, match="invalid profile"):
        count_with_profile(L, {3: 2})


@pytest.mark.parametrize("key", sorted(K64_PROFILE_COUNT))
def test_k64_profile_fixture(key):
    g = bipartite(6, 4)
    assert find_cliques(g, 3) == []
    edge, partial = key
    L, profile = partial_profile_pseudograph(g, edge, partial)
    assert profile[partial] == 2 and all(profile[v] == 3 for v in L.U if v != partial)
    count = count_with_profile(L, profile).count
    assert count == K64_PROFILE_COUNT[key] > 0
    assert profile_count_from_permanent(pseudograph_permanent(L, profile), profile) == count
    # the partial vertex acts as a vertex with one extra hanging edge
    assert count_valid_orientations(L.with_hanging(partial, 1), 3).count == count


def test_k64_profile_matches_brute_force_oracle():
    g = bipartite(6, 4)
    for edge, partial in partial_profile_candidates(g, limit=6):
        L, profile = partial_profile_pseudograph(g, edge, partial)
        brute = brute_orientations(list(L.U), list(L.F), dict(L.H), profile)
        assert count_with_profile(L, profile).count == brute


def test_profile_partial_vertex_must_be_free():
    with pytest.raises(GraphError):
        partial_profile_pseudograph(bipartite(6, 4), (1, 7), 7)


def test_incidence_permanent_examples():
    assert incidence_permanent(prism(), (1, 2), 2) == 32
    assert incidence_permanent(triangle(), (1, 2), 2) == 2
    # vertex 4 has no edges outside the clique: zero row
    g = Graph.from_edges([(1, 2), (1, 3), (2, 3), (3, 5), (1, 5)], [4])
    with pytest.raises(DimensionMismatch):
        incidence_permanent(g, (1, 2), 2)
    g = Graph.from_edges([(1, 2), (1, 3), (2, 3), (3, 5), (1, 5), (5, 6), (3, 6), (1, 6), (2, 6)], [4])
    assert incidence_permanent(g, (1, 2), 2) == 0


def test_incidence_permanent_matches_dp_oracle():
    g = prism()
    for k in find_cliques(g, 2):
        assert incidence_permanent(g, k, 2) == dp_permanent(replicated_incidence(g, k, 2))


def test_b_from_permanent():
    assert b_from_permanent(32, 6, 2) == 2
    assert b_from_permanent(0, 6, 2) == 0
    assert b_from_permanent(2, 3, 2) == Fraction(1)


def test_embedding_bound_examples():
    assert embedding_bound_orientations(prism(), (1, 2), 2) == 32
    assert embedding_bound_orientations(triangle(), (1, 2), 2) == 2
    g = octahedron()
    L = build_pseudograph(g, (1, 2, 3))
    B = count_valid_orientations(L, 3).count
    assert B == brute_valid(L, 3)
    assert embedding_bound_orientations(g, (1, 2, 3), 3) == 8 * B


# -- properties ------------------------------------------------------------------

@st.composite
def pseudographs(draw, max_n=6, max_f=9):
    n = draw(st.integers(1, max_n))
    U = list(range(1, n + 1))
    F = []
    if n > 1:
        pairs = st.tuples(st.sampled_from(U), st.sampled_from(U)).filter(lambda e: e[0] != e[1])
        F = [tuple(sorted(e)) for e in draw(st.lists(pairs, max_size=max_f))]
    H = {v: draw(st.integers(0, 3)) for v in U}
    return Pseudograph.make(U, F, H)


@given(pseudographs(), st.integers(2, 3))
def test_count_matches_brute_force(L, d):
    assert count_valid_orientations(L, d).count == brute_valid(L, d)


@given(pseudographs(), st.data())
def test_profile_count_matches_brute_force(L, data):
    profile = {v: data.draw(st.integers(0, 4)) for v in L.U}
    brute = brute_orientations(list(L.U), list(L.F), dict(L.H), profile)
    assert count_with_profile(L, profile).count == brute


@given(pseudographs(), st.integers(2, 3))
def test_permanent_route_matches(L, d):
    profile = {v: d for v in L.U}
    if len(L.F) + L.k != d * L.n:
        with pytest.raises(DimensionMismatch):
            pseudograph_permanent(L, profile)
        assert count_valid_orientations(L, d).count == 0
        return
    per = pseudograph_permanent(L, profile)
    assert profile_count_from_permanent(per, profile) == count_valid_orientations(L, d).count


@given(pseudographs(max_n=5, max_f=6), st.integers(1, 3))
def test_ryser_matches_dp_permanent(L, d):
    rows, cols = list(L.U), [(a, b) for a, b in L.F]
    cols += [(v,) for v, c in L.hanging for _ in range(c)]
    if len(cols) != d * len(rows) or len(cols) > 14:
        return
    index = {v: i for i, v in enumerate(rows)}
    matrix = []
    for v in rows:
        matrix += [[1 if v in col else 0 for col in cols]] * d
    columns = [tuple(index[x] for x in col) for col in cols]
    assert ryser_repeated(columns, len(rows), [d] * len(rows), 10 ** 40) == dp_permanent(matrix)


@given(pseudographs(), st.integers(2, 3))
def test_component_multiplicativity(L, d):
    total = 1
    for c in connected_components(L):
        total *= count_valid_orientations(c, d).count
    assert count_valid_orientations(L, d).count == total


@given(pseudographs(), st.integers(2, 3))
def test_unbalanced_gives_zero(L, d):
    if len(L.F) + L.k != d * L.n:
        assert count_valid_orientations(L, d).count == 0


@given(st.integers(1, 8), st.integers(0, 10 ** 6), st.integers(2, 3))
def test_tree_count_is_zero_or_one(n, seed, d):
    rng = random.Random(seed)
    F = [(rng.randrange(1, i), i) for i in range(2, n + 1)]
    H = {v: rng.randrange(0, d + 1) for v in range(1, n + 1)}
    L = Pseudograph.make(range(1, n + 1), F, H)
    c = count_valid_orientations(L, d).count
    assert c in (0, 1)
    if c == 1 and d == 2:
        assert L.k == n + 1


@given(pseudographs(), st.integers(2, 3), st.randoms())
def test_relabeling_invariance(L, d, rnd):
    labels = list(range(100, 100 + L.n))
    rnd.shuffle(labels)
    m = dict(zip(L.U, labels))
    L2 = Pseudograph.make([m[v] for v in L.U], [(m[a], m[b]) for a, b in L.F],
                          {m[v]: c for v, c in L.hanging})
    assert count_valid_orientations(L2, d).count == count_valid_orientations(L, d).count


def test_worker_count_does_not_change_result():
    g = henneberg1_generate(12, 2, 3)
    L = build_pseudograph(g, find_cliques(g, 2)[0])
    one = count_valid_orientations(L, 2).count
    assert count_valid_orientations(L, 2, workers=2).count == one


@pytest.mark.parametrize("d", [2, 3])
def test_oracle_equivalence_sample(d):
    for seed in range(8):
        g = henneberg1_generate(d + 3 + seed % 4, d, seed)
        for k in find_cliques(g, d):
            B = count_valid_orientations(build_pseudograph(g, k), d).count
            assert B > 0
            assert b_from_permanent(incidence_permanent(g, k, d), g.n, d) == B


def test_time_limit_raises():
    g = henneberg1_generate(14, 2, 1)
    L = build_pseudograph(g, find_cliques(g, 2)[0])
    with pytest.raises(TimeLimitExceeded):
        pseudograph_permanent(L, {v: 2 for v in L.U}, time_limit=1e-9)
