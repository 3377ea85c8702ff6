"""Graphs, pseudographs and the structural algorithms the elimination relies on.

A :class:`Pseudograph` has a vertex set ``U``, a multiset of normal edges ``F``
and, per vertex, a number of hanging edges.  Hanging edges have a single
endpoint and are always oriented out of it.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, Mapping, NamedTuple, Sequence

import networkx as nx

Edge = tuple[int, int]


class GraphError(ValueError):
    """Invalid graph, clique or dimension."""


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _check_dim(d: int) -> None:
    if d < 2:
        raise GraphError(f"invalid dimension d={d} (need d >= 2)")


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on integer labels."""

    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        verts = tuple(sorted(set(self.vertices)))
        if len(verts) != len(self.vertices):
            raise GraphError("duplicate vertex label")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            e = _norm_edge(u, v)
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
        vset = set(verts)
        for e in seen:
            if e[0] not in vset or e[1] not in vset:
                raise GraphError(f"edge {e} has an endpoint outside the vertex set")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], vertices: Iterable[int] = ()) -> "Graph":
        edges = [tuple(e) for e in edges]
        verts = set(vertices)
        for u, v in edges:
            verts.update((u, v))
        return cls(tuple(sorted(verts)), tuple(edges))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(s) for v, s in adj.items()}

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency.get(u, ())

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


class Clique(tuple):
    """Sorted tuple of vertex labels forming a complete subgraph."""

    def __new__(cls, members: Iterable[int]):
        return super().__new__(cls, sorted(members))


def validate_clique(g: Graph, members: Iterable[int]) -> Clique:
    k = Clique(members)
    if len(set(k)) != len(k):
        raise GraphError(f"clique {tuple(k)} repeats a vertex")
    for v in k:
        if v not in g.adjacency:
            raise GraphError(f"clique vertex {v} is not in the graph")
    for u, v in itertools.combinations(k, 2):
        if not g.has_edge(u, v):
            raise GraphError(f"{tuple(k)} is not a clique: missing edge ({u}, {v})")
    return k


class ExtendedDegree(NamedTuple):
    p: int  # total degree, normal + hanging
    h: int  # hanging degree

    @property
    def normal(self) -> int:
        return self.p - self.h


@dataclass(frozen=True)
class Pseudograph:
    """Vertex set ``U``, normal-edge multiset ``F`` and hanging counts ``H``.

    ``hanging`` is stored as sorted ``(vertex, count)`` pairs with positive
    counts; use :attr:`H` for a mapping view.
    """

    U: tuple[int, ...]
    F: tuple[Edge, ...]
    hanging: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        verts = tuple(sorted(set(self.U)))
        vset = set(verts)
        edges = []
        for u, v in self.F:
            if u == v:
                raise GraphError(f"normal edge ({u}, {v}) is a loop")
            if u not in vset or v not in vset:
                raise GraphError(f"normal edge ({u}, {v}) leaves U")
            edges.append(_norm_edge(u, v))
        hmap: dict[int, int] = defaultdict(int)
        for v, c in self.hanging:
            if v not in vset:
                raise GraphError(f"hanging edges at {v}, which is not in U")
            if c < 0:
                raise GraphError(f"negative hanging count at {v}")
            hmap[v] += c
        object.__setattr__(self, "U", verts)
        object.__setattr__(self, "F", tuple(sorted(edges)))
        object.__setattr__(self, "hanging", tuple(sorted((v, c) for v, c in hmap.items() if c)))

    @classmethod
    def make(cls, U: Iterable[int], F: Iterable[Edge] = (), H: Mapping[int, int] | None = None):
        return cls(tuple(U), tuple(tuple(e) for e in F), tuple((H or {}).items()))

    @cached_property
    def H(self) -> dict[int, int]:
        return dict(self.hanging)

    @property
    def n(self) -> int:
        return len(self.U)

    @property
    def k(self) -> int:
        """Total number of hanging edges."""
        return sum(c for _, c in self.hanging)

    @cached_property
    def incident(self) -> dict[int, tuple[int, ...]]:
        """Neighbour list per vertex, one entry per normal edge (multiset)."""
        inc: dict[int, list[int]] = {v: [] for v in self.U}
        for u, v in self.F:
            inc[u].append(v)
            inc[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in inc.items()}

    def normal_degree(self, v: int) -> int:
        return len(self.incident[v])

    def degree(self, v: int) -> ExtendedDegree:
        return extended_degree(self, v)

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.U

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.F

    def count_balanced(self, d: int) -> bool:
        """Necessary edge count ``|F| + |H| == d |U|`` for any valid orientation."""
        return len(self.F) + self.k == d * self.n

    def is_connected(self) -> bool:
        return len(connected_components(self)) == 1

    def is_tree(self) -> bool:
        return self.n > 0 and len(self.F) == self.n - 1 and self.is_connected()

    def with_hanging(self, v: int, extra: int) -> "Pseudograph":
        hmap = dict(self.H)
        hmap[v] = hmap.get(v, 0) + extra
        return Pseudograph(self.U, self.F, tuple(hmap.items()))


def extended_degree(L: Pseudograph, v: int) -> ExtendedDegree:
    if v not in L.incident:
        raise GraphError(f"unknown vertex {v}")
    h = L.H.get(v, 0)
    return ExtendedDegree(len(L.incident[v]) + h, h)


# --------------------------------------------------------------------------
# Edge-list documents
# --------------------------------------------------------------------------

def _parse_ints(line: str, lineno: int, what: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise ParseError(lineno, f"expected two integers for {what}, got {line!r}")
    try:
        a, b = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(lineno, f"non-integer token in {line!r}") from None
    if a < 0 or b < 0:
        raise ParseError(lineno, f"negative value in {line!r}")
    return a, b


def parse_graph(text: str) -> Graph:
    """Parse an edge-list document: header ``n m`` then ``m`` lines ``u v``.

    Lines starting with ``#`` and blank lines are skipped.  If the edge
    endpoints use fewer than ``n`` labels, the smallest unused nonnegative
    labels are added as isolated vertices.
    """
    header = None
    edges: list[Edge] = []
    seen: dict[Edge, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = _parse_ints(line, lineno, "header '<n> <m>'")
            continue
        u, v = _parse_ints(line, lineno, "edge '<u> <v>'")
        if u == v:
            raise ParseError(lineno, f"self-loop at vertex {u}")
        e = _norm_edge(u, v)
        if e in seen:
            raise ParseError(lineno, f"duplicate edge {u} {v} (first on line {seen[e]})")
        seen[e] = lineno
        edges.append(e)
    if header is None:
        raise ParseError(0, "empty document: missing '<n> <m>' header")
    n, m = header
    if len(edges) != m:
        raise ParseError(lineno, f"header declares {m} edges, found {len(edges)}")
    verts = {x for e in edges for x in e}
    if len(verts) > n:
        raise ParseError(1, f"header declares {n} vertices, edges use {len(verts)}")
    label = 0
    while len(verts) < n:
        if label not in verts:
            verts.add(label)
        label += 1
    return Graph(tuple(sorted(verts)), tuple(edges))


def serialize_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Rigidity counts
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MaxwellReport:
    d: int
    n: int
    m: int
    required: int  # d*n - C(d+1, 2)
    global_ok: bool
    count_ok: bool
    sparse: bool
    necessary_only: bool  # True when d >= 3: only Maxwell's necessary condition
    violating_subgraph: tuple[int, ...] | None = None
    violating_edges: int | None = None


def _pebble_game_23(g: Graph) -> tuple[bool, tuple[int, ...] | None]:
    """(2,3)-pebble game.  Returns (sparse, vertex set of a violating subgraph)."""
    pebbles = {v: 2 for v in g.vertices}
    out: dict[int, set[int]] = {v: set() for v in g.vertices}

    def find_pebble(root: int, blocked: int) -> bool:
        # DFS along pebble-covered edges for a free pebble, then reverse the path
        parent = {root: None}
        stack = [root]
        while stack:
            x = stack.pop()
            for y in out[x]:
                if y in parent or y == blocked:
                    continue
                parent[y] = x
                if pebbles[y] > 0:
                    pebbles[y] -= 1
                    while parent[y] is not None:
                        px = parent[y]
                        out[px].discard(y)
                        out[y].add(px)
                        y = px
                    pebbles[root] += 1
                    return True
                stack.append(y)
        return False

    def reach(roots: Sequence[int]) -> set[int]:
        seen = set(roots)
        stack = list(roots)
        while stack:
            x = stack.pop()
            for y in out[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    for u, v in g.edges:
        while pebbles[u] < 2 and find_pebble(u, v):
            pass
        while pebbles[v] < 2 and find_pebble(v, u):
            pass
        if pebbles[u] + pebbles[v] < 4:
            return False, tuple(sorted(reach((u, v))))
        pebbles[u] -= 1
        out[u].add(v)
    return True, None


def _densest_violation(g: Graph, d: int) -> tuple[int, ...] | None:
    """Search for V' with |V'| >= d and |E(V')| > d|V'| - C(d+1,2).

    For every d-subset S, maximises |E(V')| - d|V'| over V' containing S as a
    maximum-weight closure (one min cut each).
    """
    limit = -comb(d + 1, 2)
    if g.n < d:
        return None
    for seed in itertools.combinations(g.vertices, d):
        net = nx.DiGraph()
        net.add_node("s")
        net.add_node("t")
        for i, (u, v) in enumerate(g.edges):
            net.add_edge("s", ("e", i), capacity=1)
            net.add_edge(("e", i), ("v", u))
            net.add_edge(("e", i), ("v", v))
        for v in g.vertices:
            net.add_edge(("v", v), "t", capacity=d)
        for v in seed:
            net.add_edge("s", ("v", v))
        cut, (side, _) = nx.minimum_cut(net, "s", "t")
        if g.m - cut > limit:
            return tuple(sorted(x[1] for x in side if isinstance(x, tuple) and x[0] == "v"))
    return None


def induced_edge_count(g: Graph, verts: Iterable[int]) -> int:
    vs = set(verts)
    return sum(1 for u, v in g.edges if u in vs and v in vs)


def maxwell_check(g: Graph, d: int) -> MaxwellReport:
    """Maxwell count for dimension ``d``; a complete Laman test when ``d == 2``."""
    _check_dim(d)
    required = d * g.n - comb(d + 1, 2)
    count_ok = g.m == required
    if d == 2:
        sparse, bad = _pebble_game_23(g)
    else:
        if g.m > required and g.n >= d:
            bad = g.vertices
        else:
            bad = _densest_violation(g, d)
        sparse = bad is None
    return MaxwellReport(
        d=d,
        n=g.n,
        m=g.m,
        required=required,
        global_ok=count_ok and sparse,
        count_ok=count_ok,
        sparse=sparse,
        necessary_only=d >= 3,
        violating_subgraph=bad,
        violating_edges=None if bad is None else induced_edge_count(g, bad),
    )


def henneberg1_generate(n: int, d: int, seed: int) -> Graph:
    """Start from K_{d+1} on labels 1..d+1 and add vertices of degree d."""
    _check_dim(d)
    if n < d + 1:
        raise GraphError(f"invalid size n={n} (need n >= d+1 = {d + 1})")
    rng = random.Random(seed)
    verts = list(range(1, d + 2))
    edges = list(itertools.combinations(verts, 2))
    for new in range(d + 2, n + 1):
        for old in rng.sample(verts, d):
            edges.append((old, new))
        verts.append(new)
    return Graph(tuple(verts), tuple(edges))


def find_cliques(g: Graph, d: int) -> list[Clique]:
    """All ``d``-cliques of ``g`` in lexicographic order."""
    _check_dim(d)
    adj = g.adjacency
    found: list[Clique] = []

    def extend(members: list[int], cands: list[int]) -> None:
        if len(members) == d:
            found.append(Clique(members))
            return
        need = d - len(members)
        for i, v in enumerate(cands):
            if len(cands) - i < need:
                break
            members.append(v)
            extend(members, [w for w in cands[i + 1:] if w in adj[v]])
            members.pop()

    extend([], list(g.vertices))
    return found


def build_pseudograph(g: Graph, k: Iterable[int]) -> Pseudograph:
    """Remove the fixed clique: its edges vanish, edges into it become hanging."""
    k = validate_clique(g, k)
    fixed = set(k)
    U = [v for v in g.vertices if v not in fixed]
    F = []
    H: dict[int, int] = defaultdict(int)
    for u, v in g.edges:
        if u in fixed and v in fixed:
            continue
        if u in fixed:
            H[v] += 1
        elif v in fixed:
            H[u] += 1
        else:
            F.append((u, v))
    return Pseudograph.make(U, F, H)


def connected_components(L: Pseudograph) -> list[Pseudograph]:
    """Split ``L`` by connectivity of its normal subgraph."""
    parent = {v: v for v in L.U}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in L.F:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = defaultdict(list)
    for v in L.U:
        groups[find(v)].append(v)
    if len(groups) == 1:
        return [L]
    comps = []
    for root in sorted(groups, key=lambda r: min(groups[r])):
        members = set(groups[root])
        comps.append(
            Pseudograph(
                tuple(sorted(members)),
                tuple(e for e in L.F if e[0] in members),
                tuple((v, c) for v, c in L.hanging if v in members),
            )
        )
    return comps


# --------------------------------------------------------------------------
# Block-cut tree
# --------------------------------------------------------------------------

class BCNode(NamedTuple):
    kind: str  # "block" or "cut"
    vertices: frozenset[int]


@dataclass(frozen=True)
class BlockCutTree:
    nodes: tuple[BCNode, ...]
    edges: tuple[tuple[int, int], ...]  # (block index, cut index) pairs into ``nodes``
    cut_vertices: frozenset[int] = field(default=frozenset())

    @property
    def blocks(self) -> list[frozenset[int]]:
        return [n.vertices for n in self.nodes if n.kind == "block"]

    def leaf_blocks(self) -> list[frozenset[int]]:
        deg = defaultdict(int)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return [n.vertices for i, n in enumerate(self.nodes) if n.kind == "block" and deg[i] <= 1]


def biconnected_components(vertices: Sequence[int], edges: Sequence[Edge]):
    """Hopcroft-Tarjan lowpoint algorithm, iterative, multigraph-safe.

    Returns (list of blocks as vertex sets, set of cut vertices).  Isolated
    vertices form single-vertex blocks.
    """
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in vertices}
    for i, (u, v) in enumerate(edges):
        adj[u].append((v, i))
        adj[v].append((u, i))
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    blocks: list[frozenset[int]] = []
    cuts: set[int] = set()
    counter = 0
    for root in vertices:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        if not adj[root]:
            blocks.append(frozenset([root]))
            continue
        root_children = 0
        edge_stack: list[tuple[int, int]] = []
        # frames: (vertex, edge id used to enter, iterator position)
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, eid in it:
                if eid == via:
                    continue
                if w not in disc:
                    disc[w] = low[w] = counter
                    counter += 1
                    edge_stack.append((v, w))
                    stack.append((w, eid, iter(adj[w])))
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    edge_stack.append((v, w))
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if not stack:
                break
            parent = stack[-1][0]
            low[parent] = min(low[parent], low[v])
            if low[v] >= disc[parent]:
                comp = set()
                while True:
                    a, b = edge_stack.pop()
                    comp.update((a, b))
                    if (a, b) == (parent, v):
                        break
                blocks.append(frozenset(comp))
                if parent == root:
                    root_children += 1
                else:
                    cuts.add(parent)
        if root_children > 1:
            cuts.add(root)
    return blocks, cuts


def block_cut_tree(g) -> BlockCutTree:
    """Block-cut tree of a connected graph (or of a pseudograph's normal subgraph)."""
    vertices, edges = tuple(g.vertices), tuple(g.edges)
    if vertices and len(connected_components(Pseudograph.make(vertices, edges))) != 1:
        raise GraphError("block_cut_tree needs a connected graph; split into components first")
    blocks, cuts = biconnected_components(vertices, edges)
    blocks.sort(key=lambda b: sorted(b))
    nodes = [BCNode("block", b) for b in blocks]
    cut_index = {}
    for c in sorted(cuts):
        cut_index[c] = len(nodes)
        nodes.append(BCNode("cut", frozenset([c])))
    tree_edges = []
    for i, b in enumerate(blocks):
        for c in sorted(b & cuts):
            tree_edges.append((i, cut_index[c]))
    return BlockCutTree(tuple(nodes), tuple(tree_edges), frozenset(cuts))
