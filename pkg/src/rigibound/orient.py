"""Exact counts of outdegree-constrained pseudograph orientations.

Two independent routes: constraint-propagating backtracking over the normal
edges, and Ryser's formula on the replicated incidence matrix.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import exp, factorial, lgamma, prod
from typing import Mapping

from . import _ryser
from ._ryser import TimeLimitExceeded
from .graph import Graph, GraphError, Pseudograph, build_pseudograph, connected_components, validate_clique

RYSER_MAX_SIDE = 30


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class OrientationCount:
    count: int
    method: str  # "backtracking" or "permanent"

    def __int__(self) -> int:
        return self.count


def thread_cap() -> int:
    """Worker cap from ``RIGIBOUND_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("RIGIBOUND_THREADS", "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------------
# Backtracking
# --------------------------------------------------------------------------

class _Search:
    """Counts direction assignments of ``edges`` meeting residual outdegrees.

    State is (bitmask of undecided edges, residual outdegree tuple); the count
    of a state depends on nothing else, so it is memoised.
    """

    def __init__(self, n: int, edges: list[tuple[int, int]], deadline: float | None = None):
        self.n = n
        self.edges = edges
        self.inc = [[] for _ in range(n)]
        for i, (a, b) in enumerate(edges):
            self.inc[a].append(i)
            self.inc[b].append(i)
        self.inc_mask = [sum(1 << i for i in ids) for ids in self.inc]
        self.memo: dict[tuple[int, tuple[int, ...]], int] = {}
        self.deadline = deadline
        self.nodes = 0

    def propagate(self, mask: int, res: list[int]) -> int | None:
        """Apply forced directions in place; return new mask or None if infeasible."""
        changed = True
        while changed:
            changed = False
            for v in range(self.n):
                live = mask & self.inc_mask[v]
                u = live.bit_count()
                r = res[v]
                if r < 0 or r > u:
                    return None
                if u == 0 or (r != 0 and r != u):
                    continue
                # r == 0: every live edge points into v; r == u: every one out of v
                for i in self.inc[v]:
                    if live >> i & 1:
                        a, b = self.edges[i]
                        w = b if a == v else a
                        if r == 0:
                            res[w] -= 1
                        else:
                            res[v] -= 1
                mask &= ~live
                changed = True
        return mask

    def pick(self, mask: int, res: list[int]) -> int:
        best, best_key = -1, None
        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            m ^= low
            a, b = self.edges[i]
            ka = min(res[a], (mask & self.inc_mask[a]).bit_count() - res[a])
            kb = min(res[b], (mask & self.inc_mask[b]).bit_count() - res[b])
            key = (min(ka, kb), i)
            if best_key is None or key < best_key:
                best, best_key = i, key
        return best

    def branches(self, mask: int, res: list[int]):
        """The two child states of the branching edge, after propagation."""
        i = self.pick(mask, res)
        a, b = self.edges[i]
        out = []
        for tail in (a, b):
            r2 = list(res)
            r2[tail] -= 1
            m2 = self.propagate(mask & ~(1 << i), r2)
            if m2 is not None:
                out.append((m2, tuple(r2)))
        return out

    def count(self, mask: int, res: tuple[int, ...]) -> int:
        if mask == 0:
            return 1 if not any(res) else 0
        key = (mask, res)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.nodes += 1
        if self.deadline is not None and self.nodes % 4096 == 0 and time.monotonic() > self.deadline:
            raise TimeLimitExceeded("backtracking")
        total = sum(self.count(m2, r2) for m2, r2 in self.branches(mask, list(res)))
        self.memo[key] = total
        return total

    def root(self, res: list[int]) -> tuple[int, tuple[int, ...]] | None:
        res = list(res)
        mask = self.propagate((1 << len(self.edges)) - 1, res)
        if mask is None:
            return None
        return mask, tuple(res)

    def frontier(self, state, width: int):
        """Expand the search tree breadth-first until ``width`` states exist."""
        states = [state]
        while len(states) < width:
            i = next((j for j, (m, _) in enumerate(states) if m), None)
            if i is None:
                break
            m, r = states.pop(i)
            states[i:i] = self.branches(m, list(r))
        return states


def _count_subproblem(args) -> int:
    n, edges, mask, res = args
    return _Search(n, edges).count(mask, res)


def _count_component(L: Pseudograph, target: Mapping[int, int], workers: int,
                     deadline: float | None) -> int:
    index = {v: i for i, v in enumerate(L.U)}
    edges = [(index[a], index[b]) for a, b in L.F]
    res = [target[v] - L.H.get(v, 0) for v in L.U]
    search = _Search(len(L.U), edges, deadline)
    state = search.root(res)
    if state is None:
        return 0
    if workers <= 1 or state[0] == 0:
        return search.count(*state)
    # split into independent subtrees; the sum is exact and order-free
    parts = search.frontier(state, workers)
    jobs = [(len(L.U), edges, m, r) for m, r in parts]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_count_subproblem, jobs))


def count_with_profile(L: Pseudograph, profile: Mapping[int, int], *, workers: int = 1,
                       time_limit: float | None = None) -> OrientationCount:
    """Orientations of the normal edges giving each vertex outdegree ``profile[v]``.

    Hanging edges count toward their vertex's outdegree.
    """
    missing = [v for v in L.U if v not in profile]
    if missing:
        raise GraphError(f"invalid profile: no required outdegree for {missing}")
    if len(L.F) + L.k != sum(profile[v] for v in L.U):
        return OrientationCount(0, "backtracking")
    deadline = None if time_limit is None else time.monotonic() + time_limit
    total = 1
    for comp in connected_components(L):
        total *= _count_component(comp, profile, workers, deadline)
        if total == 0:
            break
    return OrientationCount(total, "backtracking")


def count_valid_orientations(L: Pseudograph, d: int, *, workers: int = 1,
                             time_limit: float | None = None) -> OrientationCount:
    """Orientations in which every vertex has outdegree exactly ``d``."""
    if d < 2:
        raise GraphError(f"invalid dimension d={d}")
    if not L.count_balanced(d):
        return OrientationCount(0, "backtracking")
    for v in L.U:
        p, h = L.degree(v)
        if p < d or h > d:
            return OrientationCount(0, "backtracking")
    return count_with_profile(L, {v: d for v in L.U}, workers=workers, time_limit=time_limit)


# --------------------------------------------------------------------------
# Permanent route
# --------------------------------------------------------------------------

def _permanent_from_rows(rows: list[int], columns: list[tuple[int, ...]], mult: list[int],
                         degrees: list[int], time_limit: float | None) -> int:
    side = len(columns)
    if sum(mult) != side:
        raise DimensionMismatch(f"matrix is not square: {sum(mult)} rows x {side} columns")
    if any(m and not deg for m, deg in zip(mult, degrees)):
        return 0
    # Bregman-Minc: per <= prod over rows of (r!)^(1/r); slack covers rounding
    log_bound = sum(m * lgamma(deg + 1) / deg for deg, m in zip(degrees, mult) if m)
    bound = int(exp(log_bound * (1 + 1e-9) + 1e-9)) + 1
    deadline = None if time_limit is None else time.monotonic() + time_limit
    return _ryser.ryser_repeated(columns, len(rows), mult, bound, deadline)


def incidence_permanent(g: Graph, k, d: int, *, time_limit: float | None = None) -> int:
    """Permanent of the incidence matrix with ``d`` copies per non-fixed vertex row.

    Columns are the edges of ``g`` outside the clique ``k``.
    """
    k = validate_clique(g, k)
    fixed = set(k)
    rows = [v for v in g.vertices if v not in fixed]
    row_of = {v: i for i, v in enumerate(rows)}
    columns = []
    for u, v in g.edges:
        if u in fixed and v in fixed:
            continue
        columns.append(tuple(row_of[x] for x in (u, v) if x in row_of))
    degrees = [0] * len(rows)
    for col in columns:
        for r in col:
            degrees[r] += 1
    return _permanent_from_rows(rows, columns, [d] * len(rows), degrees, time_limit)


def pseudograph_permanent(L: Pseudograph, profile: Mapping[int, int], *,
                          time_limit: float | None = None) -> int:
    """Permanent with ``profile[v]`` copies of each vertex row; columns are F then H."""
    rows = list(L.U)
    row_of = {v: i for i, v in enumerate(rows)}
    columns = [(row_of[a], row_of[b]) for a, b in L.F]
    for v, c in L.hanging:
        columns.extend([(row_of[v],)] * c)
    degrees = [L.degree(v).p for v in rows]
    return _permanent_from_rows(rows, columns, [profile[v] for v in rows], degrees, time_limit)


def b_from_permanent(per: int, n_vertices: int, d: int) -> Fraction:
    return Fraction(per, factorial(d) ** (n_vertices - d))


def profile_count_from_permanent(per: int, profile: Mapping[int, int]) -> Fraction:
    return Fraction(per, prod(factorial(x) for x in profile.values()))


def embedding_bound_orientations(g: Graph, k, d: int, **kw) -> int:
    """``2^(|V|-d) * B(G, K_d)``."""
    L = build_pseudograph(g, k)
    return 2 ** (g.n - d) * count_valid_orientations(L, d, **kw).count


# --------------------------------------------------------------------------
# Triangle-free fallback for d = 3: fixed edge plus a partially fixed vertex
# --------------------------------------------------------------------------

def partial_profile_pseudograph(g: Graph, edge, partial: int, d: int = 3):
    """Pseudograph and outdegree profile for a fixed edge and a partially fixed vertex.

    The two fixed vertices get outdegree 0, so their edges hang off the other
    endpoint; the partially fixed vertex needs ``d - 1``, the rest ``d``.
    """
    L = build_pseudograph(g, edge)
    if partial not in L.U:
        raise GraphError(f"partially fixed vertex {partial} must lie outside the fixed edge")
    profile = {v: d for v in L.U}
    profile[partial] = d - 1
    return L, profile


def partial_profile_candidates(g: Graph, limit: int | None = None):
    """(edge, partial vertex) pairs in lexicographic order."""
    out = []
    for e in g.edges:
        for c in g.vertices:
            if c in e:
                continue
            out.append((e, c))
            if limit is not None and len(out) >= limit:
                return out
    return out
