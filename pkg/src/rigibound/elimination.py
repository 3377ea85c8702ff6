"""Iterative vertex/path elimination on pseudographs.

Each step removes a non-cut vertex, or a path of ``(d+1, d-1)``-vertices
inside a leaf block, so the pseudograph stays connected.  The product of
step costs is the per-instance certificate; :func:`formula_bound` is the
closed form valid for every connected pseudograph.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from math import comb
from typing import Iterator

from .graph import ExtendedDegree, Pseudograph, block_cut_tree, connected_components
from .orient import TimeLimitExceeded, count_valid_orientations


class EliminationError(ValueError):
    """No legal step, or a step that does not apply to the pseudograph."""


class NoOrientation(EliminationError):
    """Extended degree with ``p < d`` or ``h > d``: zero valid orientations."""


def step_cost_equilibrium(p: int, h: int, d: int, *, in_path: bool = False) -> tuple[int, int]:
    """Cost C(p-h, d-h) and hanging-edge change p-h-d of removing one vertex.

    ``(d+1, d-1)``-vertices may only go as part of a path; pass ``in_path``
    for the per-vertex bookkeeping inside one.
    """
    if (p, h) == (d + 1, d - 1) and not in_path:
        raise EliminationError(f"({p},{h}) vertices are only eliminated inside paths")
    if p < d or h > d or h < 0:
        raise NoOrientation(f"extended degree ({p},{h}) admits no orientation for d={d}")
    return comb(p - h, d - h), p - h - d


@dataclass(frozen=True)
class EliminationStep:
    kind: str  # "vertex" | "path"
    vertices: tuple[int, ...]
    cost: int
    equilibrium: int
    degree: ExtendedDegree | None = None

    @classmethod
    def vertex(cls, v: int, deg: ExtendedDegree, d: int) -> "EliminationStep":
        cost, eq = step_cost_equilibrium(deg.p, deg.h, d)
        return cls("vertex", (v,), cost, eq, deg)

    @classmethod
    def path(cls, path: tuple[int, ...], d: int) -> "EliminationStep":
        if len(path) < 2:
            raise EliminationError("path steps need at least two vertices")
        return cls("path", tuple(path), 2, 1 - (d - 1) * len(path))


@dataclass(frozen=True)
class EliminationTrace:
    steps: tuple[EliminationStep, ...]
    product_bound: int
    terminals: tuple[str, ...]  # per component: empty | single-vertex | tree | infeasible
    terminal_counts: tuple[int, ...]  # 0 or 1 per component
    zero_count: bool = False  # the input itself was proved to have no orientation
    d: int = 2

    @property
    def terminal(self) -> str:
        return ",".join(self.terminals)

    def to_json(self) -> list[dict]:
        out, running = [], 1
        for s in self.steps:
            running *= s.cost
            out.append({
                "kind": s.kind,
                "vertices": list(s.vertices),
                "cost": s.cost,
                "equilibrium": s.equilibrium,
                "running_product": str(running),
            })
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _infeasible(L: Pseudograph, d: int) -> bool:
    if not L.count_balanced(d):
        return True
    return any(not (p >= d >= h) for p, h in (L.degree(v) for v in L.U))


def _maximal_path(L: Pseudograph, block: frozenset[int], ok: set[int]) -> tuple[int, ...] | None:
    """Longest run of ``ok`` vertices inside ``block``, never the whole cycle."""
    inner = sorted(v for v in block if v in ok)
    if len(inner) < 2:
        return None
    start = inner[0]
    seen = {start}

    def walk() -> list[int]:
        run, cur = [], start
        while True:
            nxt = [w for w in L.incident[cur] if w in ok and w in block and w not in seen]
            if not nxt:
                return run
            cur = min(nxt)
            seen.add(cur)
            run.append(cur)

    right = walk()
    left = walk()
    chain = left[::-1] + [start] + right
    if len(chain) == L.n:
        # a pure cycle: keep the largest label as the surviving vertex
        drop = max(chain)
        i = chain.index(drop)
        chain = chain[i + 1:] + chain[:i]
    if chain[0] > chain[-1]:
        chain.reverse()
    return tuple(chain) if len(chain) >= 2 else None


def select_step(L: Pseudograph, d: int) -> EliminationStep:
    """Next connectivity-preserving step for a connected, non-base pseudograph."""
    if L.n <= 1 or L.is_tree():
        raise EliminationError("base case: no step applies")
    if not L.is_connected():
        raise EliminationError("select_step needs a connected pseudograph")
    bct = block_cut_tree(L)
    path_deg = ExtendedDegree(d + 1, d - 1)
    best = None
    for v in L.U:
        if v in bct.cut_vertices:
            continue
        deg = L.degree(v)
        if deg == path_deg:
            continue
        step = EliminationStep.vertex(v, deg, d)
        if best is None or step.cost < best.cost:
            best = step
    if best is not None:
        return best
    ok = {v for v in L.U if L.degree(v) == path_deg and v not in bct.cut_vertices}
    for block in sorted(bct.leaf_blocks(), key=sorted):
        path = _maximal_path(L, block, ok)
        if path is not None:
            return EliminationStep.path(path, d)
    raise EliminationError("no legal elimination step: malformed pseudograph")


def _successor(L: Pseudograph, removed: set[int], dropped: list[tuple[int, int]]) -> Pseudograph:
    """Delete ``removed`` vertices; edges listed in ``dropped`` vanish, the
    other edges leaving ``removed`` hang off their surviving endpoint."""
    drop = list(dropped)
    F, H = [], {v: c for v, c in L.hanging if v not in removed}
    for e in L.F:
        a, b = e
        if a in removed and b in removed:
            continue
        if a in removed or b in removed:
            if e in drop:
                drop.remove(e)
                continue
            w = b if a in removed else a
            H[w] = H.get(w, 0) + 1
            continue
        F.append(e)
    return Pseudograph.make([v for v in L.U if v not in removed], F, H)


def _locally_feasible(L: Pseudograph, d: int) -> bool:
    return all(p >= d >= h for p, h in (L.degree(v) for v in L.U))


def apply_step(L: Pseudograph, s: EliminationStep, d: int, successor: str = "max-count",
               time_limit: float | None = None) -> Pseudograph:
    """One successor of ``L`` under ``s``.

    The ``s.cost`` successors partition the valid orientations of ``L``.
    ``successor="max-count"`` returns one with the most valid orientations,
    which makes ``cost * count(successor) >= count(L)`` hold at every step.
    ``"first-feasible"`` skips the counting and returns the first successor
    (dropped neighbours in lexicographic order) with no ``p < d`` or
    ``h > d`` vertex.  Ties and fallbacks go to the lexicographically first.
    """
    if successor not in ("max-count", "first-feasible"):
        raise ValueError(f"unknown successor policy {successor!r}")
    if L.n <= 1:
        raise EliminationError("no step applies to a single-vertex pseudograph")
    for v in s.vertices:
        if v not in L.incident:
            raise EliminationError(f"step vertex {v} is not in the pseudograph")
    if s.kind == "vertex":
        (v,) = s.vertices
        deg = L.degree(v)
        if s.degree is not None and deg != s.degree:
            raise EliminationError(f"vertex {v} has degree {deg}, step expects {s.degree}")
        step_cost_equilibrium(deg.p, deg.h, d)
        incident = [tuple(sorted((v, w))) for w in L.incident[v]]
        options = itertools.combinations(range(len(incident)), d - deg.h)
        candidates = [_successor(L, {v}, [incident[i] for i in pick]) for pick in options]
    elif s.kind == "path":
        path = s.vertices
        inside = set(path)
        for v in path:
            if L.degree(v) != (d + 1, d - 1):
                raise EliminationError(f"path vertex {v} is not a ({d + 1},{d - 1})-vertex")
        internal = [tuple(sorted(e)) for e in zip(path, path[1:])]
        for e in internal:
            if e not in L.F:
                raise EliminationError(f"path edge {e} missing")
        ends = [e for e in L.F if (e[0] in inside) != (e[1] in inside)]
        if len(ends) != 2:
            raise EliminationError("path must leave through exactly two normal edges")
        ends.sort(key=lambda e: (e[0] if e[1] in inside else e[1], e))
        # one end edge survives as a hanging edge at its outer endpoint
        candidates = [_successor(L, inside, internal + [ends[1 - keep]]) for keep in range(2)]
    else:
        raise EliminationError(f"unknown step kind {s.kind!r}")
    feasible = [c for c in candidates if _locally_feasible(c, d)]
    if not feasible:
        return candidates[0]
    if successor == "first-feasible" or len(feasible) == 1:
        return feasible[0]
    counts = [count_valid_orientations(c, d, time_limit=time_limit).count for c in feasible]
    return feasible[counts.index(max(counts))]


@dataclass
class StepRecord:
    before: Pseudograph
    step: EliminationStep
    after: Pseudograph


@dataclass
class _ComponentRun:
    records: list[StepRecord] = field(default_factory=list)
    terminal: str = "empty"
    terminal_count: int = 1


def _run_component(L: Pseudograph, d: int, successor: str, deadline: float | None) -> _ComponentRun:
    run = _ComponentRun()
    cur = L
    while True:
        remaining = None
        if deadline is not None:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise TimeLimitExceeded("elimination")
        if cur.n == 0:
            run.terminal, run.terminal_count = "empty", 1
            return run
        if _infeasible(cur, d):
            run.terminal, run.terminal_count = "infeasible", 0
            return run
        if cur.n == 1 or cur.is_tree():
            run.terminal = "single-vertex" if cur.n == 1 else "tree"
            run.terminal_count = count_valid_orientations(cur, d).count
            return run
        step = select_step(cur, d)
        nxt = apply_step(cur, step, d, successor, remaining)
        run.records.append(StepRecord(cur, step, nxt))
        cur = nxt


def iter_elimination(L: Pseudograph, d: int, successor: str = "max-count") -> Iterator[StepRecord]:
    for comp in connected_components(L):
        yield from _run_component(comp, d, successor, None).records


def eliminate(L: Pseudograph, d: int, successor: str = "max-count",
              time_limit: float | None = None) -> EliminationTrace:
    """Eliminate each component down to a base case; bounds multiply."""
    deadline = None if time_limit is None else time.monotonic() + time_limit
    steps, terminals, counts = [], [], []
    product = 1
    zero = _infeasible(L, d)
    for comp in connected_components(L):
        run = _run_component(comp, d, successor, deadline)
        for rec in run.records:
            steps.append(rec.step)
            product *= rec.step.cost
        terminals.append(run.terminal)
        counts.append(run.terminal_count)
        if run.terminal == "infeasible" and not run.records:
            zero = True
    return EliminationTrace(tuple(steps), product, tuple(terminals), tuple(counts), zero, d)


def formula_bound(n: int, k: int, d: int, ab) -> float:
    """``alpha^n * beta^(k-1)`` evaluated in log space."""
    if n < 1 or k < 1:
        raise ValueError("formula_bound needs n >= 1 and k >= 1")
    return math.exp(n * math.log(ab.alpha) + (k - 1) * math.log(ab.beta))
