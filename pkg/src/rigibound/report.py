"""Per-graph bound reports: every count and bound for one input, per fixed clique.

Counts are exact integers and serialise as decimal strings; reals are rounded
to 12 significant digits when the report is built, so a JSON round trip
reproduces the report exactly.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Sequence

from .bounds import (
    IntegrityError,
    alpha_beta,
    bezout_bound,
    bm_basis,
    borcea_streinu_bound,
    bregman_minc,
    corollary_bound,
    new_closed_bound,
)
from .elimination import eliminate
from .graph import (
    Graph,
    GraphError,
    Pseudograph,
    build_pseudograph,
    connected_components,
    find_cliques,
    maxwell_check,
    validate_clique,
)
from .orient import (
    RYSER_MAX_SIDE,
    TimeLimitExceeded,
    count_with_profile,
    partial_profile_candidates,
    partial_profile_pseudograph,
    profile_count_from_permanent,
    pseudograph_permanent,
    thread_cap,
)

log = logging.getLogger(__name__)

CLIQUE_CAP = 200


class RigidityError(GraphError):
    """The input fails the rigidity count check and no override was given."""

    def __init__(self, check):
        if not check.count_ok:
            rel = ">" if check.m > check.required else "<"
            msg = f"maxwell count violated: |E|={check.m} {rel} {check.required}"
        else:
            msg = f"overdense subgraph {list(check.violating_subgraph or ())}"
        super().__init__(msg)
        self.check = check


def r12(x: float) -> float:
    """Round to 12 significant digits."""
    return float(f"{float(x):.12g}")


def _exact_or_r12(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    return r12(x)


@dataclass
class CliqueResult:
    """Counts and bounds for one fixed clique, or one fixed edge plus a partial vertex."""

    clique: list[int]
    partial: int | None
    pseudo_n: int
    pseudo_k: int
    components: list[list[int]]  # [n_i, k_i] per connected component
    exact: int | None = None  # orientation count B
    exact_status: str = "ok"  # ok | timeout
    orientation_bound: int | None = None  # 2^(n-d) * B
    permanent: int | None = None
    permanent_count: int | None = None  # permanent divided by the row factorials
    permanent_status: str = "not-run"  # ok | skipped | timeout | mismatch | not-run
    elimination: int | None = None  # product of step costs
    elimination_embedding: int | None = None
    elimination_status: str = "ok"
    elimination_steps: int | None = None
    corollary: float | None = None
    corollary_embedding: float | None = None
    bregman_minc: float | int | Fraction | None = None
    bregman_minc_embedding: float | int | Fraction | None = None

    @property
    def profile(self) -> bool:
        return self.partial is not None

    @property
    def timed_out(self) -> bool:
        return "timeout" in (self.exact_status, self.permanent_status, self.elimination_status)

    def best_bound(self) -> int | float | None:
        """Orientation-based embedding bound used to rank cliques."""
        if self.orientation_bound is not None:
            return self.orientation_bound
        return self.elimination_embedding

    def violations(self) -> list[str]:
        """Bounds that fall below the exact count (none are expected)."""
        if self.exact is None:
            return []
        out = []
        tol = 1 + 1e-9
        for name, value in (("elimination", self.elimination),
                            ("corollary", self.corollary),
                            ("bregman_minc", self.bregman_minc)):
            if value is not None and self.exact > value * tol:
                out.append(name)
        if self.permanent_count is not None and self.permanent_count != self.exact:
            out.append("permanent")
        return out


@dataclass
class BoundReport:
    graph: dict  # n, m, edges, name
    d: int
    cliques: list[CliqueResult]
    bounds: dict
    flags: list[str] = field(default_factory=list)

    @property
    def best(self) -> CliqueResult | None:
        idx = self.bounds.get("best_index")
        return None if idx is None else self.cliques[idx]

    @property
    def timed_out(self) -> bool:
        return "timeout" in self.flags

    def violations(self) -> list[str]:
        out = []
        for c in self.cliques:
            out += [f"{c.clique}:{v}" for v in c.violations()]
            if c.orientation_bound is not None:
                closed = self.bounds.get("closed_certified")
                if closed is not None and c.orientation_bound > closed * (1 + 1e-9):
                    out.append(f"{c.clique}:closed_form")
        return out

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "graph": self.graph,
            "d": self.d,
            "cliques": [{k: _enc(v) for k, v in asdict(c).items()} for c in self.cliques],
            "bounds": {k: _enc(v) for k, v in self.bounds.items()},
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BoundReport":
        names = {f.name for f in fields(CliqueResult)}
        cliques = [CliqueResult(**{k: _dec(v) for k, v in c.items() if k in names})
                   for c in data["cliques"]]
        bounds = {k: _dec(v) for k, v in data["bounds"].items()}
        return cls(data["graph"], data["d"], cliques, bounds, list(data["flags"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "BoundReport":
        return cls.from_dict(json.loads(text))


def _enc(v):
    # big integers and exact rationals travel as decimal strings
    if isinstance(v, bool) or v is None or isinstance(v, (str, list)):
        return v
    if isinstance(v, (int, Fraction)):
        return str(v)
    return v


def _dec(v):
    if isinstance(v, str):
        try:
            return int(v)
        except ValueError:
            try:
                return Fraction(v)
            except ValueError:
                return v
    return v


# --------------------------------------------------------------------------
# Assembly
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Task:
    """One unit of per-clique work; picklable so it can run in a worker."""

    g: Graph
    d: int
    clique: tuple[int, ...]
    partial: int | None
    time_limit: float | None
    check_integrity: bool
    permanent: bool = True


def _pseudograph_for(task: Task) -> tuple[Pseudograph, dict[int, int]]:
    if task.partial is None:
        L = build_pseudograph(task.g, task.clique)
        return L, {v: task.d for v in L.U}
    return partial_profile_pseudograph(task.g, task.clique, task.partial, task.d)


def _add_permanent(res: CliqueResult, L: Pseudograph, profile: dict[int, int],
                   time_limit: float | None) -> None:
    side = len(L.F) + L.k
    if side > RYSER_MAX_SIDE or sum(profile.values()) != side:
        res.permanent_status = "skipped"
        return
    try:
        res.permanent = pseudograph_permanent(L, profile, time_limit=time_limit)
    except TimeLimitExceeded:
        res.permanent_status = "timeout"
        return
    pc = profile_count_from_permanent(res.permanent, profile)
    res.permanent_count = int(pc) if pc.denominator == 1 else None
    res.permanent_status = "ok" if res.exact is None or pc == res.exact else "mismatch"


def add_permanent(task: "Task", res: CliqueResult) -> CliqueResult:
    L, profile = _pseudograph_for(task)
    _add_permanent(res, L, profile, task.time_limit)
    return res


def run_task(task: Task) -> CliqueResult:
    g, d = task.g, task.d
    L, profile = _pseudograph_for(task)
    # the partial vertex behaves like a vertex with one extra hanging edge
    uniform = L if task.partial is None else L.with_hanging(task.partial, 1)
    comps = connected_components(uniform)
    res = CliqueResult(
        clique=list(task.clique),
        partial=task.partial,
        pseudo_n=uniform.n,
        pseudo_k=uniform.k,
        components=[[c.n, c.k] for c in comps],
    )
    factor = 2 ** (g.n - d)

    try:
        res.exact = count_with_profile(L, profile, time_limit=task.time_limit).count
        res.orientation_bound = factor * res.exact
    except TimeLimitExceeded:
        res.exact_status = "timeout"

    if task.permanent:
        _add_permanent(res, L, profile, task.time_limit)

    try:
        trace = eliminate(uniform, d, time_limit=task.time_limit)
        res.elimination = 0 if trace.zero_count else trace.product_bound
        res.elimination_embedding = factor * res.elimination
        res.elimination_steps = len(trace.steps)
    except TimeLimitExceeded:
        res.elimination_status = "timeout"

    cor = corollary_bound([(c.n, c.k) for c in comps], d, check=task.check_integrity)
    res.corollary = r12(cor)
    res.corollary_embedding = r12(factor * cor)
    if uniform.n >= 1:
        bm = bregman_minc(uniform.n, uniform.k, d)
        res.bregman_minc = _exact_or_r12(bm)
        res.bregman_minc_embedding = _exact_or_r12(bm * factor)
    return res


def select_tasks(g: Graph, d: int, policy: str | Sequence[int], time_limit: float | None,
                 check_integrity: bool) -> tuple[list[Task], list[str]]:
    """Work items for a clique policy ("all", "best" or an explicit member list)."""
    flags: list[str] = []
    if not isinstance(policy, str):
        k = validate_clique(g, policy)
        if len(k) != d:
            raise GraphError(f"clique {list(k)} has {len(k)} members, expected d={d}")
        return [Task(g, d, tuple(k), None, time_limit, check_integrity)], ["clique"]
    if policy not in ("all", "best"):
        raise GraphError(f"unknown clique policy {policy!r}")
    cliques = find_cliques(g, d)
    if cliques:
        flags.append("clique")
        pairs = [(tuple(k), None) for k in cliques]
    elif d == 3:
        flags.append("profile")
        pairs = [(tuple(e), c) for e, c in partial_profile_candidates(g)]
    else:
        return [], ["no-clique"]
    if len(pairs) > CLIQUE_CAP:
        log.warning("%d candidate cliques; only the first %d are tried", len(pairs), CLIQUE_CAP)
        flags.append("capped")
        pairs = pairs[:CLIQUE_CAP]
    # "best" ranks without the permanent and cross-checks only the winner
    with_perm = policy != "best"
    return [Task(g, d, k, c, time_limit, check_integrity, with_perm) for k, c in pairs], flags


def _run_all(tasks: list[Task]) -> list[CliqueResult]:
    workers = min(thread_cap(), len(tasks))
    if workers <= 1:
        return [run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_task, tasks))


def build_report(g: Graph, d: int, policy: str | Sequence[int] = "best", *,
                 time_limit: float | None = None, force: bool = False,
                 name: str = "") -> BoundReport:
    """Run every method on ``g``; raises GraphError when the rigidity check fails
    unless ``force`` is set."""
    check = maxwell_check(g, d)
    flags = ["necessary-only" if check.necessary_only else "laman"]
    if not check.global_ok:
        if not force:
            raise RigidityError(check)
        flags.append("check-override")
    tasks, sel_flags = select_tasks(g, d, policy, time_limit, check.global_ok)
    flags += sel_flags
    if d > 2:
        flags.append("extended-bregman-minc")
    results = _run_all(tasks)

    bounds: dict = {}
    has_clique = "profile" not in flags
    if g.n >= d:
        closed = new_closed_bound(g.n, d, has_clique=has_clique)
        bounds["closed_exponent"] = closed.exponent
        bounds["closed_literal"] = _exact_or_r12(closed.literal)
        bounds["closed_variant"] = _exact_or_r12(closed.variant)
        bounds["closed_certified"] = _exact_or_r12(closed.certified)
        bounds["bezout"] = bezout_bound(g.n, d)
    if g.n >= d + 1:
        bounds["borcea_streinu"] = _exact_or_r12(borcea_streinu_bound(g.n, d))
    bounds["bm_basis"] = r12(bm_basis(d))
    bounds["this_basis"] = r12(alpha_beta(d).base)

    ranked = [(r.best_bound(), i) for i, r in enumerate(results) if r.best_bound() is not None]
    best_index = min(ranked)[1] if ranked else None
    if policy == "best" and best_index is not None:
        results = [add_permanent(tasks[best_index], results[best_index])]
        best_index = 0
    bounds["best_index"] = best_index
    if best_index is not None:
        best = results[best_index]
        bounds["best_orientation_bound"] = best.best_bound()
        bounds["best_exact"] = best.exact
    if any(r.timed_out for r in results):
        flags.append("timeout")
    graph = {"name": name, "n": g.n, "m": g.m, "edges": [list(e) for e in g.edges]}
    return BoundReport(graph, d, results, bounds, flags)


# --------------------------------------------------------------------------
# Text rendering
# --------------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def render_text(rep: BoundReport) -> str:
    lines = [f"graph: n={rep.graph['n']} m={rep.graph['m']} d={rep.d}",
             f"flags: {', '.join(rep.flags) or '-'}"]
    for c in rep.cliques:
        head = f"clique {','.join(map(str, c.clique))}"
        if c.profile:
            head = f"fixed edge {','.join(map(str, c.clique))}, partial vertex {c.partial}"
        lines.append(head)
        lines.append(f"  pseudograph: n={c.pseudo_n} k={c.pseudo_k} components={len(c.components)}")
        lines.append(f"  exact B: {_fmt(c.exact) if c.exact_status == 'ok' else c.exact_status}")
        lines.append(f"  orientation bound: {_fmt(c.orientation_bound)}")
        perm = _fmt(c.permanent) if c.permanent_status == "ok" else c.permanent_status
        lines.append(f"  permanent: {perm}")
        elim = _fmt(c.elimination) if c.elimination_status == "ok" else c.elimination_status
        lines.append(f"  elimination product: {elim}")
        lines.append(f"  corollary bound: {_fmt(c.corollary)}")
        lines.append(f"  bregman-minc: {_fmt(c.bregman_minc)}")
    order = ["best_orientation_bound", "closed_certified", "closed_variant", "closed_literal",
             "borcea_streinu", "bezout", "this_basis", "bm_basis"]
    for key in order:
        if key in rep.bounds:
            lines.append(f"{key}: {_fmt(rep.bounds[key])}")
    return "\n".join(lines) + "\n"


def render_csv_rows(rep: BoundReport) -> list[dict]:
    rows = []
    for c in rep.cliques:
        rows.append({
            "clique": " ".join(map(str, c.clique)),
            "partial": "" if c.partial is None else c.partial,
            "exact": _fmt(c.exact),
            "orientation_bound": _fmt(c.orientation_bound),
            "permanent": _fmt(c.permanent),
            "elimination": _fmt(c.elimination),
            "corollary": _fmt(c.corollary),
            "bregman_minc": _fmt(c.bregman_minc),
        })
    return rows


def ratio(bound, exact) -> str:
    if bound is None or not exact:
        return ""
    return f"{float(bound) / exact:.6g}"


__all__ = ["BoundReport", "CliqueResult", "IntegrityError", "RigidityError", "build_report", "render_text", "ratio"]
