"""Command-line front end: ``rigibound check|bound|table1|gen|compare``.

Exit codes: 0 success, 2 usage or parse error, 3 rigidity check failed,
4 a method hit its time limit (the partial report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from .bounds import format_table1, table1
from .graph import GraphError, find_cliques, henneberg1_generate, maxwell_check, parse_graph, serialize_graph
from .report import BoundReport, RigidityError, build_report, ratio, render_csv_rows, render_text

EXIT_OK, EXIT_USAGE, EXIT_RIGIDITY, EXIT_TIMEOUT = 0, 2, 3, 4


class UsageError(Exception):
    pass


def warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _read_graph(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return parse_graph(text)
    except GraphError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_clique(value: str):
    if value in ("all", "best"):
        return value
    try:
        return [int(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad clique {value!r}: use all, best or v1,v2,...")


def _positive(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError("time limit must be > 0")
    return x


def _dim(value: str) -> int:
    d = int(value)
    if d < 2:
        raise argparse.ArgumentTypeError(f"invalid dimension d={d} (need d >= 2)")
    return d


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def _relation(m: int, required: int) -> str:
    return f"|E|={m} {'>' if m > required else '<'} {required}"


def cmd_check(args) -> int:
    g = _read_graph(args.graph)
    d = args.dim
    rep = maxwell_check(g, d)
    cliques = find_cliques(g, d)
    tail = f"{d}-cliques: {len(cliques)}"
    if d == 3 and not cliques and g.m > 0:
        tail += "; fallback K2' profile available"
    lines = []
    if not rep.count_ok:
        lines.append(f"maxwell count violated: {_relation(g.m, rep.required)}")
        lines.append(tail)
    elif not rep.sparse:
        sub = list(rep.violating_subgraph or ())
        lines.append(f"{'laman: no' if d == 2 else 'maxwell(necessary): fail'}; "
                     f"subgraph {sub} has {rep.violating_edges} edges")
        lines.append(tail)
    elif d == 2:
        lines.append(f"laman: yes; {tail}")
    else:
        lines.append(f"maxwell(necessary): pass; {tail}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if rep.global_ok else EXIT_RIGIDITY


def cmd_bound(args) -> int:
    g = _read_graph(args.graph)
    try:
        rep = build_report(g, args.dim, args.clique, time_limit=args.time_limit,
                           force=args.force, name=Path(args.graph).name)
    except RigidityError as exc:
        print(f"error: {exc}; use --force to override", file=sys.stderr)
        return EXIT_RIGIDITY
    except GraphError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "json":
        text = rep.dumps()
    elif args.format == "csv":
        rows = render_csv_rows(rep)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["clique"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = render_text(rep)
    _emit(text, args.out)
    if not rep.cliques:
        warn(f"no {args.dim}-clique found; only closed forms reported")
    return EXIT_TIMEOUT if rep.timed_out else EXIT_OK


def cmd_table1(args) -> int:
    if args.max_d < 2:
        raise UsageError("--max-d must be >= 2")
    rows = table1(range(2, args.max_d + 1))
    if args.format == "json":
        text = json.dumps([{"d": r.d, "this": r.this, "bm": r.bm, "bezout": r.bezout} for r in rows],
                          indent=2) + "\n"
    else:
        text = format_table1(rows, args.format)
    _emit(text, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        g = henneberg1_generate(args.n, args.dim, args.seed)
    except GraphError as exc:
        raise UsageError(str(exc)) from exc
    header = f"# henneberg n={args.n} d={args.dim} seed={args.seed}\n"
    _emit(header + serialize_graph(g), args.out)
    print(f"seed={args.seed}", file=sys.stderr)
    return EXIT_OK


COMPARE_FIELDS = [
    "file", "d", "n", "m", "rigid", "clique", "profile", "exact", "orientation_bound",
    "elimination", "corollary", "bregman_minc", "closed_certified", "borcea_streinu", "bezout",
    "ratio_elimination", "ratio_corollary", "ratio_closed", "flags", "violations",
]


def compare_row(name: str, rep: BoundReport) -> dict:
    best = rep.best
    b = rep.bounds
    row = {k: "" for k in COMPARE_FIELDS}
    row.update(file=name, d=rep.d, n=rep.graph["n"], m=rep.graph["m"],
               rigid="no" if "check-override" in rep.flags else "yes",
               closed_certified=b.get("closed_certified", ""),
               borcea_streinu=b.get("borcea_streinu", ""), bezout=b.get("bezout", ""),
               flags=" ".join(rep.flags), violations=len(rep.violations()))
    if best is not None:
        emb = best.orientation_bound
        row.update(clique=" ".join(map(str, best.clique)),
                   profile="profile" if best.profile else "",
                   exact="" if best.exact is None else best.exact,
                   orientation_bound="" if emb is None else emb,
                   elimination="" if best.elimination is None else best.elimination,
                   corollary=best.corollary, bregman_minc=best.bregman_minc,
                   ratio_elimination=ratio(best.elimination, best.exact),
                   ratio_corollary=ratio(best.corollary, best.exact),
                   ratio_closed=ratio(b.get("closed_certified"), emb))
    return row


def cmd_compare(args) -> int:
    folder = Path(args.directory)
    if not folder.is_dir():
        raise UsageError(f"not a directory: {folder}")
    files = sorted(p for p in folder.iterdir() if p.is_file())
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COMPARE_FIELDS, lineterminator="\n")
    writer.writeheader()
    if not files:
        warn(f"no graph files in {folder}")
    ok = 0
    timed_out = False
    for path in files:
        try:
            g = parse_graph(path.read_text(encoding="utf-8"))
            rep = build_report(g, args.dim, "best", time_limit=args.time_limit, force=True,
                               name=path.name)
        except (OSError, UnicodeDecodeError, GraphError) as exc:
            warn(f"skipping {path.name}: {exc}")
            continue
        ok += 1
        timed_out |= rep.timed_out
        writer.writerow(compare_row(path.name, rep))
    _emit(buf.getvalue(), args.out)
    if files and not ok:
        return EXIT_USAGE
    return EXIT_TIMEOUT if timed_out else EXIT_OK


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rigibound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, dim=True):
        if dim:
            p.add_argument("--dim", "-d", type=_dim, default=2, help="dimension d (default 2)")
        p.add_argument("--out", "-o", help="write output here instead of stdout")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")

    p = sub.add_parser("check", help="Maxwell/Laman check and clique listing")
    p.add_argument("graph", help="edge-list file, or - for stdin")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bound", help="all counts and bounds for one graph")
    p.add_argument("graph", help="edge-list file, or - for stdin")
    common(p)
    p.add_argument("--clique", type=_parse_clique, default="best",
                   help="all, best (default) or an explicit list v1,v2,...")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--time-limit", type=_positive, default=None, help="seconds per method")
    p.add_argument("--force", action="store_true", help="run even if the rigidity check fails")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("table1", help="power bases of the bounds per dimension")
    common(p, dim=False)
    p.add_argument("--max-d", type=int, default=9)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("gen", help="generate a minimally rigid graph by vertex additions")
    p.add_argument("n", type=int, help="vertex count")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compare", help="CSV of bounds for every graph file in a directory")
    p.add_argument("directory")
    common(p)
    p.add_argument("--time-limit", type=_positive, default=None, help="seconds per method")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="warning: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
