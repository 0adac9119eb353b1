"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 result dominated by Inconclusive
(or an uncertified distance), 3 a guaranteed property failed.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from .catalog import CATALOG, build, catalog_names, get_graph
from .enlargement import SpecParseError, Verdict, hyperdist, parse_spec
from .galaxy import (
    Closeness,
    ConstructionError,
    canonical_standard,
    classify,
    closer,
    ladder,
    non_principal_witness,
    partial_order_check,
)
from .ordinal import render
from .seqs import PolyParseError
from .suites import SUITES, run_suite
from .wdistance import InconclusiveError, Unreachable, shortest_walk, walk_length, wdist
from .wgraph import (
    PresentationError,
    Presentation,
    RankError,
    WGraph,
    parse_node_ref,
    parse_rank,
    rank_str,
)

EXIT_OK, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_VIOLATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Out:
    """Collects report lines; ``machine`` mode emits ``key=value`` only."""

    def __init__(self, machine: bool):
        self.machine = machine
        self.lines: List[str] = []

    def kv(self, key: str, value) -> None:
        if self.machine:
            self.lines.append(f"{key}={value}")

    def text(self, line: str) -> None:
        if not self.machine:
            self.lines.append(line)

    def flush(self, stream) -> None:
        if self.lines:
            stream.write("\n".join(self.lines) + "\n")


# -- argument resolution -------------------------------------------------------------

def load_graph(name: str, family_file: Optional[str]) -> WGraph:
    if family_file:
        try:
            with open(family_file, encoding="utf-8") as fh:
                p = Presentation.from_json(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {family_file}: {exc.strerror}") from None
        if name not in ("-", p.name):
            raise UsageError(f"{family_file} defines {p.name!r}, not {name!r}")
        return WGraph(p)
    try:
        build(name)
    except KeyError:
        if os.path.isfile(name):
            with open(name, encoding="utf-8") as fh:
                return WGraph(Presentation.from_json(fh.read()))
        raise UsageError(f"unknown graph {name!r}: not a catalog family ({', '.join(catalog_names())}) "
                         f"or a readable file") from None
    return get_graph(name)


def _node(g: WGraph, text: str):
    try:
        return g.check_ref(parse_node_ref(text))
    except (ValueError, PresentationError) as exc:
        raise UsageError(str(exc)) from None


def _spec(g: WGraph, text: str):
    try:
        s = parse_spec(text)
        g.p.node_family(s.family)
    except (SpecParseError, PolyParseError, PresentationError) as exc:
        raise UsageError(str(exc)) from None
    return s


def _rank(text: str) -> int:
    try:
        return parse_rank(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- commands ----------------------------------------------------------------------

def cmd_catalog(args, out: Out) -> int:
    for name in catalog_names():
        g = get_graph(name)
        out.kv(f"family.{name}.nu", rank_str(g.nu))
        out.kv(f"family.{name}.description", CATALOG[name])
        out.text(f"{name:8s} nu={rank_str(g.nu)}  {CATALOG[name]}")
    return EXIT_OK


def cmd_sections(args, out: Out) -> int:
    g = load_graph(args.graph, args.family_file)
    rho = _rank(args.rank)
    secs = g.sections(rho, args.window)
    out.kv("count", len(secs))
    out.text(f"{len(secs)} {rank_str(rho)}-section(s) at window {args.window}")
    for i, s in enumerate(secs):
        out.kv(f"section.{i}.key", s.key)
        out.kv(f"section.{i}.nodes", len(s.nodes))
        out.kv(f"section.{i}.branches", len(s.branches))
        out.text(f"  {s.key}: {len(s.nodes)} wnodes, {len(s.branches)} branches")
    return EXIT_OK


def cmd_dist(args, out: Out) -> int:
    g = load_graph(args.graph, args.family_file)
    x, y = _node(g, args.x), _node(g, args.y)
    d = wdist(g, x, y, args.window)
    out.kv("distance", render(d.value))
    out.kv("certified", str(d.certified).lower())
    out.kv("window", d.stability_window)
    out.text(f"{render(d.value)} ({'certified' if d.certified else 'UNCERTIFIED'}, window={d.stability_window})")
    return EXIT_OK if d.certified else EXIT_INCONCLUSIVE


def cmd_walk(args, out: Out) -> int:
    g = load_graph(args.graph, args.family_file)
    x, y = _node(g, args.x), _node(g, args.y)
    w = shortest_walk(g, x, y, args.window)
    out.kv("length", render(walk_length(w)))
    out.kv("segments", len(w))
    out.kv("walk", str(w))
    out.text(f"length {render(walk_length(w))}: {w}")
    return EXIT_OK


def cmd_hyperdist(args, out: Out) -> int:
    g = load_graph(args.graph, args.family_file)
    x, y = _spec(g, args.x), _spec(g, args.y)
    p = hyperdist(g, x, y, args.window)
    out.kv("profile", p.describe())
    out.kv("valid_from", p.start)
    out.kv("certified", str(p.certified).lower())
    for n, v in p.samples:
        out.kv(f"sample.{n}", render(v))
    out.text(f"d({x}, {y}) = {p.describe()}  for n >= {p.start} "
             f"({'certified' if p.certified else 'UNCERTIFIED'})")
    out.text("  samples: " + ", ".join(f"{n}:{render(v)}" for n, v in p.samples))
    if not p.symbolic or not p.certified:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_classify(args, out: Out) -> int:
    g = load_graph(args.graph, args.family_file)
    rho = _rank(args.rank)
    specs = [_spec(g, s) for s in args.specs]
    part = classify(g, specs, rho, args.window)
    out.kv("blocks", len(part.blocks))
    out.text(f"{len(part.blocks)} {rank_str(rho)}-galax{'y' if len(part.blocks) == 1 else 'ies'}")
    for i, (gid, members) in enumerate(part.blocks):
        out.kv(f"block.{i}.principal", str(gid.principal).lower())
        out.kv(f"block.{i}.members", " ".join(map(str, members)))
        out.text(f"  [{i}] {'principal' if gid.principal else 'non-principal'}: {', '.join(map(str, members))}")
    for a, b in part.inconclusive:
        out.kv("inconclusive", f"{a} {b}")
        out.text(f"  inconclusive: {a} ~ {b}")
    for a, b in part.conflicts:
        out.kv("conflict", f"{a} {b}")
        out.text(f"  CONFLICT: {a} and {b} merged but certified apart")
    if part.conflicts:
        return EXIT_VIOLATION
    return EXIT_INCONCLUSIVE if part.inconclusive else EXIT_OK


def _x_spec(g, args):
    return _spec(g, args.x) if getattr(args, "x", None) else canonical_standard(g, args.window)


def cmd_order(args, out: Out) -> int:
    g = load_graph(args.graph, args.family_file)
    rho = _rank(args.rank)
    specs = [_spec(g, s) for s in args.specs]
    x = _x_spec(g, args)
    rep = partial_order_check(g, specs, rho, x, args.window)
    out.kv("standard", x)
    out.text(f"closeness at rank {rank_str(rho)} relative to {x}")
    for i, s in enumerate(specs):
        out.kv(f"item.{i}", s)
        out.text(f"  [{i}] {s}")
    for (i, j) in rep.hasse:
        out.kv("cover", f"{i}<{j}")
        out.text(f"  {specs[i]}  closer than  {specs[j]}")
    for (i, j) in rep.inconclusive:
        out.kv("inconclusive", f"{i},{j}")
    out.kv("partial_order", str(rep.ok).lower())
    out.text(f"  partial order {'verified' if rep.ok else 'VIOLATED'}"
             + (f"; {len(rep.inconclusive)} inconclusive pair(s)" if rep.inconclusive else ""))
    if not rep.ok:
        return EXIT_VIOLATION
    return EXIT_INCONCLUSIVE if len(rep.inconclusive) * 2 > len(rep.verdicts) else EXIT_OK


def cmd_ladder(args, out: Out) -> int:
    g = load_graph(args.graph, args.family_file)
    rho = _rank(args.rank)
    x, v = _spec(g, args.x), _spec(g, args.v)
    if not x.is_constant():
        raise UsageError(f"{x} is not a standard (constant) spec")
    try:
        specs = ladder(g, x, v, rho, args.K, args.window)
    except ConstructionError as exc:
        out.kv("error", str(exc))
        out.text(f"construction failed: {exc}")
        return EXIT_INCONCLUSIVE
    out.kv("count", len(specs))
    out.text(f"{len(specs)} galaxies, closest first:")
    for i, s in enumerate(specs, -args.K):
        out.kv(f"galaxy.{i}", s)
        out.text(f"  [{i:+d}] {s}")
    for a, b in zip(specs, specs[1:]):
        cv = closer(g, a, b, rho, x, window=args.window)
        if cv.verdict is not Closeness.CLOSER:
            return EXIT_VIOLATION
    out.kv("adjacent_closer", "true")
    return EXIT_OK


def cmd_witness(args, out: Out) -> int:
    g = load_graph(args.graph, args.family_file)
    rho = _rank(args.rank)
    try:
        spec, dec, uw = non_principal_witness(g, rho, args.window)
    except ConstructionError as exc:
        out.kv("error", str(exc))
        out.text(f"no witness: {exc}")
        return EXIT_INCONCLUSIVE
    out.kv("witness", spec)
    out.kv("principal", dec.verdict)
    out.kv("subsequence", ",".join(map(str, uw.subsequence)))
    out.text(f"witness {spec}: principal membership {dec.verdict}")
    return EXIT_OK if dec.verdict is Verdict.OUT else EXIT_VIOLATION


def cmd_verify(args, out: Out) -> int:
    name = args.suite_flag or args.suite
    names = list(SUITES) if name in (None, "all") else [name]
    if any(n not in SUITES for n in names):
        raise UsageError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    worst = EXIT_OK
    for n in names:
        r = run_suite(n, args.window)
        out.kv(f"suite.{n}", r.status)
        out.text(f"{n}: {r.status}")
        for i, c in enumerate(r.checks):
            out.kv(f"suite.{n}.{i}", f"{c.status} {c.name}")
            out.text(f"  {c.status:12s} {c.name}" + (f"  ({c.detail})" if c.detail else ""))
        if r.status == "fail":
            worst = EXIT_VIOLATION
        elif r.status == "inconclusive" and worst == EXIT_OK:
            worst = EXIT_INCONCLUSIVE
    return worst


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=int, default=argparse.SUPPRESS, help="window bound (default 16, >= 2)")
    common.add_argument("--machine", action="store_true", default=argparse.SUPPRESS, help="key=value output")
    common.add_argument("--family-file", default=argparse.SUPPRESS, metavar="PATH",
                        help="read the graph presentation from a JSON file")

    ap = argparse.ArgumentParser(prog="wgalaxy", parents=[common],
                                 description="Ordinal distances and galaxies of transfinite wgraphs.")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    add("catalog", cmd_catalog, "list built-in families")
    p = add("sections", cmd_sections, "list rho-sections of a window")
    p.add_argument("graph")
    p.add_argument("rank")
    for name, fn, h in (("dist", cmd_dist, "wdistance between two wnodes"),
                        ("walk", cmd_walk, "a shortest walk between two wnodes")):
        p = add(name, fn, h)
        p.add_argument("graph")
        p.add_argument("x")
        p.add_argument("y")
    p = add("hyperdist", cmd_hyperdist, "hyperdistance profile of two hypernode specs")
    p.add_argument("graph")
    p.add_argument("x")
    p.add_argument("y")
    p = add("classify", cmd_classify, "partition specs into rho-galaxies")
    p.add_argument("graph")
    p.add_argument("rank")
    p.add_argument("specs", nargs="*")
    p = add("order", cmd_order, "closeness order of the galaxies of the given specs")
    p.add_argument("graph")
    p.add_argument("rank")
    p.add_argument("specs", nargs="+")
    p.add_argument("--standard", dest="x", default=None, help="standard spec to measure from")
    p = add("ladder", cmd_ladder, "build 2K+1 galaxies ordered by closeness")
    p.add_argument("graph")
    p.add_argument("rank")
    p.add_argument("x")
    p.add_argument("v")
    p.add_argument("K", type=int)
    p = add("witness", cmd_witness, "a hypernode outside the principal galaxy")
    p.add_argument("graph")
    p.add_argument("rank")
    p = add("verify", cmd_verify, "run invariant suites")
    p.add_argument("suite", nargs="?", default=None)
    p.add_argument("--suite", dest="suite_flag", default=None, metavar="NAME")
    return ap


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    args.window = getattr(args, "window", 16)
    args.machine = getattr(args, "machine", False)
    args.family_file = getattr(args, "family_file", None)
    if args.window < 2:
        stderr.write("wgalaxy: --window must be >= 2\n")
        return EXIT_USAGE
    out = Out(args.machine)
    try:
        code = args.fn(args, out)
    except UsageError as exc:
        stderr.write(f"wgalaxy: {exc}\n")
        return EXIT_USAGE
    except (PresentationError, RankError) as exc:
        stderr.write(f"wgalaxy: {exc}\n")
        return EXIT_USAGE
    except Unreachable as exc:
        out.kv("error", str(exc))
        out.kv("components", "separate")
        out.text(f"unreachable: {exc}; the presentation is not wconnected and each component is handled separately")
        code = EXIT_INCONCLUSIVE
    except InconclusiveError as exc:
        out.kv("error", str(exc))
        out.text(f"inconclusive: {exc}")
        code = EXIT_INCONCLUSIVE
    out.kv("exit", code)
    out.flush(stdout)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
