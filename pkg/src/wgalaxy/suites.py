"""Invariant suites run by ``wgalaxy verify``.

Each suite returns a :class:`SuiteResult` holding named checks.  A failed
check means the implementation contradicts a property the theory guarantees;
an inconclusive one means the window was too small to certify it.
"""
from __future__ import annotations

import random
import sys
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Optional

from .catalog import get_graph
from .enlargement import HypernodeSpec, Verdict, hyperdist, parse_spec, triangle_hyper
from .galaxy import (
    Closeness,
    ConstructionError,
    canonical_standard,
    classify,
    ladder,
    non_principal_witness,
    partial_order_check,
    principal_membership,
    refinement,
    section_embedding,
    section_probes,
    single_propagation,
)
from .oracle import oracle_all_pairs
from .ordinal import OMEGA, Ordinal, nat_diff, nat_sum, omega_pow_scaled, parse, render
from .wdistance import boundary_crossing_bound, metric, unbounded_walk, wdist
from .wgraph import ARROW, rank_str

__all__ = ["Check", "SuiteResult", "SUITES", "run_suite", "random_ordinal", "REFINEMENT_SPECS"]

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    checks: List[Check] = field(default_factory=list)
    seconds: float = 0.0

    def add(self, name: str, ok, detail: str = "") -> None:
        status = ok if isinstance(ok, str) else (PASS if ok else FAIL)
        self.checks.append(Check(name, status, detail))

    @property
    def status(self) -> str:
        kinds = {c.status for c in self.checks}
        if FAIL in kinds:
            return FAIL
        if INCONCLUSIVE in kinds:
            return INCONCLUSIVE
        return PASS


def random_ordinal(rng: random.Random, max_coeff: int = 10 ** 6) -> Ordinal:
    exps = [0, 1, 2, 3, 5, OMEGA]
    k = rng.randint(0, 4)
    return Ordinal((rng.choice(exps), rng.randint(0, max_coeff)) for _ in range(k))


# -- suites --------------------------------------------------------------------------

def suite_ordinal(window: int, count: int = 2000) -> SuiteResult:
    r = SuiteResult("ordinal")
    rng = random.Random(1)
    comm = assoc = order = roundtrip = text = 0
    for _ in range(count):
        a, b, c = (random_ordinal(rng) for _ in range(3))
        comm += nat_sum(a, b) != nat_sum(b, a)
        assoc += nat_sum(nat_sum(a, b), c) != nat_sum(a, nat_sum(b, c))
        lt, gt, eq = a < b, a > b, a == b
        order += (lt + gt + eq) != 1 or (a < b and b < c and not a < c)
        s = nat_sum(a, b)
        d = nat_diff(s, b)
        roundtrip += d != a or nat_sum(b, d) != s
        text += parse(render(a)) != a
    r.add("natSum commutative", comm == 0, f"{count} triples")
    r.add("natSum associative", assoc == 0, f"{count} triples")
    r.add("cmp total order", order == 0, f"{count} triples")
    r.add("natDiff round trip", roundtrip == 0, f"{count} triples")
    r.add("render/parse round trip", text == 0, f"{count} values")
    return r


def _maximal_nodes(g, W):
    s = g.expand(W)
    m = metric(g, W)
    return sorted(x for x in s.nodes if m.rep(x) == x)


def suite_metric(window: int, triples: int = 500, spec_triples: int = 100) -> SuiteResult:
    r = SuiteResult("metric")
    rng = random.Random(2)
    W = min(window, 6)
    zero = sym = tri = promo = 0
    done = 0
    fams = ["ray0", "ladder1", "ladder2", "hub1", "hub2"]
    per = -(-triples // len(fams))
    for name in fams:
        g = get_graph(name)
        nodes = _maximal_nodes(g, W)
        m = metric(g, W)
        for _ in range(per):
            x, y, z = (rng.choice(nodes) for _ in range(3))
            dxy, dyz, dxz = m.distance(x, y), m.distance(y, z), m.distance(x, z)
            zero += m.distance(x, x) != 0
            sym += dxy != m.distance(y, x)
            tri += not dxz <= nat_sum(dxy, dyz)
            done += 1
        s = g.expand(W)
        for low, up in sorted(s.embracer.items()):
            if hasattr(low, "family") and low in s.nodes:
                y = nodes[0]
                promo += wdist(g, low, y, W).value != wdist(g, s.maximal(low), y, W).value
    r.add("d(x,x) = 0", zero == 0, f"{done} triples")
    r.add("symmetry", sym == 0, f"{done} triples")
    r.add("triangle inequality", tri == 0, f"{done} triples")
    r.add("promotion invariance", promo == 0)
    # hyperdistance triangle inequality on hypernode triples
    pools = {
        "ray0": ["const(n[0])", "const(n[3])", "n[n]", "n[2n]", "n[n+2]", "n[n^2]"],
        "ladder1": ["const(b1[0])", "const(r[2,1])", "b1[n]", "b1[2n]", "b1[n+1]", "r[n,0]", "r[n,n]",
                    "r[0,n]"],
        "hub1": ["const(h[])", "const(e1[2])", "e1[n]", "r[n,0]", "r[n,n]", "e1[2n+1]"],
    }
    bad = inc = 0
    k = 0
    Wh = min(window, 8)
    while k < spec_triples:
        for name, pool in pools.items():
            g = get_graph(name)
            x, y, z = (parse_spec(rng.choice(pool)) for _ in range(3))
            d = triangle_hyper(g, x, y, z, Wh)
            bad += d.verdict is Verdict.OUT
            inc += d.verdict is Verdict.INCONCLUSIVE
            k += 1
    r.add("hyperdistance triangle inequality", FAIL if bad else (INCONCLUSIVE if inc else PASS),
          f"{k} spec triples, {bad} violations, {inc} inconclusive")
    return r


def suite_oracle(window: int) -> SuiteResult:
    r = SuiteResult("oracle")
    for name in ("ray0", "ladder1", "ladder2", "hub1"):
        g = get_graph(name)
        pairs = bad = 0
        for W in range(1, min(window, 6) + 1):
            m = metric(g, W)
            for x, row in oracle_all_pairs(g, W).items():
                d = m.distances_from(x)
                for y, v in row.items():
                    pairs += 1
                    bad += d.get(m.rep(y)) != v
        r.add(f"{name} wdist = walk enumeration", bad == 0, f"{pairs} pairs, {bad} mismatches")
    return r


def suite_boundary(window: int) -> SuiteResult:
    r = SuiteResult("boundary")
    for name, rho in (("ladder1", 1), ("ladder2", 2)):
        g = get_graph(name)
        W = min(window, 10) if rho == 2 else window
        bn = g.boundary_nodes(rho, W)
        pairs = bad = 0
        for x, y in combinations(bn, 2):
            if g.wadjacent(x, y, rho, W):
                continue
            pairs += 1
            bad += not boundary_crossing_bound(g, x, y, W)
        r.add(f"{name}: non-adjacent boundary pairs have d >= w^{rho}", bad == 0,
              f"{pairs} pairs, {bad} violations")
    return r


def suite_unbounded(window: int) -> SuiteResult:
    r = SuiteResult("unbounded")
    for name, rho, K in (("ladder1", 1, 5), ("ladder2", 2, 3)):
        g = get_graph(name)
        W = max(min(window, 8), K + 2)
        x0 = g.boundary_nodes(rho, W)[0]
        uw = unbounded_walk(g, rho, x0, K, W)
        ok = len(uw.subsequence) == K and all(
            wdist(g, x0, uw.stops[m], W).value >= omega_pow_scaled(rho, k)
            for k, m in enumerate(uw.subsequence, 1))
        r.add(f"{name}: d(x0, x_m_k) >= w^{rho}*k for k=1..{K}", ok,
              "m = " + ",".join(map(str, uw.subsequence)))
    return r


def suite_witness(window: int) -> SuiteResult:
    r = SuiteResult("witness")
    for name, rho in (("ladder1", 1), ("ladder2", 2)):
        g = get_graph(name)
        spec, dec, _ = non_principal_witness(g, rho, min(window, 8))
        r.add(f"{name}: witness outside the principal galaxy", dec.verdict is Verdict.OUT, f"{spec}: {dec.verdict}")
    try:
        non_principal_witness(get_graph("hub1"), 1, min(window, 8))
        r.add("hub1: witness refused (no boundary nodes)", False)
    except ConstructionError as exc:
        r.add("hub1: witness refused (no boundary nodes)", True, str(exc))
    return r


def suite_embedding(window: int) -> SuiteResult:
    r = SuiteResult("embedding")
    g = get_graph("ladder2")
    W = min(window, 3)
    pairs = bad = few = 0
    for rho in (1, 2):
        for s_rho in g.sections(rho, W):
            for alpha in range(rho):
                for s_alpha in g.sections(alpha, W):
                    if not s_alpha.nodes <= s_rho.nodes:
                        continue
                    probes = section_probes(g, s_alpha)
                    few += len(probes) < 5
                    pairs += 1
                    bad += not section_embedding(g, s_alpha, s_rho, probes)
    r.add("ladder2: alpha-section probes principal in rho-section", bad == 0 and few == 0,
          f"{pairs} section pairs, {bad} failures, {few} short probe sets")
    return r


REFINEMENT_SPECS = [
    "const(b2[0])", "const(b2[3])", "const(b1[0,0])", "const(b1[2,5])", "const(r[1,1,1])",
    "b2[n]", "b2[n+1]", "b2[2n]", "b1[0,n]", "b1[0,n+2]",
    "b1[1,2n]", "b1[n,0]", "b1[n,n]", "r[0,0,n]", "r[0,0,n+1]",
    "r[0,0,2n]", "r[1,n,0]", "r[n,0,0]", "r[2,3,n]", "r[0,n,n]",
]


def suite_refinement(window: int) -> SuiteResult:
    r = SuiteResult("refinement")
    g = get_graph("ladder2")
    W = min(window, 8)
    specs = [parse_spec(s) for s in REFINEMENT_SPECS]
    for rho in range(0, 3):
        for alpha in range(0, rho + 1):
            r.add(f"ladder2: {alpha}-galaxies refine {rho}-galaxies", refinement(g, specs, alpha, rho, W))
    return r


def suite_ladder(window: int, K: int = 4) -> SuiteResult:
    r = SuiteResult("ladder")
    g = get_graph("ladder1")
    x = parse_spec("const(b1[0])")
    W = min(window, 16)
    specs = ladder(g, x, parse_spec("diag(b1[n])"), 1, K, W)
    r.add(f"ladder emits {2 * K + 1} specs", len(specs) == 2 * K + 1, " < ".join(map(str, specs)))
    r.add("all members non-principal",
          all(principal_membership(g, s, 1, W).verdict is Verdict.OUT for s in specs))
    rep = partial_order_check(g, specs, 1, x, W)
    n = len(specs)
    wrong = [(i, j) for i in range(n) for j in range(n) if i != j
             and rep.verdicts[(i, j)].verdict is not (Closeness.CLOSER if i < j else Closeness.NOT_CLOSER)]
    r.add(f"{n * (n - 1) // 2} pairs ordered as constructed", not wrong, f"{len(wrong)} unexpected verdicts")
    r.add("closeness is a strict partial order", rep.ok,
          f"antisymmetry failures {len(rep.antisymmetry_failures)}, transitivity failures {len(rep.transitivity_failures)}")
    r.add("Hasse diagram is a chain", rep.hasse == [(i, i + 1) for i in range(n - 1)])
    return r


HUB_PROBES = ["const(h[])", "const(e1[3])", "e1[n]", "e1[2n+1]", "r[n,0]", "r[n,n]", "r[n^2,1]"]


def suite_hub(window: int) -> SuiteResult:
    r = SuiteResult("hub")
    g = get_graph("hub1")
    W = min(window, 12)
    probes = [parse_spec(s) for s in HUB_PROBES]
    r.add("hub1: every probe principal", all(principal_membership(g, p, 1, W).is_in for p in probes))
    for rho in (1, ARROW, OMEGA):
        part = classify(g, probes, rho, W)
        r.add(f"hub1: one {rank_str(rho)}-galaxy", len(part.blocks) == 1 and not part.inconclusive,
              f"{len(part.blocks)} block(s)")
    r.add("hub1: single propagation (vacuous, nu = 1)", single_propagation(g, 1, probes, W))
    g2 = get_graph("hub2")
    probes2 = [parse_spec(s) for s in ("const(h[])", "r[n,0,0]", "r[n,0,3]", "r[2n,0,1]", "const(r[1,0,0])")]
    W2 = min(window, 8)
    r.add("hub2: one 1-galaxy propagates to one 2-galaxy", single_propagation(g2, 1, probes2, W2))
    return r


SUITES: Dict[str, Callable[[int], SuiteResult]] = {
    "ordinal": suite_ordinal,
    "metric": suite_metric,
    "oracle": suite_oracle,
    "boundary": suite_boundary,
    "unbounded": suite_unbounded,
    "witness": suite_witness,
    "embedding": suite_embedding,
    "refinement": suite_refinement,
    "ladder": suite_ladder,
    "hub": suite_hub,
}


def run_suite(name: str, window: int) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t = time.perf_counter()
    try:
        res = SUITES[name](window)
    except ConstructionError as exc:
        res = SuiteResult(name)
        res.add("construction", INCONCLUSIVE, str(exc))
    res.seconds = time.perf_counter() - t
    return res
