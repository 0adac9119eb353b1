"""Galaxies of the enlargement: classification, principal membership,
closeness, and the ladder of ever closer / ever further galaxies.

Closeness of two galaxies ``a`` (holding ``y``) and ``b`` (holding ``z``)
relative to a standard hypernode ``x``: ``a`` is closer when, for every
``m``, eventually ``d(z_n, x) - d(y_n, x) >= w^rho * m`` (natural difference).
The "for every m" is certified symbolically, in one of two ways:

* both profiles have polynomial coefficients: the eventual signs of the
  coefficient differences decide the question exactly;
* the specs came out of :func:`ladder`: each construction step records an
  eventual-order fact (``LE``) and an unbounded-gap fact (``GAP``) with an
  explicit threshold ``N(m)``; facts chain along ``LE`` edges.

A finite sampling pass then checks each certificate on a stretch of indices
past its claimed threshold.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .enlargement import (
    DistanceProfile,
    FilterDecision,
    HypernodeSpec,
    Verdict,
    certain,
    check_spec,
    decide,
    hyperdist,
    spec_rank,
)
from .ordinal import OMEGA, nat_diff, omega_pow_scaled
from .seqs import Composed, IndexSeq, IntPoly, ThresholdSteps, fit_poly
from .wdistance import InconclusiveError, Scope, metric, unbounded_walk
from .wgraph import ARROW, NodeRef, RankError, Section, WGraph, rank_str

__all__ = [
    "ConstructionError",
    "ModelViolation",
    "GalaxyId",
    "GalaxyPartition",
    "Closeness",
    "ClosenessVerdict",
    "canonical_standard",
    "limitedly_distant",
    "classify",
    "galaxy_of",
    "principal_membership",
    "refinement",
    "section_probes",
    "section_embedding",
    "closer",
    "ladder",
    "OrderReport",
    "partial_order_check",
    "non_principal_witness",
    "single_propagation",
]


class ConstructionError(ValueError):
    pass


class ModelViolation(AssertionError):
    """A check that the theory guarantees has failed."""


@dataclass(frozen=True)
class GalaxyId:
    rank: int
    representative: HypernodeSpec
    principal: bool

    def __str__(self):
        tag = "principal" if self.principal else "non-principal"
        return f"G{rank_str(self.rank)}({self.representative}, {tag})"


@dataclass
class GalaxyPartition:
    rank: int
    blocks: List[Tuple[GalaxyId, Tuple[HypernodeSpec, ...]]]
    inconclusive: List[Tuple[HypernodeSpec, HypernodeSpec]]
    conflicts: List[Tuple[HypernodeSpec, HypernodeSpec]] = field(default_factory=list)

    def block_of(self, x: HypernodeSpec) -> Optional[int]:
        for i, (_, members) in enumerate(self.blocks):
            if x in members:
                return i
        return None


# -- limited distance -------------------------------------------------------------

def _eventual(seq: IndexSeq):
    """('const', value) or ('unbounded', None) for a coefficient sequence; None if unknown."""
    c = seq.constant_value()
    if c is not None:
        return ("const", c)
    if isinstance(seq, IntPoly):
        if seq.leading > 0:
            return ("unbounded", None)
        return None
    if isinstance(seq, Composed):
        inner = seq.inner
        if inner.nondecreasing_from() is None or not inner.is_unbounded():
            return None
        return _eventual(seq.outer)
    if seq.is_unbounded() and seq.nondecreasing_from() is not None:
        return ("unbounded", None)
    return None


def limitedly_distant(g: WGraph, x: HypernodeSpec, y: HypernodeSpec, rho: int, window: int,
                      scope: Optional[Scope] = None) -> FilterDecision:
    """Is ``d(x_n, y_n)`` eventually bounded by ``w^rho * mu`` for a fixed ``mu``
    (for the arrow rank: eventually below ``w^w``)?"""
    prof = hyperdist(g, x, y, window, scope)
    if not prof.symbolic:
        return certain(Verdict.INCONCLUSIVE, 0, window, "profile has no exact fit in window")
    if not prof.certified:
        return certain(Verdict.INCONCLUSIVE, prof.start, window, "profile not window-certified")
    n0 = prof.start
    if rho == ARROW:
        ev = _eventual(prof.coeff(OMEGA))
        if ev is None:
            return certain(Verdict.INCONCLUSIVE, n0, window, "w^w coefficient undetermined")
        if ev == ("const", 0):
            return certain(Verdict.IN, n0, window, "eventually below w^w")
        return certain(Verdict.OUT, n0, window, "w^w coefficient eventually positive")
    for e in prof.exponents():
        if e <= rho:
            continue
        ev = _eventual(prof.coeff(e))
        if ev is None:
            return certain(Verdict.INCONCLUSIVE, n0, window, f"coefficient at exponent {rank_str(e)} undetermined")
        if ev != ("const", 0):
            return certain(Verdict.OUT, n0, window, f"coefficient at exponent {rank_str(e)} eventually positive")
    ev = _eventual(prof.coeff(rho))
    if ev is None:
        return certain(Verdict.INCONCLUSIVE, n0, window, f"coefficient at exponent {rank_str(rho)} undetermined")
    if ev[0] == "const":
        # one extra unit absorbs lower-order terms
        return certain(Verdict.IN, n0, window, f"d <= w^{rank_str(rho)}*{ev[1] + 1}")
    return certain(Verdict.OUT, n0, window, f"coefficient at exponent {rank_str(rho)} unbounded")


def canonical_standard(g: WGraph, window: int, scope: Optional[Scope] = None) -> HypernodeSpec:
    """The least maximal wnode (of the scope's section, if any) as a constant spec."""
    if scope is None:
        for x in sorted(g.expand(1).nodes):
            if g.maximal_node(x):
                return HypernodeSpec.constant(x, "standard")
        raise ConstructionError("presentation has no maximal wnode")
    m = metric(g, window, scope)
    members = sorted(x for x in g.expand(window).nodes if x in m and m.rep(x) == x)
    if not members:
        raise ConstructionError(f"empty scope {scope}")
    return HypernodeSpec.constant(members[0], "standard")


def principal_membership(g: WGraph, x: HypernodeSpec, rho: Optional[int] = None, window: int = 16,
                         scope: Optional[Scope] = None) -> FilterDecision:
    rho = g.nu if rho is None else rho
    return limitedly_distant(g, x, canonical_standard(g, window, scope), rho, window, scope)


def galaxy_of(g: WGraph, x: HypernodeSpec, rho: int, window: int) -> GalaxyId:
    return GalaxyId(rho, x, principal_membership(g, x, rho, window).is_in)


class _UF:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, i):
        while self.p[i] != i:
            self.p[i] = self.p[self.p[i]]
            i = self.p[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def classify(g: WGraph, specs: Sequence[HypernodeSpec], rho: int, window: int,
             scope: Optional[Scope] = None) -> GalaxyPartition:
    items: List[HypernodeSpec] = []
    for s in specs:
        if s not in items:
            items.append(check_spec(g, s))
    uf = _UF(len(items))
    unsure, apart = [], []
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            d = limitedly_distant(g, items[i], items[j], rho, window, scope)
            if d.is_in:
                uf.union(i, j)
            elif d.is_out:
                apart.append((i, j))
            else:
                unsure.append((items[i], items[j]))
    groups: Dict[int, List[int]] = {}
    for i in range(len(items)):
        groups.setdefault(uf.find(i), []).append(i)
    blocks = []
    for root in sorted(groups):
        members = tuple(items[i] for i in groups[root])
        rep = members[0]
        principal = principal_membership(g, rep, rho, window, scope).is_in
        blocks.append((GalaxyId(rho, rep, principal), members))
    conflicts = [(items[i], items[j]) for i, j in apart if uf.find(i) == uf.find(j)]
    return GalaxyPartition(rho, blocks, unsure, conflicts)


def refinement(g: WGraph, specs: Sequence[HypernodeSpec], alpha: int, rho: int, window: int) -> bool:
    """Every alpha-block lies inside one rho-block (Inconclusive members ignored)."""
    if alpha > rho:
        raise RankError("refinement needs alpha <= rho")
    fine = classify(g, specs, alpha, window)
    coarse = classify(g, specs, rho, window)
    shaky = {s for pr in fine.inconclusive + coarse.inconclusive for s in pr}
    for _, members in fine.blocks:
        where = {coarse.block_of(s) for s in members if s not in shaky}
        if len(where) > 1:
            return False
    return True


# -- sections and probes -----------------------------------------------------------

def section_probes(g: WGraph, sec: Section, count: int = 6) -> List[HypernodeSpec]:
    """Constant and diagonal specs whose windowed values stay inside ``sec``."""
    W = sec.window
    nodes = sorted(sec.nodes)
    out: List[HypernodeSpec] = []

    def add(s):
        if s not in out:
            out.append(s)

    firsts: Dict[str, NodeRef] = {}
    for x in nodes:
        firsts.setdefault(x.family, x)
    for x in list(firsts.values()) + [nodes[len(nodes) // 2], nodes[-1]]:
        add(HypernodeSpec.constant(x, "const"))
    for x in firsts.values():
        for i in range(len(x.idx)):
            for lin in ((x.idx[i], 1), (x.idx[i] + 1, 1), (x.idx[i], 2)):
                p = IntPoly(lin)
                idx = tuple(p if j == i else IntPoly.const(v) for j, v in enumerate(x.idx))
                s = HypernodeSpec(x.family, idx, (), "probe")
                seen = [s.at(n) for n in range(W + 1) if p(n) <= W]
                if len(seen) >= 3 and all(r in sec.nodes for r in seen):
                    add(s)
    return out[:max(count, 5)] if len(out) > count else out


def section_embedding(g: WGraph, s_alpha: Section, s_rho: Section, probes: Sequence[HypernodeSpec],
                      window: Optional[int] = None) -> bool:
    """Probes living in ``s_alpha`` are principal at rank ``rho`` inside ``*s_rho``."""
    if not s_alpha.rank < s_rho.rank:
        raise RankError("embedding needs alpha < rho")
    if not s_alpha.nodes <= s_rho.nodes:
        raise ValueError(f"{s_alpha} is not inside {s_rho}")
    window = s_rho.window if window is None else window
    scope = Scope(s_rho.rank, s_rho.key)
    return all(principal_membership(g, p, s_rho.rank, window, scope).is_in for p in probes)


# -- closeness -----------------------------------------------------------------------

class Closeness(enum.Enum):
    CLOSER = "Closer"
    NOT_CLOSER = "NotCloser"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass
class ClosenessVerdict:
    verdict: Closeness
    witnesses: Tuple[HypernodeSpec, HypernodeSpec, HypernodeSpec]  # (x, y, z)
    certificates: Tuple[FilterDecision, ...]
    reason: str

    def __str__(self):
        return f"{self.verdict} ({self.reason})"


def _rep(a) -> HypernodeSpec:
    return a.representative if isinstance(a, GalaxyId) else a


def _gap_value(dy, dz, rho: int, m: int, n: int) -> bool:
    d = nat_diff(dz.value(n), dy.value(n))
    return d is not None and d >= omega_pow_scaled(rho, m)


def _poly_growth(dy: DistanceProfile, dz: DistanceProfile, rho: int):
    """Exact decision for polynomial profiles: ('closer', N) | ('not', reason) | None."""
    if not all(isinstance(c, IntPoly) for c in list(dy.coeffs.values()) + list(dz.coeffs.values())):
        return None
    base = max(dy.start, dz.start)
    exps = sorted(set(dy.coeffs) | set(dz.coeffs), reverse=True)
    diffs = {e: dz.coeff(e) - dy.coeff(e) for e in exps}
    for e, d in diffs.items():
        if not d.is_zero() and d.leading < 0:
            return ("not", f"difference undefined eventually (exponent {rank_str(e)})")
    defined = max([base] + [d.nonneg_from() for d in diffs.values()])
    high = [e for e in exps if e > rho and not diffs[e].is_zero()]
    if high:
        e = high[0]
        n1 = (diffs[e] - 1).nonneg_from()
        return ("closer", lambda m: max(defined, n1), f"exponent {rank_str(e)} gap")
    d = diffs.get(rho, IntPoly.const(0))
    if d.is_unbounded():
        return ("closer", lambda m: max(defined, (d - m).nonneg_from()),
                f"w^{rank_str(rho)} gap {d}")
    return ("not", f"bounded difference ({d})")


def _facts(specs: Iterable[HypernodeSpec], x: HypernodeSpec):
    """LE / GAP edges recorded by ladder construction steps, relative to ``x``."""
    le: Dict[Tuple, int] = {}
    gap: Dict[Tuple, Callable[[int], int]] = {}
    todo = list(specs)
    seen = set()
    while todo:
        s = todo.pop()
        if id(s) in seen or s.origin is None:
            continue
        seen.add(id(s))
        kind, parent, arg, base_x = s.origin
        if base_x != x:
            continue
        if kind == "steps":
            le[(s, parent)] = 0
            gap[(s, parent)] = arg.gap_reach
        elif kind == "accel":
            le[(parent, s)] = 0
            gap[(parent, s)] = lambda m: m
        todo.append(parent)
    return le, gap


def _chain(le, gap, y, z):
    """A chain y <= ... <= z with at least one GAP step: list of edges, or None."""
    nxt: Dict = {}
    for (a, b) in le:
        nxt.setdefault(a, []).append(b)
    stack = [(y, False, [])]
    visited = set()
    while stack:
        u, used, path = stack.pop()
        if u == z and used:
            return path
        if (u, used) in visited:
            continue
        visited.add((u, used))
        for v in nxt.get(u, ()):
            stack.append((v, used or (u, v) in gap, path + [(u, v)]))
    return None


def _fact_growth(dy, dz, y, z, x, rho):
    # drop finite prefixes: facts are about eventual behaviour
    ys = _strip(y)
    zs = _strip(z)
    le, gap = _facts([ys, zs, y, z], x)
    base = max(dy.start, dz.start, y.prefix_end, z.prefix_end)
    path = _chain(le, gap, ys, zs)
    if path is not None:
        steps = [gap.get(e) for e in path]
        return ("closer", lambda m: max([base] + [f(m) for f in steps if f is not None]),
                f"construction chain of {len(path)} step(s)")
    if _chain(le, gap, zs, ys) is not None:
        return ("not", "reverse construction chain")
    return None


def _strip(s: HypernodeSpec) -> HypernodeSpec:
    if not s.prefix:
        return s
    return HypernodeSpec(s.family, s.index, (), s.label, s.origin)


def _growth(g, x, y, z, rho, window):
    if _strip(y) == _strip(z):
        return ("not", "same representative")
    dy = hyperdist(g, x, y, window)
    dz = hyperdist(g, x, z, window)
    if not (dy.symbolic and dz.symbolic):
        return None, dy, dz
    out = _poly_growth(dy, dz, rho)
    if out is None:
        out = _fact_growth(dy, dz, y, z, x, rho)
    return out, dy, dz


def closer(g: WGraph, a, b, rho: int, x: HypernodeSpec, m_max: int = 3, window: int = 16,
           alt_check: bool = True) -> ClosenessVerdict:
    """Is the galaxy of ``a`` closer to the principal galaxy than that of ``b``?"""
    if rho == ARROW:
        raise RankError("closeness is not defined at the arrow rank")
    if not x.is_constant():
        raise ValueError(f"{x} is not a standard hypernode")
    y, z = _rep(a), _rep(b)
    res = _growth(g, x, y, z, rho, window)
    if res[0] == "not":
        return ClosenessVerdict(Closeness.NOT_CLOSER, (x, y, z), (), res[1])
    out, dy, dz = res
    if out is None:
        return ClosenessVerdict(Closeness.INCONCLUSIVE, (x, y, z), (), "no growth certificate")
    if out[0] == "not":
        return ClosenessVerdict(Closeness.NOT_CLOSER, (x, y, z), (), out[1])
    _, reach, why = out
    certs = []
    for m0 in range(1, m_max + 1):
        n0 = reach(m0)
        end = n0 + window
        ok = all(_gap_value(dy, dz, rho, m0, n) for n in range(n0, end + 1))
        certs.append(certain(Verdict.IN if ok else Verdict.INCONCLUSIVE, n0, end,
                             f"d(z,x) - d(y,x) >= w^{rank_str(rho)}*{m0}"))
        if not ok:
            return ClosenessVerdict(Closeness.INCONCLUSIVE, (x, y, z), tuple(certs),
                                    f"sampled check failed for m0={m0}")
    if alt_check:
        # representatives differing on a finite prefix must give the same answer
        alt_y = y.with_prefix({0: x.constant_node()})
        alt_z = z.with_prefix({0: x.constant_node()})
        alt = closer(g, alt_y, alt_z, rho, x, m_max=1, window=window, alt_check=False)
        if alt.verdict is not Closeness.CLOSER:
            return ClosenessVerdict(Closeness.INCONCLUSIVE, (x, y, z), tuple(certs),
                                    f"alternate representatives disagree: {alt.reason}")
    return ClosenessVerdict(Closeness.CLOSER, (x, y, z), tuple(certs), why)


# -- the ladder of galaxies ------------------------------------------------------------

def _monotone_start(prof: DistanceProfile) -> Optional[int]:
    out = prof.start
    for e in prof.exponents():
        s = prof.coeff(e).nondecreasing_from()
        if s is None:
            return None
        out = max(out, s)
    return out


def _acceleration(c_rho: IntPoly) -> int:
    """Least c >= 2 with c_rho(c n) >= c_rho(n) + n for every n >= 0."""
    n = IntPoly.identity()
    for c in range(2, 257):
        if (c_rho.compose(n * c) - c_rho - n).nonneg_from() == 0:
            return c
    raise ConstructionError(f"no linear acceleration found for coefficient {c_rho}")


def ladder(g: WGraph, x: HypernodeSpec, v: HypernodeSpec, rho: int, K: int, window: int = 16,
           m_max: int = 2) -> List[HypernodeSpec]:
    """``2K + 1`` specs in strictly increasing closeness order (closest first),
    with ``Gamma(v)`` (up to a shift of ``v``) in the middle."""
    if rho == ARROW:
        raise RankError("the ladder is not defined at the arrow rank")
    check_spec(g, v)
    if K == 0:
        return [v]
    if not limitedly_distant(g, v, x, rho, window).is_out:
        raise ConstructionError(f"{v} is not certified outside the principal {rank_str(rho)}-galaxy")
    dv = hyperdist(g, x, v, window)
    if not dv.symbolic:
        raise ConstructionError(f"profile of {v} has no exact fit")
    for e in dv.exponents():
        if e > rho and dv.coeff(e).constant_value() != 0:
            raise ConstructionError(f"profile of {v} has a term above w^{rank_str(rho)}")
    if not dv.coeff(rho).is_unbounded():
        raise ConstructionError(f"w^{rank_str(rho)} coefficient of {v} is not unbounded")
    N = _monotone_start(dv)
    if N is None:
        raise ConstructionError(f"profile of {v} is not certifiably monotone")
    y = v if N == 0 else v.shifted(N, label="center")
    dy = hyperdist(g, x, y, window)
    if _monotone_start(dy) != 0:
        raise ConstructionError(f"shifted profile of {v} is not monotone from 0")

    further = []
    prev = y
    for k in range(1, K + 1):
        cp = hyperdist(g, x, prev, window).coeff(rho)
        if not isinstance(cp, IntPoly):
            raise ConstructionError(f"coefficient {cp} is not polynomial")
        c = _acceleration(cp)
        prev = prev.compose(IntPoly((0, c)), label=f"far{k}", origin=("accel", prev, c, x))
        further.append(prev)

    nearer = []
    prev = y
    for k in range(1, K + 1):
        base = hyperdist(g, x, prev, window).coeff(rho)
        try:
            steps = ThresholdSteps(base, label=f"steps{k}")
        except ValueError as exc:
            raise ConstructionError(str(exc)) from None
        prev = prev.compose(steps, label=f"near{k}", origin=("steps", prev, steps, x))
        nearer.append(prev)

    out = list(reversed(nearer)) + [y] + further
    for a, b in zip(out, out[1:]):
        cv = closer(g, a, b, rho, x, m_max=m_max, window=window)
        if cv.verdict is not Closeness.CLOSER:
            raise ConstructionError(f"construction check failed between {a} and {b}: {cv}")
    return out


@dataclass
class OrderReport:
    items: List[HypernodeSpec]
    verdicts: Dict[Tuple[int, int], ClosenessVerdict]
    reflexive_ok: bool
    antisymmetry_failures: List[Tuple[int, int]]
    transitivity_failures: List[Tuple[int, int, int]]
    inconclusive: List[Tuple[int, int]]
    hasse: List[Tuple[int, int]]  # (i, j): i is covered by j (i closer than j)

    @property
    def ok(self) -> bool:
        return self.reflexive_ok and not self.antisymmetry_failures and not self.transitivity_failures

    def less(self, i: int, j: int) -> bool:
        return self.verdicts[(i, j)].verdict is Closeness.CLOSER


def partial_order_check(g: WGraph, galaxies: Sequence, rho: int, x: HypernodeSpec,
                        window: int = 16, m_max: int = 2) -> OrderReport:
    items = [_rep(a) for a in galaxies]
    n = len(items)
    verdicts: Dict[Tuple[int, int], ClosenessVerdict] = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                verdicts[(i, j)] = closer(g, items[i], items[j], rho, x, m_max, window)
    reflexive_ok = all(closer(g, s, s, rho, x, m_max, window).verdict is Closeness.NOT_CLOSER
                       for s in items)
    lt = {k for k, v in verdicts.items() if v.verdict is Closeness.CLOSER}
    unsure = sorted(k for k, v in verdicts.items() if v.verdict is Closeness.INCONCLUSIVE)
    anti = sorted((i, j) for (i, j) in lt if i < j and (j, i) in lt)
    trans = []
    for (i, j) in sorted(lt):
        for k in range(n):
            if (j, k) in lt and i != k and verdicts[(i, k)].verdict is Closeness.NOT_CLOSER:
                trans.append((i, j, k))
    hasse = sorted((i, j) for (i, j) in lt
                   if not any((i, k) in lt and (k, j) in lt for k in range(n)))
    return OrderReport(items, verdicts, reflexive_ok, anti, trans, unsure, hasse)


# -- witnesses and propagation -------------------------------------------------------

def non_principal_witness(g: WGraph, rho: int, window: int = 16, K: int = 4):
    """(spec, principal-membership decision, walk) for a diagonal along the
    unbounded walk's verified subsequence."""
    if rho == ARROW:
        raise RankError("the witness is not defined at the arrow rank")
    try:
        bnodes = g.boundary_nodes(rho, window)
        if not bnodes:
            raise ConstructionError(f"no boundary {rank_str(rho)}-wnodes: hypotheses fail")
        uw = unbounded_walk(g, rho, bnodes[0], K, window)
    except (InconclusiveError, RankError) as exc:
        raise ConstructionError(f"hypotheses not certified: {exc}") from None
    pts = [uw.stops[0]] + [uw.stops[m] for m in uw.subsequence]
    fam = {p.family for p in pts}
    if len(fam) != 1:
        raise ConstructionError("subsequence mixes node families")
    idx = []
    for i in range(len(pts[0].idx)):
        p = fit_poly(list(range(len(pts))), [q.idx[i] for q in pts])
        if p is None:
            raise ConstructionError(f"subsequence indices {[q.idx for q in pts]} fit no polynomial")
        idx.append(p)
    spec = HypernodeSpec(pts[0].family, tuple(idx), (), "witness")
    return spec, principal_membership(g, spec, rho, window), uw


def single_propagation(g: WGraph, rho: int, probes: Sequence[HypernodeSpec], window: int,
                       sigma: Optional[int] = None) -> bool:
    """One rho-galaxy among the probes implies one sigma-galaxy for every rho < sigma <= nu."""
    first = classify(g, probes, rho, window)
    if len(first.blocks) != 1:
        raise ValueError(f"probes form {len(first.blocks)} {rank_str(rho)}-galaxies, not one")
    sigmas = [sigma] if sigma is not None else [s for s in range(rho + 1, g.nu + 1)]
    for s in sigmas:
        if not rho < s <= g.nu:
            raise RankError("need rho < sigma <= nu")
        if len(classify(g, probes, s, window).blocks) != 1:
            return False
    return True
