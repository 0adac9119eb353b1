"""Hypernodes, hyperdistance profiles and filter decisions.

A hypernode is given by a closed-form sequence ``n -> x_n`` of wnodes
(:class:`HypernodeSpec`).  Questions of the form "is {n : P(n)} in the
ultrafilter" are answered only when the index set is finite or cofinite,
because then every free ultrafilter gives the same answer; everything else is
:attr:`Verdict.INCONCLUSIVE`.

Hyperdistances are fitted exactly: each CNF coefficient of ``d(x_n, y_n)``
is interpolated by an integer polynomial and cross-checked on every sample.
When one side is constant and the other moves along a single index sequence
``p`` (possibly a fast one such as ``16n`` or a step map), the fit is done on
the *law* ``t -> d(c, y[t])`` over ``t = 0..window`` and then composed with
``p``, so fast sequences never need huge slices.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .ordinal import Ordinal, ZERO, nat_sum
from .seqs import (
    Composed,
    IndexSeq,
    IntPoly,
    PolyParseError,
    ThresholdSteps,
    fit_tail,
    parse_intpoly,
    render_poly,
)
from .wdistance import LengthModel, Scope, Unreachable, metric
from .wgraph import NodeRef, PresentationError, WGraph, parse_node_ref

__all__ = [
    "Verdict",
    "FilterDecision",
    "decide",
    "certain",
    "HypernodeSpec",
    "SpecParseError",
    "parse_spec",
    "render_seq",
    "check_spec",
    "DistanceProfile",
    "hyperdist",
    "hypernode_equal",
    "maximal_hyper",
    "triangle_hyper",
    "Hyperbranch",
    "hyperbranch_check",
]


class Verdict(enum.Enum):
    IN = "InFilter"
    OUT = "OutFilter"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class FilterDecision:
    verdict: Verdict
    start: int  # N0: the pattern holds from here on
    end: int  # last index inspected (or the sampled horizon)
    pattern: str

    @property
    def is_in(self) -> bool:
        return self.verdict is Verdict.IN

    @property
    def is_out(self) -> bool:
        return self.verdict is Verdict.OUT

    def __str__(self):
        return f"{self.verdict} (N0={self.start}, N={self.end}: {self.pattern})"


def certain(verdict: Verdict, start: int, end: int, pattern: str) -> FilterDecision:
    return FilterDecision(verdict, start, end, pattern)


def decide(pred: Callable[[int], bool], window: int, start: int = 0) -> FilterDecision:
    """Sample ``pred`` on ``start..window`` and report its eventual value.

    A verdict is given only when the final constant run of samples covers at
    least the upper half of the inspected range; a shorter run (or an
    alternating pattern) is Inconclusive.
    """
    if window < start:
        raise ValueError("empty sampling range")
    vals = [bool(pred(n)) for n in range(start, window + 1)]
    last = vals[-1]
    s = len(vals) - 1
    while s > 0 and vals[s - 1] == last:
        s -= 1
    n0 = start + s
    if s <= (len(vals) - 1) // 2 and len(vals) >= 2:
        v = Verdict.IN if last else Verdict.OUT
        return FilterDecision(v, n0, window, f"{'true' if last else 'false'} on [{n0}, {window}]")
    return FilterDecision(Verdict.INCONCLUSIVE, n0, window, "no stable tail in window")


# -- hypernode specs ------------------------------------------------------------

class SpecParseError(ValueError):
    pass


def render_seq(s: IndexSeq, var: str = "n") -> str:
    if isinstance(s, IntPoly):
        return render_poly(s, var)
    if isinstance(s, Composed):
        inner = render_seq(s.inner, var)
        if isinstance(s.outer, IntPoly):
            if s.outer == IntPoly.identity():
                return inner
            return render_poly(s.outer, f"({inner})")
        return render_seq(s.outer, inner)
    if isinstance(s, ThresholdSteps):
        return f"{s.label}({var})"
    return f"{s!r}({var})"


@dataclass(frozen=True)
class HypernodeSpec:
    """``x_n = family[index_0(n), ...]``, overridden at finitely many ``n`` by ``prefix``."""

    family: str
    index: Tuple[IndexSeq, ...]
    prefix: Tuple[Tuple[int, NodeRef], ...] = ()
    label: str = field(default="", compare=False)
    # how the ladder construction produced this spec; read by the closeness layer
    origin: Optional[tuple] = field(default=None, compare=False, repr=False)

    @classmethod
    def constant(cls, ref: NodeRef, label: str = "") -> "HypernodeSpec":
        return cls(ref.family, tuple(IntPoly.const(i) for i in ref.idx), (), label)

    def at(self, n: int) -> NodeRef:
        for k, ref in self.prefix:
            if k == n:
                return ref
        return NodeRef(self.family, tuple(s(n) for s in self.index))

    @property
    def prefix_end(self) -> int:
        return max((k + 1 for k, _ in self.prefix), default=0)

    def is_constant(self) -> bool:
        return not self.prefix and all(s.constant_value() is not None for s in self.index)

    def constant_node(self) -> NodeRef:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant spec")
        return NodeRef(self.family, tuple(s.constant_value() for s in self.index))

    def is_poly(self) -> bool:
        return all(isinstance(s, IntPoly) for s in self.index)

    def compose(self, seq: IndexSeq, label: str = "", origin=None) -> "HypernodeSpec":
        """``n -> x_{seq(n)}``."""
        idx = []
        for s in self.index:
            if s.constant_value() is not None:
                idx.append(s)
            elif isinstance(s, IntPoly) and isinstance(seq, IntPoly):
                idx.append(s.compose(seq))
            else:
                idx.append(Composed(s, seq))
        # keep one shared object for coordinates that moved together
        shared: Dict[int, IndexSeq] = {}
        out = []
        for s, new in zip(self.index, idx):
            key = id(s)
            if key in shared:
                out.append(shared[key])
            else:
                shared[key] = new
                out.append(new)
        return HypernodeSpec(self.family, tuple(out), (), label, origin)

    def shifted(self, k: int, label: str = "") -> "HypernodeSpec":
        return self.compose(IntPoly((k, 1)), label or self.label)

    def with_prefix(self, items: Dict[int, NodeRef]) -> "HypernodeSpec":
        return replace(self, prefix=tuple(sorted(items.items())))

    def text(self) -> str:
        if self.is_constant():
            return f"const({self.constant_node()})"
        body = f"{self.family}[{','.join(render_seq(s) for s in self.index)}]"
        if self.prefix:
            body += "{" + ",".join(f"{k}:{r}" for k, r in self.prefix) + "}"
        return body

    def __str__(self):
        return self.text()


_WRAP = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\s*$", re.S)
_NODE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\[(.*)\]\s*$", re.S)


def parse_spec(text: str) -> HypernodeSpec:
    """``const(FAM[i,...])`` | ``FAM[p(n),...]``; any other ``name(...)``
    wrapper is kept as a label, e.g. ``diag(b1[n])``."""
    src = text.strip()
    label = ""
    m = _WRAP.match(src)
    if m and not _NODE.match(src):
        label, src = m.group(1), m.group(2)
        if label == "const":
            try:
                ref = parse_node_ref(src)
            except ValueError as exc:
                raise SpecParseError(f"{text!r}: {exc}") from None
            return HypernodeSpec.constant(ref, "const")
    m = _NODE.match(src)
    if not m:
        raise SpecParseError(f"cannot parse hypernode spec {text!r} (column 1): expected FAMILY[...]")
    fam, body = m.group(1), m.group(2)
    parts = [p for p in body.split(",")] if body.strip() else []
    idx = []
    col = text.find("[") + 2
    for part in parts:
        try:
            p = parse_intpoly(part, "n")
        except PolyParseError as exc:
            raise SpecParseError(f"{text!r} (column {col}): {exc}") from None
        for k in range(max(p.degree, 0) + 1):
            if p.value(k).denominator != 1:
                raise SpecParseError(f"{text!r} (column {col}): index {part.strip()!r} is not integer-valued")
        if p.nonneg_from() != 0:
            raise SpecParseError(f"{text!r} (column {col}): index {part.strip()!r} is negative for some n >= 0")
        idx.append(p)
        col += len(part) + 1
    return HypernodeSpec(fam, tuple(idx), (), label)


def check_spec(g: WGraph, x: HypernodeSpec) -> HypernodeSpec:
    fam = g.p.node_family(x.family)
    if len(fam.params) != len(x.index):
        raise PresentationError(f"{x}: family {fam.id!r} takes {len(fam.params)} indices")
    return x


def spec_rank(g: WGraph, x: HypernodeSpec) -> int:
    return g.p.node_family(x.family).rank


# -- profiles ---------------------------------------------------------------------

@dataclass
class DistanceProfile:
    samples: Tuple[Tuple[int, Ordinal], ...]
    certified: bool
    coeffs: Optional[Dict[int, IndexSeq]]  # exponent -> coefficient sequence
    start: int  # the symbolic form is valid for n >= start
    window: int
    method: str

    @property
    def symbolic(self) -> bool:
        return self.coeffs is not None

    def coeff(self, e: int) -> IndexSeq:
        if self.coeffs is None:
            raise ValueError("profile has no symbolic form")
        return self.coeffs.get(e, IntPoly.const(0))

    def exponents(self) -> List[int]:
        return sorted(self.coeffs or (), reverse=True)

    def value(self, n: int) -> Ordinal:
        if n < self.start or self.coeffs is None:
            for k, v in self.samples:
                if k == n:
                    return v
            raise ValueError(f"profile has no value at n={n}")
        return Ordinal([(e, c(n)) for e, c in self.coeffs.items()])

    def describe(self) -> str:
        if self.coeffs is None:
            return "unfitted"
        parts = []
        for e in self.exponents():
            c = render_seq(self.coeffs[e])
            if c == "0":
                continue
            if not (c.isdigit() or c == "n"):
                c = f"({c})"
            if e == 0:
                parts.append(c)
            else:
                base = "w" if e == 1 else f"w^{'w' if e > 2 ** 61 else e}"
                parts.append(f"{base}*{c}")
        return " + ".join(parts) or "0"


def _fit_columns(ns: Sequence[int], vals: Sequence[Ordinal]):
    exps = sorted({e for v in vals for e, _ in v.terms}, reverse=True)
    coeffs: Dict[int, IntPoly] = {}
    start = ns[0] if ns else 0
    for e in exps:
        p, s = fit_tail(list(ns), [v.coeff(e) for v in vals])
        if p is None:
            return None, 0
        nn = p.nonneg_from()
        if nn is None:
            return None, 0
        coeffs[e] = p
        start = max(start, s, nn)
    return coeffs, start


def _law_parts(x: HypernodeSpec, y: HypernodeSpec):
    """(constant node, moving spec, shared index sequence) or None."""
    for a, b in ((x, y), (y, x)):
        if a.is_constant() and not b.is_constant():
            seqs = [s for s in b.index if s.constant_value() is None]
            p = seqs[0]
            if all(s is p or (isinstance(s, IntPoly) and s == p) for s in seqs):
                return a.constant_node(), b, p
    return None


def _distance_pair(g, a: NodeRef, b: NodeRef, G: int, scope, model):
    d0 = metric(g, G, scope, model)
    d1 = metric(g, G + 1, scope, model)
    v0 = d0.distance(a, b) if a in d0 and b in d0 else None
    v1 = d1.distance(a, b) if a in d1 and b in d1 else None
    if v0 is None and v1 is None:
        raise Unreachable(f"no walk joins {a} and {b} within window {G + 1}")
    return (v0 if v0 is not None else v1), (v0 == v1)


def _node_window(refs: Iterable[NodeRef]) -> int:
    return max((max(r.idx, default=0) for r in refs), default=0) + 1


def hyperdist(g: WGraph, x: HypernodeSpec, y: HypernodeSpec, window: int,
              scope: Optional[Scope] = None, model: LengthModel = LengthModel.INCLUSIVE) -> DistanceProfile:
    """Per-``n`` wdistances ``d(x_n, y_n)`` for ``n = 0..window`` with an exact fit."""
    check_spec(g, x)
    check_spec(g, y)
    key = ("profile", x, y, window, scope, model)
    hit = g.cache.get(key)
    if hit is not None:
        return hit
    prof = None
    parts = _law_parts(x, y)
    if parts is not None:
        prof = _law_profile(g, *parts, window, scope, model)
    if prof is None:
        prof = _sampled_profile(g, x, y, window, scope, model)
    g.cache[key] = prof
    g.cache[("profile", y, x, window, scope, model)] = prof
    return prof


def _law_profile(g, c: NodeRef, b: HypernodeSpec, p: IndexSeq, window, scope, model):
    def node_at(t):
        return NodeRef(b.family, tuple(s.constant_value() if s.constant_value() is not None else t
                                       for s in b.index))

    ts = list(range(window + 1))
    refs = [node_at(t) for t in ts]
    G = max(window, _node_window([c]) - 1) + 1
    table = []
    certified = True
    for r in refs:
        v, ok = _distance_pair(g, c, r, G, scope, model)
        table.append(v)
        certified &= ok
    law, law_start = _fit_columns(ts, table)
    if law is None:
        return None
    if isinstance(p, IntPoly):
        q = p - law_start
        start = q.nonneg_from()
        if start is None:
            return None
        coeffs = {e: L.compose(p) for e, L in law.items()}
    else:
        if p.nondecreasing_from() is None or not p.is_unbounded():
            return None
        start = p.reach(law_start)
        coeffs = {e: Composed(L, p) for e, L in law.items()}
    start = max(start, b.prefix_end)
    samples = []
    for n in range(window + 1):
        ref = b.at(n)
        t = None if any(k == n for k, _ in b.prefix) else p(n)
        if t is not None and t <= window:
            samples.append((n, table[t]))
        elif n >= start:
            samples.append((n, Ordinal([(e, s(n)) for e, s in coeffs.items()])))
        else:
            v, ok = _distance_pair(g, c, ref, max(G, _node_window([ref])), scope, model)
            certified &= ok
            samples.append((n, v))
    return DistanceProfile(tuple(samples), certified, coeffs, start, window, "law")


def _sampled_profile(g, x, y, window, scope, model):
    ns = list(range(window + 1))
    pairs = [(x.at(n), y.at(n)) for n in ns]
    G = _node_window([r for pr in pairs for r in pr])
    vals = []
    certified = True
    for a, b in pairs:
        v, ok = _distance_pair(g, a, b, G, scope, model)
        vals.append(v)
        certified &= ok
    coeffs, start = _fit_columns(ns, vals)
    start = max(start, x.prefix_end, y.prefix_end)
    return DistanceProfile(tuple(zip(ns, vals)), certified, coeffs, start, window, "sampled")


# -- pointwise predicates ---------------------------------------------------------

def hypernode_equal(x: HypernodeSpec, y: HypernodeSpec, window: int) -> FilterDecision:
    if x.family != y.family:
        return certain(Verdict.OUT, 0, window, "different node families")
    if x.is_poly() and y.is_poly():
        start = max(x.prefix_end, y.prefix_end)
        if all(a == b for a, b in zip(x.index, y.index)):
            return certain(Verdict.IN, start, window, "identical index polynomials")
        # some coordinate differs by a nonzero polynomial: finitely many agreements
        bound = max((a - b).root_bound() for a, b in zip(x.index, y.index) if a != b)
        return certain(Verdict.OUT, max(start, bound), window, "index polynomials differ")
    return decide(lambda n: x.at(n) == y.at(n), window)


def maximal_hyper(g: WGraph, x: HypernodeSpec, window: int) -> FilterDecision:
    check_spec(g, x)
    embraced = any(e.kind == "node" and e.target.family == x.family
                   for f in g.p.nodes for e in f.embraces)
    if not embraced:
        return certain(Verdict.IN, x.prefix_end, window, f"family {x.family} is never embraced")
    if x.is_constant():
        ok = g.maximal_node(x.constant_node())
        return certain(Verdict.IN if ok else Verdict.OUT, 0, window, "constant wnode")
    return decide(lambda n: g.maximal_node(x.at(n)), window)


def triangle_hyper(g: WGraph, x: HypernodeSpec, y: HypernodeSpec, z: HypernodeSpec, window: int,
                   scope: Optional[Scope] = None) -> FilterDecision:
    dxz = hyperdist(g, x, z, window, scope)
    dxy = hyperdist(g, x, y, window, scope)
    dyz = hyperdist(g, y, z, window, scope)
    a, b, c = dict(dxz.samples), dict(dxy.samples), dict(dyz.samples)
    return decide(lambda n: a[n] <= nat_sum(b[n], c[n]), window)


@dataclass(frozen=True)
class Hyperbranch:
    """Two 0-hypernodes joined by a branch at (almost) every ``n``."""

    a: HypernodeSpec
    b: HypernodeSpec


def hyperbranch_check(g: WGraph, hb: Hyperbranch, window: int) -> FilterDecision:
    for s in (hb.a, hb.b):
        if spec_rank(g, s) != 0:
            raise ValueError(f"{s} is not a 0-hypernode")
    prof = hyperdist(g, hb.a, hb.b, window)
    vals = dict(prof.samples)
    return decide(lambda n: vals[n] == 1, window)
