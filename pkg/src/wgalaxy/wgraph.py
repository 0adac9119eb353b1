"""Finitely presented transfinite wgraphs and their finite windows.

A presentation lists parametric *families*: node families (each with a rank
and the tips / lower-rank nodes its instances embrace), branch families
(pairs of 0-nodes) and tip families (a one-ended walk, given by the node it
starts from -- its *anchor* -- and optionally the nodes it passes through).
Every index is an integer polynomial in the family parameters, and a window
``W`` materialises exactly the instances whose indices all lie in ``0..W``.

Ranks are ints: naturals for finite ranks, then :data:`ARROW` for the arrow
rank and :data:`OMEGA` for w.  ``BRANCH_RANK`` (-1) is the rank of the
extremity of a single branch.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .ordinal import MAX_FINITE_EXP, OMEGA, Ordinal, omega_pow_scaled
from .seqs import PolyParseError, parse_poly

__all__ = [
    "ARROW",
    "OMEGA",
    "BRANCH_RANK",
    "INCONCLUSIVE",
    "RankError",
    "PresentationError",
    "NodeRef",
    "Presentation",
    "WGraph",
    "Section",
    "FiniteGraphSlice",
    "pred",
    "rank_str",
    "parse_rank",
    "tip_weight",
    "parse_node_ref",
]


class _ArrowRank(int):
    def __new__(cls):
        return super().__new__(cls, MAX_FINITE_EXP)

    def __repr__(self):
        return "ARROW"

    __str__ = __repr__

    def __reduce__(self):
        return (_arrow, ())


def _arrow():
    return ARROW


ARROW = _ArrowRank()
BRANCH_RANK = -1


class _Inconclusive:
    """Third truth value: the window cannot settle the question."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __bool__(self):
        raise TypeError("INCONCLUSIVE has no truth value; compare with `is`")

    def __repr__(self):
        return "INCONCLUSIVE"


INCONCLUSIVE = _Inconclusive()


class RankError(ValueError):
    pass


class PresentationError(ValueError):
    pass


def rank_str(r: int) -> str:
    if r == OMEGA:
        return "w"
    if r == ARROW:
        return "~w"
    return str(int(r))


def parse_rank(text: Union[str, int]) -> int:
    if isinstance(text, int) and not isinstance(text, bool):
        if text < 0:
            raise RankError(f"rank must be >= 0, got {text}")
        return text
    t = str(text).strip().lower()
    if t in ("w", "omega"):
        return OMEGA
    if t in ("~w", "->w", "arrow", "arrowomega", "aw"):
        return ARROW
    if t.isdigit():
        return int(t)
    raise RankError(f"bad rank {text!r}")


def is_finite_rank(r: int) -> bool:
    return 0 <= r < ARROW


def pred(r: int) -> int:
    """Rank predecessor: pred(w) is the arrow rank, pred(0) the branch rank."""
    if r == OMEGA:
        return ARROW
    if r == ARROW:
        raise RankError("the arrow rank has no predecessor")
    if r < 0:
        raise RankError("the branch rank has no predecessor")
    return r - 1


def tip_weight(alpha: int) -> Ordinal:
    """Length contributed by traversing an alpha-tip: w^(alpha+1)."""
    if alpha == BRANCH_RANK:
        return omega_pow_scaled(0, 1)
    if alpha == ARROW:
        return omega_pow_scaled(OMEGA, 1)
    if alpha == OMEGA:
        raise RankError("tips of rank w are out of scope")
    return omega_pow_scaled(alpha + 1, 1)


def connects(node_rank: int, rho: int) -> bool:
    """Whether a wnode of ``node_rank`` may be passed by a walk of rank <= rho."""
    if rho == ARROW:
        return node_rank < ARROW
    return node_rank <= rho


class NodeRef(NamedTuple):
    family: str
    idx: Tuple[int, ...]

    def __str__(self):
        return f"{self.family}[{','.join(map(str, self.idx))}]"


def parse_node_ref(text: str) -> NodeRef:
    t = text.strip()
    if "[" not in t or not t.endswith("]"):
        raise ValueError(f"bad node reference {text!r} (expected FAMILY[i,...])")
    fam, rest = t.split("[", 1)
    body = rest[:-1].strip()
    try:
        idx = tuple(int(x) for x in body.split(",")) if body else ()
    except ValueError:
        raise ValueError(f"bad node reference {text!r}: indices must be integers") from None
    return NodeRef(fam.strip(), idx)


# -- index expressions ---------------------------------------------------------

class Expr:
    """Integer polynomial in named parameters."""

    __slots__ = ("src", "names", "monos", "_const", "_affine")

    def __init__(self, src, names: Sequence[str]):
        self.src = str(src)
        self.names = tuple(names)
        try:
            monos = parse_poly(self.src, self.names)
        except PolyParseError as exc:
            raise PresentationError(str(exc)) from None
        self.monos = tuple(monos.items())
        zero = (0,) * len(self.names)
        self._const = monos.get(zero, Fraction(0))
        # fast path for the common integer-affine index rules
        self._affine = None
        if all(c.denominator == 1 and sum(m) <= 1 for m, c in self.monos):
            lin = tuple((m.index(1), int(c)) for m, c in self.monos if sum(m) == 1)
            self._affine = (int(self._const), lin)

    def __call__(self, values: Sequence[int]) -> int:
        if self._affine is not None:
            acc, lin = self._affine
            for i, c in lin:
                acc += c * values[i]
            return acc
        acc = Fraction(0)
        for m, c in self.monos:
            term = c
            for v, e in zip(values, m):
                if e:
                    term *= v ** e
            acc += term
        if acc.denominator != 1:
            raise PresentationError(f"index {self.src!r} is not integral at {tuple(values)}")
        return int(acc)

    @property
    def const_magnitude(self) -> int:
        return abs(int(self._const))

    def __repr__(self):
        return f"Expr({self.src!r})"


@dataclass(frozen=True)
class Pattern:
    family: str
    exprs: Tuple[Expr, ...]

    def at(self, values: Sequence[int]) -> NodeRef:
        return NodeRef(self.family, tuple(e(values) for e in self.exprs))


@dataclass(frozen=True)
class Embrace:
    kind: str  # "tip" or "node"
    target: Pattern


@dataclass(frozen=True)
class NodeFamily:
    id: str
    rank: int
    params: Tuple[str, ...]
    embraces: Tuple[Embrace, ...] = ()


@dataclass(frozen=True)
class BranchFamily:
    params: Tuple[str, ...]
    ends: Tuple[Pattern, Pattern]


@dataclass(frozen=True)
class TipFamily:
    id: str
    rank: int
    params: Tuple[str, ...]
    anchor: Pattern
    walk: Tuple[Pattern, ...] = ()  # patterns over params + ("t",)


@dataclass(frozen=True, eq=False)
class Presentation:
    name: str
    nu: int
    nodes: Tuple[NodeFamily, ...]
    branches: Tuple[BranchFamily, ...]
    tips: Tuple[TipFamily, ...]
    section_bound: Tuple[Tuple[int, Optional[int]], ...] = ()
    infinite_boundary: FrozenSet[int] = frozenset()
    source: dict = field(default_factory=dict, repr=False)

    def node_family(self, fid: str) -> NodeFamily:
        for f in self.nodes:
            if f.id == fid:
                return f
        raise PresentationError(f"unknown node family {fid!r}")

    def tip_family(self, tid: str) -> TipFamily:
        for t in self.tips:
            if t.id == tid:
                return t
        raise PresentationError(f"unknown tip family {tid!r}")

    def rank_of(self, ref: NodeRef) -> int:
        return self.node_family(ref.family).rank

    def declared_bound(self, rho: int):
        for r, b in self.section_bound:
            if r == rho:
                return True, b
        return False, None

    # -- (de)serialisation ---------------------------------------------------
    @classmethod
    def from_dict(cls, doc: dict) -> "Presentation":
        try:
            return _parse_presentation(doc)
        except (KeyError, TypeError) as exc:
            raise PresentationError(f"malformed presentation: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "Presentation":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PresentationError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return json.loads(json.dumps(self.source))


def _pattern(spec, names: Sequence[str], where: str) -> Pattern:
    fam, exprs = spec
    if not isinstance(fam, str) or not isinstance(exprs, list):
        raise PresentationError(f"{where}: expected [family, [index, ...]]")
    return Pattern(fam, tuple(Expr(e, names) for e in exprs))


def _parse_presentation(doc: dict) -> Presentation:
    name = str(doc.get("name", "graph"))
    nu = parse_rank(doc["nu"])
    nodes = []
    for nd in doc["nodes"]:
        params = tuple(nd.get("params", ()))
        emb = []
        for e in nd.get("embraces", ()):
            if "tip" in e:
                emb.append(Embrace("tip", Pattern(e["tip"], tuple(Expr(x, params) for x in e.get("at", ())))))
            elif "node" in e:
                emb.append(Embrace("node", Pattern(e["node"], tuple(Expr(x, params) for x in e.get("at", ())))))
            else:
                raise PresentationError(f"node family {nd['id']!r}: embrace entry needs 'tip' or 'node'")
        nodes.append(NodeFamily(nd["id"], parse_rank(nd["rank"]), params, tuple(emb)))
    branches = []
    for bd in doc.get("branches", ()):
        params = tuple(bd.get("params", ()))
        ends = bd["ends"]
        if len(ends) != 2:
            raise PresentationError("a branch has exactly two ends")
        branches.append(BranchFamily(params, (_pattern(ends[0], params, "branch"), _pattern(ends[1], params, "branch"))))
    tips = []
    for td in doc.get("tips", ()):
        params = tuple(td.get("params", ()))
        walk = tuple(_pattern(w, params + ("t",), f"tip {td['id']}") for w in td.get("walk", ()))
        tips.append(TipFamily(td["id"], parse_rank(td["rank"]), params,
                              _pattern(td["anchor"], params, f"tip {td['id']}"), walk))
    bounds = []
    for k, v in (doc.get("sectionBoundaryBound") or {}).items():
        if v in (None, "unbounded"):
            bounds.append((parse_rank(k), None))
        else:
            bounds.append((parse_rank(k), int(v)))
    inf_b = frozenset(parse_rank(r) for r in doc.get("infiniteBoundary", ()))
    pres = Presentation(name, nu, tuple(nodes), tuple(branches), tuple(tips),
                        tuple(sorted(bounds)), inf_b, source=json.loads(json.dumps(doc)))
    _validate(pres)
    return pres


def _validate(p: Presentation) -> None:
    ids = [f.id for f in p.nodes]
    if len(set(ids)) != len(ids):
        raise PresentationError("duplicate node family id")
    fams = {f.id: f for f in p.nodes}
    tips = {t.id: t for t in p.tips}
    for f in p.nodes:
        if f.rank > p.nu:
            raise PresentationError(f"node family {f.id!r} has rank above nu")
        for e in f.embraces:
            if e.kind == "tip":
                if e.target.family not in tips:
                    raise PresentationError(f"node family {f.id!r} embraces unknown tip family {e.target.family!r}")
                t = tips[e.target.family]
                if not t.rank < f.rank:
                    raise PresentationError(f"node family {f.id!r} embraces a tip of rank >= its own")
                if len(e.target.exprs) != len(t.params):
                    raise PresentationError(f"embrace of tip {t.id!r}: wrong index count")
            else:
                if e.target.family not in fams:
                    raise PresentationError(f"node family {f.id!r} embraces unknown node family {e.target.family!r}")
                g = fams[e.target.family]
                if not g.rank < f.rank:
                    raise PresentationError(f"node family {f.id!r} embraces a node of rank >= its own")
                if len(e.target.exprs) != len(g.params):
                    raise PresentationError(f"embrace of node {g.id!r}: wrong index count")
    for b in p.branches:
        for end in b.ends:
            if end.family not in fams:
                raise PresentationError(f"branch refers to unknown node family {end.family!r}")
            if fams[end.family].rank != 0:
                raise PresentationError("branches join 0-nodes only")
            if len(end.exprs) != len(fams[end.family].params):
                raise PresentationError(f"branch end {end.family!r}: wrong index count")
    for t in p.tips:
        if t.rank == OMEGA:
            raise PresentationError("tips of rank w are out of scope")
        for pat in (t.anchor,) + t.walk:
            if pat.family not in fams:
                raise PresentationError(f"tip {t.id!r} refers to unknown node family {pat.family!r}")
            if len(pat.exprs) != len(fams[pat.family].params):
                raise PresentationError(f"tip {t.id!r}: wrong index count for {pat.family!r}")


# -- windows ---------------------------------------------------------------------

class TipRef(NamedTuple):
    family: str
    idx: Tuple[int, ...]

    def __str__(self):
        return f"{self.family}<{','.join(map(str, self.idx))}>"


@dataclass
class TipInstance:
    ref: TipRef
    rank: int
    anchor: NodeRef
    walk: Tuple[NodeRef, ...]


@dataclass
class FiniteGraphSlice:
    window: int
    nodes: Dict[NodeRef, int]
    branches: List[Tuple[NodeRef, NodeRef]]
    tips: Dict[TipRef, TipInstance]
    embraced_tips: Dict[NodeRef, Tuple[TipRef, ...]]
    embraced_nodes: Dict[NodeRef, Tuple[NodeRef, ...]]
    embracer: Dict[object, NodeRef]

    def rank(self, x: NodeRef) -> int:
        return self.nodes[x]

    def maximal(self, x: NodeRef) -> NodeRef:
        """The maximal wnode embracing ``x`` (``x`` itself if maximal)."""
        while x in self.embracer:
            x = self.embracer[x]
        return x


@dataclass(frozen=True)
class Section:
    rank: int
    nodes: FrozenSet[NodeRef]
    branches: FrozenSet[Tuple[NodeRef, NodeRef]]
    window: int

    @property
    def key(self) -> NodeRef:
        return min(self.nodes)

    def __str__(self):
        return f"S{rank_str(self.rank)}({self.key}, {len(self.branches)} branches)"


def _in_window(ref, w: int) -> bool:
    return all(0 <= i <= w for i in ref.idx)


class _UF:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


class WGraph:
    """A presentation plus caches for its windows and derived structures."""

    def __init__(self, presentation: Presentation):
        self.p = presentation
        self._slices: Dict[int, FiniteGraphSlice] = {}
        self._sections: Dict[Tuple[int, int], List[Section]] = {}
        self.cache: Dict = {}  # used by the distance layer

    @property
    def name(self) -> str:
        return self.p.name

    @property
    def nu(self) -> int:
        return self.p.nu

    def rank_of(self, x: NodeRef) -> int:
        return self.p.rank_of(x)

    def check_ref(self, x: NodeRef) -> NodeRef:
        fam = self.p.node_family(x.family)
        if len(x.idx) != len(fam.params):
            raise PresentationError(f"{x}: family {fam.id!r} takes {len(fam.params)} indices")
        return x

    # -- expansion ---------------------------------------------------------
    def expand(self, window: int) -> FiniteGraphSlice:
        if window < 1:
            raise ValueError("window must be >= 1")
        s = self._slices.get(window)
        if s is None:
            s = self._slices[window] = self._expand(window)
        return s

    def _expand(self, w: int) -> FiniteGraphSlice:
        p = self.p
        rng = range(w + 1)
        nodes: Dict[NodeRef, int] = {}
        for f in p.nodes:
            for vals in product(rng, repeat=len(f.params)):
                nodes[NodeRef(f.id, tuple(vals))] = f.rank
        branches = set()
        for b in p.branches:
            for vals in product(rng, repeat=len(b.params)):
                a, c = b.ends[0].at(vals), b.ends[1].at(vals)
                if a in nodes and c in nodes and a != c:
                    branches.add((a, c) if a < c else (c, a))
        tips: Dict[TipRef, TipInstance] = {}
        for t in p.tips:
            for vals in product(rng, repeat=len(t.params)):
                anchor = t.anchor.at(vals)
                if anchor not in nodes:
                    continue
                walk = []
                for pat in t.walk:
                    for tv in rng:
                        x = pat.at(vals + (tv,))
                        if x in nodes:
                            walk.append(x)
                ref = TipRef(t.id, tuple(vals))
                tips[ref] = TipInstance(ref, t.rank, anchor, tuple(sorted(set(walk))))
        emb_t: Dict[NodeRef, Tuple[TipRef, ...]] = {}
        emb_n: Dict[NodeRef, Tuple[NodeRef, ...]] = {}
        embracer: Dict[object, NodeRef] = {}
        for f in p.nodes:
            if not f.embraces:
                continue
            for vals in product(rng, repeat=len(f.params)):
                x = NodeRef(f.id, tuple(vals))
                ts, ns = [], []
                for e in f.embraces:
                    tgt = e.target.at(vals)
                    if e.kind == "tip":
                        tref = TipRef(tgt.family, tgt.idx)
                        if tref in tips:
                            ts.append(tref)
                    elif tgt in nodes:
                        ns.append(tgt)
                for obj in ts + ns:
                    prev = embracer.get(obj)
                    if prev is not None and prev != x:
                        raise PresentationError(f"{obj} is embraced by both {prev} and {x}")
                    embracer[obj] = x
                if ts:
                    emb_t[x] = tuple(ts)
                if ns:
                    emb_n[x] = tuple(ns)
        return FiniteGraphSlice(w, nodes, sorted(branches), tips, emb_t, emb_n, embracer)

    # -- sections ----------------------------------------------------------
    def sections(self, rho: int, window: int) -> List[Section]:
        if rho > self.nu:
            raise RankError(f"rank {rank_str(rho)} exceeds nu = {rank_str(self.nu)}")
        key = (rho, window)
        if key not in self._sections:
            self._sections[key] = self._compute_sections(rho, window)
        return self._sections[key]

    def _compute_sections(self, rho: int, window: int) -> List[Section]:
        s = self.expand(window)
        uf = _UF()
        for a, b in s.branches:
            uf.union(a, b)
        for x, ts in s.embraced_tips.items():
            if connects(s.nodes[x], rho):
                for t in ts:
                    uf.union(x, s.tips[t].anchor)
        for x, ns in s.embraced_nodes.items():
            if connects(s.nodes[x], rho):
                for y in ns:
                    uf.union(x, y)
        groups: Dict[NodeRef, List] = {}
        for a, b in s.branches:
            groups.setdefault(uf.find(a), []).append((a, b))
        members: Dict[NodeRef, set] = {}
        for x, r in s.nodes.items():
            if connects(r, rho) and x in uf.parent:
                root = uf.find(x)
                if root in groups:
                    members.setdefault(root, set()).add(x)
        out = [Section(rho, frozenset(members[root]), frozenset(bs), window)
               for root, bs in groups.items()]
        out.sort(key=lambda sec: sec.key)
        return out

    def section_of(self, x: NodeRef, rho: int, window: int) -> Optional[Section]:
        for sec in self.sections(rho, window):
            if x in sec.nodes:
                return sec
        return None

    def same_section(self, sec: Section, window: int) -> Optional[Section]:
        """The section of the same rank at another window that holds ``sec``'s key."""
        return self.section_of(sec.key, sec.rank, window)

    # -- incidence ---------------------------------------------------------
    def _touches(self, x: NodeRef, window: int) -> List[NodeRef]:
        s = self.expand(window)
        out = [s.tips[t].anchor for t in s.embraced_tips.get(x, ())]
        out.extend(s.embraced_nodes.get(x, ()))
        return out

    def incident(self, x: NodeRef, sec: Section) -> bool:
        r = self.rank_of(x)
        if r == 0:
            # a 0-node is the extremity of its own branches: the (-1)-tip case
            if sec.rank != 0:
                raise RankError("a 0-node is tested against 0-sections")
            return x in sec.nodes
        if sec.rank != pred(r):
            raise RankError(f"incidence of a {rank_str(r)}-node needs a {rank_str(pred(r))}-section, "
                            f"got rank {rank_str(sec.rank)}")
        return any(y in sec.nodes for y in self._touches(x, sec.window))

    def incident_sections(self, x: NodeRef, window: int) -> List[Section]:
        r = self.rank_of(x)
        lower = 0 if r == 0 else pred(r)
        touch = [x] if r == 0 else self._touches(x, window)
        out = []
        for sec in self.sections(lower, window):
            if any(y in sec.nodes for y in touch):
                out.append(sec)
        return out

    def boundary_nodes(self, rho: int, window: int) -> List[NodeRef]:
        if rho == ARROW:
            raise RankError("boundary nodes are not defined at the arrow rank")
        if rho < 1:
            raise RankError("boundary nodes need rank >= 1")
        s = self.expand(window)
        where: Dict[NodeRef, int] = {}
        for i, sec in enumerate(self.sections(pred(rho), window)):
            for y in sec.nodes:
                where[y] = i
        out = []
        for x, r in s.nodes.items():
            if r != rho:
                continue
            hit = {where[y] for y in self._touches(x, window) if y in where}
            if len(hit) >= 2:
                out.append(x)
        return sorted(out)

    def wadjacent(self, x: NodeRef, y: NodeRef, rho: int, window: int) -> bool:
        if self.rank_of(x) != rho or self.rank_of(y) != rho:
            raise RankError(f"wadjacency compares two {rank_str(rho)}-nodes")
        sx = {sec.key for sec in self.incident_sections(x, window)}
        if x == y:
            return True
        sy = {sec.key for sec in self.incident_sections(y, window)}
        return bool(sx & sy)

    def incident_boundary_counts(self, rho: int, window: int) -> Dict[NodeRef, int]:
        """Number of incident boundary rho-nodes per (rho-1)-section, keyed by section key."""
        counts = {sec.key: 0 for sec in self.sections(pred(rho), window)}
        for b in self.boundary_nodes(rho, window):
            for sec in self.incident_sections(b, window):
                counts[sec.key] += 1
        return counts

    def is_locally_finite(self, rho: int, window: int):
        """True / False from declared metadata; otherwise True only when the
        incident-boundary count of every section present at ``window`` is the
        same at ``window + 1`` and ``window + 2`` (sections at the window edge
        pick up their outer neighbours one step late), else :data:`INCONCLUSIVE`."""
        if rho == ARROW:
            raise RankError("local finiteness is not defined at the arrow rank")
        declared, bound = self.p.declared_bound(rho)
        if declared:
            return bound is not None
        if rho < 1:
            return True
        keys = self.incident_boundary_counts(rho, window)
        a = self.incident_boundary_counts(rho, window + 1)
        b = self.incident_boundary_counts(rho, window + 2)
        if all(a.get(k) == b.get(k) for k in keys):
            return True
        return INCONCLUSIVE

    def maximal_node(self, x: NodeRef) -> bool:
        self.check_ref(x)
        margin = 2 + max((e.const_magnitude for f in self.p.nodes for emb in f.embraces
                          for e in emb.target.exprs), default=0)
        w = max(max(x.idx, default=0), 0) + margin
        return x not in self.expand(w).embracer

    def maximal_of(self, x: NodeRef, window: int) -> NodeRef:
        return self.expand(window).maximal(x)
