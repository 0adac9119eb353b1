"""Ordinal walk lengths and shortest-walk wdistances.

Length model: a walk's length is the natural sum of its segments, a branch
counting 1 and a traversal of an alpha-tip counting w^(alpha+1) (an arrow-rank
tip counts w^w).  Searching runs on a *quotient slice*: every wnode is merged
into the maximal wnode embracing it, branches become unit edges and each
embraced tip becomes one weighted edge between its embracing wnode and the
start of its representative walk.

Two tip-attachment variants exist (:class:`LengthModel`).  ``INCLUSIVE`` (the
default) attaches a tip only at its anchor, so reaching the tip from deeper
inside its walk pays the finite approach as well.  ``EXCLUSIVE`` attaches it
at every listed node of the representative walk.
"""
from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .ordinal import ZERO, Ordinal, _sum_terms, nat_sum, omega_pow_scaled
from .wgraph import (
    ARROW,
    BRANCH_RANK,
    INCONCLUSIVE,
    NodeRef,
    RankError,
    Section,
    TipRef,
    WGraph,
    connects,
    pred,
    rank_str,
    tip_weight,
)

__all__ = [
    "LengthModel",
    "Scope",
    "Segment",
    "WalkSpec",
    "DistanceResult",
    "Unreachable",
    "IncidenceError",
    "InconclusiveError",
    "MetricGraph",
    "metric",
    "walk_length",
    "wdist",
    "shortest_walk",
    "reach_walk",
    "boundary_crossing_bound",
    "unbounded_walk",
]


class LengthModel(enum.Enum):
    INCLUSIVE = "inclusive"
    EXCLUSIVE = "exclusive"


class Unreachable(LookupError):
    pass


class IncidenceError(ValueError):
    pass


class InconclusiveError(RuntimeError):
    """The window or the presentation metadata cannot certify an answer."""


class Scope(NamedTuple):
    """Restrict distances to the rank-``rank`` section holding ``anchor``
    (``anchor=None``: the whole rank-``rank`` subgraph)."""

    rank: int
    anchor: Optional[NodeRef] = None


class Segment(NamedTuple):
    kind: str  # "branch" or "tip"
    rank: int  # BRANCH_RANK for a branch, alpha for an alpha-tip
    ref: object

    @property
    def weight(self) -> Ordinal:
        return tip_weight(self.rank)

    def __str__(self):
        if self.kind == "branch":
            a, b = self.ref
            return f"branch({a},{b})"
        return f"tip{rank_str(self.rank)}({self.ref})"


@dataclass(frozen=True)
class WalkSpec:
    nodes: Tuple[NodeRef, ...]
    segments: Tuple[Segment, ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.segments) + 1:
            raise ValueError("a walk alternates wnodes and segments, starting and ending at a wnode")

    @classmethod
    def at(cls, x: NodeRef) -> "WalkSpec":
        return cls((x,), ())

    @property
    def start(self) -> NodeRef:
        return self.nodes[0]

    @property
    def end(self) -> NodeRef:
        return self.nodes[-1]

    def reversed(self) -> "WalkSpec":
        return WalkSpec(tuple(reversed(self.nodes)), tuple(reversed(self.segments)))

    def then(self, other: "WalkSpec") -> "WalkSpec":
        if other.start != self.end:
            raise ValueError(f"cannot join walk ending at {self.end} to one starting at {other.start}")
        return WalkSpec(self.nodes + other.nodes[1:], self.segments + other.segments)

    def __len__(self):
        return len(self.segments)

    def __str__(self):
        out = [str(self.nodes[0])]
        for seg, x in zip(self.segments, self.nodes[1:]):
            out.append(f" -{seg}-> {x}")
        return "".join(out)


def walk_length(w: WalkSpec) -> Ordinal:
    total = ZERO
    for seg in w.segments:
        total = nat_sum(total, seg.weight)
    return total


@dataclass(frozen=True)
class DistanceResult:
    value: Ordinal
    stability_window: int
    certified: bool

    def __str__(self):
        flag = "certified" if self.certified else "uncertified"
        return f"{self.value} ({flag}, window={self.stability_window})"


# -- quotient slice ------------------------------------------------------------

class MetricGraph:
    """Weighted quotient slice of one window, optionally restricted to a section."""

    def __init__(self, g: WGraph, window: int, scope: Scope, model: LengthModel):
        self.g = g
        self.window = window
        self.scope = scope
        self.model = model
        s = g.expand(window)
        cap = scope.rank
        rep: Dict[NodeRef, NodeRef] = {}

        def find(x):
            r = rep.get(x)
            if r is not None:
                return r
            y = x
            while True:
                up = s.embracer.get(y)
                if up is None or not connects(s.nodes[up], cap):
                    break
                y = up
            rep[x] = y
            return y

        self.rep = find
        adj: Dict[NodeRef, List[Tuple[NodeRef, tuple, Segment]]] = {}
        for x, r in s.nodes.items():
            if connects(r, cap):
                adj.setdefault(find(x), [])

        def link(a, b, seg):
            ra, rb = find(a), find(b)
            if ra == rb:
                return
            w = seg.weight.terms
            adj[ra].append((rb, w, seg))
            adj[rb].append((ra, w, seg))

        for a, b in s.branches:
            link(a, b, Segment("branch", BRANCH_RANK, (a, b)))
        for y, tips in s.embraced_tips.items():
            if not connects(s.nodes[y], cap):
                continue
            for t in tips:
                inst = s.tips[t]
                seg = Segment("tip", inst.rank, t)
                targets = [inst.anchor]
                if model is LengthModel.EXCLUSIVE:
                    targets += [z for z in inst.walk if z != inst.anchor]
                for z in targets:
                    if connects(s.nodes[z], cap):
                        link(y, z, seg)
        for k in adj:
            adj[k].sort(key=lambda e: (e[0], e[1]))
        if scope.anchor is not None:
            if scope.anchor not in s.nodes:
                raise Unreachable(f"scope anchor {scope.anchor} is outside window {window}")
            start = find(scope.anchor)
            keep = {start}
            stack = [start]
            while stack:
                u = stack.pop()
                for v, _, _ in adj.get(u, ()):
                    if v not in keep:
                        keep.add(v)
                        stack.append(v)
            adj = {k: v for k, v in adj.items() if k in keep}
        self.adj = adj
        self._sssp: Dict[NodeRef, Tuple[dict, dict]] = {}
        self._pair: Dict[Tuple[NodeRef, NodeRef], Optional[tuple]] = {}

    def __contains__(self, x: NodeRef) -> bool:
        return x in self.g.expand(self.window).nodes and self.rep(x) in self.adj

    def sssp(self, source: NodeRef):
        """Least-first search from ``source``; returns (dist terms, predecessor)."""
        src = self.rep(source)
        hit = self._sssp.get(src)
        if hit is not None:
            return hit
        if src not in self.adj:
            raise Unreachable(f"{source} is not in this slice")
        dist = {src: ()}
        prev: Dict[NodeRef, Tuple[NodeRef, Segment]] = {}
        done = set()
        heap = [((), src)]
        adj = self.adj
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, w, seg in adj[u]:
                if v in done:
                    continue
                nd = _sum_terms(d, w)
                old = dist.get(v)
                if old is None or nd < old:
                    dist[v] = nd
                    prev[v] = (u, seg)
                    heapq.heappush(heap, (nd, v))
                elif nd == old and u < prev[v][0]:
                    prev[v] = (u, seg)
        self._sssp[src] = (dist, prev)
        return dist, prev

    def distance(self, x: NodeRef, y: NodeRef) -> Optional[Ordinal]:
        src, dst = self.rep(x), self.rep(y)
        hit = self._sssp.get(src) or self._sssp.get(dst)
        if hit is not None:
            t = hit[0].get(dst if src in self._sssp else src)
            return None if t is None else Ordinal._raw(t)
        key = (src, dst) if src <= dst else (dst, src)
        if key not in self._pair:
            self._pair[key] = self._targeted(*key)
        t = self._pair[key]
        return None if t is None else Ordinal._raw(t)

    def distances_from(self, x: NodeRef) -> Dict[NodeRef, Ordinal]:
        """Distances from ``x`` to every merged wnode it reaches (full search, cached)."""
        dist, _ = self.sssp(x)
        return {k: Ordinal._raw(v) for k, v in dist.items()}

    def _targeted(self, src: NodeRef, dst: NodeRef):
        """Least-first search from ``src`` that stops once ``dst`` is settled."""
        if src not in self.adj:
            raise Unreachable(f"{src} is not in this slice")
        dist = {src: ()}
        done = set()
        heap = [((), src)]
        adj = self.adj
        while heap:
            d, u = heapq.heappop(heap)
            if u == dst:
                return d
            if u in done:
                continue
            done.add(u)
            for v, w, _ in adj[u]:
                if v in done:
                    continue
                nd = _sum_terms(d, w)
                old = dist.get(v)
                if old is None or nd < old:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        return None

    def walk(self, x: NodeRef, y: NodeRef) -> Optional[WalkSpec]:
        dist, prev = self.sssp(x)
        src, dst = self.rep(x), self.rep(y)
        if dst not in dist:
            return None
        nodes = [dst]
        segs = []
        while nodes[-1] != src:
            u, seg = prev[nodes[-1]]
            segs.append(seg)
            nodes.append(u)
        return WalkSpec(tuple(reversed(nodes)), tuple(reversed(segs)))


def metric(g: WGraph, window: int, scope: Optional[Scope] = None,
           model: LengthModel = LengthModel.INCLUSIVE) -> MetricGraph:
    scope = scope or Scope(g.nu)
    if scope.anchor is not None:
        # key the cache by the section, not by whichever member was passed
        s = g.expand(window)
        anchor = scope.anchor
        while anchor in s.embracer and connects(s.nodes[s.embracer[anchor]], scope.rank):
            anchor = s.embracer[anchor]
        scope = Scope(scope.rank, anchor)
    key = ("metric", window, scope, model)
    m = g.cache.get(key)
    if m is None:
        m = g.cache[key] = MetricGraph(g, window, scope, model)
    return m


def _promote(g: WGraph, x: NodeRef, window: int, scope: Optional[Scope]) -> NodeRef:
    m = metric(g, window, scope)
    return m.rep(x)


def wdist(g: WGraph, x: NodeRef, y: NodeRef, window: int, scope: Optional[Scope] = None,
          model: LengthModel = LengthModel.INCLUSIVE) -> DistanceResult:
    """Least walk length between ``x`` and ``y``, certified when windows
    ``window`` and ``window + 1`` agree."""
    g.check_ref(x)
    g.check_ref(y)
    vals = []
    for w in (window, window + 1):
        m = metric(g, w, scope, model)
        if x not in m or y not in m:
            vals.append(None)
            continue
        vals.append(m.distance(x, y))
    if vals[0] is None and vals[1] is None:
        raise Unreachable(f"no walk joins {x} and {y} within window {window + 1}")
    if vals[0] is None:
        return DistanceResult(vals[1], window + 1, False)
    return DistanceResult(vals[0], window, vals[0] == vals[1])


def shortest_walk(g: WGraph, x: NodeRef, y: NodeRef, window: int, scope: Optional[Scope] = None,
                  model: LengthModel = LengthModel.INCLUSIVE) -> WalkSpec:
    m = metric(g, window, scope, model)
    if x not in m or y not in m:
        raise Unreachable(f"{x} or {y} is outside window {window}")
    w = m.walk(x, y)
    if w is None:
        raise Unreachable(f"no walk joins {x} and {y} within window {window}")
    return w


def check_walk(g: WGraph, w: WalkSpec, window: int, cap: Optional[int] = None) -> None:
    """Raise ValueError unless consecutive elements of ``w`` are incident
    (up to identification by embracing wnodes of rank <= cap)."""
    m = metric(g, window, Scope(g.nu if cap is None else cap))
    s = g.expand(window)
    for a, seg, b in zip(w.nodes, w.segments, w.nodes[1:]):
        ra, rb = m.rep(a), m.rep(b)
        if seg.kind == "branch":
            u, v = seg.ref
            ends = {m.rep(u), m.rep(v)}
        else:
            inst = s.tips[seg.ref]
            holder = s.embracer.get(seg.ref)
            if holder is None:
                raise ValueError(f"tip {seg.ref} is not embraced in window {window}")
            ends = {m.rep(holder), m.rep(inst.anchor)}
            if ra != rb and {ra, rb} != ends and m.model is LengthModel.EXCLUSIVE:
                ends = {ra, rb} if m.rep(holder) in (ra, rb) else ends
        if {ra, rb} != ends:
            raise ValueError(f"segment {seg} does not join {a} and {b}")


# -- walk constructions ---------------------------------------------------

def _entry(g: WGraph, x: NodeRef, sec: Section):
    """How ``x`` touches ``sec``: (first node inside, segment or None)."""
    s = g.expand(sec.window)
    for t in s.embraced_tips.get(x, ()):
        inst = s.tips[t]
        if inst.anchor in sec.nodes:
            return inst.anchor, Segment("tip", inst.rank, t)
    for p in s.embraced_nodes.get(x, ()):
        if p in sec.nodes:
            return p, None
    return None, None


def reach_walk(g: WGraph, x: NodeRef, y: NodeRef, sec: Section) -> WalkSpec:
    """A walk from ``x`` to ``y`` whose interior stays inside ``sec``.

    ``x`` enters ``sec`` along the representative walk of a tip it embraces
    (or through a lower-rank node it embraces), crosses ``sec`` by a shortest
    walk of rank at most ``sec.rank`` and leaves the same way towards ``y``.
    """
    if not g.incident(x, sec) or not g.incident(y, sec):
        raise IncidenceError(f"{x} and {y} must both be incident to {sec}")
    if x == y:
        return WalkSpec.at(x)
    u, seg_x = _entry(g, x, sec) if g.rank_of(x) else (x, None)
    v, seg_y = _entry(g, y, sec) if g.rank_of(y) else (y, None)
    inner = shortest_walk(g, u, v, sec.window, Scope(sec.rank, u))
    nodes, segs = list(inner.nodes), list(inner.segments)
    # a wnode that embraces a lower wnode is identified with it: no segment
    if seg_x is not None:
        nodes.insert(0, x)
        segs.insert(0, seg_x)
    else:
        nodes[0] = x
    if seg_y is not None:
        nodes.append(y)
        segs.append(seg_y)
    elif len(nodes) == 1:
        raise IncidenceError(f"{x} and {y} are identified through {sec}")
    else:
        nodes[-1] = y
    for z in nodes[1:-1]:
        if z not in sec.nodes:
            raise AssertionError(f"walk left {sec} at {z}")
    return WalkSpec(tuple(nodes), tuple(segs))


def boundary_crossing_bound(g: WGraph, x: NodeRef, y: NodeRef, window: int) -> bool:
    """Whether ``x`` and ``y`` are wadjacent or at wdistance >= w^rho."""
    rho = g.rank_of(x)
    if g.rank_of(y) != rho:
        raise RankError("both wnodes must have the same rank")
    if rho == ARROW:
        raise RankError("the crossing bound is not stated at the arrow rank")
    if g.wadjacent(x, y, rho, window):
        return True
    d = wdist(g, x, y, window).value
    return d >= omega_pow_scaled(rho, 1)


@dataclass
class UnboundedWalk:
    walk: WalkSpec
    stops: Tuple[NodeRef, ...]  # the rho-wnodes x_0, x_1, ... visited
    subsequence: Tuple[int, ...]  # m_1..m_K, indices into ``stops``
    distances: Tuple[Ordinal, ...]  # wdist(x_0, x_{m_k})


def unbounded_walk(g: WGraph, rho: int, x0: NodeRef, K: int, window: int) -> UnboundedWalk:
    """Walk outward from ``x0`` through boundary rho-wnodes, one
    (rho-1)-section at a time, and pick stops ``x_{m_k}`` with
    ``wdist(x0, x_{m_k}) >= w^rho * k`` for ``k = 1..K``."""
    if rho == ARROW:
        raise RankError("the arrow rank is excluded here")
    if g.rank_of(x0) != rho:
        raise RankError(f"{x0} is not a {rank_str(rho)}-wnode")
    lf = g.is_locally_finite(rho, window)
    if lf is INCONCLUSIVE or lf is not True:
        raise InconclusiveError(f"local {rank_str(rho)}-finiteness is not certified")
    if rho not in g.p.infinite_boundary:
        raise InconclusiveError(f"presentation does not declare infinitely many boundary {rank_str(rho)}-wnodes")
    if K == 0:
        return UnboundedWalk(WalkSpec.at(x0), (x0,), (), ())
    boundary = set(g.boundary_nodes(rho, window))
    lower = g.sections(pred(rho), window)
    touching: Dict[NodeRef, List[Section]] = {}
    for b in boundary | {x0}:
        touching[b] = [sec for sec in lower if g.incident(b, sec)]
    stops = [x0]
    walk = WalkSpec.at(x0)
    dists = [ZERO]
    sub: List[int] = []
    k = 1
    while k <= K:
        cur = stops[-1]
        best = None
        for sec in touching[cur]:
            for b in sorted(boundary):
                if b in stops or sec not in touching[b]:
                    continue
                d = wdist(g, x0, b, window)
                cand = (d.value, b, sec)
                if best is None or (cand[0] > best[0]) or (cand[0] == best[0] and b < best[1]):
                    best = cand
        if best is None:
            raise InconclusiveError(f"window {window} too small to reach k={k} (K={K})")
        dval, b, sec = best
        walk = walk.then(reach_walk(g, cur, b, sec))
        stops.append(b)
        dists.append(dval)
        while k <= K and dval >= omega_pow_scaled(rho, k):
            sub.append(len(stops) - 1)
            k += 1
    return UnboundedWalk(walk, tuple(stops), tuple(sub), tuple(dists[i] for i in sub))
