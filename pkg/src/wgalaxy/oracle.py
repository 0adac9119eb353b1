"""Brute-force distances by enumerating every simple walk of a slice.

Independent of the search in :mod:`wdistance`: the graph here is the raw
slice (no quotient), with a zero-length link between a wnode and each wnode
it embraces, and one weighted link per embraced tip.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .ordinal import Ordinal, _sum_terms
from .wdistance import LengthModel
from .wgraph import NodeRef, WGraph, connects, tip_weight

__all__ = ["OracleBlowup", "oracle_adjacency", "oracle_distances", "oracle_all_pairs"]


class OracleBlowup(RuntimeError):
    pass


def oracle_adjacency(g: WGraph, window: int, cap: Optional[int] = None,
                     model: LengthModel = LengthModel.INCLUSIVE):
    cap = g.nu if cap is None else cap
    s = g.expand(window)
    adj: Dict[NodeRef, List[Tuple[NodeRef, tuple]]] = {x: [] for x, r in s.nodes.items() if connects(r, cap)}

    def add(a, b, w):
        if a in adj and b in adj and a != b:
            adj[a].append((b, w))
            adj[b].append((a, w))

    for a, b in s.branches:
        add(a, b, ((0, 1),))
    for x, ns in s.embraced_nodes.items():
        for y in ns:
            add(x, y, ())
    for x, ts in s.embraced_tips.items():
        for t in ts:
            inst = s.tips[t]
            w = tip_weight(inst.rank).terms
            targets = [inst.anchor]
            if model is LengthModel.EXCLUSIVE:
                targets += [z for z in inst.walk if z != inst.anchor]
            for z in targets:
                add(x, z, w)
    return adj


def oracle_distances(adj, source: NodeRef, limit: int = 2_000_000) -> Dict[NodeRef, Ordinal]:
    """Least length over all simple walks from ``source``."""
    best: Dict[NodeRef, tuple] = {}
    on_path = {source}
    budget = [limit]

    def dfs(u, d):
        budget[0] -= 1
        if budget[0] < 0:
            raise OracleBlowup("too many simple walks; shrink the window")
        old = best.get(u)
        if old is None or d < old:
            best[u] = d
        for v, w in adj[u]:
            if v not in on_path:
                on_path.add(v)
                dfs(v, _sum_terms(d, w))
                on_path.discard(v)

    dfs(source, ())
    return {k: Ordinal._raw(v) for k, v in best.items()}


def oracle_all_pairs(g: WGraph, window: int, cap: Optional[int] = None,
                     model: LengthModel = LengthModel.INCLUSIVE):
    adj = oracle_adjacency(g, window, cap, model)
    return {x: oracle_distances(adj, x) for x in sorted(adj)}
