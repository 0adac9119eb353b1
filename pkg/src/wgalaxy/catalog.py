"""Built-in wgraph families.

``ray0``
    A one-ended 0-ray ``n[0] - n[1] - ...``.
``ladder1``, ``ladder2``, ... (``ladder(rho)``)
    ``ladder(0)`` is a ray ``r[k]``.  ``ladder(L)`` is a one-way infinite
    chain of copies of ``ladder(L-1)`` (new leading copy index ``c``);
    boundary node ``bL[c]`` embraces the top tip of copy ``c`` and the origin
    node ``r[c+1,0,...,0]`` of copy ``c+1``.
``hub1``, ``hub2``, ... (``hub(rho)``)
    A hub 0-node ``h[]`` with a branch to the origin of each of infinitely
    many copies ``i`` of ``ladder(rho-1)``; the end node ``e{rho}[i]``
    embraces the top tip of copy ``i``.  Every hub-to-end connection is a
    two-ended rho-path meeting the rest only at its ends.
"""
from __future__ import annotations

import re
from typing import Dict, List

from .wgraph import Presentation, WGraph

__all__ = ["CATALOG", "catalog_names", "build", "ladder_doc", "hub_doc", "ray0_doc", "get_graph"]


def ray0_doc() -> dict:
    return {
        "name": "ray0",
        "nu": 0,
        "nodes": [{"id": "n", "rank": 0, "params": ["k"]}],
        "branches": [{"params": ["k"], "ends": [["n", ["k"]], ["n", ["k+1"]]]}],
        "tips": [{"id": "t0", "rank": 0, "params": [], "anchor": ["n", ["0"]], "walk": [["n", ["t"]]]}],
    }


def _prefix(doc: dict, c: str) -> dict:
    """Replicate every family of ``doc`` over a new leading copy index ``c``."""
    out = {"nodes": [], "branches": [], "tips": []}
    for nd in doc["nodes"]:
        out["nodes"].append({
            "id": nd["id"], "rank": nd["rank"], "params": [c] + nd["params"],
            "embraces": [{k: v for k, v in e.items() if k != "at"} | {"at": [c] + e["at"]}
                         for e in nd.get("embraces", [])],
        })
    for bd in doc["branches"]:
        out["branches"].append({
            "params": [c] + bd["params"],
            "ends": [[f, [c] + ix] for f, ix in bd["ends"]],
        })
    for td in doc["tips"]:
        out["tips"].append({
            "id": td["id"], "rank": td["rank"], "params": [c] + td["params"],
            "anchor": [td["anchor"][0], [c] + td["anchor"][1]],
            "walk": [[f, [c] + ix] for f, ix in td.get("walk", [])],
        })
    return out


def _ladder_core(level: int) -> dict:
    if level == 0:
        return {
            "nodes": [{"id": "r", "rank": 0, "params": ["k"]}],
            "branches": [{"params": ["k"], "ends": [["r", ["k"]], ["r", ["k+1"]]]}],
            "tips": [{"id": "t0", "rank": 0, "params": [], "anchor": ["r", ["0"]], "walk": [["r", ["t"]]]}],
        }
    inner = _ladder_core(level - 1)
    c = f"c{level}"
    doc = _prefix(inner, c)
    zeros = ["0"] * level  # r has level+1 indices; origin of next copy
    doc["nodes"].append({
        "id": f"b{level}", "rank": level, "params": [c],
        "embraces": [{"tip": f"t{level - 1}", "at": [c]},
                     {"node": "r", "at": [f"{c}+1"] + zeros}],
    })
    doc["tips"].append({
        "id": f"t{level}", "rank": level, "params": [],
        "anchor": ["r", ["0"] * (level + 1)],
        "walk": [[f"b{level}", ["t"]]],
    })
    return doc


def ladder_doc(rho: int) -> dict:
    if rho < 1:
        raise ValueError("ladder(rho) needs rho >= 1; ladder(0) is ray0")
    doc = _ladder_core(rho)
    doc["name"] = f"ladder{rho}"
    doc["nu"] = rho
    doc["sectionBoundaryBound"] = {str(r): 2 for r in range(1, rho + 1)}
    doc["infiniteBoundary"] = list(range(1, rho + 1))
    return doc


def hub_doc(rho: int) -> dict:
    if rho < 1:
        raise ValueError("hub(rho) needs rho >= 1")
    doc = _prefix(_ladder_core(rho - 1), "i")
    doc["nodes"].append({"id": "h", "rank": 0, "params": []})
    doc["nodes"].append({"id": f"e{rho}", "rank": rho, "params": ["i"],
                         "embraces": [{"tip": f"t{rho - 1}", "at": ["i"]}]})
    doc["branches"].append({"params": ["i"], "ends": [["h", []], ["r", ["i"] + ["0"] * rho]]})
    doc["name"] = f"hub{rho}"
    doc["nu"] = rho
    # the hub's own section meets infinitely many boundary nodes below rank rho
    doc["sectionBoundaryBound"] = {str(r): ("unbounded" if r < rho else 0) for r in range(1, rho + 1)}
    return doc


_NAMED = re.compile(r"^(ladder|hub)\(?(\d+)\)?$")

CATALOG: Dict[str, str] = {
    "ray0": "one-ended 0-ray n[k]",
    "ladder1": "chain of rays r[c,k] joined at boundary 1-nodes b1[c]",
    "ladder2": "chain of ladder1 copies r[c2,c1,k] joined at boundary 2-nodes b2[c2]",
    "hub1": "hub h[] joined to end 1-nodes e1[i] by two-ended 1-paths",
    "hub2": "hub h[] joined to end 2-nodes e2[i] by two-ended 2-paths",
}


def catalog_names() -> List[str]:
    return sorted(CATALOG)


def build(name: str) -> Presentation:
    key = name.strip().lower().replace(" ", "")
    if key == "ray0" or key in ("ladder0", "ladder(0)"):
        return Presentation.from_dict(ray0_doc())
    m = _NAMED.match(key)
    if m:
        rho = int(m.group(2))
        return Presentation.from_dict(ladder_doc(rho) if m.group(1) == "ladder" else hub_doc(rho))
    raise KeyError(f"unknown catalog family {name!r}")


_GRAPHS: Dict[str, WGraph] = {}


def get_graph(name: str) -> WGraph:
    """Shared WGraph (with warm caches) for a catalog family."""
    key = name.strip().lower()
    if key not in _GRAPHS:
        _GRAPHS[key] = WGraph(build(key))
    return _GRAPHS[key]
