"""Small hand-written presentations used across the test modules."""
import copy

from wgalaxy.catalog import ray0_doc
from wgalaxy.wgraph import Presentation, WGraph


def ray_with_end_node() -> WGraph:
    """ray0 plus one 1-wnode embracing the ray's only 0-tip."""
    doc = ray0_doc()
    doc["name"] = "ray_end"
    doc["nu"] = 1
    doc["nodes"].append({"id": "x", "rank": 1, "params": [], "embraces": [{"tip": "t0", "at": []}]})
    return WGraph(Presentation.from_dict(doc))


def star_doc(declare: bool = True) -> dict:
    """Stars h[j] carrying rays r[j,i,k] and q[j,i,k].  The 1-node e[j,i]
    ends ray r(j,i) and ray q(j+1,i), so every star meets infinitely many
    boundary 1-nodes."""
    doc = {
        "name": "stars",
        "nu": 1,
        "nodes": [
            {"id": "h", "rank": 0, "params": ["j"]},
            {"id": "r", "rank": 0, "params": ["j", "i", "k"]},
            {"id": "e", "rank": 1, "params": ["j", "i"],
             "embraces": [{"tip": "t0", "at": ["j", "i"]}, {"tip": "u0", "at": ["j+1", "i"]}]},
            {"id": "q", "rank": 0, "params": ["j", "i", "k"]},
        ],
        "branches": [
            {"params": ["j", "i"], "ends": [["h", ["j"]], ["r", ["j", "i", "0"]]]},
            {"params": ["j", "i", "k"], "ends": [["r", ["j", "i", "k"]], ["r", ["j", "i", "k+1"]]]},
            {"params": ["j", "i"], "ends": [["h", ["j"]], ["q", ["j", "i", "0"]]]},
            {"params": ["j", "i", "k"], "ends": [["q", ["j", "i", "k"]], ["q", ["j", "i", "k+1"]]]},
        ],
        "tips": [{"id": "t0", "rank": 0, "params": ["j", "i"], "anchor": ["r", ["j", "i", "0"]],
                  "walk": [["r", ["j", "i", "t"]]]},
                 {"id": "u0", "rank": 0, "params": ["j", "i"], "anchor": ["q", ["j", "i", "0"]],
                  "walk": [["q", ["j", "i", "t"]]]}],
    }
    if declare:
        doc["sectionBoundaryBound"] = {"1": "unbounded"}
    return doc


def stars(declare: bool = True) -> WGraph:
    return WGraph(Presentation.from_dict(star_doc(declare)))


def undeclared(name: str) -> WGraph:
    from wgalaxy.catalog import build
    doc = copy.deepcopy(build(name).to_dict())
    doc.pop("sectionBoundaryBound", None)
    return WGraph(Presentation.from_dict(doc))
