import json

import pytest
from hypothesis import given, strategies as st

from fixtures import ray_with_end_node, stars, undeclared
from wgalaxy.catalog import build, get_graph, ladder_doc
from wgalaxy.wgraph import (
    ARROW,
    BRANCH_RANK,
    INCONCLUSIVE,
    Presentation,
    PresentationError,
    RankError,
    WGraph,
    parse_node_ref as N,
    parse_rank,
    pred,
    tip_weight,
)
from wgalaxy.ordinal import OMEGA, parse


def test_expand_ray0():
    s = get_graph("ray0").expand(3)
    assert sorted(s.nodes) == [N(f"n[{i}]") for i in range(4)]
    assert len(s.branches) == 3


def test_expand_ladder1_window2():
    g = get_graph("ladder1")
    s = g.expand(2)
    rungs = {x.idx[0] for x in s.nodes if x.family == "r"}
    assert rungs == {0, 1, 2}
    assert g.boundary_nodes(1, 2) == [N("b1[0]"), N("b1[1]")]


def test_section_counts():
    assert len(get_graph("ray0").sections(0, 10)) == 1
    g = get_graph("ladder1")
    assert len(g.sections(0, 5)) == 6
    assert len(g.sections(1, 5)) == 1


def test_sections_reject_rank_above_nu():
    with pytest.raises(RankError):
        get_graph("ladder1").sections(2, 3)


def test_incidence():
    g = get_graph("ladder1")
    s0, s1, s2 = g.sections(0, 5)[:3]
    assert g.incident(N("b1[0]"), s0)
    assert not g.incident(N("b1[0]"), s2)
    # a 0-node meets the 0-section holding its branches
    assert g.incident(N("r[2,3]"), s2)


def test_boundary_nodes():
    assert get_graph("ladder1").boundary_nodes(1, 5) == [N(f"b1[{i}]") for i in range(5)]
    assert ray_with_end_node().boundary_nodes(1, 5) == []
    assert get_graph("hub2").boundary_nodes(2, 4) == []


def test_wadjacent():
    g = get_graph("ladder1")
    assert g.wadjacent(N("b1[0]"), N("b1[1]"), 1, 5)
    assert not g.wadjacent(N("b1[0]"), N("b1[2]"), 1, 5)
    assert g.wadjacent(N("b1[3]"), N("b1[3]"), 1, 5)


def test_local_finiteness():
    assert get_graph("ladder1").is_locally_finite(1, 5) is True
    # derived from stable window counts when nothing is declared
    assert undeclared("ladder1").is_locally_finite(1, 5) is True
    assert undeclared("ladder2").is_locally_finite(2, 4) is True
    assert stars().is_locally_finite(1, 4) is False
    assert stars(declare=False).is_locally_finite(1, 4) is INCONCLUSIVE
    assert ray_with_end_node().is_locally_finite(1, 4) is True


def test_maximal_node():
    g = get_graph("ladder1")
    assert g.maximal_node(N("b1[0]"))
    assert not g.maximal_node(N("r[1,0]"))
    assert g.maximal_node(N("r[0,0]"))
    assert get_graph("ray0").maximal_node(N("n[5]"))


def test_rank_predecessors():
    assert pred(OMEGA) == ARROW
    assert pred(3) == 2
    assert pred(0) == BRANCH_RANK
    with pytest.raises(RankError):
        pred(ARROW)
    assert parse_rank("w") == OMEGA and parse_rank("~w") == ARROW
    assert 7 < ARROW < OMEGA


def test_tip_weights():
    assert tip_weight(0) == parse("w")
    assert tip_weight(1) == parse("w^2")
    assert tip_weight(ARROW) == parse("w^w")


def test_presentation_json_round_trip():
    p = build("ladder2")
    q = Presentation.from_json(json.dumps(p.to_dict()))
    assert WGraph(q).expand(3).nodes == WGraph(p).expand(3).nodes


def test_dangling_family_rejected():
    doc = ladder_doc(1)
    doc["branches"].append({"params": ["k"], "ends": [["zz", ["k"]], ["r", ["0", "k"]]]})
    with pytest.raises(PresentationError):
        Presentation.from_dict(doc)


def test_tip_rank_must_be_below_embracer():
    doc = ladder_doc(1)
    doc["nodes"][-1]["rank"] = 0
    with pytest.raises(PresentationError):
        Presentation.from_dict(doc)


FAMILIES = ["ray0", "ladder1", "ladder2", "hub1", "hub2"]


@given(st.sampled_from(FAMILIES), st.integers(1, 5))
def test_expand_monotone(name, w):
    g = get_graph(name)
    a, b = g.expand(w), g.expand(w + 1)
    assert set(a.nodes) <= set(b.nodes)
    assert set(a.branches) <= set(b.branches)


@given(st.sampled_from(FAMILIES), st.integers(1, 4), st.data())
def test_sections_partition_branches_and_nest(name, w, data):
    g = get_graph(name)
    s = g.expand(w)
    ranks = list(range(g.nu + 1))
    rho = data.draw(st.sampled_from(ranks))
    secs = g.sections(rho, w)
    seen = [b for sec in secs for b in sec.branches]
    assert len(seen) == len(set(seen)) == len(s.branches)
    for alpha in range(rho):
        for low in g.sections(alpha, w):
            owners = [hi for hi in secs if low.branches <= hi.branches and low.nodes <= hi.nodes]
            assert len(owners) == 1


@pytest.mark.parametrize("name", FAMILIES)
def test_single_top_section(name):
    g = get_graph(name)
    assert len(g.sections(g.nu, 4)) == 1
