import pytest
from hypothesis import given, strategies as st

from wgalaxy.catalog import get_graph
from wgalaxy.enlargement import Hyperbranch, Verdict, hyperbranch_check, parse_spec as P
from wgalaxy.galaxy import (
    Closeness,
    ConstructionError,
    canonical_standard,
    classify,
    closer,
    ladder,
    limitedly_distant,
    non_principal_witness,
    partial_order_check,
    principal_membership,
    refinement,
    section_embedding,
    section_probes,
    single_propagation,
)
from wgalaxy.wdistance import Scope
from wgalaxy.wgraph import ARROW, OMEGA, RankError, parse_node_ref as N

X = P("const(b1[0])")


@pytest.fixture(scope="module")
def l1():
    return get_graph("ladder1")


def test_limitedly_distant_examples(l1):
    assert limitedly_distant(l1, X, X, 1, 16).is_in
    assert limitedly_distant(l1, X, P("b1[n]"), 1, 16).is_out
    assert limitedly_distant(l1, P("b1[n]"), P("b1[n+3]"), 1, 16).is_in
    # w*n stays below w^w and below w^w*1
    assert limitedly_distant(l1, X, P("b1[n]"), ARROW, 16).is_in
    assert limitedly_distant(l1, X, P("b1[n]"), OMEGA, 16).is_in


def test_rank_zero_separates_rungs(l1):
    assert limitedly_distant(l1, P("r[0,n]"), P("r[0,n+2]"), 0, 16).is_in
    assert limitedly_distant(l1, P("const(r[0,0])"), P("const(r[1,0])"), 0, 16).is_out


def test_classify_examples(l1):
    assert len(classify(l1, [X, P("const(b1[5])")], 1, 16).blocks) == 1
    part = classify(l1, [X, P("diag(b1[n])"), P("b1[n+3]")], 1, 16)
    assert [[str(s) for s in m] for _, m in part.blocks] == [["const(b1[0])"], ["b1[n]", "b1[n+3]"]]
    assert part.blocks[0][0].principal and not part.blocks[1][0].principal
    assert classify(l1, [], 1, 16).blocks == []


def test_principal_membership(l1):
    assert principal_membership(l1, P("const(b1[7])"), 1, 16).is_in
    assert principal_membership(l1, P("b1[n]"), 1, 16).is_out
    assert canonical_standard(l1, 16) == X


def test_refinement_examples():
    g = get_graph("ladder2")
    specs = [P(s) for s in ["const(b2[0])", "b2[n]", "b1[0,n]", "b1[0,n+1]", "r[0,0,n]", "b2[2n]"]]
    assert refinement(g, specs, 1, 2, 8)
    assert refinement(g, specs, 2, 2, 8)
    std = [P(s) for s in ["const(b2[0])", "const(b1[1,2])", "const(r[0,3,1])"]]
    assert len(classify(g, std, 2, 8).blocks) == 1


def test_section_embedding():
    g = get_graph("ladder2")
    s1 = g.section_of(N("b1[0,0]"), 1, 6)
    s2 = g.section_of(N("b1[0,0]"), 2, 6)
    diag = P("b1[0,n]")
    # non-principal at rank 1 inside its own 1-section, principal at rank 2
    assert limitedly_distant(g, P("const(b1[0,0])"), diag, 1, 8, scope=Scope(1, N("b1[0,0]"))).is_out
    assert section_embedding(g, s1, s2, [diag, P("const(b1[0,2])"), P("r[0,n,0]")], 6)
    assert len(section_probes(g, s1)) >= 5
    with pytest.raises(RankError):
        section_embedding(g, s2, s1, [diag], 6)


def test_closer_examples(l1):
    v = lambda a, b: closer(l1, P(a), P(b), 1, X).verdict
    assert v("b1[n]", "b1[n]") is Closeness.NOT_CLOSER
    assert v("b1[n]", "b1[2n]") is Closeness.CLOSER
    assert v("b1[n]", "b1[n+3]") is Closeness.NOT_CLOSER
    assert v("b1[2n]", "b1[n]") is Closeness.NOT_CLOSER


def test_arrow_rank_rejected(l1):
    with pytest.raises(RankError):
        closer(l1, P("b1[n]"), P("b1[2n]"), ARROW, X)
    with pytest.raises(RankError):
        ladder(l1, X, P("b1[n]"), ARROW, 1)


def test_ladder_small(l1):
    assert [str(s) for s in ladder(l1, X, P("b1[n]"), 1, 0)] == ["b1[n]"]
    specs = ladder(l1, X, P("b1[n]"), 1, 2)
    assert [str(s) for s in specs] == ["b1[steps1(steps2(n))]", "b1[steps1(n)]", "b1[n]", "b1[2n]", "b1[4n]"]
    rep = partial_order_check(l1, specs, 1, X)
    assert rep.ok and rep.hasse == [(0, 1), (1, 2), (2, 3), (3, 4)]
    with pytest.raises(ConstructionError):
        ladder(l1, X, P("const(b1[3])"), 1, 1)


def test_partial_order_examples(l1):
    rep = partial_order_check(l1, [P("b1[n]"), P("b1[2n]"), P("b1[n^2]")], 1, X)
    assert rep.ok and rep.hasse == [(0, 1), (1, 2)]
    assert partial_order_check(l1, [P("b1[n]")], 1, X).ok


def test_witnesses():
    spec, dec, _ = non_principal_witness(get_graph("ladder1"), 1, 8)
    assert dec.verdict is Verdict.OUT
    spec2, dec2, _ = non_principal_witness(get_graph("ladder2"), 2, 8)
    assert dec2.verdict is Verdict.OUT and spec2.family == "b2"
    with pytest.raises(ConstructionError):
        non_principal_witness(get_graph("hub1"), 1, 8)


def test_single_propagation():
    h1 = get_graph("hub1")
    probes = [P(s) for s in ["const(h[])", "e1[n]", "r[n,n]"]]
    assert single_propagation(h1, 1, probes, 10)
    h2 = get_graph("hub2")
    probes2 = [P(s) for s in ["const(h[])", "r[n,0,0]", "r[2n,0,1]"]]
    assert single_propagation(h2, 1, probes2, 8)
    assert len(classify(h2, probes2, 2, 8).blocks) == 1


POOL1 = ["const(b1[0])", "const(b1[3])", "b1[n]", "b1[n+2]", "b1[2n]", "r[n,0]", "r[n,n]", "r[0,n]", "r[2,n+1]"]
RANKS = [0, 1, ARROW, OMEGA]


@given(st.sampled_from(POOL1), st.sampled_from(POOL1), st.integers(0, 2))
def test_limited_distance_monotone_in_rank(a, b, i):
    g = get_graph("ladder1")
    x, y = P(a), P(b)
    if limitedly_distant(g, x, y, RANKS[i], 10).is_in:
        for sigma in RANKS[i + 1:]:
            assert limitedly_distant(g, x, y, sigma, 10).is_in


@given(st.lists(st.sampled_from(POOL1), min_size=1, max_size=6, unique=True), st.sampled_from([0, 1]))
def test_partition_valid(texts, rho):
    g = get_graph("ladder1")
    specs = [P(t) for t in texts]
    part = classify(g, specs, rho, 10)
    members = [s for _, m in part.blocks for s in m]
    assert len(members) == len(set(members)) == len(specs)
    assert not part.conflicts


@given(st.sampled_from(["r[n,0]", "r[2n,n]", "r[1,n^2]", "r[n+1,3]"]), st.sampled_from([0, 1]))
def test_hyperbranch_ends_co_classify(a, rho):
    g = get_graph("ladder1")
    x = P(a)
    c, k = a[2:-1].split(",")
    y = P(f"r[{c},{k}+1]")
    assert hyperbranch_check(g, Hyperbranch(x, y), 10).is_in
    part = classify(g, [x, y], rho, 10)
    assert len(part.blocks) == 1
