import pytest
from hypothesis import given, strategies as st

from wgalaxy.catalog import get_graph
from wgalaxy.enlargement import (
    Hyperbranch,
    SpecParseError,
    Verdict,
    check_spec,
    decide,
    hyperbranch_check,
    hyperdist,
    hypernode_equal,
    maximal_hyper,
    parse_spec as P,
    triangle_hyper,
)
from wgalaxy.ordinal import Ordinal, parse
from wgalaxy.seqs import parse_intpoly
from wgalaxy.wdistance import wdist
from wgalaxy.wgraph import PresentationError


def test_decide_examples():
    assert decide(lambda n: True, 16).verdict is Verdict.IN
    assert decide(lambda n: n % 2 == 0, 16).verdict is Verdict.INCONCLUSIVE
    d = decide(lambda n: n >= 5, 16)
    assert d.verdict is Verdict.IN and d.start == 5
    assert decide(lambda n: n < 3, 16).verdict is Verdict.OUT


def test_decide_needs_a_long_enough_tail():
    # a flip late in the window is not yet a certified tail
    assert decide(lambda n: n >= 14, 16).verdict is Verdict.INCONCLUSIVE


@given(st.integers(0, 40), st.booleans(), st.integers(2, 80))
def test_decide_sound_across_windows(flip, after, window):
    # a switch in the lower half of the window is always caught, and the
    # verdict then survives any larger window
    pred = (lambda n: (n >= flip) == after)
    expected = Verdict.IN if after else Verdict.OUT
    small, big = decide(pred, window), decide(pred, window + 25)
    if flip <= window // 2:
        assert small.verdict is expected
        assert big.verdict is expected
    if small.verdict is not Verdict.INCONCLUSIVE and flip <= window // 2:
        assert small.start <= max(flip, 0)


def test_hypernode_equal_examples():
    assert hypernode_equal(P("b1[n]"), P("b1[n]"), 16).is_in
    assert hypernode_equal(P("const(b1[0])"), P("const(b1[1])"), 16).is_out
    assert hypernode_equal(P("b1[n+0]"), P("b1[n]"), 16).is_in
    assert hypernode_equal(P("b1[n^2-3n+2]"), P("b1[2-3n+n^2]"), 16).is_in
    assert hypernode_equal(P("b1[n]"), P("b1[2n]"), 16).is_out


POOL = ["b1[n]", "b1[n+0]", "b1[2n]", "b1[n^2]", "const(b1[0])", "const(b1[1])", "b1[n^2-n+0]", "b1[2n+1]"]


@given(st.lists(st.sampled_from(POOL), min_size=3, max_size=3))
def test_hypernode_equal_is_an_equivalence(texts):
    x, y, z = map(P, texts)
    e = lambda a, b: hypernode_equal(a, b, 16).verdict
    assert e(x, x) is Verdict.IN
    assert e(x, y) is e(y, x)
    if e(x, y) is Verdict.IN and e(y, z) is Verdict.IN:
        assert e(x, z) is Verdict.IN


def test_hyperdist_examples():
    g = get_graph("ladder1")
    assert hyperdist(g, P("b1[n]"), P("b1[n]"), 16).describe() == "0"
    p = hyperdist(g, P("const(b1[0])"), P("b1[n]"), 16)
    assert p.certified and p.symbolic
    assert p.coeff(1) == parse_intpoly("n")
    assert p.value(40) == parse("w*40")
    assert hyperdist(g, P("const(b1[0])"), P("b1[n^2]"), 16).coeff(1) == parse_intpoly("n^2")


def test_hyperdist_matches_pointwise_distances():
    g = get_graph("hub1")
    x, y = P("e1[n]"), P("r[n,n]")
    p = hyperdist(g, x, y, 10)
    for n, v in p.samples:
        assert v == wdist(g, x.at(n), y.at(n), 12).value


def test_hyperbranch_distance_one():
    g = get_graph("ladder1")
    hb = Hyperbranch(P("r[n,0]"), P("r[n,1]"))
    assert hyperbranch_check(g, hb, 16).is_in
    assert hyperdist(g, hb.a, hb.b, 16).describe() == "1"


def test_maximal_hyper():
    g = get_graph("ladder1")
    assert maximal_hyper(g, P("b1[n]"), 16).is_in
    assert maximal_hyper(g, P("r[n+1,0]"), 16).is_out
    assert maximal_hyper(g, P("const(b1[2])"), 16).is_in


@given(st.sampled_from(["ray0", "ladder1", "hub1"]), st.data())
def test_triangle_and_symmetry(name, data):
    pools = {
        "ray0": ["const(n[0])", "n[n]", "n[2n]", "n[n^2]", "n[n+3]"],
        "ladder1": ["const(b1[0])", "b1[n]", "b1[2n]", "r[n,0]", "r[n,n]", "r[0,n]"],
        "hub1": ["const(h[])", "e1[n]", "r[n,0]", "r[n,n]", "const(e1[2])"],
    }
    g = get_graph(name)
    x, y, z = (P(data.draw(st.sampled_from(pools[name]))) for _ in range(3))
    assert triangle_hyper(g, x, y, z, 8).verdict is Verdict.IN
    assert triangle_hyper(g, x, x, z, 8).is_in
    a, b = hyperdist(g, x, y, 8), hyperdist(g, y, x, 8)
    assert a.samples == b.samples


@pytest.mark.parametrize("text", ["b1[", "zz", "b1[n-5]", "const(b1[n])", "b1[n/2]"])
def test_spec_parse_errors(text):
    with pytest.raises(SpecParseError):
        P(text)


def test_spec_arity_checked_against_graph():
    with pytest.raises(PresentationError):
        check_spec(get_graph("ladder1"), P("b1[n,n]"))


def test_spec_render_round_trip():
    for t in ["b1[2n+1]", "b2[n^2]", "const(b1[3])", "r[n,0]"]:
        assert str(P(str(P(t)))) == str(P(t))
