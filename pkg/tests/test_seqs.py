import pytest
from hypothesis import given, strategies as st

from wgalaxy.seqs import (
    Composed,
    IntPoly,
    PolyParseError,
    ThresholdSteps,
    fit_poly,
    fit_tail,
    parse_intpoly,
    render_poly,
)


def test_parse_and_render():
    p = parse_intpoly("2n^2 - 3n + 1")
    assert [p(n) for n in range(4)] == [1, 0, 3, 10]
    assert parse_intpoly(render_poly(p)) == p


def test_half_integer_coefficients_are_integer_valued():
    from fractions import Fraction
    p = IntPoly([0, Fraction(1, 2), Fraction(1, 2)])
    assert [p(n) for n in range(5)] == [0, 1, 3, 6, 10]


def test_parse_error():
    with pytest.raises(PolyParseError):
        parse_intpoly("2n+")
    with pytest.raises(PolyParseError):
        parse_intpoly("n/2")


def test_fit_tail_skips_irregular_prefix():
    xs = list(range(10))
    ys = [7, 7, 7] + [n * n for n in xs[3:]]
    p, start = fit_tail(xs, ys)
    assert p == parse_intpoly("n^2") and start == 3


def test_compose():
    p, q = parse_intpoly("n+1"), parse_intpoly("2n")
    assert p.compose(q) == parse_intpoly("2n+1")
    c = Composed(p, ThresholdSteps(parse_intpoly("n"), "steps1"))
    assert c(0) == p(c.inner(0))


def test_threshold_steps_grow_without_bound():
    s = ThresholdSteps(parse_intpoly("n"), "steps1")
    vals = [s(n) for n in range(0, 200)]
    assert vals == sorted(vals)
    assert vals[-1] > vals[0]


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4))
def test_fit_recovers_polynomial(coeffs):
    xs = list(range(len(coeffs) + 3))
    ys = [sum(c * x ** i for i, c in enumerate(coeffs)) for x in xs]
    p = fit_poly(xs, ys)
    assert p is not None and [p(x) for x in xs] == ys


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=3),
       st.lists(st.integers(-4, 4), min_size=1, max_size=3), st.integers(0, 20))
def test_compose_matches_evaluation(a, b, n):
    p = IntPoly(a)
    q = IntPoly(b)
    assert p.compose(q)(n) == p(q(n))


@pytest.mark.parametrize("base", ["n", "n^2", "3n+1"])
def test_threshold_steps_guarantees(base):
    b = parse_intpoly(base)
    s = ThresholdSteps(b, "steps1")
    for n in range(0, 300):
        k = s.block(n)
        assert 0 <= s(n) <= n
        if k >= 2:
            assert b(n) - b(s(n)) >= k
