import pytest
from hypothesis import given, strategies as st

from wgalaxy.ordinal import (
    OMEGA,
    Ordinal,
    OrdinalParseError,
    cmp,
    coeff_at,
    nat_diff,
    nat_sum,
    omega_pow_scaled,
    parse,
    render,
)

exps = st.sampled_from([0, 1, 2, 3, 7, OMEGA])
ordinals = st.lists(st.tuples(exps, st.integers(0, 50)), max_size=5).map(Ordinal)


def test_normal_form_merges_and_sorts():
    a = Ordinal([(0, 3), (2, 1), (0, 2), (1, 0)])
    assert list(a) == [(2, 1), (0, 5)]
    assert render(a) == "w^2*1 + 5"


def test_natural_sum_is_coefficientwise():
    a = parse("w^2*1 + w*3")
    b = parse("w*1 + 4")
    assert nat_sum(a, b) == parse("w^2*1 + w*4 + 4")
    # unlike ordinal addition, 1 + w is not absorbed
    assert nat_sum(Ordinal.of(1), parse("w")) == parse("w*1 + 1")


def test_comparison_is_lexicographic_on_cnf():
    assert parse("w*1") > Ordinal.of(10 ** 9)
    assert parse("w^w*1") > parse("w^100*7")
    assert parse("w^2*1 + 1") > parse("w^2*1")
    assert cmp(parse("w*2"), parse("w*2")) == 0


def test_nat_diff_partial():
    assert nat_diff(parse("w*3 + 2"), parse("w*1 + 2")) == parse("w*2")
    assert nat_diff(parse("w*3"), Ordinal.of(1)) is None


def test_omega_pow_scaled():
    assert omega_pow_scaled(1, 4) == parse("w*4")
    assert omega_pow_scaled(OMEGA, 1) == parse("w^w")
    assert omega_pow_scaled(3, 0) == Ordinal.of(0)
    with pytest.raises(ValueError):
        omega_pow_scaled(1, -1)


def test_parse_rejects_garbage_with_column():
    with pytest.raises(OrdinalParseError, match="column"):
        parse("w*2 + x")
    with pytest.raises(OrdinalParseError):
        parse("")


@given(ordinals, ordinals)
def test_sum_commutes(a, b):
    assert nat_sum(a, b) == nat_sum(b, a)


@given(ordinals, ordinals, ordinals)
def test_sum_associates(a, b, c):
    assert nat_sum(nat_sum(a, b), c) == nat_sum(a, nat_sum(b, c))


@given(ordinals, ordinals)
def test_sum_strictly_monotone(a, b):
    assert nat_sum(a, b) >= a
    if b:
        assert nat_sum(a, b) > a


@given(ordinals, ordinals, ordinals)
def test_total_order(a, b, c):
    assert sum([a < b, a == b, a > b]) == 1
    if a <= b and b <= c:
        assert a <= c


@given(ordinals, ordinals)
def test_diff_round_trip(a, b):
    assert nat_diff(nat_sum(a, b), b) == a


@given(ordinals)
def test_render_parse_round_trip(a):
    assert parse(render(a)) == a


@given(ordinals, st.sampled_from([0, 1, 2, 3]), st.integers(0, 60))
def test_bound_by_scaled_power(a, rho, mu):
    # a <= w^rho * mu  iff  nothing above rho and the rho-coefficient is at most mu
    bounded = all(e <= rho for e, _ in a) and coeff_at(a, rho) <= mu
    if all(e <= rho for e, _ in a) and coeff_at(a, rho) == mu and any(e < rho for e, _ in a):
        bounded = False
    assert (a <= omega_pow_scaled(rho, mu)) == bounded
