from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyrmf.polynomial import (
    IntPolynomial,
    classify,
    generalized_even_center,
    parse_polynomial,
    rational_roots,
    shifted_even_check,
)


def test_parse_coefficient_form():
    p = parse_polynomial("1,0,1")
    assert p.coeffs == (1, 0, 1)
    assert p.degree == 2


def test_parse_human_forms():
    assert parse_polynomial("x^2+1").coeffs == (1, 0, 1)
    assert parse_polynomial("x^2 - 6x").coeffs == (0, -6, 1)
    assert parse_polynomial("2x^3+3x^2+x").coeffs == (0, 1, 3, 2)
    assert parse_polynomial("x**2 + 1").coeffs == (1, 0, 1)
    assert parse_polynomial("3*x^2 - 2*x + 7").coeffs == (7, -2, 3)
    assert parse_polynomial("x").coeffs == (0, 1)


def test_parse_rejects_garbage():
    for bad in ["", "x^", "1,0,zero", "y^2", "x^2++1", "5"]:
        with pytest.raises(ValueError):
            parse_polynomial(bad)


def test_constructor_invariants():
    with pytest.raises(ValueError):
        IntPolynomial((3,))  # degree 0
    with pytest.raises(ValueError):
        IntPolynomial((1, 2, 0))  # leading zero


def test_eval_examples():
    assert parse_polynomial("x^2+1")(3) == 10
    assert parse_polynomial("0,-6,1")(2) == -8
    assert parse_polynomial("x^2+x")(1) == 2  # x(x+1) at 1


def test_eval_negative_and_big():
    p = parse_polynomial("x^3+2x+1")
    assert p(-10) == -1019
    assert p(10**6) == 10**18 + 2 * 10**6 + 1


def test_classify_known_cases():
    c = classify(parse_polynomial("0,0,1"))  # x^2
    assert c.is_pure_power
    assert c.pure_power_witness.w == 1
    assert c.pure_power_witness.c == 0
    assert c.is_product_of_linear_factors
    assert not c.clt_admissible

    c = classify(parse_polynomial("x^2+x"))
    assert not c.is_pure_power
    assert [r for r, _ in c.rational_roots] == [Fraction(-1), Fraction(0)]
    assert c.clt_admissible and not c.fluct_admissible

    c = classify(parse_polynomial("0,-6,1"))
    assert c.generalized_even_center == 6
    assert sorted(r for r, _ in c.rational_roots) == [0, 6]

    c = classify(parse_polynomial("x^2+1"))
    assert c.rational_roots == ()
    assert c.clt_admissible and c.fluct_admissible


def test_shifted_even_examples():
    assert shifted_even_check(parse_polynomial("0,-6,1"), 6)
    assert not shifted_even_check(parse_polynomial("0,-6,1"), 4)
    assert shifted_even_check(parse_polynomial("x^2+1"), 0)


def test_pure_power_with_rational_center():
    # 4(x + 1/2)^2 = 4x^2 + 4x + 1
    c = classify(parse_polynomial("1,4,4"))
    assert c.is_pure_power
    assert c.pure_power_witness.w == 4
    assert c.pure_power_witness.c == Fraction(1, 2)


def test_repeated_rational_roots():
    # (2x+1)^2 (x-3) = (4x^2+4x+1)(x-3)
    p = parse_polynomial("-3,-11,-8,4")
    roots = dict(rational_roots(p))
    assert roots == {Fraction(-1, 2): 2, Fraction(3): 1}
    assert classify(p).is_product_of_linear_factors


def _expand_pure_power(w: int, num: int, den: int, d: int) -> IntPolynomial:
    from math import comb

    c = Fraction(num, den)
    coeffs = [w * comb(d, k) * c ** (d - k) for k in range(d + 1)]
    assert all(f.denominator == 1 for f in coeffs)
    return IntPolynomial(tuple(int(f) for f in coeffs))


@given(
    t=st.integers(-5, 5).filter(lambda v: v != 0),
    num=st.integers(-6, 6),
    den=st.integers(1, 4),
    d=st.integers(1, 5),
)
def test_pure_power_round_trip(t, num, den, d):
    w = t * den**d  # makes the expansion integral
    p = _expand_pure_power(w, num, den, d)
    cls = classify(p)
    assert cls.is_pure_power
    assert cls.pure_power_witness.w == w
    assert cls.pure_power_witness.c == Fraction(num, den)


@given(
    factors=st.lists(
        st.tuples(st.integers(1, 5), st.integers(-7, 7)), min_size=2, max_size=4
    )
)
def test_linear_factor_products_round_trip(factors):
    coeffs = [1]
    for a, b in factors:
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += c * b
            nxt[i + 1] += c * a
        coeffs = nxt
    p = IntPolynomial(tuple(coeffs))
    cls = classify(p)
    assert cls.is_product_of_linear_factors
    expected: dict[Fraction, int] = {}
    for a, b in factors:
        r = Fraction(-b, a)
        expected[r] = expected.get(r, 0) + 1
    assert dict(cls.rational_roots) == expected


@given(
    g_coeffs=st.lists(st.integers(-5, 5), min_size=1, max_size=3),
    lead=st.integers(1, 4),
    shift=st.integers(-6, 6),
)
@settings(max_examples=50)
def test_generalized_even_center_detection(g_coeffs, lead, shift):
    # build g(x) even with nonzero leading term, then slide it to
    # center beta = 2*shift so all coefficients stay integral
    even = []
    for c in g_coeffs:
        even.extend([c, 0])
    even[-1] = 0
    even.append(lead)  # even degree leading coefficient
    g = IntPolynomial(tuple(even))
    shifted = _compose_int_shift(g, -shift)  # P(x) = g(x - shift)
    beta = generalized_even_center(shifted)
    assert beta == 2 * shift
    for n in range(-100, 101):
        assert shifted.eval_fraction(Fraction(beta - n)) == shifted(n)


def _compose_int_shift(p: IntPolynomial, b: int) -> IntPolynomial:
    acc = [0]
    for c in reversed(p.coeffs):
        nxt = [0] * (len(acc) + 1)
        for i, a in enumerate(acc):
            nxt[i + 1] += a
            nxt[i] += a * b
        nxt[0] += c
        while len(nxt) > 1 and nxt[-1] == 0:
            nxt.pop()
        acc = nxt
    return IntPolynomial(tuple(acc))


def test_odd_degree_has_no_even_center():
    assert generalized_even_center(parse_polynomial("x^3+x")) is None


def test_str_round_trips_through_parser():
    for text in ["x^2+1", "0,-6,1", "2x^3+3x^2+x", "x^3+2x+1"]:
        p = parse_polynomial(text)
        assert parse_polynomial(str(p)).coeffs == p.coeffs
        assert parse_polynomial(p.to_coeff_text()).coeffs == p.coeffs
