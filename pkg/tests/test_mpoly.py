from fractions import Fraction

import sympy as sp
from hypothesis import given, strategies as st

import pytest

from absconic import MPoly
from absconic.mpoly import MPolyError

XYZ = ("x", "y", "z")
x, y, z = sp.symbols("x y z")

coeffs = st.fractions(min_value=-1000, max_value=1000, max_denominator=100).map(sp.Rational)
exponents = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))
term_dicts = st.dictionaries(exponents, coeffs, min_size=0, max_size=8)


def test_from_expr_round_trip():
    e = sp.expand((x + 2 * y - sp.Rational(1, 3) * z) ** 2 + sp.I * x * z)
    P = MPoly.from_expr(e, XYZ)
    assert sp.expand(P.as_expr() - e) == 0


def test_basic_queries():
    P = MPoly.from_expr(x**2 * y + z**3, XYZ)
    assert P.total_degree() == 3
    assert P.degree_in("x") == 2
    assert P.degree_in("z") == 3
    assert P.is_homogeneous()
    P.assert_form()
    Q = MPoly.from_expr(x**2 + y, XYZ)
    assert not Q.is_homogeneous()
    with pytest.raises(MPolyError):
        Q.assert_form()


def test_coeff_lookup():
    P = MPoly.from_expr(3 * x * y - sp.Rational(1, 2) * z**2, XYZ)
    assert P.coeff((1, 1, 0)) == 3
    assert P.coeff((0, 0, 2)) == sp.Rational(-1, 2)
    assert P.coeff((5, 0, 0)) == 0


def test_zero_polynomial():
    P = MPoly.from_expr(0, XYZ)
    assert P.is_zero()
    assert P.total_degree() == -1
    assert P.normalized() == P


def test_rejects_non_gaussian_coefficients():
    with pytest.raises(Exception):
        MPoly(XYZ, {(1, 0, 0): sp.sqrt(2)})


def test_rejects_mismatched_exponents():
    with pytest.raises(MPolyError):
        MPoly(XYZ, {(1, 0): 1})
    with pytest.raises(MPolyError):
        MPoly(XYZ, {(-1, 0, 0): 1})


def test_immutability():
    P = MPoly.from_expr(x, XYZ)
    with pytest.raises(AttributeError):
        P.terms = {}


def test_arithmetic():
    P = MPoly.from_expr(x**2 + y * z, XYZ)
    Q = MPoly.from_expr(y * z - 3 * z**2, XYZ)
    assert (P + Q) == MPoly.from_expr(x**2 + 2 * y * z - 3 * z**2, XYZ)
    assert (P - Q) == MPoly.from_expr(x**2 + 3 * z**2, XYZ)
    assert (-P) == MPoly.from_expr(-(x**2) - y * z, XYZ)
    assert (2 * P) == MPoly.from_expr(2 * x**2 + 2 * y * z, XYZ)
    assert (P * Q).total_degree() == 4
    with pytest.raises(MPolyError):
        P + MPoly.from_expr(x, ("x", "y"))


def test_normalized_is_content_one_integer_and_sign_fixed():
    P = MPoly.from_expr(sp.Rational(-4, 6) * x**2 - sp.Rational(2, 9) * y * z, XYZ)
    N = P.normalized()
    # integer coefficients, collective gcd 1, fixed sign for the leading term
    parts = []
    for c in N.terms.values():
        re, im = sp.sympify(c).as_real_imag()
        assert re.is_Integer and im.is_Integer
        parts.extend(v for v in (re, im) if v != 0)
    assert sp.gcd(parts) == 1
    assert N == (-3 * P).normalized()


@given(term_dicts, coeffs)
def test_same_up_to_scale(terms, c):
    P = MPoly(XYZ, terms)
    if c == 0:
        c = sp.Rational(7, 3)
    assert P.same_up_to_scale(c * P)
    assert P.same_up_to_scale(-c * P)


@given(term_dicts)
def test_serialization_round_trip(terms):
    P = MPoly(XYZ, terms)
    assert MPoly.loads(P.dumps()) == P
    assert MPoly.from_obj(P.to_obj()) == P


def test_from_obj_rejects_garbage():
    with pytest.raises(MPolyError):
        MPoly.from_obj({"vars": ["x"], "terms": [{"exps": [1]}]})
    with pytest.raises(MPolyError):
        MPoly.from_obj({"terms": []})
