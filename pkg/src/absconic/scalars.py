"""Exact scalars: arbitrary-precision rationals and Gaussian rationals.

The whole toolkit computes over Q(i).  Scalars are represented as sympy
numbers of the shape ``re + im*I`` with ``re``, ``im`` rational; this module
provides construction, decomposition, conjugation, |z|^2 and the exact
string round-trip used by every file format (coefficients are written as
``"p/q"`` or ``{"re": "p/q", "im": "p/q"}``, never as floats).
"""

from fractions import Fraction

import sympy as sp


class ScalarError(ValueError):
    pass


def rat(x) -> sp.Rational:
    """Exact rational from int, Fraction, string 'p/q' or sympy Rational.

    Floats are rejected: silent float-to-rational conversion would hide
    rounding errors in an otherwise exact pipeline.
    """
    if isinstance(x, float):
        raise ScalarError("refusing float %r; pass an exact rational string like '3/4'" % x)
    if isinstance(x, str):
        x = x.strip()
        if "." in x or "e" in x or "E" in x:
            raise ScalarError("refusing decimal string %r; use an exact 'p/q' form" % x)
        return sp.Rational(Fraction(x))
    if isinstance(x, Fraction):
        return sp.Rational(x)
    v = sp.sympify(x)
    if not (v.is_Rational):
        raise ScalarError("not an exact rational: %r" % (x,))
    return v


def gauss(re, im=0) -> sp.Expr:
    """Gaussian rational re + im*i from exact parts."""
    return rat(re) + rat(im) * sp.I


def gauss_parts(z):
    """Split a Gaussian rational into (re, im) as sympy Rationals."""
    z = sp.expand(sp.sympify(z))
    re, im = z.as_real_imag()
    if not (re.is_Rational and im.is_Rational):
        raise ScalarError("not a Gaussian rational: %r" % (z,))
    return re, im


def is_gauss_rational(z) -> bool:
    try:
        gauss_parts(z)
        return True
    except ScalarError:
        return False


def gauss_conj(z):
    re, im = gauss_parts(z)
    return re - im * sp.I


def gauss_abs2(z) -> sp.Rational:
    """|z|^2 = z * conj(z), an exact nonnegative rational."""
    re, im = gauss_parts(z)
    return re * re + im * im


def scalar_to_obj(z):
    """Serialize a Gaussian rational: plain 'p/q' string if real, else
    {'re': 'p/q', 'im': 'p/q'}."""
    re, im = gauss_parts(z)
    if im == 0:
        return str(re)
    return {"re": str(re), "im": str(im)}


def scalar_from_obj(obj):
    if isinstance(obj, dict):
        return gauss(obj.get("re", "0"), obj.get("im", "0"))
    return gauss(obj)
