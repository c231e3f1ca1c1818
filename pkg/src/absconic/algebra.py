"""Exact polynomial algebra: linear substitution, resultants, discriminants,
squarefree parts, perfect-square roots and Hessians.

Conventions frozen here (the source material only pins them up to scale):

* ``resultant`` is the Sylvester resultant in the named variable, computed
  through sympy's subresultant PRS (exact, fraction-free in spirit).
* ``discriminant(f, x) = (-1)^(d(d-1)/2) * Res_x(f, df/dx) / lc_x(f)`` with
  d = deg_x f, so that disc of x^2+bx+c is literally b^2-4c.
* ``hessian_det`` is the plain determinant of the second-derivative matrix,
  no normalization (so the canonical symmetric-conic family gives exactly
  2*a1*(4*a2*a4 - a3^2)).
"""

import sympy as sp

from .mpoly import MPoly, MPolyError, _syms
from .scalars import gauss_parts


class AlgebraError(ValueError):
    pass


# ---------------------------------------------------------------------------
# expression-level cores (shared with the other modules)
# ---------------------------------------------------------------------------

def compose_linear_expr(expr, A, syms):
    """F(A*x) for a square matrix A over the Gaussian rationals."""
    A = sp.Matrix(A)
    n = len(syms)
    if A.shape != (n, n):
        raise AlgebraError("matrix shape %s does not match %d variables" % (A.shape, n))
    images = A * sp.Matrix(syms)
    return sp.expand(sp.sympify(expr).subs(
        {s: images[i] for i, s in enumerate(syms)}, simultaneous=True))


def resultant_expr(f, g, var):
    pf = sp.Poly(f, var)
    pg = sp.Poly(g, var)
    if pf.is_zero or pg.is_zero:
        raise AlgebraError("resultant of the zero polynomial is undefined")
    if pf.degree() < 1 or pg.degree() < 1:
        raise AlgebraError("resultant needs positive degree in %s" % var)
    return sp.expand(sp.resultant(pf, pg))


def discriminant_expr(f, var):
    pf = sp.Poly(f, var)
    d = pf.degree()
    if d < 2:
        raise AlgebraError("discriminant needs degree >= 2 in %s" % var)
    res = sp.resultant(pf, sp.Poly(sp.diff(f, var), var))
    sign = (-1) ** (d * (d - 1) // 2)
    return sp.expand(sp.cancel(sign * res / pf.LC()))


def sqf_part_expr(f, syms):
    poly = sp.Poly(sp.expand(f), *syms, domain="QQ_I")
    if poly.is_zero:
        raise AlgebraError("squarefree part of zero is undefined")
    _, factors = sp.sqf_list(poly)
    out = sp.Integer(1)
    for fac, _mult in factors:
        out *= fac.as_expr()
    return sp.expand(out)


def perfect_square_root_expr(p, syms):
    """Return q with q^2 = c*p for some positive rational c, or None."""
    poly = sp.Poly(sp.expand(p), *syms, domain="QQ_I")
    if poly.is_zero:
        return None
    _, factors = sp.sqf_list(poly)
    if any(mult % 2 for _fac, mult in factors):
        return None
    q0 = sp.Integer(1)
    for fac, mult in factors:
        q0 *= fac.as_expr() ** (mult // 2)
    gamma = sp.cancel(p / sp.expand(q0**2))
    g1, g2 = gauss_parts(gamma)
    norm2 = g1 * g1 + g2 * g2  # |gamma|^2, must be a rational square
    t = sp.sqrt(norm2)
    if not t.is_Rational:
        return None
    P = (t + g1) / 2
    if P > 0:
        u = 1 + (g2 / (2 * P)) * sp.I  # u^2 = gamma / P, c = 1/P
    else:
        # gamma is a negative real; c = 1/|gamma|, u = i
        u = sp.I
    q = sp.expand(u * q0)
    return q


# ---------------------------------------------------------------------------
# MPoly-level operations
# ---------------------------------------------------------------------------

def compose_linear(F: MPoly, A) -> MPoly:
    F.assert_form()
    syms = _syms(F.vars)
    return MPoly.from_expr(compose_linear_expr(F.as_expr(), A, syms), F.vars)


def resultant(f: MPoly, g: MPoly, var: str) -> MPoly:
    if f.vars != g.vars:
        raise MPolyError("variable mismatch")
    if var not in f.vars:
        raise MPolyError("unknown variable %r" % var)
    out = resultant_expr(f.as_expr(), g.as_expr(), sp.Symbol(var))
    rest = tuple(v for v in f.vars if v != var)
    return MPoly.from_expr(out, rest if rest else f.vars)


def discriminant(f: MPoly, var: str) -> MPoly:
    if var not in f.vars:
        raise MPolyError("unknown variable %r" % var)
    out = discriminant_expr(f.as_expr(), sp.Symbol(var))
    rest = tuple(v for v in f.vars if v != var)
    return MPoly.from_expr(out, rest if rest else f.vars)


def squarefree_part(f: MPoly) -> MPoly:
    out = sqf_part_expr(f.as_expr(), _syms(f.vars))
    return MPoly.from_expr(out, f.vars).normalized()


def perfect_square_root(p: MPoly):
    if len(p.vars) not in (2, 3):
        raise AlgebraError("expected a binary or ternary form")
    p.assert_form()
    if p.total_degree() % 2:
        return None
    q = perfect_square_root_expr(p.as_expr(), _syms(p.vars))
    if q is None:
        return None
    return MPoly.from_expr(q, p.vars).normalized()


def hessian_det(q: MPoly, form_vars=None) -> MPoly:
    """Determinant of the second-derivative matrix of a quadratic form.

    ``form_vars`` names the (three) form variables; any remaining variables
    of q are treated as symbolic parameters and survive into the output.
    """
    if form_vars is None:
        form_vars = q.vars
    form_vars = tuple(form_vars)
    syms = _syms(form_vars)
    expr = q.as_expr()
    if sp.Poly(expr, *syms).total_degree() != 2:
        raise AlgebraError("not a quadratic form in %s" % (form_vars,))
    H = sp.Matrix(len(syms), len(syms),
                  lambda i, j: sp.diff(expr, syms[i], syms[j]))
    det = sp.expand(H.det())
    params = tuple(v for v in q.vars if v not in form_vars)
    return MPoly.from_expr(det, params if params else form_vars)
