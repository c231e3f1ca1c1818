"""Ideal-theoretic machinery: Groebner bases, elimination, zero-dimensional
solving and symbolic perfect-square conditions.

All exact solving is done over the Gaussian rationals.  Solutions that are
not Gaussian rational are reported as numeric boxes (refinable precision)
attached to their defining univariate factors — they are never silently
dropped, and they are never fed back into exact pipelines.
"""

import sympy as sp

from .mpoly import MPoly, _syms
from .scalars import is_gauss_rational


class PolysolveError(ValueError):
    pass


class Ideal:
    __slots__ = ("generators", "vars", "order")

    def __init__(self, generators, vars, order="grevlex"):
        if order not in ("lex", "grevlex"):
            raise PolysolveError("unsupported term order %r" % order)
        vars = tuple(str(v) for v in vars)
        gens = []
        for g in generators:
            if not isinstance(g, MPoly):
                g = MPoly.from_expr(g, vars)
            elif g.vars != vars:
                g = MPoly.from_expr(g.as_expr(), vars)
            if not g.is_zero():
                gens.append(g.normalized())
        object.__setattr__(self, "generators", tuple(gens))
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "order", order)

    def __setattr__(self, *a):
        raise AttributeError("Ideal is immutable")

    def exprs(self):
        return [g.as_expr() for g in self.generators]

    def __repr__(self):
        return "Ideal(%d gens in %s, %s)" % (len(self.generators), self.vars, self.order)


class SolutionSet:
    """Finite solution description: certified exact points plus reported rest."""

    def __init__(self, solutions, boxes=None, residual=None):
        self.solutions = list(solutions)   # tuples of Gaussian rationals
        self.boxes = list(boxes or [])     # dicts: approx coords + provenance
        self.residual = residual           # None, or a description string

    def __repr__(self):
        return "SolutionSet(%d exact, %d boxed, residual=%r)" % (
            len(self.solutions), len(self.boxes), self.residual)


# ---------------------------------------------------------------------------
# Groebner bases and elimination
# ---------------------------------------------------------------------------

def _gb(exprs, syms, order):
    exprs = [sp.expand(e) for e in exprs if sp.expand(e) != 0]
    if not exprs:
        return None
    return sp.groebner(exprs, *syms, order=order)


def groebner(I: Ideal) -> Ideal:
    syms = _syms(I.vars)
    gb = _gb(I.exprs(), syms, I.order)
    if gb is None:
        return Ideal([], I.vars, I.order)
    return Ideal(list(gb.exprs), I.vars, I.order)


def eliminate(I: Ideal, drop) -> Ideal:
    """Elimination ideal: lex Groebner basis with the dropped variables in
    front, keeping the generators free of them."""
    drop = {str(v) for v in drop}
    if not drop <= set(I.vars):
        raise PolysolveError("dropping unknown variables %r" % (drop - set(I.vars),))
    keep = tuple(v for v in I.vars if v not in drop)
    ordered = tuple(v for v in I.vars if v in drop) + keep
    syms = _syms(ordered)
    gb = _gb(I.exprs(), syms, "lex")
    if gb is None:
        return Ideal([], keep if keep else I.vars, I.order)
    dropped_syms = set(_syms(tuple(drop)))
    kept = [e for e in gb.exprs if not (e.free_symbols & dropped_syms)]
    return Ideal(kept, keep if keep else I.vars, I.order)


# ---------------------------------------------------------------------------
# univariate roots over Q(i)
# ---------------------------------------------------------------------------

def gaussian_univariate_roots(expr, sym):
    """Factor over Q(i); return (gaussian roots, leftover nonlinear factors).

    Each leftover factor is squarefree, irreducible over Q(i), degree >= 2.
    """
    poly = sp.Poly(sp.expand(expr), sym, domain="QQ_I")
    if poly.is_zero:
        raise PolysolveError("zero polynomial has no finite root set")
    _, factors = poly.factor_list()
    roots, leftovers = [], []
    for fac, _mult in factors:
        if fac.degree() == 1:
            a, b = fac.all_coeffs()
            roots.append(sp.expand(-b / a))
        elif fac.degree() >= 2:
            leftovers.append(fac.as_expr())
    return roots, leftovers


def _box_roots(factor, sym, prec_bits):
    """Numeric (refinable) roots for a leftover univariate factor."""
    digits = max(15, int(prec_bits * 0.302) + 2)
    poly = sp.Poly(factor, sym)
    out = []
    for r in poly.nroots(n=digits):
        out.append({"var": str(sym), "approx": str(r), "minpoly": str(factor),
                    "precision_bits": prec_bits, "certified": False})
    return out


# ---------------------------------------------------------------------------
# small dedicated solvers
# ---------------------------------------------------------------------------

def _substitute(exprs, sym, val):
    return [sp.expand(e.subs(sym, val)) for e in exprs]


def solve_univariate(exprs, sym, prec_bits=128):
    nonzero = [e for e in exprs if e != 0]
    if not nonzero:
        return SolutionSet([], residual="zero ideal: the whole line is a solution")
    g = sp.Poly(nonzero[0], sym, domain="QQ_I")
    for e in nonzero[1:]:
        g = g.gcd(sp.Poly(e, sym, domain="QQ_I"))
    if g.degree() == 0:
        return SolutionSet([])
    roots, leftovers = gaussian_univariate_roots(g.as_expr(), sym)
    boxes = []
    for fac in leftovers:
        boxes.extend(_box_roots(fac, sym, prec_bits))
    return SolutionSet([(r,) for r in roots], boxes=boxes)


def solve_bivariate(exprs, sx, sy, prec_bits=128, verify_on=None):
    """Solve a zero-dimensional bivariate system by resultant triangulation.

    Exact Gaussian solutions are certified by substitution into every input
    (and into ``verify_on`` when given); everything else is boxed.
    """
    exprs = [sp.expand(e) for e in exprs if sp.expand(e) != 0]
    if not exprs:
        return SolutionSet([], residual="zero ideal: positive-dimensional")
    verify_on = list(verify_on) if verify_on is not None else exprs
    only_x = [e for e in exprs if sp.Symbol(str(sy)) not in e.free_symbols]
    with_y = [e for e in exprs if e not in only_x]
    if not with_y:
        # no constraint on y at all
        return SolutionSet([], residual="no generator involves %s: positive-dimensional" % sy)
    # univariate-in-x consequences: resultants of pairs, plus any y-free gens
    univs = [sp.Poly(e, sx, domain="QQ_I") for e in only_x if sp.Symbol(str(sx)) in e.free_symbols]
    base = with_y[0]
    for other in with_y[1:]:
        r = sp.expand(sp.resultant(sp.Poly(base, sy), sp.Poly(other, sy)))
        if r != 0:
            univs.append(sp.Poly(r, sx, domain="QQ_I"))
    if len(with_y) == 1 and not univs:
        return SolutionSet([], residual="single generator: positive-dimensional")
    if not univs:
        return SolutionSet([], residual="all resultants vanish: common curve component "
                                        "(positive-dimensional)")
    g = univs[0]
    for u in univs[1:]:
        g = g.gcd(u)
    if g.degree() == 0:
        return SolutionSet([])
    xroots, xleft = gaussian_univariate_roots(g.as_expr(), sx)
    sols, boxes = [], []
    for fac in xleft:
        for b in _box_roots(fac, sx, prec_bits):
            b["note"] = "x-coordinate only; branch not expanded exactly"
            boxes.append(b)
    for x0 in xroots:
        spec = [e for e in _substitute(with_y + only_x, sx, x0)]
        spec = [e for e in spec if e != 0]
        if not spec:
            return SolutionSet(sols, boxes,
                               residual="line %s=%s is contained in the variety" % (sx, x0))
        if all(sp.Symbol(str(sy)) not in e.free_symbols for e in spec):
            continue
        sub = solve_univariate([e for e in spec if sp.Symbol(str(sy)) in e.free_symbols],
                               sy, prec_bits)
        for (y0,) in sub.solutions:
            if all(sp.expand(e.subs({sx: x0, sy: y0}, simultaneous=True)) == 0
                   for e in verify_on):
                sols.append((x0, y0))
        for b in sub.boxes:
            b["at"] = {str(sx): str(x0)}
            boxes.append(b)
    return SolutionSet(sols, boxes)


def _solve_triangular(exprs, syms, prec_bits):
    """Recursive back-substitution for (lex) triangular systems."""
    exprs = [sp.expand(e) for e in exprs]
    if any(e != 0 and not e.free_symbols for e in exprs):
        return [], [], None
    exprs = [e for e in exprs if e != 0]
    if not syms:
        return [()], [], None
    if not exprs:
        return [], [], "underdetermined tail in %s" % (syms,)
    # find a generator univariate in one of the variables
    for i, s in enumerate(syms):
        cand = [e for e in exprs if e.free_symbols & set(syms) == {s}]
        if not cand:
            continue
        sub = solve_univariate(cand, s, prec_bits)
        sols, boxes, residual = [], list(sub.boxes), None
        rest_syms = syms[:i] + syms[i + 1:]
        for (v,) in sub.solutions:
            tail = [e for e in exprs if e not in cand] or []
            ts, tb, tres = _solve_triangular(_substitute(tail, s, v), rest_syms, prec_bits)
            residual = residual or tres
            for t in ts:
                full = t[:i] + (v,) + t[i:]
                sols.append(full)
            boxes.extend(tb)
        return sols, boxes, residual
    return [], [], "no univariate generator found (not in shape position)"


def solve_zero_dim(I: Ideal, prec_bits=128) -> SolutionSet:
    """Solve a zero-dimensional system; certify exact solutions by
    substitution, box the rest, report positive-dimensional parts."""
    syms = _syms(I.vars)
    exprs = I.exprs()
    gb = _gb(exprs, syms, "grevlex")
    if gb is None:
        return SolutionSet([], residual="zero ideal: positive-dimensional")
    if list(gb.exprs) == [sp.Integer(1)]:
        return SolutionSet([])
    if not gb.is_zero_dimensional:
        return SolutionSet([], residual="positive-dimensional variety (leading-term check)")
    if len(syms) == 1:
        raw = solve_univariate(list(gb.exprs), syms[0], prec_bits)
    elif len(syms) == 2:
        raw = solve_bivariate(list(gb.exprs), syms[0], syms[1], prec_bits,
                              verify_on=exprs)
    else:
        lex = gb.fglm("lex")
        sols, boxes, residual = _solve_triangular(list(lex.exprs), tuple(syms), prec_bits)
        raw = SolutionSet(sols, boxes, residual)
    certified = []
    for sol in raw.solutions:
        subs = dict(zip(syms, sol))
        if all(sp.expand(e.subs(subs, simultaneous=True)) == 0 for e in exprs):
            if all(is_gauss_rational(v) for v in sol):
                certified.append(tuple(sp.expand(v) for v in sol))
    return SolutionSet(certified, raw.boxes, raw.residual)


# ---------------------------------------------------------------------------
# perfect-square conditions
# ---------------------------------------------------------------------------

def _reduce_root_symbol(expr, r, c0):
    """Normalize an expression polynomial in r using r^2 = c0."""
    num, den = sp.fraction(sp.together(expr))
    pn = sp.Poly(num, r)
    pd = sp.Poly(den, r)
    rn = sp.rem(pn, sp.Poly(r**2 - c0, r))
    rd = sp.rem(pd, sp.Poly(r**2 - c0, r))
    return rn.as_expr(), rd.as_expr()


def perfect_square_conditions(p: MPoly, form_vars) -> Ideal:
    """Conditions on the parameters of a binary form p (even degree 2k)
    under which p is the square of a degree-k form.

    Introduces k+1 square-root coefficients b_0..b_k, matches coefficients
    (2k+1 equations) and eliminates the b_i.  When the leading coefficient
    c_0 of p is not identically zero the elimination is done by triangular
    substitution (b_0 = sqrt(c_0) enters only through even powers, so the
    returned generators are polynomial in the parameters); these generators
    cut out the condition set on the chart c_0 != 0.  If c_0 vanishes
    identically a lex Groebner elimination is used instead.
    """
    form_vars = tuple(str(v) for v in form_vars)
    if len(form_vars) != 2:
        raise PolysolveError("p must be a binary form in two named variables")
    u, v = _syms(form_vars)
    params = tuple(x for x in p.vars if x not in form_vars)
    expr = p.as_expr()
    pp = sp.Poly(expr, u, v)
    deg = pp.total_degree()
    if deg % 2 or deg == 0:
        raise PolysolveError("degree must be even and positive, got %d" % deg)
    if not all(sum(m) == deg for m in pp.monoms()):
        raise PolysolveError("p is not homogeneous in %s" % (form_vars,))
    k = deg // 2
    c = [sp.expand(pp.coeff_monomial(u ** (deg - j) * v ** j)) for j in range(deg + 1)]
    pvars = params if params else form_vars

    if c[0] != 0:
        r = sp.Dummy("r")
        b = [r] + [None] * k
        for i in range(1, k + 1):
            cross = sum((2 * b[m] * b[i - m] if m < i - m else b[m] ** 2)
                        for m in range(1, i) if m <= i - m)
            b[i] = sp.cancel((c[i] - cross) / (2 * r))
        conds = []
        for j in range(k + 1, 2 * k + 1):
            acc = 0
            for m in range(j - k, k + 1):
                n = j - m
                if n < m:
                    break
                acc += b[m] ** 2 if n == m else 2 * b[m] * b[n]
            num, den = _reduce_root_symbol(acc - c[j], r, c[0])
            if r in num.free_symbols or r in den.free_symbols:
                raise PolysolveError("internal: square-root symbol did not cancel")
            num = sp.expand(num)
            if num != 0 and num.free_symbols:
                conds.append(num)
            elif num != 0 and not num.free_symbols:
                return Ideal([MPoly(pvars, {(0,) * len(pvars): sp.Integer(1)})], pvars)
        return Ideal(conds, pvars)

    # leading coefficient identically zero: generic block elimination
    bs = sp.symbols("psb0:%d" % (k + 1))
    q = sum(bs[i] * u ** (k - i) * v ** i for i in range(k + 1))
    diff = sp.expand(q * q - expr)
    eqs = sp.Poly(diff, u, v).coeffs()
    allvars = tuple(str(bi) for bi in bs) + pvars
    J = Ideal(eqs, allvars, order="lex")
    return eliminate(J, [str(bi) for bi in bs])
