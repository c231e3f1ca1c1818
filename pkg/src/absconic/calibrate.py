"""Calibration algorithms: unique-reflection search, invariant conic spaces,
square and surface-of-revolution calibration, and the torus pipeline.

The reflection search solves the paper-style system "F = F o phi_A, A^2 = I,
det A = 1" through an exact reformulation: a nontrivial solution is a
harmonic homology A = 2*v*w^T/(w^T v) - I with center v and axis line w, and
(for even-degree F; odd degrees go through F^2) the axis line must divide
the polar D_v F.  That condition is linear in v, so for each w-chart the
candidates are the points where a small coefficient matrix drops rank —
a system in the two chart variables of w only, solved by resultants and
factoring.  Every candidate is then verified exactly: rational candidates by
integer substitution, irrational ones modulo their minimal polynomials (a
verified irrational reflection comes with its Galois conjugates, so it
immediately means "more than one symmetry").  The identity matrix, which
always solves the literal system, is not a reflection and is excluded.
"""

import itertools

import sympy as sp

from .algebra import compose_linear_expr, perfect_square_root_expr, resultant_expr
from .mpoly import MPoly, _syms
from .polysolve import (Ideal, gaussian_univariate_roots, perfect_square_conditions,
                        solve_bivariate, solve_univariate)
from .projective import (Conic, ProjLine, ProjMap, ProjPoint,
                         line_tangent_to_conic_condition)
from .scalars import gauss_parts, is_gauss_rational


class CalibrationError(ValueError):
    pass


class SymmetryError(CalibrationError):
    """Raised when the reflection is not uniquely solvable."""

    def __init__(self, message, kind):
        super().__init__(message + " (not uniquely solvable)")
        self.kind = kind  # 'none' | 'multiple' | 'continuum' | 'degenerate'


class Reflection:
    def __init__(self, mapping: ProjMap, source: MPoly = None):
        if not mapping.involution:
            mapping = ProjMap(mapping.mat, involution=True)
        self.map = mapping
        self.source = source

    def __eq__(self, other):
        return isinstance(other, Reflection) and self.map == other.map

    def __repr__(self):
        return "Reflection(%s)" % (self.map.mat.tolist(),)


# ---------------------------------------------------------------------------
# fast exact composition helpers
# ---------------------------------------------------------------------------

def _integerized(expr, syms):
    poly = sp.Poly(sp.expand(expr), *syms, domain="QQ_I")
    dens = [sp.fraction(sp.together(c))[1] for c in poly.coeffs()]
    scaled = sp.expand(expr * sp.lcm([sp.Integer(d) for d in dens]))
    return scaled


def _compose_rows(Fexpr, rows, syms):
    """F(L0, L1, L2) with Li = rows[i].x, via cached linear-form powers."""
    lins = [sp.Poly(sum(rows[i][j] * syms[j] for j in range(3)), *syms)
            for i in range(3)]
    poly = sp.Poly(Fexpr, *syms)
    cache = [{0: sp.Poly(1, *syms)} for _ in range(3)]

    def power(i, e):
        if e not in cache[i]:
            cache[i][e] = power(i, e - 1) * lins[i]
        return cache[i][e]

    out = sp.Poly(0, *syms)
    for monom, coeff in poly.terms():
        term = sp.Poly(coeff, *syms)
        for i, e in enumerate(monom):
            if e:
                term = term * power(i, e)
        out = out + term
    return out.as_expr()


def _homology_matrix(v, w):
    v = sp.Matrix(v)
    w = sp.Matrix(w)
    dot = (w.T * v)[0]
    if dot == 0:
        raise CalibrationError("w.v = 0: not a harmonic homology")
    return 2 * v * w.T / dot - sp.eye(3)


def _is_exact_symmetry(Fexpr, v, w, syms, degree):
    """F o A = F for the det-1 homology with center v, axis w (exact)."""
    v = sp.Matrix(v)
    w = sp.Matrix(w)
    dot = (w.T * v)[0]
    if dot == 0:
        return False
    B = 2 * v * w.T - dot * sp.eye(3)
    comp = _compose_rows(Fexpr, B.tolist(), syms)
    return sp.expand(comp - dot ** degree * Fexpr) == 0


# ---------------------------------------------------------------------------
# find_symmetry: minors machinery
# ---------------------------------------------------------------------------

def _restriction_matrix(Gexpr, syms, wc):
    """Coefficient matrix (rows: binary coefficients of the restriction of
    D_v G to the line w; cols: v components).  Entries are polynomials in
    the chart variables of w."""
    v = sp.symbols("_v0 _v1 _v2")
    s_, t_ = sp.Dummy("s"), sp.Dummy("t")
    i = next(k for k in range(3) if wc[k] == 1)
    pts = []
    for j in range(3):
        if j == i:
            continue
        pt = [sp.Integer(0)] * 3
        pt[j] = sp.Integer(1)
        pt[i] = -wc[j]
        pts.append(pt)
    polar = sum(v[k] * sp.diff(Gexpr, syms[k]) for k in range(3))
    restr = sp.expand(polar.subs(
        {syms[k]: s_ * pts[0][k] + t_ * pts[1][k] for k in range(3)},
        simultaneous=True))
    co = sp.Poly(restr, s_, t_)
    deg = co.total_degree()
    rows = []
    for m in range(deg, -1, -1):
        cc = co.coeff_monomial(s_ ** m * t_ ** (deg - m))
        rows.append([sp.expand(sp.diff(cc, v[k])) for k in range(3)])
    return sp.Matrix(rows)


def _pexp(e):
    return sp.expand(e)


def _gpoly(e, *syms):
    return sp.Poly(sp.expand(e), *syms)


class _ChartContext:
    """Per-chart data: restriction matrix, cross-product kernel candidates,
    and lazily built verification polynomials for each candidate."""

    def __init__(self, Fexpr, syms, degree, wc, free, Mt):
        self.Fexpr = Fexpr
        self.syms = syms
        self.degree = degree
        self.wc = list(wc)
        self.free = list(free)
        self.Mt = Mt
        self._crosses = None
        self._vdata = {}

    def crosses(self):
        if self._crosses is None:
            out = []
            for i, j in itertools.combinations(range(self.Mt.rows), 2):
                c = sp.Matrix(self.Mt[i, :]).cross(sp.Matrix(self.Mt[j, :]))
                c = [_pexp(e) for e in c]
                if any(e != 0 for e in c):
                    out.append(c)
            self._crosses = out
        return self._crosses

    def vdata(self, k):
        """(v(w), w.v(w), verification polynomials) for cross vector k."""
        if k not in self._vdata:
            vvec = self.crosses()[k]
            w = sp.Matrix(self.wc)
            v = sp.Matrix(vvec)
            dot = _pexp((w.T * v)[0])
            B = 2 * v * w.T - dot * sp.eye(3)
            comp = _compose_rows(self.Fexpr, B.tolist(), self.syms)
            diff = sp.expand(comp - dot ** self.degree * self.Fexpr)
            vpolys = [_pexp(c) for c in sp.Poly(diff, *self.syms).coeffs()]
            self._vdata[k] = (vvec, dot, [p for p in vpolys if p != 0])
        return self._vdata[k]


def _nf_compose_defect(Fexpr, syms, degree, vvec, wc, nf):
    """(w.v, nonzero coefficients of F o B - (w.v)^d F) with every
    coefficient kept in normal form nf — cheap over quotient rings where the
    fully expanded verification polynomials would blow up."""
    w = sp.Matrix(list(wc))
    v = sp.Matrix(list(vvec))
    dotraw = sp.expand((w.T * v)[0])
    dot = nf(dotraw)
    B = 2 * v * w.T - dotraw * sp.eye(3)
    rows = [[nf(sp.expand(B[i, j])) for j in range(3)] for i in range(3)]
    unit = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]

    def mul(d1, d2):
        out = {}
        for m1, c1 in d1.items():
            for m2, c2 in d2.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, sp.Integer(0)) + c1 * c2
        red = {}
        for m, c in out.items():
            c = nf(sp.expand(c))
            if c != 0:
                red[m] = c
        return red

    lins = [{unit[t]: rows[i][t] for t in range(3) if rows[i][t] != 0}
            for i in range(3)]
    pows = [{0: {(0, 0, 0): sp.Integer(1)}} for _ in range(3)]

    def power(i, e):
        if e not in pows[i]:
            pows[i][e] = mul(power(i, e - 1), lins[i])
        return pows[i][e]

    dp = sp.Integer(1)
    for _ in range(degree):
        dp = nf(sp.expand(dp * dot))
    acc = {}
    for monom, coeff in sp.Poly(Fexpr, *syms).terms():
        term = {(0, 0, 0): sp.sympify(coeff)}
        for i, e in enumerate(monom):
            if e:
                term = mul(term, power(i, e))
        for m, c in term.items():
            acc[m] = acc.get(m, sp.Integer(0)) + c
        acc[monom] = acc.get(monom, sp.Integer(0)) - coeff * dp
    defect = []
    for c in acc.values():
        c = nf(sp.expand(c))
        if c != 0:
            defect.append(c)
    return dot, defect


def _minors(Mt, size):
    out = []
    for rows in itertools.combinations(range(Mt.rows), size):
        for cols in itertools.combinations(range(Mt.cols), size):
            m = _pexp(Mt[list(rows), list(cols)].det())
            if m != 0:
                out.append(m)
    return out


def _uni_candidates(polys, s):
    """gcd roots of a univariate system: (exact tuples, branch chains,
    all_zero flag)."""
    polys = [_pexp(p) for p in polys]
    polys = [p for p in polys if p != 0]
    if not polys:
        return [], [], True
    g = _gpoly(polys[0], s)
    for p in polys[1:]:
        g = g.gcd(_gpoly(p, s))
    if g.degree() == 0:
        return [], [], False
    roots, leftovers = gaussian_univariate_roots(g.as_expr(), s)
    exact = [(r,) for r in roots]
    branches = [{"chain": [fac], "syms": (s,)} for fac in leftovers]
    return exact, branches, False


def _biv_candidates(polys, s1, s2):
    """Zero set structure of a bivariate system: exact Gaussian points,
    irreducible branch chains for the non-Gaussian isolated points, and the
    positive-dimensional components (irreducible curves inside the zero
    set; the sentinel None means the whole plane)."""
    polys = [_pexp(p) for p in polys]
    polys = [p for p in polys if p != 0]
    if not polys:
        return [], [], [None]
    g = _gpoly(polys[0], s1, s2)
    for p in polys[1:]:
        g = g.gcd(_gpoly(p, s1, s2))
    comps = []
    if g.total_degree() >= 1:
        comps = [f.as_expr() for f, _ in g.factor_list()[1]]
        reduced = []
        for p in polys:
            q = sp.quo(_gpoly(p, s1, s2), g)
            if q.total_degree() == 0 and not q.is_zero:
                return [], [], comps  # a unit remains: no isolated points
            if not q.is_zero and q.total_degree() >= 1:
                reduced.append(q.as_expr())
        polys = reduced
        if not polys:
            return [], [], comps
    exact, branches = [], []
    in_s2 = [p for p in polys if _gpoly(p, s2).degree() >= 1]
    only_s1 = [p for p in polys if _gpoly(p, s2).degree() < 1]
    univs = [_gpoly(p, s1) for p in only_s1]
    for i, j in itertools.combinations(range(len(in_s2)), 2):
        r = _pexp(sp.resultant(in_s2[i], in_s2[j], s2))
        if r != 0:
            univs.append(_gpoly(r, s1))
        if len(univs) >= 4:
            break
    if not univs:
        if len(in_s2) == 1:
            comps.extend(f.as_expr() for f, _ in _gpoly(in_s2[0], s1, s2).factor_list()[1])
            return exact, branches, comps
        raise SymmetryError("bivariate candidate system resists triangulation",
                            "degenerate")
    g1 = univs[0]
    for u in univs[1:]:
        g1 = g1.gcd(u)
    if g1.degree() == 0:
        return exact, branches, comps
    roots1, leftovers1 = gaussian_univariate_roots(g1.as_expr(), s1)
    for r1 in roots1:
        spec = [_pexp(p.subs(s1, r1)) for p in polys]
        spec = [p for p in spec if p != 0]
        if not spec:
            comps.append(s1 - r1)  # the whole line s1 = r1 is in the zero set
            continue
        g2 = _gpoly(spec[0], s2)
        for p in spec[1:]:
            g2 = g2.gcd(_gpoly(p, s2))
        if g2.is_zero:
            comps.append(s1 - r1)
            continue
        if g2.degree() == 0:
            continue
        roots2, leftovers2 = gaussian_univariate_roots(g2.as_expr(), s2)
        exact.extend([(r1, r2) for r2 in roots2])
        branches.extend([{"chain": [fac, s1 - r1], "syms": (s2, s1)}
                         for fac in leftovers2])
    for fac in leftovers1:
        # non-Gaussian first coordinate: the s2 member of the chain is the
        # gcd of the system modulo fac, completed lazily
        branches.append({"chain": [None, fac], "syms": (s2, s1), "system": polys})
    return exact, branches, comps


def _modf_gcd(system, f, s1, s2):
    """gcd in s2 of a polynomial system with coefficients in the field
    QQ(i)[s1]/(f) (f irreducible), via pseudo-remainder Euclid."""
    fpoly = _gpoly(f, s1)

    def red(p):
        pp = _gpoly(p, s2)
        out = sp.Integer(0)
        n = pp.degree()
        for k, c in enumerate(pp.all_coeffs()):
            rc = sp.rem(_gpoly(c, s1), fpoly).as_expr()
            out += rc * s2 ** (n - k)
        return _pexp(out)

    cur = None
    for m in system:
        g = red(m)
        if g == 0:
            continue
        if cur is None:
            cur = g
            continue
        a, b = cur, g
        while True:
            b = red(b)
            if b == 0:
                break
            if _gpoly(b, s2).degree() == 0:
                a = b
                break
            r = red(sp.prem(_gpoly(a, s2), _gpoly(b, s2)).as_expr())
            a, b = b, r
        cur = a
        if cur != 0 and _gpoly(cur, s2).degree() == 0:
            return sp.Integer(1)
    if cur is None or cur == 0:
        return sp.Integer(0)
    return cur


def _complete_chain(branch):
    """Fill in the lazy member of a 2-variable branch chain.  Returns the
    chain (list of generators), None (empty branch), or raises."""
    chain = branch["chain"]
    if chain[0] is not None:
        return [g for g in chain]
    s2, s1 = branch["syms"]
    f = chain[1]
    g = _modf_gcd(branch["system"], f, s1, s2)
    if g == 0:
        raise SymmetryError("candidate system degenerates over an extension field",
                            "degenerate")
    if _gpoly(g, s2).degree() == 0:
        return None
    return [g, f]


def _verify_branch(ctx, branch):
    """True iff a whole irreducible branch of non-Gaussian w-candidates
    consists of verified symmetries.  All points of the branch pass or fail
    together when the chain is prime; a failed composite chain is refined
    by a gcd over the extension field before giving up."""
    chain = _complete_chain(branch)
    if chain is None:
        return False
    syms = list(branch["syms"])[:len(chain)]
    gb = sp.groebner(chain, *syms, order="lex")

    def nf(e):
        return gb.reduce(sp.expand(e))[1]

    for k, cv in enumerate(ctx.crosses()):
        if all(nf(e) == 0 for e in cv):
            continue
        dot, defect = _nf_compose_defect(ctx.Fexpr, ctx.syms, ctx.degree,
                                         cv, ctx.wc, nf)
        if dot == 0:
            return False  # w.v = 0 along the branch: no homology there
        if not defect:
            return True
        if len(chain) == 2 and _gpoly(chain[0], syms[0]).degree() >= 2:
            # composite chain? refine: common roots of the chain and all
            # verification polynomials over the extension field
            s2, s1 = branch["syms"]
            _vv, _dot, vpolys = ctx.vdata(k)
            h = _modf_gcd([chain[0]] + list(vpolys), chain[1], s1, s2)
            if h != 0 and _gpoly(h, s2).degree() >= 1:
                gb2 = sp.groebner([h, chain[1]], s2, s1, order="lex")

                def nf2(e):
                    return gb2.reduce(sp.expand(e))[1]

                if not all(nf2(e) == 0 for e in cv) and nf2(_dot) != 0:
                    return True
        return False
    raise SymmetryError("rank-deficient polar system over an extension field",
                        "degenerate")


def _kernel_family_candidates(Fexpr, syms, degree, Msub, wfull):
    """Fixed Gaussian w with kernel dimension >= 2: solve for the center v
    inside the kernel.  Returns (list of exact centers v, irrational_flag,
    continuum_flag)."""
    ker = Msub.nullspace()
    if len(ker) == 1:
        return [ker[0]], False, False
    if len(ker) == 0:
        return [], False, False
    if len(ker) == 3:
        raise SymmetryError("polar condition degenerates for every center", "degenerate")
    k1, k2 = ker[0], ker[1]
    l1, l2 = sp.symbols("_l1 _l2")
    v = l1 * k1 + l2 * k2
    w = sp.Matrix(wfull)
    dot = _pexp((w.T * v)[0])
    B = 2 * v * w.T - dot * sp.eye(3)
    comp = _compose_rows(Fexpr, B.tolist(), syms)
    diff = sp.expand(comp - dot ** degree * Fexpr)
    vpolys = [_pexp(c) for c in sp.Poly(diff, *syms).coeffs()]
    vpolys = [p for p in vpolys if p != 0]
    if not vpolys:
        return [], False, True  # the whole pencil of centers preserves F
    g = _gpoly(vpolys[0], l1, l2)
    for p in vpolys[1:]:
        g = g.gcd(_gpoly(p, l1, l2))
    if g.total_degree() == 0:
        return [], False, False
    # homogeneous binary gcd: its roots are exactly the common solutions
    out, irrational = [], False
    lam = sp.Dummy("lam")
    dehom = _pexp(g.as_expr().subs({l1: lam, l2: 1}))
    if dehom != 0 and sp.Poly(dehom, lam).degree() >= 1:
        roots, leftovers = gaussian_univariate_roots(dehom, lam)
        for r in roots:
            cand = r * k1 + k2
            if (w.T * cand)[0] != 0:
                out.append(cand)
        d2 = _pexp(dot.subs({l1: lam, l2: 1}))
        for fac in leftovers:
            # fac irreducible: dot is either 0 at all of its roots or none
            if sp.rem(_gpoly(d2, lam), _gpoly(fac, lam)).is_zero:
                continue
            irrational = True
    if _pexp(g.as_expr().subs({l1: 1, l2: 0})) == 0:
        cand = k1
        if (w.T * cand)[0] != 0:
            out.append(cand)
    return out, irrational, False


def _pick_cross(ctx, reduce_fn):
    for k, cv in enumerate(ctx.crosses()):
        if not all(reduce_fn(e) == 0 for e in cv):
            return k
    return None


def _component_candidates(ctx, comp):
    """Candidate w values on a positive-dimensional component of the minor
    variety (comp None = the whole chart).  Returns (exact w tuples,
    branches, extra).  Raises on genuine continua."""
    free = ctx.free
    if comp is None:
        reduce_fn = _pexp
    else:
        gbc = sp.groebner([comp], *free, order="lex")

        def reduce_fn(e):
            return gbc.reduce(sp.expand(e))[1]

    k = _pick_cross(ctx, reduce_fn)
    if k is None:
        raise SymmetryError("polar system rank-deficient along a whole component",
                            "degenerate")
    vvec = ctx.crosses()[k]
    dot, vred = _nf_compose_defect(ctx.Fexpr, ctx.syms, ctx.degree,
                                   vvec, ctx.wc, reduce_fn)
    if dot == 0:
        return [], [], 0  # kernel exists but w.v = 0: no homologies here
    if not vred:
        raise SymmetryError("a continuum of reflections preserves the curve",
                            "continuum")
    extra = 0
    if len(free) == 0:
        return [], [], 0
    if len(free) == 1:
        exact, branches, allz = _uni_candidates(vred, free[0])
        if allz:
            raise SymmetryError("a continuum of reflections preserves the curve",
                                "continuum")
        return exact, branches, extra
    system = ([comp] if comp is not None else []) + vred
    exact, branches, comps2 = _biv_candidates(system, *free)
    for c2 in comps2:
        if c2 is None:
            raise SymmetryError("a continuum of reflections preserves the curve",
                                "continuum")
        gb2 = sp.groebner([c2], *free, order="lex")

        def red2(e):
            return gb2.reduce(sp.expand(e))[1]

        if all(red2(e) == 0 for e in vvec):
            raise SymmetryError("polar system rank-deficient along a whole component",
                                "degenerate")
        if red2(dot) == 0:
            continue  # tangency locus, not homologies
        raise SymmetryError("a continuum of reflections preserves the curve",
                            "continuum")
    return exact, branches, extra


def _find_homologies(Fexpr, syms, degree):
    """All harmonic homologies A (det 1) with F o A = F, as (v, w) pairs.

    Returns (exact_list, extra_count); extra_count > 0 signals verified
    non-Gaussian symmetries (each such branch carries at least two Galois
    conjugates).  Raises SymmetryError for continuum/degenerate cases.
    """
    Gexpr = Fexpr if degree % 2 == 0 else sp.expand(Fexpr ** 2)
    w1, w2 = sp.symbols("_w1 _w2")
    found = []
    extra = 0
    for i in range(3):
        wc = [sp.Integer(0)] * 3
        wc[i] = sp.Integer(1)
        free = []
        for j in range(i + 1, 3):
            wc[j] = (w1, w2)[len(free)]
            free.append(wc[j])
        Mt = _restriction_matrix(Gexpr, syms, wc)
        ctx = _ChartContext(Fexpr, syms, degree, wc, free, Mt)
        minors3 = _minors(Mt, 3) if Mt.rows >= 3 else []
        exact, branches, comps = [], [], []
        if len(free) == 0:
            if Mt.rank() <= 2:
                exact = [()]
        elif not minors3:
            comps = [None]  # rank drops on the whole chart
        elif len(free) == 1:
            exact, branches, allz = _uni_candidates(minors3, free[0])
            if allz:
                comps = [None]
        else:
            exact, branches, comps = _biv_candidates(minors3, *free)
        if comps:
            # candidate components need the kernel to stay 1-dimensional;
            # points where the rank drops to <= 1 are handled separately
            rank1 = _minors(Mt, 2)
            if free:
                if len(free) == 1:
                    e1, b1, az = _uni_candidates(rank1, free[0])
                    if az or b1:
                        raise SymmetryError("rank-1 locus of the polar system is "
                                            "not a finite Gaussian set", "degenerate")
                else:
                    e1, b1, c1 = _biv_candidates(rank1, *free)
                    if b1 or c1:
                        raise SymmetryError("rank-1 locus of the polar system is "
                                            "not a finite Gaussian set", "degenerate")
                exact.extend(e1)
            for comp in comps:
                e2, b2, x2 = _component_candidates(ctx, comp)
                exact.extend(e2)
                branches.extend(b2)
                extra += x2
        seen_w = set()
        for vals in exact:
            key = tuple(vals)
            if key in seen_w:
                continue
            seen_w.add(key)
            subs = dict(zip(free, vals))
            wfull = [_pexp(sp.sympify(c).subs(subs)) for c in wc]
            Msub = Mt.subs(subs) if subs else Mt
            Msub = sp.Matrix(Msub.rows, Msub.cols, [_pexp(e) for e in Msub])
            centers, irr, cont = _kernel_family_candidates(Fexpr, syms, degree,
                                                           Msub, wfull)
            if cont:
                raise SymmetryError("a continuum of reflections preserves the curve",
                                    "continuum")
            if irr:
                extra += 2
            for vv in centers:
                if _is_exact_symmetry(Fexpr, vv, wfull, syms, degree):
                    found.append((vv, sp.Matrix(wfull)))
        for branch in branches:
            if _verify_branch(ctx, branch):
                extra += 2
    return found, extra


def _normalize_form(F: MPoly):
    if F.is_zero():
        raise CalibrationError("zero polynomial has no symmetry problem")
    F.assert_form()
    if len(F.vars) != 3:
        raise CalibrationError("expected a ternary form")
    syms = _syms(F.vars)
    return _integerized(F.as_expr(), syms), syms, F.total_degree()


def find_symmetry(F: MPoly, method="auto") -> Reflection:
    """The unique projective reflection preserving the curve F = 0.

    Raises SymmetryError("... not uniquely solvable", kind in {'none',
    'multiple', 'continuum', 'degenerate'}) otherwise.  The identity always
    solves the literal system and is excluded from the count.
    """
    Fexpr, syms, degree = _normalize_form(F)
    if method == "direct":
        return _find_symmetry_direct(Fexpr, syms, F)
    found, extra = _find_homologies(Fexpr, syms, degree)
    # dedupe (v, w) pairs giving the same matrix
    mats = []
    for v, w in found:
        A = _homology_matrix(v, w)
        if A not in mats:
            mats.append(A)
    total = len(mats) + extra
    if total == 0:
        raise SymmetryError("no projective reflection preserves the curve", "none")
    if total > 1:
        raise SymmetryError("%d reflections preserve the curve" % total, "multiple")
    return Reflection(ProjMap(mats[0], involution=True), source=F)


def _find_symmetry_direct(Fexpr, syms, F):
    """Literal system: coefficients of F - F o phi_A with A^2 = I, det A = 1.
    Only usable for small inputs; kept as an independent cross-check."""
    A = sp.Matrix(3, 3, sp.symbols("_a0:9"))
    comp = compose_linear_expr(Fexpr, A, syms)
    eqs = [sp.expand(c) for c in sp.Poly(sp.expand(Fexpr - comp), *syms).coeffs()]
    eqs += list(A * A - sp.eye(3))
    eqs += [A.det() - 1]
    unk = list(A)
    gb = sp.groebner([e for e in eqs if e != 0], *unk, order="grevlex")
    if list(gb.exprs) == [sp.Integer(1)]:
        raise SymmetryError("no projective reflection preserves the curve", "none")
    if not gb.is_zero_dimensional:
        raise SymmetryError("a continuum of reflections preserves the curve", "continuum")
    sols = sp.solve(list(gb.exprs), unk, dict=True)
    mats = []
    irrational = 0
    for s in sols:
        vals = [s.get(a, a) for a in unk]
        if any(v.free_symbols for v in vals):
            raise SymmetryError("reflection family not zero-dimensional", "continuum")
        if not all(is_gauss_rational(v) for v in vals):
            irrational += 1
            continue
        M = sp.Matrix(3, 3, vals)
        if M == sp.eye(3):
            continue
        mats.append(M)
    total = len(mats) + irrational
    if total == 0:
        raise SymmetryError("no projective reflection preserves the curve", "none")
    if total > 1:
        raise SymmetryError("%d reflections preserve the curve" % total, "multiple")
    return Reflection(ProjMap(mats[0], involution=True), source=F)


# ---------------------------------------------------------------------------
# invariant conic spaces, squares, revolution
# ---------------------------------------------------------------------------

CONIC_BASIS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


def _conic_from_coeffs(coeffs):
    M = sp.zeros(3, 3)
    for c, (i, j) in zip(coeffs, CONIC_BASIS):
        if i == j:
            M[i, j] = c
        else:
            M[i, j] = M[j, i] = c / 2
    return M


def _invariance_constraints(A):
    """Linear conditions on the 6 conic coefficients for A^T C A = C."""
    cs = sp.symbols("_c0:6")
    C = _conic_from_coeffs(cs)
    D = sp.expand(A.T * C * A - C)
    rows = []
    for i, j in CONIC_BASIS:
        e = sp.expand(D[i, j])
        row = [sp.diff(e, c) for c in cs]
        if any(r != 0 for r in row):
            rows.append(row)
    return sp.Matrix(rows)


def invariant_conic_space(s: Reflection, vars=("x", "y", "z")):
    """Basis of the 4-dimensional space of quadratic forms invariant under
    the reflection."""
    A = sp.Matrix(s.map.mat)
    M = _invariance_constraints(A)
    ker = M.nullspace() if M.rows else [sp.eye(6)[:, k] for k in range(6)]
    if len(ker) != 4:
        raise CalibrationError("invariant conic space has dimension %d, expected 4"
                               % len(ker))
    basis = sp.Matrix.hstack(*ker).T.rref()[0]
    syms = _syms(tuple(vars))
    out = []
    for r in range(4):
        coeffs = list(basis[r, :])
        Cm = _conic_from_coeffs(coeffs)
        X = sp.Matrix(syms)
        out.append(MPoly.from_expr(sp.expand((X.T * Cm * X)[0]), tuple(vars)).normalized())
    return out


def absolute_points_from_square(a, b, c, d):
    """Conjugate absolute point pair determined by one square image, plus
    the two real linear constraints it induces on the conic C_E.

    Construction: e = L_ab ^ L_cd, f = L_bc ^ L_ad, L = e v f,
    g = L ^ L_ac; on L, normalize the parameter so e -> 0, g -> 1,
    f -> infinity; the absolute pair sits at parameters +-i (the pi/4 and
    pi/2 angle conditions of the square).
    """
    from .projective import join, meet
    e = meet(join(a, b), join(c, d))
    f = meet(join(b, c), join(a, d))
    g = meet(join(e, f), join(a, c))
    em, fm, gm = e.as_matrix(), f.as_matrix(), g.as_matrix()
    B = sp.Matrix.hstack(em, fm)
    rows = None
    for i in range(3):
        for j in range(i + 1, 3):
            if B[[i, j], :].det() != 0:
                rows = [i, j]
                break
        if rows:
            break
    ab = B[rows, :].solve(gm[rows, :])
    alpha, beta = ab[0], ab[1]
    if alpha == 0 or beta == 0:
        raise CalibrationError("degenerate square image (g on a base point)")
    z = ProjPoint(list(alpha * em + sp.I * beta * fm))
    zbar = z.conjugate()
    constraints = []
    zc = z.coords
    row_re, row_im = [], []
    for (i, j) in CONIC_BASIS:
        val = zc[i] * zc[j] * (1 if i == j else 2)
        re, im = gauss_parts(sp.expand(val))
        row_re.append(re)
        row_im.append(im)
    for row in (row_re, row_im):
        if any(e != 0 for e in row):
            constraints.append(tuple(row))
    return z, zbar, constraints


def _conic_from_constraint_rows(rows, plane="image"):
    M = sp.Matrix([list(r) for r in rows])
    ker = M.nullspace()
    if len(ker) != 1:
        raise CalibrationError(
            "rank deficiency: constraint rank %d leaves a %d-dimensional conic space"
            % (M.rank(), len(ker)))
    C = Conic(_conic_from_coeffs(list(ker[0])), plane=plane)
    if not C.has_no_real_points():
        raise CalibrationError("recovered conic has real points; inputs inconsistent")
    return C


def calibrate_squares(squares) -> Conic:
    """Elliptic absolute from the images of three squares (pairwise
    non-parallel world planes)."""
    squares = list(squares)
    if len(squares) != 3:
        raise CalibrationError("need exactly three square images")
    rows = []
    for quad in squares:
        _z, _zbar, constraints = absolute_points_from_square(*quad)
        rows.extend(constraints)
    return _conic_from_constraint_rows(rows, plane="image")


def calibrate_revolution(inputs) -> Conic:
    """Elliptic absolute from three surface-of-revolution pictures (curve
    forms run through find_symmetry) or directly from three reflections."""
    inputs = list(inputs)
    if len(inputs) != 3:
        raise CalibrationError("need exactly three curves or reflections")
    rows = []
    for item in inputs:
        if isinstance(item, MPoly):
            item = find_symmetry(item)
        if not isinstance(item, Reflection):
            raise CalibrationError("inputs must be curve forms or Reflections")
        M = _invariance_constraints(sp.Matrix(item.map.mat))
        rows.extend([tuple(M[r, :]) for r in range(M.rows)])
    return _conic_from_constraint_rows(rows, plane="image")


# ---------------------------------------------------------------------------
# singular points
# ---------------------------------------------------------------------------

def singular_points(F: MPoly, include_boxes=False):
    """Singular points of a squarefree ternary form: the exact Gaussian
    solutions of F = grad F = 0, conjugate-closed; boxed leftovers on
    request."""
    Fexpr, syms, _deg = _normalize_form(F)
    x, y, z = syms
    grads = [sp.expand(sp.diff(Fexpr, s)) for s in syms]
    pts, boxes = [], []
    # chart z = 1
    gsub = [sp.expand(g.subs(z, 1)) for g in grads]
    sol = solve_bivariate(gsub, x, y)
    if sol.residual:
        raise CalibrationError("singular locus not zero-dimensional: %s" % sol.residual)
    for (x0, y0) in sol.solutions:
        pts.append(ProjPoint([x0, y0, 1]))
    boxes.extend(sol.boxes)
    # chart z = 0, y = 1
    gsub = [sp.expand(g.subs({z: 0, y: 1}, simultaneous=True)) for g in grads]
    nonzero = [g for g in gsub if g != 0]
    if not nonzero:
        raise CalibrationError("singular locus not zero-dimensional at infinity")
    if all(g.free_symbols for g in nonzero):
        sol1 = solve_univariate(nonzero, x)
        if sol1.residual:
            raise CalibrationError("singular locus not zero-dimensional at infinity")
        for (x0,) in sol1.solutions:
            pts.append(ProjPoint([x0, 1, 0]))
        boxes.extend(sol1.boxes)
    # the point (1 : 0 : 0)
    if all(sp.expand(g.subs({x: 1, y: 0, z: 0}, simultaneous=True)) == 0 for g in grads):
        pts.append(ProjPoint([1, 0, 0]))
    if include_boxes:
        return pts, boxes
    return pts


# ---------------------------------------------------------------------------
# torus calibration
# ---------------------------------------------------------------------------

class CandidateSet:
    def __init__(self, candidates, reflection, node_pairs, notes=None):
        self.candidates = list(candidates)  # list of dicts
        self.reflection = reflection
        self.node_pairs = list(node_pairs)
        self.notes = list(notes or [])

    def duals(self):
        return [c["ce_dual"] for c in self.candidates]

    def primals(self):
        return [c["ce"] for c in self.candidates]

    def __repr__(self):
        return "CandidateSet(%d candidates, %d notes)" % (len(self.candidates),
                                                          len(self.notes))


def _canonical_frame(s: Reflection):
    """Integer matrix M with M^-1 A M = diag(1, -1, -1)."""
    A = sp.Matrix(s.map.mat)
    plus = (A - sp.eye(3)).nullspace()
    minus = (A + sp.eye(3)).nullspace()
    if len(plus) != 1 or len(minus) != 2:
        raise CalibrationError("reflection has unexpected eigenstructure")
    cols = [plus[0], minus[0], minus[1]]
    cols = [c * sp.lcm([sp.Integer(sp.fraction(e)[1]) for e in c]) for c in cols]
    cols = [c / sp.gcd([sp.Integer(e) for e in c]) for c in cols]
    return sp.Matrix.hstack(*cols)


def _torus_conditions(Ft_expr, dsyms, nline):
    """S1 and S2 generators in the canonical frame, on the chart a1 = 1."""
    a1, a2, a3, a4 = sp.symbols("a1 a2 a3 a4")
    xb, yb, zb = dsyms
    qfull = MPoly.from_expr(a1 * xb**2 + a2 * yb**2 + a3 * yb * zb + a4 * zb**2,
                            ("xb", "yb", "zb", "a1", "a2", "a3", "a4"))
    s1_poly = line_tangent_to_conic_condition(list(nline), qfull, ("xb", "yb", "zb"))
    s1_expr = sp.expand(s1_poly.as_expr().subs(a1, 1))
    s1re, s1im = sp.Integer(0), sp.Integer(0)
    for monom, coeff in sp.Poly(s1_expr, a2, a3, a4).terms():
        mono = a2 ** monom[0] * a3 ** monom[1] * a4 ** monom[2]
        cre, cim = gauss_parts(coeff)
        s1re += cre * mono
        s1im += cim * mono
    s1_gens = [sp.expand(e) for e in (s1re, s1im) if sp.expand(e) != 0]
    q_expr = xb**2 + a2 * yb**2 + a3 * yb * zb + a4 * zb**2
    res = resultant_expr(Ft_expr, q_expr, zb)
    pvars = ("xb", "yb", "a2", "a3", "a4")
    pm = MPoly.from_expr(res, pvars)
    s2 = perfect_square_conditions(pm, ("xb", "yb"))
    c0 = sp.expand(sp.Poly(res, xb, yb).coeff_monomial(xb ** sp.Poly(res, xb, yb).total_degree()))
    return s1_gens, [g.as_expr() for g in s2.generators], (a2, a3, a4), c0


def _solve_on_linear_factor(gens, f, avars):
    """Solutions of the full system on an irreducible curve f = 0 that is
    linear in a3 or a4: substitute the solved variable and solve the
    remaining bivariate system in (a2, other)."""
    a2, a3, a4 = avars
    for var, other in ((a4, a3), (a3, a4)):
        pf = sp.Poly(f, var)
        if pf.degree() != 1:
            continue
        bco, cco = pf.all_coeffs()
        spec = []
        for g in gens:
            num = sp.fraction(sp.together(g.subs(var, -cco / bco)))[0]
            num = sp.expand(num)
            if num != 0:
                spec.append(num)
        sol = solve_bivariate(spec, a2, other, verify_on=spec)
        out = []
        for (a2v, ov) in sol.solutions:
            bv = sp.expand(bco.subs(other, ov)) if getattr(bco, "free_symbols", None) else bco
            if bv == 0:
                continue
            varv = sp.cancel(-cco.subs(other, ov) / bv) if getattr(cco, "free_symbols", None) \
                else sp.cancel(-cco / bv)
            vals = {a2: a2v, other: ov, var: varv}
            out.append((vals[a2], vals[a3], vals[a4]))
        return out, sol.boxes
    raise CalibrationError("candidate system has a shared component not linear "
                           "in a3 or a4; not handled")


def _solve_torus_system(s1_gens, s2_gens, avars):
    """Solve {S1} u {S2} in (a2, a3, a4) by resultant triangulation."""
    a2, a3, a4 = avars
    gens = list(s1_gens) + list(s2_gens)
    elim = next((g for g in s1_gens if sp.Poly(g, a2).degree() >= 1), None)
    if elim is None:
        elim = next((g for g in gens if sp.Poly(g, a2).degree() >= 1), None)
    if elim is None:
        # no generator involves a2: the system is underdetermined — report
        raise CalibrationError("candidate system degenerates (a2 unconstrained)")
    biv = []
    for g in gens:
        if g == elim:
            continue
        pg = sp.Poly(g, a2)
        if pg.degree() >= 1:
            r = sp.expand(sp.resultant(sp.Poly(elim, a2), pg))
        else:
            r = g
        if r != 0:
            biv.append(r)
    if not biv:
        raise CalibrationError("candidate system degenerates after elimination")
    # the eliminated system may pick up a spurious shared component: split
    # it off and treat it by substitution into the full system
    gcd = sp.Poly(biv[0], a3, a4)
    for b in biv[1:]:
        gcd = gcd.gcd(sp.Poly(b, a3, a4))
    pairs, out, boxes = [], [], []
    if gcd.total_degree() >= 1:
        reduced = []
        for b in biv:
            q = sp.quo(sp.Poly(b, a3, a4), gcd)
            if q.total_degree() >= 1:
                reduced.append(q.as_expr())
        if reduced:
            sol = solve_bivariate(reduced, a3, a4, verify_on=reduced)
            if sol.residual:
                raise CalibrationError("candidate system not zero-dimensional: %s"
                                       % sol.residual)
            pairs.extend(sol.solutions)
            boxes.extend(sol.boxes)
        for f, _m in gcd.factor_list()[1]:
            trips, fboxes = _solve_on_linear_factor(gens, f.as_expr(), avars)
            boxes.extend(fboxes)
            for t in trips:
                if all(sp.expand(g.subs({a2: t[0], a3: t[1], a4: t[2]},
                                        simultaneous=True)) == 0 for g in gens):
                    out.append(t)
    else:
        sol = solve_bivariate(biv, a3, a4, verify_on=biv)
        if sol.residual:
            raise CalibrationError("candidate system not zero-dimensional: %s"
                                   % sol.residual)
        pairs.extend(sol.solutions)
        boxes.extend(sol.boxes)
    for (a3v, a4v) in pairs:
        spec = [sp.expand(g.subs({a3: a3v, a4: a4v}, simultaneous=True)) for g in gens]
        witha2 = [g for g in spec if a2 in g.free_symbols]
        if not witha2:
            continue
        s2sol = solve_univariate(witha2, a2)
        boxes.extend(s2sol.boxes)
        for (a2v,) in s2sol.solutions:
            subs = {a2: a2v, a3: a3v, a4: a4v}
            if all(sp.expand(g.subs(subs, simultaneous=True)) == 0 for g in gens):
                out.append((a2v, a3v, a4v))
    return sorted(set(out), key=str), boxes


def calibrate_torus(Tpic: MPoly, Tdual_pic: MPoly, node=None, prec_bits=128) -> CandidateSet:
    """Torus calibration: dual picture symmetry, invariant conics, node-line
    tangency (S1) and everywhere-tangential resultant conditions (S2);
    candidates filtered by nonzero Hessian and singular-point avoidance."""
    s = find_symmetry(Tdual_pic)
    dsyms = _syms(Tdual_pic.vars)
    notes = []
    # --- node acquisition -------------------------------------------------
    node_pairs = []
    if node is not None:
        if isinstance(node, ProjLine):
            node = ProjPoint(list(node.coords))
        if node.is_real():
            raise CalibrationError("node must be non-real")
        s_img = ProjMap(sp.Matrix(s.map.mat).T, involution=True)
        if s_img.apply(node) == node:
            raise CalibrationError("node is fixed by the reflection; inadmissible")
        node_pairs = [(node, node.conjugate())]
    else:
        if Tpic is None:
            raise CalibrationError("need either the picture or an explicit node")
        s_img = ProjMap(sp.Matrix(s.map.mat).T, involution=True)
        pts, boxes = singular_points(Tpic, include_boxes=True)
        if boxes:
            notes.append("%d non-Gaussian singular points boxed, not used as nodes"
                         % len(boxes))
        seen = set()
        for p in pts:
            if p.is_real():
                continue
            if s_img.apply(p) == p:
                continue
            key = frozenset((p, p.conjugate()))
            if key in seen:
                continue
            seen.add(key)
            node_pairs.append((p, p.conjugate()))
        if not node_pairs:
            raise CalibrationError("no admissible (non-real, non-fixed) node found")
    # --- canonical frame ---------------------------------------------------
    M = _canonical_frame(s)
    Minv = M.inv()
    Ft = sp.expand(compose_linear_expr(Tdual_pic.as_expr(), M, dsyms))
    Ftp = sp.Poly(Ft, *dsyms)
    if any(m[0] % 2 for m in Ftp.monoms()):
        raise CalibrationError("internal: canonical frame is not even in the first variable")
    # singular points of the dual picture, for the avoidance filter
    sing_dual, sing_dual_boxes = singular_points(Tdual_pic, include_boxes=True)
    if sing_dual_boxes:
        notes.append("%d non-Gaussian singular points of the dual picture: "
                     "avoidance checked only against exact ones" % len(sing_dual_boxes))
    candidates = []
    for pair in node_pairs:
        n = pair[0]
        nline = [sp.expand(e) for e in (M.T * n.as_matrix())]
        s1_gens, s2_gens, avars, c0 = _torus_conditions(Ft, dsyms, nline)
        sols, boxes = _solve_torus_system(s1_gens, s2_gens, avars)
        for (a2v, a3v, a4v) in sols:
            hess = 2 * (4 * a2v * a4v - a3v ** 2)
            if hess == 0:
                continue
            if sp.expand(c0.subs(sp.Symbol("a4"), a4v)) == 0:
                notes.append("candidate on the c0 = 0 chart boundary discarded")
                continue
            Qt = sp.Matrix([[1, 0, 0], [0, a2v, a3v / 2], [0, a3v / 2, a4v]])
            Cdual_mat = Minv.T * Qt * Minv
            try:
                ce_dual = Conic(Cdual_mat, plane="dual")
                ce = Conic(sp.Matrix(ce_dual.mat).adjugate(), plane="image")
            except Exception:
                continue
            # singular-point avoidance: candidate must not pass through a
            # singular point of the dual picture
            if any(ce_dual.value(p) == 0 for p in sing_dual):
                continue
            # validity: the resultant of the dual picture and the candidate
            # must be a perfect square (checked, not assumed)
            qmat = ce_dual.mat
            X = sp.Matrix(dsyms)
            qx = sp.expand((X.T * qmat * X)[0])
            res = sp.expand(sp.resultant(sp.Poly(Tdual_pic.as_expr(), dsyms[2]),
                                         sp.Poly(qx, dsyms[2])))
            sq = perfect_square_root_expr(res, dsyms[:2])
            if sq is None:
                continue
            is_real = all(gauss_parts(e)[1] == 0 for e in ce_dual.mat)
            cand = {
                "ce_dual": ce_dual,
                "ce": ce,
                "exact": True,
                "diagnostics": {
                    "hessian": hess,
                    "singular_avoidance": "passed-exact" + ("" if not sing_dual_boxes
                                                            else "-only"),
                    "perfect_square": True,
                    "real": is_real,
                    "definite": ce_dual.has_no_real_points() if is_real else None,
                },
                "node_pair": pair,
            }
            if cand not in candidates:
                candidates.append(cand)
        for b in boxes:
            notes.append("boxed (non-Gaussian) candidate branch: %s" % b)
    candidates.sort(key=lambda c: str(c["ce_dual"].mat.tolist()))
    return CandidateSet(candidates, s, node_pairs, notes)
