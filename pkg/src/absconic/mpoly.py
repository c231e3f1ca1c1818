"""Sparse multivariate polynomials over the Gaussian rationals.

``MPoly`` is an immutable wrapper pairing an ordered variable list with a
sparse term map {exponent vector: Gaussian-rational coefficient}.  All the
heavy algebra is delegated to sympy; this class pins down the things sympy
leaves floating: a fixed variable order, a canonical normalization (so that
"equal up to scale" becomes literal equality) and an exact text format.
"""

import json

import sympy as sp

from .scalars import ScalarError, gauss_parts, scalar_from_obj, scalar_to_obj


class MPolyError(ValueError):
    pass


def _syms(names):
    return tuple(sp.Symbol(n) for n in names)


class MPoly:
    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms):
        vars = tuple(str(v) for v in vars)
        clean = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(vars):
                raise MPolyError("exponent vector %r does not match variables %r" % (exps, vars))
            if any(e < 0 for e in exps):
                raise MPolyError("negative exponent in %r" % (exps,))
            c = sp.expand(sp.sympify(c))
            gauss_parts(c)  # raises if not a Gaussian rational
            if c != 0:
                clean[exps] = clean.get(exps, 0) + c
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c != 0})

    def __setattr__(self, *a):
        raise AttributeError("MPoly is immutable")

    # -- construction -------------------------------------------------

    @classmethod
    def from_expr(cls, expr, vars):
        syms = _syms(vars)
        poly = sp.Poly(sp.expand(sp.sympify(expr)), *syms, domain="QQ_I")
        return cls(vars, dict(poly.terms()))

    def as_expr(self):
        syms = _syms(self.vars)
        out = sp.Integer(0)
        for exps, c in self.terms.items():
            mon = sp.Integer(1)
            for s, e in zip(syms, exps):
                mon *= s**e
            out += c * mon
        return sp.expand(out)

    def as_poly(self):
        return sp.Poly(self.as_expr(), *_syms(self.vars), domain="QQ_I")

    # -- basic queries -------------------------------------------------

    def is_zero(self):
        return not self.terms

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, var):
        if var not in self.vars:
            raise MPolyError("unknown variable %r" % var)
        i = self.vars.index(var)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def is_homogeneous(self):
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def assert_form(self):
        if not self.is_homogeneous():
            raise MPolyError("polynomial is not homogeneous")
        return self

    def coeff(self, exps):
        return self.terms.get(tuple(exps), sp.Integer(0))

    # -- normalization -------------------------------------------------

    def normalized(self):
        """Canonical representative of the scale class: content 1, and the
        coefficient of the lexicographically-first monomial has positive
        real part (positive imaginary part if the real part is zero)."""
        if not self.terms:
            return self
        nums = []
        dens = []
        for c in self.terms.values():
            re, im = gauss_parts(c)
            for r in (re, im):
                if r != 0:
                    nums.append(abs(sp.Integer(r.p)))
                    dens.append(sp.Integer(r.q))
        scale = sp.lcm(dens) / sp.gcd(nums)
        lead = self.terms[max(self.terms)]
        re, im = gauss_parts(lead)
        if (re != 0 and re < 0) or (re == 0 and im < 0):
            scale = -scale
        return MPoly(self.vars, {e: c * scale for e, c in self.terms.items()})

    def same_up_to_scale(self, other):
        return self.normalized() == other.normalized()

    # -- arithmetic (only what the pipelines need) ----------------------

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise MPolyError("variable mismatch: %r vs %r" % (self.vars, other.vars))
            return other
        return MPoly.from_expr(other, self.vars)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return MPoly(self.vars, terms)

    def __sub__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) - c
        return MPoly(self.vars, terms)

    def __neg__(self):
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = sp.sympify(other)
            return MPoly(self.vars, {e: k * c for e, k in self.terms.items()})
        other = self._coerce(other)
        return MPoly.from_expr(self.as_expr() * other.as_expr(), self.vars)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self):
        return "MPoly(%s)" % (self.as_expr(),)

    # -- serialization ---------------------------------------------------

    def to_obj(self):
        terms = []
        for exps in sorted(self.terms, reverse=True):
            terms.append({"coeff": scalar_to_obj(self.terms[exps]), "exps": list(exps)})
        return {"vars": list(self.vars), "terms": terms}

    @classmethod
    def from_obj(cls, obj):
        try:
            vars = obj["vars"]
            terms = {tuple(t["exps"]): scalar_from_obj(t["coeff"]) for t in obj["terms"]}
        except (KeyError, TypeError, ScalarError) as exc:
            raise MPolyError("malformed polynomial document: %s" % exc)
        return cls(vars, terms)

    def dumps(self):
        return json.dumps(self.to_obj(), indent=1)

    @classmethod
    def loads(cls, text):
        return cls.from_obj(json.loads(text))
