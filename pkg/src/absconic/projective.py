"""Projective plane over the Gaussian rationals: points, lines, conics,
maps, cross ratio, elliptic distance, duality, tangency and reflections.

Frozen conventions, documented once here:

* cross_ratio(p, q; a, b) is normalized so that points with line parameters
  0, 1, lambda, infinity give lambda.
* elliptic_distance uses the modulus-1 pairing t/conj(t) of the two line
  parameters where the line meets the conic; the arc value r is taken in
  [-pi, pi) and d = |r|/2.  (The exactly Moebius-invariant quantity with
  |.| = 1 is this pairing, not the 0/1/lambda cross ratio itself; the two
  are related by cr -> cr/(cr-1).)
* Points map by  p -> M p;  lines by  l -> M^-T l;  conic matrices by
  C -> M^-T C M^-1.
"""

import os

import mpmath
import sympy as sp

from .mpoly import MPoly, _syms
from .scalars import gauss_parts, scalar_from_obj, scalar_to_obj


DEFAULT_PRECISION_BITS = 128


def precision_bits(override=None):
    if override is not None:
        return int(override)
    env = os.environ.get("ABSCONIC_PRECISION")
    return int(env) if env else DEFAULT_PRECISION_BITS


class ProjectiveError(ValueError):
    pass


# ---------------------------------------------------------------------------
# canonical normalization of coordinate vectors / matrices
# ---------------------------------------------------------------------------

def _normalize_entries(entries):
    entries = [sp.expand(sp.sympify(e)) for e in entries]
    if all(e == 0 for e in entries):
        raise ProjectiveError("zero vector is not a projective object")
    # canonical representative under *Gaussian* rescaling: divide by the
    # first nonzero entry (kills units like i), then clear denominators
    lead = next(e for e in entries if e != 0)
    lre, lim = gauss_parts(lead)
    if lim != 0:
        conj = lre - lim * sp.I
        norm2 = lre * lre + lim * lim
        entries = [sp.expand(e * conj / norm2) for e in entries]
    nums, dens = [], []
    for e in entries:
        re, im = gauss_parts(e)
        for r in (re, im):
            if r != 0:
                nums.append(abs(sp.Integer(r.p)))
                dens.append(sp.Integer(r.q))
    scale = sp.lcm(dens) / sp.gcd(nums)
    for e in entries:
        if e != 0:
            re, im = gauss_parts(e)
            if (re != 0 and re < 0) or (re == 0 and im < 0):
                scale = -scale
            break
    return [sp.expand(e * scale) for e in entries]


class _HomogVec:
    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = list(coords)
        if len(coords) != 3:
            raise ProjectiveError("expected 3 homogeneous coordinates")
        object.__setattr__(self, "coords", tuple(_normalize_entries(coords)))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def as_matrix(self):
        return sp.Matrix(3, 1, list(self.coords))

    def conjugate(self):
        return type(self)([gauss_parts(c)[0] - gauss_parts(c)[1] * sp.I
                           for c in self.coords])

    def is_real(self):
        return all(gauss_parts(c)[1] == 0 for c in self.coords)

    def __eq__(self, other):
        return type(self) is type(other) and self.coords == other.coords

    def __hash__(self):
        return hash((type(self).__name__, self.coords))

    def __repr__(self):
        return "%s(%s : %s : %s)" % ((type(self).__name__,) + self.coords)

    def to_obj(self):
        return [scalar_to_obj(c) for c in self.coords]

    @classmethod
    def from_obj(cls, obj):
        return cls([scalar_from_obj(c) for c in obj])


class ProjPoint(_HomogVec):
    pass


class ProjLine(_HomogVec):
    def contains(self, p: ProjPoint):
        return sum(a * b for a, b in zip(self.coords, p.coords)) == 0


def join(p: ProjPoint, q: ProjPoint) -> ProjLine:
    return ProjLine(list(p.as_matrix().cross(q.as_matrix())))


def meet(l: ProjLine, m: ProjLine) -> ProjPoint:
    return ProjPoint(list(l.as_matrix().cross(m.as_matrix())))


# ---------------------------------------------------------------------------
# conics
# ---------------------------------------------------------------------------

class Conic:
    __slots__ = ("mat", "plane")

    def __init__(self, mat, plane="image"):
        M = sp.Matrix(mat)
        if M.shape != (3, 3) or M.T != M:
            raise ProjectiveError("conic needs a symmetric 3x3 matrix")
        if plane not in ("image", "dual"):
            raise ProjectiveError("plane marker must be 'image' or 'dual'")
        flat = _normalize_entries(list(M))
        object.__setattr__(self, "mat", sp.ImmutableMatrix(3, 3, flat))
        object.__setattr__(self, "plane", plane)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @classmethod
    def from_form(cls, expr, vars, plane="image"):
        syms = _syms(tuple(vars))
        M = sp.Matrix(3, 3, lambda i, j: sp.diff(expr, syms[i], syms[j]) / 2)
        return cls(M, plane)

    def form(self, vars=("x", "y", "z")) -> MPoly:
        syms = _syms(tuple(vars))
        X = sp.Matrix(syms)
        return MPoly.from_expr(sp.expand((X.T * self.mat * X)[0]), tuple(vars))

    def value(self, p: ProjPoint):
        v = p.as_matrix()
        return sp.expand((v.T * self.mat * v)[0])

    def is_irreducible(self):
        return self.mat.det() != 0

    def has_no_real_points(self):
        """Definiteness of the real symmetric matrix via leading principal
        minors (only meaningful for real-coefficient conics)."""
        M = self.mat
        if any(gauss_parts(e)[1] != 0 for e in M):
            raise ProjectiveError("realness test needs a real conic")
        d1 = M[0, 0]
        d2 = (M[:2, :2]).det()
        d3 = M.det()
        return (d1 > 0 and d2 > 0 and d3 > 0) or (d1 < 0 and d2 > 0 and d3 < 0)

    def dual(self):
        if self.mat.det() == 0:
            raise ProjectiveError("singular conic has no dual")
        other = "dual" if self.plane == "image" else "image"
        return Conic(self.mat.adjugate(), other)

    def __eq__(self, other):
        return isinstance(other, Conic) and self.mat == other.mat and self.plane == other.plane

    def __hash__(self):
        return hash((tuple(self.mat), self.plane))

    def __repr__(self):
        return "Conic(%s, %s)" % (self.mat.tolist(), self.plane)

    def to_obj(self):
        return {"plane": self.plane,
                "matrix": [[scalar_to_obj(self.mat[i, j]) for j in range(3)]
                           for i in range(3)]}

    @classmethod
    def from_obj(cls, obj):
        return cls([[scalar_from_obj(c) for c in row] for row in obj["matrix"]],
                   obj.get("plane", "image"))


def conic_dual(C: Conic) -> Conic:
    return C.dual()


# ---------------------------------------------------------------------------
# projective maps
# ---------------------------------------------------------------------------

class ProjMap:
    __slots__ = ("mat", "involution")

    def __init__(self, mat, involution=False):
        M = sp.Matrix(mat)
        if M.shape != (3, 3):
            raise ProjectiveError("ProjMap needs a 3x3 matrix")
        if M.det() == 0:
            raise ProjectiveError("ProjMap must be invertible")
        flat = _normalize_entries(list(M))
        M = sp.ImmutableMatrix(3, 3, flat)
        if involution:
            M = _involution_det1(M)
        object.__setattr__(self, "mat", M)
        object.__setattr__(self, "involution", involution)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def apply(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(list(self.mat * p.as_matrix()))

    def apply_line(self, l: ProjLine) -> ProjLine:
        return ProjLine(list(self.mat.inv().T * l.as_matrix()))

    def apply_conic(self, C: Conic) -> Conic:
        Mi = self.mat.inv()
        return Conic(Mi.T * C.mat * Mi, C.plane)

    def inverse(self):
        return ProjMap(self.mat.inv(), self.involution)

    def compose(self, other):
        return ProjMap(self.mat * other.mat)

    def __eq__(self, other):
        return isinstance(other, ProjMap) and self.mat == other.mat

    def __hash__(self):
        return hash(tuple(self.mat))

    def __repr__(self):
        return "ProjMap(%s)" % (self.mat.tolist(),)

    def to_obj(self):
        return {"matrix": [[scalar_to_obj(self.mat[i, j]) for j in range(3)]
                           for i in range(3)],
                "involution": self.involution}

    @classmethod
    def from_obj(cls, obj):
        return cls([[scalar_from_obj(c) for c in row] for row in obj["matrix"]],
                   obj.get("involution", False))


def _involution_det1(M):
    """Check A^2 = lambda*I and rescale to the det(A) = 1 representative."""
    sq = M * M
    lam = sq[0, 0]
    if lam == 0 or sq != lam * sp.eye(3):
        raise ProjectiveError("matrix is not a projective involution")
    # want (cM)^2 = I and det(cM) = 1:  c^2 lam = 1, c^3 det = 1
    c = lam / M.det()
    A = c * M
    if A * A != sp.eye(3) or A.det() != 1:
        raise ProjectiveError("involution cannot be normalized to A^2=I, det A=1")
    return sp.ImmutableMatrix(A)


# ---------------------------------------------------------------------------
# cross ratio and elliptic distance
# ---------------------------------------------------------------------------

def _line_coordinates(points):
    """2d coordinates of collinear points in a basis of their common line."""
    mats = [p.as_matrix() for p in points]
    base = sp.Matrix.hstack(*mats)
    if base.rank() != 2:
        raise ProjectiveError("points are not collinear (or all coincide)")
    u = mats[0]
    v = next((m for m in mats[1:] if sp.Matrix.hstack(u, m).rank() == 2), None)
    B = sp.Matrix.hstack(u, v)
    rows = None
    for i in range(3):
        for j in range(i + 1, 3):
            if B[[i, j], :].det() != 0:
                rows = (i, j)
                break
        if rows:
            break
    Bsub = B[list(rows), :]
    out = []
    for m in mats:
        out.append(Bsub.solve(m[list(rows), :]))
    return out


def cross_ratio(p, q, a, b):
    """Cross ratio with the frozen 0,1,lambda,infinity -> lambda convention:
    cr = (det(a,p) det(q,b)) / (det(a,b) det(q,p))."""
    for s, t in ((p, q), (p, a), (p, b), (q, a), (q, b), (a, b)):
        if s == t:
            raise ProjectiveError("cross ratio needs pairwise distinct points")
    cp, cq, ca, cb = _line_coordinates([p, q, a, b])
    d = lambda u, v: (u[0] * v[1] - u[1] * v[0])
    den = d(ca, cb) * d(cq, cp)
    if den == 0:
        raise ProjectiveError("degenerate cross ratio configuration")
    return sp.expand(sp.cancel(d(ca, cp) * d(cq, cb) / den))


def intersect_line_conic_params(p: ProjPoint, q: ProjPoint, C: Conic):
    """The line through p, q meets C at parameters t with
    alpha + 2 beta t + gamma t^2 = 0 for the point p + t q."""
    vp, vq = p.as_matrix(), q.as_matrix()
    alpha = sp.expand((vp.T * C.mat * vp)[0])
    beta = sp.expand((vp.T * C.mat * vq)[0])
    gamma = sp.expand((vq.T * C.mat * vq)[0])
    return alpha, beta, gamma


def elliptic_distance(p: ProjPoint, q: ProjPoint, C: Conic, prec_bits=None):
    """Elliptic distance d(p,q) = |r|/2 with r in [-pi, pi) the argument of
    the modulus-1 pairing of p, q against the conjugate intersection pair.

    The exact kernel produces the rational quadratic; only the final
    transcendental step runs in mpmath at the configured precision.
    """
    if not (p.is_real() and q.is_real()):
        raise ProjectiveError("elliptic distance expects real points")
    if not C.has_no_real_points():
        raise ProjectiveError("conic has real points; elliptic distance undefined")
    if p == q:
        return mpmath.mpf(0)
    bits = precision_bits(prec_bits)
    alpha, beta, gamma = intersect_line_conic_params(p, q, C)
    disc = sp.expand(beta * beta - alpha * gamma)
    if disc >= 0:
        raise ProjectiveError("line meets the conic in real points; not elliptic")
    with mpmath.workprec(bits):
        s = mpmath.sqrt(mpmath.mpf(sp.Integer((-disc).p)) / mpmath.mpf(sp.Integer((-disc).q)))
        t = mpmath.mpc(-mpmath.mpf(beta.p) / mpmath.mpf(beta.q) if beta != 0 else 0, s)
        t = t / (mpmath.mpf(gamma.p) / mpmath.mpf(gamma.q))
        pairing = t / mpmath.conj(t)
        r = mpmath.arg(pairing)  # in (-pi, pi]
        if r == mpmath.pi:
            r = -r  # frozen branch: r taken in [-pi, pi)
        return abs(r) / 2


# ---------------------------------------------------------------------------
# tangency condition
# ---------------------------------------------------------------------------

def line_tangent_to_conic_condition(L, Q: MPoly, form_vars) -> MPoly:
    """Discriminant of the symbolic conic Q restricted to the line L.

    L: a ProjLine or coordinate triple (possibly non-real).  Q: a quadratic
    form in form_vars whose other variables are free parameters.  The line
    is parametrized through the frozen chart-point choice (first nonzero
    coordinate i; points e_j*l_i - e_i*l_j for j != i); the result is the
    canonically normalized binary discriminant.
    """
    if isinstance(L, ProjLine):
        l = list(L.coords)
    else:
        l = _normalize_entries(list(L))
    form_vars = tuple(str(v) for v in form_vars)
    syms = _syms(form_vars)
    i = next(k for k in range(3) if l[k] != 0)
    pts = []
    for j in range(3):
        if j == i:
            continue
        pt = [sp.Integer(0)] * 3
        pt[j] = l[i]
        pt[i] = -l[j]
        pts.append(pt)
    s_, t_ = sp.Dummy("s"), sp.Dummy("t")
    image = {syms[k]: s_ * pts[0][k] + t_ * pts[1][k] for k in range(3)}
    restr = sp.expand(Q.as_expr().subs(image, simultaneous=True))
    pr = sp.Poly(restr, s_, t_)
    a = pr.coeff_monomial(s_ ** 2)
    b = pr.coeff_monomial(s_ * t_)
    c = pr.coeff_monomial(t_ ** 2)
    cond = sp.expand(b * b - 4 * a * c)
    params = tuple(v for v in Q.vars if v not in form_vars)
    out = MPoly.from_expr(cond, params if params else Q.vars)
    return out.normalized() if not out.is_zero() else out


# ---------------------------------------------------------------------------
# maps from point pairs, fixed elements of reflections
# ---------------------------------------------------------------------------

def _frame_map(points):
    """Matrix sending the standard frame e1,e2,e3,(1,1,1) to the 4 points."""
    p1, p2, p3, p4 = [p.as_matrix() for p in points]
    B = sp.Matrix.hstack(p1, p2, p3)
    if B.det() == 0:
        raise ProjectiveError("three of the points are collinear")
    c = B.solve(p4)
    if any(ci == 0 for ci in c):
        raise ProjectiveError("three of the points are collinear")
    return sp.Matrix.hstack(c[0] * p1, c[1] * p2, c[2] * p3)


def map_from_point_pairs(pairs) -> ProjMap:
    pairs = list(pairs)
    if len(pairs) != 4:
        raise ProjectiveError("need exactly four preimage/image pairs")
    pre = _frame_map([a for a, _ in pairs])
    post = _frame_map([b for _, b in pairs])
    return ProjMap(post * pre.inv())


def reflection_fixed_elements(s: ProjMap):
    """Fixed line and isolated fixed point of a projective reflection."""
    A = _involution_det1(s.mat)
    plus = (A - sp.eye(3)).nullspace()
    minus = (A + sp.eye(3)).nullspace()
    spaces = {len(plus): plus, len(minus): minus}
    if set(spaces) != {1, 2}:
        raise ProjectiveError("not a reflection (eigenspace dimensions %s)"
                              % sorted([len(plus), len(minus)]))
    point = ProjPoint(list(spaces[1][0]))
    u, v = spaces[2]
    line = ProjLine(list(sp.Matrix(u).cross(sp.Matrix(v))))
    return line, point
