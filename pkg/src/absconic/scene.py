"""Synthetic ground truth: tori and their duals, central projection,
pictures (critical-value curves), dual pictures (plane sections of the dual
surface), the elliptic absolute of a camera, node pairs, and square scenes.

Coordinate conventions: world coordinates (x, y, z, w) with the infinite
plane w = 0; image coordinates (x, y, z); dual image coordinates
(xb, yb, zb).  A pose acts on world points as X -> pose*X, so the implicit
form transforms by substituting pose^-1 and the dual form by substituting
pose^T.  A camera is a rank-3 3x4 matrix; its center is the kernel.
"""

import sympy as sp

from .algebra import discriminant_expr
from .mpoly import MPoly, _syms
from .projective import Conic, ProjPoint, ProjectiveError
from .scalars import gauss_parts, rat

WORLD_VARS = ("x", "y", "z", "w")
IMAGE_VARS = ("x", "y", "z")
DUAL_VARS = ("xb", "yb", "zb")
DUAL_WORLD_VARS = ("xb", "yb", "zb", "wb")


class SceneError(ValueError):
    pass


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------

class TorusSpec:
    __slots__ = ("a", "b", "pose")

    def __init__(self, a, b, pose=None):
        a, b = rat(a), rat(b)
        if a <= 0 or b <= 0:
            raise SceneError("torus parameters need a > 0 and b > 0 (got a=%s, b=%s)" % (a, b))
        pose = sp.ImmutableMatrix(pose) if pose is not None else sp.ImmutableMatrix(sp.eye(4))
        if pose.shape != (4, 4) or pose.det() == 0:
            raise SceneError("pose must be an invertible 4x4 matrix")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "pose", pose)

    def __setattr__(self, *a):
        raise AttributeError("immutable")


class CameraSpec:
    __slots__ = ("projection",)

    def __init__(self, projection):
        P = sp.ImmutableMatrix(projection)
        if P.shape != (3, 4) or P.rank() != 3:
            raise SceneError("camera must be a rank-3 3x4 matrix")
        object.__setattr__(self, "projection", P)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def center(self):
        ker = sp.Matrix(self.projection).nullspace()
        return sp.ImmutableMatrix(ker[0])

    def normalizing_h(self):
        """Invertible 4x4 H with P*H = [I | 0] (world-coordinate change that
        puts the camera into canonical position, center (0:0:0:1))."""
        P = sp.Matrix(self.projection)
        for k in (3, 2, 1, 0):
            row = sp.zeros(1, 4)
            row[0, k] = 1
            stacked = sp.Matrix.vstack(P, row)
            if stacked.det() != 0:
                return sp.ImmutableMatrix(stacked.inv())
        raise SceneError("camera rows cannot be completed to a basis")


def canonical_camera() -> CameraSpec:
    return CameraSpec(sp.Matrix.hstack(sp.eye(3), sp.zeros(3, 1)))


def cayley_rotation(p, q, r):
    """Rational rotation from a Cayley parameter triple."""
    p, q, r = rat(p), rat(q), rat(r)
    S = sp.Matrix([[0, -r, q], [r, 0, -p], [-q, p, 0]])
    return (sp.eye(3) - S).inv() * (sp.eye(3) + S)


def rigid_pose(cayley_params, translation):
    R = cayley_rotation(*cayley_params)
    t = sp.Matrix([rat(v) for v in translation])
    return sp.Matrix.vstack(sp.Matrix.hstack(R, t), sp.Matrix([[0, 0, 0, 1]]))


# ---------------------------------------------------------------------------
# torus forms
# ---------------------------------------------------------------------------

def torus_implicit(spec: TorusSpec) -> MPoly:
    x, y, z, w = _syms(WORLD_VARS)
    base = (x**2 + y**2 + z**2 + spec.a * w**2) ** 2 - spec.b * (x**2 + y**2) * w**2
    img = sp.Matrix(spec.pose).inv() * sp.Matrix([x, y, z, w])
    expr = sp.expand(base.subs({x: img[0], y: img[1], z: img[2], w: img[3]},
                               simultaneous=True))
    return MPoly.from_expr(expr, WORLD_VARS).normalized()


def torus_dual_implicit(spec: TorusSpec) -> MPoly:
    xb, yb, zb, wb = _syms(DUAL_WORLD_VARS)
    a, b = spec.a, spec.b
    base = (16 * (a * xb**2 + a * yb**2 + a * zb**2 + wb**2) ** 2
            - 8 * b * (xb**2 + yb**2) * (a * zb**2 + 2 * wb**2)
            + (b**2 - 8 * a * b) * zb**4 - 8 * b * zb**2 * wb**2)
    img = sp.Matrix(spec.pose).T * sp.Matrix([xb, yb, zb, wb])
    expr = sp.expand(base.subs({xb: img[0], yb: img[1], zb: img[2], wb: img[3]},
                               simultaneous=True))
    return MPoly.from_expr(expr, DUAL_WORLD_VARS).normalized()


# ---------------------------------------------------------------------------
# pictures
# ---------------------------------------------------------------------------

def picture(F: MPoly, cam: CameraSpec) -> MPoly:
    """Critical-value curve of the projection of the surface F = 0.

    The camera is reduced to canonical position by an exact world-coordinate
    change, the discriminant with respect to the projection direction w is
    taken, and the product of its odd-multiplicity irreducible factors is
    returned (frozen rule: even-multiplicity factors are projection
    artifacts — tangent-cone and infinite-plane contributions — and carry no
    critical-value locus of their own)."""
    if F.vars != WORLD_VARS:
        raise SceneError("surface form must use world variables %s" % (WORLD_VARS,))
    syms = _syms(WORLD_VARS)
    H = cam.normalizing_h()
    img = sp.Matrix(H) * sp.Matrix(syms)
    G = sp.expand(F.as_expr().subs(dict(zip(syms, img)), simultaneous=True))
    o = dict(zip(syms, (0, 0, 0, 1)))
    if sp.expand(G.subs(o)) == 0:
        raise SceneError("camera center lies on the surface")
    w = syms[3]
    if sp.Poly(G, w).degree() < 2:
        raise SceneError("surface is a cylinder over the center: disc_w undefined")
    disc = discriminant_expr(G, w)
    _, factors = sp.factor_list(sp.Poly(disc, *syms[:3]))
    out = sp.Integer(1)
    for fac, mult in factors:
        if mult % 2 == 1:
            out *= fac.as_expr()
    return MPoly.from_expr(sp.expand(out), IMAGE_VARS).normalized()


def dual_picture(Fdual: MPoly, cam: CameraSpec) -> MPoly:
    """Section of the dual surface by the plane o* of planes through the
    camera center: substitute the span of the camera rows."""
    if Fdual.vars != DUAL_WORLD_VARS:
        raise SceneError("dual form must use variables %s" % (DUAL_WORLD_VARS,))
    duals = _syms(DUAL_VARS)
    img = sp.Matrix(cam.projection).T * sp.Matrix(duals)
    syms = _syms(DUAL_WORLD_VARS)
    expr = sp.expand(Fdual.as_expr().subs(dict(zip(syms, img)), simultaneous=True))
    if expr == 0:
        raise SceneError("dual surface contains the plane pencil o*")
    return MPoly.from_expr(expr, DUAL_VARS).normalized()


# ---------------------------------------------------------------------------
# ground truth
# ---------------------------------------------------------------------------

def ground_truth_absolute(cam: CameraSpec):
    """(C_E, C_E*) for a camera: C_E* = P diag(1,1,1,0) P^T up to scale."""
    P = sp.Matrix(cam.projection)
    dual = P * sp.diag(1, 1, 1, 0) * P.T
    if dual.det() == 0:
        raise SceneError("camera center lies on the infinite plane")
    ce_dual = Conic(dual, plane="dual")
    ce = Conic(dual.adjugate(), plane="image")
    return ce, ce_dual


def ground_truth_nodes(spec: TorusSpec, cam: CameraSpec):
    """Images of the two nodes (1 : +-i : 0 : 0) of the torus, transported
    by pose and projection; conjugate points on the elliptic absolute."""
    P = sp.Matrix(cam.projection)
    img = P * sp.Matrix(spec.pose) * sp.Matrix([1, sp.I, 0, 0])
    if all(e == 0 for e in img):
        raise SceneError("node projects to nothing (degenerate camera/pose)")
    node = ProjPoint(list(img))
    if node.is_real():
        raise SceneError("node pair degenerates to a real point")
    return node, node.conjugate()


# ---------------------------------------------------------------------------
# squares
# ---------------------------------------------------------------------------

def square_scene(pose, side=1, cam: CameraSpec = None):
    """Images of the vertices of a square (side s in the plane z = 1 of its
    own frame, placed by the 4x4 pose) under the camera."""
    side = rat(side)
    if side <= 0:
        raise SceneError("side must be positive")
    if cam is None:
        cam = canonical_camera()
    pose = sp.Matrix(pose)
    if pose.shape != (4, 4) or pose.det() == 0:
        raise SceneError("pose must be an invertible 4x4 matrix")
    corners = [(0, 0), (side, 0), (side, side), (0, side)]
    P = sp.Matrix(cam.projection)
    out = []
    for u, v in corners:
        world = pose * sp.Matrix([u, v, 1, 1])
        img = P * world
        if all(e == 0 for e in img):
            raise SceneError("square vertex projects through the camera center")
        out.append(ProjPoint(list(img)))
    m = sp.Matrix.hstack(*[p.as_matrix() for p in out])
    if any(m[:, [i, j, k]].det() == 0 for i, j, k in
           ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))):
        raise SceneError("degenerate square image (three collinear vertices)")
    return tuple(out)


# ---------------------------------------------------------------------------
# bundles
# ---------------------------------------------------------------------------

class SceneBundle:
    def __init__(self, spec, cam, picture_form, dual_picture_form, ce, ce_dual, nodes):
        self.spec = spec
        self.cam = cam
        self.picture = picture_form
        self.dual_picture = dual_picture_form
        self.ce = ce
        self.ce_dual = ce_dual
        self.nodes = nodes

    def to_obj(self):
        from .scalars import scalar_to_obj
        return {
            "kind": "torus",
            "a": str(self.spec.a), "b": str(self.spec.b),
            "pose": [[scalar_to_obj(self.spec.pose[i, j]) for j in range(4)] for i in range(4)],
            "camera": [[scalar_to_obj(self.cam.projection[i, j]) for j in range(4)]
                       for i in range(3)],
            "picture": self.picture.to_obj(),
            "dual_picture": self.dual_picture.to_obj(),
            "ce": self.ce.to_obj(),
            "ce_dual": self.ce_dual.to_obj(),
            "nodes": [n.to_obj() for n in self.nodes],
        }

    @classmethod
    def from_obj(cls, obj):
        from .scalars import scalar_from_obj
        spec = TorusSpec(obj["a"], obj["b"],
                         [[scalar_from_obj(c) for c in row] for row in obj["pose"]])
        cam = CameraSpec([[scalar_from_obj(c) for c in row] for row in obj["camera"]])
        return cls(spec, cam,
                   MPoly.from_obj(obj["picture"]),
                   MPoly.from_obj(obj["dual_picture"]),
                   Conic.from_obj(obj["ce"]),
                   Conic.from_obj(obj["ce_dual"]),
                   tuple(ProjPoint.from_obj(n) for n in obj["nodes"]))


def synth_torus_scene(spec: TorusSpec, cam: CameraSpec = None) -> SceneBundle:
    if cam is None:
        cam = canonical_camera()
    T = torus_implicit(spec)
    Tdual = torus_dual_implicit(spec)
    pic = picture(T, cam)
    dpic = dual_picture(Tdual, cam)
    ce, ce_dual = ground_truth_absolute(cam)
    nodes = ground_truth_nodes(spec, cam)
    return SceneBundle(spec, cam, pic, dpic, ce, ce_dual, nodes)
