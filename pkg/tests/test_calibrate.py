import sympy as sp

import pytest

from absconic import (CalibrationError, Conic, MPoly, ProjMap, ProjPoint,
                      Reflection, SymmetryError, absolute_points_from_square,
                      calibrate_revolution, calibrate_squares, calibrate_torus,
                      find_symmetry, invariant_conic_space, rigid_pose,
                      singular_points, square_scene)
from absconic.projective import reflection_fixed_elements

x, y, z = sp.symbols("x y z")
XYZ = ("x", "y", "z")


def refl(v):
    """Householder reflection fixing the unit conic: I - 2 vv^T / (v^T v)."""
    v = sp.Matrix(v)
    return Reflection(ProjMap(sp.eye(3) - 2 * v * v.T / (v.T * v)[0],
                              involution=True))


# ---------------------------------------------------------------------------
# symmetry finding
# ---------------------------------------------------------------------------

def test_find_symmetry_simple_unique_quartic():
    F = MPoly.from_expr(sp.expand((x**2 + y**2 + z**2) ** 2 + x**3 * z), XYZ)
    s = find_symmetry(F)
    # unique reflection y -> -y: fixed line y = 0
    line, point = reflection_fixed_elements(s.map)
    assert tuple(line.coords) == (0, 1, 0)
    assert s.map.mat == sp.diag(-1, 1, -1)  # det-1 representative


def test_find_symmetry_cusp_quartic_unique_and_direct_agrees():
    F = MPoly.from_expr(x**3 * z - y**4, XYZ)
    s = find_symmetry(F)
    assert s.map.mat == sp.diag(-1, 1, -1)  # x -> -x
    s2 = find_symmetry(F, method="direct")
    assert s2.map.mat == s.map.mat


def test_find_symmetry_conic_reports_continuum():
    F = MPoly.from_expr(x**2 + y**2 + z**2, XYZ)
    with pytest.raises(SymmetryError) as err:
        find_symmetry(F)
    assert err.value.kind == "continuum"
    assert "not uniquely solvable" in str(err.value)


def test_find_symmetry_fermat_quartic_reports_multiple():
    F = MPoly.from_expr(x**4 + y**4 + z**4, XYZ)
    with pytest.raises(SymmetryError) as err:
        find_symmetry(F)
    assert err.value.kind == "multiple"
    assert "not uniquely solvable" in str(err.value)


def test_find_symmetry_rejects_bad_input():
    with pytest.raises(Exception):
        find_symmetry(MPoly.from_expr(x**2 + y, XYZ))  # not homogeneous


# ---------------------------------------------------------------------------
# invariant conics
# ---------------------------------------------------------------------------

def test_invariant_conic_space_of_a_reflection():
    s = Reflection(ProjMap(sp.diag(-1, 1, -1), involution=True))
    basis = invariant_conic_space(s)
    assert len(basis) == 4
    from absconic import compose_linear
    A = sp.Matrix(s.map.mat)
    for F in basis:
        assert F.total_degree() == 2
        assert compose_linear(F, A).same_up_to_scale(F)


def test_invariant_conic_space_rejects_identity_like_maps():
    with pytest.raises(CalibrationError):
        invariant_conic_space(Reflection(ProjMap(sp.eye(3), involution=True)))


# ---------------------------------------------------------------------------
# squares
# ---------------------------------------------------------------------------

def test_absolute_points_from_square_canonical():
    quad = square_scene(sp.eye(4), side=1)
    zpt, zbar, rows = absolute_points_from_square(*quad)
    assert not zpt.is_real()
    assert zbar == zpt.conjugate()
    # canonical camera ground truth: both absolute points lie on x^2+y^2+z^2
    unit = Conic(sp.eye(3))
    assert unit.value(zpt) == 0 and unit.value(zbar) == 0
    # and the emitted linear constraints accept the unit conic
    for row in rows:
        assert sum(c * v for c, v in zip(row, (1, 0, 0, 1, 0, 1))) == 0


def test_calibrate_squares_recovers_unit_conic():
    poses = [sp.eye(4),
             rigid_pose(("1", "0", "0"), ("0", "1/2", "3")),
             rigid_pose(("0", "1", "0"), ("-1/2", "0", "2"))]
    squares = [square_scene(p, side=1) for p in poses]
    C = calibrate_squares(squares)
    assert C.mat == sp.eye(3)
    assert C.has_no_real_points()


def test_calibrate_squares_parallel_planes_rank_deficient():
    poses = [sp.eye(4),
             rigid_pose(("0", "0", "0"), ("1/3", "0", "1")),
             rigid_pose(("0", "0", "0"), ("0", "1/5", "2"))]
    squares = [square_scene(p, side=1) for p in poses]
    with pytest.raises(CalibrationError) as err:
        calibrate_squares(squares)
    assert "rank" in str(err.value)


def test_calibrate_squares_needs_three():
    with pytest.raises(CalibrationError):
        calibrate_squares([square_scene(sp.eye(4))])


# ---------------------------------------------------------------------------
# surfaces of revolution
# ---------------------------------------------------------------------------

def test_calibrate_revolution_from_reflections():
    # linearly independent axes: coplanar mirror axes leave a pencil of
    # invariant conics and the constraint rank drops to 4
    C = calibrate_revolution([refl((1, 0, 0)), refl((1, 1, 0)), refl((1, 1, 1))])
    assert C.mat == sp.eye(3)


def test_calibrate_revolution_repeated_axis_rank_deficient():
    with pytest.raises(CalibrationError) as err:
        calibrate_revolution([refl((1, 0, 0))] * 3)
    assert "rank" in str(err.value)


def test_calibrate_revolution_input_validation():
    with pytest.raises(CalibrationError):
        calibrate_revolution([refl((1, 0, 0))])
    with pytest.raises(CalibrationError):
        calibrate_revolution(["x", "y", "z"])


# ---------------------------------------------------------------------------
# singular points
# ---------------------------------------------------------------------------

def test_singular_points_cusp():
    F = MPoly.from_expr(x**3 - y**2 * z, XYZ)
    pts = singular_points(F)
    assert ProjPoint([0, 0, 1]) in pts


def test_singular_points_conic_pair():
    F = MPoly.from_expr(sp.expand((x**2 + y**2 - z**2) * (x**2 + y**2 - 4 * z**2)), XYZ)
    pts = singular_points(F)
    assert set(pts) == {ProjPoint([1, sp.I, 0]), ProjPoint([1, -sp.I, 0])}
    # projective equality is canonical under Gaussian rescaling
    assert ProjPoint([sp.I, -1, 0]) in pts


def test_singular_points_smooth_curve_empty():
    F = MPoly.from_expr(x**3 + y**3 + z**3 + x * y * z, XYZ)
    pts, boxes = singular_points(F, include_boxes=True)
    assert pts == [] and boxes == []


# ---------------------------------------------------------------------------
# torus input validation
# ---------------------------------------------------------------------------

def test_calibrate_torus_rejects_real_node(example_quartic):
    with pytest.raises(CalibrationError):
        calibrate_torus(None, example_quartic, node=ProjPoint([1, 2, 3]))


def test_calibrate_torus_rejects_node_on_axis(example_quartic):
    # the Example quartic's reflection fixes x = 0; a node pair invariant
    # under it cannot be in general position
    with pytest.raises(CalibrationError):
        calibrate_torus(None, example_quartic, node=ProjPoint([0, sp.I, 1]))
