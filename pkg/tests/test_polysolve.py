import sympy as sp

import pytest

from absconic import (Ideal, MPoly, eliminate, groebner,
                      perfect_square_conditions, solve_bivariate,
                      solve_univariate, solve_zero_dim)
from absconic.polysolve import PolysolveError, gaussian_univariate_roots

x, y, z = sp.symbols("x y z")


def test_ideal_normalizes_and_drops_zero_generators():
    I = Ideal([sp.Integer(0), 2 * x - 2 * y], ("x", "y"))
    assert len(I.generators) == 1
    assert I.generators[0].same_up_to_scale(MPoly.from_expr(x - y, ("x", "y")))
    with pytest.raises(PolysolveError):
        Ideal([x], ("x",), order="degrevlex-typo")


def test_groebner_detects_unit_ideal():
    G = groebner(Ideal([x + 1, x + 2], ("x",)))
    assert [g.as_expr() for g in G.generators] == [sp.Integer(1)]


def test_eliminate_projects_a_circle_intersection():
    # circle and line; eliminating y leaves the x-resultant up to factors
    I = Ideal([x**2 + y**2 - 25, x + y - 7], ("x", "y"))
    E = eliminate(I, ["y"])
    assert E.vars == ("x",)
    gen = sp.prod(g.as_expr() for g in E.generators)
    assert sp.rem(gen, sp.expand((x - 3) * (x - 4)), x) == 0


def test_eliminate_rejects_unknown_variable():
    with pytest.raises(PolysolveError):
        eliminate(Ideal([x], ("x",)), ["t"])


def test_gaussian_univariate_roots_split_over_qi():
    roots, leftovers = gaussian_univariate_roots(x**2 + 1, x)
    assert set(roots) == {sp.I, -sp.I}
    assert leftovers == []
    roots, leftovers = gaussian_univariate_roots(x**2 - 2, x)
    assert roots == []
    assert len(leftovers) == 1


def test_solve_univariate_mixed_roots():
    sol = solve_univariate([sp.expand((x - sp.Rational(1, 2)) * (x**2 + 1) * (x**2 - 3))], x)
    assert set(sol.solutions) == {(sp.Rational(1, 2),), (sp.I,), (-sp.I,)}
    assert len(sol.boxes) == 2  # the two real quadratic-irrational roots
    assert all(not b["certified"] for b in sol.boxes)


def test_solve_univariate_gcd_of_several():
    sol = solve_univariate([sp.expand((x - 1) * (x - 2)), sp.expand((x - 1) * (x - 3))], x)
    assert sol.solutions == [(1,)]


def test_solve_bivariate_exact_points():
    sol = solve_bivariate([x**2 + y**2 - 25, x + y - 7], x, y)
    assert set(sol.solutions) == {(3, 4), (4, 3)}
    assert not sol.boxes and sol.residual is None


def test_solve_bivariate_gaussian_points():
    sol = solve_bivariate([x**2 + 1, y - x], x, y)
    assert set(sol.solutions) == {(sp.I, sp.I), (-sp.I, -sp.I)}


def test_solve_bivariate_boxes_irrational_points():
    sol = solve_bivariate([x**2 - 2, y - 1], x, y)
    assert sol.solutions == []
    assert len(sol.boxes) >= 1


def test_solve_bivariate_reports_positive_dimension():
    sol = solve_bivariate([sp.expand((x + y) * (x - y)), sp.expand((x + y) * (x + 2 * y))], x, y)
    assert sol.residual is not None


def test_solve_zero_dim_three_variables():
    I = Ideal([x - 1, y - 2, z + x], ("x", "y", "z"))
    sol = solve_zero_dim(I)
    assert sol.solutions == [(1, 2, -1)]


def test_solve_zero_dim_flags_positive_dimensional():
    sol = solve_zero_dim(Ideal([x * y], ("x", "y")))
    assert sol.residual is not None


def test_perfect_square_conditions_binary_quadratic():
    # p = u^2 + 2b uv + c v^2 is a square iff c = b^2
    u, v, bb, cc = sp.symbols("u v b c")
    p = MPoly.from_expr(u**2 + 2 * bb * u * v + cc * v**2, ("u", "v", "b", "c"))
    I = perfect_square_conditions(p, ("u", "v"))
    gen = sp.prod(g.as_expr() for g in I.generators)
    assert sp.simplify(gen / (cc - bb**2)).is_Rational


def test_perfect_square_conditions_accepts_actual_squares():
    u, v, t = sp.symbols("u v t")
    p = MPoly.from_expr(sp.expand((u + t * v) ** 2), ("u", "v", "t"))
    I = perfect_square_conditions(p, ("u", "v"))
    assert all(g.is_zero() for g in I.generators) or not I.generators


def test_perfect_square_conditions_quartic_solution_check():
    # quartic in (u,v) with one parameter; conditions must vanish exactly at
    # parameter values that make it a square
    u, v, t = sp.symbols("u v t")
    p = MPoly.from_expr(sp.expand((u**2 + u * v + t * v**2) ** 2 + (t - 4) * v**4),
                        ("u", "v", "t"))
    I = perfect_square_conditions(p, ("u", "v"))
    gens = [g.as_expr() for g in I.generators]
    assert gens
    assert all(sp.expand(g.subs(t, 4)) == 0 for g in gens)
    assert any(sp.expand(g.subs(t, 5)) != 0 for g in gens)


def test_perfect_square_conditions_rejects_odd_degree():
    u, v = sp.symbols("u v")
    with pytest.raises(PolysolveError):
        perfect_square_conditions(MPoly.from_expr(u**3, ("u", "v")), ("u", "v"))
    with pytest.raises(PolysolveError):
        perfect_square_conditions(MPoly.from_expr(u**2 + u, ("u", "v")), ("u", "v"))
