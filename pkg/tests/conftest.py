import sympy as sp
from sympy import Rational as Q

import pytest
from hypothesis import HealthCheck, settings

# exact arithmetic through sympy is slow per-example; trade example count
# for headroom instead of fighting flaky deadlines
settings.register_profile("exact", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("exact")

from absconic import MPoly, TorusSpec, canonical_camera, rigid_pose, synth_torus_scene

# Worked dual-picture quartic used throughout as a known-good instance:
# torus a=3, b=16, tilted and shifted, canonical camera.  Its reflection,
# its node pair (1 : +-i : 0), and the recovered absolute are all known in
# closed form, so it doubles as a golden input for symmetry finding and
# torus calibration.
EXAMPLE_VARS = ("xb", "yb", "zb")


def example_quartic_expr():
    xb, yb, zb = sp.symbols("xb yb zb")
    return (xb**4
            + (-Q(81, 32) * yb**2 - Q(32, 81) * yb * zb - Q(8, 9) * zb**2) * xb**2
            + Q(6561, 4096) * yb**4 + Q(1, 2) * yb**3 * zb
            - Q(10, 9) * yb**2 * zb**2
            - Q(1755136, 77058945) * yb * zb**3
            + Q(3008303104, 905057309025) * zb**4)


@pytest.fixture(scope="session")
def example_quartic():
    return MPoly.from_expr(example_quartic_expr(), EXAMPLE_VARS)


# One small scene reused by the scene-level and property tests.  Generic
# pose (rotation + translation), canonical camera; a=3, b=16 puts the tube
# radius at 1 and the spine radius at 2, so rational surface points are easy
# to come by when tests need them.
@pytest.fixture(scope="session")
def small_scene():
    pose = rigid_pose(("1/2", "-1/3", "1/5"), ("1/3", "1/2", "2"))
    return synth_torus_scene(TorusSpec(3, 16, pose), canonical_camera())


def torus_point(spec, t, s):
    """Rational point of the posed torus (x^2+y^2+z^2+a)^2 = b(x^2+y^2).

    The unposed surface is the classical torus with spine radius R and tube
    radius rho where a = R^2 - rho^2 and b = 4R^2; both circles are rational,
    so the Weierstrass substitution in each angle gives a dense family of
    rational points indexed by (t, s).
    """
    t, s = Q(t), Q(s)
    R2 = spec.b / 4
    R = sp.sqrt(R2)
    rho = sp.sqrt(R2 - spec.a)
    if not (R.is_Rational and rho.is_Rational):
        raise ValueError("pick a, b with 4a < b and rational R, rho")
    cu, su = (1 - t**2) / (1 + t**2), 2 * t / (1 + t**2)
    r = R + rho * cu
    cv, sv = (1 - s**2) / (1 + s**2), 2 * s / (1 + s**2)
    p = sp.Matrix([r * cv, r * sv, rho * su, 1])
    return sp.Matrix(spec.pose) * p
