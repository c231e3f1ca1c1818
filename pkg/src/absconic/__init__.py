"""Exact recovery of the elliptic absolute conic from pictures of squares,
surfaces of revolution, and a single torus."""

from .scalars import ScalarError, gauss, gauss_abs2, gauss_conj, is_gauss_rational, rat
from .mpoly import MPoly
from .algebra import (compose_linear, discriminant, hessian_det,
                      perfect_square_root, resultant, squarefree_part)
from .polysolve import (Ideal, SolutionSet, eliminate, groebner,
                        perfect_square_conditions, solve_bivariate,
                        solve_univariate, solve_zero_dim)
from .projective import (Conic, ProjLine, ProjMap, ProjPoint, cross_ratio,
                         elliptic_distance, join,
                         line_tangent_to_conic_condition, map_from_point_pairs,
                         meet, precision_bits, reflection_fixed_elements)
from .scene import (CameraSpec, SceneBundle, TorusSpec, canonical_camera,
                    cayley_rotation, dual_picture, ground_truth_absolute,
                    ground_truth_nodes, picture, rigid_pose, square_scene,
                    synth_torus_scene, torus_dual_implicit, torus_implicit)
from .calibrate import (CalibrationError, CandidateSet, Reflection,
                        SymmetryError, absolute_points_from_square,
                        calibrate_revolution, calibrate_squares,
                        calibrate_torus, find_symmetry, invariant_conic_space,
                        singular_points)

__version__ = "0.1.0"
