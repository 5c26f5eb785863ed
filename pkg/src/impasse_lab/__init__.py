"""Impasse points of constrained planar systems induced by 3D polynomial fields.

A field ``X`` with an invariant surface ``f(x, y) z - g(x, y) = 0`` induces a
constrained system ``A(x, y) (x', y') = F(x, y)`` on the graph part of the
surface.  The package reduces, classifies and integrates such systems,
follows their slow-fast unfoldings in ``eps`` and reports the behaviour of
the surface at infinity.
"""

__version__ = "0.1.0"

from .errors import ImpasseLabError  # noqa: E402
from .polynomial import Poly  # noqa: E402
from .expr import parse_poly, print_poly  # noqa: E402
from .surface import SurfaceSpec, VectorField3, verify_invariance  # noqa: E402
from .reduction import ConstrainedSystem, adjoint, cancel_row_factors, reduce_general  # noqa: E402

__all__ = [
    "__version__", "ImpasseLabError", "Poly", "parse_poly", "print_poly", "SurfaceSpec",
    "VectorField3", "verify_invariance", "ConstrainedSystem", "adjoint", "cancel_row_factors",
    "reduce_general",
]
