"""Extension of the surface ``f z - g = 0`` to the sphere at infinity.

Writing ``H = f z - g`` with ``m = deg H``, the extension is the zero set of
``w^m H(x/w, y/w, z/w)`` at ``w = 0``, which is exactly the top homogeneous part
of ``H``.  Only this boundary locus is reported; the flow at infinity is not
computed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .polynomial import NEG_INF, Poly
from .surface import SurfaceSpec, XYZ

__all__ = ["BoundaryCase", "PoleContainment", "CompactifiedSurface", "compactify"]


class BoundaryCase(str, enum.Enum):
    """Which part of ``H`` reaches the top degree."""

    G_DOMINATES = "GmDominates"      # deg g > deg f + 1: boundary is -g_top
    F_DOMINATES = "Fm1Dominates"     # deg g < deg f + 1: boundary is f_top * z
    MIXED = "Mixed"                  # deg g = deg f + 1


class PoleContainment(str, enum.Enum):
    """How the poles ``(0, 0, +-1)`` lie on the boundary locus.

    ``Nontrivial`` means the boundary involves ``z`` and still vanishes at the
    poles.  ``Trivial`` means the boundary is free of ``z``, so it vanishes on
    the whole ``z`` axis for reasons unrelated to ``f``.  ``Absent`` only
    happens for planes ``c z - g`` with ``c`` constant and ``deg g <= 1``.
    """

    NONTRIVIAL = "Nontrivial"
    TRIVIAL = "Trivial"
    ABSENT = "Absent"


@dataclass(frozen=True)
class CompactifiedSurface:
    """Boundary locus of a graph surface.

    Attributes
    ----------
    boundary_poly : Poly
        Homogeneous polynomial in ``(x, y, z)`` of degree ``degree``.
    case : BoundaryCase
    contains_poles : bool
        Exact test ``boundary_poly(0, 0, +-1) == 0``.
    pole_containment : PoleContainment
    contains_big_circle : bool
        ``deg f >= deg g``.
    z_divides_boundary : bool
        Exact divisibility of ``boundary_poly`` by ``z``; equals
        ``contains_big_circle``.
    """

    boundary_poly: Poly
    degree: int
    case: BoundaryCase
    contains_poles: bool
    pole_containment: PoleContainment
    contains_big_circle: bool
    z_divides_boundary: bool


def compactify(S: SurfaceSpec) -> CompactifiedSurface:
    """Boundary at infinity of ``f z - g = 0``.

    Examples
    --------
    >>> c = compactify(SurfaceSpec.from_strings("2*x", "y^2 - 1"))
    >>> print(c.boundary_poly)
    2*x*z - y^2
    >>> c.contains_poles, c.case.value
    (True, 'Mixed')
    """
    H = S.H
    boundary = H.top_homogeneous_part().embed(XYZ)
    m = H.degree()
    df, dg = S.f.degree(), S.g.degree()
    if dg == NEG_INF or dg < df + 1:
        case = BoundaryCase.F_DOMINATES
    elif dg > df + 1:
        case = BoundaryCase.G_DOMINATES
    else:
        case = BoundaryCase.MIXED

    at_poles = [boundary.evaluate({"x": 0, "y": 0, "z": s}) for s in (1, -1)]
    contains_poles = all(v == 0 for v in at_poles)
    if not contains_poles:
        containment = PoleContainment.ABSENT
    elif boundary.free_of("z"):
        containment = PoleContainment.TRIVIAL
    else:
        containment = PoleContainment.NONTRIVIAL

    z = Poly.variable("z", XYZ)
    z_divides = z.divides(boundary)
    return CompactifiedSurface(boundary, int(m), case, contains_poles, containment,
                               bool(df >= dg), z_divides)
