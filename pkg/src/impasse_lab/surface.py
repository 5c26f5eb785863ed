"""Invariant surfaces ``M = {f(x, y) z - g(x, y) = 0}`` of polynomial fields.

The surface splits into the graph ``z = g/f`` over ``{f != 0}`` and the
vertical lines over the common zeros of f and g.  This module checks that a
field leaves M invariant, locates those vertical lines and the singular
points of M, and certifies disconnectedness when it can.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BoxTooSmall, OnImpasse
from .expr import ExprSource, parse_poly
from .numerics import Box2, isolate_zeros_2d
from .polynomial import Poly, gcd_bivariate, iter_monomials

__all__ = [
    "XYZ",
    "SurfaceSpec",
    "VectorField3",
    "InvarianceKind",
    "DarbouxResult",
    "IntersectionCase",
    "ZeroSetIntersection",
    "SingularPointsOfM",
    "Connectivity",
    "verify_invariance",
    "pseudo_impasse_projections",
    "graph_height",
    "singular_points",
    "connectivity_report",
    "solve_rational_linear",
]

XYZ = ("x", "y", "z")
XY = ("x", "y")


def _check_vars(p: Poly, allowed: Sequence[str], what: str) -> Poly:
    extra = set(p.used_variables()) - set(allowed)
    if extra:
        raise ValueError(f"{what} may only use {tuple(allowed)}, found {sorted(extra)}")
    return p.restrict(allowed)


@dataclass(frozen=True)
class SurfaceSpec:
    """The pair (f, g) defining ``H = f z - g``."""

    f: Poly
    g: Poly

    def __post_init__(self):
        object.__setattr__(self, "f", _check_vars(self.f, XY, "f"))
        object.__setattr__(self, "g", _check_vars(self.g, XY, "g"))
        if self.f.is_zero():
            raise ValueError("f must not be the zero polynomial")

    @classmethod
    def from_strings(cls, f: str, g: str) -> "SurfaceSpec":
        return cls(parse_poly(ExprSource(f, XY)), parse_poly(ExprSource(g, XY)))

    @classmethod
    def from_H(cls, H: Poly) -> "SurfaceSpec":
        """Split ``H = f z - g``; raises ValueError when H is not of that form."""
        H = _check_vars(H, XYZ, "H")
        coeffs = H.coefficients_in("z")
        if len(coeffs) != 2:
            raise ValueError(f"H must have degree exactly 1 in z, got {H}")
        return cls(coeffs[1], -coeffs[0])

    @property
    def H(self) -> Poly:
        return self.f * Poly.variable("z", XYZ) - self.g

    def is_global_graph(self) -> bool:
        """True when f is a nonzero constant, so M is the graph of g/f."""
        return self.f.is_constant()


@dataclass(frozen=True)
class VectorField3:
    """Polynomial vector field ``X = (alpha, beta, gamma)`` on R^3."""

    alpha: Poly
    beta: Poly
    gamma: Poly

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, _check_vars(getattr(self, name), XYZ, name))

    @classmethod
    def from_strings(cls, alpha: str, beta: str, gamma: str) -> "VectorField3":
        return cls(*(parse_poly(ExprSource(t, XYZ)) for t in (alpha, beta, gamma)))

    @property
    def components(self) -> tuple[Poly, Poly, Poly]:
        return (self.alpha, self.beta, self.gamma)

    def __iter__(self):
        return iter(self.components)

    def evaluator(self):
        """Binary64 evaluator ``X(state) -> ndarray``."""
        fns = [c.to_function(XYZ) for c in self.components]

        def X(v):
            return np.array([fn(v[0], v[1], v[2]) for fn in fns], dtype=float)

        return X

    def jacobian(self) -> list[list[Poly]]:
        return [[c.diff(v) for v in XYZ] for c in self.components]

    def lie_derivative(self, P: Poly) -> Poly:
        """``grad(P) . X``."""
        P = P.embed(XYZ)
        return sum((P.diff(v) * c for v, c in zip(XYZ, self.components)),
                   Poly.zero(XYZ))


class InvarianceKind(str, enum.Enum):
    FIRST_INTEGRAL = "FirstIntegral"
    DARBOUX = "Darboux"
    NOT_INVARIANT = "NotInvariant"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DarbouxResult:
    """Outcome of the invariance check ``grad(H) . X = mu H``."""

    kind: InvarianceKind
    cofactor: Poly
    residual: Poly

    @property
    def invariant(self) -> bool:
        return self.kind is not InvarianceKind.NOT_INVARIANT


def solve_rational_linear(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Exact solution of a (possibly overdetermined) linear system.

    Returns one solution with free unknowns set to zero, or None when the
    system is inconsistent.
    """
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                factor = aug[i][c]
                aug[i] = [a - factor * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == len(aug):
            break
    if any(row[-1] != 0 for row in aug[r:]):
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = aug[i][-1]
    return sol


def verify_invariance(X: VectorField3, S: SurfaceSpec | Poly) -> DarbouxResult:
    """Decide whether ``H = f z - g`` is a first integral or Darboux polynomial of X.

    ``S`` may also be any polynomial H in x, y, z.

    The cofactor is found by solving, over Q, the linear system for the
    coefficients of a polynomial mu of degree at most ``deg(D) - deg(H)``
    with ``D = grad(H) . X = mu H``.

    Examples
    --------
    >>> X = VectorField3.from_strings("0", "z", "-z^3")
    >>> str(verify_invariance(X, SurfaceSpec.from_strings("y", "1")).cofactor)
    '-z^2'
    """
    H = S.H if isinstance(S, SurfaceSpec) else _check_vars(S, XYZ, "H").embed(XYZ)
    if H.is_zero():
        raise ValueError("H must not be the zero polynomial")
    D = X.lie_derivative(H)
    zero = Poly.zero(XYZ)
    if D.is_zero():
        return DarbouxResult(InvarianceKind.FIRST_INTEGRAL, zero, zero)
    k = D.degree() - H.degree()
    if k < 0:
        return DarbouxResult(InvarianceKind.NOT_INVARIANT, zero, D)
    monos = list(iter_monomials(XYZ, k))
    products = [Poly({m: 1}, XYZ) * H for m in monos]
    support = set(D.terms)
    for p in products:
        support.update(p.terms)
    support = sorted(support)
    Dt = D.terms
    rows = [[p.terms.get(e, Fraction(0)) for p in products] for e in support]
    rhs = [Dt.get(e, Fraction(0)) for e in support]
    sol = solve_rational_linear(rows, rhs)
    if sol is None:
        _, remainder = D.divmod(H)
        return DarbouxResult(InvarianceKind.NOT_INVARIANT, zero, remainder)
    mu = Poly(dict(zip(monos, sol)), XYZ)
    return DarbouxResult(InvarianceKind.DARBOUX, mu, zero)


class IntersectionCase(str, enum.Enum):
    EMPTY = "Empty"
    ISOLATED_POINTS = "IsolatedPoints"
    SHARED_CURVE = "SharedCurve"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ZeroSetIntersection:
    """Common zeros of f and g: the projections of the pseudo-impasse lines."""

    case: IntersectionCase
    points: tuple[tuple[float, float], ...] = ()
    residuals: tuple[float, ...] = ()
    shared_factor: Poly | None = None
    box: Box2 | None = None


def pseudo_impasse_projections(S: SurfaceSpec, box: Box2 | None = None,
                               tol: float = 1e-4) -> ZeroSetIntersection:
    """Locate ``Z_f`` intersected with ``Z_g`` inside ``box``.

    A nonconstant ``gcd(f, g)`` (computed exactly) gives SharedCurve.
    Otherwise isolated zeros are found by interval subdivision and Newton
    refinement; Empty is returned only with an exclusion certificate.

    Raises
    ------
    BoxTooSmall
        When a candidate cluster can be neither refined nor excluded.
    """
    box = box or Box2(-10.0, 10.0, -10.0, 10.0)
    common = gcd_bivariate(S.f, S.g)
    if common.degree() > 0:
        return ZeroSetIntersection(IntersectionCase.SHARED_CURVE, shared_factor=common, box=box)
    iso = isolate_zeros_2d(S.f, S.g, box, tol)
    residuals = tuple(max(abs(float(S.f.evaluate(q))), abs(float(S.g.evaluate(q))))
                      for q in iso.points)
    if iso.points:
        return ZeroSetIntersection(IntersectionCase.ISOLATED_POINTS, iso.points, residuals, box=box)
    if not iso.certified:
        raise BoxTooSmall("no common zero was located but the box could not be cleared")
    return ZeroSetIntersection(IntersectionCase.EMPTY, box=box)


def graph_height(S: SurfaceSpec, q, tol: float = 1e-12) -> float:
    """Height ``g(q)/f(q)`` of the graph part of M over ``q``.

    Raises
    ------
    OnImpasse
        If ``|f(q)| <= tol``.
    """
    q = (q[0], q[1])
    fq = S.f.evaluate(q)
    if abs(fq) <= tol:
        raise OnImpasse(f"f vanishes at {q}; M is not a graph there")
    return float(S.g.evaluate(q) / fq)


@dataclass(frozen=True)
class SingularPointsOfM:
    """Singular points of M, all on pseudo-impasse lines.

    ``whole_lines`` lists projections ``q`` whose whole vertical line is
    singular; ``isolated`` lists single points ``(x, y, z)``.
    """

    whole_lines: tuple[tuple[float, float], ...] = ()
    isolated: tuple[tuple[float, float, float], ...] = ()

    @property
    def regular(self) -> bool:
        return not (self.whole_lines or self.isolated)


def _grad2(p: Poly, q) -> np.ndarray:
    return np.array([float(p.diff(v).evaluate(q)) for v in XY])


def singular_points(S: SurfaceSpec, projections: ZeroSetIntersection,
                    tol: float = 1e-7) -> SingularPointsOfM:
    """Singular points of M over the given pseudo-impasse projections.

    On the line over q, ``grad H = (f_x z - g_x, f_y z - g_y, f)``; it
    vanishes for every z when both gradients vanish, for the single height
    solving ``f_x z = g_x, f_y z = g_y`` when that system is consistent, and
    nowhere otherwise.
    """
    if projections.case is IntersectionCase.EMPTY:
        # off the lines dH/dz = f != 0
        return SingularPointsOfM()
    if projections.case is not IntersectionCase.ISOLATED_POINTS:
        raise ValueError("singular points need isolated pseudo-impasse projections")
    lines, points = [], []
    for q in projections.points:
        gf, gg = _grad2(S.f, q), _grad2(S.g, q)
        scale = 1.0 + max(np.abs(gf).max(), np.abs(gg).max())
        if np.abs(gf).max() <= tol * scale and np.abs(gg).max() <= tol * scale:
            lines.append(tuple(q))
            continue
        if np.abs(gf).max() <= tol * scale:
            continue
        i = int(np.argmax(np.abs(gf)))
        z = gg[i] / gf[i]
        j = 1 - i
        if abs(gf[j] * z - gg[j]) <= tol * scale * (1 + abs(z)):
            points.append((q[0], q[1], float(z)))
    return SingularPointsOfM(tuple(lines), tuple(points))


class Connectivity(str, enum.Enum):
    DISCONNECTED = "Disconnected"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


def connectivity_report(S: SurfaceSpec, projections: ZeroSetIntersection,
                        box: Box2 | None = None, samples: int = 64) -> Connectivity:
    """Sufficient test for disconnectedness of M within ``box``.

    M is disconnected when there are no pseudo-impasse lines and f takes
    both signs: the graph ``z = g/f`` then has pieces over ``f > 0`` and
    ``f < 0`` that no path in M can join.
    """
    box = box or projections.box or Box2(-10.0, 10.0, -10.0, 10.0)
    if projections.case is not IntersectionCase.EMPTY:
        return Connectivity.INCONCLUSIVE
    xs = np.linspace(box.x_lo, box.x_hi, samples)
    ys = np.linspace(box.y_lo, box.y_hi, samples)
    gx, gy = np.meshgrid(xs, ys)
    vals = S.f.to_function(XY)(gx, gy) * np.ones_like(gx)
    if np.any(vals > 0) and np.any(vals < 0):
        return Connectivity.DISCONNECTED
    return Connectivity.INCONCLUSIVE
