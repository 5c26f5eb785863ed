"""Planar constrained systems ``A(x) x' = F(x)`` obtained from invariant surfaces.

Restricting a field to the graph part of ``M = {f z = g}`` and clearing the
denominators of ``z = g/f`` gives a constrained system with diagonal
``A = diag(f^m, f^n)``.  Its adjoint field ``A* F`` extends the flow across
the impasse set ``det A = 0`` and is what gets integrated and classified.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import UnknownNormalForm, UnsupportedPotential
from .expr import ExprSource, parse_poly
from .numerics import IMPASSE_BAND, Trajectory, integrate
from .polynomial import Poly, gcd_bivariate, rational_content
from .surface import XY, XYZ, SurfaceSpec, VectorField3

__all__ = [
    "Provenance",
    "ConstrainedSystem",
    "AdjointField",
    "CatastropheSpec",
    "reduce_general",
    "cancel_row_factors",
    "adjoint",
    "jacobian_adjoint",
    "reduce_potential",
    "takens_catalog",
    "TAKENS_NAMES",
    "integrate_constrained",
]


class Provenance(str, enum.Enum):
    GENERAL = "GeneralReduction"
    DEGREE1 = "Degree1Reduction"
    CANCELLED = "Cancelled"
    DIRECT = "Direct"
    CATASTROPHE = "Catastrophe"

    def __str__(self):
        return self.value


Matrix2 = tuple[tuple[Poly, Poly], tuple[Poly, Poly]]


def _xy(p: Poly, what: str) -> Poly:
    extra = set(p.used_variables()) - set(XY)
    if extra:
        raise ValueError(f"{what} may only use x and y, found {sorted(extra)}")
    return p.restrict(XY)


@dataclass(frozen=True)
class ConstrainedSystem:
    """``A(x, y) (x', y') = F(x, y)`` with polynomial entries.

    Attributes
    ----------
    A : 2x2 tuple of Poly
    F : pair of Poly
    provenance : Provenance
    surface : SurfaceSpec, optional
        Set for systems reduced from an invariant surface.
    field : VectorField3, optional
        The spatial field the system was reduced from.
    """

    A: Matrix2
    F: tuple[Poly, Poly]
    provenance: Provenance = Provenance.DIRECT
    surface: SurfaceSpec | None = None
    field: VectorField3 | None = None

    def __post_init__(self):
        A = tuple(tuple(_xy(a, "A") for a in row) for row in self.A)
        F = tuple(_xy(c, "F") for c in self.F)
        if len(A) != 2 or any(len(r) != 2 for r in A) or len(F) != 2:
            raise ValueError("A must be 2x2 and F a pair")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "F", F)

    @classmethod
    def direct(cls, A: Sequence[Sequence[str]], F: Sequence[str]) -> "ConstrainedSystem":
        """Build from expression strings in x and y."""
        A = tuple(tuple(parse_poly(ExprSource(t, XY)) for t in row) for row in A)
        F = tuple(parse_poly(ExprSource(t, XY)) for t in F)
        return cls(A, F, Provenance.DIRECT)

    @property
    def detA(self) -> Poly:
        (a, b), (c, d) = self.A
        return a * d - b * c

    @property
    def is_diagonal(self) -> bool:
        return self.A[0][1].is_zero() and self.A[1][0].is_zero()

    @property
    def is_smooth(self) -> bool:
        """True when ``det A`` provably has no real zeros (empty impasse set).

        Certified when ``det A`` is a nonzero constant, or a sum of even
        monomials whose coefficients share one strict sign and whose
        constant term is nonzero (e.g. ``4*x^2 + 48``).
        """
        d = self.detA
        if d.is_zero():
            return False
        if d.is_constant():
            return True
        terms = d.terms
        const = terms.get((0,) * len(d.variables), 0)
        signs = {c > 0 for c in terms.values()}
        even = all(e % 2 == 0 for exps in terms for e in exps)
        return bool(const) and even and len(signs) == 1

    @property
    def beta_top(self) -> Poly | None:
        """Leading z-coefficient of the field's second component, if known."""
        if self.field is None:
            return None
        coeffs = self.field.beta.coefficients_in("z")
        return coeffs[-1].restrict(XY) if coeffs else Poly.zero(XY)

    def adjoint(self) -> "AdjointField":
        return adjoint(self)

    def det_function(self):
        return self.detA.to_function(XY)

    def __str__(self):
        (a, b), (c, d) = self.A
        rows = []
        for (p, q), rhs in zip(self.A, self.F):
            lhs = []
            for coeff, var in ((p, "x'"), (q, "y'")):
                if coeff.is_zero():
                    continue
                lhs.append(var if coeff == 1 else f"({coeff})*{var}")
            rows.append(f"{' + '.join(lhs) or '0'} = {rhs}")
        return "; ".join(rows)


@dataclass(frozen=True)
class AdjointField:
    """The planar field ``A* F`` with ``A* = [[A22, -A12], [-A21, A11]]``."""

    components: tuple[Poly, Poly]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(_xy(c, "adjoint") for c in self.components))

    def __iter__(self):
        return iter(self.components)

    def evaluator(self):
        P, Q = (c.to_function(XY) for c in self.components)

        def field(v):
            return np.array([P(v[0], v[1]), Q(v[0], v[1])], dtype=float) * np.ones(2)

        return field

    def jacobian(self) -> list[list[Poly]]:
        return jacobian_adjoint(self)

    def jacobian_at(self, q) -> np.ndarray:
        J = jacobian_adjoint(self)
        return np.array([[float(J[i][j].evaluate(tuple(q))) for j in range(2)] for i in range(2)])


def _with_metadata(cs: ConstrainedSystem, A, F, provenance) -> ConstrainedSystem:
    return replace(cs, A=A, F=F, provenance=provenance)


def reduce_general(X: VectorField3, S: SurfaceSpec) -> ConstrainedSystem:
    """Constrained system for the flow of X on the graph part of M.

    With ``alpha = sum alpha_i z^i`` (degree m) and ``beta = sum beta_j z^j``
    (degree n), substituting ``z = g/f`` and clearing denominators gives
    ``f^m x' = sum f^(m-i) g^i alpha_i`` and ``f^n y' = sum f^(n-j) g^j beta_j``.

    Examples
    --------
    >>> X = VectorField3.from_strings("y", "z", "-x*z - 1/2*(1 - y^2)")
    >>> print(reduce_general(X, SurfaceSpec.from_strings("2*x", "y^2 - 1")))
    x' = y; (2*x)*y' = y^2 - 1
    """
    f, g = S.f, S.g

    def cleared(component: Poly):
        coeffs = [c.embed(XY) for c in component.coefficients_in("z")]
        m = max(len(coeffs) - 1, 0)
        total = Poly.zero(XY)
        for i, c in enumerate(coeffs):
            total = total + f ** (m - i) * g ** i * c
        return m, total

    m, F1 = cleared(X.alpha)
    n, F2 = cleared(X.beta)
    zero = Poly.zero(XY)
    A = ((f ** m, zero), (zero, f ** n))
    provenance = Provenance.DEGREE1 if (m, n) == (0, 1) else Provenance.GENERAL
    return ConstrainedSystem(A, (F1, F2), provenance, surface=S, field=X)


def _row_factor(entries: Sequence[Poly]) -> Poly:
    nonzero = [e for e in entries if e]
    if not nonzero:
        return Poly.constant(1, XY)
    common = Poly.zero(XY)
    for e in nonzero:
        common = gcd_bivariate(common, e)
        if common.is_constant():
            break
    content = rational_content(c for e in nonzero for _, c in e.items())
    return common * content


def cancel_row_factors(cs: ConstrainedSystem) -> tuple[ConstrainedSystem, tuple[Poly, Poly]]:
    """Divide each row of ``(A | F)`` by the gcd of its entries.

    The removed factor of a row is its positive rational content times the
    primitive polynomial gcd.  Orbits are unchanged away from the zero sets
    of the removed factors.
    """
    rows, rhs, removed = [], [], []
    for (a, b), c in zip(cs.A, cs.F):
        k = _row_factor((a, b, c))
        removed.append(k)
        rows.append((a.exact_div(k), b.exact_div(k)))
        rhs.append(c.exact_div(k))
    out = _with_metadata(cs, tuple(rows), tuple(rhs), Provenance.CANCELLED)
    return out, (removed[0].restrict(XY), removed[1].restrict(XY))


def adjoint(cs: ConstrainedSystem) -> AdjointField:
    """``A* F``, checked against ``A (A* F) = det(A) F`` exactly."""
    (a, b), (c, d) = cs.A
    F1, F2 = cs.F
    P = d * F1 - b * F2
    Q = -c * F1 + a * F2
    det = cs.detA
    if a * P + b * Q != det * F1 or c * P + d * Q != det * F2:
        raise ArithmeticError("adjoint identity failed")
    return AdjointField((P.embed(XY), Q.embed(XY)))


def jacobian_adjoint(adj: AdjointField) -> list[list[Poly]]:
    """Symbolic Jacobian of the adjoint components."""
    return [[c.diff(v).embed(XY) for v in XY] for c in adj.components]


# -- catastrophes -------------------------------------------------------------

@dataclass(frozen=True)
class CatastropheSpec:
    """A normal form ``0 = V_x, y' = beta, z' = gamma``."""

    name: str
    V: Poly
    X: VectorField3
    potential: str
    type: str


_FLAT = "1/2*x^2"
_CUSP = "1/3*x^3 + y*x"
_FOLD = "1/4*x^4 + 1/2*z*x^2 + y*x"

_TAKENS = {
    "flat-flowbox": (_FLAT, ("0", "1", "0"), "Flow-box"),
    "flat-source": (_FLAT, ("0", "y", "z"), "Source"),
    "flat-saddle": (_FLAT, ("0", "y", "-z"), "Saddle"),
    "flat-sink": (_FLAT, ("0", "-y", "-z"), "Sink"),
    "cusp-flowbox-1": (_CUSP, ("0", "1", "0"), "Flow-box 1"),
    "cusp-flowbox-2": (_CUSP, ("0", "-1", "0"), "Flow-box 2"),
    "cusp-source": (_CUSP, ("0", "3*x + z", "1"), "Source"),
    "cusp-sink": (_CUSP, ("0", "-3*x + z", "1"), "Sink"),
    "cusp-saddle": (_CUSP, ("0", "-z", "1"), "Saddle"),
    "cusp-focus": (_CUSP, ("0", "x + z", "1"), "Focus"),
    "fold-flowbox-1": (_FOLD, ("0", "1", "0"), "Flow-box 1"),
    "fold-flowbox-2": (_FOLD, ("0", "-1", "0"), "Flow-box 2"),
}

TAKENS_NAMES = tuple(_TAKENS)


def takens_catalog(name: str) -> CatastropheSpec:
    """One of the 12 generic constrained normal forms.

    Names are ``<potential>-<type>`` with potentials ``flat`` (x^2/2),
    ``cusp`` (x^3/3 + yx) and ``fold`` (x^4/4 + zx^2/2 + yx).

    Raises
    ------
    UnknownNormalForm
    """
    try:
        v, xs, kind = _TAKENS[name]
    except KeyError:
        raise UnknownNormalForm(f"unknown normal form {name!r}; choose from {', '.join(TAKENS_NAMES)}") from None
    return CatastropheSpec(name, parse_poly(ExprSource(v, XYZ)), VectorField3.from_strings(*xs),
                           name.split("-")[0], kind)


def reduce_potential(V: Poly, beta: Poly, gamma: Poly) -> ConstrainedSystem:
    """Reduce ``0 = V_x, y' = beta, z' = gamma`` to a planar constrained system.

    Solves ``V_x = 0`` for ``y = xi(x, z)`` and returns
    ``-V_xx x' = V_xy beta + V_xz gamma, z' = gamma`` with z renamed to y.
    When ``V_x`` does not involve y nothing is eliminated.

    Raises
    ------
    UnsupportedPotential
        If ``V_x`` is not affine in y with a constant nonzero y-coefficient.
    """
    V, beta, gamma = (p.embed(XYZ) for p in (V, beta, gamma))
    Vx = V.diff("x")
    coeffs = Vx.coefficients_in("y")
    if len(coeffs) > 2:
        raise UnsupportedPotential(f"V_x = {Vx} is not affine in y")
    subst = {}
    if len(coeffs) == 2:
        lead = coeffs[1]
        if not lead.is_constant():
            raise UnsupportedPotential(f"the y-coefficient of V_x = {Vx} is not constant")
        subst = {"y": (-coeffs[0] / lead.constant_value()).embed(XYZ)}

    def planar(p: Poly) -> Poly:
        out = p.substitute(subst) if subst else p
        used = set(out.used_variables()) - {"x", "z"}
        if used:
            raise UnsupportedPotential(f"reduced term {out} still depends on {sorted(used)}")
        return out.restrict(("x", "z")).rename({"z": "y"}).embed(XY)

    Vxx, Vxy, Vxz = Vx.diff("x"), Vx.diff("y"), Vx.diff("z")
    a11 = planar(-Vxx)
    rhs1 = planar(Vxy * beta + Vxz * gamma)
    rhs2 = planar(gamma)
    zero = Poly.zero(XY)
    A = ((a11, zero), (zero, Poly.constant(1, XY)))
    return ConstrainedSystem(A, (rhs1, rhs2), Provenance.CATASTROPHE)


# -- trajectories ---------------------------------------------------------------

def integrate_constrained(cs: ConstrainedSystem, seed, t_end: float, delta: float = IMPASSE_BAND,
                          **kwargs) -> Trajectory:
    """Orbit of the constrained system through ``seed``.

    Integrates ``sigma A* F`` with ``sigma`` the sign of ``det A`` at the seed,
    which keeps the time direction of the constrained flow without dividing
    by ``det A``, and stops once ``|det A| <= delta``.
    """
    det = cs.det_function()
    seed = np.asarray(seed, dtype=float)
    sigma = 1.0 if det(seed[0], seed[1]) >= 0 else -1.0
    adj = adjoint(cs).evaluator()

    def field(v):
        return sigma * adj(v)

    return integrate(field, seed, t_end, det=lambda v: det(v[0], v[1]), delta=delta, **kwargs)
