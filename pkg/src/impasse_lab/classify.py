"""Impasse-point classification, equilibrium typing and pseudo-impasse line verdicts.

An impasse point ``q`` (``det A(q) = 0``) is labelled by two conditions:

(A) ``ker A(q)`` is transversal to the impasse curve;
(B) ``F(q)`` is not in the range of ``A(q)``.

Both hold: NonSingular; only (B): K; only (A): R; neither: RK.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BoxTooSmall, NotAnEquilibrium, NotOnImpasse, WrongForm
from .numerics import Box2, Eig2, eig2, isolate_zeros_2d
from .polynomial import Poly, gcd_bivariate
from .reduction import AdjointField, ConstrainedSystem, adjoint, jacobian_adjoint
from .surface import XY, SurfaceSpec, VectorField3

__all__ = [
    "ZERO_TOL",
    "Label",
    "ImpasseClass",
    "EquilibriumKind",
    "EquilibriumType",
    "Verdict",
    "LineVerdict",
    "AdjointEquilibrium",
    "classify_impasse_point",
    "shortcut_label",
    "equilibrium_type",
    "analyze_line",
    "adjoint_equilibria",
    "degree1_parts",
    "degree1_adjoint",
]

#: Relative threshold below which a quantity counts as zero.
ZERO_TOL = 1e-8


def _scale(p: Poly, q) -> float:
    # magnitude of the terms of p at q, floored at 1 per coordinate
    ax, ay = max(1.0, abs(q[0])), max(1.0, abs(q[1]))
    vx = p.variables.index("x") if "x" in p.variables else None
    vy = p.variables.index("y") if "y" in p.variables else None
    total = 0.0
    for e, c in p.items():
        term = abs(float(c))
        if vx is not None:
            term *= ax ** e[vx]
        if vy is not None:
            term *= ay ** e[vy]
        total += term
    return total


def _val(p: Poly, q) -> float:
    return float(p.evaluate({"x": float(q[0]), "y": float(q[1])}))


def _is_zero(p: Poly, q, tol: float) -> bool:
    return abs(_val(p, q)) <= tol * (1.0 + _scale(p, q))


def _grad(p: Poly, q) -> np.ndarray:
    return np.array([_val(p.diff(v), q) for v in XY])


def _grad_scale(p: Poly, q) -> float:
    return 1.0 + sum(_scale(p.diff(v), q) for v in XY)


class Label(str, enum.Enum):
    NON_SINGULAR = "NonSingular"
    K = "K"
    R = "R"
    RK = "RK"

    def __str__(self):
        return self.value

    @classmethod
    def from_conditions(cls, cond_a: bool, cond_b: bool) -> "Label":
        if cond_a and cond_b:
            return cls.NON_SINGULAR
        if cond_b:
            return cls.K
        if cond_a:
            return cls.R
        return cls.RK


@dataclass(frozen=True)
class ImpasseClass:
    """Classification of one impasse point.

    ``label`` is None when the impasse curve is not regular at the point;
    ``shortcut`` is the label read off from ``f_y``, ``g`` and ``beta_n``
    when the system comes from a surface.  The kind flags are None when the
    system does not record its surface and field.
    """

    point: tuple[float, float]
    regular: bool
    cond_a: bool
    cond_b: bool
    label: Label | None
    r_first_kind: bool | None = None
    r_second_kind: bool | None = None
    shortcut: Label | None = None

    @property
    def effective_label(self) -> Label | None:
        return self.label if self.label is not None else self.shortcut


def _numeric_rank(m: np.ndarray, tol: float) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tol * (1.0 + np.abs(m).max())))


def shortcut_label(S: SurfaceSpec, X: VectorField3, q, tol: float = ZERO_TOL) -> Label:
    """Label from the criteria: R iff ``g = 0`` or ``beta_n = 0``; K iff ``f_y = 0``."""
    beta_n = X.beta.coefficients_in("z")[-1].restrict(XY)
    is_r = _is_zero(S.g, q, tol) or _is_zero(beta_n, q, tol)
    is_k = _is_zero(S.f.diff("y"), q, tol)
    return Label.from_conditions(not is_k, not is_r)


def classify_impasse_point(cs: ConstrainedSystem, q: Sequence[float],
                           tol: float = ZERO_TOL) -> ImpasseClass:
    """Evaluate conditions (A) and (B) at an impasse point.

    Raises
    ------
    NotOnImpasse
        If ``det A(q)`` is not zero to tolerance.
    """
    q = (float(q[0]), float(q[1]))
    det = cs.detA
    if not _is_zero(det, q, tol):
        raise NotOnImpasse(f"det A = {_val(det, q):.3g} at {q}")
    g_det = _grad(det, q)
    regular = float(np.linalg.norm(g_det)) > tol * _grad_scale(det, q)
    A = np.array([[_val(a, q) for a in row] for row in cs.A])
    F = np.array([_val(c, q) for c in cs.F])
    rank_a = _numeric_rank(A, tol)
    if rank_a == 0:
        cond_a = True
    else:
        kernel = np.linalg.svd(A)[2][-1]
        norm = np.linalg.norm(g_det)
        cond_a = bool(abs(float(kernel @ g_det)) > tol * (1.0 + norm))
    cond_b = _numeric_rank(np.column_stack([A, F]), tol) > rank_a
    first = second = shortcut = None
    if cs.surface is not None:
        first = _is_zero(cs.surface.g, q, tol)
    if cs.field is not None:
        second = _is_zero(cs.beta_top, q, tol)
        if cs.surface is not None:
            shortcut = shortcut_label(cs.surface, cs.field, q, tol)
    label = Label.from_conditions(cond_a, cond_b) if regular else None
    return ImpasseClass(q, regular, cond_a, cond_b, label, first, second, shortcut)


# -- equilibria ------------------------------------------------------------------

class EquilibriumKind(str, enum.Enum):
    SADDLE = "Saddle"
    NODE_STABLE = "NodeStable"
    NODE_UNSTABLE = "NodeUnstable"
    FOCUS = "Focus"
    CENTER_LIKE = "CenterLike"
    DEGENERATE = "Degenerate"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class EquilibriumType:
    """Linear type of an equilibrium of the adjoint field."""

    eigenvalues: tuple[complex, complex]
    eigenvector_count: int
    hyperbolic: bool
    kind: EquilibriumKind
    jacobian: np.ndarray
    eigenvectors: tuple[np.ndarray, ...] = ()

    @property
    def repeated(self) -> bool:
        a, b = self.eigenvalues
        return abs(a - b) <= ZERO_TOL * (1 + abs(a) + abs(b))


def type_from_jacobian(J: np.ndarray, tol: float = ZERO_TOL) -> EquilibriumType:
    e: Eig2 = eig2(J, tol=tol)
    lam1, lam2 = e.eigenvalues
    eps = tol * (1.0 + float(np.abs(J).max()))
    if abs(lam1.imag) > eps:
        if abs(lam1.real) <= eps:
            kind, hyper = EquilibriumKind.CENTER_LIKE, False
        else:
            kind, hyper = EquilibriumKind.FOCUS, True
    else:
        r1, r2 = lam1.real, lam2.real
        if abs(r1) <= eps or abs(r2) <= eps:
            kind, hyper = EquilibriumKind.DEGENERATE, False
        elif r1 * r2 < 0:
            kind, hyper = EquilibriumKind.SADDLE, True
        elif r1 < 0:
            kind, hyper = EquilibriumKind.NODE_STABLE, True
        else:
            kind, hyper = EquilibriumKind.NODE_UNSTABLE, True
    return EquilibriumType(e.eigenvalues, e.eigenvector_count, hyper, kind, J, e.eigenvectors)


def equilibrium_type(adj: AdjointField, q: Sequence[float], tol: float = ZERO_TOL) -> EquilibriumType:
    """Eigen analysis of the adjoint Jacobian at an equilibrium.

    Raises
    ------
    NotAnEquilibrium
    """
    q = (float(q[0]), float(q[1]))
    for c in adj.components:
        if not _is_zero(c, q, tol):
            raise NotAnEquilibrium(f"adjoint field is {_val(c, q):.3g} at {q}")
    return type_from_jacobian(adj.jacobian_at(q), tol)


@dataclass(frozen=True)
class AdjointEquilibrium:
    point: tuple[float, float]
    type: EquilibriumType
    on_impasse: bool


def adjoint_equilibria(cs: ConstrainedSystem | AdjointField, box: Box2 | None = None,
                       tol: float = ZERO_TOL, det: Poly | None = None) -> list[AdjointEquilibrium]:
    """All equilibria of the adjoint field in ``box``, typed.

    Raises
    ------
    BoxTooSmall
        If the components share a curve of zeros or a root cluster cannot
        be resolved.
    """
    box = box or Box2(-10.0, 10.0, -10.0, 10.0)
    if isinstance(cs, ConstrainedSystem):
        adj, det = adjoint(cs), cs.detA
    else:
        adj = cs
    P, Q = adj.components
    if P.is_zero() and Q.is_zero():
        raise BoxTooSmall("the adjoint field vanishes identically; every point is an equilibrium")
    common = gcd_bivariate(P, Q)
    if common.degree() > 0:
        raise BoxTooSmall(f"adjoint components share the factor {common}; equilibria are not isolated")
    out = []
    for q in isolate_zeros_2d(P, Q, box).points:
        t = equilibrium_type(adj, q, tol)
        on = det is not None and _is_zero(det, q, tol)
        out.append(AdjointEquilibrium(q, t, on))
    return out


# -- pseudo-impasse lines ----------------------------------------------------------

class Verdict(str, enum.Enum):
    TRANSVERSAL = "Transversal"
    INVARIANT = "Invariant"
    CONTAINS_SINGULAR_POINT = "ContainsSingularPointOfM"
    UNDETERMINED = "Undetermined"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LineVerdict:
    """Behaviour of X on the vertical line over a pseudo-impasse projection.

    ``basis`` names the result that decides the verdict.
    """

    point: tuple[float, float]
    verdict: Verdict
    contains_equilibria_of_X: bool
    basis: str
    singular_height: float | None = None
    equilibrium: EquilibriumType | None = None
    classification: ImpasseClass | None = None


def degree1_parts(X: VectorField3) -> tuple[Poly, Poly, Poly]:
    """``(alpha, beta0, beta1)`` for a field with z-free alpha and beta affine in z.

    Raises
    ------
    WrongForm
    """
    if X.alpha.degree_in("z") > 0:
        raise WrongForm(f"alpha = {X.alpha} depends on z")
    coeffs = X.beta.coefficients_in("z")
    if len(coeffs) > 2:
        raise WrongForm(f"beta = {X.beta} has degree {len(coeffs) - 1} in z")
    while len(coeffs) < 2:
        coeffs.append(Poly.zero(XY))
    return X.alpha.restrict(XY), coeffs[0].restrict(XY), coeffs[1].restrict(XY)


def degree1_adjoint(X: VectorField3, S: SurfaceSpec) -> AdjointField:
    """``(f alpha, g beta1 + f beta0)`` without any row cancellation."""
    alpha, b0, b1 = degree1_parts(X)
    return AdjointField((S.f * alpha, S.g * b1 + S.f * b0))


def _line_has_equilibria(X: VectorField3, q, alpha: Poly, b0: Poly, b1: Poly, tol: float) -> bool:
    # zeros of (alpha, beta0 + beta1 z, gamma) along {(q, z)}
    if not _is_zero(alpha, q, tol):
        return False
    gamma_q = X.gamma.substitute({"x": Fraction(q[0]), "y": Fraction(q[1])})
    gz = gamma_q.restrict(("z",)) if gamma_q else gamma_q
    if not _is_zero(b1, q, tol):
        z_star = -_val(b0, q) / _val(b1, q)
        if gamma_q.is_zero():
            return True
        fn = gz.to_function(("z",))
        scale = 1.0 + sum(abs(float(c)) * max(1.0, abs(z_star)) ** e[0] for e, c in gz.items())
        return abs(float(fn(z_star))) <= tol * scale
    if not _is_zero(b0, q, tol):
        return False
    if gamma_q.is_zero():
        return True
    coeffs = [float(c) for c in reversed([gz.terms.get((k,), 0) for k in range(gz.degree() + 1)])]
    big = max(abs(c) for c in coeffs)
    if all(abs(c) <= tol * big for c in coeffs[:-1]):
        return False
    roots = np.roots(coeffs)
    return bool(np.any(np.abs(roots.imag) <= 1e-7 * (1 + np.abs(roots))))


def analyze_line(X: VectorField3, S: SurfaceSpec, q: Sequence[float],
                 tol: float = ZERO_TOL) -> LineVerdict:
    """Verdict for the line ``{(q, z)}`` of the pseudo-impasse set.

    Decision order:

    1. hyperbolic RK point of first kind: Transversal, no equilibria;
    2. whole line singular (``grad f = grad g = 0``): Invariant when the
       adjoint linearization vanishes, else ContainsSingularPointOfM;
    3. ``grad f != 0`` and ``grad g`` parallel to it: ContainsSingularPointOfM;
    4. independent gradients, R of first and second kind: Invariant;
    5. independent gradients, RK: Invariant iff ``alpha(q) = 0``, else Transversal;
    6. Undetermined.

    All tests use the uncancelled adjoint ``(f alpha, g beta1 + f beta0)``.

    Raises
    ------
    WrongForm
        If X is not degree 1 (z-free alpha, beta affine in z).
    NotOnImpasse
        If q is not a common zero of f and g.
    """
    q = (float(q[0]), float(q[1]))
    alpha, b0, b1 = degree1_parts(X)
    if not (_is_zero(S.f, q, tol) and _is_zero(S.g, q, tol)):
        raise NotOnImpasse(f"{q} is not a common zero of f and g")
    adj = degree1_adjoint(X, S)
    J = adj.jacobian_at(q)
    eq = type_from_jacobian(J, tol)
    contains = _line_has_equilibria(X, q, alpha, b0, b1, tol)
    cs = ConstrainedSystem(((Poly.constant(1, XY), Poly.zero(XY)), (Poly.zero(XY), S.f)),
                           (alpha, S.g * b1 + S.f * b0), surface=S, field=X)
    cls = classify_impasse_point(cs, q, tol)
    label = cls.effective_label
    gf, gg = _grad(S.f, q), _grad(S.g, q)
    sf, sg = _grad_scale(S.f, q), _grad_scale(S.g, q)
    f_flat = np.linalg.norm(gf) <= tol * sf
    g_flat = np.linalg.norm(gg) <= tol * sg
    cross = gf[0] * gg[1] - gf[1] * gg[0]
    dependent = abs(cross) <= tol * sf * sg
    zero_jac = np.abs(J).max() <= tol * (1.0 + sum(_scale(c, q) for row in jacobian_adjoint(adj) for c in row))
    first = bool(cls.r_first_kind)
    second = bool(cls.r_second_kind)

    def verdict(v, basis, contains_eq=contains, height=None):
        return LineVerdict(q, v, contains_eq, basis, height, eq, cls)

    if cls.regular and label is Label.RK and first and eq.hyperbolic:
        return verdict(Verdict.TRANSVERSAL, "hyperbolic RK point of first kind: transversal, no equilibria",
                       False)
    if f_flat and g_flat:
        if zero_jac:
            return verdict(Verdict.INVARIANT,
                           "singular line: invariant iff the adjoint linearization vanishes")
        return verdict(Verdict.CONTAINS_SINGULAR_POINT,
                       "singular line with nonzero adjoint linearization")
    if dependent and not f_flat:
        i = int(np.argmax(np.abs(gf)))
        return verdict(Verdict.CONTAINS_SINGULAR_POINT,
                       "dependent gradients of f and g: singular point of M on the line",
                       height=float(gg[i] / gf[i]))
    if not dependent:
        if label is Label.R and first and second:
            return verdict(Verdict.INVARIANT, "independent gradients, R of first and second kind")
        if label is Label.RK:
            if _is_zero(alpha, q, tol):
                return verdict(Verdict.INVARIANT, "independent gradients, RK with alpha(q) = 0")
            return verdict(Verdict.TRANSVERSAL, "independent gradients, RK with alpha(q) != 0", False)
    return verdict(Verdict.UNDETERMINED, "no criterion applies")
