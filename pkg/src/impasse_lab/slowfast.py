"""Slow-fast families with one fast variable.

The singularly perturbed system is ``eps x' = H_eps(x, y)``, ``y' = beta_eps(x, y)``
with ``y`` the slow variables.  At ``eps = 0`` the motion lies on the slow
manifold ``H_0 = 0``; where ``(H_0)_x != 0`` the surface is a graph
``x = Phi(y)`` and the flow on it is the reduced (slow) problem.  Equilibria
and hyperbolic cycles of the reduced problem persist for small ``eps``;
this module follows them numerically.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import (MaxIter, NewtonDiverged, NoReturn, NotNormallyHyperbolic, NotOnSlowManifold,
                     ReturnMapDiverged, SectionMiss, SingularJacobian, WrongForm)
from .expr import ExprSource, parse_poly
from .numerics import integrate, newton, poincare_return
from .polynomial import Poly
from .surface import VectorField3

__all__ = [
    "SlowFastFamily", "NHKind", "NormalHyperbolicity", "ContinuationResult", "PeriodicOrbit",
    "DEFAULT_EPS", "reduced_field", "layer_field", "normal_hyperbolicity", "lifted_field",
    "continue_equilibrium", "continue_periodic", "find_cycle", "hausdorff_distance",
]

DEFAULT_EPS = (0.1, 0.05, 0.025, 0.0125)


def _eps_series(coeffs: Sequence[Poly], eps) -> Poly:
    out = Poly.zero(coeffs[0].variables)
    power = Fraction(1)
    # floats go through their shortest repr, so 0.1 becomes 1/10
    e = Fraction(repr(eps)) if isinstance(eps, float) else Fraction(eps)
    for c in coeffs:
        out = out + c * power
        power *= e
    return out


class _Series:
    """Float evaluator of ``sum eps^k c_k`` together with its gradient."""

    def __init__(self, coeffs: Sequence[Poly], variables: tuple[str, ...]):
        self.values = [c.to_function(variables) for c in coeffs]
        self.grads = [[c.diff(v).to_function(variables) for v in variables] for c in coeffs]

    def __call__(self, point, eps: float) -> float:
        return float(sum(eps ** k * f(*point) for k, f in enumerate(self.values)))

    def gradient(self, point, eps: float) -> np.ndarray:
        return np.array([sum(eps ** k * g[i](*point) for k, g in enumerate(self.grads))
                         for i in range(len(self.grads[0]))], dtype=float)


@dataclass(frozen=True)
class SlowFastFamily:
    """``eps x' = sum_k eps^k H_k``, ``y_i' = sum_k eps^k beta_ik``.

    Attributes
    ----------
    H_coeffs : tuple of Poly
        Coefficients of the fast equation in powers of ``eps``, polynomials in
        ``("x",) + slow_vars``.
    beta : tuple of tuple of Poly
        One coefficient list per slow variable.
    slow_vars : tuple of str
    """

    H_coeffs: tuple[Poly, ...]
    beta: tuple[tuple[Poly, ...], ...]
    slow_vars: tuple[str, ...] = ("y", "z")
    _eval: dict = dc_field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.H_coeffs:
            raise ValueError("H_coeffs must be non-empty")
        if len(self.beta) != len(self.slow_vars):
            raise ValueError("one beta component per slow variable is required")
        if not 1 <= len(self.slow_vars) <= 2:
            raise ValueError("one or two slow variables are supported")
        variables = self.variables
        embed = lambda ps: tuple(p.embed(variables) for p in ps)
        object.__setattr__(self, "H_coeffs", embed(self.H_coeffs))
        object.__setattr__(self, "beta", tuple(embed(b) if b else (Poly.zero(variables),)
                                               for b in self.beta))
        self._eval["H"] = _Series(self.H_coeffs, variables)
        self._eval["beta"] = [_Series(b, variables) for b in self.beta]

    @classmethod
    def from_strings(cls, H: str, beta: Sequence[str],
                     slow_vars: Sequence[str] = ("y", "z")) -> "SlowFastFamily":
        """Parse expressions that may mention ``eps``."""
        slow_vars = tuple(slow_vars)
        names = ("x",) + slow_vars + ("eps",)
        split = lambda p: tuple(p.coefficients_in("eps")) or (Poly.zero(p.variables),)

        def coeffs(text):
            p = parse_poly(ExprSource(text, names)).embed(names)
            return tuple(c.embed(("x",) + slow_vars) for c in split(p))

        return cls(coeffs(H), tuple(coeffs(b) for b in beta), slow_vars)

    @property
    def variables(self) -> tuple[str, ...]:
        return ("x",) + tuple(self.slow_vars)

    @property
    def slow_dim(self) -> int:
        return len(self.slow_vars)

    def H_at(self, eps) -> Poly:
        """Exact ``H_eps``; a float ``eps`` is read as the decimal it prints as."""
        return _eps_series(self.H_coeffs, eps)

    def beta_at(self, eps) -> tuple[Poly, ...]:
        return tuple(_eps_series(b, eps) for b in self.beta)

    def H_value(self, p, eps: float = 0.0) -> float:
        return self._eval["H"](p, eps)

    def H_gradient(self, p, eps: float = 0.0) -> np.ndarray:
        return self._eval["H"].gradient(p, eps)

    def beta_value(self, p, eps: float = 0.0) -> np.ndarray:
        return np.array([b(p, eps) for b in self._eval["beta"]])

    def beta_jacobian(self, p, eps: float = 0.0) -> np.ndarray:
        return np.array([b.gradient(p, eps) for b in self._eval["beta"]])

    def beta_free_of_x(self) -> bool:
        return all(c.free_of("x") for b in self.beta for c in b)


def _point(fam: SlowFastFamily, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (1 + fam.slow_dim,):
        raise ValueError(f"expected a point with {1 + fam.slow_dim} coordinates")
    return q


def reduced_field(fam: SlowFastFamily, q, tol: float = 1e-9) -> tuple[float, np.ndarray]:
    """Velocity of the reduced problem at a point of the slow manifold.

    Returns
    -------
    x_dot : float
        ``-beta_0 . grad_y H_0 / (H_0)_x``.
    y_dot : ndarray
        ``beta_0(q)``.

    Raises
    ------
    NotOnSlowManifold
        If ``|H_0(q)| > tol``.
    NotNormallyHyperbolic
        If ``|(H_0)_x(q)| <= tol``.
    """
    q = _point(fam, q)
    h = fam.H_value(q)
    if abs(h) > tol:
        raise NotOnSlowManifold(f"H_0 = {h:.3g} at {tuple(q)}")
    grad = fam.H_gradient(q)
    if abs(grad[0]) <= tol:
        raise NotNormallyHyperbolic(f"(H_0)_x = {grad[0]:.3g} at {tuple(q)}")
    y_dot = fam.beta_value(q)
    return float(-(y_dot @ grad[1:]) / grad[0]), y_dot


def layer_field(fam: SlowFastFamily, p) -> np.ndarray:
    """Fast-time velocity with the slow variables frozen: ``(H_0(p), 0, ...)``."""
    p = _point(fam, p)
    out = np.zeros_like(p)
    out[0] = fam.H_value(p)
    return out


class NHKind(str, enum.Enum):
    REPELLING = "Repelling"
    ATTRACTING = "Attracting"
    NOT_NH = "NotNH"


@dataclass(frozen=True)
class NormalHyperbolicity:
    kind: NHKind
    eigenvalue: float


def normal_hyperbolicity(fam: SlowFastFamily, p, tol: float = 1e-9) -> NormalHyperbolicity:
    """Sign of the layer eigenvalue ``(H_0)_x`` at a point of ``H_0 = 0``."""
    p = _point(fam, p)
    h = fam.H_value(p)
    if abs(h) > tol:
        raise NotOnSlowManifold(f"H_0 = {h:.3g} at {tuple(p)}")
    lam = float(fam.H_gradient(p)[0])
    if lam > tol:
        return NormalHyperbolicity(NHKind.REPELLING, lam)
    if lam < -tol:
        return NormalHyperbolicity(NHKind.ATTRACTING, lam)
    return NormalHyperbolicity(NHKind.NOT_NH, lam)


def lifted_field(fam: SlowFastFamily, eps) -> VectorField3:
    """The field ``(-(beta . grad_y H_eps) / (H_eps)_x, beta)`` with ``H_eps`` as first integral.

    Requires two slow variables and a nonzero constant ``(H_eps)_x`` so that
    the field is polynomial.
    """
    if fam.slow_dim != 2:
        raise WrongForm("a three-dimensional field needs two slow variables")
    H = fam.H_at(eps)
    hx = H.diff("x")
    if not hx.is_constant() or hx.is_zero():
        raise WrongForm("(H_eps)_x must be a nonzero constant for a polynomial lift")
    beta, gamma = fam.beta_at(eps)
    y, z = fam.slow_vars
    alpha = (beta * H.diff(y) + gamma * H.diff(z)) * (-1 / hx.constant_value())
    rename = {y: "y", z: "z"}
    return VectorField3(alpha.rename(rename), beta.rename(rename), gamma.rename(rename))


# -- continuation --------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicOrbit:
    """A closed orbit of the reduced problem, lifted to ``H_eps = 0``.

    Attributes
    ----------
    points : ndarray, shape (n, 1 + slow_dim)
        Samples ``(x, y...)`` over one period.
    period : float
    section_point : ndarray
        Fixed point of the return map (slow coordinates).
    multiplier : float
        Derivative of the return map at the fixed point (nontrivial Floquet
        multiplier of the slow subsystem).
    return_error : float
        ``|R(s) - s|`` at the fixed point.
    """

    points: np.ndarray
    period: float
    section_point: np.ndarray
    multiplier: float
    return_error: float


@dataclass(frozen=True)
class ContinuationResult:
    """Objects followed along a decreasing ``eps`` grid.

    Attributes
    ----------
    eps_values : tuple of float
    items : tuple
        Equilibrium points (ndarray) or :class:`PeriodicOrbit` per ``eps``.
    distances : tuple of float
        Distance of each item to the ``eps = 0`` object.
    residuals : tuple of float
        Newton residual of each solve.
    converged : bool
    step_distances : tuple of float
        Distances between consecutive items.
    base : object
        The ``eps = 0`` object the distances refer to.
    """

    eps_values: tuple[float, ...]
    items: tuple
    distances: tuple[float, ...]
    residuals: tuple[float, ...]
    converged: bool
    step_distances: tuple[float, ...] = ()
    base: object = None


def _check_eps(eps_list) -> tuple[float, ...]:
    eps = tuple(float(e) for e in eps_list)
    if not eps:
        raise ValueError("eps list is empty")
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps values must be positive and strictly decreasing")
    return eps


def _is_converging(eps: tuple[float, ...], distances: Sequence[float], tol: float) -> bool:
    """Distances shrink along the grid and extrapolate linearly towards zero."""
    d = list(distances)
    slack = 10 * tol
    if any(b > a + slack for a, b in zip(d, d[1:])):
        return False
    if len(d) == 1:
        return d[0] <= slack
    e1, e2 = eps[-2], eps[-1]
    limit = d[-1] - e2 * (d[-2] - d[-1]) / (e1 - e2)
    return abs(limit) <= slack + 0.25 * d[-1]


def continue_equilibrium(fam: SlowFastFamily, p0, eps_list=DEFAULT_EPS,
                         tol: float = 1e-10) -> ContinuationResult:
    """Follow an equilibrium of the ``eps = 0`` system to positive ``eps``.

    Each ``eps`` solves ``(H_eps, beta_eps) = 0`` by Newton, seeded with the
    previous solution.

    Raises
    ------
    ValueError
        If ``p0`` is not an equilibrium at ``eps = 0``.
    NewtonDiverged
        If a Newton solve fails.
    """
    eps = _check_eps(eps_list)
    p0 = _point(fam, p0)

    def F(p, e):
        return np.concatenate([[fam.H_value(p, e)], fam.beta_value(p, e)])

    def J(p, e):
        return np.vstack([fam.H_gradient(p, e), fam.beta_jacobian(p, e)])

    if np.max(np.abs(F(p0, 0.0))) > max(tol, 1e-8):
        raise ValueError(f"{tuple(p0)} is not an equilibrium of the eps = 0 system")
    items, dist, res, steps = [], [], [], []
    seed = p0
    for e in eps:
        try:
            p = newton(lambda v: F(v, e), seed, jac=lambda v: J(v, e), tol=tol)
        except (MaxIter, SingularJacobian) as exc:
            raise NewtonDiverged(e, str(exc)) from exc
        res.append(float(np.max(np.abs(F(p, e)))))
        dist.append(float(np.linalg.norm(p - p0)))
        if items:
            steps.append(float(np.linalg.norm(p - items[-1])))
        items.append(p)
        seed = p
    ok = all(r <= tol for r in res) and _is_converging(eps, dist, tol)
    return ContinuationResult(eps, tuple(items), tuple(dist), tuple(res), ok, tuple(steps), p0)


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two finite point sets.

    Exact over the samples; nearest neighbours come from a k-d tree rather
    than the full distance matrix.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("point sets must be non-empty")
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba))


@dataclass(frozen=True)
class _Section:
    point: np.ndarray     # slow coordinates of the anchor
    normal: np.ndarray
    tangent: np.ndarray

    @property
    def offset(self) -> float:
        return float(self.normal @ self.point)

    def at(self, s: float) -> np.ndarray:
        return self.point + s * self.tangent


def _slow_field(fam: SlowFastFamily, eps: float):
    # beta is free of x here, so the slow subsystem closes on its own
    fns = [b.to_function(fam.slow_vars) for b in fam.beta_at(eps)]

    def field(y):
        return np.array([f(*y) for f in fns], dtype=float)
    return field


def _section_from_seed(fam: SlowFastFamily, slow: np.ndarray) -> _Section:
    anchor = slow[int(np.argmax(slow[:, 0]))]
    n = _slow_field(fam, 0.0)(anchor)
    norm = np.linalg.norm(n)
    if norm == 0:
        raise SectionMiss(0.0, "seed orbit passes through an equilibrium")
    n = n / norm
    return _Section(anchor.copy(), n, np.array([-n[1], n[0]]))


def _return_map(field, sec: _Section, eps: float, t_max: float):
    def R(s):
        try:
            y, t = poincare_return(field, sec.normal, sec.offset, sec.at(s), t_max=t_max,
                                   rel_tol=1e-11, abs_tol=1e-13)
        except NoReturn as exc:
            raise SectionMiss(eps, str(exc)) from exc
        return float(sec.tangent @ (y - sec.point)), t
    return R


def _lift(fam: SlowFastFamily, slow: np.ndarray, eps: float, x_start: float) -> np.ndarray:
    """Solve ``H_eps(x, y) = 0`` for ``x`` along the samples, continuing in ``x``."""
    xs = np.empty(len(slow))
    x = x_start
    for i, y in enumerate(slow):
        for _ in range(50):
            p = np.concatenate([[x], y])
            h = fam.H_value(p, eps)
            hx = fam.H_gradient(p, eps)[0]
            if hx == 0:
                raise NotNormallyHyperbolic(f"(H_eps)_x = 0 at {tuple(p)}")
            step = h / hx
            x -= step
            if abs(step) <= 1e-14 * (1 + abs(x)):
                break
        xs[i] = x
    return np.column_stack([xs, slow])


def find_cycle(fam: SlowFastFamily, eps: float, section: _Section, s0: float = 0.0,
               x_start: float = 0.0, tol: float = 1e-10, samples: int = 4000,
               t_max: float = 1e3, max_iter: int = 30) -> tuple[PeriodicOrbit, float]:
    """Closed orbit through ``section`` by Newton on the one-dimensional return map.

    Returns the lifted orbit and the section coordinate of its fixed point.

    Raises
    ------
    ReturnMapDiverged
        If Newton fails or the fixed point is not isolated (``R' = 1``).
    SectionMiss
        If an orbit leaves without returning to the section.
    """
    field = _slow_field(fam, eps)
    R = _return_map(field, section, eps, t_max)
    h = 1e-5
    s = s0
    for _ in range(max_iter):
        r, _t = R(s)
        g = r - s
        slope = (R(s + h)[0] - R(s - h)[0]) / (2 * h)
        if abs(slope - 1.0) < 1e-7:
            raise ReturnMapDiverged(eps, "return map has unit derivative; cycle is not isolated")
        if abs(g) <= tol:
            break
        s = s - g / (slope - 1.0)
        if not np.isfinite(s):
            raise ReturnMapDiverged(eps, "Newton step is not finite")
    else:
        raise ReturnMapDiverged(eps, f"no fixed point after {max_iter} Newton steps")
    y0 = section.at(s)
    traj = integrate(field, y0, _t, rel_tol=1e-11, abs_tol=1e-13, max_step=_t / samples)
    lifted = _lift(fam, traj.states, eps, x_start)
    orbit = PeriodicOrbit(lifted, float(_t), y0, float(slope), float(abs(g)))
    return orbit, s


def continue_periodic(fam: SlowFastFamily, seed_orbit, eps_list=DEFAULT_EPS,
                      tol: float = 1e-10, samples: int = 4000) -> ContinuationResult:
    """Follow a hyperbolic cycle of the reduced problem to positive ``eps``.

    The section is the line through the seed sample with largest first slow
    coordinate, normal to the ``eps = 0`` flow there.  The seed is first
    refined to an ``eps = 0`` cycle (``result.base``); distances are Hausdorff
    distances of the lifted orbits to it.

    Parameters
    ----------
    seed_orbit : array_like, shape (n, 1 + slow_dim) or (n, slow_dim)
        Samples of a closed curve; slow-only samples are lifted to ``H_0 = 0``.
    """
    if fam.slow_dim != 2:
        raise WrongForm("periodic orbits need two slow variables")
    if not fam.beta_free_of_x():
        raise WrongForm("the slow equations must not depend on the fast variable")
    eps = _check_eps(eps_list)
    seed = np.atleast_2d(np.asarray(seed_orbit, dtype=float))
    slow = seed[:, 1:] if seed.shape[1] == 3 else seed
    if slow.shape[1] != 2 or len(slow) < 3:
        raise ValueError("seed orbit must be an (n, 2) or (n, 3) array with n >= 3")
    spacing = float(np.max(np.linalg.norm(np.diff(slow, axis=0), axis=1)))
    if np.linalg.norm(slow[0] - slow[-1]) > max(tol, 2 * spacing):
        raise ValueError("seed orbit is not closed")

    section = _section_from_seed(fam, slow)
    x_start = float(seed[0, 0]) if seed.shape[1] == 3 else 0.0
    base, s = find_cycle(fam, 0.0, section, 0.0, x_start, tol, samples)
    items, dist, res, steps = [], [], [], []
    prev = base
    for e in eps:
        orbit, s = find_cycle(fam, e, section, s, float(prev.points[0, 0]), tol, samples)
        items.append(orbit)
        res.append(orbit.return_error)
        dist.append(hausdorff_distance(orbit.points, base.points))
        steps.append(hausdorff_distance(orbit.points, prev.points))
        prev = orbit
    ok = (all(r <= tol for r in res) and all(abs(o.multiplier) < 1 for o in items)
          and _is_converging(eps, dist, tol))
    return ContinuationResult(eps, tuple(items), tuple(dist), tuple(res), ok, tuple(steps), base)
