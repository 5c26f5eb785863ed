"""Numerical kernels shared by the analysis modules.

Integration is delegated to :func:`scipy.integrate.solve_ivp` with the
Dormand-Prince 4(5) pair; root isolation, Newton iterations, 2x2 eigen
analysis and return maps are implemented here.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BoxTooSmall, MaxIter, NoReturn, SingularJacobian
from .polynomial import Poly

__all__ = [
    "Termination",
    "Trajectory",
    "Box2",
    "Eig2",
    "integrate",
    "integrate_many",
    "find_zeros_2d",
    "isolate_zeros_2d",
    "ZeroIsolation",
    "newton",
    "eig2",
    "poincare_return",
    "finite_diff_jacobian",
    "thread_count",
]

IMPASSE_BAND = 1e-4
BLOWUP_NORM = 1e8


class Termination(str, enum.Enum):
    TIME_END = "TimeEnd"
    IMPASSE_PROXIMITY = "ImpasseProximity"
    BLOWUP = "Blowup"
    EVENT_HIT = "EventHit"

    def __str__(self):
        return self.value


@dataclass
class Trajectory:
    """Sampled orbit.

    Attributes
    ----------
    t : ndarray, shape (n,)
        Strictly increasing sample times.
    states : ndarray, shape (n, dim)
    termination : Termination
    event_index : int or None
        Index into the user event list when ``termination`` is EVENT_HIT.
    stats : dict
        ``nfev``, ``steps`` and, for constrained runs, ``min_abs_det``.
    """

    t: np.ndarray
    states: np.ndarray
    termination: Termination
    event_index: int | None = None
    stats: dict = dc_field(default_factory=dict)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.t[-1])

    def __len__(self):
        return len(self.t)


def _event(fn, direction=0.0):
    def ev(t, y):
        return fn(y)

    ev.terminal = True
    ev.direction = direction
    return ev


def integrate(field: Callable[[np.ndarray], np.ndarray], x0, t_end: float,
              rel_tol: float = 1e-8, abs_tol: float = 1e-10,
              events: Sequence[Callable[[np.ndarray], float]] = (),
              det: Callable[[np.ndarray], float] | None = None,
              delta: float = IMPASSE_BAND, blowup: float = BLOWUP_NORM,
              max_step: float = np.inf) -> Trajectory:
    """Integrate ``x' = field(x)`` from ``x0`` up to time ``t_end``.

    Parameters
    ----------
    field : callable
        Autonomous vector field on ndarrays.
    x0 : array_like
    t_end : float
        Final time; may be negative for backward integration.
    rel_tol, abs_tol : float
        Local error tolerances of the embedded pair.
    events : sequence of callables
        Scalar functionals; the run stops at the first sign change of any.
    det : callable, optional
        ``det A``; the run stops once ``|det A| <= delta``.
    blowup : float
        State norm treated as escape to infinity.

    Returns
    -------
    Trajectory
    """
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    x0 = np.asarray(x0, dtype=float)
    f0 = np.asarray(field(x0), dtype=float)
    if not np.all(np.isfinite(f0)):
        raise ValueError("field is not finite at the initial state")

    evs = [_event(fn, getattr(fn, "direction", 0.0)) for fn in events]
    n_user = len(evs)
    evs.append(_event(lambda y: blowup - float(np.max(np.abs(y)))))
    min_det = [math.inf]
    if det is not None:
        d0 = abs(float(det(x0)))
        min_det[0] = d0
        if d0 <= delta:
            return Trajectory(np.array([0.0]), x0[None, :], Termination.IMPASSE_PROXIMITY,
                              stats={"nfev": 1, "steps": 0, "min_abs_det": d0})

        # signed, so a sign change of det A inside one step is still one crossing
        side = math.copysign(1.0, float(det(x0)))

        def band(y):
            v = float(det(y))
            min_det[0] = min(min_det[0], abs(v))
            return side * v - delta

        evs.append(_event(band))

    def rhs(t, y):
        return field(y)

    sol = solve_ivp(rhs, (0.0, float(t_end)), x0, method="RK45", rtol=rel_tol, atol=abs_tol,
                    events=evs, max_step=max_step)
    t = np.asarray(sol.t)
    states = np.asarray(sol.y).T
    termination = Termination.TIME_END
    event_index = None
    if sol.status == 1:
        hit = [i for i, te in enumerate(sol.t_events) if len(te)]
        i = hit[0]
        if i < n_user:
            termination, event_index = Termination.EVENT_HIT, i
        elif i == n_user:
            termination = Termination.BLOWUP
        else:
            termination = Termination.IMPASSE_PROXIMITY
    elif sol.status == -1:
        termination = Termination.BLOWUP
    good = np.all(np.isfinite(states), axis=1)
    t, states = t[good], states[good]
    keep = np.concatenate([[True], np.diff(t) * np.sign(t_end or 1) > 0])
    stats = {"nfev": int(sol.nfev), "steps": max(len(t) - 1, 0)}
    if det is not None:
        stats["min_abs_det"] = float(min(min_det[0], np.min(np.abs([det(s) for s in states]))))
    return Trajectory(t[keep], states[keep], termination, event_index, stats)


def thread_count() -> int:
    """Worker count from ``IMPASSE_LAB_THREADS`` (default: cpu count)."""
    raw = os.environ.get("IMPASSE_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def integrate_many(field, seeds, t_end, threads: int | None = None, **kwargs) -> list[Trajectory]:
    """Integrate from every seed; results are in seed order."""
    threads = threads or thread_count()
    if threads == 1 or len(seeds) <= 1:
        return [integrate(field, s, t_end, **kwargs) for s in seeds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: integrate(field, s, t_end, **kwargs), seeds))


# -- interval root isolation --------------------------------------------------

@dataclass(frozen=True)
class Box2:
    """Axis-aligned box ``[x_lo, x_hi] x [y_lo, y_hi]``."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (self.x_hi > self.x_lo and self.y_hi > self.y_lo):
            raise ValueError("box must have positive widths")

    @classmethod
    def square(cls, half_width: float, center=(0.0, 0.0)) -> "Box2":
        cx, cy = center
        return cls(cx - half_width, cx + half_width, cy - half_width, cy + half_width)


def _down(a):
    return np.nextafter(a, -np.inf)


def _up(a):
    return np.nextafter(a, np.inf)


def _ipow(lo, hi, k):
    if k == 0:
        one = np.ones_like(lo)
        return one, one
    if k == 1:
        return lo, hi
    plo, phi = lo ** k, hi ** k
    if k % 2:
        return _down(plo), _up(phi)
    straddle = (lo <= 0) & (hi >= 0)
    mn = np.where(straddle, 0.0, np.minimum(plo, phi))
    mx = np.maximum(plo, phi)
    return np.where(straddle, 0.0, _down(mn)), _up(mx)


def _imul(alo, ahi, blo, bhi):
    c = np.stack([alo * blo, alo * bhi, ahi * blo, ahi * bhi])
    return _down(c.min(axis=0)), _up(c.max(axis=0))


class _IntervalPoly:
    """Monomial-wise interval enclosure of a bivariate polynomial."""

    def __init__(self, p: Poly, variables: tuple[str, str]):
        q = p.embed(tuple(dict.fromkeys(p.variables + variables)))
        extra = set(q.used_variables()) - set(variables)
        if extra:
            raise ValueError(f"polynomial depends on {sorted(extra)} beyond {variables}")
        ix, iy = q.variables.index(variables[0]), q.variables.index(variables[1])
        self.terms = [(float(c), e[ix], e[iy]) for e, c in q.items()]
        self.scale_terms = [(abs(c), i, j) for c, i, j in self.terms]
        self._dx = self._dy = None

    def enclose(self, xlo, xhi, ylo, yhi):
        lo = np.zeros_like(xlo)
        hi = np.zeros_like(xlo)
        for c, i, j in self.terms:
            mlo, mhi = _imul(*_ipow(xlo, xhi, i), *_ipow(ylo, yhi, j))
            tlo, thi = (c * mlo, c * mhi) if c >= 0 else (c * mhi, c * mlo)
            lo = _down(lo + _down(tlo))
            hi = _up(hi + _up(thi))
        return lo, hi

    def enclose_mean_value(self, xlo, xhi, ylo, yhi):
        """Naive enclosure intersected with the mean value form.

        The mean value form overestimates by O(width^2), which keeps the box
        count small near multiple roots.
        """
        lo, hi = self.enclose(xlo, xhi, ylo, yhi)
        if self._dx is None:
            self._dx = _IntervalPoly.__new__(_IntervalPoly)
            self._dx.terms = [(c * i, i - 1, j) for c, i, j in self.terms if i]
            self._dy = _IntervalPoly.__new__(_IntervalPoly)
            self._dy.terms = [(c * j, i, j - 1) for c, i, j in self.terms if j]
        cx, cy = 0.5 * (xlo + xhi), 0.5 * (ylo + yhi)
        clo, chi = self.enclose(cx, cx, cy, cy)
        gxlo, gxhi = self._dx.enclose(xlo, xhi, ylo, yhi)
        gylo, gyhi = self._dy.enclose(xlo, xhi, ylo, yhi)
        rx = _up(np.maximum(cx - xlo, xhi - cx))
        ry = _up(np.maximum(cy - ylo, yhi - cy))
        sx = _up(np.maximum(np.abs(gxlo), np.abs(gxhi)) * rx)
        sy = _up(np.maximum(np.abs(gylo), np.abs(gyhi)) * ry)
        spread = _up(sx + sy)
        return np.maximum(lo, _down(clo - spread)), np.minimum(hi, _up(chi + spread))

    def value(self, x, y):
        return sum(c * x ** i * y ** j for c, i, j in self.terms)

    def scale(self, x, y):
        # magnitudes floored at 1 so residuals near the origin stay meaningful
        ax, ay = np.maximum(np.abs(x), 1.0), np.maximum(np.abs(y), 1.0)
        return sum(c * ax ** i * ay ** j for c, i, j in self.scale_terms) + 1e-300

    def grad(self, x, y):
        gx = sum(c * i * x ** (i - 1) * y ** j for c, i, j in self.terms if i)
        gy = sum(c * j * x ** i * y ** (j - 1) for c, i, j in self.terms if j)
        return gx, gy


def _clusters(ix: np.ndarray, iy: np.ndarray) -> list[list[int]]:
    parent = list(range(len(ix)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    where = {(int(a), int(b)): k for k, (a, b) in enumerate(zip(ix, iy))}
    for k, (a, b) in enumerate(zip(ix, iy)):
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                other = where.get((int(a) + da, int(b) + db))
                if other is not None:
                    ra, rb = find(k), find(other)
                    if ra != rb:
                        parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for k in range(len(ix)):
        groups.setdefault(find(k), []).append(k)
    return list(groups.values())


def _newton_step(J, r):
    if abs(np.linalg.det(J)) > 1e-14 * max(1.0, np.abs(J).max() ** 2):
        return np.linalg.solve(J, r)
    return np.linalg.lstsq(J, r, rcond=None)[0]


def _polish(P: _IntervalPoly, Q: _IntervalPoly, start, tol_res, max_iter=60):
    """Newton (least squares near singular Jacobians) to relative residual tol_res.

    Iteration continues past the tolerance while the residual keeps falling,
    and roots with a near-singular Jacobian get a Gauss-Newton pass on
    ``(p, q, det J)``, which restores fast convergence at double roots.
    """
    def resid(z):
        r = np.array([P.value(*z), Q.value(*z)])
        return float(np.max(np.abs(r) / np.array([P.scale(*z), Q.scale(*z)])))

    z = np.array(start, dtype=float)
    best = (resid(z), z.copy())
    extra = 0
    for _ in range(max_iter):
        x, y = z
        r = np.array([P.value(x, y), Q.value(x, y)])
        J = np.array([P.grad(x, y), Q.grad(x, y)])
        try:
            step = _newton_step(J, r)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        z = z - step
        rel = resid(z)
        if rel < best[0]:
            best = (rel, z.copy())
        elif best[0] <= tol_res:
            break
        if best[0] <= tol_res:
            extra += 1
            if extra > 12 or rel == 0.0:
                break
    z, rel = best[1], best[0]
    if rel > tol_res:
        return z, rel
    J = np.array([P.grad(*z), Q.grad(*z)])
    if np.linalg.cond(J) < 1e6:
        return z, rel

    def aug(w):
        Jw = np.array([P.grad(*w), Q.grad(*w)])
        return np.array([P.value(*w), Q.value(*w), np.linalg.det(Jw)])

    w = z.copy()
    for _ in range(20):
        Ja = finite_diff_jacobian(aug, w, 1e-7 * (1 + np.abs(w)))
        try:
            step = np.linalg.lstsq(Ja, aug(w), rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        w = w - step
        if np.max(np.abs(step)) < 1e-15 * (1 + np.max(np.abs(w))):
            break
    if np.all(np.isfinite(w)) and np.max(np.abs(w - z)) < 1e-3 and resid(w) <= tol_res:
        return w, resid(w)
    return z, rel


def _subdivide(P, Q, xlo, xhi, ylo, yhi, tol, max_boxes):
    """Prune and bisect until every surviving box has widths <= tol."""
    while True:
        plo, phi = P.enclose_mean_value(xlo, xhi, ylo, yhi)
        qlo, qhi = Q.enclose_mean_value(xlo, xhi, ylo, yhi)
        keep = (plo <= 0) & (phi >= 0) & (qlo <= 0) & (qhi >= 0)
        xlo, xhi, ylo, yhi = xlo[keep], xhi[keep], ylo[keep], yhi[keep]
        if len(xlo) == 0:
            return xlo, xhi, ylo, yhi
        if len(xlo) > max_boxes:
            raise BoxTooSmall(f"more than {max_boxes} boxes survive; zero set may not be finite")
        split_x = (xhi[0] - xlo[0]) > tol
        split_y = (yhi[0] - ylo[0]) > tol
        if not (split_x or split_y):
            return xlo, xhi, ylo, yhi
        if split_x:
            xm = 0.5 * (xlo + xhi)
            xlo, xhi = np.concatenate([xlo, xm]), np.concatenate([xm, xhi])
            ylo, yhi = np.concatenate([ylo, ylo]), np.concatenate([yhi, yhi])
        if split_y:
            ym = 0.5 * (ylo + yhi)
            ylo, yhi = np.concatenate([ylo, ym]), np.concatenate([ym, yhi])
            xlo, xhi = np.concatenate([xlo, xlo]), np.concatenate([xhi, xhi])


def _snap_rational(p: Poly, q: Poly, z: np.ndarray, variables, max_den: int = 64,
                   radius: float = 1e-5) -> np.ndarray:
    """Replace ``z`` by a nearby small-denominator rational point if it is an exact root.

    Multiple roots converge slowly and stall a little off the true point; an
    exact check recovers them when they are rational.
    """
    cand = [Fraction(float(v)).limit_denominator(max_den) for v in z]
    if any(abs(float(c) - v) > radius * (1 + abs(v)) for c, v in zip(cand, z)):
        return z
    point = dict(zip(variables, cand))
    if p.evaluate(point) == 0 and q.evaluate(point) == 0:
        return np.array([float(c) for c in cand])
    return z


@dataclass(frozen=True)
class ZeroIsolation:
    """Common zeros found in a box.

    ``certified`` is True when every box that was not discarded by interval
    exclusion is accounted for by a polished root, so an empty ``points``
    list proves the absence of zeros in the box.
    """

    points: tuple[tuple[float, float], ...]
    certified: bool
    residuals: tuple[float, ...] = ()


def isolate_zeros_2d(p: Poly, q: Poly, box: Box2, tol: float = 1e-4,
                     variables: tuple[str, str] = ("x", "y"), residual: float = 1e-12,
                     merge: float = 1e-8, max_boxes: int = 400_000) -> ZeroIsolation:
    """Isolate the common real zeros of ``p`` and ``q`` inside ``box``.

    Branch and prune on interval enclosures, then one Newton polish per
    connected cluster of surviving boxes.  Clusters whose polish fails are
    refined further in an attempt to exclude them.

    Parameters
    ----------
    p, q : Poly
        Polynomials in ``variables`` only.
    box : Box2
    tol : float
        Box width at which subdivision stops.
    residual : float
        Relative residual required of a polished root.
    merge : float
        Roots closer than this are reported once.

    Raises
    ------
    BoxTooSmall
        If the surviving box count exceeds ``max_boxes`` (typically a common
        curve component) or a cluster with near-zero residual cannot be
        polished.
    """
    P, Q = _IntervalPoly(p, variables), _IntervalPoly(q, variables)
    xlo, xhi, ylo, yhi = _subdivide(P, Q, np.array([box.x_lo], float), np.array([box.x_hi], float),
                                    np.array([box.y_lo], float), np.array([box.y_hi], float),
                                    tol, max_boxes)
    if len(xlo) == 0:
        return ZeroIsolation((), True)

    wx, wy = xhi[0] - xlo[0], yhi[0] - ylo[0]
    ix = np.rint((xlo - box.x_lo) / wx).astype(np.int64)
    iy = np.rint((ylo - box.y_lo) / wy).astype(np.int64)
    cx, cy = 0.5 * (xlo + xhi), 0.5 * (ylo + yhi)
    roots: list[tuple[np.ndarray, float]] = []
    certified = True
    for members in _clusters(ix, iy):
        m = np.array(members)
        rel_center = (np.abs(P.value(cx[m], cy[m])) / P.scale(cx[m], cy[m])
                      + np.abs(Q.value(cx[m], cy[m])) / Q.scale(cx[m], cy[m]))
        bx = (xlo[m].min() - 2 * wx, xhi[m].max() + 2 * wx)
        by = (ylo[m].min() - 2 * wy, yhi[m].max() + 2 * wy)

        def accept(z, rel):
            return (rel <= residual and bx[0] <= z[0] <= bx[1] and by[0] <= z[1] <= by[1])

        found = None
        for k in m[np.argsort(rel_center)][:8]:
            z, rel = _polish(P, Q, (cx[k], cy[k]), residual)
            if accept(z, rel):
                found = (z, rel)
                break
        if found is not None:
            z = found[0]
            if box.x_lo <= z[0] <= box.x_hi and box.y_lo <= z[1] <= box.y_hi:
                roots.append(found)
            continue
        # no root located: try to exclude the cluster on finer boxes
        try:
            rest = _subdivide(P, Q, xlo[m], xhi[m], ylo[m], yhi[m], tol / 64, 50_000)
        except BoxTooSmall:
            rest = (m,)
        if len(rest[0]):
            if rel_center.min() < 1e-6:
                raise BoxTooSmall(f"unresolved cluster near ({cx[m][0]:.6g}, {cy[m][0]:.6g})")
            certified = False
    roots = [(_snap_rational(p, q, z, variables), rel) for z, rel in roots]
    merged: list[tuple[np.ndarray, float]] = []
    for z, rel in sorted(roots, key=lambda v: (v[0][0], v[0][1])):
        if not any(np.max(np.abs(z - w)) <= merge for w, _ in merged):
            merged.append((z, rel))
    points = tuple(tuple(0.0 if abs(v) < 1e-14 else float(v) for v in z) for z, _ in merged)
    return ZeroIsolation(points, certified, tuple(rel for _, rel in merged))


def find_zeros_2d(p: Poly, q: Poly, box: Box2, tol: float = 1e-4, **kwargs) -> list[tuple[float, float]]:
    """Common real zeros of ``p`` and ``q`` in ``box``, sorted lexicographically.

    See :func:`isolate_zeros_2d` for the parameters.
    """
    return list(isolate_zeros_2d(p, q, box, tol, **kwargs).points)


# -- Newton ------------------------------------------------------------------

def finite_diff_jacobian(fn: Callable, x, h: float | np.ndarray | None = None) -> np.ndarray:
    """Central-difference Jacobian; default step ``1e-6 * (1 + |x_i|)``."""
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(np.asarray(fn(x), dtype=float))
    steps = 1e-6 * (1 + np.abs(x)) if h is None else np.broadcast_to(np.asarray(h, float), x.shape)
    J = np.empty((f0.size, x.size))
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = steps[j]
        J[:, j] = (np.atleast_1d(fn(x + e)) - np.atleast_1d(fn(x - e))) / (2 * steps[j])
    return J


def newton(fn: Callable, x0, jac: Callable | None = None, tol: float = 1e-12,
           max_iter: int = 50, history: list | None = None) -> np.ndarray:
    """Solve ``fn(x) = 0`` by Newton's method.

    Parameters
    ----------
    fn : callable
        Map R^n -> R^n.
    x0 : array_like
    jac : callable, optional
        Jacobian; central differences when omitted.
    tol : float
        Required max-norm residual.
    history : list, optional
        Receives the iterates.

    Raises
    ------
    SingularJacobian, MaxIter
    """
    scalar = np.ndim(x0) == 0
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if scalar:
        fn_s, jac_s = fn, jac
        fn = lambda z: fn_s(z[0])  # noqa: E731
        jac = (lambda z: jac_s(z[0])) if jac_s else None
    jac = jac or (lambda z: finite_diff_jacobian(fn, z))
    for _ in range(max_iter + 1):
        if history is not None:
            history.append(x.copy())
        r = np.atleast_1d(np.asarray(fn(x), dtype=float))
        if not np.all(np.isfinite(r)):
            raise MaxIter(f"residual became non-finite at {x}")
        if np.max(np.abs(r)) <= tol:
            return x[0] if scalar else x
        J = np.atleast_2d(np.asarray(jac(x), dtype=float))
        try:
            cond = np.linalg.cond(J)
        except np.linalg.LinAlgError:
            cond = np.inf
        if not np.isfinite(cond) or cond > 1e14:
            raise SingularJacobian(f"Jacobian is singular at {x}")
        x = x - np.linalg.solve(J, r)
    raise MaxIter(f"no convergence within {max_iter} iterations (residual {np.max(np.abs(r)):.3g})")


# -- 2x2 eigen analysis ------------------------------------------------------

@dataclass(frozen=True)
class Eig2:
    """Eigen data of a real 2x2 matrix.

    ``eigenvector_count`` is the number of independent real eigenvectors
    (0 for a complex pair).
    """

    eigenvalues: tuple[complex, complex]
    eigenvector_count: int
    eigenvectors: tuple[np.ndarray, ...] = ()

    @property
    def is_real(self) -> bool:
        return all(abs(v.imag) == 0 for v in self.eigenvalues)

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvector_count


def _null_vector(B: np.ndarray, tol: float):
    # basis of the kernel of a 2x2 matrix of rank <= 1
    scale = max(1.0, np.abs(B).max())
    if np.abs(B).max() <= tol * scale:
        return [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    row = B[np.argmax(np.abs(B).max(axis=1))]
    v = np.array([-row[1], row[0]])
    return [v / np.linalg.norm(v)]


def eig2(m, tol: float = 1e-10) -> Eig2:
    """Closed-form eigenvalues of a 2x2 matrix from trace and determinant."""
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    half = tr / 2
    disc = half * half - det
    scale = max(1.0, half * half, abs(det))
    if disc < -tol * scale:
        s = math.sqrt(-disc)
        return Eig2((complex(half, s), complex(half, -s)), 0)
    if abs(disc) <= tol * scale:
        lam = half
        vecs = _null_vector(m - lam * np.eye(2), math.sqrt(tol))
        return Eig2((complex(lam), complex(lam)), len(vecs), tuple(vecs))
    s = math.sqrt(disc)
    # avoid cancellation in the smaller root
    big = half + math.copysign(s, half) if half != 0 else s
    small = det / big if big != 0 else half - s
    lams = sorted([big, small])
    vecs = tuple(_null_vector(m - lam * np.eye(2), math.sqrt(tol))[0] for lam in lams)
    return Eig2((complex(lams[0]), complex(lams[1])), 2, vecs)


# -- return maps ----------------------------------------------------------------

def poincare_return(field: Callable, normal, offset: float, x0, tol: float = 1e-10,
                    t_max: float = 1e3, rel_tol: float = 1e-10, abs_tol: float = 1e-12,
                    lift_off: float = 1e-8) -> tuple[np.ndarray, float]:
    """First return to the hyperplane ``normal . x = offset``.

    Only crossings in the same direction as the flow at ``x0`` count.

    Returns
    -------
    point : ndarray
    time : float

    Raises
    ------
    NoReturn
        If no return happens before ``t_max`` or the orbit escapes.
    """
    normal = np.asarray(normal, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    flux = float(normal @ np.asarray(field(x0), dtype=float))
    if flux == 0:
        raise NoReturn("flow is tangent to the section at the start point")
    d = math.copysign(1.0, flux)

    def s(y):
        return d * (float(normal @ y) - offset)

    leave = integrate(field, x0, t_max, rel_tol, abs_tol, events=[lambda y: s(y) - lift_off])
    if leave.termination is not Termination.EVENT_HIT:
        raise NoReturn("orbit never left the section")
    t1 = leave.final_time
    back = integrate(field, leave.final_state, t_max - t1, rel_tol, abs_tol,
                     events=[_directed(s, +1.0)])
    if back.termination is not Termination.EVENT_HIT:
        raise NoReturn(f"no return within t={t_max} ({back.termination})")
    return back.final_state, t1 + back.final_time


class _directed:
    # event functional restricted to one crossing direction
    def __init__(self, fn, direction):
        self.fn = fn
        self.direction = direction

    def __call__(self, y):
        return self.fn(y)
