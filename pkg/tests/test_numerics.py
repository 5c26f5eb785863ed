"""Integrator, root isolation, Newton, eigen analysis and return maps."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from impasse_lab.errors import MaxIter, NoReturn, SingularJacobian
from impasse_lab.expr import parse_poly
from impasse_lab.numerics import (Box2, Termination, eig2, find_zeros_2d, finite_diff_jacobian,
                                  integrate, integrate_many, isolate_zeros_2d, newton,
                                  poincare_return, thread_count)
from impasse_lab.polynomial import Poly

XY = ("x", "y")


def P(text):
    return parse_poly(text, XY)


def rotation(v):
    return np.array([-v[1], v[0]])


# -- integrate ---------------------------------------------------------------

def test_harmonic_oscillator_matches_exact_solution():
    tr = integrate(rotation, [1.0, 0.0], 2 * math.pi, rel_tol=1e-10, abs_tol=1e-12)
    assert tr.termination is Termination.TIME_END
    assert tr.final_time == pytest.approx(2 * math.pi)
    exact = np.column_stack([np.cos(tr.t), np.sin(tr.t)])
    assert np.abs(tr.states - exact).max() < 1e-8


def test_backward_integration():
    tr = integrate(lambda v: -v, [1.0], -1.0, rel_tol=1e-10, abs_tol=1e-12)
    assert np.all(np.diff(tr.t) < 0)
    assert tr.final_state[0] == pytest.approx(math.e, rel=1e-8)


def test_event_location_accuracy():
    # x' = 1 from 0 crosses x = 0.3 at t = 0.3; x(t) = sin t crosses 0.5 at pi/6
    tr = integrate(lambda v: np.array([1.0]), [0.0], 5.0, events=[lambda v: v[0] - 0.3])
    assert tr.termination is Termination.EVENT_HIT and tr.event_index == 0
    assert abs(tr.final_time - 0.3) < 1e-10
    tr = integrate(rotation, [1.0, 0.0], 5.0, rel_tol=1e-12, abs_tol=1e-14,
                   events=[lambda v: v[1] - 0.5])
    assert abs(tr.final_time - math.pi / 6) < 1e-10


def test_blowup_is_reported():
    # x' = x^2 from 1 explodes at t = 1
    tr = integrate(lambda v: v ** 2, [1.0], 2.0)
    assert tr.termination is Termination.BLOWUP
    assert tr.final_time < 1.0


def test_impasse_band_stops_the_run():
    tr = integrate(lambda v: np.array([-1.0, 0.0]), [1.0, 0.0], 5.0, det=lambda v: v[0],
                   delta=1e-4)
    assert tr.termination is Termination.IMPASSE_PROXIMITY
    assert tr.final_state[0] == pytest.approx(1e-4, abs=1e-9)
    assert tr.stats["min_abs_det"] == pytest.approx(1e-4, abs=1e-9)


def test_start_inside_band():
    tr = integrate(rotation, [0.0, 1.0], 1.0, det=lambda v: v[0])
    assert tr.termination is Termination.IMPASSE_PROXIMITY and len(tr) == 1


def test_invalid_tolerances():
    with pytest.raises(ValueError):
        integrate(rotation, [1.0, 0.0], 1.0, rel_tol=0.0)


def test_integrate_many_keeps_seed_order():
    seeds = [[r, 0.0] for r in (1.0, 2.0, 3.0, 4.0)]
    runs = integrate_many(rotation, seeds, 1.0, threads=3)
    assert [tr.states[0, 0] for tr in runs] == [1.0, 2.0, 3.0, 4.0]
    serial = integrate_many(rotation, seeds, 1.0, threads=1)
    assert all(np.array_equal(a.states, b.states) for a, b in zip(runs, serial))


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("IMPASSE_LAB_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("IMPASSE_LAB_THREADS", "zero")
    assert thread_count() >= 1


# -- root isolation ----------------------------------------------------------

def test_simple_intersection():
    zs = find_zeros_2d(P("x^2 + y^2 - 4"), P("x - y"), Box2(-3, 3, -3, 3))
    r = math.sqrt(2)
    assert len(zs) == 2
    assert np.allclose(sorted(zs), [(-r, -r), (r, r)], atol=1e-12)


def test_certified_empty():
    iso = isolate_zeros_2d(P("x^2 + y^2 + 1"), P("x"), Box2(-3, 3, -3, 3))
    assert iso.points == () and iso.certified


def test_multiple_root_is_found():
    # tangential intersection of a parabola and a line
    zs = find_zeros_2d(P("y - x^2"), P("y"), Box2(-1, 1, -1, 1))
    assert len(zs) == 1 and max(abs(v) for v in zs[0]) < 1e-6


def test_box_must_have_positive_widths():
    with pytest.raises(ValueError):
        Box2(1, 1, 0, 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=3,
                unique_by=lambda t: t[0]))
def test_grid_roots_are_all_found(roots):
    # p = prod (x - a_i), q = Lagrange-style y - l(x) through the chosen points
    x, y = Poly.variable("x", XY), Poly.variable("y", XY)
    p = Poly.constant(1, XY)
    for a, _ in roots:
        p = p * (x - Fraction(a, 2))
    interp = Poly.zero(XY)
    for i, (a, b) in enumerate(roots):
        term = Poly.constant(Fraction(b, 2), XY)
        for j, (c, _) in enumerate(roots):
            if j != i:
                term = term * (x - Fraction(c, 2)) * Fraction(1, 1) / (Fraction(a, 2) - Fraction(c, 2))
        interp = interp + term
    q = y - interp
    zs = find_zeros_2d(p, q, Box2(-4.1, 4.1, -4.1, 4.1))
    want = sorted((a / 2, b / 2) for a, b in roots)
    assert len(zs) == len(want)
    assert np.allclose(zs, want, atol=1e-9)


# -- Newton, Jacobians, eigenvalues -------------------------------------------

def test_newton_converges_quadratically():
    hist = []
    x = newton(lambda v: np.array([v[0] ** 2 - 2, v[1] - v[0]]), [1.0, 0.0], history=hist)
    assert x == pytest.approx([math.sqrt(2)] * 2, abs=1e-12)
    assert len(hist) < 10


def test_newton_scalar():
    assert newton(lambda t: t ** 3 - 8, 3.0) == pytest.approx(2.0)


def test_newton_errors():
    with pytest.raises(SingularJacobian):
        newton(lambda v: np.array([v[0] ** 2 + 1]), [0.0], jac=lambda v: np.array([[2 * v[0]]]))
    with pytest.raises(MaxIter):
        newton(lambda v: np.array([v[0] ** 2 + 1]), [0.5], max_iter=5)


def test_finite_difference_jacobian():
    fn = lambda v: np.array([v[0] * v[1], math.sin(v[0])])  # noqa: E731
    J = finite_diff_jacobian(fn, [0.3, 2.0])
    assert J == pytest.approx(np.array([[2.0, 0.3], [math.cos(0.3), 0.0]]), abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=4, max_size=4))
def test_eig2_matches_numpy(entries):
    m = np.array(entries, dtype=float).reshape(2, 2)
    ours = sorted(eig2(m).eigenvalues, key=lambda z: (z.real, z.imag))
    ref = sorted(np.linalg.eigvals(m), key=lambda z: (z.real, z.imag))
    assert all(abs(a - b) < 1e-6 * (1 + abs(b)) for a, b in zip(ours, ref))


def test_eig2_eigenvector_counts():
    assert eig2([[2.0, 0.0], [0.0, 2.0]]).eigenvector_count == 2
    assert eig2([[2.0, 1.0], [0.0, 2.0]]).eigenvector_count == 1
    assert eig2([[0.0, -1.0], [1.0, 0.0]]).eigenvector_count == 0


# -- return maps ---------------------------------------------------------------

def test_poincare_return_on_circle():
    pt, T = poincare_return(rotation, [0.0, 1.0], 0.0, [1.0, 0.0])
    assert T == pytest.approx(2 * math.pi, abs=1e-8)
    assert pt == pytest.approx([1.0, 0.0], abs=1e-8)


def test_no_return():
    with pytest.raises(NoReturn):
        poincare_return(lambda v: np.array([1.0, 0.0]), [1.0, 0.0], 0.0, [0.0, 0.0], t_max=5.0)
