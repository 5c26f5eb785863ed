"""Slow-fast families: reduced and layer problems, lifts and continuation."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.spatial.distance import directed_hausdorff

from impasse_lab.errors import (NewtonDiverged, NotNormallyHyperbolic, NotOnSlowManifold,
                                ReturnMapDiverged, WrongForm)
from impasse_lab.expr import parse_poly
from impasse_lab.numerics import integrate
from impasse_lab.slowfast import (NHKind, SlowFastFamily, continue_equilibrium, continue_periodic,
                                  hausdorff_distance, layer_field, lifted_field,
                                  normal_hyperbolicity, reduced_field)
from impasse_lab.surface import InvarianceKind, verify_invariance
from impasse_lab.systemfile import load_fixture

EPS = (0.1, 0.05, 0.025, 0.0125)


@pytest.fixture(scope="module")
def corrected():
    return load_fixture("spp_equilibrium").slowfast.family


@pytest.fixture(scope="module")
def cycle_setup():
    return load_fixture("spp_cycle").slowfast


@pytest.fixture(scope="module")
def cycle_result(cycle_setup):
    return continue_periodic(cycle_setup.family, cycle_setup.seed_orbit(), (0.1, 0.05),
                             cycle_setup.tol)


# -- pointwise problems -------------------------------------------------------

def test_family_splits_eps(corrected):
    assert corrected.H_at(0) == parse_poly("x - y^2")
    assert corrected.H_at(0.1) == parse_poly("x - y^2 - 1/10*z")
    assert corrected.slow_dim == 2 and corrected.beta_free_of_x()


def test_reduced_field_on_slow_manifold(corrected):
    # x = y^2 on S_0, so x' = 2 y y' = 2y(y + z)
    q = (1.0, 1.0, 0.5)
    x_dot, y_dot = reduced_field(corrected, q)
    assert y_dot == pytest.approx([1.5, 0.5])
    assert x_dot == pytest.approx(2 * 1.0 * 1.5)
    # tangent to S_0
    assert corrected.H_gradient(q) @ np.r_[x_dot, y_dot] == pytest.approx(0.0, abs=1e-12)


def test_reduced_field_preconditions(corrected):
    with pytest.raises(NotOnSlowManifold):
        reduced_field(corrected, (2.0, 1.0, 0.0))
    fold = SlowFastFamily.from_strings("x^2 - y", ["1", "0"])
    with pytest.raises(NotNormallyHyperbolic):
        reduced_field(fold, (0.0, 0.0, 0.0))


def test_layer_field_freezes_slow_variables(corrected):
    v = layer_field(corrected, (3.0, 1.0, 0.0))
    assert v == pytest.approx([2.0, 0.0, 0.0])


def test_normal_hyperbolicity(corrected):
    assert normal_hyperbolicity(corrected, (1.0, 1.0, 0.0)).kind is NHKind.REPELLING
    attracting = SlowFastFamily.from_strings("-x + y", ["1", "0"])
    assert normal_hyperbolicity(attracting, (1.0, 1.0, 0.0)).kind is NHKind.ATTRACTING
    fold = SlowFastFamily.from_strings("x^2 - y", ["1", "0"])
    nh = normal_hyperbolicity(fold, (0.0, 0.0, 0.0))
    assert nh.kind is NHKind.NOT_NH and nh.eigenvalue == 0.0
    with pytest.raises(NotOnSlowManifold):
        normal_hyperbolicity(corrected, (5.0, 0.0, 0.0))


def test_lifted_field_has_first_integral(corrected):
    X = lifted_field(corrected, 0.1)
    assert X.alpha == parse_poly("2*y*(y + z) + 1/10*(y - z)")
    H = corrected.H_at(0.1).embed(("x", "y", "z"))
    assert verify_invariance(X, H).kind is InvarianceKind.FIRST_INTEGRAL


def test_lift_and_reduced_problem_agree(corrected):
    # two routes to the eps = 0 slow flow: the 3D lift and beta alone
    X = lifted_field(corrected, 0).evaluator()
    lift = integrate(X, [0.25, 0.5, 0.1], 0.8, rel_tol=1e-11, abs_tol=1e-13)
    slow = integrate(lambda v: np.array([v[0] + v[1], v[0] - v[1]]), [0.5, 0.1], 0.8,
                     rel_tol=1e-11, abs_tol=1e-13)
    y, z = slow.final_state
    assert lift.final_state[1:] == pytest.approx([y, z], abs=1e-8)
    assert lift.final_state[0] == pytest.approx(y ** 2, abs=1e-8)


def test_lift_needs_constant_hx():
    with pytest.raises(WrongForm):
        lifted_field(SlowFastFamily.from_strings("x^2 - y", ["1", "0"]), 0.1)


# -- equilibria ----------------------------------------------------------------

def test_equilibrium_persists_at_origin(corrected):
    r = continue_equilibrium(corrected, (0, 0, 0), EPS)
    assert r.converged
    assert max(r.residuals) <= 1e-10 and max(r.distances) <= 1e-10
    assert all(np.allclose(p, 0) for p in r.items)


def test_shifted_equilibrium_distance_is_eps():
    s = load_fixture("spp_shifted").slowfast
    r = continue_equilibrium(s.family, s.point, EPS)
    assert r.converged
    assert np.allclose(r.distances, EPS, atol=1e-9)
    assert np.allclose([p[0] for p in r.items], EPS, atol=1e-9)


def test_equilibrium_errors(corrected):
    with pytest.raises(ValueError):
        continue_equilibrium(corrected, (1.0, 1.0, 1.0), EPS)
    with pytest.raises(ValueError):
        continue_equilibrium(corrected, (0, 0, 0), (0.01, 0.1))
    # the slow equilibrium disappears for eps > 0
    fam = SlowFastFamily.from_strings("x - y", ["y^2 + z^2 + eps", "z"])
    with pytest.raises(NewtonDiverged):
        continue_equilibrium(fam, (0, 0, 0), (0.1,))


# -- periodic orbits -----------------------------------------------------------

def test_hausdorff_matches_scipy():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=(50, 3)), rng.normal(size=(70, 3))
    ref = max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])
    assert hausdorff_distance(a, b) == pytest.approx(ref, rel=1e-12)
    assert hausdorff_distance(a, a) == 0.0


def test_base_cycle_is_the_unit_circle(cycle_result):
    base = cycle_result.base
    r = np.hypot(base.points[:, 1], base.points[:, 2])
    assert np.abs(r - 1).max() < 1e-6
    assert base.period == pytest.approx(2 * math.pi, rel=1e-6)
    assert base.return_error <= 1e-8
    assert base.multiplier == pytest.approx(math.exp(-4 * math.pi), rel=1e-2)


def test_cycles_lie_on_the_slow_manifold(cycle_setup, cycle_result):
    fam = cycle_setup.family
    for e, orbit in zip(cycle_result.eps_values, cycle_result.items):
        H = fam.H_at(e).to_function(("x", "y", "z"))
        assert max(abs(H(*p)) for p in orbit.points) < 1e-9
        assert abs(orbit.multiplier) < 1


def test_cycle_matches_long_time_integration(cycle_setup, cycle_result):
    # independent route: the cycle attracts, so a long run from inside converges to it
    e = cycle_result.eps_values[1]
    field = lambda v: np.array([-v[1] + v[0] * (1 - v @ v) + e,  # noqa: E731
                                v[0] + v[1] * (1 - v @ v) + e])
    warm = integrate(field, [0.3, 0.0], 40.0, rel_tol=1e-11, abs_tol=1e-13)
    orbit = cycle_result.items[1]
    lap = integrate(field, warm.final_state, orbit.period, rel_tol=1e-11, abs_tol=1e-13,
                    max_step=0.01)
    assert _distance_to_polyline(lap.states, orbit.points[:, 1:]) < 1e-6


def _distance_to_polyline(points, vertices):
    """Largest distance from ``points`` to the closed polyline through ``vertices``."""
    a, b = vertices[:-1], vertices[1:]
    ab = b - a
    worst = 0.0
    for p in points:
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.einsum("ij,ij->i", ab, ab), 0, 1)
        worst = max(worst, float(np.min(np.linalg.norm(a + t[:, None] * ab - p, axis=1))))
    return worst


def test_periodic_preconditions(cycle_setup):
    depends_on_x = SlowFastFamily.from_strings("x - y", ["x - z", "y"])
    with pytest.raises(WrongForm):
        continue_periodic(depends_on_x, cycle_setup.seed_orbit(), (0.1,))
    open_arc = cycle_setup.seed_orbit()[:200]
    with pytest.raises(ValueError):
        continue_periodic(cycle_setup.family, open_arc, (0.1,))


def test_linear_center_is_not_isolated():
    center = SlowFastFamily.from_strings("x - y", ["-z", "y"])
    th = np.linspace(0, 2 * math.pi, 101)
    seed = np.column_stack([np.cos(th), np.sin(th)])
    with pytest.raises(ReturnMapDiverged):
        continue_periodic(center, seed, (0.1,))
