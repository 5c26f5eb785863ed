"""Impasse-point labels, equilibrium types and pseudo-impasse line verdicts."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from impasse_lab.classify import (EquilibriumKind, Label, Verdict, adjoint_equilibria, analyze_line,
                                  classify_impasse_point, equilibrium_type, shortcut_label,
                                  type_from_jacobian)
from impasse_lab.errors import BoxTooSmall, NotAnEquilibrium, NotOnImpasse, WrongForm
from impasse_lab.reduction import ConstrainedSystem, adjoint, cancel_row_factors, reduce_general
from impasse_lab.surface import SurfaceSpec, VectorField3
from impasse_lab.systemfile import load_fixture


def cancelled(name):
    s = load_fixture(name)
    return s, cancel_row_factors(reduce_general(s.field, s.surface))[0]


def direct(A, F):
    return ConstrainedSystem.direct(A, F)


def test_nonsingular_line():
    cs = direct([["1", "0"], ["0", "y"]], ["0", "1"])
    for c in (-2.0, 0.0, 3.0):
        assert classify_impasse_point(cs, (c, 0.0)).label is Label.NON_SINGULAR


def test_k_singularity():
    cs = direct([["1", "0"], ["0", "x + y^2"]], ["0", "1"])
    c = classify_impasse_point(cs, (0.0, 0.0))
    assert c.label is Label.K
    assert not c.cond_a and c.cond_b


def test_r_singularity_of_second_kind():
    s, cs = cancelled("example_saddle")
    c = classify_impasse_point(cs, (0.0, 0.0))
    assert c.label is Label.R
    assert c.r_second_kind and not c.r_first_kind


def test_rk_first_kind_falkner_skan():
    _, cs = cancelled("falkner_skan")
    for q in ((0.0, 1.0), (0.0, -1.0)):
        c = classify_impasse_point(cs, q)
        assert c.label is Label.RK and c.r_first_kind


def test_not_on_impasse():
    _, cs = cancelled("falkner_skan")
    with pytest.raises(NotOnImpasse):
        classify_impasse_point(cs, (1.0, 0.0))


def test_non_regular_point_has_no_label():
    cs = direct([["1", "0"], ["0", "y^2"]], ["0", "1"])
    c = classify_impasse_point(cs, (0.0, 0.0))
    assert not c.regular and c.label is None


@pytest.mark.parametrize("name, points", [
    ("falkner_skan", [(0.0, 1.0), (0.0, -1.0)]),
    ("example_nonsingular", [(3.0, 0.0), (0.0, 0.0)]),
    ("example_fold", [(0.0, 0.0), (-1.0, 1.0)]),
    ("example_saddle", [(0.0, 0.0), (1.0, 1.0)]),
    ("example_focus", [(0.0, 0.0), (2.0, 0.0)]),
])
def test_shortcut_agrees_with_conditions(name, points):
    # only where grad f != 0, i.e. where the uncancelled impasse is regular
    s, cs = cancelled(name)
    for q in points:
        assert any(float(s.surface.f.diff(v).evaluate(q)) != 0 for v in ("x", "y"))
        assert classify_impasse_point(cs, q).label is shortcut_label(s.surface, s.field, q)


def test_saddle_example_eigen_data():
    _, cs = cancelled("example_saddle")
    t = equilibrium_type(adjoint(cs), (0.0, 0.0))
    assert t.kind is EquilibriumKind.SADDLE and t.hyperbolic
    assert sorted(z.real for z in t.eigenvalues) == pytest.approx([-1.0, 2.0])
    dirs = sorted(tuple(v / v[0]) for v in t.eigenvectors)
    assert dirs[0] == pytest.approx((1.0, 0.0), abs=1e-12)
    assert dirs[1] == pytest.approx((1.0, 3.0), abs=1e-12)


def test_focus_example():
    _, cs = cancelled("example_focus")
    t = equilibrium_type(adjoint(cs), (0.0, 0.0))
    assert t.kind is EquilibriumKind.FOCUS
    want = complex(-0.5, math.sqrt(7) / 2)
    assert min(abs(z - want) for z in t.eigenvalues) < 1e-12


def test_falkner_skan_nodes():
    _, cs = cancelled("falkner_skan")
    adj = adjoint(cs)
    up = equilibrium_type(adj, (0.0, 1.0))
    down = equilibrium_type(adj, (0.0, -1.0))
    assert up.kind is EquilibriumKind.NODE_UNSTABLE and up.repeated
    assert down.kind is EquilibriumKind.NODE_STABLE
    assert all(abs(z - 2) < 1e-12 for z in up.eigenvalues)


def test_not_an_equilibrium():
    _, cs = cancelled("falkner_skan")
    with pytest.raises(NotAnEquilibrium):
        equilibrium_type(adjoint(cs), (1.0, 1.0))


@pytest.mark.parametrize("J, kind", [
    ([[1, 0], [0, -1]], EquilibriumKind.SADDLE),
    ([[-1, 0], [0, -3]], EquilibriumKind.NODE_STABLE),
    ([[2, 1], [0, 2]], EquilibriumKind.NODE_UNSTABLE),
    ([[-1, -2], [2, -1]], EquilibriumKind.FOCUS),
    ([[0, -1], [1, 0]], EquilibriumKind.CENTER_LIKE),
    ([[0, 1], [0, 0]], EquilibriumKind.DEGENERATE),
    ([[0, 0], [0, 0]], EquilibriumKind.DEGENERATE),
])
def test_type_from_jacobian(J, kind):
    t = type_from_jacobian(np.array(J, dtype=float))
    assert t.kind is kind
    assert t.hyperbolic == (kind not in (EquilibriumKind.CENTER_LIKE, EquilibriumKind.DEGENERATE))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=4, max_size=4))
def test_eigenvalues_match_numpy(entries):
    J = np.array(entries).reshape(2, 2)
    ours = sorted(type_from_jacobian(J).eigenvalues, key=lambda z: (z.real, z.imag))
    ref = sorted(np.linalg.eigvals(J), key=lambda z: (z.real, z.imag))
    scale = 1 + np.abs(J).max()
    # closed form near a double root loses half the digits
    assert all(abs(a - b) <= 1e-4 * scale for a, b in zip(ours, ref))


def test_adjoint_equilibria_falkner_skan():
    _, cs = cancelled("falkner_skan")
    eqs = adjoint_equilibria(cs)
    assert sorted(e.point for e in eqs) == [(0.0, -1.0), (0.0, 1.0)]
    assert all(e.on_impasse for e in eqs)


def test_adjoint_equilibria_rejects_shared_curves():
    s = load_fixture("lorenz_a")
    with pytest.raises(BoxTooSmall):
        adjoint_equilibria(reduce_general(s.field, s.surface))


def test_line_verdicts():
    s = load_fixture("falkner_skan")
    v = analyze_line(s.field, s.surface, (0.0, 1.0))
    assert v.verdict is Verdict.TRANSVERSAL and not v.contains_equilibria_of_X
    s = load_fixture("lorenz_a")
    assert analyze_line(s.field, s.surface, (0.0, 0.0)).verdict is Verdict.INVARIANT


def test_line_with_singular_point_of_M():
    # f = x, g = 2x + y^2: grad f and grad g are parallel at the origin
    X = VectorField3.from_strings("2*y", "z - 2", "0")
    S = SurfaceSpec.from_strings("x", "2*x + y^2")
    v = analyze_line(X, S, (0.0, 0.0))
    assert v.verdict is Verdict.CONTAINS_SINGULAR_POINT
    assert v.singular_height == pytest.approx(2.0)


def test_line_needs_degree1_field():
    X = VectorField3.from_strings("0", "z^2", "0")
    with pytest.raises(WrongForm):
        analyze_line(X, SurfaceSpec.from_strings("x", "y"), (0.0, 0.0))
