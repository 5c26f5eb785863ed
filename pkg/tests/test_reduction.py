"""Reductions to planar constrained systems, adjoints and the catastrophe catalog."""

from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from conftest import SX, SY, SZ, surface_fixtures, to_sympy
from impasse_lab.classify import degree1_adjoint
from impasse_lab.errors import UnknownNormalForm, UnsupportedPotential
from impasse_lab.expr import parse_poly
from impasse_lab.numerics import IMPASSE_BAND, Termination
from impasse_lab.reduction import (TAKENS_NAMES, ConstrainedSystem, Provenance, adjoint,
                                   cancel_row_factors, integrate_constrained, reduce_general,
                                   reduce_potential, takens_catalog)
from impasse_lab.surface import SurfaceSpec, VectorField3
from impasse_lab.systemfile import load_fixture

XY = ("x", "y")


def P(text):
    return parse_poly(text, XY)


@pytest.mark.parametrize("name", surface_fixtures())
def test_reduction_reproduces_projected_field(name):
    # A_ii * X_i(x, y, g/f) = F_i as rational functions
    s = load_fixture(name)
    cs = reduce_general(s.field, s.surface)
    height = to_sympy(s.surface.g) / to_sympy(s.surface.f)
    for i, comp in enumerate(s.field.components[:2]):
        on_M = to_sympy(comp).subs(SZ, height)
        lhs = to_sympy(cs.A[i][i]) * on_M - to_sympy(cs.F[i])
        assert sp.simplify(sp.together(lhs)) == 0
    assert cs.A[0][1].is_zero() and cs.A[1][0].is_zero()


@pytest.mark.parametrize("name", surface_fixtures())
def test_cancellation_preserves_the_system(name):
    s = load_fixture(name)
    cs = reduce_general(s.field, s.surface)
    cc, removed = cancel_row_factors(cs)
    assert cc.provenance is Provenance.CANCELLED
    for i in range(2):
        k = removed[i]
        assert [a * k for a in cc.A[i]] == list(cs.A[i])
        assert cc.F[i] * k == cs.F[i]
        # nothing left to cancel
        _, again = cancel_row_factors(cc)
        assert again[i].is_constant()


@pytest.mark.parametrize("name", surface_fixtures())
def test_adjoint_identity_is_exact(name):
    s = load_fixture(name)
    cs = cancel_row_factors(reduce_general(s.field, s.surface))[0]
    a = adjoint(cs).components
    for i in range(2):
        assert cs.A[i][0] * a[0] + cs.A[i][1] * a[1] == cs.detA * cs.F[i]


def test_adjoint_matches_sympy_adjugate():
    cs = ConstrainedSystem.direct([["x + y", "x*y"], ["1", "y^2 - x"]], ["x", "1 - y"])
    A = sp.Matrix([[to_sympy(e) for e in row] for row in cs.A])
    F = sp.Matrix([to_sympy(c) for c in cs.F])
    ref = A.adjugate() * F
    ours = [to_sympy(c) for c in adjoint(cs).components]
    assert all(sp.expand(o - r) == 0 for o, r in zip(ours, ref))
    assert sp.expand(to_sympy(cs.detA) - A.det()) == 0


def test_adjoint_jacobian_matches_sympy():
    s = load_fixture("falkner_skan")
    adj = adjoint(cancel_row_factors(reduce_general(s.field, s.surface))[0])
    comps = [to_sympy(c) for c in adj.components]
    ref = sp.Matrix(comps).jacobian([SX, SY])
    J = adj.jacobian()
    for i in range(2):
        for j in range(2):
            assert sp.expand(to_sympy(J[i][j]) - ref[i, j]) == 0


def test_falkner_skan_reduction_text():
    s = load_fixture("falkner_skan")
    cs = reduce_general(s.field, s.surface)
    assert str(cs) == "x' = y; (2*x)*y' = y^2 - 1"
    assert cs.provenance is Provenance.DEGREE1
    assert cs.detA == P("2*x")


def test_degree1_adjoint_agrees_with_general():
    s = load_fixture("falkner_skan")
    a1 = degree1_adjoint(s.field, s.surface).components
    a2 = adjoint(reduce_general(s.field, s.surface)).components
    assert list(a1) == list(a2)


def test_constant_f_gives_smooth_system():
    X = VectorField3.from_strings("y", "x*z", "0")
    cs = reduce_general(X, SurfaceSpec.from_strings("1", "x^2"))
    assert cs.is_smooth
    assert cs.F == (P("y"), P("x^3"))


def test_lorenz_a_cancellation_removes_x():
    s = load_fixture("lorenz_a")
    _, removed = cancel_row_factors(reduce_general(s.field, s.surface))
    assert any(k.primitive() == P("x") for k in removed)


def test_is_smooth_certificate():
    smooth = ConstrainedSystem.direct([["x^2 + 12", "0"], ["0", "1"]], ["1", "0"])
    assert smooth.is_smooth
    assert not ConstrainedSystem.direct([["x^2 - 1", "0"], ["0", "1"]], ["1", "0"]).is_smooth
    assert not ConstrainedSystem.direct([["0", "0"], ["0", "1"]], ["1", "0"]).is_smooth


def test_catalog_has_twelve_entries():
    assert len(TAKENS_NAMES) == 12
    with pytest.raises(UnknownNormalForm):
        takens_catalog("swallowtail")


def test_cusp_saddle_entry():
    spec = takens_catalog("cusp-saddle")
    assert spec.V == parse_poly("1/3*x^3 + y*x")
    assert [str(c) for c in spec.X.components] == ["0", "-z", "1"]


def test_reduce_potential_cusp_source():
    spec = takens_catalog("cusp-source")
    cs = reduce_potential(spec.V, spec.X.beta, spec.X.gamma)
    assert cs.detA == P("-2*x")
    assert list(adjoint(cs).components) == [P("3*x + y"), P("-2*x")]


def test_reduce_potential_rejects_unsupported():
    with pytest.raises(UnsupportedPotential):
        reduce_potential(parse_poly("x*y^2"), parse_poly("1"), parse_poly("0"))
    with pytest.raises(UnsupportedPotential):
        reduce_potential(parse_poly("x^2*y"), parse_poly("1"), parse_poly("0"))


def test_integrate_constrained_stops_at_impasse():
    # 2x x' = 1 reaches x = 0 backward in time, within one large step
    cs = ConstrainedSystem.direct([["2*x", "0"], ["0", "1"]], ["1", "0"])
    tr = integrate_constrained(cs, (1.0, 0.0), -5.0)
    assert tr.termination is Termination.IMPASSE_PROXIMITY
    assert abs(2 * tr.final_state[0]) <= IMPASSE_BAND * 1.01
    # adjoint time: x' = 1, so x = 1 + t
    assert np.allclose(tr.states[:, 0], 1 + tr.t, atol=1e-9)


def test_integrate_constrained_orientation_on_negative_det():
    cs = ConstrainedSystem.direct([["2*x", "0"], ["0", "1"]], ["1", "0"])
    tr = integrate_constrained(cs, (-1.0, 0.0), 0.5)
    # x' = 1/(2x) < 0 for x < 0
    assert tr.final_state[0] < -1.0
