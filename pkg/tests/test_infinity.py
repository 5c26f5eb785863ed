"""Boundary of graph surfaces at infinity."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import assume, given, settings

from conftest import SX, SY, SZ, surface_fixtures, to_sympy
from impasse_lab.expr import parse_poly
from impasse_lab.infinity import BoundaryCase, PoleContainment, compactify
from impasse_lab.surface import SurfaceSpec
from impasse_lab.systemfile import load_fixture

from test_polynomial import polys

W = sp.Symbol("w")


def homogenized_at_infinity(S: SurfaceSpec) -> sp.Expr:
    """w^m H(x/w, y/w, z/w) at w = 0, computed by sympy."""
    H = to_sympy(S.H)
    m = sp.Poly(H, SX, SY, SZ).total_degree()
    e = sp.expand(W ** m * H.subs({SX: SX / W, SY: SY / W, SZ: SZ / W}, simultaneous=True))
    return sp.expand(e.subs(W, 0))


@pytest.mark.parametrize("name", surface_fixtures())
def test_boundary_matches_homogenization(name):
    S = load_fixture(name).surface
    c = compactify(S)
    assert sp.expand(to_sympy(c.boundary_poly) - homogenized_at_infinity(S)) == 0
    assert c.boundary_poly.is_homogeneous()
    assert c.degree == S.H.degree()


@pytest.mark.parametrize("name", surface_fixtures())
def test_homogeneity_under_scaling(name):
    b = compactify(load_fixture(name).surface).boundary_poly
    rng = random.Random(name)
    for _ in range(10):
        lam = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 7))
        pt = {v: Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for v in ("x", "y", "z")}
        scaled = {v: lam * c for v, c in pt.items()}
        assert b.evaluate(scaled) == lam ** b.degree() * b.evaluate(pt)


def test_falkner_skan_boundary():
    c = compactify(SurfaceSpec.from_strings("2*x", "y^2 - 1"))
    assert c.boundary_poly == parse_poly("2*x*z - y^2")
    assert c.case is BoundaryCase.MIXED
    assert c.contains_poles and c.pole_containment is PoleContainment.NONTRIVIAL
    assert not c.contains_big_circle and not c.z_divides_boundary


def test_f_dominates():
    c = compactify(SurfaceSpec.from_strings("x^2", "y"))
    assert c.boundary_poly == parse_poly("x^2*z")
    assert c.degree == 3
    assert c.case is BoundaryCase.F_DOMINATES
    assert c.contains_big_circle and c.z_divides_boundary


def test_g_dominates():
    c = compactify(SurfaceSpec.from_strings("1", "y^2"))
    assert c.boundary_poly == parse_poly("-y^2")
    assert c.case is BoundaryCase.G_DOMINATES
    assert c.pole_containment is PoleContainment.TRIVIAL
    assert not c.contains_big_circle


def test_plane_does_not_contain_poles():
    # H = z - y: the boundary z - y is 1 at the north pole
    c = compactify(SurfaceSpec.from_strings("1", "y"))
    assert not c.contains_poles
    assert c.pole_containment is PoleContainment.ABSENT


@settings(max_examples=80, deadline=None)
@given(polys(variables=("x", "y"), max_terms=4, max_exp=3),
       polys(variables=("x", "y"), max_terms=4, max_exp=3))
def test_poles_and_big_circle(f, g):
    assume(not f.is_zero())
    S = SurfaceSpec(f, g)
    c = compactify(S)
    if S.H.degree() >= 2 or not f.is_constant():
        assert c.contains_poles
    assert c.contains_big_circle == c.z_divides_boundary == (f.degree() >= g.degree())
