"""Report assembly and portrait helpers."""

from __future__ import annotations

import math

import numpy as np
import pytest

from impasse_lab.numerics import Box2
from impasse_lab.portrait import grid_seeds, portrait_csv, render_svg, sample_portrait, zero_contour
from impasse_lab.reduction import TAKENS_NAMES, ConstrainedSystem, takens_catalog
from impasse_lab.report import analyze_constrained, analyze_surface, catastrophe_report
from impasse_lab.surface import SurfaceSpec, VectorField3
from impasse_lab.systemfile import load_fixture


def test_surface_report_sections():
    s = load_fixture("intro")
    r = analyze_surface(s.field, s.surface, s.analysis.box)
    assert r["impasse_locus"] == {"kind": "curve", "equation": "x^2 - 1 = 0"}
    assert len(r["pseudo_impasse"]["lines"]) == 4
    assert r["singular_points_of_M"] == {"whole_lines": [], "isolated": []}
    off = [e for e in r["adjoint_equilibria"] if not e["on_impasse"]]
    assert [e["point"] for e in off] == [[0.0, 0.0]] and off[0]["type"]["kind"] == "Saddle"
    assert r["infinity"]["case"] == "Fm1Dominates"


def test_shared_curve_report():
    X = VectorField3.from_strings("y", "1", "0")
    S = SurfaceSpec.from_strings("x*y", "x*(y + 1)")
    r = analyze_surface(X, S, Box2(-2, 2, -2, 2))
    assert r["pseudo_impasse"]["case"] == "SharedCurve"
    assert r["pseudo_impasse"]["shared_factor"] == "x"
    assert r["singular_points_of_M"] is None


def test_smooth_constrained_report():
    cs = ConstrainedSystem.direct([["x^2 + 1", "0"], ["0", "1"]], ["y", "-x"])
    r = analyze_constrained(cs, Box2(-2, 2, -2, 2))
    assert r["smooth"] is True
    assert r["impasse_locus"]["kind"] == "curve"
    assert r["adjoint_equilibria"][0]["on_impasse"] is False


@pytest.mark.parametrize("name", TAKENS_NAMES)
def test_catastrophe_reports(name):
    r = catastrophe_report(takens_catalog(name))
    assert r["name"] == name
    if name.startswith("flat"):
        assert r["smooth"] and r["origin"]["on_impasse"] is False
    else:
        assert r["origin"]["on_impasse"] is True


def test_grid_seeds_are_cell_centres():
    seeds = grid_seeds(Box2(0, 2, 0, 1), (2, 1))
    assert seeds == [(0.5, 0.5), (1.5, 0.5)]


def test_zero_contour_traces_circle():
    segs = zero_contour(lambda x, y: x ** 2 + y ** 2 - 1, Box2(-2, 2, -2, 2), n=80)
    pts = np.array([p for s in segs for p in s])
    assert np.abs(np.hypot(pts[:, 0], pts[:, 1]) - 1).max() < 1e-2
    length = sum(math.dist(a, b) for a, b in segs)
    assert length == pytest.approx(2 * math.pi, rel=1e-2)


def test_zero_contour_of_constant_is_empty():
    assert zero_contour(lambda x, y: 1.0 + 0 * x, Box2(-1, 1, -1, 1), n=10) == []


def test_sample_portrait_stops_at_impasse():
    cs = ConstrainedSystem.direct([["2*x", "0"], ["0", "1"]], ["1", "0"])
    curves = sample_portrait(cs, Box2(-1, 1, -1, 1), (2, 1), 5.0, threads=1)
    assert [(c.seed_id, c.direction) for c in curves] == [
        (0, "forward"), (0, "backward"), (1, "forward"), (1, "backward")]
    for c in curves:
        assert np.all(np.abs(c.trajectory.states[:, 0]) >= 0.5e-4 - 1e-12)


def test_render_svg_escapes_title():
    svg = render_svg(Box2(-1, 1, -1, 1), [], [], [((0.0, 0.0), True)], title="a < b & c")
    assert "<title>a &lt; b &amp; c</title>" in svg
    assert 'fill="black"' in svg


def test_portrait_csv_header_only():
    assert portrait_csv([]) == "seed_id,direction,t,x,y\n"


def test_identically_zero_adjoint_is_rejected():
    from impasse_lab.classify import adjoint_equilibria
    from impasse_lab.errors import BoxTooSmall
    cs = ConstrainedSystem.direct([["x", "0"], ["0", "1"]], ["0", "0"])
    with pytest.raises(BoxTooSmall):
        adjoint_equilibria(cs)
