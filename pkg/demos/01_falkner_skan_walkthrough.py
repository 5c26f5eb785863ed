"""Falkner-Skan on its invariant surface, step by step.

Run with ``python demos/01_falkner_skan_walkthrough.py``; an SVG portrait is
written to ``demos/out/``.
"""

# %%
from pathlib import Path

from impasse_lab.classify import adjoint_equilibria, analyze_line, classify_impasse_point
from impasse_lab.infinity import compactify
from impasse_lab.numerics import Box2
from impasse_lab.portrait import render_svg, sample_portrait, zero_contour
from impasse_lab.reduction import adjoint, cancel_row_factors, reduce_general
from impasse_lab.surface import pseudo_impasse_projections, verify_invariance
from impasse_lab.systemfile import load_fixture

OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)

# %% The field and the surface 2xz + 1 - y^2 = 0 come from a shipped fixture.
fs = load_fixture("falkner_skan")
X, S = fs.field, fs.surface
print("X =", [str(c) for c in X.components])
print("H =", S.H)

# %% H is a Darboux polynomial: grad H . X = mu H with an exact cofactor.
inv = verify_invariance(X, S)
print(f"{inv.kind.value}: mu = {inv.cofactor}, residual = {inv.residual}")

# %% On the graph z = g/f the flow is a planar constrained system.
cs = reduce_general(X, S)
cs, removed = cancel_row_factors(cs)
print("constrained:", cs)
print("impasse set: det A =", cs.detA, "= 0")
print("adjoint field:", [str(c) for c in adjoint(cs).components])

# %% M contains two vertical lines, over the common zeros of f and g.
proj = pseudo_impasse_projections(S, fs.analysis.box)
for q in proj.points:
    c = classify_impasse_point(cs, q)
    line = analyze_line(X, S, q)
    print(f"q = {q}: {c.label.value} (first kind: {c.r_first_kind}), "
          f"line {line.verdict.value}, equilibria of X on it: {line.contains_equilibria_of_X}")

# %% The adjoint field has two nodes, both on the impasse set.
for e in adjoint_equilibria(cs, fs.analysis.box):
    lam = ", ".join(f"{z.real:g}" for z in e.type.eigenvalues)
    print(f"{e.point}: {e.type.kind.value}, eigenvalues {lam}, on impasse: {e.on_impasse}")

# %% At infinity the surface meets the sphere along 2xz - y^2 = 0.
c = compactify(S)
print("boundary:", c.boundary_poly, "| case:", c.case.value, "| poles:", c.pole_containment.value)

# %% Portrait of the constrained system.
box = Box2(-3, 3, -3, 3)
curves = sample_portrait(cs, box, (7, 7), 6.0)
svg = render_svg(box, curves, zero_contour(cs.detA.to_function(("x", "y")), box),
                 [(e.point, e.on_impasse) for e in adjoint_equilibria(cs, box)],
                 title=str(cs))
(OUT / "falkner_skan.svg").write_text(svg)
print("wrote", OUT / "falkner_skan.svg")
