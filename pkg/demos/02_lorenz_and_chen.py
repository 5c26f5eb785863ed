"""Invariant surfaces of Lorenz and Chen systems.

Each fixture holds a parameter choice for which ``f z - g = 0`` is invariant.
The script prints the reduced system and what happens on the impasse set.
"""

# %%
import math

from impasse_lab.classify import adjoint_equilibria, analyze_line
from impasse_lab.reduction import cancel_row_factors, reduce_general
from impasse_lab.surface import (IntersectionCase, pseudo_impasse_projections, singular_points,
                                 verify_invariance)
from impasse_lab.systemfile import load_fixture

CASES = ["lorenz_a", "lorenz_b_r1", "lorenz_b_r2", "lorenz_c", "chen_d", "chen_e"]

# %%
for name in CASES:
    s = load_fixture(name)
    X, S = s.field, s.surface
    inv = verify_invariance(X, S)
    cs, removed = cancel_row_factors(reduce_general(X, S))
    print(f"== {name}: {s.title}")
    print(f"   mu = {inv.cofactor}; removed row factors {[str(k) for k in removed]}")
    print(f"   {cs}")
    proj = pseudo_impasse_projections(S, s.analysis.box)
    if proj.case is IntersectionCase.EMPTY:
        print("   no pseudo-impasse lines; smooth reduction:", cs.is_smooth)
    for q in proj.points:
        print(f"   line over {q}: {analyze_line(X, S, q).verdict.value}")
    sing = singular_points(S, proj)
    if sing.isolated:
        print("   singular points of M:", sing.isolated)
    for e in adjoint_equilibria(cs, s.analysis.box):
        where = "on" if e.on_impasse else "off"
        print(f"   equilibrium {tuple(round(v, 6) for v in e.point)} ({where} impasse): "
              f"{e.type.kind.value}")

# %% The off-impasse equilibria of the s = 2 Lorenz case sit at +-2 sqrt(5).
print("2*sqrt(5) =", 2 * math.sqrt(5))
