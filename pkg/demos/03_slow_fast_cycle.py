"""A slow-fast family whose reduced problem has an attracting cycle.

The fast variable x relaxes to ``H_eps = 0`` and the slow pair (y, z) follows
a Hopf-type normal form.  The cycle of the ``eps = 0`` problem is continued
to small positive ``eps`` and compared with the base cycle.
"""

# %%
import numpy as np

from impasse_lab.slowfast import continue_equilibrium, continue_periodic, lifted_field
from impasse_lab.surface import verify_invariance
from impasse_lab.systemfile import load_fixture

# %% Equilibria first: a family whose slow equilibrium stays at the origin ...
setup = load_fixture("spp_equilibrium").slowfast
r = continue_equilibrium(setup.family, setup.point, setup.eps, setup.tol)
print("fixed origin:", [float(np.linalg.norm(p)) for p in r.items], "converged:", r.converged)

# ... and one whose equilibrium moves with eps.
setup = load_fixture("spp_shifted").slowfast
r = continue_equilibrium(setup.family, setup.point, setup.eps, setup.tol)
print("shifted:", [f"{d:.4g}" for d in r.distances], "converged:", r.converged)

# %% For eps > 0 the lifted 3D field keeps H_eps as a first integral.
fam = load_fixture("spp_equilibrium").slowfast.family
X = lifted_field(fam, 0.1)
print("lifted field:", [str(c) for c in X.components])
print("H_eps invariance:", verify_invariance(X, fam.H_at(0.1).embed(("x", "y", "z"))).kind.value)

# %% Periodic continuation.
setup = load_fixture("spp_cycle").slowfast
r = continue_periodic(setup.family, setup.seed_orbit(), setup.eps, setup.tol)
b = r.base
print(f"eps = 0: period {b.period:.10f}, multiplier {b.multiplier:.3e}, "
      f"return error {b.return_error:.1e}")
for e, orbit, d in zip(r.eps_values, r.items, r.distances):
    print(f"eps = {e:<7}: period {orbit.period:.6f}, multiplier {orbit.multiplier:.3e}, "
          f"distance to base {d:.5f} = {d / e:.3f} eps")
print("converged:", r.converged)

# %% The distance is first order in eps: the forcing +eps in both slow equations
# moves the centre of the cycle by about eps, so the ratio tends to one.
