"""
A Killing field read as a fluid
===============================

Paired with the flat metric in Cartesian coordinates, the rotation about z
becomes a rigid vortex: velocity (y, -x, 0), vorticity 2 along z, and a
Lamb vector balanced by the gradient of chi = x^2 + y^2.
"""

import jax.numpy as jnp
import numpy as np

from killingchain.fluid import (
    f_ring_relation, fluid_fields, helmholtz_residual, navier_stokes_residual, without_dfield,
)
from killingchain.killing import killing_field
from killingchain.scenarios import load_scenario

sc = load_scenario("schwarzschild")
sample = sc.sample("cartesian", count=10, seed=0)
K = killing_field(sc, "d_phi", "cartesian")
state = fluid_fields(K, sample)

p = jnp.asarray([0.0, 3.0, 4.0, 1.0])
print("v   =", np.asarray(state.v(p)))
print("w   =", np.asarray(state.w(p)))
print("l   =", np.asarray(state.l(p)))
print("chi =", float(state.chi(p)), "(x^2 + y^2 = 25)")

for r in helmholtz_residual(state, sample) + [navier_stokes_residual(state, sample)]:
    print(f"{r.check_id:22s} max = {r.max_residual:.1e}")

# Dropping d (and with it chi) leaves the Lamb vector unbalanced.
print("without d: NS max =", navier_stokes_residual(without_dfield(state), sample).max_residual)

# The curved and flat duals differ by the factor f = g(X, X) / eta(X, X).
for r in f_ring_relation(killing_field(sc, "d_t", "cartesian"), sample):
    print(f"{r.check_id:22s} max = {r.max_residual:.1e}")
