"""
Curved metric against the flat one
==================================

In a Cartesian chart the flat connection vanishes, so the failure of the
flat metric to be parallel under the curved connection (its nonmetricity)
carries the Christoffel symbols.  The distortion tensor built from it
reproduces the Ricci tensor.
"""

import numpy as np

from killingchain.bimetric import (
    bimetric_residuals, constraint_last_residual, nonmetricity_and_strain, ricci_j_gap,
)
from killingchain.scenarios import load_scenario

sc = load_scenario("schwarzschild")
p = np.array([0.0, 3.0, 2.0, 2.5])
b = nonmetricity_and_strain(sc, p)
print("max |S - 2 Gamma| =", np.max(np.abs(b.S - 2 * b.christoffel)))
print("max |Ric - J_sym| =", ricci_j_gap(sc, p))
print("with the opposite distortion sign:", ricci_j_gap(sc, p, sign=-1.0))

for name in ("schwarzschild", "de_sitter"):
    s = load_scenario(name)
    sample = s.sample("cartesian", count=10)
    for r in bimetric_residuals(s, sample) + constraint_last_residual(s, "d_t", sample):
        print(f"{name:14s} {r.check_id:26s} {r.status:13s} max = {r.max_residual:.2e}")
