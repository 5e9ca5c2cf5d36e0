"""
Komar energy
============

The surface integral of *F over spheres of growing radius, extrapolated in
1/r, recovers the Schwarzschild mass.  In de Sitter the surface value grows
with the sphere, and the volume integral of the source is what stays finite.
"""

from killingchain.komar import (
    BallQuadrature, ConvergenceError, SphereQuadrature, komar_current, komar_energy,
    komar_energy_at_radius, killing_energy_volume,
)
from killingchain.scenarios import load_scenario

sc = load_scenario("schwarzschild", {"m": 1.0})
e = komar_energy(sc, "d_t", SphereQuadrature(radii=(50.0, 100.0, 200.0)))
for radius, estimate in e.table:
    print(f"r = {radius:5.0f}: {estimate:.17g}")
print("extrapolated:", e.value)

# The current J_K = -delta F, computed directly and from its expansion.
for name in ("d_t", "r_dr"):
    for r in komar_current(sc, name, sc.sample(count=10)):
        print(f"{name:5s} {r.check_id:28s} max = {r.max_residual:.1e}")

ds = load_scenario("de_sitter", {"lambda": 0.03})
try:
    komar_energy(ds, "d_t", SphereQuadrature(radii=(2.0, 4.0, 8.0)))
except ConvergenceError as exc:
    print("de Sitter surface values do not settle:", [f"{v:.3f}" for _, v in exc.table])
vol = killing_energy_volume(ds, "d_t", BallQuadrature(5.0))
surf = komar_energy_at_radius(ds, "d_t", 5.0, SphereQuadrature(radii=(5.0,)))
print(f"ball r < 5: volume {vol:.6f} (lambda r^3 / 6 = {0.03 * 125 / 6:.6f}), surface {surf:.6f}")
