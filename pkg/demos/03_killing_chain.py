"""
From a Killing field to a Maxwell-like system
=============================================

For the static generator of Schwarzschild and de Sitter, the dual 1-form A
is divergence free, obeys a wave equation driven by the stress tensor, and
its field strength F = dA satisfies source equations with current
R A + 2 T(A).
"""

from killingchain.killing import (
    killing_residual, lemma_residuals, maxwell_like_residuals, teleparallel_split,
    wave_equation_residual,
)
from killingchain.scenarios import load_scenario


def show(reports):
    for r in reports:
        print(f"  {r.check_id:28s} {r.status:15s} max = {r.max_residual:.2e}  tol = {r.tolerance:.0e}")


for name in ("schwarzschild", "de_sitter"):
    sc = load_scenario(name)
    sample = sc.sample(count=20, seed=0)
    print(name)
    show([killing_residual(sc, "d_t", sample)])
    show(lemma_residuals(sc, "d_t", sample))
    show(wave_equation_residual(sc, "d_t", sample))
    show(maxwell_like_residuals(sc, "d_t", sample))

# A generator that is not an isometry fails the first check.
sc = load_scenario("schwarzschild")
print("negative control r d_r")
show([killing_residual(sc, "r_dr", sc.sample(count=20))])

# The coframe split needs a coframe in the Lorenz gauge; the diagonal
# Schwarzschild coframe is not, and the report says so.
print("coframe split")
show(teleparallel_split(sc, "d_t", sample=sc.sample(count=20)))
mk = load_scenario("minkowski")
show(teleparallel_split(mk, "d_t", sample=mk.sample(count=20)))
