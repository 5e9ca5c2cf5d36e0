"""
Clifford algebra at a point
===========================

Multivectors over the coordinate coframe, their products and the Hodge star,
first for the flat metric and then at a point of the Schwarzschild exterior.
"""

import numpy as np

from killingchain.algebra import (
    MINKOWSKI, MetricAtPoint, Multivector, geometric_product, hodge_star, wedge_contract,
)
from killingchain.geometry import schwarzschild

# A metric at a point carries g and its inverse; products use the inverse.
eta = MetricAtPoint.from_components(MINKOWSKI)
e0, e1 = Multivector.blade(0), Multivector.blade(1)
print("dt dt =", geometric_product(e0, e0, eta))
print("dx dx =", geometric_product(e1, e1, eta))

# The product of a 1-form with anything splits into wedge plus contraction.
e01 = Multivector.blade(0, 1)
w, c = wedge_contract(e0, e01, eta)
print("dt ^ (dt^dx) =", w, "  dt _| (dt^dx) =", c)

# The Hodge star of 1 is the volume form; its inverse undoes it.
print("*1 =", hodge_star(Multivector.scalar(1.0), eta))
print("*dt =", hodge_star(e0, eta))

# The same operations on a curved metric at r = 4, theta = 1.
g = schwarzschild(1.0)(np.array([0.0, 4.0, 1.0, 0.0]))
A = Multivector(np.random.default_rng(0).normal(size=16))
back = hodge_star(hodge_star(A, g), g, inverse=True)
print("max |*^-1 * A - A| =", np.max(np.abs(back.coeffs - A.coeffs)))
print("dt dt at r = 4:", geometric_product(e0, e0, g)[0], "(= 1 / (1 - 2m/r))")
