"""Numerical verification of the Einstein -> Maxwell-like -> Navier-Stokes-like chain
for Killing fields, in the Clifford-bundle calculus of differential forms."""
import os

# Operator graphs are large but cheap to run; full XLA optimisation mostly
# costs compile time.  Respect any flags the user already set.
if "XLA_FLAGS" not in os.environ:
    os.environ["XLA_FLAGS"] = "--xla_backend_optimization_level=0"

from .algebra import (  # noqa: E402
    MINKOWSKI, ORIENTATION, SIGNATURE, MetricAtPoint, Multivector, SingularMetricError,
    geometric_product, hodge_star, wedge_contract,
)
from .fields import FormField, VectorField  # noqa: E402

__all__ = [
    "MINKOWSKI", "ORIENTATION", "SIGNATURE", "MetricAtPoint", "Multivector",
    "SingularMetricError", "geometric_product", "hodge_star", "wedge_contract",
    "FormField", "VectorField",
]
__version__ = "0.1.0"
