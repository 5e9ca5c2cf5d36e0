"""Random polynomial form fields evaluated in one compiled batch."""
import itertools

import jax
import jax.numpy as jnp
import numpy as np

from killingchain.fields import FormField

MONOMIALS = [()] + [(i,) for i in range(4)] + list(itertools.combinations_with_replacement(range(4), 2))


def polynomial(P, x, scale=1.0):
    """Coefficients ``sum_m P[b, m] * monomial_m(x / scale)`` for each blade ``b``."""
    u = x / scale
    mono = jnp.stack([jnp.prod(u[jnp.asarray(m, dtype=int)]) if m else jnp.ones(()) for m in MONOMIALS])
    return P @ mono


def random_coefficients(rng, count, grades=None):
    from killingchain.algebra import GRADE
    P = rng.normal(size=(count, 16, len(MONOMIALS)))
    if grades is not None:
        P[:, ~np.isin(GRADE, list(grades))] = 0.0
    return P


def batched(route, scale=1.0, grades=None):
    """``route(FormField) -> FormField`` evaluated on pairs ``(P_i, x_i)``."""
    def one(P, x):
        w = FormField(lambda y: polynomial(P, y, scale), grades)
        return route(w).fn(x)
    return jax.jit(jax.vmap(one))
