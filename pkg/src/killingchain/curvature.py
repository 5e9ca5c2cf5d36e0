"""Levi-Civita connection, curvature and energy-momentum bookkeeping.

Conventions: Einstein's equation is ``Ricci - R g / 2 = T`` with no 8 pi.
The Ricci sign is fixed so that de Sitter (signature +,-,-,-) has
``R = +4 Lambda``; with the coordinate Christoffels this means

    R^r_{s m n} = d_n G^r_{m s} - d_m G^r_{n s} + G^r_{n l} G^l_{m s} - G^r_{m l} G^l_{n s}
    R_{s n}     = R^r_{s r n}

i.e. minus the MTW Riemann tensor.  Schwarzschild is Ricci flat either way.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import jax
import jax.numpy as jnp
import numpy as np

from .algebra import NBLADES
from .fields import FormField
from .geometry import MetricField

RICCI_CONVENTION = "Ricci - R g/2 = T (geometric units, no 8*pi); de Sitter R = +4*Lambda"


def christoffel_fn(gfn: Callable) -> Callable:
    """``G[r, m, n] = Gamma^r_{m n}`` as a function of the point."""
    dgfn = jax.jacfwd(gfn)

    def fn(x):
        g = gfn(x)
        dg = dgfn(x)  # dg[a, b, c] = d_c g_ab
        ginv = jnp.linalg.inv(g)
        # lower[s, m, n] = (d_n g_sm + d_m g_sn - d_s g_mn) / 2
        lower = 0.5 * (dg + jnp.einsum("snm->smn", dg) - jnp.einsum("mns->smn", dg))
        return jnp.einsum("rs,smn->rmn", ginv, lower)
    return fn


def riemann_fn(gfn: Callable) -> Callable:
    """``Rm[r, s, m, n]`` in the sign convention of this module."""
    G = christoffel_fn(gfn)
    dG = jax.jacfwd(G)  # dG[r, m, n, c] = d_c Gamma^r_{mn}

    def fn(x):
        Gx = G(x)
        d = dG(x)
        # d_n G^r_{ms} - d_m G^r_{ns}
        t1 = jnp.einsum("rmsn->rsmn", d) - jnp.einsum("rnsm->rsmn", d)
        t2 = jnp.einsum("rnl,lms->rsmn", Gx, Gx) - jnp.einsum("rml,lns->rsmn", Gx, Gx)
        return t1 + t2
    return fn


def ricci_fn(gfn: Callable) -> Callable:
    Rm = riemann_fn(gfn)
    return lambda x: jnp.einsum("rsrn->sn", Rm(x))


def einstein_fn(gfn: Callable) -> Callable:
    ric = ricci_fn(gfn)

    def fn(x):
        g = gfn(x)
        Rc = ric(x)
        R = jnp.einsum("mn,mn->", jnp.linalg.inv(g), Rc)
        return Rc - 0.5 * R * g
    return fn


def scalar_curvature_fn(gfn: Callable) -> Callable:
    ric = ricci_fn(gfn)
    return lambda x: jnp.einsum("mn,mn->", jnp.linalg.inv(gfn(x)), ric(x))


def mixed_ricci_fn(gfn: Callable) -> Callable:
    """``R^mu_nu`` with the first index raised."""
    ric = ricci_fn(gfn)
    return lambda x: jnp.linalg.inv(gfn(x)) @ ric(x)


@dataclass(frozen=True)
class CurvatureBundle:
    christoffel: np.ndarray       # [r, m, n]
    d_christoffel: np.ndarray     # [r, m, n, c] = d_c Gamma^r_{mn}
    riemann: np.ndarray           # [r, s, m, n]
    ricci: np.ndarray             # [m, n]
    scalar: float
    einstein: np.ndarray          # [m, n]
    ricci_mixed: np.ndarray       # [mu, nu] = R^mu_nu

    def ricci_one_forms(self) -> np.ndarray:
        """Row ``mu`` holds the coefficients of ``R^mu = R^mu_nu dx^nu`` (16 blades)."""
        out = np.zeros((4, NBLADES))
        out[:, [1, 2, 4, 8]] = self.ricci_mixed
        return out


@lru_cache(maxsize=64)
def _curvature_kernel(metric: MetricField):
    gfn = metric.fn
    G = christoffel_fn(gfn)
    Rm = riemann_fn(gfn)
    return jax.jit(lambda x: (gfn(x), G(x), jax.jacfwd(G)(x), Rm(x)))


def curvature_at(metric: MetricField, p) -> CurvatureBundle:
    x = jnp.asarray(metric.check(p))
    g, G, dG, Rm = (np.asarray(a) for a in _curvature_kernel(metric)(x))
    ginv = np.linalg.inv(g)
    Rc = np.einsum("rsrn->sn", Rm)
    R = float(np.einsum("mn,mn->", ginv, Rc))
    return CurvatureBundle(
        christoffel=G,
        d_christoffel=dG,
        riemann=Rm,
        ricci=Rc,
        scalar=R,
        einstein=Rc - 0.5 * R * g,
        ricci_mixed=ginv @ Rc,
    )


def divergence_einstein_fn(gfn: Callable) -> Callable:
    """``nabla_mu G^{mu nu}``; needs third metric derivatives."""
    Ein = einstein_fn(gfn)
    G = christoffel_fn(gfn)

    def up(x):
        gi = jnp.linalg.inv(gfn(x))
        return gi @ Ein(x) @ gi

    dup = jax.jacfwd(up)

    def fn(x):
        Gu = up(x)
        Gam = G(x)
        d = dup(x)  # d[m, n, c]
        return (jnp.einsum("mnm->n", d) + jnp.einsum("mml,ln->n", Gam, Gu)
                + jnp.einsum("nml,ml->n", Gam, Gu))
    return fn


# --- energy-momentum ---------------------------------------------------------

def zero_stress(x):
    return jnp.zeros((4, 4)) + 0.0 * x[0]


@dataclass(frozen=True)
class EnergyMomentum:
    """``T_{mu nu}`` (covariant, geometric units) paired with its metric."""

    fn: Callable
    metric: MetricField

    def mixed_fn(self) -> Callable:
        """``T^mu_nu``."""
        gfn, T = self.metric.fn, self.fn
        return lambda x: jnp.linalg.inv(gfn(x)) @ T(x)

    def trace_fn(self) -> Callable:
        mixed = self.mixed_fn()
        return lambda x: jnp.trace(mixed(x))

    def at(self, p) -> np.ndarray:
        return np.asarray(self.fn(jnp.asarray(self.metric.check(p))))


def contract_one_forms(mixed_fn: Callable, A: FormField, name: str = "") -> FormField:
    """``X(A) = A_mu X^mu_nu dx^nu`` for a mixed tensor field ``X^mu_nu``."""
    idx = jnp.asarray([1, 2, 4, 8])
    Afn = A.fn

    def fn(x):
        a = Afn(x)[idx]
        return jnp.zeros(NBLADES).at[idx].set(a @ mixed_fn(x))
    return FormField(fn, {1}, name)


def einstein_residual_fn(metric: MetricField, T: Callable) -> Callable:
    Ein = einstein_fn(metric.fn)
    return lambda x: jnp.max(jnp.abs(Ein(x) - T(x)))


def einstein_residual(scenario, p, chart=None) -> float:
    """``max |G_{mu nu} - T_{mu nu}|`` at ``p`` for a scenario's chart model."""
    model = scenario.model(chart)
    G = curvature_at(model.metric, p).einstein
    return float(np.max(np.abs(G - model.stress.at(p))))
