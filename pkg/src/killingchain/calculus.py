"""Operators on form fields: d, the codifferential, the Dirac operator and its square.

All operators are lazy: they return new :class:`FormField` objects whose
evaluators differentiate the input exactly (nested forward-mode jets).
Each composition level costs one more derivative order.
"""
from __future__ import annotations

import jax
import jax.numpy as jnp
import numpy as np

from .algebra import GRADE, NBLADES, hodge
from .curvature import christoffel_fn, contract_one_forms, mixed_ricci_fn
from .fields import FormField, VectorField, one_form_components, one_form_field
from .geometry import MetricField


def _d_tensor() -> np.ndarray:
    # (d w)_k = sum_{b, mu} D[k, b, mu] d_mu w_b
    D = np.zeros((NBLADES, NBLADES, 4))
    for b in range(NBLADES):
        for mu in range(4):
            if not b >> mu & 1:
                below = bin(b & ((1 << mu) - 1)).count("1")
                D[b | 1 << mu, b, mu] = -1.0 if below % 2 else 1.0
    return D


_D = _d_tensor()
# delta = (-1)^r *^-1 d * on grade r; output grade q = r - 1
_DELTA_SIGN = np.array([(-1.0) ** (q + 1) for q in GRADE])


def d_coefficients(jac):
    """``d`` applied to a coefficient Jacobian ``jac[b, mu] = d_mu w_b``."""
    return jnp.einsum("kbm,bm->k", _D, jac)


def _shift(grades, k):
    if grades is None:
        return None
    return frozenset(g + k for g in grades if 0 <= g + k <= 4)


def exterior_derivative(w: FormField) -> FormField:
    dw = jax.jacfwd(w.fn)
    return FormField(lambda x: d_coefficients(dw(x)), _shift(w.grades, 1), f"d{w.name}")


def codifferential(w: FormField, metric: MetricField) -> FormField:
    gfn, wfn = metric.fn, w.fn

    def star(x):
        return hodge(wfn(x), gfn(x))

    dstar = jax.jacfwd(star)

    def fn(x):
        return _DELTA_SIGN * hodge(d_coefficients(dstar(x)), gfn(x), inverse=True)

    return FormField(fn, _shift(w.grades, -1), f"delta{w.name}")


def dirac_apply(w: FormField, metric: MetricField) -> FormField:
    """``(d - delta) w``."""
    out = exterior_derivative(w) - codifferential(w, metric)
    out.name = f"D{w.name}"
    return out


def hodge_laplacian_minus(w: FormField, metric: MetricField) -> FormField:
    """``-(d delta + delta d) w``, the square of the Dirac operator."""
    dd = exterior_derivative(codifferential(w, metric))
    ddel = codifferential(exterior_derivative(w), metric)
    out = -(dd + ddel)
    out.name = f"D^2{w.name}"
    return out


def ricci_operator(A: FormField, metric: MetricField) -> FormField:
    """``A_mu R^mu`` for a 1-form ``A`` (extensorial action on 1-forms)."""
    return contract_one_forms(mixed_ricci_fn(metric.fn), A, f"Ric({A.name})")


def _require_one_form(w: FormField) -> None:
    if w.grades is not None and set(w.grades) != {1}:
        raise ValueError(f"expected a 1-form field, got grades {sorted(w.grades)}")


def dalembertian_and_ricci_split(A: FormField, metric: MetricField):
    """Return ``(box, ricci_part, square)`` with ``box = square - ricci_part``."""
    _require_one_form(A)
    square = hodge_laplacian_minus(A, metric)
    ricci_part = ricci_operator(A, metric)
    box = square - ricci_part
    box.grades = frozenset({1})
    box.name = f"box{A.name}"
    return box, ricci_part, square


def covariant_dalembertian(A: FormField, metric: MetricField) -> FormField:
    """``g^{mu nu} nabla_mu nabla_nu A_k`` straight from the Christoffels.

    Independent of the codifferential route; used as a cross-check and by the
    explicit Komar current.
    """
    _require_one_form(A)
    gfn, Afn = metric.fn, A.fn
    G = christoffel_fn(gfn)

    def cov(x):
        # B[n, k] = nabla_n A_k
        a = one_form_components(Afn(x))
        da = jax.jacfwd(lambda y: one_form_components(Afn(y)))(x)  # [k, n]
        return da.T - jnp.einsum("lnk,l->nk", G(x), a)

    dcov = jax.jacfwd(cov)

    def comps(x):
        B = cov(x)
        dB = dcov(x)  # [n, k, m] = d_m B_nk
        Gx = G(x)
        nabla = (jnp.einsum("nkm->mnk", dB) - jnp.einsum("lmn,lk->mnk", Gx, B)
                 - jnp.einsum("lmk,nl->mnk", Gx, B))
        return jnp.einsum("mn,mnk->k", jnp.linalg.inv(gfn(x)), nabla)

    return one_form_field(comps, f"boxcov{A.name}")


def lie_derivative_metric_fn(X: VectorField, metric: MetricField):
    gfn, Xfn = metric.fn, X.fn
    dg = jax.jacfwd(gfn)
    dX = jax.jacfwd(Xfn)

    def fn(x):
        g = gfn(x)
        v = Xfn(x)
        J = dX(x)  # J[r, m] = d_m X^r
        return (jnp.einsum("r,mnr->mn", v, dg(x)) + jnp.einsum("rn,rm->mn", g, J)
                + jnp.einsum("mr,rn->mn", g, J))
    return fn


def lie_derivative_metric(X: VectorField, metric: MetricField, p) -> np.ndarray:
    x = jnp.asarray(metric.check(p))
    return np.asarray(lie_derivative_metric_fn(X, metric)(x))


def lower_index(X: VectorField, gfn, name: str = "") -> FormField:
    """The 1-form ``g(X, .)``."""
    Xfn = X.fn
    return one_form_field(lambda x: gfn(x) @ Xfn(x), name or f"g({X.name})")
