"""Fluid variables carried by the flat dual of a Killing field.

With the flat metric ``eta`` in Cartesian coordinates and
``A_flat = eta(X, .) = phi dt + a_i dx^i`` the fluid reading is

* ``phi = A_flat_0``, velocity ``v = (a_1, a_2, a_3)``;
* ``u = -v`` (the covariant velocity), vorticity ``w = curl u`` so that the
  magnetic block of ``F_flat = dA_flat`` is ``F_jk = -eps_ijk w_i``;
* Lamb vector ``l = w x u`` and ``d = l - E`` with ``E_i = F_flat_0i``;
* ``chi`` with ``d = -grad chi``, recovered by line integrals from the origin.

The Navier-Stokes-like residual is ``d_t u + w x u + grad phi + grad chi``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import jax
import jax.numpy as jnp
import numpy as np

from .calculus import exterior_derivative
from .fields import FormField, one_form_components
from .killing import KillingField, evaluate, sample_array
from .report import ResidualReport
from .algebra import wedge

TOL_CURL_D = 1e-8
TOL_HELMHOLTZ = 1e-10
TOL_NAVIER_STOKES = 1e-10
TOL_PATH = 1e-7
TOL_IMP = 1e-8
TOL_LWF = 1e-8
TOL_CLOSED_GAP = 1e-9
LINE_NODES = 24

_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS[_i, _j, _k], _EPS[_i, _k, _j] = 1.0, -1.0


class PostulateViolatedError(ValueError):
    """``d`` is not a gradient, so ``chi`` does not exist."""

    def __init__(self, message: str, curl_max: float):
        super().__init__(message)
        self.curl_max = curl_max


@dataclass(eq=False)
class FluidState:
    """Fluid fields as jax functions of the Cartesian point ``(t, x, y, z)``.

    ``v`` follows the dual components of ``A_flat``; ``u = -v`` is the
    covariant velocity used by the curl, Lamb and momentum expressions.
    """

    scenario: str
    name: str
    potential: Callable          # point -> 4 components of A_flat
    phi: Callable
    v: Callable
    u: Callable
    V_plus_q: Callable
    w: Optional[Callable] = None
    l: Optional[Callable] = None
    dfield: Optional[Callable] = None
    chi: Optional[Callable] = None
    chi_straight: Optional[Callable] = None


def _spatial_jacobian(fn: Callable) -> Callable:
    jac = jax.jacfwd(fn)
    return lambda x: jac(x)[:, 1:]   # [i, j] = d_j fn_i


def curl(fn: Callable) -> Callable:
    J = _spatial_jacobian(fn)
    return lambda x: jnp.einsum("ijk,kj->i", _EPS, J(x))


def divergence(fn: Callable) -> Callable:
    J = _spatial_jacobian(fn)
    return lambda x: jnp.trace(J(x))


def gradient(fn: Callable) -> Callable:
    g = jax.grad(fn)
    return lambda x: g(x)[1:]


def time_derivative(fn: Callable) -> Callable:
    jac = jax.jacfwd(fn)
    return lambda x: jac(x)[..., 0]


def flat_field_strength(potential: Callable) -> Callable:
    """``F[mu, nu] = d_mu a_nu - d_nu a_mu``."""
    jac = jax.jacfwd(potential)   # [nu, mu] = d_mu a_nu
    return lambda x: jac(x).T - jac(x)


def _potential_of(K) -> tuple:
    if isinstance(K, KillingField):
        if K.chart != "cartesian":
            raise ValueError("the fluid reading needs the generator in the Cartesian chart")
        fn = K.A_flat.fn
        return K.scenario, K.name, lambda x: one_form_components(fn(x))
    if isinstance(K, FormField):
        fn = K.fn
        return "", K.name, lambda x: one_form_components(fn(x))
    raise TypeError("expected a KillingField or a 1-form FormField")


def decompose_potential(K) -> FluidState:
    """``phi``, ``v`` and ``V + q = phi - v.v / 2`` from the flat dual potential."""
    scenario, name, a = _potential_of(K)
    phi = lambda x: a(x)[0]  # noqa: E731
    v = lambda x: a(x)[1:]  # noqa: E731
    u = lambda x: -a(x)[1:]  # noqa: E731
    return FluidState(scenario, name, a, phi, v, u,
                      lambda x: phi(x) - 0.5 * jnp.dot(v(x), v(x)))


def _line_nodes(n: int):
    s, w = np.polynomial.legendre.leggauss(n)
    return jnp.asarray(0.5 * (s + 1.0)), jnp.asarray(0.5 * w)


def potential_along_axes(dfield: Callable, n: int = LINE_NODES) -> Callable:
    """``chi(x) = -integral of d`` along ``0 -> (x,0,0) -> (x,y,0) -> (x,y,z)``."""
    s, w = _line_nodes(n)

    def chi(x):
        t, a, b, c = x[0], x[1], x[2], x[3]
        z = 0.0 * t

        def leg(start, axis, length):
            def integrand(si):
                p = start.at[1 + axis].add(si * length)
                return dfield(p)[axis]
            return length * jnp.dot(w, jax.vmap(integrand)(s))

        p0 = jnp.stack([t, z, z, z])
        p1 = jnp.stack([t, a, z, z])
        p2 = jnp.stack([t, a, b, z])
        return -(leg(p0, 0, a) + leg(p1, 1, b) + leg(p2, 2, c))
    return chi


def potential_along_ray(dfield: Callable, n: int = LINE_NODES) -> Callable:
    """``chi(x) = -integral of d`` along the straight segment from the spatial origin."""
    s, w = _line_nodes(n)

    def chi(x):
        xs = x[1:]
        pts = jax.vmap(lambda si: jnp.concatenate([x[:1], si * xs]))(s)
        return -jnp.dot(w, jax.vmap(lambda p: jnp.dot(dfield(p), xs))(pts))
    return chi


def fluid_fields(K, sample, n_line: int = LINE_NODES) -> FluidState:
    """Vorticity, Lamb vector, ``d`` and ``chi`` for the flat dual potential.

    Raises :class:`PostulateViolatedError` when ``curl d`` exceeds the
    gradient tolerance at any sample point.
    """
    state = decompose_potential(K)
    F = flat_field_strength(state.potential)
    u = state.u
    w = curl(u)
    l = lambda x: jnp.cross(w(x), u(x))  # noqa: E741,E731
    dfield = lambda x: l(x) - F(x)[0, 1:]  # noqa: E731
    report = postulate_residual(K, sample, dfield)
    if not report.passed:
        raise PostulateViolatedError(
            f"curl d = {report.max_residual:.3e} exceeds {TOL_CURL_D}: "
            f"d is not a gradient for {state.name}", report.max_residual)
    return replace(state, w=w, l=l, dfield=dfield, chi=potential_along_axes(dfield, n_line),
                   chi_straight=potential_along_ray(dfield, n_line))


def electric_remainder(K) -> Callable:
    """``d = l - E`` for the flat dual potential of ``K``."""
    state = decompose_potential(K)
    F = flat_field_strength(state.potential)
    w = curl(state.u)
    return lambda x: jnp.cross(w(x), state.u(x)) - F(x)[0, 1:]


def postulate_residual(K, sample, dfield: Optional[Callable] = None) -> ResidualReport:
    """``|curl d|`` per point; ``chi`` exists only where this vanishes."""
    scenario, name, _ = _potential_of(K)
    dfield = dfield or electric_remainder(K)
    pts = _points(K, sample)
    c = evaluate(lambda x: jnp.max(jnp.abs(curl(dfield)(x))), pts)
    return ResidualReport("fluid.postulate", scenario, name, pts, c, TOL_CURL_D, chart="cartesian")


def _points(K, sample) -> np.ndarray:
    if isinstance(K, KillingField):
        return sample_array(K.metric, sample)
    return np.atleast_2d(np.asarray(getattr(sample, "points", sample), dtype=float))


def _report(check_id, state: FluidState, pts, res, tol) -> ResidualReport:
    return ResidualReport(check_id, state.scenario, state.name, pts, res, tol, chart="cartesian")


def rebuild_flat_field(state: FluidState) -> Callable:
    """``F_flat`` assembled from ``(w, l, d)``: ``F_0i = l_i - d_i``, ``F_jk = -eps_ijk w_i``."""
    eps = jnp.asarray(_EPS)

    def fn(x):
        E = state.l(x) - state.dfield(x)
        B = -jnp.einsum("ijk,i->jk", eps, state.w(x))
        out = jnp.zeros((4, 4)).at[0, 1:].set(E).at[1:, 0].set(-E)
        return out.at[1:, 1:].set(B)
    return fn


def chi_path_gap(state: FluidState, sample) -> ResidualReport:
    """``|chi_axes - chi_ray|`` per point."""
    pts = np.atleast_2d(np.asarray(getattr(sample, "points", sample), dtype=float))
    gap = evaluate(lambda x: jnp.abs(state.chi(x) - state.chi_straight(x)), pts)
    return _report("fluid.chi_paths", state, pts, gap, TOL_PATH)


def fluid_report(state: FluidState, sample) -> list:
    """Invariant lines of a complete state: ``div w``, round trip of ``F_flat``, path gap."""
    pts = np.atleast_2d(np.asarray(getattr(sample, "points", sample), dtype=float))
    F = flat_field_strength(state.potential)
    rebuilt = rebuild_flat_field(state)
    div_w, trip = evaluate(lambda x: (jnp.abs(divergence(state.w)(x)),
                                      jnp.max(jnp.abs(rebuilt(x) - F(x)))), pts)
    return [
        _report("fluid.div_w", state, pts, div_w, 1e-9),
        _report("fluid.round_trip", state, pts, trip, 1e-10),
        chi_path_gap(state, pts),
    ]


def helmholtz_residual(state: FluidState, sample) -> list:
    """``|curl l + d_t w|`` and ``|div w|`` per point."""
    if state.w is None:
        raise ValueError("state lacks vorticity; build it with fluid_fields")
    pts = np.atleast_2d(np.asarray(getattr(sample, "points", sample), dtype=float))
    cl, dtw, dw = curl(state.l), time_derivative(state.w), divergence(state.w)
    transport, div = evaluate(
        lambda x: (jnp.max(jnp.abs(cl(x) + dtw(x))), jnp.abs(dw(x))), pts)
    return [
        _report("helmholtz.transport", state, pts, transport, TOL_HELMHOLTZ),
        _report("helmholtz.divergence", state, pts, div, TOL_HELMHOLTZ),
    ]


def navier_stokes_residual(state: FluidState, sample) -> ResidualReport:
    """``|d_t u + w x u + grad phi + grad chi|`` per point."""
    if state.chi is None or state.w is None:
        raise ValueError("state lacks chi; build it with fluid_fields")
    pts = np.atleast_2d(np.asarray(getattr(sample, "points", sample), dtype=float))
    dtu = time_derivative(state.u)
    gphi, gchi = gradient(state.phi), gradient(state.chi)

    def per_point(x):
        r = dtu(x) + jnp.cross(state.w(x), state.u(x)) + gphi(x) + gchi(x)
        return jnp.max(jnp.abs(r))

    return _report("navier-stokes", state, pts, evaluate(per_point, pts), TOL_NAVIER_STOKES)


def without_dfield(state: FluidState) -> FluidState:
    """Ablation: ``d = 0`` and hence ``chi = 0``."""
    zero3 = lambda x: jnp.zeros(3) + 0.0 * x[0]  # noqa: E731
    zero = lambda x: 0.0 * x[0]  # noqa: E731
    return replace(state, dfield=zero3, chi=zero, chi_straight=zero)


def f_ring_relation(K: KillingField, sample) -> list:
    """Relations between ``F = dA`` and ``F_flat = dA_flat``.

    Always: ``|dG|`` for ``G = F - F_flat``.  With a declared ``f``
    (``A = f A_flat``): ``|F - (df ^ A_flat + f F_flat)|`` and the recovery
    ``|F / f - dln f ^ A_flat - F_flat|``.
    """
    pts = sample_array(K.metric, sample)
    G = K.F - K.F_flat
    dG = exterior_derivative(G)
    out = []
    if K.f is not None:
        f = K.f
        grad_f = jax.grad(f)
        Aflat, F, Fflat = K.A_flat.fn, K.F.fn, K.F_flat.fn

        def df(x):
            return jnp.zeros(16).at[jnp.asarray([1, 2, 4, 8])].set(grad_f(x))

        def per_point(x):
            rebuilt = wedge(df(x), Aflat(x)) + f(x) * Fflat(x)
            recovered = F(x) / f(x) - wedge(df(x) / f(x), Aflat(x))
            return (jnp.max(jnp.abs(F(x) - rebuilt)), jnp.max(jnp.abs(recovered - Fflat(x))))

        imp, lwf = evaluate(per_point, pts)
        out += [
            ResidualReport("f-relation.product", K.scenario, K.name, pts, imp, TOL_IMP,
                           chart=K.chart),
            ResidualReport("f-relation.recovery", K.scenario, K.name, pts, lwf, TOL_LWF,
                           chart=K.chart),
        ]
    closed = evaluate(lambda x: jnp.max(jnp.abs(dG.fn(x))), pts)
    rep = ResidualReport("f-relation.closed_gap", K.scenario, K.name, pts, closed,
                         TOL_CLOSED_GAP, chart=K.chart, fields={"G": G})
    if K.f is None:
        rep.notes.append("no scalar f declared; only the gap 2-form is checked")
    return out + [rep]
