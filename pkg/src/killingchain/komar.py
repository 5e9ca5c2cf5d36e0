"""Komar current, its explicit expansion, and generalized energies.

The Komar current of a generator ``X`` with ``A = g(X, .)`` and ``F = dA`` is
``J_K = -delta F``.  Using Einstein's equation (so ``R = -tr T``) it expands as

    J_K = T(A) - tr(T) A / 2 + d delta A + box A

for any generator, Killing or not.  The surface energy is
``E = -(1/8 pi) * integral of *F`` over a large sphere, extrapolated in
``1/r``; for Killing fields the volume form ``(1/8 pi) * integral of
*(T(A) - tr(T) A / 2)`` over a constant-time ball is also provided.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import jax.numpy as jnp
import numpy as np
from numpy.polynomial.legendre import leggauss

from .algebra import hodge
from .calculus import codifferential, dalembertian_and_ricci_split, exterior_derivative
from .curvature import contract_one_forms
from .fields import FormField
from .geometry import SPHERICAL
from .killing import KillingField, evaluate, killing_field, report_for, sample_array

TOL_ROUTES = 1e-6
TOL_CONSERVATION = 1e-6
TOL_KILLING_GAUGE_TERM = 1e-8

THETA_PHI = 0b1100        # blade dtheta ^ dphi in the spherical chart
R_THETA_PHI = 0b1110      # blade dr ^ dtheta ^ dphi


class ConvergenceError(RuntimeError):
    """Radius sequence whose energy estimates do not settle."""

    def __init__(self, message: str, table):
        super().__init__(message)
        self.table = table


# --- current ----------------------------------------------------------------------

def komar_current_fields(K: KillingField):
    """``(direct, expanded)`` forms of the Komar current and the ``d delta A`` term."""
    direct = -codifferential(K.F, K.metric)
    direct.name = f"JK[{K.name}]"
    trace = K.stress.trace_fn()
    TA = contract_one_forms(K.stress.mixed_fn(), K.A, "T(A)")
    gauge_term = exterior_derivative(codifferential(K.A, K.metric))
    box, _, _ = dalembertian_and_ricci_split(K.A, K.metric)
    expanded = TA - K.A.scale(lambda x: 0.5 * trace(x)) + gauge_term + box
    expanded.grades, expanded.name = frozenset({1}), f"JK_expanded[{K.name}]"
    return direct, expanded, gauge_term


def komar_current(scenario, X, sample, chart: Optional[str] = None) -> list:
    """Two-route agreement and conservation of the Komar current.

    Lines: ``|J_direct - J_expanded|``, ``|delta J_direct|`` and, for declared
    Killing fields, ``|d delta A|``.
    """
    K = X if isinstance(X, KillingField) else killing_field(
        scenario, X, chart or getattr(sample, "chart", None))
    pts = sample_array(K.metric, sample)
    direct, expanded, gauge_term = komar_current_fields(K)
    cons = codifferential(direct, K.metric)

    def per_point(x):
        return (jnp.max(jnp.abs(direct.fn(x) - expanded.fn(x))),
                jnp.max(jnp.abs(cons.fn(x))), jnp.max(jnp.abs(gauge_term.fn(x))))

    routes, conservation, gauge = evaluate(per_point, pts)
    fields = {"J_K": direct, "J_K_expanded": expanded}
    out = [
        report_for("komar-current.routes", K, pts, routes, TOL_ROUTES, fields=fields),
        report_for("komar-current.conservation", K, pts, conservation, TOL_CONSERVATION),
    ]
    if K.declared:
        out.append(report_for("komar-current.d_delta_A", K, pts, gauge, TOL_KILLING_GAUGE_TERM))
    return out


# --- surface energy ---------------------------------------------------------------

@dataclass(frozen=True)
class SphereQuadrature:
    """Product rule on spheres of constant ``(t, r)``.

    Gauss-Legendre in ``cos(theta)`` and the uniform rule in ``phi``.
    ``orientation=+1`` integrates over ``dtheta ^ dphi``; the default ``-1``
    integrates over ``dphi ^ dtheta``.
    """

    radii: tuple = (50.0, 100.0, 200.0)
    n_theta: int = 32
    n_phi: int = 64
    time: float = 0.0
    orientation: int = -1

    def __post_init__(self):
        if self.n_theta < 8 or self.n_phi < 16:
            raise ValueError("need n_theta >= 8 and n_phi >= 16")
        if len(self.radii) < 1 or any(not r > 0 for r in self.radii):
            raise ValueError("radii must be positive")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))

    def nodes(self):
        """``(theta, phi, weight)`` arrays on the unit sphere (measure ``dcos dphi``)."""
        u, wu = leggauss(self.n_theta)
        phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        th, ph = np.meshgrid(np.arccos(u), phi, indexing="ij")
        w = np.outer(wu, np.full(self.n_phi, 2.0 * np.pi / self.n_phi))
        return th.ravel(), ph.ravel(), w.ravel()

    def flipped(self) -> "SphereQuadrature":
        return SphereQuadrature(self.radii, self.n_theta, self.n_phi, self.time, -self.orientation)


@dataclass
class KomarEnergy:
    value: float
    table: list = field(default_factory=list)   # (radius, estimate at that radius)
    extrapolated: list = field(default_factory=list)


def _dual_field_strength(K: KillingField) -> FormField:
    gfn, F = K.metric.fn, K.F.fn
    return FormField(lambda x: hodge(F(x), gfn(x)), {2}, f"*F[{K.name}]")


def _spherical_killing(scenario, X) -> KillingField:
    if isinstance(X, KillingField):
        if X.chart != SPHERICAL.name:
            raise ValueError("surface integrals need the generator in the spherical chart")
        return X
    return killing_field(scenario, X, SPHERICAL.name)


def _sphere_points(quad: SphereQuadrature, radius: float):
    th, ph, w = quad.nodes()
    pts = np.stack([np.full_like(th, quad.time), np.full_like(th, radius), th, ph], axis=1)
    return pts, th, w


def komar_energy_at_radius(scenario, X, radius: float,
                           quad: Optional[SphereQuadrature] = None) -> float:
    """``-(1/8 pi)`` times the flux of ``*F`` through one sphere."""
    quad = quad or SphereQuadrature()
    K = _spherical_killing(scenario, X)
    return _energies(K, quad, [radius])[0]


def _energies(K: KillingField, quad: SphereQuadrature, radii) -> list:
    star = _dual_field_strength(K)
    out = []
    for r in radii:
        pts, th, w = _sphere_points(quad, r)
        sample_array(K.metric, pts)
        comp = star.at(pts)[:, THETA_PHI] / np.sin(th)  # dtheta = -dcos / sin
        flux = quad.orientation * math.fsum(comp * w)
        out.append(-flux / (8.0 * np.pi) + 0.0)  # no negative zero
    return out


def richardson(h: Sequence[float], values: Sequence[float]) -> list:
    """Successive polynomial extrapolations to ``h = 0``.

    Entry ``k`` uses the first ``k + 1`` samples (Neville's scheme).
    """
    h = np.asarray(h, dtype=float)
    P = list(np.asarray(values, dtype=float))
    n = len(P)
    diag = [P[0]]
    table = [P[:]]
    for k in range(1, n):
        prev = table[-1]
        row = [(h[i] * prev[i + 1] - h[i + k] * prev[i]) / (h[i] - h[i + k]) for i in range(n - k)]
        table.append(row)
        diag.append(row[0])
    return diag


def komar_energy(scenario, X, quad: Optional[SphereQuadrature] = None,
                 rtol: float = 1e-12) -> KomarEnergy:
    """Extrapolated surface energy with its per-radius table."""
    quad = quad or SphereQuadrature()
    K = _spherical_killing(scenario, X)
    radii = sorted(quad.radii)
    values = _energies(K, quad, radii)
    table = list(zip(radii, values))
    if len(values) >= 3:
        steps = np.abs(np.diff(values))
        scale = max(1.0, float(np.max(np.abs(values))))
        if np.any(steps[1:] > steps[:-1] + rtol * scale):
            raise ConvergenceError(
                f"surface estimates do not settle with growing radius: {table}", table)
    # extrapolate in 1/r, nearest-to-infinity sample first
    h = [1.0 / r for r in reversed(radii)]
    ext = richardson(h, list(reversed(values)))
    return KomarEnergy(float(ext[-1]), table, ext)


def komar_energy_surface(scenario, X, quad: Optional[SphereQuadrature] = None) -> float:
    """Surface energy extrapolated to infinite radius."""
    return komar_energy(scenario, X, quad).value


# --- volume energy -----------------------------------------------------------------

@dataclass(frozen=True)
class BallQuadrature:
    """Gauss-Legendre in ``r`` and ``cos(theta)``, uniform in ``phi``, on a
    constant-time shell ``r_inner < r < r_outer`` (``r_inner = 0`` for a ball)."""

    r_outer: float
    r_inner: float = 0.0
    n_r: int = 24
    n_theta: int = 16
    n_phi: int = 16
    time: float = 0.0
    orientation: int = 1   # +1: dr ^ dtheta ^ dphi

    def nodes(self):
        x, wx = leggauss(self.n_r)
        half = 0.5 * (self.r_outer - self.r_inner)
        r = self.r_inner + half * (x + 1.0)
        sphere = SphereQuadrature((1.0,), self.n_theta, self.n_phi)
        th, ph, ws = sphere.nodes()
        R = np.repeat(r, th.size)
        W = np.repeat(half * wx, th.size) * np.tile(ws, r.size)
        return R, np.tile(th, r.size), np.tile(ph, r.size), W


def volume_energy_density(K: KillingField) -> FormField:
    """``*(T(A) - tr(T) A / 2)``, a 3-form."""
    trace = K.stress.trace_fn()
    TA = contract_one_forms(K.stress.mixed_fn(), K.A, "T(A)")
    source = TA - K.A.scale(lambda x: 0.5 * trace(x))
    gfn = K.metric.fn
    return FormField(lambda x: hodge(source.fn(x), gfn(x)), {3}, f"*src[{K.name}]")


def killing_energy_volume(scenario, K, ball: BallQuadrature) -> float:
    """``(1/8 pi)`` times the integral of ``*(T(A) - tr(T) A / 2)`` over a ball.

    Vacuum regions contribute nothing: the energy of a Schwarzschild exterior
    lives outside any ball that avoids the source.
    """
    K = _spherical_killing(scenario, K)
    r, th, ph, w = ball.nodes()
    pts = np.stack([np.full_like(r, ball.time), r, th, ph], axis=1)
    sample_array(K.metric, pts)
    dens = volume_energy_density(K).at(pts)[:, R_THETA_PHI] / np.sin(th)
    return ball.orientation * math.fsum(dens * w) / (8.0 * np.pi)

