"""Charts, analytic metric fields and their exact jets, chart transitions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import jax
import jax.numpy as jnp
import numpy as np

from .algebra import GRADE, MINKOWSKI, NBLADES, MetricAtPoint
from .fields import FormField, VectorField, jet

SIN_THETA_MIN = 1e-8
HORIZON_MARGIN = 1e-6


class DomainError(ValueError):
    """Point outside a chart or metric domain."""


@dataclass(frozen=True)
class Chart:
    name: str
    labels: tuple
    contains: Callable[[np.ndarray], bool]
    # maps to / from the canonical Cartesian chart, written with jax.numpy
    to_cartesian: Optional[Callable] = None
    from_cartesian: Optional[Callable] = None

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (4,) or not np.all(np.isfinite(x)):
            raise DomainError(f"bad point {x!r} for chart {self.name}")
        if not self.contains(x):
            raise DomainError(f"point {x.tolist()} outside chart {self.name}")
        return x


def _sph_to_cart(y):
    t, r, th, ph = y
    s = jnp.sin(th)
    return jnp.stack([t, r * s * jnp.cos(ph), r * s * jnp.sin(ph), r * jnp.cos(th)])


def _cart_to_sph(x):
    t, a, b, c = x
    r = jnp.sqrt(a * a + b * b + c * c)
    return jnp.stack([t, r, jnp.arccos(c / r), jnp.arctan2(b, a)])


def _sph_contains(y) -> bool:
    return bool(y[1] > 0 and np.sin(y[2]) >= SIN_THETA_MIN and 0 <= y[2] <= np.pi)


CARTESIAN = Chart(
    "cartesian", ("t", "x", "y", "z"), lambda x: True,
    to_cartesian=lambda x: x, from_cartesian=lambda x: x,
)
SPHERICAL = Chart(
    "spherical", ("t", "r", "theta", "phi"), _sph_contains,
    to_cartesian=_sph_to_cart, from_cartesian=_cart_to_sph,
)
CHARTS = {c.name: c for c in (CARTESIAN, SPHERICAL)}


def transition(src: Chart, dst: Chart) -> Callable:
    """Coordinate map from ``src`` to ``dst`` through the Cartesian chart."""
    if src.name == dst.name:
        return lambda x: x
    if src.to_cartesian is None or dst.from_cartesian is None:
        raise DomainError(f"no transition {src.name} -> {dst.name}")
    a, b = src.to_cartesian, dst.from_cartesian
    return lambda x: b(a(x))


def transition_jacobian(src: Chart, dst: Chart, x) -> np.ndarray:
    """``J[i, j] = d y^i / d x^j`` of the map ``src -> dst`` at ``x``."""
    return np.asarray(jax.jacfwd(transition(src, dst))(jnp.asarray(x, dtype=float)))


@dataclass(frozen=True, eq=False)
class MetricField:
    """Covariant metric components as a jax function on one chart."""

    name: str
    chart: Chart
    fn: Callable
    domain: Callable[[np.ndarray], bool] = lambda x: True
    params: dict = field(default_factory=dict)

    def check(self, x) -> np.ndarray:
        x = self.chart.check(x)
        if not self.domain(x):
            raise DomainError(f"point {x.tolist()} outside the domain of {self.name}")
        return x

    def __call__(self, x) -> MetricAtPoint:
        return MetricAtPoint.from_components(np.asarray(self.fn(jnp.asarray(self.check(x)))))


@dataclass(frozen=True)
class MetricJet:
    """Metric with exact first and second derivatives at a point.

    ``dg[mu, nu, s] = d_s g_{mu nu}``, ``ddg[mu, nu, r, s] = d_r d_s g_{mu nu}``.
    """

    g: MetricAtPoint
    dg: np.ndarray
    ddg: np.ndarray


def evaluate_metric_jet(metric: MetricField, p) -> MetricJet:
    x = metric.check(p)
    g, dg, ddg = jet(metric.fn, x, order=2)
    if not (np.all(np.isfinite(dg)) and np.all(np.isfinite(ddg))):
        raise DomainError(f"non-finite metric derivatives at {x.tolist()}")
    return MetricJet(MetricAtPoint.from_components(g), dg, ddg)


# --- built-in metrics -------------------------------------------------------

def _radius(x, chart: Chart):
    if chart is SPHERICAL:
        return x[1]
    return jnp.sqrt(x[1] ** 2 + x[2] ** 2 + x[3] ** 2)


def _static_spherical(lapse2: Callable, chart: Chart) -> Callable:
    """``f dt^2 - dr^2/f - r^2 dOmega^2`` in the requested chart, ``f = lapse2(r)``."""
    if chart is SPHERICAL:
        def fn(y):
            r, th = y[1], y[2]
            f = lapse2(r)
            return jnp.diag(jnp.stack([f, -1.0 / f, -r * r, -(r * jnp.sin(th)) ** 2]))
        return fn

    def fn(x):
        xs = x[1:]
        r2 = jnp.dot(xs, xs)
        f = lapse2(jnp.sqrt(r2))
        # singular at r = 0; de Sitter supplies its own Cartesian form
        k = (1.0 - f) / (f * r2)
        spatial = -jnp.eye(3) - k * jnp.outer(xs, xs)
        g = jnp.zeros((4, 4)).at[0, 0].set(f)
        return g.at[1:, 1:].set(spatial)
    return fn


def minkowski(chart: Chart = CARTESIAN) -> MetricField:
    if chart is SPHERICAL:
        return MetricField("minkowski", chart, _static_spherical(lambda r: 1.0 + 0.0 * r, chart))
    eta = jnp.asarray(MINKOWSKI)
    return MetricField("minkowski", chart, lambda x: eta + 0.0 * x[0])


def schwarzschild(m: float = 1.0, chart: Chart = SPHERICAL) -> MetricField:
    if m <= 0:
        raise ValueError("Schwarzschild mass must be positive")
    rmin = 2.0 * m * (1.0 + HORIZON_MARGIN)

    def domain(x):
        return float(np.asarray(_radius(jnp.asarray(x), chart))) > rmin

    return MetricField(
        "schwarzschild", chart, _static_spherical(lambda r: 1.0 - 2.0 * m / r, chart),
        domain, {"m": m},
    )


def de_sitter(lam: float = 0.03, chart: Chart = SPHERICAL) -> MetricField:
    """Static patch ``f = 1 - lam r^2 / 3``."""
    if lam <= 0:
        raise ValueError("cosmological constant must be positive")
    rmax = np.sqrt(3.0 / lam) * (1.0 - HORIZON_MARGIN)

    def domain(x):
        return float(np.asarray(_radius(jnp.asarray(x), chart))) < rmax

    if chart is SPHERICAL:
        fn = _static_spherical(lambda r: 1.0 - lam * r * r / 3.0, chart)
    else:
        def fn(x):
            xs = x[1:]
            f = 1.0 - lam * jnp.dot(xs, xs) / 3.0
            spatial = -jnp.eye(3) - (lam / 3.0) / f * jnp.outer(xs, xs)
            return jnp.zeros((4, 4)).at[0, 0].set(f).at[1:, 1:].set(spatial)
    return MetricField("de_sitter", chart, fn, domain, {"lambda": lam})


# --- transformations --------------------------------------------------------

_BLADES_OF_GRADE = {k: [b for b in range(NBLADES) if GRADE[b] == k] for k in range(5)}


def _indices(b: int) -> list:
    return [i for i in range(4) if b >> i & 1]


def blade_pullback_matrix(J):
    """``Lam[K, I] = det J[I, K]``: pulls blade ``dy^I`` back to ``sum_K Lam dx^K``.

    ``J[i, j] = d y^i / d x^j``.
    """
    Lam = jnp.zeros((NBLADES, NBLADES))
    Lam = Lam.at[0, 0].set(1.0)
    for k in range(1, 5):
        for I in _BLADES_OF_GRADE[k]:
            ii = _indices(I)
            for K in _BLADES_OF_GRADE[k]:
                kk = _indices(K)
                Lam = Lam.at[K, I].set(jnp.linalg.det(J[jnp.ix_(jnp.asarray(ii), jnp.asarray(kk))]))
    return Lam


def transform(obj, src: Chart, dst: Chart):
    """Express a point, vector field or form field of chart ``src`` in ``dst``.

    Vector fields are pushed forward, form fields pulled back along the
    inverse transition.
    """
    if src.name == dst.name:
        return obj
    back = transition(dst, src)
    fwd = transition(src, dst)
    if isinstance(obj, FormField):
        f = obj.fn

        def fn(y):
            J = jax.jacfwd(back)(y)
            return blade_pullback_matrix(J) @ f(back(y))
        return FormField(fn, obj.grades, obj.name)
    if isinstance(obj, VectorField):
        X = obj.fn

        def vfn(y):
            x = back(y)
            return jax.jacfwd(fwd)(x) @ X(x)
        return VectorField(vfn, obj.name)
    x = src.check(obj)
    y = np.asarray(fwd(jnp.asarray(x)))
    return dst.check(y)
