"""Killing fields and the residual checks of the Einstein -> Maxwell-like chain.

For a Killing 1-form ``A = g(X, .)`` and ``F = dA`` the checks evaluate, point
by point,

* ``L_X g = 0`` and the Lorenz condition ``delta A = 0``;
* ``box A = Ric(A)`` where ``box`` is the trace part of the Dirac square;
* the wave equation ``box A - R A / 2 - T(A) = 0``;
* ``dF = 0``, ``delta F = -(R A + 2 T(A))`` and the single Dirac-operator
  equation ``(d - delta) F = R A + 2 T(A)``;
* the coframe split of the current into gravitational and matter parts.

Each check returns a :class:`ResidualReport` (or a list when it reports
several residuals).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import jax
import jax.numpy as jnp
import numpy as np

from .calculus import (
    codifferential, dalembertian_and_ricci_split, exterior_derivative, lie_derivative_metric_fn,
    lower_index, ricci_operator,
)
from .curvature import contract_one_forms, mixed_ricci_fn, scalar_curvature_fn
from .fields import FormField, VectorField, one_form_components
from .geometry import MetricField
from .report import FAIL, GAUGE_VIOLATED, ResidualReport

# default tolerances, one per residual line
TOL_KILLING = 1e-10
TOL_LORENZ = 1e-9
TOL_RICCI_SPLIT = 1e-8
TOL_WAVE = 1e-8
TOL_DETERMINANT = 1e-8
TOL_DF = 1e-10
TOL_DELTA_F = 1e-7
TOL_CONSERVATION = 1e-8
TOL_CURRENT_ROUTES = 1e-8
TOL_ORTHONORMAL = 1e-8
TOL_GAUGE = 1e-8
TOL_SPLIT = 1e-7
DIRAC_SLACK = 1e-12


class CoframeError(ValueError):
    """A supplied coframe does not reconstruct the metric."""


@dataclass(eq=False)
class KillingField:
    """A generator together with its curved and flat dual 1-forms.

    ``A = g(X, .)`` and ``A_flat = eta(X, .)`` in the same chart, with
    ``F = dA`` and ``F_flat = dA_flat``.  ``f`` is the declared scalar with
    ``A = f A_flat`` when the scenario supplies one.
    """

    name: str
    scenario: str
    chart: str
    X: VectorField
    metric: MetricField
    background: MetricField
    stress: object
    A: FormField
    A_flat: FormField
    F: FormField
    F_flat: FormField
    f: Optional[Callable] = None
    declared: bool = True


def killing_field(scenario, name: str, chart: Optional[str] = None) -> KillingField:
    """Assemble the Killing data of a named generator on a scenario chart."""
    model = scenario.model(chart)
    X = scenario.generator(name, model.chart.name)
    A = lower_index(X, model.metric.fn, f"A[{name}]")
    A_flat = lower_index(X, model.background.fn, f"Aflat[{name}]")
    return KillingField(
        name=name, scenario=scenario.name, chart=model.chart.name, X=X,
        metric=model.metric, background=model.background, stress=model.stress,
        A=A, A_flat=A_flat, F=exterior_derivative(A), F_flat=exterior_derivative(A_flat),
        f=model.f_factors.get(name), declared=name in model.killing,
    )


def _as_killing(scenario, K: Union[KillingField, str], chart: Optional[str]) -> KillingField:
    return K if isinstance(K, KillingField) else killing_field(scenario, K, chart)


def sample_array(metric: MetricField, sample) -> np.ndarray:
    """Validated ``(N, 4)`` points; raises ``DomainError`` for any bad point."""
    pts = getattr(sample, "points", sample)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    for p in pts:
        metric.check(p)
    return pts


def evaluate(fn: Callable, points: np.ndarray):
    """Jit-compile ``fn`` over a batch of points and return numpy outputs."""
    out = jax.jit(jax.vmap(fn))(jnp.asarray(points))
    return jax.tree_util.tree_map(np.asarray, out)


def report_for(check_id, K: KillingField, pts, residuals, tol, **kw) -> ResidualReport:
    return ResidualReport(check_id=check_id, scenario=K.scenario, killing_field=K.name,
                          points=pts, residuals=residuals, tolerance=tol, chart=K.chart, **kw)


def _stress_action(K: KillingField) -> FormField:
    """``T(A) = A_mu T^mu_nu dx^nu``."""
    return contract_one_forms(K.stress.mixed_fn(), K.A, f"T({K.A.name})")


def _scaled_by_curvature(A: FormField, metric: MetricField, factor: float = 1.0) -> FormField:
    R = scalar_curvature_fn(metric.fn)
    return A.scale(lambda x: factor * R(x))


# --- checks -------------------------------------------------------------------

def killing_residual(scenario, X: Union[VectorField, str], sample,
                     chart: Optional[str] = None, tol: float = TOL_KILLING) -> ResidualReport:
    """``max |(L_X g)_{mu nu}|`` per point."""
    chart = chart or getattr(sample, "chart", None)
    model = scenario.model(chart)
    name = X if isinstance(X, str) else X.name
    field = scenario.generator(X, model.chart.name) if isinstance(X, str) else X
    pts = sample_array(model.metric, sample)
    lie = lie_derivative_metric_fn(field, model.metric)
    res = evaluate(lambda x: jnp.max(jnp.abs(lie(x))), pts)
    return ResidualReport("killing", scenario.name, name, pts, res, tol, chart=model.chart.name)


def lemma_residuals(scenario, K, sample, chart: Optional[str] = None) -> list:
    """``|delta A|`` and ``|box A - Ric(A)|`` per point."""
    K = _as_killing(scenario, K, chart or getattr(sample, "chart", None))
    pts = sample_array(K.metric, sample)
    dA = codifferential(K.A, K.metric)
    box, ricci_part, _ = dalembertian_and_ricci_split(K.A, K.metric)
    lorenz, split = evaluate(
        lambda x: (jnp.max(jnp.abs(dA.fn(x))), jnp.max(jnp.abs(box.fn(x) - ricci_part.fn(x)))),
        pts)
    return [
        report_for("lemmas.lorenz", K, pts, lorenz, TOL_LORENZ),
        report_for("lemmas.box_minus_ricci", K, pts, split, TOL_RICCI_SPLIT),
    ]


def einstein_operator_fn(K: KillingField) -> Callable:
    """``R^mu_nu - R delta^mu_nu / 2 - T^mu_nu`` as a function of the point."""
    ric = mixed_ricci_fn(K.metric.fn)
    R = scalar_curvature_fn(K.metric.fn)
    T = K.stress.mixed_fn()
    return lambda x: ric(x) - 0.5 * R(x) * jnp.eye(4) - T(x)


def wave_equation_residual(scenario, K, sample, chart: Optional[str] = None) -> list:
    """``|box A - R A / 2 - T(A)|`` and ``|det(Ric - R/2 - T)|`` per point."""
    K = _as_killing(scenario, K, chart or getattr(sample, "chart", None))
    pts = sample_array(K.metric, sample)
    box, _, _ = dalembertian_and_ricci_split(K.A, K.metric)
    wave = box - _scaled_by_curvature(K.A, K.metric, 0.5) - _stress_action(K)
    op = einstein_operator_fn(K)
    res, det = evaluate(
        lambda x: (jnp.max(jnp.abs(wave.fn(x))), jnp.abs(jnp.linalg.det(op(x)))), pts)
    return [
        report_for("wave", K, pts, res, TOL_WAVE),
        report_for("wave.determinant", K, pts, det, TOL_DETERMINANT),
    ]


def current_fields(K: KillingField):
    """``(J, J_s)`` with ``J = R A + 2 T(A)`` and the superconducting part ``J_s = R A``."""
    Js = _scaled_by_curvature(K.A, K.metric)
    Js.name = f"Js[{K.name}]"
    J = Js + _stress_action(K).scale(2.0)
    J.grades, J.name = frozenset({1}), f"J[{K.name}]"
    return J, Js


def maxwell_like_residuals(scenario, K, sample, chart: Optional[str] = None) -> list:
    """The Maxwell-like system for ``F = dA``.

    Lines: ``dF``; ``delta F + J``; ``(d - delta) F - J`` (bounded pointwise by
    the first two plus a tiny slack); conservation ``delta delta F``; and the
    agreement of ``J`` with ``2 Ric(A)``.
    """
    K = _as_killing(scenario, K, chart or getattr(sample, "chart", None))
    pts = sample_array(K.metric, sample)
    dF = exterior_derivative(K.F)
    deltaF = codifferential(K.F, K.metric)
    cons = codifferential(deltaF, K.metric)
    J, Js = current_fields(K)
    ric = ricci_operator(K.A, K.metric)

    def per_point(x):
        d, de, j = dF.fn(x), deltaF.fn(x), J.fn(x)
        return (jnp.max(jnp.abs(d)), jnp.max(jnp.abs(de + j)),
                jnp.max(jnp.abs(d - de - j)), jnp.max(jnp.abs(cons.fn(x))),
                jnp.max(jnp.abs(j - 2.0 * ric.fn(x))))

    r_d, r_delta, r_dirac, r_cons, r_routes = evaluate(per_point, pts)
    fields = {"J": J, "J_s": Js}
    dirac = report_for("maxwell.dirac", K, pts, r_dirac, TOL_DF + TOL_DELTA_F + DIRAC_SLACK,
                    fields=fields)
    bound = r_d + r_delta + DIRAC_SLACK
    if np.any(r_dirac > bound):
        dirac.status = FAIL
        dirac.notes.append("Dirac-equation residual exceeds the dF + delta F bound")
    return [
        report_for("maxwell.dF", K, pts, r_d, TOL_DF, fields=fields),
        report_for("maxwell.delta_F", K, pts, r_delta, TOL_DELTA_F, fields=fields),
        dirac,
        report_for("maxwell.conservation", K, pts, r_cons, TOL_CONSERVATION),
        report_for("maxwell.current_routes", K, pts, r_routes, TOL_CURRENT_ROUTES),
    ]


# --- coframe split -------------------------------------------------------------

def _coframe_matrix_fn(coframe) -> Callable:
    fns = [w.fn for w in coframe]
    return lambda x: jnp.stack([one_form_components(f(x)) for f in fns])  # E[a, mu]


def teleparallel_split(scenario, K, coframe=None, sample=None,
                       chart: Optional[str] = None) -> list:
    """Split the current with an orthonormal coframe ``theta^a``.

    ``t^a = box theta^a + R theta^a / 2`` and
    ``t(A) = t^a A_a - A_a box theta^a``; the residual line is
    ``|delta F + 2 (t(A) + T(A))|``.  The Lorenz condition on every
    ``theta^a`` is checked first; when it fails the residual is skipped and
    the gauge line carries status ``gauge-violated``.
    """
    K = _as_killing(scenario, K, chart or getattr(sample, "chart", None))
    if coframe is None:
        coframe = scenario.model(K.chart).coframe
    if coframe is None or len(coframe) != 4:
        raise CoframeError("an orthonormal coframe of four 1-forms is required")
    pts = sample_array(K.metric, sample)
    E = _coframe_matrix_fn(coframe)
    eta = jnp.diag(jnp.asarray([1.0, -1.0, -1.0, -1.0]))
    gfn = K.metric.fn
    ortho = evaluate(lambda x: jnp.max(jnp.abs(E(x).T @ eta @ E(x) - gfn(x))), pts)
    if np.max(ortho) > TOL_ORTHONORMAL:
        raise CoframeError(
            f"coframe does not reconstruct the metric: error {np.max(ortho):.3e} > {TOL_ORTHONORMAL}")

    deltas = [codifferential(w, K.metric) for w in coframe]
    gauge = evaluate(lambda x: jnp.max(jnp.abs(jnp.stack([d.fn(x) for d in deltas]))), pts)
    gauge_report = report_for("teleparallel.gauge", K, pts, gauge, TOL_GAUGE)
    if not gauge_report.within_tolerance:
        gauge_report.status = GAUGE_VIOLATED
        gauge_report.notes.append("coframe is not in the Lorenz gauge; split residual skipped")
        return [gauge_report]

    boxes = [dalembertian_and_ricci_split(w, K.metric)[0] for w in coframe]
    R = scalar_curvature_fn(gfn)
    deltaF = codifferential(K.F, K.metric)
    TA = _stress_action(K)

    def per_point(x):
        frame = E(x)
        a_frame = one_form_components(K.A.fn(x)) @ jnp.linalg.inv(frame)
        box_rows = jnp.stack([one_form_components(b.fn(x)) for b in boxes])  # [a, mu]
        t_rows = box_rows + 0.5 * R(x) * frame
        t_of_A = a_frame @ t_rows - a_frame @ box_rows
        total = one_form_components(deltaF.fn(x)) + 2.0 * (t_of_A + one_form_components(TA.fn(x)))
        return jnp.max(jnp.abs(total))

    split = evaluate(per_point, pts)
    return [gauge_report, report_for("teleparallel", K, pts, split, TOL_SPLIT)]
