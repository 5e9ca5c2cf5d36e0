"""Built-in spacetimes: charts, metrics, stress tensors, Killing fields, coframes.

Each scenario ships in a spherical chart and a Cartesian chart
(``x = r sin(theta) cos(phi)`` with the areal radius); the Cartesian chart is
also where the flat background metric is paired with the curved one.
"""
from __future__ import annotations

import ast
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional

import jax
import jax.numpy as jnp
import numpy as np
from scipy.stats import qmc

from .calculus import lie_derivative_metric_fn
from .curvature import EnergyMomentum, einstein_fn, zero_stress
from .fields import VectorField, one_form_field
from .geometry import (
    CARTESIAN, CHARTS, SPHERICAL, Chart, MetricField, de_sitter, minkowski, schwarzschild,
    transform,
)

EINSTEIN_TOLERANCE = 1e-8
KILLING_TOLERANCE = 1e-10
VALIDATION_POINTS = 50
DEFAULT_SAMPLE_COUNT = 100

# Sign of the cosmological term, T = sign * lambda * g.  Fixed once by
# requiring the Einstein residual to vanish in this package's conventions.
DE_SITTER_STRESS_SIGN = -1.0


class ScenarioError(ValueError):
    """Unknown scenario, bad parameters or a failed load-time invariant."""


@dataclass(frozen=True)
class Sample:
    """Points of one chart, shape ``(N, 4)``."""

    chart: str
    points: np.ndarray

    def __len__(self) -> int:
        return len(self.points)


@dataclass(eq=False)
class ChartModel:
    """Everything a scenario declares on one chart."""

    chart: Chart
    metric: MetricField
    background: MetricField
    stress: EnergyMomentum
    killing: dict            # name -> VectorField, declared isometries
    controls: dict           # name -> VectorField, known non-Killing generators
    f_factors: dict          # name -> scalar fn with g(X, .) = f * flat(X, .)
    coframe: Optional[list]  # four 1-form FormFields, orthonormal for the metric
    box: dict                # sampling box in spherical variables


@dataclass(eq=False)
class Scenario:
    name: str
    params: dict
    charts: dict
    default_chart: str = "spherical"
    pairing_chart: str = "cartesian"

    def model(self, chart: Optional[str] = None) -> ChartModel:
        key = chart or self.default_chart
        if key not in self.charts:
            raise ScenarioError(f"scenario {self.name} has no chart {key!r}")
        return self.charts[key]

    def killing_names(self) -> list:
        return list(self.model().killing)

    def generator(self, name: str, chart: Optional[str] = None) -> VectorField:
        m = self.model(chart)
        if name in m.killing:
            return m.killing[name]
        if name in m.controls:
            return m.controls[name]
        known = sorted(m.killing) + sorted(m.controls)
        raise ScenarioError(f"scenario {self.name} has no field {name!r}; known: {known}")

    def is_declared_killing(self, name: str) -> bool:
        return name in self.model().killing

    def sample(self, chart: Optional[str] = None, count: int = DEFAULT_SAMPLE_COUNT,
               seed: int = 0) -> Sample:
        m = self.model(chart)
        return Sample(m.chart.name, sample_points(m.chart, m.box, count, seed))


# --- sampling -----------------------------------------------------------------

def sample_points(chart: Chart, box: dict, count: int, seed: int) -> np.ndarray:
    """Scrambled Halton points in a spherical box, expressed in ``chart``."""
    if count < 1:
        raise ScenarioError("sample count must be positive")
    u = qmc.Halton(d=4, scramble=True, seed=seed).random(count)
    lo = np.array([box["t"][0], box["r"][0], box["theta"][0], box["phi"][0]])
    hi = np.array([box["t"][1], box["r"][1], box["theta"][1], box["phi"][1]])
    sph = lo + u * (hi - lo)
    if chart is SPHERICAL:
        return sph
    t, r, th, ph = sph.T
    s = np.sin(th)
    return np.stack([t, r * s * np.cos(ph), r * s * np.sin(ph), r * np.cos(th)], axis=1)


def _box(rmin: float, rmax: float) -> dict:
    return {"t": (-1.0, 1.0), "r": (rmin, rmax), "theta": (0.2, np.pi - 0.2),
            "phi": (0.0, 2.0 * np.pi)}


# --- generators -----------------------------------------------------------------

def _vf(components: Callable, name: str) -> VectorField:
    return VectorField(lambda x: jnp.stack(components(x)), name)


def _cartesian_generators() -> dict:
    z = lambda x: 0.0 * x[0]  # noqa: E731
    one = lambda x: 1.0 + 0.0 * x[0]  # noqa: E731
    coord = lambda i: (lambda x: x[i])  # noqa: E731
    t_, x_, y_, z_ = (coord(i) for i in range(4))
    spec = {
        "d_t": (one, z, z, z),
        "d_x": (z, one, z, z),
        "d_y": (z, z, one, z),
        "d_z": (z, z, z, one),
        "rot_x": (z, z, lambda x: -x[3], y_),
        "rot_y": (z, z_, z, lambda x: -x[1]),
        "rot_z": (z, lambda x: -x[2], x_, z),
        "boost_x": (x_, t_, z, z),
        "boost_y": (y_, z, t_, z),
        "boost_z": (z_, z, z, t_),
    }
    return {k: _vf(lambda x, c=c: [f(x) for f in c], k) for k, c in spec.items()}


def _radial_cartesian() -> VectorField:
    return VectorField(lambda x: x * jnp.asarray([0.0, 1.0, 1.0, 1.0]), "r_dr")


def _spherical_native() -> dict:
    e = lambda i: VectorField(  # noqa: E731
        lambda y: jnp.zeros(4).at[i].set(1.0) + 0.0 * y[0], "")
    d_t, d_phi = e(0), e(3)
    d_t.name, d_phi.name = "d_t", "rot_z"
    r_dr = VectorField(lambda y: jnp.zeros(4).at[1].set(y[1]), "r_dr")
    return {"d_t": d_t, "rot_z": d_phi, "r_dr": r_dr}


def _in_spherical(fields: dict) -> dict:
    native = _spherical_native()
    out = {}
    for k, X in fields.items():
        out[k] = native[k] if k in native else transform(X, CARTESIAN, SPHERICAL)
        out[k].name = k
    return out


def _alias_phi(fields: dict) -> dict:
    # d_phi is the conventional name of the z rotation
    out = dict(fields)
    out["d_phi"] = fields["rot_z"]
    return out


# --- coframes -------------------------------------------------------------------

def _diagonal_coframe(lapse2: Callable) -> list:
    """Orthonormal coframe of ``f dt^2 - dr^2/f - r^2 dOmega^2`` in the spherical chart."""
    def comp(a):
        def c(y):
            r, th = y[1], y[2]
            sf = jnp.sqrt(lapse2(r))
            vals = [sf, 1.0 / sf, r, r * jnp.sin(th)]
            return jnp.zeros(4).at[a].set(vals[a])
        return c
    return [one_form_field(comp(a), f"frame{a}") for a in range(4)]


def _cartesian_coframe() -> list:
    return [one_form_field(lambda x, a=a: jnp.zeros(4).at[a].set(1.0) + 0.0 * x[0], f"dx{a}")
            for a in range(4)]


# --- built-in scenarios -------------------------------------------------------------

def _radius_fn(chart: Chart) -> Callable:
    if chart is SPHERICAL:
        return lambda x: x[1]
    return lambda x: jnp.sqrt(x[1] ** 2 + x[2] ** 2 + x[3] ** 2)


def _static_scenario(name, params, metric_factory, lapse2, stress_factory, rmin, rmax,
                     generators) -> Scenario:
    charts = {}
    for chart in (SPHERICAL, CARTESIAN):
        metric = metric_factory(chart)
        gens = generators if chart is CARTESIAN else _in_spherical(generators)
        controls = {"r_dr": _radial_cartesian() if chart is CARTESIAN
                    else _spherical_native()["r_dr"]}
        radius = _radius_fn(chart)
        f = {k: (lambda x: 1.0 + 0.0 * x[0]) for k in gens}
        f["d_t"] = lambda x: lapse2(radius(x))
        f["d_phi"] = f["rot_z"]
        if chart is SPHERICAL:
            frame = _diagonal_coframe(lapse2)
        elif name == "minkowski":
            frame = _cartesian_coframe()
        else:
            frame = [transform(w, SPHERICAL, CARTESIAN) for w in _diagonal_coframe(lapse2)]
        charts[chart.name] = ChartModel(
            chart=chart, metric=metric, background=minkowski(chart),
            stress=EnergyMomentum(stress_factory(metric), metric),
            killing=_alias_phi(gens), controls=controls, f_factors=f, coframe=frame,
            box=_box(rmin, rmax),
        )
    default = "cartesian" if name == "minkowski" else "spherical"
    return Scenario(name, dict(params), charts, default_chart=default)


def _minkowski(params: dict) -> Scenario:
    if params:
        raise ScenarioError(f"minkowski takes no parameters, got {sorted(params)}")
    return _static_scenario(
        "minkowski", {}, minkowski, lambda r: 1.0 + 0.0 * r, lambda g: zero_stress,
        0.5, 10.0, _cartesian_generators())


def _rotations_and_time() -> dict:
    gens = _cartesian_generators()
    return {k: gens[k] for k in ("d_t", "rot_x", "rot_y", "rot_z")}


def _only(name: str, params: dict, allowed: set) -> None:
    extra = set(params) - allowed
    if extra:
        raise ScenarioError(f"{name} does not take parameters {sorted(extra)}")


def _schwarzschild(params: dict) -> Scenario:
    _only("schwarzschild", params, {"m"})
    m = float(params.get("m", 1.0))
    if not m > 0:
        raise ScenarioError("schwarzschild needs m > 0")
    return _static_scenario(
        "schwarzschild", {"m": m}, lambda c: schwarzschild(m, c), lambda r: 1.0 - 2.0 * m / r,
        lambda g: zero_stress, 3.0 * m, 20.0 * m, _rotations_and_time())


def _de_sitter(params: dict) -> Scenario:
    _only("de_sitter", params, {"lambda", "lam"})
    lam = float(params.get("lambda", params.get("lam", 0.03)))
    if not lam > 0:
        raise ScenarioError("de_sitter needs lambda > 0")
    horizon = np.sqrt(3.0 / lam)

    def stress(metric):
        gfn = metric.fn
        return lambda x: DE_SITTER_STRESS_SIGN * lam * gfn(x)

    return _static_scenario(
        "de_sitter", {"lambda": lam}, lambda c: de_sitter(lam, c),
        lambda r: 1.0 - lam * r * r / 3.0, stress, 0.05 * horizon, 0.8 * horizon,
        _rotations_and_time())


BUILTINS = {
    "minkowski": _minkowski,
    "schwarzschild": _schwarzschild,
    "de_sitter": _de_sitter,
}


def list_scenarios() -> list:
    return sorted(BUILTINS)


# --- validation -------------------------------------------------------------------

def validate(scenario: Scenario, count: int = VALIDATION_POINTS, seed: int = 12345) -> None:
    """Enforce the Einstein and Killing invariants on every chart; raise on failure."""
    for key, m in scenario.charts.items():
        pts = sample_points(m.chart, m.box, count, seed)
        ein = einstein_fn(m.metric.fn)
        T = m.stress.fn
        names = list(m.killing)
        lies = [lie_derivative_metric_fn(m.killing[k], m.metric) for k in names]

        def residuals(x):
            # one compiled kernel for every invariant of the chart
            parts = [jnp.max(jnp.abs(ein(x) - T(x)))]
            parts += [jnp.max(jnp.abs(lie(x))) for lie in lies]
            return jnp.stack(parts)

        res = np.asarray(jax.jit(jax.vmap(residuals))(pts))
        if not np.all(res[:, 0] < EINSTEIN_TOLERANCE):
            raise ScenarioError(f"{scenario.name}/{key}: Einstein residual "
                                f"{res[:, 0].max():.3e} >= {EINSTEIN_TOLERANCE}")
        for j, name in enumerate(names, start=1):
            if not np.all(res[:, j] < KILLING_TOLERANCE):
                raise ScenarioError(
                    f"{scenario.name}/{key}: declared Killing field {name} has "
                    f"Lie-derivative residual {res[:, j].max():.3e} >= {KILLING_TOLERANCE}")


@lru_cache(maxsize=None)
def _load_cached(name: str, frozen_params: tuple) -> Scenario:
    sc = BUILTINS[name](dict(frozen_params))
    validate(sc)
    return sc


def load_scenario(name: str, params: Optional[dict] = None) -> Scenario:
    """Build and validate a built-in scenario.  Results are cached and must not be mutated."""
    if name not in BUILTINS:
        raise ScenarioError(f"unknown scenario {name!r}; known: {list_scenarios()}")
    params = params or {}
    try:
        frozen = tuple(sorted((k, float(v)) for k, v in params.items()))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"scenario parameters must be numbers: {params}") from exc
    return _load_cached(name, frozen)


# --- user scenario files --------------------------------------------------------

_COORD_NAMES = {
    "cartesian": {"t": 0, "x": 1, "y": 2, "z": 3},
    "spherical": {"t": 0, "r": 1, "theta": 2, "phi": 3},
}


def parse_polynomial(text: str, chart: str = "cartesian") -> Callable:
    """Compile a polynomial in the chart coordinates into a jax function.

    Accepted: numbers, coordinate names (or ``x0``..``x3``), ``+ - *`` and
    ``**`` with a non-negative integer literal exponent.
    """
    names = dict(_COORD_NAMES[chart])
    names.update({f"x{i}": i for i in range(4)})
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ScenarioError(f"cannot parse expression {text!r}") from exc

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            v = float(node.value)
            return lambda x: v + 0.0 * x[0]
        if isinstance(node, ast.Name) and node.id in names:
            i = names[node.id]
            return lambda x: x[i]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            f = build(node.operand)
            return (lambda x: -f(x)) if isinstance(node.op, ast.USub) else f
        if isinstance(node, ast.BinOp):
            a = build(node.left)
            if isinstance(node.op, ast.Pow):
                e = node.right
                if not (isinstance(e, ast.Constant) and type(e.value) is int and e.value >= 0):
                    raise ScenarioError(f"exponent must be a non-negative integer in {text!r}")
                n = e.value
                return lambda x: a(x) ** n
            b = build(node.right)
            ops = {ast.Add: jnp.add, ast.Sub: jnp.subtract, ast.Mult: jnp.multiply}
            op = ops.get(type(node.op))
            if op is not None:
                return lambda x: op(a(x), b(x))
        raise ScenarioError(f"unsupported element {ast.dump(node)} in {text!r}")

    return build(tree)


def scenario_from_dict(spec: dict) -> Scenario:
    """A built-in scenario extended with user-declared fields (validated on load).

    Schema: ``{name, params{}, chart?, killing_fields[{name, components[4]}],
    f_expression?, coframe?}`` with polynomial expressions in the chart
    coordinates.  ``f_expression`` is either one expression for every user
    field or a mapping from field name to expression; ``coframe`` is four
    lists of four 1-form components.
    """
    if not isinstance(spec, dict) or "name" not in spec:
        raise ScenarioError("scenario JSON must be an object with a 'name'")
    base_name = spec["name"]
    if base_name not in BUILTINS:
        raise ScenarioError(f"unknown scenario {base_name!r}; known: {list_scenarios()}")
    chart = spec.get("chart", "cartesian")
    if chart not in CHARTS:
        raise ScenarioError(f"unknown chart {chart!r}")
    base = BUILTINS[base_name](dict(spec.get("params", {})))
    m = base.charts[chart]
    user = {}
    for entry in spec.get("killing_fields", []):
        comps = entry.get("components")
        if not isinstance(comps, list) or len(comps) != 4:
            raise ScenarioError(f"killing field {entry.get('name')!r} needs 4 components")
        fns = [parse_polynomial(str(c), chart) for c in comps]
        user[entry["name"]] = VectorField(lambda x, fns=fns: jnp.stack([f(x) for f in fns]),
                                          entry["name"])
    killing = dict(m.killing)
    killing.update(user)
    f_factors = dict(m.f_factors)
    fexpr = spec.get("f_expression")
    if isinstance(fexpr, str):
        f_factors.update({k: parse_polynomial(fexpr, chart) for k in user})
    elif isinstance(fexpr, dict):
        f_factors.update({k: parse_polynomial(str(v), chart) for k, v in fexpr.items()})
    coframe = m.coframe
    if spec.get("coframe") is not None:
        rows = spec["coframe"]
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ScenarioError("coframe must be 4 lists of 4 expressions")
        coframe = []
        for a, row in enumerate(rows):
            fns = [parse_polynomial(str(c), chart) for c in row]
            coframe.append(one_form_field(lambda x, fns=fns: jnp.stack([f(x) for f in fns]),
                                          f"frame{a}"))
    model = ChartModel(chart=m.chart, metric=m.metric, background=m.background, stress=m.stress,
                       killing=killing, controls=m.controls, f_factors=f_factors,
                       coframe=coframe, box=m.box)
    sc = Scenario(base_name, base.params, {chart: model}, default_chart=chart,
                  pairing_chart=chart if chart == "cartesian" else "")
    validate(sc)
    return sc


def load_scenario_file(path) -> Scenario:
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    return scenario_from_dict(spec)
