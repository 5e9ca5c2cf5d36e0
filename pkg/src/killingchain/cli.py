"""Command-line front end: run check suites and write JSON/CSV reports.

Exit status: 0 when no check fails, 1 when any check fails, 2 on a
configuration or scenario error.  ``gauge-violated`` and ``identity-gap``
are diagnostic findings and do not count as failures.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .report import FAIL, PASS, ResidualReport

CHECKS = (
    "killing", "lemmas", "wave", "maxwell", "teleparallel", "komar-current", "komar-energy",
    "fluid", "helmholtz", "navier-stokes", "f-relation", "bimetric", "constraint-last",
)
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: str
    killing: str
    checks: list
    params: dict = field(default_factory=dict)
    scenario_file: Optional[str] = None
    count: int = 100
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    radii: tuple = (50.0, 100.0, 200.0)
    n_theta: int = 32
    n_phi: int = 64
    json_path: Optional[str] = None
    csv_path: Optional[str] = None

    def validate(self) -> None:
        if not self.checks:
            raise ConfigError("no checks requested")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks {unknown}; known: {list(CHECKS)}")
        if self.count < 1:
            raise ConfigError("sample count must be positive")
        bad = {k: v for k, v in self.tolerances.items() if not v > 0}
        if bad:
            raise ConfigError(f"tolerances must be positive: {bad}")


# --- check dispatch -------------------------------------------------------------

def _load(config: RunConfig):
    from .scenarios import load_scenario, load_scenario_file
    if config.scenario_file:
        return load_scenario_file(config.scenario_file)
    return load_scenario(config.scenario, config.params)


def _komar_energy_report(scenario, config: RunConfig) -> ResidualReport:
    from .komar import ConvergenceError, SphereQuadrature, komar_energy
    quad = SphereQuadrature(tuple(config.radii), config.n_theta, config.n_phi)
    rmax = max(quad.radii)
    point = [[quad.time, rmax, 0.5 * np.pi, 0.0]]
    try:
        energy = komar_energy(scenario, config.killing, quad)
    except ConvergenceError as exc:
        rep = ResidualReport("komar-energy", scenario.name, config.killing, point, [0.0], 1e-6,
                             status=FAIL, chart="spherical", table=[list(r) for r in exc.table])
        rep.notes.append(str(exc))
        return rep
    ext = energy.extrapolated
    spread = abs(ext[-1] - ext[-2]) if len(ext) > 1 else 0.0
    rep = ResidualReport("komar-energy", scenario.name, config.killing, point, [spread], 1e-6,
                         chart="spherical", table=[list(r) for r in energy.table])
    rep.values["energy"] = energy.value
    rep.notes.append("residual is the change of the last Richardson step")
    return rep


def _fluid_state(scenario, config, sample):
    from .fluid import fluid_fields
    from .killing import killing_field
    return fluid_fields(killing_field(scenario, config.killing, "cartesian"), sample)


def run_check(name: str, scenario, config: RunConfig) -> list:
    from . import bimetric, fluid, killing, komar
    K = config.killing
    if name == "komar-energy":
        return [_komar_energy_report(scenario, config)]
    if name in ("fluid", "helmholtz", "navier-stokes", "f-relation", "bimetric",
                "constraint-last"):
        sample = scenario.sample("cartesian", config.count, config.seed)
    else:
        sample = scenario.sample(None, config.count, config.seed)
    if name == "killing":
        return [killing.killing_residual(scenario, K, sample)]
    if name == "lemmas":
        return killing.lemma_residuals(scenario, K, sample)
    if name == "wave":
        return killing.wave_equation_residual(scenario, K, sample)
    if name == "maxwell":
        return killing.maxwell_like_residuals(scenario, K, sample)
    if name == "teleparallel":
        return killing.teleparallel_split(scenario, K, sample=sample)
    if name == "komar-current":
        return komar.komar_current(scenario, K, sample)
    if name in ("fluid", "helmholtz", "navier-stokes"):
        kf = killing.killing_field(scenario, K, "cartesian")
        gate = fluid.postulate_residual(kf, sample)
        if not gate.passed:
            gate.notes.append("d is not a gradient; dependent fluid checks skipped")
            return [gate]
        state = fluid.fluid_fields(kf, sample)
        if name == "fluid":
            return [gate] + fluid.fluid_report(state, sample)
        if name == "helmholtz":
            return fluid.helmholtz_residual(state, sample)
        return [fluid.navier_stokes_residual(state, sample)]
    if name == "f-relation":
        return fluid.f_ring_relation(killing.killing_field(scenario, K, "cartesian"), sample)
    if name == "bimetric":
        return bimetric.bimetric_residuals(scenario, sample)
    if name == "constraint-last":
        return bimetric.constraint_last_residual(scenario, K, sample)
    raise ConfigError(f"unknown check {name!r}")


def _apply_tolerances(reports: list, tolerances: dict) -> None:
    for r in reports:
        tol = tolerances.get(r.check_id, tolerances.get(r.check_id.split(".")[0]))
        if tol is None:
            continue
        r.tolerance = float(tol)
        if r.status in (PASS, FAIL):
            r.status = PASS if r.within_tolerance else FAIL


def run_checks(config: RunConfig):
    """Run every requested check; return ``(exit_status, reports)``."""
    from .geometry import DomainError
    from .scenarios import ScenarioError
    try:
        config.validate()
        scenario = _load(config)
        scenario.generator(config.killing)
    except (ConfigError, ScenarioError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG, []
    reports = []
    for name in config.checks:
        try:
            reports.extend(run_check(name, scenario, config))
        except (ScenarioError, DomainError) as exc:
            print(f"error in check {name}: {exc}", file=sys.stderr)
            return EXIT_CONFIG, reports
    _apply_tolerances(reports, config.tolerances)
    status = EXIT_FAIL if any(r.status == FAIL for r in reports) else EXIT_OK
    return status, reports


# --- export ---------------------------------------------------------------------

def _num(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _to_json(obj, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return json.dumps(str(obj))


def report_to_dict(r: ResidualReport) -> dict:
    return {
        "check_id": r.check_id,
        "scenario": r.scenario,
        "killing_field": r.killing_field,
        "chart": r.chart,
        "conventions": dict(r.conventions),
        "max_residual": r.max_residual,
        "mean_residual": r.mean_residual,
        "tolerance": r.tolerance,
        "pass": r.passed,
        "status": r.status,
        "notes": list(r.notes),
        "values": dict(r.values),
        "table": [{"radius": row[0], "estimate": row[1]} for row in r.table],
        "per_point": [{"coords": list(p), "residual": e}
                      for p, e in zip(r.points, r.residuals)],
    }


def reports_json(reports: list) -> str:
    return _to_json([report_to_dict(r) for r in reports]) + "\n"


def reports_csv(reports: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check_id", "x0", "x1", "x2", "x3", "residual", "tolerance", "pass"])
    for r in reports:
        for p, e in zip(r.points, r.residuals):
            w.writerow([r.check_id, *(_num(c) for c in p), _num(e), _num(r.tolerance),
                        "true" if r.passed else "false"])
    return buf.getvalue()


def export_report(reports: list, fmt: str, path) -> Path:
    """Write reports as ``json`` or ``csv``; raises ``OSError`` for unwritable paths."""
    text = {"json": reports_json, "csv": reports_csv}[fmt](reports)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


# --- argument parsing -------------------------------------------------------------

def _params(text: Optional[str]) -> dict:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"parameter {item!r} is not key=value")
        try:
            out[key.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"parameter {key!r} is not a number") from exc
    return out


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="killingchain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run checks and write reports")
    v.add_argument("--scenario", default="schwarzschild")
    v.add_argument("--params", help="comma separated key=value, e.g. m=1")
    v.add_argument("--scenario-file", help="user scenario JSON")
    v.add_argument("--killing", default="d_t")
    v.add_argument("--checks", default="killing")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=100)
    v.add_argument("--tolerance", action="append", default=[], metavar="CHECK=VALUE")
    v.add_argument("--radii", default="50,100,200")
    v.add_argument("--n-theta", type=int, default=32)
    v.add_argument("--n-phi", type=int, default=64)
    v.add_argument("--out", default="reports")
    v.add_argument("--json", help="JSON path (default OUT/report.json)")
    v.add_argument("--csv", help="CSV path (default OUT/report.csv)")

    sub.add_parser("list-scenarios", help="print built-in scenarios and their fields")

    k = sub.add_parser("komar", help="surface energy with its extrapolation table")
    k.add_argument("--scenario", default="schwarzschild")
    k.add_argument("--params")
    k.add_argument("--killing", default="d_t")
    k.add_argument("--radii", default="50,100,200")
    k.add_argument("--n-theta", type=int, default=32)
    k.add_argument("--n-phi", type=int, default=64)
    k.add_argument("--out")
    return p


def _config_from_args(args) -> RunConfig:
    tolerances = _params(",".join(args.tolerance)) if args.tolerance else {}
    out = Path(args.out)
    return RunConfig(
        scenario=args.scenario, killing=args.killing,
        checks=[c.strip() for c in args.checks.split(",") if c.strip()],
        params=_params(args.params), scenario_file=args.scenario_file, count=args.count,
        seed=args.seed, tolerances=tolerances, radii=_floats(args.radii),
        n_theta=args.n_theta, n_phi=args.n_phi,
        json_path=args.json or str(out / "report.json"),
        csv_path=args.csv or str(out / "report.csv"),
    )


def _write(reports, config: RunConfig) -> int:
    try:
        if config.json_path:
            export_report(reports, "json", config.json_path)
        if config.csv_path:
            export_report(reports, "csv", config.csv_path)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def _summary(reports) -> None:
    for r in reports:
        print(f"{r.status:15s} {r.check_id:30s} max={r.max_residual:.3e} tol={r.tolerance:.1e}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list-scenarios":
            from .scenarios import BUILTINS
            for name in sorted(BUILTINS):
                sc = BUILTINS[name]({})
                m = sc.model()
                print(f"{name}: charts={sorted(sc.charts)} killing={sorted(m.killing)} "
                      f"controls={sorted(m.controls)}")
            return EXIT_OK
        if args.command == "komar":
            config = RunConfig(scenario=args.scenario, killing=args.killing,
                               checks=["komar-energy"], params=_params(args.params),
                               radii=_floats(args.radii), n_theta=args.n_theta,
                               n_phi=args.n_phi)
            if args.out:
                config.json_path = str(Path(args.out) / "komar.json")
                config.csv_path = str(Path(args.out) / "komar.csv")
        else:
            config = _config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    status, reports = run_checks(config)
    if status == EXIT_CONFIG and not reports:
        return status
    if args.command == "komar":
        for r in reports:
            for radius, est in r.table:
                print(f"r = {radius:g}: {est:.17g}")
            if "energy" in r.values:
                print(f"extrapolated energy: {r.values['energy']:.17g}")
    else:
        _summary(reports)
    written = _write(reports, config)
    return status if written == EXIT_OK else written


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
