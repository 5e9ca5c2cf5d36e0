"""Acceptance criteria 1-9, one test each; the terminal summary lists PASS/FAIL per criterion."""
import time

import numpy as np
import pytest

from helpers import batched, random_coefficients
from test_algebra import cayley_table
from killingchain.algebra import MINKOWSKI, MetricAtPoint, hodge, product_tensor
from killingchain.bimetric import bimetric_residuals, constraint_last_residual
from killingchain.calculus import (
    covariant_dalembertian, dalembertian_and_ricci_split, dirac_apply, hodge_laplacian_minus,
)
from killingchain.cli import main
from killingchain.fluid import (
    chi_path_gap, decompose_potential, f_ring_relation, flat_field_strength, fluid_fields,
    helmholtz_residual, navier_stokes_residual,
)
from killingchain.killing import (
    killing_field, killing_residual, lemma_residuals, maxwell_like_residuals,
)
from killingchain.komar import SphereQuadrature, komar_current, komar_energy
from killingchain.report import IDENTITY_GAP, PASS
from killingchain.scenarios import BUILTINS, validate

COUNT = 100
SEED = 0


def claim(record, number, text):
    record("criterion", f"{number}: {text}")


def by_id(reports):
    return {r.check_id: r for r in reports}


def test_criterion_1_komar_mass(record_property):
    claim(record_property, 1, "Komar energy of Schwarzschild m=1 is 1 within 1e-6 in under 10 s")
    start = time.perf_counter()
    sc = BUILTINS["schwarzschild"]({"m": 1.0})      # fresh build, nothing precompiled
    validate(sc)
    e = komar_energy(sc, "d_t", SphereQuadrature(radii=(50.0, 100.0, 200.0), n_theta=32, n_phi=64))
    elapsed = time.perf_counter() - start
    record_property("detail", f"E = {e.value:.17g}, {elapsed:.2f} s")
    assert abs(e.value - 1.0) < 1e-6
    assert elapsed < 10.0


def test_criterion_2_killing_suite(record_property, minkowski_sc, schwarzschild_sc, de_sitter_sc):
    claim(record_property, 2, "declared Killing fields < 1e-10 at 100 points; r d_r control > 1e-2")
    worst = 0.0
    for sc in (minkowski_sc, schwarzschild_sc, de_sitter_sc):
        sample = sc.sample(count=COUNT, seed=SEED)
        for name in sc.killing_names():
            r = killing_residual(sc, name, sample)
            worst = max(worst, r.max_residual)
            assert r.max_residual < 1e-10, (sc.name, name, r.max_residual)
    control = killing_residual(schwarzschild_sc, "r_dr", schwarzschild_sc.sample(count=COUNT, seed=SEED))
    record_property("detail", f"worst Killing residual {worst:.2e}, control {control.max_residual:.3g}")
    assert control.max_residual > 1e-2 and not control.passed


def test_criterion_3_lemma_suite(record_property, schwarzschild_sc, de_sitter_sc):
    claim(record_property, 3, "|delta A| < 1e-9 and |box A - Ric(A)| < 1e-8")
    worst = [0.0, 0.0]
    for sc, name in ((schwarzschild_sc, "d_t"), (schwarzschild_sc, "d_phi"), (de_sitter_sc, "d_t")):
        rep = by_id(lemma_residuals(sc, name, sc.sample(count=COUNT, seed=SEED)))
        worst[0] = max(worst[0], rep["lemmas.lorenz"].max_residual)
        worst[1] = max(worst[1], rep["lemmas.box_minus_ricci"].max_residual)
    record_property("detail", f"lorenz {worst[0]:.2e}, box-ricci {worst[1]:.2e}")
    assert worst[0] < 1e-9 and worst[1] < 1e-8


def test_criterion_4_maxwell_like_suite(record_property, schwarzschild_sc, de_sitter_sc):
    claim(record_property, 4, "dF < 1e-10; delta F + J < 1e-7; Dirac residual within the bound")
    details = []
    for sc in (schwarzschild_sc, de_sitter_sc):
        rep = by_id(maxwell_like_residuals(sc, "d_t", sc.sample(count=COUNT, seed=SEED)))
        dF, dl, dirac = rep["maxwell.dF"], rep["maxwell.delta_F"], rep["maxwell.dirac"]
        details.append(f"{sc.name}: dF {dF.max_residual:.1e}, deltaF {dl.max_residual:.1e}")
        assert dF.max_residual < 1e-10
        assert dl.max_residual < 1e-7
        assert np.all(dirac.residuals <= dF.residuals + dl.residuals + 1e-12)
    record_property("detail", "; ".join(details))


@pytest.mark.parametrize("scenario", ["minkowski", "schwarzschild", "de_sitter"])
def test_criterion_5_operator_identities(record_property, scenario, request):
    claim(record_property, 5, f"operator identities on 200 random fields ({scenario})")
    sc = request.getfixturevalue({"minkowski": "minkowski_sc", "schwarzschild": "schwarzschild_sc",
                                  "de_sitter": "de_sitter_sc"}[scenario])
    metric = sc.model().metric
    pts = sc.sample(count=200, seed=SEED).points
    scale = float(sc.model().box["r"][1])
    rng = np.random.default_rng(5)

    P = random_coefficients(rng, 200)
    twice = batched(lambda w: dirac_apply(dirac_apply(w, metric), metric), scale)(P, pts)
    square = batched(lambda w: hodge_laplacian_minus(w, metric), scale)(P, pts)
    gap_square = float(np.max(np.abs(twice - square)))

    P1 = random_coefficients(rng, 200, grades={1})

    def split_gap(w):
        _, ricci_part, sq = dalembertian_and_ricci_split(w, metric)
        return covariant_dalembertian(w, metric) + ricci_part - sq
    gap_split = float(np.max(np.abs(batched(split_gap, scale, grades={1})(P1, pts))))

    C = rng.normal(size=(200, 16))
    hodge_gap = 0.0
    for c, p in zip(C, pts[:200]):
        g = metric(p).g
        hodge_gap = max(hodge_gap, float(np.max(np.abs(np.asarray(hodge(hodge(c, g), g, inverse=True)) - c))))

    record_property("detail", f"D^2 routes {gap_square:.1e}, split {gap_split:.1e}, hodge {hodge_gap:.1e}")
    assert gap_square < 1e-8 and gap_split < 1e-8 and hodge_gap < 1e-12
    if scenario == "minkowski":
        assert np.array_equal(np.asarray(product_tensor(MetricAtPoint.from_components(MINKOWSKI).ginv)),
                              cayley_table([1.0, -1.0, -1.0, -1.0]))


def test_criterion_6_fluid_suite(record_property, schwarzschild_sc):
    claim(record_property, 6, "rotation in the flat Cartesian pairing: v, E = 0, Helmholtz, NS, chi, product rule")
    sample = schwarzschild_sc.sample("cartesian", count=COUNT, seed=SEED)
    pts = sample.points
    K = killing_field(schwarzschild_sc, "d_phi", "cartesian")
    base = decompose_potential(K)
    v = np.array([np.asarray(base.v(p)) for p in pts])
    assert np.max(np.abs(v - np.stack([pts[:, 2], -pts[:, 1], 0 * pts[:, 0]], 1))) < 1e-12
    state = fluid_fields(K, sample)
    F = flat_field_strength(state.potential)
    E = max(float(np.max(np.abs(np.asarray(F(p))[0, 1:]))) for p in pts)
    helm = helmholtz_residual(state, pts)
    ns = navier_stokes_residual(state, pts)
    paths = chi_path_gap(state, pts)
    imp = by_id(f_ring_relation(K, sample))["f-relation.product"]
    record_property("detail", f"E {E:.1e}, helmholtz {max(r.max_residual for r in helm):.1e}, "
                              f"NS {ns.max_residual:.1e}, chi {paths.max_residual:.1e}, "
                              f"product {imp.max_residual:.1e}")
    assert E == 0.0
    assert all(r.max_residual < 1e-10 for r in helm)
    assert ns.max_residual < 1e-10
    assert paths.max_residual < 1e-7
    assert imp.max_residual < 1e-8


def test_criterion_7_komar_current(record_property, schwarzschild_sc):
    claim(record_property, 7, "Komar current routes and conservation < 1e-6 for d_t, d_phi, r d_r")
    worst = [0.0, 0.0]
    sample = schwarzschild_sc.sample(count=COUNT, seed=SEED)
    for name in ("d_t", "d_phi", "r_dr"):
        rep = by_id(komar_current(schwarzschild_sc, name, sample))
        worst[0] = max(worst[0], rep["komar-current.routes"].max_residual)
        worst[1] = max(worst[1], rep["komar-current.conservation"].max_residual)
    record_property("detail", f"routes {worst[0]:.1e}, conservation {worst[1]:.1e}")
    assert worst[0] < 1e-6 and worst[1] < 1e-6


def test_criterion_8_bimetric_suite(record_property, schwarzschild_sc, de_sitter_sc):
    claim(record_property, 8, "Ric = J_sym < 1e-7, S = 2 Gamma, algebraic constraint lines reported")
    sample = schwarzschild_sc.sample("cartesian", count=COUNT, seed=SEED)
    rep = by_id(bimetric_residuals(schwarzschild_sc, sample))
    last_s = constraint_last_residual(schwarzschild_sc, "d_t", sample)
    last_d = constraint_last_residual(de_sitter_sc, "d_t", de_sitter_sc.sample("cartesian", count=COUNT, seed=SEED))
    record_property("detail", f"ricci-J {rep['bimetric.ricci_j'].max_residual:.1e}, "
                              f"strain {rep['bimetric.strain'].max_residual:.1e}, "
                              f"constraint schwarzschild {last_s[0].status}, de_sitter {last_d[0].status} "
                              f"({last_d[0].max_residual:.3g})")
    assert rep["bimetric.ricci_j"].max_residual < 1e-7
    assert rep["bimetric.strain"].max_residual < 1e-10
    assert all(r.status == PASS for r in last_s)
    for r in last_d:
        assert r.status in (PASS, IDENTITY_GAP) and np.isfinite(r.max_residual)


def test_criterion_9_determinism(record_property, tmp_path):
    claim(record_property, 9, "identical config and seed give byte-identical JSON and CSV")
    outputs = []
    for run in ("a", "b"):
        d = tmp_path / run
        argv = ["verify", "--scenario", "schwarzschild", "--killing", "d_t",
                "--checks", "killing,maxwell,komar-energy", "--seed", "7", "--count", "20",
                "--out", str(d)]
        assert main(argv) == 0
        outputs.append(((d / "report.json").read_bytes(), (d / "report.csv").read_bytes()))
    record_property("detail", f"{len(outputs[0][0])} JSON bytes, {len(outputs[0][1])} CSV bytes")
    assert outputs[0] == outputs[1]
