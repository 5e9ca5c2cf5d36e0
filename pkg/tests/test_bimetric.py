import jax.numpy as jnp
import numpy as np
import pytest

from killingchain.bimetric import (
    CONTORTION_SIGN, ChartMismatchError, bimetric_residuals, constraint_last_residual, j_tensor,
    nonmetricity, nonmetricity_and_strain, ricci_j_gap, strain,
)
from killingchain.curvature import christoffel_fn
from killingchain.report import IDENTITY_GAP
from killingchain.scenarios import scenario_from_dict

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
CART = [np.array([0.0, 3.0, 2.0, 2.5]), np.array([0.5, -4.0, 1.0, 6.0])]


def fd_christoffel(gfn, x, h=1e-5):
    dg = np.stack([(np.asarray(gfn(jnp.asarray(x + h * e))) - np.asarray(gfn(jnp.asarray(x - h * e)))) / (2 * h)
                   for e in np.eye(4)], axis=-1)
    gi = np.linalg.inv(np.asarray(gfn(jnp.asarray(x))))
    return 0.5 * np.einsum("rs,smn->rmn", gi, dg + np.einsum("snm->smn", dg) - np.einsum("mns->smn", dg))


def test_nonmetricity_against_direct_covariant_derivative(schwarzschild_sc):
    p = CART[0]
    b = nonmetricity_and_strain(schwarzschild_sc, p)
    G = fd_christoffel(schwarzschild_sc.model("cartesian").metric.fn, p)
    # (D_a eta)_{bs} = d_a eta_bs - G^l_ab eta_ls - G^l_as eta_bl, with d eta = 0
    D_eta = -np.einsum("lab,ls->abs", G, ETA) - np.einsum("las,bl->abs", G, ETA)
    assert np.max(np.abs(b.Q + D_eta)) < 1e-8
    assert np.max(np.abs(b.S - 2 * b.christoffel)) < 1e-12
    assert np.max(np.abs(b.K - CONTORTION_SIGN * b.christoffel)) < 1e-12


def test_constant_multiple_of_flat_metric_has_no_nonmetricity():
    G = christoffel_fn(lambda x: 4.0 * jnp.asarray(ETA) + 0.0 * x[0])(jnp.asarray(CART[1]))
    assert np.max(np.abs(np.asarray(strain(nonmetricity(G))))) == 0.0


@pytest.mark.parametrize("sc", ["schwarzschild_sc", "de_sitter_sc"])
def test_symmetric_j_reproduces_ricci(sc, request):
    sc = request.getfixturevalue(sc)
    p = CART[0] if sc.name == "schwarzschild" else np.array([0.0, 1.0, 2.0, 0.5])
    assert ricci_j_gap(sc, p) < 1e-7
    assert ricci_j_gap(sc, p, sign=-1.0) > 1e-2
    b = j_tensor(sc, p)
    assert b.J.shape == (4, 4) and np.allclose(b.J_symmetric, b.J_symmetric.T)


def test_bimetric_residual_lines(schwarzschild_sc):
    rep = bimetric_residuals(schwarzschild_sc, schwarzschild_sc.sample("cartesian", count=8))
    assert [r.check_id for r in rep] == ["bimetric.ricci_j", "bimetric.strain"]
    assert all(r.passed for r in rep)


def test_constraint_last_is_trivial_in_vacuum(schwarzschild_sc):
    rep = constraint_last_residual(schwarzschild_sc, "d_t", schwarzschild_sc.sample("cartesian", count=8))
    assert all(r.passed for r in rep) and max(r.max_residual for r in rep) < 1e-8


def test_constraint_last_gap_in_de_sitter_is_a_finding(de_sitter_sc):
    rep = constraint_last_residual(de_sitter_sc, "d_t", de_sitter_sc.sample("cartesian", count=8))
    assert [r.check_id for r in rep] == ["constraint-last", "constraint-last.scalar",
                                         "constraint-last.operator"]
    for r in rep:
        assert r.status == IDENTITY_GAP and r.max_residual > 1e-3
    # scalar and operator readings coincide because J is symmetric here
    assert np.allclose(rep[1].residuals, rep[2].residuals, atol=1e-12)


def test_missing_shared_chart_is_an_error():
    sc = scenario_from_dict({"name": "schwarzschild", "params": {"m": 1.0}, "chart": "spherical"})
    with pytest.raises(ChartMismatchError):
        nonmetricity_and_strain(sc, [0.0, 4.0, 1.0, 0.0])
