import jax.numpy as jnp
import numpy as np
import pytest

from helpers import batched, random_coefficients
from killingchain.algebra import GRADE
from killingchain.calculus import (
    codifferential, covariant_dalembertian, dalembertian_and_ricci_split, dirac_apply,
    exterior_derivative, hodge_laplacian_minus, lie_derivative_metric, lower_index,
)
from killingchain.fields import FormField, VectorField, one_form_field, scalar_field
from killingchain.geometry import CARTESIAN, de_sitter, minkowski, schwarzschild

ETA = minkowski()
SCHW = schwarzschild(1.0)
SCHW_POINTS = np.array([[0.1, 4.0, 1.0, 0.3], [0.0, 7.5, 2.0, -1.0], [1.0, 15.0, 0.5, 2.5]])


def test_d_of_coordinate_function():
    x1 = scalar_field(lambda x: x[1])
    assert np.allclose(exterior_derivative(x1)([0.0, 2.0, 0.0, 0.0]).coeffs,
                       np.eye(16)[2], atol=0)


def test_d_of_one_form_example():
    A = one_form_field(lambda x: jnp.stack([0.0 * x[0], -x[2], x[1], 0.0 * x[0]]))
    dA = exterior_derivative(A)([0.0, 1.0, 2.0, 3.0])
    assert dA.coeffs[0b0110] == pytest.approx(2.0)
    assert np.count_nonzero(dA.coeffs) == 1


def test_codifferential_of_linear_one_form():
    # delta(x^mu dx_mu-like) on Minkowski: A = t dt - x dx - y dy - z dz has delta A = -4
    A = one_form_field(lambda x: jnp.stack([x[0], -x[1], -x[2], -x[3]]))
    assert codifferential(A, ETA)([0.3, 1.0, 2.0, 3.0]).coeffs[0] == pytest.approx(-4.0)


def test_dirac_examples_on_minkowski():
    t = scalar_field(lambda x: x[0])
    assert dirac_apply(t, ETA)([0.0, 1.0, 1.0, 1.0]) == exterior_derivative(t)([0.0, 1.0, 1.0, 1.0])
    A = one_form_field(lambda x: jnp.stack([x[0], 0.0 * x[0], 0.0 * x[0], 0.0 * x[0]]))
    D = dirac_apply(A, ETA)([0.0, 1.0, 1.0, 1.0])
    assert D == codifferential(A, ETA)([0.0, 1.0, 1.0, 1.0]) * -1.0
    assert D.coeffs[0] == pytest.approx(1.0)   # -delta(t dt) is the divergence


@pytest.mark.parametrize("metric,pts,scale", [
    (ETA, np.array([[0.1, 1.0, -2.0, 0.5], [0.4, -0.3, 0.8, 1.7], [2.0, 1.0, 1.0, 1.0]]), 1.0),
    (SCHW, SCHW_POINTS, 10.0),
], ids=["minkowski", "schwarzschild"])
def test_nilpotency(metric, pts, scale, rng):
    n = 30
    P = random_coefficients(rng, n)
    x = pts[rng.integers(0, len(pts), n)]
    dd = batched(lambda w: exterior_derivative(exterior_derivative(w)), scale)(P, x)
    cc = batched(lambda w: codifferential(codifferential(w, metric), metric), scale)(P, x)
    assert np.max(np.abs(dd)) < 1e-10
    assert np.max(np.abs(cc)) < 1e-9


def test_d_is_metric_independent(rng):
    P = random_coefficients(rng, 5)
    x = np.tile(SCHW_POINTS[0], (5, 1))
    a = batched(exterior_derivative, 10.0)(P, x)
    assert np.max(np.abs(a - batched(exterior_derivative, 10.0)(P, x))) == 0.0
    assert np.all(np.isin(GRADE[np.abs(np.asarray(a[0])) > 0], [1, 2, 3, 4]))


@pytest.mark.parametrize("metric", [SCHW, de_sitter(0.03)], ids=["schwarzschild", "de_sitter"])
def test_dirac_square_routes_and_covariant_box(metric, rng):
    n = 40
    pts = SCHW_POINTS if metric is SCHW else np.array([[0.0, 1.0, 1.0, 0.2], [0.5, 3.0, 2.0, 1.0]])
    x = pts[rng.integers(0, len(pts), n)]
    P = random_coefficients(rng, n)
    twice = batched(lambda w: dirac_apply(dirac_apply(w, metric), metric), 10.0)(P, x)
    square = batched(lambda w: hodge_laplacian_minus(w, metric), 10.0)(P, x)
    assert np.max(np.abs(twice - square)) < 1e-8

    P1 = random_coefficients(rng, n, grades={1})

    def split_gap(w):
        box, ric, sq = dalembertian_and_ricci_split(w, metric)
        return covariant_dalembertian(w, metric) + ric - sq
    assert np.max(np.abs(batched(split_gap, 10.0, grades={1})(P1, x))) < 1e-8


def test_codifferential_of_killing_one_form_vanishes():
    A = one_form_field(lambda x: jnp.stack([1.0 - 2.0 / x[1], 0.0 * x[0], 0.0 * x[0], 0.0 * x[0]]))
    assert np.max(np.abs(codifferential(A, SCHW).at(SCHW_POINTS))) < 1e-9
    assert np.max(np.abs(codifferential(scalar_field(lambda x: x[1] ** 2), SCHW).at(SCHW_POINTS))) == 0.0


def test_one_form_only_operators_reject_other_grades():
    with pytest.raises(ValueError):
        covariant_dalembertian(scalar_field(lambda x: x[0]), ETA)
    with pytest.raises(ValueError):
        dalembertian_and_ricci_split(FormField(lambda x: jnp.ones(16), {1, 2}), ETA)


def test_lie_derivative_examples():
    dt = VectorField(lambda x: jnp.asarray([1.0, 0.0, 0.0, 0.0]) + 0.0 * x)
    assert np.max(np.abs(lie_derivative_metric(dt, SCHW, SCHW_POINTS[0]))) == 0.0
    rdr = VectorField(lambda x: jnp.stack([0.0 * x[0], x[1], 0.0 * x[0], 0.0 * x[0]]))
    L = lie_derivative_metric(rdr, schwarzschild(1.0), SCHW_POINTS[0])
    assert np.max(np.abs(L)) > 1.0
    dil = VectorField(lambda x: x)
    assert np.allclose(lie_derivative_metric(dil, minkowski(CARTESIAN), [0.0, 1.0, 2.0, 3.0]),
                       2 * np.diag([1.0, -1.0, -1.0, -1.0]))


def test_lower_index():
    dt = VectorField(lambda x: jnp.asarray([1.0, 0.0, 0.0, 0.0]) + 0.0 * x)
    A = lower_index(dt, SCHW.fn)
    assert A(SCHW_POINTS[0]).coeffs[1] == pytest.approx(0.5)
