"""Clifford algebra of differential forms at a point.

Blades are indexed by a 4-bit mask ``b``: bit ``i`` set means ``dx^i`` is a
factor, factors in ascending order.  Products contract with the cotangent
metric ``g^{mu nu}``, so the basis is the coordinate coframe, not an
orthonormal one.  Signature is (+,-,-,-), orientation +dx0^dx1^dx2^dx3.

Everything below ``MetricAtPoint`` works on raw coefficient arrays and is
written with ``jax.numpy`` so that the same code can be differentiated when
the metric depends on the point.
"""
from __future__ import annotations

from dataclasses import dataclass

import jax
import jax.numpy as jnp
import numpy as np

jax.config.update("jax_enable_x64", True)

NBLADES = 16
DET_THRESHOLD = 1e-14

SIGNATURE = "(+,-,-,-)"
ORIENTATION = "+dx0^dx1^dx2^dx3"

GRADE = np.array([bin(b).count("1") for b in range(NBLADES)])
PSEUDOSCALAR = 0b1111


class SingularMetricError(ValueError):
    pass


def blade_name(b: int) -> str:
    if b == 0:
        return "1"
    return "^".join(f"dx{i}" for i in range(4) if b >> i & 1)


def _sign_before(b: int, i: int) -> int:
    """(-1)^(number of factors of blade b with index below i)."""
    return -1 if bin(b & ((1 << i) - 1)).count("1") % 2 else 1


def _wedge_matrices() -> np.ndarray:
    # W[mu] @ c  ==  dx^mu ^ c
    W = np.zeros((4, NBLADES, NBLADES))
    for mu in range(4):
        for b in range(NBLADES):
            if not b >> mu & 1:
                W[mu, b | 1 << mu, b] = _sign_before(b, mu)
    return W


def _removal_matrices() -> np.ndarray:
    # P[nu] @ c  removes dx^nu from each blade with the alternating sign;
    # dx^mu _| c  ==  sum_nu g^{mu nu} P[nu] @ c
    P = np.zeros((4, NBLADES, NBLADES))
    for nu in range(4):
        for b in range(NBLADES):
            if b >> nu & 1:
                P[nu, b ^ 1 << nu, b] = _sign_before(b, nu)
    return P


_W = _wedge_matrices()
_P = _removal_matrices()
_BY_GRADE = sorted(range(NBLADES), key=lambda b: (GRADE[b], b))
_REVERSE_SIGN = np.array([(-1) ** (k * (k - 1) // 2) for k in GRADE], dtype=float)


def product_tensor(ginv):
    """Structure constants ``T[k, a, b]`` of the Clifford product.

    ``(x y)_k = sum_ab T[k, a, b] x_a y_b`` for the cotangent metric ``ginv``.
    Built from left multiplication by a single covector,
    ``dx^mu C = dx^mu _| C + dx^mu ^ C``, and the recursion
    ``dx^i ^ X = dx^i X - dx^i _| X`` over blades of increasing grade.
    """
    ginv = jnp.asarray(ginv)
    K = jnp.einsum("mn,nij->mij", ginv, _P)
    L = _W + K
    M = [None] * NBLADES
    M[0] = jnp.eye(NBLADES)
    for b in _BY_GRADE[1:]:
        i = (b & -b).bit_length() - 1
        rest = b ^ 1 << i
        # i is the lowest index of b so dx^i ^ e_rest == e_b with sign +1
        acc = L[i] @ M[rest]
        for c in range(NBLADES):
            if _P[0:4, c, rest].any():
                acc = acc - K[i, c, rest] * M[c]
        M[b] = acc
    # T[k, a, b] = M[a][k, b]
    return jnp.stack(M, axis=0).transpose(1, 0, 2)


def gp(x, y, ginv):
    return jnp.einsum("kab,a,b->k", product_tensor(ginv), x, y)


def grade_project(x, k: int):
    return jnp.where(GRADE == k, x, 0.0)


def reverse(x):
    return x * _REVERSE_SIGN


def _wedge_tensor() -> np.ndarray:
    T = np.zeros((NBLADES, NBLADES, NBLADES))
    for a in range(NBLADES):
        for b in range(NBLADES):
            if a & b:
                continue
            # move factors of b past the factors of a that sit above them
            sign = 1
            for j in range(4):
                if b >> j & 1:
                    above = bin(a >> (j + 1)).count("1")
                    sign *= -1 if above % 2 else 1
            T[a | b, a, b] = sign
    return T


_WT = _wedge_tensor()


def wedge(x, y):
    """Exterior product; metric independent."""
    return jnp.einsum("kab,a,b->k", _WT, x, y)




def left_contraction(x, y, ginv):
    """``x _| y``: grade (s - r) part of the product of grade r and s parts."""
    T = product_tensor(ginv)
    out = jnp.zeros(NBLADES)
    for r in range(5):
        xr = grade_project(x, r)
        for s in range(r, 5):
            ys = grade_project(y, s)
            out = out + grade_project(jnp.einsum("kab,a,b->k", T, xr, ys), s - r)
    return out


def volume_element(g):
    out = jnp.zeros(NBLADES)
    return out.at[PSEUDOSCALAR].set(jnp.sqrt(jnp.abs(jnp.linalg.det(g))))


def pseudoscalar_contraction_matrix(g, ginv):
    """``H[:, A] = e_A _| tau_g``, which equals the product ``e_A tau_g``.

    Uses ``(dx^i ^ X) _| tau = dx^i _| (X _| tau)`` so only single-covector
    contractions are needed.
    """
    K = jnp.einsum("mn,nij->mij", ginv, _P)
    tau = volume_element(g)
    cols = [None] * NBLADES
    cols[0] = tau
    for b in _BY_GRADE[1:]:
        i = (b & -b).bit_length() - 1
        cols[b] = K[i] @ cols[b ^ 1 << i]
    return jnp.stack(cols, axis=1)


def hodge(x, g, ginv=None, inverse: bool = False):
    """``*C = reverse(C) tau_g``; with ``inverse`` apply ``*^-1`` grade by grade."""
    if ginv is None:
        ginv = jnp.linalg.inv(g)
    if inverse:
        s = GRADE
        sign = (-1.0) ** (s * (4 - s)) * jnp.sign(jnp.linalg.det(g))
        x = x * sign
    return pseudoscalar_contraction_matrix(g, ginv) @ reverse(x)


@dataclass(frozen=True)
class MetricAtPoint:
    """Metric components ``g_{mu nu}`` in the coordinate coframe at one point."""

    g: np.ndarray
    ginv: np.ndarray
    detg: float

    @classmethod
    def from_components(cls, g) -> "MetricAtPoint":
        g = np.asarray(g, dtype=float)
        if g.shape != (4, 4):
            raise ValueError(f"metric must be 4x4, got {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("metric has non-finite components")
        if np.max(np.abs(g - g.T)) > 1e-12 * max(1.0, np.max(np.abs(g))):
            raise ValueError("metric is not symmetric")
        detg = float(np.linalg.det(g))
        if abs(detg) <= DET_THRESHOLD:
            raise SingularMetricError(f"|det g| = {abs(detg):.3e} <= {DET_THRESHOLD}")
        ginv = np.linalg.inv(g)
        ginv = 0.5 * (ginv + ginv.T)
        return cls(g=g, ginv=ginv, detg=detg)

    def is_lorentzian(self) -> bool:
        ev = np.linalg.eigvalsh(self.g)
        return int(np.sum(ev > 0)) == 1 and int(np.sum(ev < 0)) == 3


MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])


class Multivector:
    """Sixteen blade coefficients over the coordinate coframe at a point."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        c = np.zeros(NBLADES) if coeffs is None else np.asarray(coeffs, dtype=float)
        if c.shape != (NBLADES,):
            raise ValueError(f"expected {NBLADES} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("multivector has non-finite coefficients")
        self.coeffs = c

    @classmethod
    def scalar(cls, s: float) -> "Multivector":
        c = np.zeros(NBLADES)
        c[0] = s
        return cls(c)

    @classmethod
    def blade(cls, *indices: int, coeff: float = 1.0) -> "Multivector":
        """``coeff * dx^i ^ dx^j ^ ...`` for the given (any order) indices."""
        out = np.zeros(NBLADES)
        out[0] = 1.0
        for i in indices:
            e = np.zeros(NBLADES)
            e[1 << i] = 1.0
            out = np.asarray(wedge(out, e))
        return cls(coeff * out)

    @classmethod
    def one_form(cls, components) -> "Multivector":
        c = np.zeros(NBLADES)
        for mu in range(4):
            c[1 << mu] = components[mu]
        return cls(c)

    def one_form_components(self) -> np.ndarray:
        return self.coeffs[[1, 2, 4, 8]].copy()

    def grade(self, k: int) -> "Multivector":
        return Multivector(np.where(GRADE == k, self.coeffs, 0.0))

    def grades(self, tol: float = 0.0) -> set[int]:
        return {int(k) for k in range(5) if np.any(np.abs(self.coeffs[GRADE == k]) > tol)}

    def reverse(self) -> "Multivector":
        return Multivector(self.coeffs * _REVERSE_SIGN)

    def norm_max(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __getitem__(self, b: int) -> float:
        return float(self.coeffs[b])

    def __add__(self, other: "Multivector") -> "Multivector":
        return Multivector(self.coeffs + other.coeffs)

    def __sub__(self, other: "Multivector") -> "Multivector":
        return Multivector(self.coeffs - other.coeffs)

    def __neg__(self) -> "Multivector":
        return Multivector(-self.coeffs)

    def __mul__(self, s: float) -> "Multivector":
        return Multivector(self.coeffs * float(s))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Multivector) and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self) -> str:
        terms = [f"{c:+.6g}*{blade_name(b)}" for b, c in enumerate(self.coeffs) if c != 0]
        return "Multivector(" + (" ".join(terms) if terms else "0") + ")"


def _check(m: MetricAtPoint) -> None:
    if abs(m.detg) <= DET_THRESHOLD:
        raise SingularMetricError(f"|det g| = {abs(m.detg):.3e} <= {DET_THRESHOLD}")


def geometric_product(a: Multivector, b: Multivector, m: MetricAtPoint) -> Multivector:
    _check(m)
    return Multivector(np.asarray(gp(a.coeffs, b.coeffs, m.ginv)))


def wedge_contract(a: Multivector, b: Multivector, m: MetricAtPoint):
    """Return ``(a ^ b, a _| b)``."""
    _check(m)
    return (
        Multivector(np.asarray(wedge(a.coeffs, b.coeffs))),
        Multivector(np.asarray(left_contraction(a.coeffs, b.coeffs, m.ginv))),
    )


def hodge_star(c: Multivector, m: MetricAtPoint, inverse: bool = False) -> Multivector:
    _check(m)
    return Multivector(np.asarray(hodge(c.coeffs, m.g, m.ginv, inverse=inverse)))
