"""Pointwise-lazy fields: multivector-valued forms and vector fields.

A field wraps a pure ``jax.numpy`` function of the chart coordinates, so any
number of derivatives can be taken exactly by nesting forward-mode jets.
"""
from __future__ import annotations

from typing import Callable

import jax
import jax.numpy as jnp
import numpy as np

from .algebra import GRADE, NBLADES, Multivector

Array = jnp.ndarray


def jet(fn: Callable, x, order: int = 2):
    """Value and coordinate derivatives of ``fn`` at ``x`` up to ``order``.

    Derivative axes are appended last: ``d1[..., mu] = d_mu fn``,
    ``d2[..., mu, nu] = d_mu d_nu fn``.
    """
    x = jnp.asarray(x, dtype=float)
    out = [fn(x)]
    f = fn
    for _ in range(order):
        f = jax.jacfwd(f)
        out.append(f(x))
    return tuple(np.asarray(o) for o in out)


class _Batched:
    """Caches a jit-compiled, vmapped evaluator for a pointwise function."""

    def __init__(self, fn: Callable):
        self.fn = fn
        self._batched = None

    def at(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self._batched is None:
            self._batched = jax.jit(jax.vmap(self.fn))
        return np.asarray(self._batched(pts))


class FormField(_Batched):
    """A map point -> 16 blade coefficients, with a declared grade set."""

    def __init__(self, fn: Callable, grades=None, name: str = ""):
        super().__init__(fn)
        self.grades = None if grades is None else frozenset(grades)
        self.name = name

    def __call__(self, x) -> Multivector:
        return Multivector(np.asarray(self.fn(jnp.asarray(x, dtype=float))))

    def jet(self, x, order: int = 2):
        return jet(self.fn, x, order)

    def grade(self, k: int) -> "FormField":
        mask = jnp.asarray(GRADE == k)
        fn = self.fn
        return FormField(lambda x: jnp.where(mask, fn(x), 0.0), {k}, f"<{self.name}>_{k}")

    def _combine(self, other: "FormField", op, sym: str) -> "FormField":
        f, g = self.fn, other.fn
        grades = None if self.grades is None or other.grades is None else self.grades | other.grades
        return FormField(lambda x: op(f(x), g(x)), grades, f"({self.name}{sym}{other.name})")

    def __add__(self, other: "FormField") -> "FormField":
        return self._combine(other, jnp.add, "+")

    def __sub__(self, other: "FormField") -> "FormField":
        return self._combine(other, jnp.subtract, "-")

    def __neg__(self) -> "FormField":
        f = self.fn
        return FormField(lambda x: -f(x), self.grades, f"-{self.name}")

    def scale(self, s) -> "FormField":
        """Multiply by a constant or by a scalar function of the point."""
        f = self.fn
        if callable(s):
            return FormField(lambda x: s(x) * f(x), self.grades, f"s*{self.name}")
        return FormField(lambda x: s * f(x), self.grades, f"{s}*{self.name}")

    def __mul__(self, s) -> "FormField":
        return self.scale(s)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"FormField({self.name or '?'}, grades={sorted(self.grades) if self.grades else '?'})"


def one_form_field(components: Callable, name: str = "") -> FormField:
    """1-form field from a function returning its four covariant components."""
    idx = jnp.asarray([1, 2, 4, 8])

    def fn(x):
        return jnp.zeros(NBLADES).at[idx].set(components(x))

    return FormField(fn, {1}, name)


def scalar_field(f: Callable, name: str = "") -> FormField:
    return FormField(lambda x: jnp.zeros(NBLADES).at[0].set(f(x)), {0}, name)


def one_form_components(c):
    """Covariant components of the grade-1 part of coefficient array(s)."""
    return c[..., jnp.asarray([1, 2, 4, 8])]


class VectorField(_Batched):
    """Contravariant components ``X^mu`` as a function of the point."""

    def __init__(self, fn: Callable, name: str = ""):
        super().__init__(fn)
        self.name = name

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(jnp.asarray(x, dtype=float)))

    def jet(self, x, order: int = 1):
        return jet(self.fn, x, order)

    def __repr__(self) -> str:
        return f"VectorField({self.name or '?'})"
