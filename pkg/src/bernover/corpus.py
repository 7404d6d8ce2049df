"""Named test functions on the unit cube.

Seeded members draw their parameters from :func:`~bernover.fields.seeded_uniform`
(SplitMix64), so a given ``(function_id, d, seed)`` always yields the same field.
"""

from __future__ import annotations

import itertools
from dataclasses import replace

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ._validation import ShapeError, UnknownFunctionError
from .fields import ScalarField, seeded_uniform


def _sum_powers(p):
    return lambda *x: sum(xi**p for xi in x)


def multilinear_field(corners, name="multilinear") -> ScalarField:
    """Multilinear interpolant of a ``(2,) * d`` table of vertex values."""
    corners = np.asarray(corners, dtype=float)
    d = corners.ndim

    def func(*x):
        out = 0.0
        for vertex in itertools.product((0, 1), repeat=d):
            weight = 1.0
            for xi, e in zip(x, vertex):
                weight = weight * (xi if e else 1.0 - xi)
            out = out + corners[vertex] * weight
        return out

    return ScalarField(d, func, name)


def grid_field(values, name="random_grid") -> ScalarField:
    """Piecewise multilinear interpolant of values on a uniform grid over the cube."""
    values = np.asarray(values, dtype=float)
    axes = [np.linspace(0.0, 1.0, n) for n in values.shape]
    interp = RegularGridInterpolator(axes, values, method="linear")

    def func(*x):
        x = np.broadcast_arrays(*x)
        pts = np.clip(np.stack([xi.ravel() for xi in x], axis=-1), 0.0, 1.0)
        return interp(pts).reshape(x[0].shape)

    return ScalarField(values.ndim, func, name, tuple(tuple(a[1:-1]) for a in axes))


def _affine(d, seed, **params):
    coef = seeded_uniform(seed, d + 1)
    return ScalarField(d, lambda *x: coef[0] + sum(c * xi for c, xi in zip(coef[1:], x)), "affine")


def _multilinear(d, seed, **params):
    return multilinear_field(seeded_uniform(seed, 2**d).reshape((2,) * d))


def _random_grid(d, seed, cells=4, **params):
    return grid_field(seeded_uniform(seed, (cells + 1) ** d).reshape((cells + 1,) * d))


def _abs(d, seed, c=0.5, **params):
    return ScalarField(d, lambda *x: np.abs(x[0] - c), "abs", ((c,),))


def _x2y(d, seed, **params):
    if d < 2:
        raise ShapeError("x2y needs d >= 2")
    return ScalarField(d, lambda *x: x[0] ** 2 * x[1], "x2y")


def _runge(d, seed, **params):
    return ScalarField(d, lambda *x: 1.0 / (1.0 + 25.0 * sum((xi - 0.5) ** 2 for xi in x)), "runge")


def _cosprod(d, seed, **params):
    return ScalarField(d, lambda *x: np.prod([np.cos(2.0 * xi) for xi in x], axis=0), "cosprod")


_BUILDERS = {
    "const": (lambda d, seed, value=1.0, **p: ScalarField(d, lambda *x: value + 0.0 * x[0], "const"),
              "constant function"),
    "e1": (lambda d, seed, **p: ScalarField(d, _sum_powers(1), "e1"), "sum of coordinates"),
    "affine": (_affine, "seeded affine function"),
    "e2": (lambda d, seed, **p: ScalarField(d, _sum_powers(2), "e2"), "sum of squared coordinates"),
    "e2x": (lambda d, seed, **p: ScalarField(d, lambda *x: x[0] ** 2, "e2x"), "x1^2"),
    "e3": (lambda d, seed, **p: ScalarField(d, _sum_powers(3), "e3"), "sum of cubed coordinates"),
    "x2y": (_x2y, "x1^2 * x2"),
    "abs": (_abs, "|x1 - c|, c = 0.5 by default"),
    "multilinear": (_multilinear, "multilinear interpolant of seeded vertex values"),
    "cosprod": (_cosprod, "product of cos(2 x_a)"),
    "runge": (_runge, "1 / (1 + 25 |x - 1/2|^2)"),
    "random_grid": (_random_grid, "piecewise multilinear interpolant of seeded values on a 4-cell grid"),
}

CORPUS_IDS = tuple(_BUILDERS)


def describe() -> dict:
    return {key: text for key, (_, text) in _BUILDERS.items()}


def corpus(function_id: str, d: int = 1, seed: int = 0, **params) -> ScalarField:
    """Build corpus member ``function_id`` in dimension ``d``.

    Raises
    ------
    UnknownFunctionError
        If ``function_id`` is not in :data:`CORPUS_IDS`.
    """
    try:
        build, _ = _BUILDERS[function_id]
    except KeyError:
        raise UnknownFunctionError(f"unknown corpus function {function_id!r}") from None
    f = build(int(d), int(seed), **params)
    return replace(f, registry_id=function_id, params=dict(params))
