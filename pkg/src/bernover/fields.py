"""Scalar fields on the unit cube and a portable seeded generator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._validation import MAX_DIM, ShapeError

_MASK64 = (1 << 64) - 1


def splitmix64(seed: int):
    """Yield an endless stream of 64-bit integers from the SplitMix64 generator.

    This is the generator of Steele, Lea and Flood (2014), the same one used to
    seed xoshiro; it is reimplemented here because the exact bit stream must be
    reproducible across languages, which numpy's generators do not promise.
    """
    state = seed & _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def uniform_stream(seed: int, low: float = -1.0, high: float = 1.0):
    """Doubles in [low, high) built from the top 53 bits of each SplitMix64 draw."""
    scale = (high - low) / float(1 << 53)
    for z in splitmix64(seed):
        yield low + (z >> 11) * scale


def seeded_uniform(seed: int, size: int, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    stream = uniform_stream(seed, low, high)
    return np.array([next(stream) for _ in range(size)], dtype=float)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """A real function on ``[0, 1]**dim``.

    ``func`` takes ``dim`` coordinate arrays and must broadcast like a numpy
    ufunc. ``kinks`` optionally lists, per axis, coordinates where the partial
    functions lose smoothness; quadrature routines split there.
    ``registry_id`` and ``params`` are set by the corpus and key the table of
    closed-form moduli.
    """

    dim: int
    func: Callable[..., np.ndarray]
    name: str = "anonymous"
    kinks: tuple = field(default=())
    registry_id: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise ShapeError(f"field dimension must be in 1..{MAX_DIM}, got {self.dim}")

    def __call__(self, *coords):
        if len(coords) != self.dim:
            raise ShapeError(f"{self.name} takes {self.dim} coordinates, got {len(coords)}")
        coords = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in coords])
        out = np.asarray(self.func(*coords), dtype=float)
        if out.shape != coords[0].shape:
            out = np.broadcast_to(out, coords[0].shape).copy()
        return out

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at an array of points of shape (n, dim)."""
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return self(*points.T)

    def axis_kinks(self, axis: int) -> tuple:
        if axis < len(self.kinks):
            return tuple(self.kinks[axis])
        return ()

    def scaled(self, c: float) -> "ScalarField":
        return ScalarField(self.dim, lambda *x: c * self.func(*x), f"{c}*{self.name}", self.kinks)


def as_field(f, dim: int | None = None) -> ScalarField:
    """Wrap a plain callable ``f(x1, ..., xd)`` as a :class:`ScalarField`."""
    if isinstance(f, ScalarField):
        if dim is not None and f.dim != dim:
            raise ShapeError(f"expected a {dim}-variate field, got dimension {f.dim}")
        return f
    if not callable(f):
        raise TypeError(f"expected a callable or ScalarField, got {type(f).__name__}")
    return ScalarField(1 if dim is None else dim, f, getattr(f, "__name__", "anonymous"))


def partial_field(f: ScalarField, axis: int, frozen: Sequence[float]) -> ScalarField:
    """The univariate function ``s -> f(..., s, ...)`` with the other axes frozen.

    ``frozen`` lists the coordinates of the remaining ``dim - 1`` axes in order.
    """
    frozen = [float(v) for v in frozen]
    if len(frozen) != f.dim - 1:
        raise ShapeError(f"need {f.dim - 1} frozen coordinates, got {len(frozen)}")
    if not 0 <= axis < f.dim:
        raise ShapeError(f"axis {axis} out of range for dimension {f.dim}")

    def func(s):
        s = np.asarray(s, dtype=float)
        coords = [np.full_like(s, v) for v in frozen]
        coords.insert(axis, s)
        return f.func(*coords)

    return ScalarField(1, func, f"{f.name}[axis={axis}]", (f.axis_kinks(axis),))
