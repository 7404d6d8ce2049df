"""Exceptions and small input checks shared across the package."""

from __future__ import annotations

import numbers
from typing import Sequence

import numpy as np

MAX_DIM = 4
DEFAULT_MAX_NODES = 10**7


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(ValueError):
    """A node grid would exceed the configured size cap."""


class ShapeError(ValueError):
    """Array shapes or dimensions are inconsistent."""


class DegenerateInputError(ValueError):
    """A scan grid is too coarse to contain any admissible sample."""


class UnknownFunctionError(KeyError):
    """A corpus or registry id is not known."""


class ConvergenceError(RuntimeError):
    """An iterative solver did not converge.

    The best result found so far is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


def check_degree(l) -> int:
    if not isinstance(l, numbers.Integral) or isinstance(l, bool) or l < 1:
        raise DomainError(f"degree must be a positive integer, got {l!r}")
    return int(l)


def check_count(k, name="k", minimum=0) -> int:
    if not isinstance(k, numbers.Integral) or isinstance(k, bool) or k < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {k!r}")
    return int(k)


def check_degrees(degrees: Sequence[int]) -> tuple[int, ...]:
    degrees = tuple(np.atleast_1d(degrees).tolist())
    if not 1 <= len(degrees) <= MAX_DIM:
        raise ShapeError(f"need between 1 and {MAX_DIM} axes, got {len(degrees)}")
    return tuple(check_degree(l) for l in degrees)


def check_powers(powers: Sequence[int], d: int) -> tuple[int, ...]:
    powers = tuple(np.atleast_1d(powers).tolist())
    if len(powers) != d:
        raise ShapeError(f"expected {d} powers, got {len(powers)}")
    return tuple(check_count(n, "power", minimum=1) for n in powers)


def check_unit_interval(x, name="x") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return x


def check_points(X, d: int) -> np.ndarray:
    """Return ``X`` as a float array of shape (n_samples, d) inside the unit cube.

    A 1-d array is read as n samples when ``d == 1`` and as one point otherwise.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X.reshape(-1, 1) if d == 1 else X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != d:
        raise ShapeError(f"expected points of shape (n, {d}), got {X.shape}")
    return check_unit_interval(X, "points")


def check_grid_size(degrees: Sequence[int], max_nodes: int = DEFAULT_MAX_NODES) -> int:
    size = int(np.prod([l + 1 for l in degrees], dtype=object))
    if size > max_nodes:
        raise CapacityError(f"node grid of {size} entries exceeds cap {max_nodes}")
    return size
