"""Second-order moduli of smoothness, measured on lattices or taken from closed forms.

Lattice estimates take the sup of ``|f(x - s) - 2 f(x) + f(x + s)|`` over
lattice base points ``x`` and steps ``s`` that are lattice multiples not
exceeding ``h``, plus the step ``s = h`` itself. Every sample is admissible,
so the estimate never exceeds the true modulus: it is a lower bound, and
bound checks that rely on it are advisory only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._validation import DegenerateInputError, DomainError, ShapeError, UnknownFunctionError
from .fields import ScalarField, as_field

GRID_LOWER_BOUND = "grid_lower_bound"
ANALYTIC = "analytic"


def default_resolution(d: int) -> int:
    """Default lattice points per axis: 1000 for d = 1, 200 for d = 2, 40 beyond."""
    return {1: 1000, 2: 200}.get(d, 40)


@dataclass(frozen=True)
class ModulusEstimate:
    h: float
    axis: int
    value: float
    resolution: int | None
    kind: str


class ModulusProfile:
    """Lattice second differences of ``f`` along one axis, reusable across steps.

    The lattice has ``N + 1`` points per axis. Maxima for lattice steps are
    computed lazily and kept as a running maximum, so querying many step sizes
    costs one pass over the lattice per new step.
    """

    def __init__(self, f: ScalarField, axis: int, N: int):
        if not 0 <= axis < f.dim:
            raise ShapeError(f"axis {axis} out of range for dimension {f.dim}")
        if N < 2:
            raise DegenerateInputError(f"resolution N={N} admits no second difference")
        self.f = f
        self.axis = axis
        self.N = int(N)
        self._coords = np.arange(self.N + 1) / self.N
        lattice = np.meshgrid(*([self._coords] * f.dim), indexing="ij")
        self._values = np.moveaxis(f(*lattice), axis, 0)
        self._running = [0.0]
        self._exact = {}

    def _lattice_step_max(self, j: int) -> float:
        while len(self._running) <= j:
            s = len(self._running)
            F = self._values
            diff = np.abs(F[: -2 * s] - 2.0 * F[s:-s] + F[2 * s :])
            self._running.append(max(self._running[-1], float(diff.max())))
        return self._running[j]

    def _exact_step_max(self, h: float) -> float:
        if h in self._exact:
            return self._exact[h]
        base = self._coords[(self._coords - h >= 0.0) & (self._coords + h <= 1.0)]
        value = 0.0
        if base.size:
            grids = [self._coords] * self.f.dim
            grids[self.axis] = base
            coords = list(np.meshgrid(*grids, indexing="ij"))
            centre = self.f(*coords)
            coords[self.axis] = coords[self.axis] - h
            lower = self.f(*coords)
            coords[self.axis] = coords[self.axis] + 2.0 * h
            upper = self.f(*coords)
            value = float(np.max(np.abs(lower - 2.0 * centre + upper)))
        self._exact[h] = value
        return value

    def admits(self, h: float) -> bool:
        """Whether the lattice holds at least one admissible sample for step ``h``."""
        if min(math.floor(h * self.N + 1e-9), self.N // 2) >= 1:
            return True
        return bool(np.any((self._coords - h >= 0.0) & (self._coords + h <= 1.0)))

    def value(self, h: float) -> float:
        """Lower bound of the partial modulus at step ``h``; 0 for ``h == 0``."""
        if h < 0:
            raise DomainError(f"step must be nonnegative, got {h}")
        if h == 0:
            return 0.0
        j = min(math.floor(h * self.N + 1e-9), self.N // 2)
        value = self._lattice_step_max(j) if j >= 1 else 0.0
        if h <= 0.5:
            value = max(value, self._exact_step_max(float(h)))
        return value


@lru_cache(maxsize=64)
def modulus_profile(f: ScalarField, axis: int, N: int) -> ModulusProfile:
    """Cached :class:`ModulusProfile`; fields hash by identity."""
    return ModulusProfile(f, axis, N)


def partial_omega2(f, axis: int, h: float, N: int | None = None) -> ModulusEstimate:
    """Lattice lower bound of the partial modulus ``omega_2(f; 0, ..., h, ..., 0)``.

    All coordinates other than ``axis`` range over the same lattice as the
    base points.

    Raises
    ------
    DegenerateInputError
        If the lattice admits no sample for this ``h``.
    """
    f = as_field(f)
    if not 0.0 < h <= 1.0:
        raise DomainError(f"h must lie in (0, 1], got {h}")
    N = default_resolution(f.dim) if N is None else int(N)
    profile = modulus_profile(f, axis, N)
    if not profile.admits(h):
        raise DegenerateInputError(f"resolution N={N} admits no step <= {h}")
    return ModulusEstimate(float(h), axis, profile.value(h), N, GRID_LOWER_BOUND)


def omega2(f, h: float, N: int = 1000) -> ModulusEstimate:
    """Lattice lower bound of the univariate second-order modulus ``omega_2(f; h)``."""
    return partial_omega2(as_field(f, 1), 0, h, N)


def _clamped(h):
    return min(h, 0.5)


def _zero(h, axis, d, **params):
    return 0.0


def _e2(h, axis, d, **params):
    return 2.0 * _clamped(h) ** 2


def _e2x(h, axis, d, **params):
    return 2.0 * _clamped(h) ** 2 if axis == 0 else 0.0


def _e3(h, axis, d, **params):
    # (x+s)^3 - 2x^3 + (x-s)^3 = 6 x s^2, largest at x = 1 - s
    m = _clamped(h)
    return 6.0 * (1.0 - m) * m**2


def _abs(h, axis, d, c=0.5, **params):
    return 2.0 * min(h, c, 1.0 - c) if axis == 0 else 0.0


ANALYTIC_MODULI = {
    "const": _zero,
    "e1": _zero,
    "affine": _zero,
    "multilinear": _zero,
    "e2": _e2,
    "e2x": _e2x,
    "x2y": _e2x,
    "e3": _e3,
    "abs": _abs,
}


def has_analytic(function_id: str) -> bool:
    return function_id in ANALYTIC_MODULI


def analytic_omega2(function_id: str, h: float, axis: int = 0, d: int = 1, **params) -> ModulusEstimate:
    """Exact partial modulus of a corpus function with a known closed form.

    Raises
    ------
    UnknownFunctionError
        If ``function_id`` has no registered closed form.
    """
    try:
        formula = ANALYTIC_MODULI[function_id]
    except KeyError:
        raise UnknownFunctionError(f"no analytic modulus registered for {function_id!r}") from None
    if not 0 <= axis < d:
        raise ShapeError(f"axis {axis} out of range for dimension {d}")
    if h < 0:
        raise DomainError(f"h must be nonnegative, got {h}")
    value = 0.0 if h == 0 else float(formula(h, axis, d, **params))
    return ModulusEstimate(float(h), axis, value, None, ANALYTIC)


def analytic_for(f: ScalarField, h: float, axis: int = 0) -> ModulusEstimate | None:
    """Closed-form partial modulus of a corpus-built field, or ``None`` if unregistered."""
    if f.registry_id is None or not has_analytic(f.registry_id):
        return None
    return analytic_omega2(f.registry_id, h, axis, f.dim, **f.params)
