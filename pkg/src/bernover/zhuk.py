"""Zhuk's extension and smoothing operator in one variable.

``f`` on ``[a, b]`` is continued to ``[a - h, b + h]`` by its best uniform
linear approximations on the boundary strips ``[a, a + 2h]`` and
``[b - 2h, b]``. The smoothing ``S_h f`` convolves this extension with the
unit-mass triangular kernel ``(1 - |t|/h) / h`` on ``[-h, h]``. For
``d >= 2`` the construction runs on partial functions, one axis at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import ConvergenceError, DomainError, ShapeError
from .fields import ScalarField, as_field, partial_field
from .moduli import ModulusEstimate, analytic_for, omega2
from .report import BoundReport, point_record

FIT_GRID_POINTS = 2001
SIMPSON_PANELS = 2**10
LEMMA_MODULUS_RESOLUTION = 5000
WITNESS_TOL = 1e-8


@dataclass(frozen=True)
class LinearFit:
    """Best uniform approximation ``slope * x + intercept`` on ``interval``.

    ``witness`` holds three grid points where the residual alternates in sign
    with magnitude ``error`` (up to solver tolerance).
    """

    slope: float
    intercept: float
    error: float
    interval: tuple
    witness: tuple = ()
    witness_residuals: tuple = ()

    def __call__(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept

    def equioscillates(self, tol: float = WITNESS_TOL) -> bool:
        r = np.asarray(self.witness_residuals)
        if r.size < 3:
            return False
        alt = r * np.array([1.0, -1.0, 1.0])
        return bool(np.all(alt >= self.error - tol) or np.all(-alt >= self.error - tol))


def _solve_reference(x, y, ref):
    A = np.column_stack([np.ones(3), x[ref], [1.0, -1.0, 1.0]])
    intercept, slope, level = np.linalg.solve(A, y[ref])
    return slope, intercept, level


def discrete_minimax_line(x, y, tol: float = 1e-12, max_iter: int = 100) -> LinearFit:
    """Best uniform linear fit to samples ``(x, y)`` by single-point exchange.

    Each step solves for the line whose residual levels out with alternating
    sign on a three-point reference, then swaps in the sample of largest
    residual while keeping the signs alternating. Stops once the levelled
    deviation and the true maximum residual agree to ``tol``.

    Raises
    ------
    ConvergenceError
        After ``max_iter`` exchanges; the best fit so far is attached.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size < 3:
        raise ShapeError("need at least three samples as matching 1-d arrays")
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    n = x.size
    ref = [0, n // 2, n - 1]
    best = None
    for _ in range(max_iter):
        slope, intercept, level = _solve_reference(x, y, ref)
        r = y - (slope * x + intercept)
        k = int(np.argmax(np.abs(r)))
        error = float(abs(r[k]))
        fit = LinearFit(
            float(slope), float(intercept), error, (float(x[0]), float(x[-1])),
            tuple(float(v) for v in x[ref]), tuple(float(v) for v in r[ref]),
        )
        if best is None or fit.error < best.error:
            best = fit
        if k in ref or error - abs(level) <= tol:
            return fit
        ref = _exchange(ref, k, r)
    raise ConvergenceError(f"no convergence after {max_iter} exchanges", best)


def _exchange(ref, k, r):
    s = np.sign(r)
    i0, i1, i2 = ref
    if k < i0:
        return [k, i1, i2] if s[k] == s[i0] else [k, i0, i1]
    if k > i2:
        return [i0, i1, k] if s[k] == s[i2] else [i1, i2, k]
    if k < i1:
        return [k, i1, i2] if s[k] == s[i0] else [i0, k, i2]
    return [i0, k, i2] if s[k] == s[i1] else [i0, i1, k]


def best_linear_minimax(f, alpha: float, beta: float, tol: float = 1e-12) -> LinearFit:
    """Best uniform linear approximation of ``f`` on ``[alpha, beta]``.

    Solved on a uniform grid of 2001 points, so the reported error is the
    discrete deviation, which can sit below the continuous one by
    O(grid step squared) for smooth ``f``.
    """
    if not alpha < beta:
        raise DomainError(f"need alpha < beta, got [{alpha}, {beta}]")
    if tol <= 0:
        raise DomainError("tol must be positive")
    f = as_field(f, 1)
    x = np.linspace(alpha, beta, FIT_GRID_POINTS)
    return discrete_minimax_line(x, f(x), tol)


class MinimaxLinearFit(RegressorMixin, BaseEstimator):
    """Uniform-norm (Chebyshev) linear regression on one feature."""

    def __init__(self, tol=1e-12, max_iter=100):
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X = np.asarray(X, dtype=float).reshape(-1)
        fit = discrete_minimax_line(X, np.asarray(y, dtype=float).reshape(-1), self.tol, self.max_iter)
        self.coef_ = np.array([fit.slope])
        self.intercept_ = fit.intercept
        self.error_ = fit.error
        self.fit_ = fit
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        return self.fit_(np.asarray(X, dtype=float).reshape(-1))


@dataclass(frozen=True)
class ZhukExtension:
    """``f`` on ``[a, b]`` continued linearly by ``left`` and ``right`` to ``[a - h, b + h]``.

    No continuity is imposed at ``a`` or ``b``; jumps up to the strip
    deviation are expected.
    """

    f: ScalarField
    a: float
    b: float
    h: float
    left: LinearFit
    right: LinearFit

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        slack = 1e-12 * max(1.0, abs(self.a), abs(self.b))
        if np.any(x < self.a - self.h - slack) or np.any(x > self.b + self.h + slack):
            raise DomainError(f"extension is defined on [{self.a - self.h}, {self.b + self.h}]")
        inside = self.f(np.clip(x, self.a, self.b))
        return np.where(x < self.a, self.left(x), np.where(x > self.b, self.right(x), inside))


def extend(f, a: float = 0.0, b: float = 1.0, h: float = 0.25) -> ZhukExtension:
    """Build the Zhuk extension of ``f`` with step ``h``.

    Raises
    ------
    DomainError
        Unless ``0 < h <= (b - a) / 2``.
    """
    if not 0.0 < h <= (b - a) / 2.0:
        raise DomainError(f"h must lie in (0, {(b - a) / 2}], got {h}")
    f = as_field(f, 1)
    left = best_linear_minimax(f, a, a + 2.0 * h)
    right = best_linear_minimax(f, b - 2.0 * h, b)
    return ZhukExtension(f, float(a), float(b), float(h), left, right)


def _simpson_weights(panels: int) -> np.ndarray:
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * panels)


def smooth_eval(ext: ZhukExtension, x, chunk: int = 64):
    """``S_h(f; x) = (1/h) int_{-h}^{h} (1 - |t|/h) f_h(x + t) dt``.

    ``[-h, h]`` is cut at ``t = 0``, where ``x + t`` crosses ``a`` or ``b``,
    and at declared kinks of ``f``; each piece gets composite Simpson with
    1024 panels and is evaluated on one branch of the extension only, so jumps
    at ``a`` and ``b`` are integrated exactly.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < ext.a) or np.any(x > ext.b):
        raise DomainError(f"x must lie in [{ext.a}, {ext.b}]")
    flat = x.reshape(-1)
    h = ext.h
    u = np.linspace(0.0, 1.0, SIMPSON_PANELS + 1)
    w = _simpson_weights(SIMPSON_PANELS)
    out = np.empty_like(flat)
    for start in range(0, flat.size, chunk):
        xs = flat[start : start + chunk, None]
        cuts = [np.full_like(xs, -h), np.zeros_like(xs), np.full_like(xs, h), ext.a - xs, ext.b - xs]
        cuts += [c - xs for c in ext.f.axis_kinks(0)]
        cuts = np.sort(np.clip(np.concatenate(cuts, axis=1), -h, h), axis=1)
        lo, hi = cuts[:, :-1, None], cuts[:, 1:, None]
        t = lo + (hi - lo) * u
        s = xs[:, :, None] + t
        mid = xs[:, :, None] + 0.5 * (lo + hi)
        inner = ext.f(np.clip(s, ext.a, ext.b))
        values = np.where(mid < ext.a, ext.left(s), np.where(mid > ext.b, ext.right(s), inner))
        kernel = (1.0 - np.abs(t) / h) / h
        out[start : start + chunk] = np.sum((hi - lo)[..., 0] * ((kernel * values) @ w), axis=1)
    return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


def smooth_second_derivative(ext: ZhukExtension, x):
    """``(S_h f)''(x) = (f_h(x + h) - 2 f_h(x) + f_h(x - h)) / h**2``.

    The triangular kernel is the convolution of two box kernels, so its
    second derivative is a scaled second difference of point masses; the
    identity holds wherever ``f_h`` is continuous at ``x`` and ``x +- h``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < ext.a) or np.any(x > ext.b):
        raise DomainError(f"x must lie in [{ext.a}, {ext.b}]")
    h = ext.h
    out = (ext(x + h) - 2.0 * ext(x) + ext(x - h)) / h**2
    return float(out) if x.ndim == 0 else out


def lemma1_check(f, h: float, N: int = 1000, modulus: ModulusEstimate | None = None,
                 modulus_resolution: int = LEMMA_MODULUS_RESOLUTION) -> BoundReport:
    """Check both smoothing inequalities on ``[0, 1]`` at ``N + 1`` uniform points.

    ``|f - S_h f| <= (3/4) w`` and ``|(S_h f)''| <= (3/2) h**-2 w`` where ``w``
    is ``modulus`` if given (e.g. a partial modulus of a parent field), the
    closed-form ``omega_2(f; h)`` for registered corpus fields, and a lattice
    estimate otherwise, which makes the report advisory.
    """
    f = as_field(f, 1)
    if not 0.0 < h <= 0.5:
        raise DomainError(f"h must lie in (0, 1/2], got {h}")
    resolutions = {"scan": N}
    est = modulus if modulus is not None else analytic_for(f, h)
    if est is None:
        est = omega2(f, h, modulus_resolution)
    if est.resolution is not None:
        resolutions["modulus"] = est.resolution
    w = est.value
    ext = extend(f, 0.0, 1.0, h)
    x = np.linspace(0.0, 1.0, N + 1)
    deviation = np.abs(f(x) - smooth_eval(ext, x))
    curvature = np.abs(smooth_second_derivative(ext, x))
    rhs1 = 0.75 * w
    rhs2 = 1.5 * w / h**2
    points = []
    for xi, dev, cur in zip(x, deviation, curvature):
        points.append(point_record([xi], dev, rhs1, h=float(h), inequality="deviation"))
        points.append(point_record([xi], cur, rhs2, h=float(h), inequality="second_derivative"))
    return BoundReport(
        config={"experiment": "zhuk_lemma1", "function": f.name, "h": float(h)},
        points=points,
        moduli_kinds={est.kind},
        resolutions=resolutions,
        extra_aggregates={
            "modulus": w,
            "max_deviation": float(deviation.max()),
            "max_second_derivative": float(curvature.max()),
        },
    )


def axis_smooth(f, axis: int, frozen, h: float, a: float = 0.0, b: float = 1.0) -> ScalarField:
    """Zhuk smoothing of the partial function of ``f`` along ``axis``.

    ``frozen`` fixes the other ``d - 1`` coordinates in order. The returned
    univariate field evaluates ``S_h`` of the partial function; its
    extension is kept as ``.func.extension``.
    """
    f = as_field(f)
    g = partial_field(f, axis, frozen) if f.dim > 1 else f
    ext = extend(g, a, b, h)

    def smoothed(s):
        return smooth_eval(ext, s)

    smoothed.extension = ext
    return ScalarField(1, smoothed, f"S_{h}({g.name})")


class ZhukSmoother(BaseEstimator):
    """Zhuk smoothing ``S_h`` of a univariate function as an estimator.

    ``fit`` builds the extension of the given function; ``predict`` evaluates
    ``S_h f`` and ``second_derivative`` its exact second derivative.
    """

    def __init__(self, h=0.25, a=0.0, b=1.0):
        self.h = h
        self.a = a
        self.b = b

    def fit(self, X, y=None):
        self.extension_ = extend(as_field(X, 1), self.a, self.b, self.h)
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "extension_")
        return smooth_eval(self.extension_, np.asarray(X, dtype=float).reshape(-1))

    def second_derivative(self, X):
        check_is_fitted(self, "extension_")
        return smooth_second_derivative(self.extension_, np.asarray(X, dtype=float).reshape(-1))
