"""Tensor-product Bernstein operators on the unit cube.

Node grids are plain ``ndarray`` objects of shape ``(l_1+1, ..., l_d+1)``
whose entry ``(j_1, ..., j_d)`` belongs to the node ``(j_1/l_1, ..., j_d/l_d)``.
One tensor application multiplies every fibre along every axis by that
axis' transfer matrix; since the axes commute, ``n_d`` applications along
axis ``d`` reduce to a single multiplication by ``M_d**(n_d - 1)`` before the
final evaluation.
"""

from __future__ import annotations

import itertools

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    DEFAULT_MAX_NODES,
    ShapeError,
    check_degrees,
    check_grid_size,
    check_points,
    check_powers,
)
from .bernstein import (
    basis_matrix,
    endpoint_residual,
    interior_power,
    matrix_power,
    transfer_matrix,
)
from .fields import ScalarField, as_field


def sample_nodes(f, degrees, max_nodes: int = DEFAULT_MAX_NODES) -> np.ndarray:
    """Values of ``f`` on the tensor node grid of the given degrees.

    Raises
    ------
    CapacityError
        If the grid would hold more than ``max_nodes`` entries.
    """
    degrees = check_degrees(degrees)
    f = as_field(f, len(degrees))
    check_grid_size(degrees, max_nodes)
    axes = [np.arange(l + 1) / l for l in degrees]
    return f(*np.meshgrid(*axes, indexing="ij"))


def _check_grid(grid, degrees=None) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if degrees is not None and grid.shape != tuple(l + 1 for l in degrees):
        raise ShapeError(f"grid shape {grid.shape} does not match degrees {tuple(degrees)}")
    if grid.ndim < 1 or min(grid.shape) < 2:
        raise ShapeError(f"not a node grid: shape {grid.shape}")
    return grid


def mode_apply(grid, axis: int, M) -> np.ndarray:
    """Replace every fibre of ``grid`` along ``axis`` by ``M @ fibre``."""
    grid = _check_grid(grid)
    M = np.asarray(M, dtype=float)
    if not 0 <= axis < grid.ndim:
        raise ShapeError(f"axis {axis} out of range for a {grid.ndim}-d grid")
    if M.shape != (grid.shape[axis], grid.shape[axis]):
        raise ShapeError(
            f"matrix of shape {M.shape} does not act on axis {axis} of length {grid.shape[axis]}"
        )
    return _apply_along(grid, axis, M)


def _apply_along(grid: np.ndarray, axis: int, M: np.ndarray) -> np.ndarray:
    return np.moveaxis(np.tensordot(M, grid, axes=(1, axis)), 0, axis)


def tensor_apply(grid) -> np.ndarray:
    """One application of ``B_{l_1} x ... x B_{l_d}`` on node values."""
    grid = _check_grid(grid)
    for axis, size in enumerate(grid.shape):
        grid = mode_apply(grid, axis, transfer_matrix(size - 1))
    return grid


def iterate_grid(grid, powers) -> np.ndarray:
    """Apply ``M_a**(n_a - 1)`` along every axis ``a``.

    The result holds the Bernstein coefficients of the iterate, ready for
    :func:`evaluate_grid`.
    """
    grid = _check_grid(grid)
    powers = check_powers(powers, grid.ndim)
    for axis, n in enumerate(powers):
        M = transfer_matrix(grid.shape[axis] - 1)
        grid = mode_apply(grid, axis, matrix_power(M, n - 1))
    return grid


def _contract(grid: np.ndarray, weights) -> np.ndarray:
    # weights[a] has shape (n_samples, grid.shape[a]); returns shape (n_samples,)
    out = np.tensordot(weights[0], grid, axes=(1, 0))
    for W in weights[1:]:
        out = np.einsum("nj,nj...->n...", W, out)
    return out


def evaluate_grid(coefficients, X) -> np.ndarray:
    """Evaluate a tensor Bernstein polynomial with the given coefficients at points ``X``."""
    coefficients = _check_grid(coefficients)
    X = check_points(X, coefficients.ndim)
    weights = [basis_matrix(size - 1, X[:, a]) for a, size in enumerate(coefficients.shape)]
    return _contract(coefficients, weights)


def _scalar_or_array(out, x):
    return float(out[0]) if np.ndim(x) <= 1 and out.size == 1 else out


def tensor_iterate_eval(f, degrees, powers, x, max_nodes: int = DEFAULT_MAX_NODES):
    """``(B_{l_1}^{n_1} o ... o B_{l_d}^{n_d})(f; x)``.

    With equal powers this is ``(B_{l_1} x ... x B_{l_d})^n f`` at ``x``. ``x``
    is one point of length d or an array of shape (n, d).
    """
    degrees = check_degrees(degrees)
    grid = sample_nodes(f, degrees, max_nodes)
    out = evaluate_grid(iterate_grid(grid, powers), x)
    return _scalar_or_array(out, x)


def grid_deviation(grid, powers, X) -> np.ndarray:
    """Iterate minus limit, ``(T^n f - L f)(X)``, from node values alone.

    Each axis operator splits as ``M**m = P + M**m (I - P)`` with ``P`` the
    endpoint chord. Expanding the tensor product gives one term per nonempty
    set of axes that carry the ``(I - P)`` part; on those axes only the
    interior block of ``M`` acts, on the others only the two endpoint values
    survive. Every term is computed on data that is already small, so the
    difference keeps relative accuracy after many iterations.
    """
    grid = _check_grid(grid)
    d = grid.ndim
    powers = check_powers(powers, d)
    X = check_points(X, d)
    degrees = [s - 1 for s in grid.shape]

    total = np.zeros(X.shape[0])
    for mask in itertools.product((False, True), repeat=d):
        if not any(mask):
            continue
        if any(on and l == 1 for on, l in zip(mask, degrees)):
            continue
        G = grid
        weights = []
        for a, (on, l, n) in enumerate(zip(mask, degrees, powers)):
            x = X[:, a]
            if on:
                G = np.take(endpoint_residual(G, a), np.arange(1, l), axis=a)
                G = _apply_along(G, a, interior_power(l, n - 1))
                weights.append(basis_matrix(l, x)[:, 1:l])
            else:
                G = np.take(G, [0, l], axis=a)
                weights.append(np.stack([1.0 - x, x], axis=1))
        total += _contract(G, weights)
    return total


def tensor_deviation(f, degrees, powers, x, max_nodes: int = DEFAULT_MAX_NODES):
    """``(B_{l_1}^{n_1} o ... o B_{l_d}^{n_d})(f; x) - (L f)(x)`` without cancellation."""
    degrees = check_degrees(degrees)
    out = grid_deviation(sample_nodes(f, degrees, max_nodes), powers, x)
    return _scalar_or_array(out, x)


def vertex_table(f, d: int | None = None) -> np.ndarray:
    """Values of ``f`` at the ``2**d`` cube vertices, as an array of shape ``(2,) * d``."""
    f = as_field(f, d)
    return sample_nodes(f, (1,) * f.dim)


def limit_L(f, x):
    """Multilinear interpolation of the vertex values of ``f``, i.e. ``(B_1 x ... x B_1) f``."""
    f = as_field(f)
    X = check_points(x, f.dim)
    weights = [np.stack([1.0 - X[:, a], X[:, a]], axis=1) for a in range(f.dim)]
    out = _contract(vertex_table(f), weights)
    return _scalar_or_array(out, x)


def min_vertex_mass(degrees) -> float:
    """Minimum over the cube of ``prod_a ((1 - x_a)**l_a + x_a**l_a)``.

    Each factor is convex and symmetric about 1/2, so the minimum is
    ``prod_a 2**(1 - l_a)``; a 1001-point scan of every factor guards that.
    """
    degrees = check_degrees(degrees)
    s = np.linspace(0.0, 1.0, 1001)
    value = 1.0
    for l in degrees:
        analytic = 2.0 ** (1 - l)
        scanned = np.min((1.0 - s) ** l + s**l)
        assert abs(scanned - analytic) <= 1e-12, (l, scanned, analytic)
        value *= analytic
    return value


def contraction_constant(degrees) -> float:
    """Lipschitz factor ``1 - prod_a 2**(1 - l_a)`` of one tensor application.

    Valid on any class of functions sharing the same vertex values.
    """
    return 1.0 - min_vertex_mass(degrees)


def _fit_node_input(X, degrees, max_nodes):
    if isinstance(X, ScalarField) or callable(X):
        return sample_nodes(as_field(X, len(degrees)), degrees, max_nodes)
    return _check_grid(X, degrees)


class BernsteinOveriterator(BaseEstimator):
    """Overiterated tensor-product Bernstein operator as an estimator.

    ``fit`` takes either a function on the cube (sampled at the nodes) or an
    array of node values, and stores the coefficients of
    ``B_{l_1}^{n_1} o ... o B_{l_d}^{n_d} f``; ``predict`` evaluates it.

    Parameters
    ----------
    degrees : tuple of int
        Degree ``l_a`` per axis; ``len(degrees)`` is the dimension.
    powers : tuple of int
        Number of applications ``n_a >= 1`` per axis.
    max_nodes : int
        Cap on the node grid size.

    Attributes
    ----------
    node_values_ : ndarray
        Samples at the nodes.
    coefficients_ : ndarray
        Node values after ``M_a**(n_a - 1)`` along every axis.
    n_features_in_ : int
        Dimension ``d``.
    """

    def __init__(self, degrees=(2,), powers=(1,), max_nodes=DEFAULT_MAX_NODES):
        self.degrees = degrees
        self.powers = powers
        self.max_nodes = max_nodes

    def fit(self, X, y=None):
        degrees = check_degrees(self.degrees)
        check_powers(self.powers, len(degrees))
        self.node_values_ = _fit_node_input(X, degrees, self.max_nodes)
        self.coefficients_ = iterate_grid(self.node_values_, self.powers)
        self.n_features_in_ = len(degrees)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "coefficients_")
        return evaluate_grid(self.coefficients_, X)

    def deviation(self, X) -> np.ndarray:
        """Iterate minus the multilinear limit at ``X``."""
        check_is_fitted(self, "coefficients_")
        return grid_deviation(self.node_values_, self.powers, X)


class LimitOperator(BaseEstimator):
    """The limit operator: multilinear interpolation of the vertex values.

    ``fit`` accepts a function on the cube or a vertex array of shape
    ``(2,) * d``.
    """

    def __init__(self, dim=1):
        self.dim = dim

    def fit(self, X, y=None):
        if isinstance(X, ScalarField) or callable(X):
            self.vertex_values_ = vertex_table(as_field(X, self.dim))
        else:
            self.vertex_values_ = _check_grid(X, (1,) * self.dim)
        self.n_features_in_ = self.dim
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "vertex_values_")
        return evaluate_grid(self.vertex_values_, X)
