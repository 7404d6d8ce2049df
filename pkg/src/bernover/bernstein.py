"""Univariate Bernstein operators and their overiterates.

Overiteration works on node values: ``B_l^k f`` only reads ``B_l^(k-1) f`` at
the nodes ``j/l``, so ``k`` applications collapse into one power of the
(l+1)x(l+1) node-transfer matrix ``M[i, j] = p_{l,j}(i/l)`` followed by a
single evaluation in the Bernstein basis.
"""

from __future__ import annotations

import numpy as np

from ._validation import (
    DomainError,
    check_count,
    check_degree,
    check_unit_interval,
)
from .fields import as_field

ROW_SUM_TOL = 1e-9


def basis_matrix(l: int, x) -> np.ndarray:
    """All degree-``l`` Bernstein basis values at ``x``.

    Returns an array of shape ``x.shape + (l + 1,)``. The values are built by
    the degree-raising recurrence ``p_{m+1,k} = (1-x) p_{m,k} + x p_{m,k-1}``,
    which never forms a binomial coefficient and is exact at x = 0 and x = 1.
    """
    l = check_degree(l)
    x = check_unit_interval(x)
    u = 1.0 - x
    p = np.zeros(x.shape + (l + 1,))
    p[..., 0] = 1.0
    for m in range(1, l + 1):
        # update right to left so p[..., k - 1] is still the degree m-1 value
        p[..., m] = x * p[..., m - 1]
        for k in range(m - 1, 0, -1):
            p[..., k] = u * p[..., k] + x * p[..., k - 1]
        p[..., 0] = u * p[..., 0]
    return p


def basis(l: int, k: int, x):
    """Bernstein basis polynomial ``p_{l,k}(x) = C(l,k) x^k (1-x)^(l-k)``.

    Uses ``0**0 = 1``, so ``basis(l, 0, 0) == basis(l, l, 1) == 1``.

    Raises
    ------
    DomainError
        If ``k`` is outside ``[0, l]`` or ``x`` outside ``[0, 1]``.
    """
    l = check_degree(l)
    k = check_count(k, "k")
    if k > l:
        raise DomainError(f"k must lie in [0, {l}], got {k}")
    out = basis_matrix(l, x)[..., k]
    return float(out) if out.ndim == 0 else out


def transfer_matrix(l: int) -> np.ndarray:
    """Row-stochastic node-transfer matrix of ``B_l``: ``M[i, j] = p_{l,j}(i/l)``."""
    l = check_degree(l)
    return basis_matrix(l, np.arange(l + 1) / l)


def matrix_power(M, k: int, check_stochastic: bool = True) -> np.ndarray:
    """``M**k`` by binary exponentiation.

    Row sums are not renormalised. When ``check_stochastic`` is set, a drift of
    any row sum away from 1 by more than ``ROW_SUM_TOL`` raises
    ``FloatingPointError``.
    """
    M = np.asarray(M, dtype=float)
    k = check_count(k, "k")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"need a square matrix, got shape {M.shape}")
    result = np.eye(M.shape[0])
    base = M.copy()
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    if check_stochastic:
        drift = np.max(np.abs(result.sum(axis=1) - 1.0)) if result.size else 0.0
        if drift > ROW_SUM_TOL:
            raise FloatingPointError(f"row sums drifted by {drift:.3e}")
    return result


def node_values(f, l: int) -> np.ndarray:
    """``f(j/l)`` for ``j = 0..l``."""
    f = as_field(f, 1)
    return f(np.arange(l + 1) / l)


def iterate_eval(l: int, k: int, f, x):
    """``B_l^k(f; x)`` via the node-transfer matrix.

    Computes ``sum_j (M^(k-1) v)[j] p_{l,j}(x)`` with ``v[j] = f(j/l)``; for
    ``k = 1`` this is the defining sum of ``B_l f``.
    """
    l = check_degree(l)
    k = check_count(k, "k", minimum=1)
    v = node_values(f, l)
    coeffs = matrix_power(transfer_matrix(l), k - 1) @ v
    out = basis_matrix(l, x) @ coeffs
    return float(out) if out.ndim == 0 else out


def b1_eval(f, x):
    """``B_1(f; x) = f(0)(1 - x) + f(1) x``, the chord through the endpoints."""
    f = as_field(f, 1)
    x = check_unit_interval(x)
    f0, f1 = f(0.0), f(1.0)
    out = f0 * (1.0 - x) + f1 * x
    return float(out) if np.ndim(out) == 0 else out


def endpoint_residual(v: np.ndarray, axis: int = 0) -> np.ndarray:
    """Subtract from ``v`` its chord through the first and last entry along ``axis``.

    Written as ``v0 + (vl - v0) t`` so that constant fibres give exact zeros.
    """
    v = np.moveaxis(np.asarray(v, dtype=float), axis, 0)
    l = v.shape[0] - 1
    t = (np.arange(l + 1) / l).reshape((-1,) + (1,) * (v.ndim - 1))
    r = v - (v[0] + (v[-1] - v[0]) * t)
    r[0] = 0.0
    r[-1] = 0.0
    return np.moveaxis(r, 0, axis)


def interior_power(l: int, m: int) -> np.ndarray:
    """``m``-th power of the interior block ``M[1:l, 1:l]`` of the transfer matrix.

    The block is nonnegative and substochastic with spectral radius ``1 - 1/l``,
    so its powers keep full relative accuracy even when they are tiny.
    """
    M = transfer_matrix(l)
    return matrix_power(M[1:l, 1:l], m, check_stochastic=False)


def iterate_deviation(l: int, k: int, f, x):
    """``B_l^k(f; x) - B_1(f; x)`` without cancellation.

    Because ``B_l`` reproduces the chord and fixes both endpoint values,
    ``M^(k-1) v - P v = M^(k-1) (v - P v)`` where ``P v`` is the chord at the
    nodes. The residual vanishes at both ends, so only the interior block of
    ``M`` acts on it, and the result is accurate relative to its own size
    rather than to ``|f|``.
    """
    l = check_degree(l)
    k = check_count(k, "k", minimum=1)
    x = check_unit_interval(x)
    if l == 1:
        out = np.zeros_like(x)
    else:
        r = endpoint_residual(node_values(f, l))[1:l]
        w = interior_power(l, k - 1) @ r
        out = basis_matrix(l, x)[..., 1:l] @ w
    return float(out) if out.ndim == 0 else out
