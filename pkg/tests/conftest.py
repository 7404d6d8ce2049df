import functools
import math

import numpy as np
import pytest

from bernover import ScalarField


def direct_basis(l, k, x):
    """Binomial-coefficient form of the Bernstein basis, used as an oracle."""
    return math.comb(l, k) * x**k * (1.0 - x) ** (l - k)


def direct_bernstein(g, l):
    """One literal application of the defining sum, returned as a new callable."""
    @functools.lru_cache(maxsize=None)
    def applied(x):
        return sum(float(g(j / l)) * direct_basis(l, j, x) for j in range(l + 1))

    return applied


@pytest.fixture
def e2():
    return ScalarField(1, lambda x: x**2, "e2")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
