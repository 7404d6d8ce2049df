import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from sklearn.exceptions import NotFittedError

from bernover import (
    ConvergenceError,
    DomainError,
    MinimaxLinearFit,
    ScalarField,
    ZhukSmoother,
    axis_smooth,
    best_linear_minimax,
    corpus,
    extend,
    lemma1_check,
    omega2,
    partial_omega2,
    smooth_eval,
    smooth_second_derivative,
)
from bernover.fields import partial_field
from bernover.zhuk import discrete_minimax_line

H_VALUES = (0.05, 0.1, 0.25, 0.5)
SMOOTH_IDS = ("e2", "e3", "cosprod", "runge")


def scan_minimax(f, alpha, beta, n=2001):
    """Oracle: sup-error of the best line is convex in the slope; scan then polish."""
    x = np.linspace(alpha, beta, n)
    y = f(x)

    def err(slope):
        r = y - slope * x
        return 0.5 * (r.max() - r.min())

    slopes = np.linspace(-20, 20, 4001)
    s0 = slopes[np.argmin([err(s) for s in slopes])]
    res = minimize_scalar(err, bracket=(s0 - 0.02, s0, s0 + 0.02), tol=1e-14)
    r = y - res.x * x
    return res.x, -0.5 * (r.max() + r.min()), res.fun


class TestMinimaxLine:
    def test_affine_is_exact(self):
        fit = best_linear_minimax(ScalarField(1, lambda x: 2.0 - 3.0 * x), 0.2, 0.9)
        assert fit.slope == pytest.approx(-3.0, abs=1e-12)
        assert fit.intercept == pytest.approx(2.0, abs=1e-12)
        assert fit.error == pytest.approx(0.0, abs=1e-12)

    def test_e2_half_interval(self):
        fit = best_linear_minimax(corpus("e2"), 0.0, 0.5)
        assert fit.error == pytest.approx(1 / 32, abs=1e-8)
        assert fit.equioscillates()

    def test_e2_unit_interval(self):
        fit = best_linear_minimax(corpus("e2"), 0.0, 1.0)
        assert fit.slope == pytest.approx(1.0, abs=1e-10)
        assert fit.intercept == pytest.approx(-1 / 8, abs=1e-10)
        assert fit.error == pytest.approx(1 / 8, abs=1e-10)

    @pytest.mark.parametrize("fid", ["e2", "e3", "cosprod", "runge", "abs", "random_grid"])
    @pytest.mark.parametrize("interval", [(0.0, 0.5), (0.5, 1.0), (0.1, 0.3), (0.0, 1.0)])
    def test_against_scan_oracle(self, fid, interval):
        f = corpus(fid)
        fit = best_linear_minimax(f, *interval)
        _, _, err = scan_minimax(f, *interval)
        assert fit.error == pytest.approx(err, abs=1e-10)
        x = np.linspace(*interval, 2001)
        assert np.max(np.abs(f(x) - fit(x))) == pytest.approx(fit.error, abs=1e-12)
        assert fit.equioscillates()

    def test_needs_three_samples(self):
        with pytest.raises(ValueError):
            discrete_minimax_line([0.0, 1.0], [1.0, 2.0])

    def test_iteration_budget(self):
        x = np.linspace(0, 1, 2001)
        with pytest.raises(ConvergenceError) as info:
            discrete_minimax_line(x, np.sin(40 * x) + x**2, max_iter=1)
        assert info.value.best is not None

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            best_linear_minimax(corpus("e2"), 0.5, 0.5)

    def test_estimator(self):
        x = np.linspace(0, 1, 501)
        est = MinimaxLinearFit().fit(x[:, None], x**2)
        assert est.coef_ == pytest.approx(1.0, abs=1e-10)
        assert est.intercept_ == pytest.approx(-0.125, abs=1e-10)
        assert est.error_ == pytest.approx(0.125, abs=1e-10)
        np.testing.assert_allclose(est.predict([[0.0], [1.0]]), [-0.125, 0.875], atol=1e-10)
        assert est.get_params()["tol"] == 1e-12
        with pytest.raises(NotFittedError):
            MinimaxLinearFit().predict([[0.1]])


class TestExtension:
    def test_affine_extends_itself(self):
        f = ScalarField(1, lambda x: 0.4 * x - 1.0)
        ext = extend(f, 0.0, 1.0, 0.3)
        t = np.linspace(-0.3, 1.3, 161)
        np.testing.assert_allclose(ext(t), 0.4 * t - 1.0, atol=1e-12)

    def test_left_piece_is_strip_fit(self):
        ext = extend(corpus("e2"), 0.0, 1.0, 0.25)
        left = best_linear_minimax(corpus("e2"), 0.0, 0.5)
        assert ext(-0.1) == pytest.approx(left(-0.1), abs=1e-15)
        right = best_linear_minimax(corpus("e2"), 0.5, 1.0)
        assert ext(1.2) == pytest.approx(right(1.2), abs=1e-15)

    def test_interior_is_exact(self):
        f = corpus("runge")
        ext = extend(f, 0.0, 1.0, 0.2)
        x = np.linspace(0.0, 1.0, 101)
        np.testing.assert_array_equal(ext(x), f(x))

    def test_general_interval(self):
        f = ScalarField(1, lambda x: np.sin(x))
        ext = extend(f, 0.2, 0.8, 0.3)
        assert ext.left.interval == (0.2, 0.8)
        assert ext(0.5) == pytest.approx(np.sin(0.5))

    @pytest.mark.parametrize("h", [0.0, -0.1, 0.51])
    def test_step_range(self, h):
        with pytest.raises(DomainError):
            extend(corpus("e2"), 0.0, 1.0, h)

    def test_outside_extended_domain(self):
        ext = extend(corpus("e2"), 0.0, 1.0, 0.1)
        with pytest.raises(DomainError):
            ext(1.2)


class TestSmoothing:
    def test_affine_reproduced_everywhere(self):
        f = ScalarField(1, lambda x: -2.0 * x + 0.7)
        for h in H_VALUES:
            ext = extend(f, 0.0, 1.0, h)
            x = np.linspace(0.0, 1.0, 201)
            np.testing.assert_allclose(smooth_eval(ext, x), f(x), atol=1e-10)

    def test_constant(self):
        ext = extend(ScalarField(1, lambda x: 0 * x + 3.25), 0.0, 1.0, 0.4)
        np.testing.assert_allclose(smooth_eval(ext, np.linspace(0, 1, 11)), 3.25, atol=1e-12)

    @pytest.mark.parametrize("h", H_VALUES)
    def test_e2_interior_shift(self, h):
        ext = extend(corpus("e2"), 0.0, 1.0, h)
        assert smooth_eval(ext, 0.5) == pytest.approx(0.25 + h**2 / 6, abs=1e-8)
        x = np.linspace(h, 1 - h, 21)
        np.testing.assert_allclose(smooth_eval(ext, x), x**2 + h**2 / 6, atol=1e-8)

    def test_example_value(self):
        ext = extend(corpus("e2"), 0.0, 1.0, 0.25)
        assert smooth_eval(ext, 0.5) == pytest.approx(0.260416667, abs=1e-8)
        assert isinstance(smooth_eval(ext, 0.5), float)

    def test_kinked_function_matches_fine_quadrature(self):
        f = corpus("abs", c=0.37)
        ext = extend(f, 0.0, 1.0, 0.2)
        h = 0.2
        for x in (0.3, 0.37, 0.5, 0.05, 0.0, 0.93):
            breaks = [t for t in (0.0, -x, 1.0 - x, 0.37 - x) if -h < t < h]
            oracle, _ = quad(lambda t: (1 - abs(t) / h) / h * float(ext(x + t)), -h, h,
                             points=breaks, epsabs=1e-13, limit=200)
            assert smooth_eval(ext, x) == pytest.approx(oracle, abs=1e-10)

    def test_outside_interval(self):
        with pytest.raises(DomainError):
            smooth_eval(extend(corpus("e2"), 0, 1, 0.1), 1.1)


class TestSecondDerivative:
    def test_affine_zero(self):
        ext = extend(ScalarField(1, lambda x: 5 * x - 2), 0.0, 1.0, 0.3)
        np.testing.assert_allclose(smooth_second_derivative(ext, np.linspace(0, 1, 31)), 0.0, atol=1e-10)

    @pytest.mark.parametrize("h", H_VALUES)
    def test_e2_equals_two(self, h):
        ext = extend(corpus("e2"), 0.0, 1.0, h)
        x = np.linspace(h, 1 - h, 41)
        np.testing.assert_allclose(smooth_second_derivative(ext, x), 2.0, atol=1e-12)

    @pytest.mark.parametrize("fid", SMOOTH_IDS)
    @pytest.mark.parametrize("h", [0.1, 0.25])
    def test_finite_difference_oracle(self, fid, h):
        ext = extend(corpus(fid), 0.0, 1.0, h)
        x = np.linspace(0.005, 0.995, 101)
        step = 1e-4
        fd = (smooth_eval(ext, x + step) - 2 * smooth_eval(ext, x) + smooth_eval(ext, x - step)) / step**2
        np.testing.assert_allclose(smooth_second_derivative(ext, x), fd, atol=1e-3)


class TestLemmaCheck:
    def test_affine(self):
        rep = lemma1_check(corpus("affine"), 0.3)
        assert rep.passed
        assert rep.max_lhs == pytest.approx(0.0, abs=1e-10)
        assert rep.extra_aggregates["modulus"] == 0.0

    def test_e2(self):
        h = 0.25
        rep = lemma1_check(corpus("e2"), h)
        assert rep.passed
        interior = [p["lhs"] for p in rep.points
                    if p["inequality"] == "deviation" and h <= p["point"][0] <= 1 - h]
        np.testing.assert_allclose(interior, h**2 / 6, atol=1e-8)
        # the boundary strips deviate by the strip error 1/32, still under (3/4) 2 h^2
        assert rep.extra_aggregates["max_deviation"] == pytest.approx(1 / 32, abs=1e-10)
        assert rep.extra_aggregates["max_deviation"] <= 0.09375
        assert not rep.advisory

    def test_abs(self):
        rep = lemma1_check(corpus("abs"), 0.2)
        assert rep.passed
        assert rep.min_margin > 0

    def test_unregistered_uses_grid_modulus(self):
        rep = lemma1_check(corpus("cosprod"), 0.1)
        assert rep.passed and rep.advisory
        assert rep.resolutions["modulus"] == 5000

    def test_two_records_per_point(self):
        rep = lemma1_check(corpus("e2"), 0.1, N=50)
        assert len(rep.points) == 102
        assert {p["inequality"] for p in rep.points} == {"deviation", "second_derivative"}

    def test_step_range(self):
        with pytest.raises(DomainError):
            lemma1_check(corpus("e2"), 0.6)


class TestAxisSmooth:
    def test_affine_partial_unchanged(self):
        g = axis_smooth(ScalarField(2, lambda x, y: x + y), 0, [0.7], 0.25)
        x = np.linspace(0, 1, 21)
        np.testing.assert_allclose(g(x), x + 0.7, atol=1e-10)

    def test_x2y_along_x(self):
        g = axis_smooth(corpus("x2y", d=2), 0, [1.0], 0.25)
        assert g(0.5) == pytest.approx(0.260416667, abs=1e-8)

    def test_x2y_along_y_unchanged(self):
        for x in (0.0, 0.3, 1.0):
            g = axis_smooth(corpus("x2y", d=2), 1, [x], 0.4)
            y = np.linspace(0, 1, 11)
            np.testing.assert_allclose(g(y), x**2 * y, atol=1e-10)

    def test_extension_is_exposed(self):
        g = axis_smooth(corpus("cosprod", d=2), 1, [0.2], 0.1)
        assert g.func.extension.h == 0.1

    @pytest.mark.parametrize("fid", ["cosprod", "runge", "x2y", "random_grid"])
    def test_partial_modulus_dominates(self, fid):
        f = corpus(fid, d=2)
        N = 100
        for axis in (0, 1):
            for s in np.arange(0, N + 1, 10) / N:
                g = partial_field(f, axis, [s])
                for h in (0.05, 0.25):
                    assert omega2(g, h, N).value <= partial_omega2(f, axis, h, N).value + 1e-12

    def test_lemma_with_partial_modulus(self):
        f = corpus("cosprod", d=2)
        h = 0.1
        w = partial_omega2(f, 0, h, 200)
        for s in (0.0, 0.35, 1.0):
            rep = lemma1_check(partial_field(f, 0, [s]), h, N=200, modulus=w)
            assert rep.passed

    def test_estimator(self):
        est = ZhukSmoother(h=0.25).fit(corpus("e2"))
        assert est.predict([0.5])[0] == pytest.approx(0.25 + 0.25**2 / 6, abs=1e-8)
        assert est.second_derivative([0.5])[0] == pytest.approx(2.0, abs=1e-12)
        assert est.get_params() == {"h": 0.25, "a": 0.0, "b": 1.0}
        with pytest.raises(NotFittedError):
            ZhukSmoother().predict([0.5])
