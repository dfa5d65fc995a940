import numpy as np
import pytest

from gspline.errors import DegenerateBasisError, DomainError
from gspline.extraction import (
    ElementExtraction,
    bernstein_eval,
    bernstein_table,
    degree_elevate_2,
    evaluate_basis,
    rationalize,
)


def eval_cubic_grid(coeffs16, xi, eta):
    """Direct tensor evaluation of a bi-cubic Bernstein coefficient vector."""
    b, _, _ = bernstein_eval(3, xi, eta)
    return float(np.dot(coeffs16, b))


def eval_quintic_grid(coeffs36, xi, eta):
    b, _, _ = bernstein_eval(5, xi, eta)
    return float(np.dot(coeffs36, b))


class TestBernstein:
    def test_corner_interpolation(self):
        vals, _, _ = bernstein_eval(3, 0.0, 0.0)
        expected = np.zeros(16)
        expected[0] = 1.0
        np.testing.assert_allclose(vals, expected, atol=1e-15)

    def test_midpoint_binomials(self):
        vals, _, _ = bernstein_eval(3, 0.5, 0.5)
        uni = np.array([1, 3, 3, 1]) / 8.0
        np.testing.assert_allclose(vals, np.outer(uni, uni).T.reshape(-1),
                                   atol=1e-15)

    @pytest.mark.parametrize("p", [3, 5])
    def test_partition_of_unity(self, p):
        rng = np.random.default_rng(0)
        for _ in range(20):
            xi, eta = rng.uniform(0, 1, 2)
            vals, d1, d2 = bernstein_eval(p, xi, eta)
            assert abs(vals.sum() - 1.0) < 1e-13
            assert np.abs(d1.sum(axis=0)).max() < 1e-13
            assert np.abs(d2.sum(axis=0)).max() < 1e-12

    def test_out_of_domain(self):
        with pytest.raises(DomainError):
            bernstein_eval(3, -0.1, 0.5)
        with pytest.raises(DomainError):
            bernstein_eval(3, 0.5, 1.2)

    def test_quintic_derivatives_vs_finite_differences(self):
        rng = np.random.default_rng(1)
        h = 1e-6
        for _ in range(10):
            xi, eta = rng.uniform(0.05, 0.95, 2)
            _, d1, _ = bernstein_eval(5, xi, eta)
            vp, _, _ = bernstein_eval(5, xi + h, eta)
            vm, _, _ = bernstein_eval(5, xi - h, eta)
            fd = (vp - vm) / (2 * h)
            denom = max(1.0, np.abs(d1[:, 0]).max())
            assert np.abs(fd - d1[:, 0]).max() / denom < 1e-6

    def test_second_derivatives_vs_finite_differences(self):
        rng = np.random.default_rng(2)
        h = 1e-4
        for _ in range(5):
            xi, eta = rng.uniform(0.1, 0.9, 2)
            _, _, d2 = bernstein_eval(5, xi, eta)
            vp, _, _ = bernstein_eval(5, xi + h, eta)
            v0, _, _ = bernstein_eval(5, xi, eta)
            vm, _, _ = bernstein_eval(5, xi - h, eta)
            fd = (vp - 2 * v0 + vm) / h**2
            assert np.abs(fd - d2[:, 0]).max() < 1e-5

    def test_table_matches_pointwise(self):
        pts = np.array([[0.1, 0.2], [0.7, 0.9], [0.0, 1.0]])
        tv, t1, t2 = bernstein_table(5, pts)
        for m, (xi, eta) in enumerate(pts):
            v, d1, d2 = bernstein_eval(5, xi, eta)
            np.testing.assert_allclose(tv[:, m], v, atol=1e-15)
            np.testing.assert_allclose(t1[:, m], d1, atol=1e-15)
            np.testing.assert_allclose(t2[:, m], d2, atol=1e-15)


class TestDegreeElevation:
    def test_constant(self):
        np.testing.assert_allclose(degree_elevate_2(np.ones(16)), np.ones(36),
                                   atol=1e-14)

    def test_linear_xi(self):
        # coefficients of the polynomial xi in cubic Bernstein form
        cubic = np.zeros((4, 4))
        for i in range(4):
            cubic[i, :] = i / 3.0
        quintic = degree_elevate_2(cubic.reshape(16, order="F"))
        rng = np.random.default_rng(3)
        for _ in range(10):
            xi, eta = rng.uniform(0, 1, 2)
            assert abs(eval_quintic_grid(quintic, xi, eta) - xi) < 1e-13

    def test_random_coefficients_same_polynomial(self):
        rng = np.random.default_rng(4)
        cubic = rng.normal(size=16)
        quintic = degree_elevate_2(cubic)
        grid = np.linspace(0, 1, 20)
        worst = 0.0
        for xi in grid:
            for eta in grid:
                worst = max(worst, abs(eval_cubic_grid(cubic, xi, eta)
                                       - eval_quintic_grid(quintic, xi, eta)))
        assert worst < 1e-12


class TestRationalize:
    def test_identity_when_sum_is_one(self):
        rng = np.random.default_rng(5)
        coeffs = rng.uniform(0.1, 1.0, size=(5, 16))
        coeffs /= coeffs.sum(axis=0, keepdims=True)
        ext = ElementExtraction(0, 3, np.arange(5), coeffs)
        vals, d1, d2 = evaluate_basis(ext, 0.3, 0.6)
        r, r1, r2 = rationalize(vals, d1, d2)
        np.testing.assert_allclose(r, vals, atol=1e-13)
        np.testing.assert_allclose(r1, d1, atol=1e-12)
        np.testing.assert_allclose(r2, d2, atol=1e-11)

    def test_rational_derivatives_vs_finite_differences(self):
        rng = np.random.default_rng(6)
        coeffs = rng.uniform(0.2, 1.0, size=(6, 16))
        ext = ElementExtraction(0, 3, np.arange(6), coeffs)

        def ratio(xi, eta):
            v, d1, d2 = evaluate_basis(ext, xi, eta)
            return rationalize(v, d1, d2)[0]

        h = 1e-6
        xi, eta = 0.37, 0.58
        _, r1, _ = rationalize(*evaluate_basis(ext, xi, eta))
        fd = (ratio(xi + h, eta) - ratio(xi - h, eta)) / (2 * h)
        assert np.abs(fd - r1[:, 0]).max() < 1e-6
        fd = (ratio(xi, eta + h) - ratio(xi, eta - h)) / (2 * h)
        assert np.abs(fd - r1[:, 1]).max() < 1e-6

    def test_rational_sums_to_one(self):
        rng = np.random.default_rng(7)
        coeffs = rng.uniform(0.2, 1.0, size=(6, 36))
        ext = ElementExtraction(0, 5, np.arange(6), coeffs, rational=True)
        vals, d1, d2 = evaluate_basis(ext, 0.21, 0.84)
        assert abs(vals.sum() - 1.0) < 1e-14
        assert np.abs(d1.sum(axis=0)).max() < 1e-13

    def test_zero_denominator(self):
        vals = np.array([0.5, -0.5])
        d1 = np.zeros((2, 2))
        d2 = np.zeros((2, 3))
        with pytest.raises(DegenerateBasisError):
            rationalize(vals, d1, d2)
