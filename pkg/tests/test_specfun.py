"""Tests for the scalar special functions.

Oracles: mpmath (ei, ci, gammainc) and scipy.special (loggamma, kv,
gammaincc) provide independent reference values; identity-based checks
(Bessel-K reduction, multiplication formula) cross-validate the extended
incomplete gamma integral.
"""
import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp

from divcap.specfun import (
    ln_gamma,
    exp_integral_ei,
    cosine_integral_ci,
    extended_incomplete_gamma,
    upper_incomplete_gamma,
    mittag_leffler,
    hermite_rule,
)

mpmath.mp.dps = 30


class TestLnGamma:
    @pytest.mark.parametrize("z", [0.1, 0.5, 1.0, 2.5, 7.0, 40.0, 171.5])
    def test_real_positive(self, z):
        np.testing.assert_allclose(ln_gamma(z), float(sp.loggamma(z)),
                                   rtol=1e-13, atol=1e-13)

    def test_known_values(self):
        np.testing.assert_allclose(ln_gamma(5.0), math.log(24.0), rtol=1e-14)
        np.testing.assert_allclose(ln_gamma(0.5), 0.5 * math.log(math.pi), rtol=1e-14)

    @pytest.mark.parametrize("z", [
        0.3 + 0.7j, 2.0 + 10.0j, -1.5 + 0.2j, -3.2 + 40.0j, -0.05 - 3.0j,
        0.5 + 200.0j, -20.5 + 1e-3j, 1.0 - 55.0j,
    ])
    def test_complex_matches_scipy(self, z):
        got = complex(ln_gamma(z))
        want = complex(sp.loggamma(z))
        # compare modulo 2 pi i: only exp(sum of logs) enters the contour
        # integrals, so the branch offset in the reflection region is free
        assert abs(got.real - want.real) < 1e-11 * max(1.0, abs(want.real))
        assert abs(np.exp(1j * (got.imag - want.imag)) - 1.0) < 1e-10

    def test_vectorized(self):
        z = np.array([1.0 + 1j, 4.5 + 0j, -2.5 + 5j])
        out = ln_gamma(z)
        assert out.shape == z.shape
        for zi, oi in zip(z, out):
            want = complex(sp.loggamma(complex(zi)))
            assert abs(np.exp(oi - want) - 1.0) < 1e-10

    def test_real_in_real_out(self):
        assert isinstance(float(ln_gamma(3.3)), float)
        assert np.isrealobj(ln_gamma(np.array([1.0, 2.0, 3.0])))

    @pytest.mark.parametrize("z", [0.0, -1.0, -7.0])
    def test_poles_raise(self, z):
        with pytest.raises(ValueError):
            ln_gamma(z)


class TestExpIntegralEi:
    # value pinned from 30-digit arithmetic; also the capacity kernel at s=1
    def test_frozen_point(self):
        np.testing.assert_allclose(exp_integral_ei(-1.0), -0.21938393439552027,
                                   rtol=1e-14)
        np.testing.assert_allclose(exp_integral_ei(1.0), 1.8951178163559368,
                                   rtol=1e-14)

    @pytest.mark.parametrize("x", [-300.0, -50.0, -12.0, -3.5, -3.0, -1.0,
                                   -0.1, -1e-4, 1e-4, 0.05, 1.0, 5.0, 12.0,
                                   39.0, 41.0, 100.0, 650.0])
    def test_matches_mpmath(self, x):
        want = float(mpmath.ei(x))
        np.testing.assert_allclose(float(exp_integral_ei(x)), want, rtol=5e-13)

    def test_negative_axis_quadrature_oracle(self):
        # Ei(-x) = -int_x^inf exp(-t)/t dt for x > 0
        from scipy.integrate import quad
        for x in (0.2, 1.0, 4.0):
            want, _ = quad(lambda t: math.exp(-t) / t, x, np.inf,
                           epsabs=1e-13, epsrel=1e-12)
            np.testing.assert_allclose(float(exp_integral_ei(-x)), -want, rtol=1e-10)

    def test_array_and_errors(self):
        x = np.array([-2.0, 1.0, 3.0])
        out = exp_integral_ei(x)
        assert out.shape == (3,)
        with pytest.raises(ValueError):
            exp_integral_ei(0.0)
        with pytest.raises(ValueError):
            exp_integral_ei(np.nan)


class TestCosineIntegralCi:
    def test_frozen_point(self):
        np.testing.assert_allclose(cosine_integral_ci(1.0), 0.33740392290096813,
                                   rtol=1e-14)

    @pytest.mark.parametrize("x", [1e-3, 0.05, 0.5, 1.0, 5.0, 15.0, 16.5,
                                   40.0, 200.0, 1e4])
    def test_matches_mpmath(self, x):
        want = float(mpmath.ci(x))
        np.testing.assert_allclose(float(cosine_integral_ci(x)), want,
                                   rtol=5e-13, atol=1e-16)

    def test_requires_positive(self):
        with pytest.raises(ValueError):
            cosine_integral_ci(-1.0)
        with pytest.raises(ValueError):
            cosine_integral_ci(0.0)


class TestExtendedIncompleteGamma:
    def test_reduces_to_upper_gamma(self):
        for alpha, x in [(1.5, 0.0), (2.0, 0.3), (0.7, 2.0)]:
            got = extended_incomplete_gamma(alpha, x, 0.0, 1.0)
            want = float(mpmath.gammainc(alpha, x))
            np.testing.assert_allclose(got, want, rtol=1e-10)

    @pytest.mark.parametrize("alpha,b", [(0.5, 0.2), (1.0, 1.0), (2.5, 3.0)])
    def test_bessel_k_identity(self, alpha, b):
        # int_0^inf t^(a-1) exp(-t - b/t) dt = 2 b^(a/2) K_a(2 sqrt(b))
        got = extended_incomplete_gamma(alpha, 0.0, b, 1.0)
        want = 2.0 * b ** (alpha / 2.0) * float(sp.kv(alpha, 2.0 * math.sqrt(b)))
        np.testing.assert_allclose(got, want, rtol=1e-10)

    @pytest.mark.parametrize("alpha,x,b,beta", [
        (1.2, 0.5, 0.8, 1.0),
        (2.0, 0.0, 1.5, 0.5),
        (0.8, 1.0, 2.0, 2.0),
        (3.5, 0.0, 0.1, 1.5),
        (-0.5, 0.0, 1.0, 2.0),
    ])
    def test_against_high_precision_quadrature(self, alpha, x, b, beta):
        f = lambda t: t ** (alpha - 1) * mpmath.exp(-t - b * t ** (-beta))
        want = float(mpmath.quad(f, [x, 1.0, mpmath.inf] if x < 1 else [x, mpmath.inf]))
        got = extended_incomplete_gamma(alpha, x, b, beta)
        np.testing.assert_allclose(got, want, rtol=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            extended_incomplete_gamma(1.0, -0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            extended_incomplete_gamma(1.0, 0.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            extended_incomplete_gamma(1.0, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            # b=0 and alpha<=0 diverges at the origin
            extended_incomplete_gamma(-1.0, 0.0, 0.0, 1.0)


class TestUpperIncompleteGamma:
    @pytest.mark.parametrize("alpha,x", [(0.5, 0.0), (1.0, 2.0), (3.7, 0.4),
                                         (2.0, 25.0)])
    def test_matches_mpmath(self, alpha, x):
        want = float(mpmath.gammainc(alpha, x))
        np.testing.assert_allclose(upper_incomplete_gamma(alpha, x), want,
                                   rtol=1e-11)

    def test_negative_order_with_positive_cut(self):
        # alpha < 0 is fine when x > 0
        want = float(mpmath.gammainc(-0.5, 1.0))
        np.testing.assert_allclose(upper_incomplete_gamma(-0.5, 1.0), want,
                                   rtol=1e-9)


class TestMittagLeffler:
    @pytest.mark.parametrize("z", [-3.0, -1.0, 0.5, 2.0])
    def test_alpha_one_is_exp(self, z):
        np.testing.assert_allclose(mittag_leffler(z, 1.0), math.exp(z),
                                   rtol=1e-12)

    def test_alpha_two_is_cosh(self):
        np.testing.assert_allclose(mittag_leffler(4.0, 2.0), math.cosh(2.0),
                                   rtol=1e-12)

    def test_beta_two_identity(self):
        z = 1.3
        np.testing.assert_allclose(mittag_leffler(z, 1.0, 2.0),
                                   (math.exp(z) - 1.0) / z, rtol=1e-12)

    def test_half_order_is_scaled_erfc(self):
        z = 0.7
        want = math.exp(z * z) * float(sp.erfc(-z))
        np.testing.assert_allclose(mittag_leffler(z, 0.5), want, rtol=1e-11)


class TestHermiteRule:
    def test_moments_of_gaussian_weight(self):
        x, w = hermite_rule(20)
        np.testing.assert_allclose(w.sum(), math.sqrt(math.pi), rtol=1e-13)
        np.testing.assert_allclose((w * x ** 2).sum(), math.sqrt(math.pi) / 2,
                                   rtol=1e-12)
        np.testing.assert_allclose((w * x).sum(), 0.0, atol=1e-14)

    def test_polynomial_exactness(self):
        # an n-point rule integrates degree 2n-1 polynomials exactly
        x, w = hermite_rule(6)
        got = (w * x ** 10).sum()
        want = float(mpmath.quad(lambda t: t ** 10 * mpmath.exp(-t * t),
                                 [-mpmath.inf, mpmath.inf]))
        np.testing.assert_allclose(got, want, rtol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            hermite_rule(0)
