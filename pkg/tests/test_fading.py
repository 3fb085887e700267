"""Tests for the fading-model catalog.

Independent routes used as oracles: quadrature of each model's density
(``mgf_p_oracle``), central finite differences for the derivative transforms,
closed-form Nakagami/Rayleigh expressions, and parameter-degeneration chains
between models.
"""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from divcap.fading import (
    GNM,
    Rayleigh,
    OneSidedGaussian,
    NakagamiM,
    Weibull,
    ShadowedGNM,
    GeneralizedK,
    KDistribution,
    NakagamiWeibull,
    HyperNakagami,
    Hoyt,
    Rice,
    NakagamiLognormal,
    GenericFoxH,
    rationalize_xi,
    MODEL_REGISTRY,
    build_model,
)

CATALOG = {
    "gnm": GNM(2.0, 2.0, 1.5),
    "rayleigh": Rayleigh(1.0),
    "one_sided_gaussian": OneSidedGaussian(2.0),
    "nakagami_m": NakagamiM(2.5, 1.0),
    "weibull": Weibull(3.0, 1.0),
    "shadowed_gnm": ShadowedGNM(2.0, 2.0, 3.0, 1.0),
    "generalized_k": GeneralizedK(2.0, 3.0, 1.0),
    "k_distribution": KDistribution(1.5, 2.0),
    "nakagami_weibull": NakagamiWeibull(2.0, 3.0, 1.0),
    "hyper_nakagami": HyperNakagami([0.3, 0.7], [1.0, 2.5], [0.8, 1.3]),
    "hoyt": Hoyt(0.5, 1.0),
    "rice": Rice(1.5, 1.0),
    "nakagami_lognormal": NakagamiLognormal(2.0, 0.0, 4.0),
}


def _norm_integral(model):
    val, _ = quad(lambda t: float(model.pdf(t / (1 - t))) / (1 - t) ** 2,
                  0.0, 1.0, epsabs=1e-11, epsrel=1e-9, limit=300)
    return val


class TestDensity:
    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_normalized(self, name):
        np.testing.assert_allclose(_norm_integral(CATALOG[name]), 1.0,
                                   rtol=1e-7)

    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_mean_square_matches_moment(self, name):
        model = CATALOG[name]
        byquad, _ = quad(lambda t: (t / (1 - t)) ** 2 * float(model.pdf(t / (1 - t)))
                         / (1 - t) ** 2, 0.0, 1.0, epsabs=1e-11, epsrel=1e-9,
                         limit=300)
        np.testing.assert_allclose(model.envelope_moment(2.0), byquad, rtol=1e-7)

    def test_vectorized_and_zero(self):
        model = CATALOG["rayleigh"]
        r = np.array([0.0, 0.5, 1.0])
        out = model.pdf(r)
        assert out.shape == (3,)
        assert out[0] == 0.0
        np.testing.assert_allclose(out[1], 2 * 0.5 * math.exp(-0.25), rtol=1e-12)

    def test_one_sided_gaussian_positive_at_origin(self):
        assert CATALOG["one_sided_gaussian"].pdf(0.0) > 0


class TestMgfAgainstQuadrature:
    @pytest.mark.parametrize("name", sorted(CATALOG))
    @pytest.mark.parametrize("p", [1, 2])
    def test_mgf_matches_oracle(self, name, p):
        model = CATALOG[name]
        for s in (0.25, 1.0, 4.0):
            got = float(model.mgf_p(s, p))
            want = model.mgf_p_oracle(s, p)
            np.testing.assert_allclose(got, want, rtol=2e-8)

    @pytest.mark.parametrize("name", sorted(CATALOG))
    @pytest.mark.parametrize("p", [1, 2])
    def test_derivative_matches_finite_difference(self, name, p):
        model = CATALOG[name]
        h = 1e-4
        for s in (0.5, 2.0):
            fd = (float(model.mgf_p(s + h, p)) - float(model.mgf_p(s - h, p))) / (2 * h)
            np.testing.assert_allclose(float(model.dmgf_p(s, p)), fd, rtol=1e-6)

    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_unit_at_zero(self, name):
        model = CATALOG[name]
        # exact 1 at s = 0 and continuity as s -> 0+
        assert float(model.mgf_p(0.0, 2)) == 1.0
        np.testing.assert_allclose(float(model.mgf_p(1e-7, 2)), 1.0, atol=1e-5)

    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_derivative_at_zero_is_minus_moment(self, name):
        model = CATALOG[name]
        np.testing.assert_allclose(float(model.dmgf_p(0.0, 1)),
                                   -model.envelope_moment(1.0), rtol=1e-8)

    def test_rayleigh_closed_values(self):
        model = CATALOG["rayleigh"]
        np.testing.assert_allclose(float(model.mgf_p(1.0, 2)), 0.5, rtol=1e-12)
        np.testing.assert_allclose(float(model.dmgf_p(1.0, 2)), -0.25, rtol=1e-12)

    def test_array_input(self):
        model = CATALOG["shadowed_gnm"]
        s = np.array([0.0, 0.5, 2.0])
        out = model.mgf_p(s, 2)
        assert out.shape == (3,)
        assert out[0] == 1.0
        assert np.all(np.diff(out) < 0)

    def test_negative_s_rejected(self):
        with pytest.raises(ValueError):
            CATALOG["rayleigh"].mgf_p(-1.0, 2)
        with pytest.raises(ValueError):
            CATALOG["rayleigh"].mgf_p(1.0, 3)


class TestDualRoutes:
    def test_nakagami_closed_form_vs_contour(self):
        model = NakagamiM(2.5, 1.3)
        for s in (0.3, 1.0, 5.0):
            np.testing.assert_allclose(float(model.mgf_p(s, 2)),
                                       float(model.mgf_p_contour(s, 2)),
                                       rtol=1e-9)

    @pytest.mark.parametrize("p", [1, 2])
    def test_gnm_meijer_route(self, p):
        model = GNM(2.0, 0.5, 1.0)
        np.testing.assert_allclose(model.mgf_p_meijer(1.2, p),
                                   float(model.mgf_p(1.2, p)), rtol=1e-8)

    @pytest.mark.parametrize("p", [1, 2])
    def test_shadowed_meijer_route(self, p):
        model = ShadowedGNM(2.0, 2.0, 3.0, 1.0)
        np.testing.assert_allclose(model.mgf_p_meijer(0.7, p),
                                   float(model.mgf_p(0.7, p)), rtol=1e-8)


class TestDegenerations:
    S = 1.3

    def test_shadowed_unit_xi_is_generalized_k(self):
        a = ShadowedGNM(2.0, 1.0, 3.0, 1.0)
        b = GeneralizedK(2.0, 3.0, 1.0)
        np.testing.assert_allclose(float(a.mgf_p(self.S, 2)),
                                   float(b.mgf_p(self.S, 2)), rtol=1e-12)

    def test_generalized_k_unit_m_is_k_distribution(self):
        a = GeneralizedK(1.0, 1.5, 2.0)
        b = KDistribution(1.5, 2.0)
        np.testing.assert_allclose(float(a.mgf_p(self.S, 1)),
                                   float(b.mgf_p(self.S, 1)), rtol=1e-12)

    def test_heavy_shadowing_limit_is_gnm(self):
        a = ShadowedGNM(2.0, 2.0, 1e4, 1.5)
        b = GNM(2.0, 2.0, 1.5)
        for p in (1, 2):
            np.testing.assert_allclose(float(a.mgf_p(self.S, p)),
                                       float(b.mgf_p(self.S, p)), rtol=1e-3)

    def test_hoyt_unit_q_is_rayleigh(self):
        np.testing.assert_allclose(float(Hoyt(1.0, 1.0).mgf_p(self.S, 1)),
                                   float(Rayleigh(1.0).mgf_p(self.S, 1)),
                                   rtol=1e-12)

    def test_rice_zero_los_is_rayleigh(self):
        np.testing.assert_allclose(float(Rice(0.0, 1.0).mgf_p(self.S, 1)),
                                   float(Rayleigh(1.0).mgf_p(self.S, 1)),
                                   rtol=1e-12)

    def test_weibull_unit_shape_is_rayleigh(self):
        np.testing.assert_allclose(float(Weibull(1.0, 1.0).mgf_p(self.S, 2)),
                                   float(Rayleigh(1.0).mgf_p(self.S, 2)),
                                   rtol=1e-12)

    def test_singleton_mixture_is_nakagami(self):
        a = HyperNakagami([1.0], [2.5], [1.3])
        b = NakagamiM(2.5, 1.3)
        np.testing.assert_allclose(float(a.mgf_p(self.S, 1)),
                                   float(b.mgf_p(self.S, 1)), rtol=1e-12)


class TestSeriesTruncation:
    def test_hoyt_truncation_drift(self):
        coarse = Hoyt(0.5, 1.0, max_terms=6)
        fine = Hoyt(0.5, 1.0, max_terms=200)
        drift = abs(float(coarse.mgf_p(1.0, 1)) - float(fine.mgf_p(1.0, 1)))
        assert 0 < drift < 1e-2

    def test_rice_truncation_drift(self):
        coarse = Rice(1.5, 1.0, max_terms=4)
        fine = Rice(1.5, 1.0, max_terms=200)
        drift = abs(float(coarse.mgf_p(1.0, 1)) - float(fine.mgf_p(1.0, 1)))
        assert 0 < drift < 0.2


class TestSampling:
    @pytest.mark.parametrize("name", [n for n in sorted(CATALOG)])
    def test_deterministic_given_seed(self, name):
        model = CATALOG[name]
        a = model.sample(np.random.default_rng(7), 64)
        b = model.sample(np.random.default_rng(7), 64)
        np.testing.assert_array_equal(a, b)
        assert np.all(a > 0)

    @pytest.mark.parametrize("name", ["rayleigh", "gnm", "shadowed_gnm",
                                      "hoyt", "rice", "nakagami_lognormal",
                                      "hyper_nakagami"])
    def test_moments_match_analytic(self, name):
        model = CATALOG[name]
        x = model.sample(np.random.default_rng(123), 200_000)
        for k in (1.0, 2.0):
            want = model.envelope_moment(k)
            se = np.std(x**k) / math.sqrt(x.size)
            assert abs(np.mean(x**k) - want) < 4 * se + 1e-9


class TestRationalize:
    @pytest.mark.parametrize("xi,frac", [(0.5, (1, 2)), (2.0, (2, 1)),
                                         (1.25, (5, 4)), (1 / 3, (1, 3)),
                                         (1.0, (1, 1))])
    def test_exact_fractions(self, xi, frac):
        assert rationalize_xi(xi) == frac

    def test_badly_approximable_rejected(self):
        with pytest.raises(ValueError):
            rationalize_xi(math.sqrt(2.0))

    def test_validation(self):
        with pytest.raises(ValueError):
            rationalize_xi(-1.0)


class TestGenericFoxH:
    # p(r) = H^{1,0}_{0,1}[r | ; (1/2, 1/2)] is exactly the unit-power Rayleigh density
    GEN = GenericFoxH(upper=(), lower=((0.5, 0.5),), m=1, n=0)
    RAY = Rayleigh(1.0)

    def test_density_matches(self):
        r = np.array([0.3, 1.0, 2.5])
        np.testing.assert_allclose(self.GEN.pdf(r), self.RAY.pdf(r), rtol=1e-9)

    @pytest.mark.parametrize("p", [1, 2])
    def test_mgf_matches(self, p):
        for s in (0.25, 1.0, 4.0):
            np.testing.assert_allclose(float(self.GEN.mgf_p(s, p)),
                                       float(self.RAY.mgf_p(s, p)), rtol=1e-8)

    @pytest.mark.parametrize("p", [1, 2])
    def test_derivative_matches_finite_difference(self, p):
        h = 1e-4
        fd = (float(self.GEN.mgf_p(1 + h, p)) - float(self.GEN.mgf_p(1 - h, p))) / (2 * h)
        np.testing.assert_allclose(float(self.GEN.dmgf_p(1.0, p)), fd, rtol=1e-6)

    def test_no_sampling_route(self):
        with pytest.raises(NotImplementedError):
            self.GEN.sample(np.random.default_rng(0), 4)


class TestValidationAndRegistry:
    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            GNM(0.2, 1.0, 1.0)
        with pytest.raises(ValueError):
            GNM(1.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            GNM(1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            Hoyt(0.0, 1.0)
        with pytest.raises(ValueError):
            Hoyt(1.5, 1.0)
        with pytest.raises(ValueError):
            Rice(-1.0, 1.0)
        with pytest.raises(ValueError):
            ShadowedGNM(1.0, 1.0, 0.0, 1.0)

    def test_mixture_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            HyperNakagami([0.3, 0.6], [1.0, 2.0], [1.0, 1.0])
        with pytest.raises(ValueError):
            HyperNakagami([0.5, -0.5, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 1.0])

    def test_registry_round_trip(self):
        model = build_model("nakagami_m", m=2.0, omega=1.5)
        assert isinstance(model, NakagamiM)
        assert model.omega == 1.5
        assert set(MODEL_REGISTRY) >= {"rayleigh", "weibull", "shadowed_gnm",
                                       "hoyt", "rice", "nakagami_lognormal"}

    def test_registry_errors(self):
        with pytest.raises(ValueError):
            build_model("no_such_model")
        with pytest.raises(ValueError):
            build_model("rayleigh", bogus=1.0)
