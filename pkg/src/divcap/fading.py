"""Fading-envelope models and their power moment generating functions.

Every model exposes the density of the envelope R, the transforms
``mgf_p(s, p) = E exp(-s R^p)`` and its s-derivative for p in {1, 2}, and a
sampler.  The transforms are what the capacity integrals consume: p = 2
corresponds to maximal-ratio combining, p = 1 to equal-gain combining.

The core analytic route expresses each transform as a Mellin-Barnes integral
(a Fox-H function) evaluated by ``divcap.mellin``.  A gamma-type base model
covers Rayleigh, one-sided Gaussian, Nakagami-m and Weibull envelopes; gamma
shadowing of its mean power covers the K family; Hoyt, Rice and
Nakagami-lognormal envelopes are (countable or quadrature) mixtures of
Nakagami components; arbitrary densities given directly as a Fox-H spec are
supported without a sampling route.
"""
from __future__ import annotations

import math

import numpy as np

from .mellin import MellinBarnesSpec, eval_fox_h_batch, eval_meijer_g, meijer_from_fox
from .specfun import extended_incomplete_gamma, hermite_rule

__all__ = [
    "FadingModel",
    "GNM",
    "Rayleigh",
    "OneSidedGaussian",
    "NakagamiM",
    "Weibull",
    "ShadowedGNM",
    "GeneralizedK",
    "KDistribution",
    "NakagamiWeibull",
    "HyperNakagami",
    "Hoyt",
    "Rice",
    "NakagamiLognormal",
    "GenericFoxH",
    "rationalize_xi",
    "MODEL_REGISTRY",
    "build_model",
]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def rationalize_xi(xi: float, eps: float = 1e-2) -> tuple[int, int]:
    """Smallest-denominator fraction k/l with |k/l - xi| < eps / l**2.

    The weighting by 1/l**2 prefers genuinely small denominators; exact
    rationals (0.5, 2.0, 1.25, ...) are recovered exactly.
    """
    _require(xi > 0, "xi must be positive")
    for l in range(1, 10001):
        k = round(xi * l)
        if k >= 1 and abs(k / l - xi) < eps / l**2:
            g = math.gcd(k, l)
            return k // g, l // g
    raise ValueError(f"no small rational approximation to xi={xi}")


class FadingModel:
    """Common interface: density, power MGFs, moments, sampling.

    Subclasses override ``pdf``, ``mgf_p``, ``dmgf_p`` and ``sample``;
    quadrature fallbacks here provide ``mgf_p_oracle`` (an independent check
    route that never touches the contour machinery) and envelope moments.
    """

    name = "fading"

    def pdf(self, r):
        raise NotImplementedError

    def mgf_p(self, s, p: int = 2):
        raise NotImplementedError

    def dmgf_p(self, s, p: int = 2):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    # -- quadrature routes -------------------------------------------------
    def mgf_p_oracle(self, s: float, p: int = 2) -> float:
        """E exp(-s R^p) by adaptive quadrature of the density."""
        from scipy.integrate import quad

        _require(s >= 0, "s must be nonnegative")
        _require(p in (1, 2), "p must be 1 or 2")

        def f(t):
            r = t / (1.0 - t)
            return math.exp(-s * r**p) * float(self.pdf(r)) / (1.0 - t) ** 2

        val, _ = quad(f, 0.0, 1.0, epsabs=1e-12, epsrel=1e-10, limit=300)
        return val

    def envelope_moment(self, k: float) -> float:
        """E R^k by adaptive quadrature of the density."""
        from scipy.integrate import quad

        def f(t):
            r = t / (1.0 - t)
            return r**k * float(self.pdf(r)) / (1.0 - t) ** 2

        val, _ = quad(f, 0.0, 1.0, epsabs=1e-12, epsrel=1e-10, limit=300)
        return val

    def mean_power(self) -> float:
        return self.envelope_moment(2.0)

    def _check_s(self, s) -> np.ndarray:
        arr = np.asarray(s, dtype=float)
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("s must be finite and nonnegative")
        return arr

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"


class GNM(FadingModel):
    """Gamma-type envelope R = theta * Y**(1/(2 xi)) with Y ~ Gamma(m).

    Density: p(r) = (2 xi / Gamma(m)) r^(2 xi m - 1) (beta/omega)^(xi m)
    exp(-(beta/omega)^xi r^(2 xi)), where beta = Gamma(m + 1/xi)/Gamma(m)
    normalizes E R^2 = omega.  m = shape, xi = power exponent, omega = mean
    square.  Special cases: xi=1 Nakagami-m (m=1 Rayleigh, m=0.5 one-sided
    Gaussian), m=1 Weibull.
    """

    name = "gnm"

    def __init__(self, m: float, xi: float, omega: float):
        _require(m >= 0.5, "m must be at least 0.5")
        _require(xi > 0, "xi must be positive")
        _require(omega > 0, "omega must be positive")
        self.m = float(m)
        self.xi = float(xi)
        self.omega = float(omega)
        self.beta = math.exp(math.lgamma(self.m + 1.0 / self.xi)
                             - math.lgamma(self.m))
        self.theta2 = self.omega / self.beta  # theta**2

    def pdf(self, r):
        r_arr = np.asarray(r, dtype=float)
        m, xi = self.m, self.xi
        rate = self.theta2 ** (-xi)  # (beta/omega)^xi
        k = 2.0 * xi * m - 1.0
        lead = math.log(2.0 * xi) - math.lgamma(m) + m * math.log(rate)
        flat = np.atleast_1d(r_arr)
        out = np.zeros(flat.shape)
        pos = flat > 0
        rv = flat[pos]
        out[pos] = np.exp(lead + k * np.log(rv) - rate * rv ** (2.0 * xi))
        if np.any(flat == 0) and k <= 0:
            out[flat == 0] = math.exp(lead) if k == 0 else math.inf
        return out.reshape(r_arr.shape) if r_arr.ndim else float(out[0])

    def _spec(self, p: int, derivative: bool) -> MellinBarnesSpec:
        a0 = 0.0 if derivative else 1.0
        return MellinBarnesSpec(upper=((a0, 2.0),),
                                lower=((self.m, p / self.xi),),
                                m=1, n=1, z=1.0)

    def mgf_p(self, s, p: int = 2):
        _require(p in (1, 2), "p must be 1 or 2")
        s = self._check_s(s)
        out = np.ones(s.shape if s.ndim else (1,))
        pos = (np.atleast_1d(s) > 0)
        sv = np.atleast_1d(s)[pos]
        if sv.size:
            if self.xi == 1.0 and p == 2:
                vals = (1.0 + self.theta2 * sv) ** (-self.m)
            else:
                z = self.theta2 ** (-p) * sv ** (-2.0)
                ls = math.log(2.0) - math.lgamma(self.m)
                vals = eval_fox_h_batch(self._spec(p, False), z, ln_scale=ls)
            out[pos] = vals
        return out.reshape(s.shape) if s.ndim else float(out[0])

    def dmgf_p(self, s, p: int = 2):
        _require(p in (1, 2), "p must be 1 or 2")
        s = self._check_s(s)
        out = np.empty(s.shape if s.ndim else (1,))
        flat = np.atleast_1d(s)
        pos = flat > 0
        if np.any(~pos):
            out[~pos] = -self.envelope_moment(float(p))
        sv = flat[pos]
        if sv.size:
            if self.xi == 1.0 and p == 2:
                vals = -self.m * self.theta2 * (1.0 + self.theta2 * sv) ** (-self.m - 1.0)
            else:
                z = self.theta2 ** (-p) * sv ** (-2.0)
                ls = math.log(2.0) - math.lgamma(self.m) - np.log(sv)
                vals = -eval_fox_h_batch(self._spec(p, True), z, ln_scale=ls)
            out[pos] = vals
        return out.reshape(s.shape) if s.ndim else float(out[0])

    def mgf_p_contour(self, s, p: int = 2):
        """Always-contour variant of ``mgf_p`` (ignores closed-form shortcuts)."""
        s = self._check_s(s)
        sv = np.atleast_1d(s)
        _require(bool(np.all(sv > 0)), "contour route needs s > 0")
        z = self.theta2 ** (-p) * sv ** (-2.0)
        ls = math.log(2.0) - math.lgamma(self.m)
        vals = eval_fox_h_batch(self._spec(p, False), z, ln_scale=ls)
        return vals.reshape(s.shape) if s.ndim else float(vals[0])

    def mgf_p_meijer(self, s: float, p: int = 2) -> float:
        """Secondary route: rationalize xi, reduce to a Meijer-G and evaluate.

        Exact when xi is rational with a small denominator; otherwise xi is
        replaced by its ``rationalize_xi`` approximation.
        """
        _require(p in (1, 2), "p must be 1 or 2")
        s = float(s)
        _require(s > 0, "s must be positive")
        k, l = rationalize_xi(self.xi)
        spec = MellinBarnesSpec(upper=((1.0, 2.0),),
                                lower=((self.m, p * l / k),), m=1, n=1,
                                z=self.theta2 ** (-p) * s ** (-2.0))
        gspec, const = meijer_from_fox(spec)
        ls = math.log(2.0) - math.lgamma(self.m) + math.log(const)
        val, _ = eval_meijer_g(gspec, ln_scale=ls)
        return val

    def envelope_moment(self, k: float) -> float:
        return (self.theta2 ** (k / 2.0)
                * math.exp(math.lgamma(self.m + k / (2.0 * self.xi))
                           - math.lgamma(self.m)))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        y = rng.standard_gamma(self.m, size)
        return math.sqrt(self.theta2) * y ** (1.0 / (2.0 * self.xi))


class Rayleigh(GNM):
    name = "rayleigh"

    def __init__(self, omega: float = 1.0):
        super().__init__(1.0, 1.0, omega)


class OneSidedGaussian(GNM):
    name = "one_sided_gaussian"

    def __init__(self, omega: float = 1.0):
        super().__init__(0.5, 1.0, omega)


class NakagamiM(GNM):
    name = "nakagami_m"

    def __init__(self, m: float, omega: float = 1.0):
        super().__init__(m, 1.0, omega)


class Weibull(GNM):
    name = "weibull"

    def __init__(self, xi: float, omega: float = 1.0):
        super().__init__(1.0, xi, omega)


class ShadowedGNM(FadingModel):
    """Gamma-type envelope whose mean power is itself gamma distributed.

    R | w follows ``GNM(m, xi, w)`` and w ~ Gamma(m_s, omega_s/m_s), so
    E R^2 = omega_s.  Covers the K family: xi = 1 is generalized-K, further
    m = 1 the K distribution; m = 1 with free xi is Weibull-gamma.
    """

    name = "shadowed_gnm"

    def __init__(self, m: float, xi: float, m_s: float, omega_s: float):
        _require(m >= 0.5, "m must be at least 0.5")
        _require(xi > 0, "xi must be positive")
        _require(m_s > 0, "m_s must be positive")
        _require(omega_s > 0, "omega_s must be positive")
        self.m = float(m)
        self.xi = float(xi)
        self.m_s = float(m_s)
        self.omega_s = float(omega_s)
        self.beta = math.exp(math.lgamma(self.m + 1.0 / self.xi)
                             - math.lgamma(self.m))
        self.rate = self.beta * self.m_s / self.omega_s  # A

    def pdf(self, r):
        r_arr = np.asarray(r, dtype=float)
        m, xi, m_s = self.m, self.xi, self.m_s
        lead = (math.log(2 * xi) - math.lgamma(m) - math.lgamma(m_s)
                + xi * m * math.log(self.rate))
        out = np.zeros(r_arr.shape if r_arr.ndim else (1,))
        flat = np.atleast_1d(r_arr)
        for i, ri in enumerate(flat):
            if ri <= 0:
                continue
            b = (self.rate * ri * ri) ** xi
            tail = extended_incomplete_gamma(m_s - xi * m, 0.0, b, xi)
            out[i] = math.exp(lead + (2 * xi * m - 1) * math.log(ri)) * tail
        return out.reshape(r_arr.shape) if r_arr.ndim else float(out[0])

    def _spec(self, p: int, derivative: bool) -> MellinBarnesSpec:
        a0 = 0.0 if derivative else 1.0
        return MellinBarnesSpec(upper=((a0, 2.0),),
                                lower=((self.m_s, float(p)), (self.m, p / self.xi)),
                                m=2, n=1, z=1.0)

    def mgf_p(self, s, p: int = 2):
        _require(p in (1, 2), "p must be 1 or 2")
        s = self._check_s(s)
        out = np.ones(s.shape if s.ndim else (1,))
        flat = np.atleast_1d(s)
        pos = flat > 0
        sv = flat[pos]
        if sv.size:
            z = self.rate**p * sv ** (-2.0)
            ls = math.log(2.0) - math.lgamma(self.m_s) - math.lgamma(self.m)
            out[pos] = eval_fox_h_batch(self._spec(p, False), z, ln_scale=ls)
        return out.reshape(s.shape) if s.ndim else float(out[0])

    def dmgf_p(self, s, p: int = 2):
        _require(p in (1, 2), "p must be 1 or 2")
        s = self._check_s(s)
        out = np.empty(s.shape if s.ndim else (1,))
        flat = np.atleast_1d(s)
        pos = flat > 0
        if np.any(~pos):
            out[~pos] = -self.envelope_moment(float(p))
        sv = flat[pos]
        if sv.size:
            z = self.rate**p * sv ** (-2.0)
            ls = (math.log(2.0) - math.lgamma(self.m_s) - math.lgamma(self.m)
                  - np.log(sv))
            out[pos] = -eval_fox_h_batch(self._spec(p, True), z, ln_scale=ls)
        return out.reshape(s.shape) if s.ndim else float(out[0])

    def mgf_p_meijer(self, s: float, p: int = 2) -> float:
        """Secondary route through the Meijer-G reduction (rationalized xi)."""
        _require(p in (1, 2), "p must be 1 or 2")
        s = float(s)
        _require(s > 0, "s must be positive")
        k, l = rationalize_xi(self.xi)
        spec = MellinBarnesSpec(upper=((1.0, 2.0),),
                                lower=((self.m_s, float(p)), (self.m, p * l / k)),
                                m=2, n=1, z=self.rate**p * s ** (-2.0))
        gspec, const = meijer_from_fox(spec)
        ls = (math.log(2.0) - math.lgamma(self.m_s) - math.lgamma(self.m)
              + math.log(const))
        val, _ = eval_meijer_g(gspec, ln_scale=ls)
        return val

    def envelope_moment(self, k: float) -> float:
        half = k / 2.0
        return (self.rate ** (-half)
                * math.exp(math.lgamma(self.m_s + half) - math.lgamma(self.m_s)
                           + math.lgamma(self.m + half / self.xi) - math.lgamma(self.m)))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        w = rng.gamma(self.m_s, self.omega_s / self.m_s, size)
        y = rng.standard_gamma(self.m, size)
        return np.sqrt(w / self.beta) * y ** (1.0 / (2.0 * self.xi))


class GeneralizedK(ShadowedGNM):
    name = "generalized_k"

    def __init__(self, m: float, m_s: float, omega_s: float = 1.0):
        super().__init__(m, 1.0, m_s, omega_s)


class KDistribution(ShadowedGNM):
    name = "k_distribution"

    def __init__(self, m_s: float, omega_s: float = 1.0):
        super().__init__(1.0, 1.0, m_s, omega_s)


class NakagamiWeibull(ShadowedGNM):
    name = "nakagami_weibull"

    def __init__(self, xi: float, m_s: float, omega_s: float = 1.0):
        super().__init__(1.0, xi, m_s, omega_s)


class _NakagamiMixture(FadingModel):
    """Weighted Nakagami components; analytic routes are weighted sums."""

    def __init__(self, weights, shapes, omegas):
        w = np.asarray(weights, dtype=float)
        # truncated tails carry no mass: renormalize so the mixture is a
        # proper density at any truncation level
        self._weights = w / w.sum()
        self._components = [NakagamiM(mk, ok) for mk, ok in zip(shapes, omegas)]

    def pdf(self, r):
        r = np.asarray(r, dtype=float)
        out = sum(w * np.asarray(c.pdf(r))
                  for w, c in zip(self._weights, self._components))
        return out if r.ndim else float(out)

    def mgf_p(self, s, p: int = 2):
        s_arr = self._check_s(s)
        out = sum(w * np.asarray(c.mgf_p(s_arr, p))
                  for w, c in zip(self._weights, self._components))
        # unit total mass holds exactly, not just to the rounding of the
        # weight sum
        out = np.where(s_arr == 0.0, 1.0, out)
        return out if s_arr.ndim else float(out)

    def dmgf_p(self, s, p: int = 2):
        s_arr = self._check_s(s)
        out = sum(w * np.asarray(c.dmgf_p(s_arr, p))
                  for w, c in zip(self._weights, self._components))
        return out if s_arr.ndim else float(out)

    def envelope_moment(self, k: float) -> float:
        return float(sum(w * c.envelope_moment(k)
                         for w, c in zip(self._weights, self._components)))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        p = self._weights / self._weights.sum()
        idx = rng.choice(len(self._components), size=size, p=p)
        y = rng.standard_gamma(np.array([c.m for c in self._components])[idx], size)
        th2 = np.array([c.theta2 for c in self._components])[idx]
        return np.sqrt(th2 * y)


class HyperNakagami(_NakagamiMixture):
    """Finite Nakagami mixture; weights must sum to one."""

    name = "hyper_nakagami"

    def __init__(self, weights, m, omega):
        w = np.asarray(weights, dtype=float)
        shapes = np.asarray(m, dtype=float)
        omegas = np.asarray(omega, dtype=float)
        _require(w.ndim == 1 and w.shape == shapes.shape == omegas.shape,
                 "weights, m and omega must be equal-length sequences")
        _require(bool(np.all(w > 0)), "weights must be positive")
        _require(abs(w.sum() - 1.0) < 1e-9, "weights must sum to 1")
        _require(bool(np.all(shapes >= 0.5)), "m entries must be at least 0.5")
        _require(bool(np.all(omegas > 0)), "omega entries must be positive")
        super().__init__(w, shapes, omegas)


class Hoyt(_NakagamiMixture):
    """Hoyt (Nakagami-q) envelope: two independent zero-mean Gaussians with
    axial ratio q.

    The density is a countable Nakagami mixture with odd integer shapes
    2k+1 and geometrically decaying weights; ``max_terms`` bounds the
    truncation.  Small q (near-degenerate ellipse) needs many terms.
    """

    name = "hoyt"

    def __init__(self, q_hoyt: float, omega: float = 1.0, max_terms: int = 200):
        _require(0 < q_hoyt <= 1, "q_hoyt must lie in (0, 1]")
        _require(omega > 0, "omega must be positive")
        _require(max_terms >= 1, "max_terms must be positive")
        self.q = float(q_hoyt)
        self.omega = float(omega)
        q2 = self.q * self.q
        rho = (1.0 - q2) / (1.0 + q2)
        lead = 2.0 * self.q / (1.0 + q2)
        rate = (1.0 + q2) ** 2 / (4.0 * q2 * self.omega)  # shape/omega per term
        weights, shapes, omegas = [], [], []
        psi = 1.0
        for k in range(max_terms):
            wk = lead * psi
            weights.append(wk)
            shapes.append(2.0 * k + 1.0)
            omegas.append((2.0 * k + 1.0) / rate)
            if rho > 0 and wk / (1.0 - rho * rho) < 1e-13:
                break
            if rho == 0.0:
                break
            psi *= rho * rho * (2 * k + 1) / (2 * k + 2)
        super().__init__(weights, shapes, omegas)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        q2 = self.q * self.q
        sx = math.sqrt(self.omega / (1.0 + q2))
        sy = math.sqrt(self.omega * q2 / (1.0 + q2))
        x = rng.normal(0.0, sx, size)
        y = rng.normal(0.0, sy, size)
        return np.hypot(x, y)


class Rice(_NakagamiMixture):
    """Rice envelope with line-of-sight amplitude ratio n (K-factor n^2).

    Poisson mixture of Nakagami components with integer shapes; ``max_terms``
    bounds the truncation of the Poisson weights.
    """

    name = "rice"

    def __init__(self, n_rice: float, omega: float = 1.0, max_terms: int = 200):
        _require(n_rice >= 0, "n_rice must be nonnegative")
        _require(omega > 0, "omega must be positive")
        _require(max_terms >= 1, "max_terms must be positive")
        self.n = float(n_rice)
        self.omega = float(omega)
        lam = self.n * self.n
        rate = (1.0 + lam) / self.omega
        weights, shapes, omegas = [], [], []
        pk = math.exp(-lam)
        total = 0.0
        for k in range(max_terms):
            weights.append(pk)
            shapes.append(k + 1.0)
            omegas.append((k + 1.0) / rate)
            total += pk
            if total > 1.0 - 1e-14:
                break
            pk *= lam / (k + 1.0)
        super().__init__(weights, shapes, omegas)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        lam = self.n * self.n
        nu = math.sqrt(self.omega * lam / (1.0 + lam))
        sigma = math.sqrt(self.omega / (2.0 * (1.0 + lam)))
        x = rng.normal(nu, sigma, size)
        y = rng.normal(0.0, sigma, size)
        return np.hypot(x, y)


class NakagamiLognormal(_NakagamiMixture):
    """Nakagami envelope whose mean power is lognormally shadowed.

    The analytic routes discretize the lognormal mixing density with a
    20-node Gauss-Hermite rule (a small, fixed bias well below the Monte
    Carlo tolerances used here); sampling draws the exact lognormal.
    """

    name = "nakagami_lognormal"

    _NODES = 20

    def __init__(self, m: float, mu_db: float, sigma_db: float):
        _require(m >= 0.5, "m must be at least 0.5")
        _require(sigma_db > 0, "sigma_db must be positive")
        self.m = float(m)
        self.mu_db = float(mu_db)
        self.sigma_db = float(sigma_db)
        x, w = hermite_rule(self._NODES)
        omegas = 10.0 ** ((math.sqrt(2.0) * self.sigma_db * x + self.mu_db) / 10.0)
        weights = w / math.sqrt(math.pi)
        super().__init__(weights, np.full(self._NODES, self.m), omegas)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        g = rng.standard_normal(size)
        w = 10.0 ** ((self.sigma_db * g + self.mu_db) / 10.0)
        y = rng.standard_gamma(self.m, size)
        return np.sqrt(w * y / self.m)


class GenericFoxH(FadingModel):
    """Envelope given directly by a Fox-H density p(r) = norm * H[scale * r].

    ``upper``, ``lower``, ``m``, ``n`` follow the Mellin-Barnes spec layout.
    The power MGFs come from the Mellin pairing with exp(-s r^p), which
    prepends one upper parameter; there is no sampling route.
    """

    name = "generic_fox_h"

    def __init__(self, upper, lower, m: int, n: int,
                 scale: float = 1.0, norm: float = 1.0):
        _require(scale > 0, "scale must be positive")
        _require(norm > 0, "norm must be positive")
        self._template = MellinBarnesSpec(upper=tuple(upper), lower=tuple(lower),
                                          m=m, n=n, z=1.0)
        self.scale = float(scale)
        self.norm = float(norm)

    def pdf(self, r):
        r = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r)
        out = np.zeros(flat.shape)
        pos = flat > 0
        if np.any(pos):
            out[pos] = self.norm * eval_fox_h_batch(self._template,
                                                    self.scale * flat[pos])
        return out.reshape(r.shape) if r.ndim else float(out[0])

    def _mgf_spec(self, p: int, derivative: bool) -> MellinBarnesSpec:
        t = self._template
        a0 = -1.0 / p if derivative else 1.0 - 1.0 / p
        return MellinBarnesSpec(upper=((a0, 1.0 / p),) + t.upper, lower=t.lower,
                                m=t.m, n=t.n + 1, z=1.0)

    def mgf_p(self, s, p: int = 2):
        _require(p in (1, 2), "p must be 1 or 2")
        s = self._check_s(s)
        out = np.ones(s.shape if s.ndim else (1,))
        flat = np.atleast_1d(s)
        pos = flat > 0
        sv = flat[pos]
        if sv.size:
            z = self.scale * sv ** (-1.0 / p)
            ls = math.log(self.norm / p) - np.log(sv) / p
            out[pos] = eval_fox_h_batch(self._mgf_spec(p, False), z, ln_scale=ls)
        return out.reshape(s.shape) if s.ndim else float(out[0])

    def dmgf_p(self, s, p: int = 2):
        _require(p in (1, 2), "p must be 1 or 2")
        s = self._check_s(s)
        out = np.empty(s.shape if s.ndim else (1,))
        flat = np.atleast_1d(s)
        pos = flat > 0
        if np.any(~pos):
            out[~pos] = -self.envelope_moment(float(p))
        sv = flat[pos]
        if sv.size:
            z = self.scale * sv ** (-1.0 / p)
            ls = math.log(self.norm / p) - (p + 1.0) / p * np.log(sv)
            out[pos] = -eval_fox_h_batch(self._mgf_spec(p, True), z, ln_scale=ls)
        return out.reshape(s.shape) if s.ndim else float(out[0])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError("a bare Fox-H density has no sampling route")


MODEL_REGISTRY: dict[str, type] = {
    cls.name: cls
    for cls in (GNM, Rayleigh, OneSidedGaussian, NakagamiM, Weibull,
                ShadowedGNM, GeneralizedK, KDistribution, NakagamiWeibull,
                HyperNakagami, Hoyt, Rice, NakagamiLognormal)
}


def build_model(name: str, **params) -> FadingModel:
    """Instantiate a registered model by its snake_case name."""
    try:
        cls = MODEL_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(MODEL_REGISTRY))
        raise ValueError(f"unknown fading model {name!r}; known: {known}") from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for model {name!r}: {exc}") from None
