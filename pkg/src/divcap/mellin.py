"""Numerical Fox-H and Meijer-G evaluation by Mellin-Barnes contour integration.

A spec holds the two gamma-parameter lists of the integrand

    K(s) = prod_{j<=m} Gamma(b_j + beta_j s) * prod_{i<=n} Gamma(1 - a_i - alpha_i s)
         / [prod_{i>n} Gamma(a_i + alpha_i s) * prod_{j>m} Gamma(1 - b_j - beta_j s)]

and the function value is (1/2 pi i) Int K(s) z^{-s} ds along a contour that
separates the two pole families.  For real parameters the kernel is
conjugate-symmetric, so only the upper half of the contour is evaluated and
the value (1/pi) Im Int_0^inf f(u) du is real by construction.

When the exponential-decay balance of the kernel vanishes (sum of numerator
coefficients equals the denominator side), a vertical line decays only
algebraically; the contour rays are then tilted toward the pole-free
half-plane, which restores exp(-const * u * log u) decay.  All gamma factors
are accumulated as sums of ln_gamma values and exponentiated once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .specfun import ln_gamma

__all__ = [
    "MellinBarnesSpec",
    "ContourPlan",
    "XiCoefficients",
    "EmptyStripError",
    "ContourError",
    "ConvergenceError",
    "convergence_strip",
    "plan_contour",
    "eval_fox_h",
    "eval_fox_h_batch",
    "eval_meijer_g",
    "gauss_multiplication_expand",
    "meijer_from_fox",
]


class EmptyStripError(ValueError):
    """The two pole families overlap: no valid contour abscissa exists."""


class ContourError(ValueError):
    """A supplied contour plan is unusable (off-strip abscissa, bad geometry)."""


class ConvergenceError(RuntimeError):
    """The truncated contour integral failed to settle within its budget."""


@dataclass(frozen=True)
class MellinBarnesSpec:
    """Parameter lists, pole-split counts and positive real argument.

    upper : tuple of (a_i, alpha_i); the first ``n`` produce numerator factors
        Gamma(1 - a - alpha s), the rest denominator factors Gamma(a + alpha s).
    lower : tuple of (b_j, beta_j); the first ``m`` produce numerator factors
        Gamma(b + beta s), the rest denominator factors Gamma(1 - b - beta s).
    """

    upper: tuple[tuple[float, float], ...]
    lower: tuple[tuple[float, float], ...]
    m: int
    n: int
    z: float

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple((float(a), float(al)) for a, al in self.upper))
        object.__setattr__(self, "lower", tuple((float(b), float(be)) for b, be in self.lower))
        if not (0 <= self.m <= len(self.lower)):
            raise ValueError(f"m={self.m} out of range for {len(self.lower)} lower params")
        if not (0 <= self.n <= len(self.upper)):
            raise ValueError(f"n={self.n} out of range for {len(self.upper)} upper params")
        for _, coef in (*self.upper, *self.lower):
            if coef <= 0:
                raise ValueError("gamma-argument coefficients must be positive")
        if not (self.z > 0 and math.isfinite(self.z)):
            raise ValueError(f"argument must be a positive real, got {self.z}")

    def with_argument(self, z: float) -> "MellinBarnesSpec":
        return replace(self, z=float(z))

    @property
    def decay_exponent(self) -> float:
        """Coefficient of -pi |Im s| / 2 in the kernel's vertical decay."""
        up = sum(al for _, al in self.upper[: self.n]) - sum(al for _, al in self.upper[self.n:])
        lo = sum(be for _, be in self.lower[: self.m]) - sum(be for _, be in self.lower[self.m:])
        return up + lo

    @property
    def log_slope(self) -> float:
        """Coefficient of s*log(s) growth in log K; sets the oscillation rate."""
        return sum(be for _, be in self.lower) - sum(al for _, al in self.upper)

    @property
    def is_meijer(self) -> bool:
        return all(c == 1.0 for _, c in (*self.upper, *self.lower))


@dataclass(frozen=True)
class XiCoefficients:
    """The list x/n, (x+1)/n, ..., (x+n-1)/n from the gamma multiplication formula."""

    x: float
    n: int
    values: tuple[float, ...]


@dataclass(frozen=True)
class ContourPlan:
    abscissa: float
    half_length: float
    node_count: int
    strip: tuple[float, float]
    tilt: float = 0.0

    def __post_init__(self):
        if self.node_count < 64 or self.node_count % 2:
            raise ValueError("node_count must be even and at least 64")
        if not (self.half_length > 0):
            raise ValueError("half_length must be positive")
        if abs(self.tilt) > 1.2:
            raise ValueError("tilt angle out of range")


def convergence_strip(spec: MellinBarnesSpec) -> tuple[float, float]:
    """Abscissa interval separating the left and right pole families.

    Left family (numerator lower gammas): s = -(b_j + k)/beta_j; right family
    (numerator upper gammas): s = (1 - a_i + k)/alpha_i.  Raises
    EmptyStripError when the interval is empty.
    """
    lo = -math.inf
    for b, be in spec.lower[: spec.m]:
        lo = max(lo, -b / be)
    hi = math.inf
    for a, al in spec.upper[: spec.n]:
        hi = min(hi, (1.0 - a) / al)
    if lo >= hi:
        raise EmptyStripError(f"pole families overlap: ({lo}, {hi})")
    return (lo, hi)


def _abscissa_candidates(strip: tuple[float, float], ln_z: float) -> np.ndarray:
    lo, hi = strip
    if math.isinf(lo) and math.isinf(hi):
        w = 8.0 + abs(ln_z)
        return np.linspace(-w, w, 17)
    if math.isinf(hi):
        lo_w, hi_w = lo + 0.05, lo + 4.0 + 2.0 * abs(ln_z)
    elif math.isinf(lo):
        lo_w, hi_w = hi - 4.0 - 2.0 * abs(ln_z), hi - 0.05
    else:
        margin = min(0.05, 0.25 * (hi - lo))
        lo_w, hi_w = lo + margin, hi - margin
    cands = set(np.linspace(lo_w, hi_w, 9).tolist())
    d, span = 0.05, hi_w - lo_w
    while d < 0.5 * span:  # resolve optima hugging either pole family
        cands.add(lo_w + d)
        cands.add(hi_w - d)
        d *= 2.0
    return np.array(sorted(cands))


def _pick_abscissa(shape, strip: tuple[float, float], ln_z: float) -> float:
    """Abscissa minimizing the near-axis integrand magnitude |K(c) z^-c|.

    Cancellation in the oscillatory integral is set by the ratio of the
    integrand scale to the answer, so the contour is anchored where the
    kernel (sampled slightly off the real axis to dodge denominator poles
    and zeros) times z^-c is smallest.
    """
    cands = _abscissa_candidates(strip, ln_z)
    f = np.real(_kernel_ln(shape, cands + 0.5j)) - cands * ln_z
    return float(cands[int(np.argmin(f))])


def _ln_z_rep(ln_z: float) -> float:
    # quantize to bucket midpoints so repeated nearby arguments share a grid
    return 2.0 * math.floor(0.5 * ln_z) + 1.0


def _pick_tilt(spec: MellinBarnesSpec, ln_z_max_abs: float) -> float:
    a_star = spec.decay_exponent
    if a_star > 1e-9:
        return 0.0
    if a_star < -1e-9:
        raise ConvergenceError("kernel grows exponentially on every vertical line")
    slope = spec.log_slope
    if abs(slope) < 1e-9:
        raise ConvergenceError("kernel has no decay direction (balanced coefficients)")
    # keep the transient growth exp(|ln z| sin(t) u - |slope| t u ln u) small
    theta = min(0.3, max(0.02, 2.0 * math.exp(1.0 - ln_z_max_abs / abs(slope)) / abs(slope)))
    return theta if slope < 0 else -theta


def plan_contour(spec: MellinBarnesSpec, node_count: int = 256) -> ContourPlan:
    """Default contour for a spec: abscissa inside the strip, tilt as needed."""
    strip = convergence_strip(spec)
    ln_z = math.log(spec.z)
    c = _pick_abscissa(_kernel_shape(spec), strip, _ln_z_rep(ln_z))
    tilt = _pick_tilt(spec, abs(ln_z))
    a_star = spec.decay_exponent
    if a_star > 1e-9:
        half = max(16.0, 2.0 / (a_star * math.pi) * 46.0)  # exp(-46) ~ 1e-20
    else:
        half = 64.0
    return ContourPlan(abscissa=c, half_length=half, node_count=node_count,
                       strip=strip, tilt=tilt)


# ---------------------------------------------------------------------------
# contour grids

_GL_POINTS = 24
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_POINTS)


def _kernel_shape(spec: MellinBarnesSpec):
    return (spec.upper, spec.lower, spec.m, spec.n)


def _kernel_ln(shape, s: np.ndarray) -> np.ndarray:
    upper, lower, m, n = shape
    tot = np.zeros(s.shape, dtype=complex)
    for j, (b, be) in enumerate(lower):
        if j < m:
            tot += ln_gamma(b + be * s)
        else:
            tot -= ln_gamma(1.0 - b - be * s)
    for i, (a, al) in enumerate(upper):
        if i < n:
            tot += ln_gamma(1.0 - a - al * s)
        else:
            tot -= ln_gamma(a + al * s)
    return tot


@lru_cache(maxsize=256)
def _grid(shape, c: float, tilt: float, w_first: float, w_max: float, half_target: float):
    """Gauss-Legendre nodes, weights and kernel logs on the upper contour ray.

    Panel widths grow geometrically from ``w_first`` (set by the distance to
    the nearest pole, so sharp near-axis peaks are resolved) up to ``w_max``
    (set by the oscillation rate), then stay uniform out to ``half_target``.
    """
    edges = [0.0]
    w = w_first
    while edges[-1] < half_target:
        edges.append(edges[-1] + w)
        w = min(2.0 * w, w_max)
    edges_arr = np.asarray(edges)
    lo_e, hi_e = edges_arr[:-1], edges_arr[1:]
    u = (0.5 * (lo_e + hi_e)[:, None] + 0.5 * (hi_e - lo_e)[:, None] * _GL_X[None, :]).ravel()
    w_arr = (0.5 * (hi_e - lo_e)[:, None] * _GL_W[None, :]).ravel()
    phase = np.exp(1j * (0.5 * math.pi - tilt))
    s = c + u * phase
    return s, w_arr, _kernel_ln(shape, s), phase, len(edges) - 1


def _panel_width(spec: MellinBarnesSpec, ln_z_abs: float, half_length: float) -> float:
    coef_rate = 0.0
    for _, coef in (*spec.upper, *spec.lower):
        coef_rate += coef * abs(math.log(coef)) if coef != 1.0 else 0.0
    freq = (abs(spec.log_slope) * math.log(2.0 + half_length)
            + coef_rate + ln_z_abs + 1.0)
    return 6.0 * math.pi / freq


_MAX_HALF_LENGTH = 16384.0


def _eval_grid(spec: MellinBarnesSpec, z_values: np.ndarray, c: float, tilt: float,
               node_count: int, half_length: float, tol_abs: float, tol_rel: float,
               ln_scale: np.ndarray | float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    shape = _kernel_shape(spec)
    strip = convergence_strip(spec)
    scale = np.broadcast_to(np.asarray(ln_scale, dtype=float), z_values.shape)
    ln_z = np.log(z_values)
    ln_z_abs = float(np.max(np.abs(ln_z)))
    w_max = min(_panel_width(spec, ln_z_abs, half_length),
                half_length / max(2, node_count // _GL_POINTS))
    pole_dist = min(c - strip[0], strip[1] - c)
    w_first = min(w_max, 1.5 * pole_dist) if math.isfinite(pole_dist) else w_max
    # snap to a coarse logarithmic grid so repeat evaluations reuse cached grids
    w_max = math.exp(math.floor(4.0 * math.log(w_max)) / 4.0)
    w_first = math.exp(math.floor(4.0 * math.log(w_first)) / 4.0)

    half_target = half_length
    while True:
        s, w, lnk, phase, n_panels = _grid(shape, c, tilt, w_first, w_max, half_target)
        expo = lnk[None, :] - s[None, :] * ln_z[:, None] + scale[:, None]
        with np.errstate(over="ignore"):
            f = np.exp(expo) * phase
        contrib = w[None, :] * f.imag
        env = w[None, :] * np.abs(f)
        panel_env = env.reshape(len(z_values), n_panels, _GL_POINTS).sum(axis=2)
        tail = panel_env[:, -3:]
        value = contrib.sum(axis=1) / math.pi
        tol = tol_abs + tol_rel * np.abs(value)
        # geometric tail bound from the last panels; require decay
        ratio = np.where(tail[:, -2] > 0, tail[:, -1] / np.maximum(tail[:, -2], 1e-300), 0.0)
        decaying = (tail[:, -1] <= tail[:, -2]) & (tail[:, -2] <= tail[:, -3]) & (ratio < 0.9)
        bound = np.where(decaying, tail[:, -1] * ratio / np.maximum(1.0 - ratio, 0.1), np.inf)
        ok = np.isfinite(value) & decaying & (bound < 0.25 * tol)
        if np.all(ok):
            roundoff = 2e-16 * env.sum(axis=1)
            return value, (bound + roundoff) / math.pi
        if half_target >= _MAX_HALF_LENGTH:
            raise ConvergenceError(
                f"contour tail not settled at half-length {half_target:.0f}")
        half_target *= 2.0


def eval_fox_h(spec: MellinBarnesSpec, plan: ContourPlan | None = None,
               tol_abs: float = 1e-9, tol_rel: float = 1e-9,
               ln_scale: float = 0.0) -> tuple[float, float]:
    """Evaluate the Fox-H integral of ``spec``, times exp(ln_scale).

    Returns (value, error_estimate) where the estimate combines the truncated
    tail bound and accumulated roundoff.  ``ln_scale`` is applied inside the
    contour exponentials, so prefactors like 1/Gamma(m) stay finite for any
    parameter size.  A plan is built automatically when none is given; an
    explicit plan must keep its abscissa inside the convergence strip
    (ContourError otherwise).  The half-length grows adaptively until the
    tail criterion is met (ConvergenceError if it never is).
    """
    strip = convergence_strip(spec)
    if plan is None:
        plan = plan_contour(spec)
    else:
        if not (strip[0] < plan.abscissa < strip[1]):
            raise ContourError(
                f"abscissa {plan.abscissa} outside convergence strip {strip}")
        if spec.decay_exponent <= 1e-9 and plan.tilt == 0.0:
            plan = replace(plan, tilt=_pick_tilt(spec, abs(math.log(spec.z))))
    vals, errs = _eval_grid(spec, np.array([spec.z]), plan.abscissa, plan.tilt,
                            plan.node_count, plan.half_length, tol_abs, tol_rel,
                            ln_scale)
    return float(vals[0]), float(errs[0])


def eval_fox_h_batch(spec: MellinBarnesSpec, z_values, tol_abs: float = 1e-9,
                     tol_rel: float = 1e-9, ln_scale=0.0) -> np.ndarray:
    """Evaluate one spec at many positive arguments, sharing contour work.

    The kernel logs depend only on the parameter lists, so one contour grid
    serves a whole bucket of arguments; arguments are bucketed by log z and
    each bucket gets a cancellation-optimal abscissa.  ``ln_scale`` (scalar
    or shaped like ``z_values``) multiplies the result by exp(ln_scale) from
    inside the exponentials.
    """
    z = np.asarray(z_values, dtype=float)
    if np.any(z <= 0) or not np.all(np.isfinite(z)):
        raise ValueError("arguments must be positive and finite")
    flat = z.ravel()
    scale = np.broadcast_to(np.asarray(ln_scale, dtype=float), z.shape).ravel()
    out = np.empty(flat.shape)
    ln_z = np.log(flat)
    buckets = np.floor(0.5 * ln_z)
    strip = convergence_strip(spec)
    shape = _kernel_shape(spec)
    plan = plan_contour(spec)
    for code in np.unique(buckets):
        sel = buckets == code
        rep = 2.0 * code + 1.0
        c = _pick_abscissa(shape, strip, rep)
        tilt = _pick_tilt(spec, float(np.max(np.abs(ln_z[sel]))))
        vals, _ = _eval_grid(spec, flat[sel], c, tilt, plan.node_count,
                             plan.half_length, tol_abs, tol_rel, scale[sel])
        out[sel] = vals
    return out.reshape(z.shape)


def eval_meijer_g(spec: MellinBarnesSpec, plan: ContourPlan | None = None,
                  tol_abs: float = 1e-9, tol_rel: float = 1e-9,
                  ln_scale: float = 0.0) -> tuple[float, float]:
    """Evaluate a Meijer-G spec (all gamma coefficients equal to one)."""
    if not spec.is_meijer:
        raise ValueError("eval_meijer_g requires unit gamma coefficients")
    return eval_fox_h(spec, plan, tol_abs, tol_rel, ln_scale)


# ---------------------------------------------------------------------------
# reduction of rational-coefficient specs to Meijer-G form

def gauss_multiplication_expand(x: float, n: int) -> XiCoefficients:
    """Offsets produced by splitting Gamma(x + n s) into n unit-coefficient factors."""
    if n < 1 or n != int(n):
        raise ValueError("n must be a positive integer")
    n = int(n)
    return XiCoefficients(x=float(x), n=n,
                          values=tuple((x + k) / n for k in range(n)))


def _as_fraction(coef: float) -> Fraction:
    frac = Fraction(coef).limit_denominator(10**6)
    if abs(float(frac) - coef) > 1e-9 * max(1.0, abs(coef)):
        raise ValueError(f"coefficient {coef} is not rational within 1e-9")
    return frac


def meijer_from_fox(spec: MellinBarnesSpec) -> tuple[MellinBarnesSpec, float]:
    """Rewrite a rational-coefficient Fox-H spec as a Meijer-G spec.

    Returns (gspec, constant) with H(spec) = constant * G(gspec).  Uses the
    substitution s -> lambda*s (lambda = lcm of coefficient denominators)
    followed by the gamma multiplication formula on every factor.  Raises
    ValueError when a coefficient is irrational or the expansion order would
    be unreasonably large.
    """
    fracs_u = [_as_fraction(al) for _, al in spec.upper]
    fracs_l = [_as_fraction(be) for _, be in spec.lower]
    lam = 1
    for fr in (*fracs_u, *fracs_l):
        lam = lam * fr.denominator // math.gcd(lam, fr.denominator)
    orders_u = [int(fr * lam) for fr in fracs_u]
    orders_l = [int(fr * lam) for fr in fracs_l]
    if sum(orders_u) + sum(orders_l) > 64:
        raise ValueError("rationalized coefficients give an impractically large G spec")

    ln_const = math.log(lam)
    ln_zg = lam * math.log(spec.z)
    num_upper: list[tuple[float, float]] = []
    den_upper: list[tuple[float, float]] = []
    num_lower: list[tuple[float, float]] = []
    den_lower: list[tuple[float, float]] = []

    for j, ((b, _), nf) in enumerate(zip(spec.lower, orders_l)):
        xi = gauss_multiplication_expand(b, nf)
        params = [(v, 1.0) for v in xi.values]
        piece = 0.5 * (1 - nf) * math.log(2 * math.pi) + (b - 0.5) * math.log(nf)
        if j < spec.m:
            num_lower += params
            ln_const += piece
            ln_zg -= nf * math.log(nf)
        else:
            den_lower += params
            ln_const -= 0.5 * (1 - nf) * math.log(2 * math.pi) + (0.5 - b) * math.log(nf)
            ln_zg -= nf * math.log(nf)
    for i, ((a, _), nf) in enumerate(zip(spec.upper, orders_u)):
        xi = gauss_multiplication_expand(a, nf)
        params = [(v, 1.0) for v in xi.values]
        if i < spec.n:
            num_upper += params
            ln_const += 0.5 * (1 - nf) * math.log(2 * math.pi) + (0.5 - a) * math.log(nf)
            ln_zg += nf * math.log(nf)
        else:
            den_upper += params
            ln_const -= 0.5 * (1 - nf) * math.log(2 * math.pi) + (a - 0.5) * math.log(nf)
            ln_zg += nf * math.log(nf)

    gspec = MellinBarnesSpec(upper=tuple(num_upper + den_upper),
                             lower=tuple(num_lower + den_lower),
                             m=len(num_lower), n=len(num_upper),
                             z=math.exp(ln_zg))
    return gspec, math.exp(ln_const)
