"""Ergodic capacity of diversity combiners over generalized fading channels.

Numerical core: Mellin-Barnes contour evaluation of Fox-H / Meijer-G
functions, a catalog of fading models exposing moment generating functions
of envelope powers, capacity integrals for maximal-ratio and equal-gain
combining, and a Monte-Carlo reference simulator.
"""
from .specfun import (
    ln_gamma,
    exp_integral_ei,
    cosine_integral_ci,
    extended_incomplete_gamma,
    upper_incomplete_gamma,
    mittag_leffler,
    hermite_rule,
)
from .mellin import (
    MellinBarnesSpec,
    ContourPlan,
    XiCoefficients,
    EmptyStripError,
    ContourError,
    ConvergenceError,
    convergence_strip,
    plan_contour,
    eval_fox_h,
    eval_fox_h_batch,
    eval_meijer_g,
    gauss_multiplication_expand,
    meijer_from_fox,
)
from .fading import (
    FadingModel,
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
from .capacity import (
    CombinerSpec,
    GcqRule,
    CapacityPoint,
    aux_c,
    gcq_rule,
    capacity_independent,
    capacity_joint,
    capacity_mrc_nakagami_closed,
    ei_transform,
    jensen_bound,
)
from .simulate import (
    SimConfig,
    SimResult,
    combiner_snr,
    simulate_capacity,
)

__version__ = "0.1.0"
