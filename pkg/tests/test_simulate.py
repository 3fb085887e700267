"""Tests for the Monte-Carlo capacity estimator.

Oracles: hand-evaluated combiner outputs, the analytic capacity engine
(agreement within confidence intervals), and exact expectations for a
degenerate constant-envelope model.
"""
import math

import numpy as np
import pytest

from divcap.capacity import CombinerSpec, capacity_independent
from divcap.fading import FadingModel, Rayleigh, ShadowedGNM
from divcap.simulate import SimConfig, combiner_snr, simulate_capacity
from divcap.simulate import _block_sums

SHADOWED = ShadowedGNM(2.0, 2.0, 3.0, 1.0)


class _ConstantEnvelope(FadingModel):
    """Degenerate channel whose envelope is always the same value."""

    name = "constant"

    def __init__(self, r0: float):
        self.r0 = r0

    def pdf(self, r):
        raise NotImplementedError

    def mgf_p(self, s, p=2):
        raise NotImplementedError

    def dmgf_p(self, s, p=2):
        raise NotImplementedError

    def sample(self, rng, size):
        return np.full(size, self.r0)


class TestCombinerSnr:
    def test_two_unit_branches(self):
        assert combiner_snr([1.0, 1.0], CombinerSpec("mrc", 2, 1.0)) == 2.0
        np.testing.assert_allclose(
            combiner_snr([1.0, 1.0], CombinerSpec("egc", 2, 1.0)), 2.0,
            rtol=1e-15)

    @pytest.mark.parametrize("kind", ["mrc", "egc"])
    def test_single_branch(self, kind):
        comb = CombinerSpec(kind, 1, 3.0)
        for r in (0.5, 2.0):
            np.testing.assert_allclose(combiner_snr([r], comb), 3.0 * r * r,
                                       rtol=1e-14)

    def test_batched_draws(self):
        comb = CombinerSpec("mrc", 2, 1.0)
        out = combiner_snr(np.ones((5, 2)), comb)
        assert out.shape == (5,)
        assert np.all(out == 2.0)

    def test_validation(self):
        comb = CombinerSpec("egc", 2, 1.0)
        with pytest.raises(ValueError):
            combiner_snr([1.0, 2.0, 3.0], comb)
        with pytest.raises(ValueError):
            combiner_snr([-1.0, 1.0], comb)


class TestSimConfig:
    def test_single_model_replicated(self):
        cfg = SimConfig(Rayleigh(1.0), CombinerSpec("mrc", 3, 1.0))
        assert len(cfg.models) == 3
        assert cfg.batch == cfg.n_samples

    def test_validation(self):
        comb = CombinerSpec("egc", 2, 1.0)
        model = Rayleigh(1.0)
        with pytest.raises(ValueError):
            SimConfig(model, comb, n_samples=50)
        with pytest.raises(ValueError):
            SimConfig(model, comb, n_samples=1000, batch=300)
        with pytest.raises(ValueError):
            SimConfig(model, comb, seed=-1)
        with pytest.raises(ValueError):
            SimConfig([model], comb)


class TestSimulateCapacity:
    def test_reproducible(self):
        cfg = SimConfig(Rayleigh(1.0), CombinerSpec("egc", 2, 1.0),
                        n_samples=10000, seed=42, batch=2500)
        assert simulate_capacity(cfg) == simulate_capacity(cfg)

    def test_block_schedule_has_no_effect(self):
        # evaluate the four blocks out of order, combine in index order:
        # must reproduce the serial result bit for bit
        cfg = SimConfig(Rayleigh(1.0), CombinerSpec("egc", 2, 1.0),
                        n_samples=10000, seed=42, batch=2500)
        serial = simulate_capacity(cfg)
        parts = {b: _block_sums(cfg, b) for b in reversed(range(4))}
        total, total_sq = np.sum(np.array([parts[b] for b in range(4)]),
                                 axis=0)
        mean = float(total) / cfg.n_samples
        var = max(0.0, (float(total_sq) - cfg.n_samples * mean * mean)
                  / (cfg.n_samples - 1.0))
        assert mean == serial.mean
        assert math.sqrt(var / cfg.n_samples) == serial.std_error

    def test_rayleigh_matches_analytic(self):
        comb = CombinerSpec("mrc", 1, 1.0)
        ana = capacity_independent(Rayleigh(1.0), comb).value
        sim = simulate_capacity(SimConfig(Rayleigh(1.0), comb,
                                          n_samples=100000, seed=1,
                                          batch=25000))
        assert abs(sim.mean - ana) < 3.0 * sim.std_error
        np.testing.assert_allclose(sim.mean, 0.8604, atol=3.0 * sim.std_error)

    @pytest.mark.parametrize("kind,branches", [("mrc", 2), ("egc", 4)])
    def test_shadowed_matches_analytic(self, kind, branches):
        comb = CombinerSpec(kind, branches, 10.0)
        ana = capacity_independent(SHADOWED, comb).value
        sim = simulate_capacity(SimConfig(SHADOWED, comb, n_samples=100000,
                                          seed=7, batch=25000))
        assert abs(sim.mean - ana) < 3.0 * sim.std_error

    def test_mrc_dominates_egc(self):
        estimates = {}
        for kind in ("mrc", "egc"):
            comb = CombinerSpec(kind, 3, 10.0)
            estimates[kind] = simulate_capacity(
                SimConfig(SHADOWED, comb, n_samples=50000, seed=11, batch=50000))
        joint = math.hypot(estimates["mrc"].std_error,
                           estimates["egc"].std_error)
        assert estimates["mrc"].mean >= estimates["egc"].mean - 3.0 * joint

    def test_degenerate_model_is_exact(self):
        comb = CombinerSpec("egc", 2, 5.0)
        res = simulate_capacity(SimConfig(_ConstantEnvelope(2.0), comb,
                                          n_samples=400, seed=0))
        want = math.log2(1.0 + (comb.phi * 4.0) ** 2)
        assert abs(res.mean - want) <= 4.0 * np.spacing(want)
        assert res.std_error == 0.0

    def test_stderr_scales_as_root_n(self):
        comb = CombinerSpec("egc", 2, 1.0)
        small = simulate_capacity(SimConfig(Rayleigh(1.0), comb,
                                            n_samples=20000, seed=3))
        large = simulate_capacity(SimConfig(Rayleigh(1.0), comb,
                                            n_samples=80000, seed=3))
        assert 1.6 < small.std_error / large.std_error < 2.4

    def test_bandwidth_scales_linearly(self):
        base = CombinerSpec("egc", 2, 1.0)
        wide = CombinerSpec("egc", 2, 1.0, bandwidth=2.0)
        a = simulate_capacity(SimConfig(Rayleigh(1.0), base, n_samples=1000,
                                        seed=5))
        b = simulate_capacity(SimConfig(Rayleigh(1.0), wide, n_samples=1000,
                                        seed=5))
        np.testing.assert_allclose(b.mean, 2.0 * a.mean, rtol=1e-12)
        np.testing.assert_allclose(b.std_error, 2.0 * a.std_error, rtol=1e-12)

    def test_as_point(self):
        res = simulate_capacity(SimConfig(Rayleigh(1.0),
                                          CombinerSpec("mrc", 1, 1.0),
                                          n_samples=1000, seed=5))
        point = res.as_point()
        assert point.method == "monte-carlo"
        assert point.value == res.mean
        assert point.error_estimate == res.std_error

    def test_unsampleable_model_raises(self):
        from divcap.fading import GenericFoxH
        model = GenericFoxH(upper=(), lower=((0.5, 0.5),), m=1, n=0)
        cfg = SimConfig(model, CombinerSpec("mrc", 1, 1.0), n_samples=100)
        with pytest.raises(NotImplementedError):
            simulate_capacity(cfg)
