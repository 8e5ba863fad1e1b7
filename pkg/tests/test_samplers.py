"""Tests for the HMC / HHMC transition kernels and the chain runner."""

import numpy as np
import pytest

from hhmc import (
    ConfigurationError,
    GaussianTarget,
    LeapfrogConfig,
    SamplerConfig,
    build_neal_target,
    hhmc_log_accept_ratio,
    hhmc_step,
    hmc_step,
    init_state,
    leapfrog,
    run_chain,
    sample_momentum,
)
from hhmc.samplers import refresh_law


class FlatTarget:
    def __init__(self, dim=2):
        self.dim = dim

    def log_density(self, theta):
        return 0.0

    def gradient(self, theta):
        return np.zeros(self.dim)

    def hessian(self, theta):
        return np.zeros((self.dim, self.dim))


def unit_gaussian_1d():
    return GaussianTarget(mean=[0.0], cov_diag=[1.0])


def test_config_validation():
    lf = LeapfrogConfig(0.2, 10)
    with pytest.raises(ConfigurationError):
        SamplerConfig(kind="nuts", leapfrog=lf, iterations=10, seed=0)
    with pytest.raises(ConfigurationError):
        SamplerConfig(kind="hmc", leapfrog=lf, iterations=0, seed=0)


def test_hmc_flat_target_always_accepts():
    target = FlatTarget()
    cfg = SamplerConfig("hmc", LeapfrogConfig(0.25, 8), iterations=50, seed=3)
    rng = np.random.default_rng(cfg.seed)
    state = init_state(target, cfg, np.zeros(2))
    for _ in range(20):
        theta_before = state.theta
        accepts_before = state.accepts
        state = hmc_step(state, target, cfg, rng)
        assert state.accepts == accepts_before + 1  # delta-H is exactly 0
        assert not np.array_equal(state.theta, theta_before)


def test_hmc_acceptance_at_moderate_step_size():
    cfg = SamplerConfig("hmc", LeapfrogConfig(0.2, 10), iterations=5000, seed=11)
    run = run_chain(unit_gaussian_1d(), cfg, np.zeros(1))
    assert run.summary.acceptance_rate >= 0.97


def test_hmc_acceptance_near_exact_integration():
    # eps -> 0 at fixed trajectory time: energy error vanishes as eps^2
    cfg = SamplerConfig("hmc", LeapfrogConfig(1e-3, 2000), iterations=1000, seed=5)
    run = run_chain(unit_gaussian_1d(), cfg, np.zeros(1))
    assert run.summary.acceptance_rate >= 0.999


def test_hhmc_null_trajectory_accepts_with_probability_one():
    # theta* = theta, p* = -p: both density ratios cancel exactly
    target = unit_gaussian_1d()
    cfg = SamplerConfig("hhmc", LeapfrogConfig(0.2, 10), iterations=1, seed=0)
    state = init_state(target, cfg, np.array([0.8]))
    p = sample_momentum(state.law, np.random.default_rng(1))
    log_alpha = hhmc_log_accept_ratio(
        state.log_density, state.law, p, state.log_density, state.law, -p
    )
    assert log_alpha == 0.0


def test_hhmc_detailed_balance_identity():
    # alpha(fwd) / alpha(rev) must equal the unclipped ratio itself
    target = GaussianTarget(mean=[0.0, 0.0], cov=[[4.0, 1.9], [1.9, 1.0]])
    cfg = SamplerConfig("hhmc", LeapfrogConfig(0.3, 7), iterations=1, seed=0)
    rng = np.random.default_rng(9)
    for _ in range(10):
        theta_n = rng.standard_normal(2)
        grad_n = target.gradient(theta_n)
        law_n = refresh_law(target, theta_n, grad_n, cfg)
        p_n = sample_momentum(law_n, rng)
        result = leapfrog(target, theta_n, p_n, cfg.leapfrog)
        law_s = refresh_law(target, result.theta, result.grad, cfg)
        l_n = target.log_density(theta_n)
        l_s = target.log_density(result.theta)

        r_fwd = hhmc_log_accept_ratio(l_n, law_n, p_n, l_s, law_s, result.p)
        r_rev = hhmc_log_accept_ratio(l_s, law_s, -result.p, l_n, law_n, -p_n)
        log_alpha_fwd = min(0.0, r_fwd)
        log_alpha_rev = min(0.0, r_rev)
        assert abs((log_alpha_fwd - log_alpha_rev) - r_fwd) <= 1e-12
        assert abs(r_fwd + r_rev) <= 1e-12


def test_hhmc_acceptance_on_neal_target():
    cfg = SamplerConfig("hhmc", LeapfrogConfig(0.2, 10), iterations=1000, seed=1)
    run = run_chain(build_neal_target(), cfg, np.zeros(30))
    assert run.summary.acceptance_rate >= 0.9
    assert run.summary.clamp_events == 0


def test_hhmc_proposals_nearly_independent():
    cfg = SamplerConfig("hhmc", LeapfrogConfig(0.2, 10), iterations=5000, seed=12)
    run = run_chain(unit_gaussian_1d(), cfg, np.zeros(1))
    assert abs(run.summary.lag1[0]) <= 0.1


def test_run_chain_shapes_and_determinism():
    cfg = SamplerConfig("hhmc", LeapfrogConfig(0.2, 10), iterations=1000, seed=77)
    target = build_neal_target()
    run_a = run_chain(target, cfg, np.zeros(30))
    run_b = run_chain(target, cfg, np.zeros(30))
    assert run_a.samples.shape == (1000, 30)
    assert run_a.accepted.shape == (1000,)
    assert run_a.log_densities.shape == (1000,)
    assert np.array_equal(run_a.samples, run_b.samples)
    assert np.array_equal(run_a.accepted, run_b.accepted)


def test_run_chain_neal_recovers_widest_scale():
    cfg = SamplerConfig("hhmc", LeapfrogConfig(0.2, 10), iterations=1000, seed=1)
    run = run_chain(build_neal_target(), cfg, np.zeros(30))
    assert abs(run.summary.std[0] - 110.0) <= 0.15 * 110.0


def test_rejected_iterations_repeat_previous_position_exactly():
    # a large step size forces a healthy rejection rate
    target = GaussianTarget(mean=[0.0, 0.0], cov=[[4.0, 1.9], [1.9, 1.0]])
    cfg = SamplerConfig("hmc", LeapfrogConfig(0.5, 8), iterations=2000, seed=8)
    run = run_chain(target, cfg, np.zeros(2))
    rejected = np.flatnonzero(~run.accepted)
    rejected = rejected[rejected > 0]
    assert rejected.size > 10
    for i in rejected:
        assert np.array_equal(run.samples[i], run.samples[i - 1])
    accepted = np.flatnonzero(run.accepted)
    accepted = accepted[accepted > 0]
    for i in accepted:
        assert not np.array_equal(run.samples[i], run.samples[i - 1])


def test_hessian_evaluated_once_per_trajectory_endpoint():
    # start cached + one per proposal, independent of accept/reject
    target = GaussianTarget(mean=[0.0, 0.0], cov=[[4.0, 1.9], [1.9, 1.0]])
    cfg = SamplerConfig("hhmc", LeapfrogConfig(0.5, 8), iterations=200, seed=6)
    run = run_chain(target, cfg, np.zeros(2))
    assert 0.0 < run.summary.acceptance_rate < 1.0  # rejections occurred
    assert run.summary.hessian_evals == 201
    assert run.summary.grad_evals == 1 + 200 * 8


def test_hmc_never_evaluates_hessian():
    cfg = SamplerConfig("hmc", LeapfrogConfig(0.2, 10), iterations=100, seed=6)
    run = run_chain(unit_gaussian_1d(), cfg, np.zeros(1))
    assert run.summary.hessian_evals == 0
    assert run.summary.grad_evals == 1 + 100 * 10


def test_state_caches_match_fresh_evaluations():
    target = build_neal_target()
    cfg = SamplerConfig("hhmc", LeapfrogConfig(0.2, 10), iterations=1, seed=15)
    rng = np.random.default_rng(cfg.seed)
    state = init_state(target, cfg, np.zeros(30))
    for _ in range(5):
        state = hhmc_step(state, target, cfg, rng)
    assert state.log_density == target.log_density(state.theta)
    np.testing.assert_array_equal(state.grad, target.gradient(state.theta))
    fresh_law = refresh_law(target, state.theta, state.grad, cfg)
    np.testing.assert_array_equal(state.law.mean, fresh_law.mean)
    np.testing.assert_array_equal(state.law.cov_eigs, fresh_law.cov_eigs)


def test_flat_target_hhmc_runs_with_clamping():
    # zero Hessian: every direction hits the eigenvalue floor
    target = FlatTarget(dim=2)
    cfg = SamplerConfig("hhmc", LeapfrogConfig(0.1, 5), iterations=20, seed=2)
    run = run_chain(target, cfg, np.zeros(2))
    assert run.summary.acceptance_rate == 1.0
    assert run.summary.clamp_events == 2 * 21  # both directions, init + each step


def test_run_chain_validates_initial_position():
    cfg = SamplerConfig("hmc", LeapfrogConfig(0.2, 10), iterations=10, seed=0)
    with pytest.raises(ConfigurationError):
        run_chain(unit_gaussian_1d(), cfg, np.zeros(2))
    with pytest.raises(ConfigurationError):
        run_chain(unit_gaussian_1d(), cfg, np.array([np.nan]))


def test_exactness_hmc_small_correlated_gaussian():
    # quick distributional sanity; the full-scale pair is in acceptance
    cov = np.array([[4.0, 1.9], [1.9, 1.0]])
    target = GaussianTarget(mean=np.zeros(2), cov=cov)
    cfg = SamplerConfig("hmc", LeapfrogConfig(0.15, 13), iterations=4000, seed=33)
    run = run_chain(target, cfg, np.zeros(2))
    se = run.summary.std / np.sqrt(run.summary.ess)
    assert np.all(np.abs(run.summary.mean) <= 3.5 * se)
    sample_cov = np.cov(run.samples.T)
    assert np.abs((sample_cov - cov) / cov).max() <= 0.2
