"""HMC and Hessian-corrected HMC transition kernels plus the chain runner.

Plain HMC refreshes momentum from N(0, I) and accepts on the Hamiltonian
difference.  The Hessian-corrected kernel (``hhmc``) instead refreshes
from the position-dependent law N(mean(theta), Q(theta)) built by
:func:`hhmc.spectral.momentum_law`, and accepts with

    min(1, exp[ l(theta*) - l(theta) + log N(-p* | law at theta*)
                                     - log N(p | law at theta) ])

which is the Metropolis-Hastings ratio on the extended space with
momentum negation.  The Hessian is evaluated once per trajectory
endpoint only: the law at the current state is cached, so a chain of n
iterations costs n + 1 Hessian evaluations.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import RunSummary, summarize
from .errors import ConfigurationError
from .integrator import LeapfrogConfig, leapfrog
from .model import GaussianTarget, TargetModel
from .spectral import (
    Floors,
    MomentumLaw,
    QuadraticModel,
    eigendecompose_sym,
    momentum_law,
    momentum_log_density,
    sample_momentum,
)

SAMPLER_KINDS = ("hmc", "hhmc")


@dataclass(frozen=True)
class SamplerConfig:
    kind: str
    leapfrog: LeapfrogConfig
    iterations: int
    seed: int
    floors: Floors = Floors()

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ConfigurationError(
                f"unknown sampler {self.kind!r}; expected one of {SAMPLER_KINDS}"
            )
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")


@dataclass
class ChainState:
    """Current position with cached evaluations at that position."""

    theta: np.ndarray
    log_density: float
    grad: np.ndarray
    law: MomentumLaw | None
    iteration: int = 0
    accepts: int = 0
    clamp_events: int = 0


@dataclass(frozen=True)
class ChainRun:
    samples: np.ndarray        # (iterations, dim), position after each step
    accepted: np.ndarray       # (iterations,) bool
    log_densities: np.ndarray  # (iterations,)
    summary: RunSummary


class _CountingTarget:
    """Delegating wrapper that counts evaluations of the wrapped target."""

    def __init__(self, target: TargetModel):
        self._target = target
        self.dim = target.dim
        self.log_density_calls = 0
        self.gradient_calls = 0
        self.hessian_calls = 0

    def log_density(self, theta):
        self.log_density_calls += 1
        return self._target.log_density(theta)

    def gradient(self, theta):
        self.gradient_calls += 1
        return self._target.gradient(theta)

    def hessian(self, theta):
        self.hessian_calls += 1
        return self._target.hessian(theta)


def refresh_law(target: TargetModel, theta, grad, cfg: SamplerConfig) -> MomentumLaw:
    """Momentum-refresh law at ``theta``; costs one Hessian evaluation."""
    spectrum = eigendecompose_sym(target.hessian(theta))
    model = QuadraticModel(
        spectrum=spectrum, grad=grad, trajectory_time=cfg.leapfrog.trajectory_time
    )
    return momentum_law(model, cfg.floors)


def init_state(target: TargetModel, cfg: SamplerConfig, theta_init) -> ChainState:
    theta = np.asarray(theta_init, dtype=float)
    if theta.shape != (target.dim,):
        raise ConfigurationError(
            f"initial position has shape {theta.shape}, expected ({target.dim},)"
        )
    if not np.all(np.isfinite(theta)):
        raise ConfigurationError("initial position must be finite")
    log_density = target.log_density(theta)
    grad = np.asarray(target.gradient(theta), dtype=float)
    law = None
    clamp_events = 0
    if cfg.kind == "hhmc":
        law = refresh_law(target, theta, grad, cfg)
        clamp_events = law.clamped
    return ChainState(
        theta=theta,
        log_density=log_density,
        grad=grad,
        law=law,
        clamp_events=clamp_events,
    )


def hhmc_log_accept_ratio(
    log_density_cur: float,
    law_cur: MomentumLaw,
    p_cur: np.ndarray,
    log_density_prop: float,
    law_prop: MomentumLaw,
    p_prop: np.ndarray,
) -> float:
    """Log MH acceptance ratio for proposing (theta*, p*) from (theta, p)."""
    return (
        log_density_prop
        - log_density_cur
        + momentum_log_density(law_prop, -p_prop)
        - momentum_log_density(law_cur, p_cur)
    )


def hmc_step(
    state: ChainState, target: TargetModel, cfg: SamplerConfig, rng: np.random.Generator
) -> ChainState:
    """One plain-HMC transition: refresh p ~ N(0, I), integrate, accept/reject."""
    p0 = rng.standard_normal(target.dim)
    result = leapfrog(target, state.theta, p0, cfg.leapfrog, grad0=state.grad)
    if result.diverged:
        return replace(state, iteration=state.iteration + 1)

    energy_start = 0.5 * float(p0 @ p0) - state.log_density
    log_density_prop = target.log_density(result.theta)
    energy_end = 0.5 * float(result.p @ result.p) - log_density_prop
    log_alpha = energy_start - energy_end
    if not math.isfinite(log_alpha):
        return replace(state, iteration=state.iteration + 1)

    if rng.random() < math.exp(min(log_alpha, 0.0)):
        return ChainState(
            theta=result.theta,
            log_density=log_density_prop,
            grad=result.grad,
            law=None,
            iteration=state.iteration + 1,
            accepts=state.accepts + 1,
            clamp_events=state.clamp_events,
        )
    return replace(state, iteration=state.iteration + 1)


def hhmc_step(
    state: ChainState, target: TargetModel, cfg: SamplerConfig, rng: np.random.Generator
) -> ChainState:
    """One Hessian-corrected transition.

    The law at the current position comes from the state cache; only the
    proposal endpoint costs a Hessian evaluation.  On rejection the
    cached law is kept, so the next iteration does not recompute it.
    """
    p0 = sample_momentum(state.law, rng)
    result = leapfrog(target, state.theta, p0, cfg.leapfrog, grad0=state.grad)
    if result.diverged:
        return replace(state, iteration=state.iteration + 1)

    log_density_prop = target.log_density(result.theta)
    law_prop = refresh_law(target, result.theta, result.grad, cfg)
    log_alpha = hhmc_log_accept_ratio(
        state.log_density, state.law, p0, log_density_prop, law_prop, result.p
    )
    clamp_events = state.clamp_events + law_prop.clamped
    if not math.isfinite(log_alpha):
        return replace(
            state, iteration=state.iteration + 1, clamp_events=clamp_events
        )

    if rng.random() < math.exp(min(log_alpha, 0.0)):
        return ChainState(
            theta=result.theta,
            log_density=log_density_prop,
            grad=result.grad,
            law=law_prop,
            iteration=state.iteration + 1,
            accepts=state.accepts + 1,
            clamp_events=clamp_events,
        )
    return replace(state, iteration=state.iteration + 1, clamp_events=clamp_events)


def run_chain(target: TargetModel, cfg: SamplerConfig, theta_init) -> ChainRun:
    """Run one chain and summarize it.

    Records the position after every step (repeats on rejection) and is
    bitwise deterministic for a given (config, seed).  A chain owns its
    random stream; independent chains can run concurrently.
    """
    counting = _CountingTarget(target)
    rng = np.random.default_rng(cfg.seed)
    state = init_state(counting, cfg, theta_init)
    step = hmc_step if cfg.kind == "hmc" else hhmc_step

    samples = np.empty((cfg.iterations, target.dim))
    accepted = np.empty(cfg.iterations, dtype=bool)
    log_densities = np.empty(cfg.iterations)

    start = time.perf_counter()
    for i in range(cfg.iterations):
        prev_accepts = state.accepts
        state = step(state, counting, cfg, rng)
        samples[i] = state.theta
        accepted[i] = state.accepts > prev_accepts
        log_densities[i] = state.log_density
    seconds = time.perf_counter() - start

    truth = target if isinstance(target, GaussianTarget) else None
    summary = summarize(
        samples,
        accepted,
        truth=truth,
        clamp_events=state.clamp_events,
        seconds=seconds,
        grad_evals=counting.gradient_calls,
        hessian_evals=counting.hessian_calls,
    )
    return ChainRun(
        samples=samples, accepted=accepted, log_densities=log_densities, summary=summary
    )
