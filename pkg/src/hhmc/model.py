"""Differentiable target distributions.

A target exposes its dimension together with exact log-density, gradient
and Hessian callables; samplers consume all three.  Gaussian targets are
built in (including the 30-dimensional heterogeneous-scale benchmark),
and ``check_derivatives`` verifies user-supplied derivatives against
central finite differences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import ConfigurationError, EvaluationError

LOG_2PI = math.log(2.0 * math.pi)

GRADIENT_TOL = 1e-5
HESSIAN_TOL = 1e-4


@runtime_checkable
class TargetModel(Protocol):
    """Interface every target distribution must satisfy.

    ``log_density`` must be finite for all finite positions; restricted
    supports are not supported by the samplers in this package.
    """

    dim: int

    def log_density(self, theta: np.ndarray) -> float: ...

    def gradient(self, theta: np.ndarray) -> np.ndarray: ...

    def hessian(self, theta: np.ndarray) -> np.ndarray: ...


class GaussianTarget:
    """Multivariate normal target with dense or diagonal covariance.

    Exactly one of ``cov`` / ``cov_diag`` must be given.  The precision
    matrix and log-normalizer are precomputed; instances are immutable
    and safe to share across threads.
    """

    def __init__(self, mean, cov=None, cov_diag=None):
        self.mean = np.asarray(mean, dtype=float)
        if self.mean.ndim != 1:
            raise ConfigurationError("mean must be a vector")
        self.dim = self.mean.shape[0]

        if (cov is None) == (cov_diag is None):
            raise ConfigurationError("exactly one of cov/cov_diag must be given")

        if cov_diag is not None:
            var = np.asarray(cov_diag, dtype=float)
            if var.shape != (self.dim,):
                raise ConfigurationError("cov_diag length must match mean")
            if not np.all(np.isfinite(var)) or np.any(var <= 0.0):
                raise ConfigurationError("cov_diag entries must be finite and > 0")
            self.cov_diag = var
            self.cov = np.diag(var)
            self._prec_diag = 1.0 / var
            self._precision = np.diag(self._prec_diag)
            log_det = float(np.sum(np.log(var)))
        else:
            sigma = np.asarray(cov, dtype=float)
            if sigma.shape != (self.dim, self.dim):
                raise ConfigurationError("cov must be a dim x dim matrix")
            if not np.all(np.isfinite(sigma)):
                raise ConfigurationError("cov entries must be finite")
            if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(sigma).max()))):
                raise ConfigurationError("cov must be symmetric positive definite")
            try:
                chol = np.linalg.cholesky(sigma)
            except np.linalg.LinAlgError:
                raise ConfigurationError("cov must be symmetric positive definite") from None
            self.cov_diag = None
            self.cov = sigma
            self._chol = chol
            self._prec_diag = None
            self._precision = np.linalg.inv(sigma)
            log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))

        self._neg_precision = -self._precision
        self._log_norm = 0.5 * (self.dim * LOG_2PI + log_det)

    @property
    def marginal_std(self) -> np.ndarray:
        """Per-coordinate marginal standard deviations."""
        return np.sqrt(np.diag(self.cov))

    def _check(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            raise ConfigurationError(
                f"position has shape {theta.shape}, expected ({self.dim},)"
            )
        return theta

    def log_density(self, theta) -> float:
        theta = self._check(theta)
        z = theta - self.mean
        if self._prec_diag is not None:
            return -0.5 * float(z @ (self._prec_diag * z)) - self._log_norm
        return -0.5 * float(z @ (self._precision @ z)) - self._log_norm

    def gradient(self, theta) -> np.ndarray:
        theta = self._check(theta)
        if self._prec_diag is not None:
            return self._prec_diag * (self.mean - theta)
        return self._precision @ (self.mean - theta)

    def hessian(self, theta) -> np.ndarray:
        self._check(theta)
        return self._neg_precision

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` exact samples, shape (n, dim)."""
        z = rng.standard_normal((n, self.dim))
        if self.cov_diag is not None:
            return self.mean + z * np.sqrt(self.cov_diag)
        return self.mean + z @ self._chol.T


def build_neal_target() -> GaussianTarget:
    """30-D zero-mean diagonal Gaussian with strongly heterogeneous scales.

    Standard deviations, in order: 110; 100; twenty-six evenly spaced
    values from 16 down to 8 (inclusive, step 0.32); 1.1; 1.0.  The wide
    spread of scales makes this a standard stress test for HMC samplers.
    """
    stds = np.concatenate(([110.0, 100.0], np.linspace(16.0, 8.0, 26), [1.1, 1.0]))
    return GaussianTarget(mean=np.zeros(30), cov_diag=stds**2)


def gaussian_target_from_json(text: str) -> GaussianTarget:
    """Build a GaussianTarget from a JSON document.

    Expected form: ``{"mean": [...], "cov_diag": [...]}`` or
    ``{"mean": [...], "cov": [[...], ...]}``; exactly one of
    ``cov_diag``/``cov`` must be present.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"target file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigurationError("target JSON must be an object")
    unknown = set(doc) - {"mean", "cov", "cov_diag"}
    if unknown:
        raise ConfigurationError(f"unknown target key {sorted(unknown)[0]!r}")
    if "mean" not in doc:
        raise ConfigurationError("target JSON missing required field 'mean'")
    return GaussianTarget(
        mean=doc["mean"], cov=doc.get("cov"), cov_diag=doc.get("cov_diag")
    )


@dataclass(frozen=True)
class DerivativeReport:
    """Result of a finite-difference derivative check."""

    gradient_error: float
    hessian_error: float

    @property
    def gradient_ok(self) -> bool:
        return self.gradient_error <= GRADIENT_TOL

    @property
    def hessian_ok(self) -> bool:
        return self.hessian_error <= HESSIAN_TOL

    @property
    def passed(self) -> bool:
        return self.gradient_ok and self.hessian_ok


def _max_rel_error(approx: np.ndarray, exact: np.ndarray) -> float:
    # Per-component relative error with an absolute floor of 1 so that
    # components near zero do not dominate via roundoff noise.
    denom = np.maximum(np.maximum(np.abs(approx), np.abs(exact)), 1.0)
    return float(np.max(np.abs(approx - exact) / denom))


def check_derivatives(
    target: TargetModel,
    theta,
    h_grad: float = 1e-5,
    h_hess: float = 1e-4,
) -> DerivativeReport:
    """Compare analytic gradient/Hessian against central finite differences.

    ``h_grad`` steps the log-density for the gradient check; ``h_hess``
    steps the gradient for the Hessian check.  Raises EvaluationError if
    the log-density is non-finite at any probe point.
    """
    if h_grad <= 0.0 or h_hess <= 0.0:
        raise ConfigurationError("finite-difference step must be positive")
    theta = np.asarray(theta, dtype=float)
    dim = target.dim

    grad_fd = np.empty(dim)
    for i in range(dim):
        step = np.zeros(dim)
        step[i] = h_grad
        lp = target.log_density(theta + step)
        lm = target.log_density(theta - step)
        if not (math.isfinite(lp) and math.isfinite(lm)):
            raise EvaluationError(f"non-finite log density near coordinate {i}")
        grad_fd[i] = (lp - lm) / (2.0 * h_grad)
    grad_err = _max_rel_error(grad_fd, np.asarray(target.gradient(theta), dtype=float))

    hess_fd = np.empty((dim, dim))
    for i in range(dim):
        step = np.zeros(dim)
        step[i] = h_hess
        gp = np.asarray(target.gradient(theta + step), dtype=float)
        gm = np.asarray(target.gradient(theta - step), dtype=float)
        hess_fd[:, i] = (gp - gm) / (2.0 * h_hess)
    hess_err = _max_rel_error(hess_fd, np.asarray(target.hessian(theta), dtype=float))

    return DerivativeReport(gradient_error=grad_err, hessian_error=hess_err)
