"""Spectral machinery for the locally-quadratic model of a log-density.

Freezing the gradient ``v`` and Hessian ``H`` of the log-density at an
expansion point turns Hamilton's equations into the linear system

    dx/dt = p,      dp/dt = H x + v,

which is solved exactly per eigendirection of the symmetrized Hessian.
With ``lam`` an eigenvalue of ``H``, the scalar propagator entries are
trigonometric for ``lam < 0`` (locally log-concave directions) and
hyperbolic for ``lam > 0``:

    c(t) = cos(a t)        or cosh(s t)      (a = sqrt(-lam), s = sqrt(lam))
    g(t) = sin(a t) / a    or sinh(s t) / s

The module builds, samples and evaluates the position-dependent Gaussian
momentum-refresh law N(mean, Q) whose push-forward through this exact
flow over one trajectory time reproduces the quadratic-model target
marginal, and provides a Runge-Kutta integrator for the first- and
second-moment ODEs as an independent cross-check of the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, EvaluationError
from .model import LOG_2PI

# Below this size of |lam| * t**2 the trig/hyperbolic forms lose digits to
# cancellation and the truncated series in u = lam * t**2 is exact to
# double precision.
SERIES_THRESHOLD = 1e-8


@dataclass(frozen=True)
class Floors:
    """Regularization floors for the momentum-refresh law.

    ``lam_floor``: eigenvalues of H above ``-lam_floor`` (directions that
    are not locally log-concave) are pulled down to ``-lam_floor``.
    ``s2_floor``: lower bound on sin^2(a*t) inside the momentum variance,
    guarding against resonance (a*t near a multiple of pi).
    """

    lam_floor: float = 1e-6
    s2_floor: float = 1e-12

    def __post_init__(self):
        if self.lam_floor <= 0.0 or self.s2_floor <= 0.0:
            raise ConfigurationError("regularization floors must be positive")


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a symmetrized matrix.

    ``eigenvalues`` ascending; column i of ``eigenvectors`` pairs with
    eigenvalue i; the eigenvector matrix is orthonormal.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Reassemble the symmetric matrix U diag(lam) U^T."""
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.T


@dataclass(frozen=True)
class QuadraticModel:
    """Local quadratic expansion of a log-density.

    Holds the Hessian spectrum and gradient at the expansion point plus
    the trajectory time over which its linear dynamics are solved.
    """

    spectrum: Spectrum
    grad: np.ndarray
    trajectory_time: float

    def __post_init__(self):
        if self.trajectory_time <= 0.0:
            raise ConfigurationError("trajectory time must be positive")
        if not np.all(np.isfinite(self.grad)):
            raise ConfigurationError("gradient must be finite")


@dataclass(frozen=True)
class MomentumLaw:
    """Gaussian momentum-refresh law N(mean, Q) in spectral form.

    ``Q = eigvecs diag(cov_eigs) eigvecs^T`` with all ``cov_eigs`` positive;
    ``log_det_cov`` is the log-determinant of Q.  ``clamped`` counts how
    many eigendirections required regularization when the law was built.
    """

    mean: np.ndarray
    eigvecs: np.ndarray
    cov_eigs: np.ndarray
    log_det_cov: float
    clamped: int = 0

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class MomentState:
    """Mean and covariance of the phase-space vector (x, p)."""

    mean: np.ndarray
    cov: np.ndarray


class SpectralCoefficients(NamedTuple):
    """Scalar propagator entries and momentum-law gains for one eigenvalue.

    ``c``/``g`` are the position-position and position-momentum entries of
    the time-t propagator.  ``mean_coef = -c / (lam * g)`` maps the
    gradient to the momentum-law mean; ``var_coef = -1 / (lam * g^2)`` is
    the momentum-law variance along the eigendirection.  Both diverge as
    lam -> 0 or at resonance and are returned as computed; regularization
    is the caller's job.
    """

    c: float
    g: float
    mean_coef: float
    var_coef: float


def eigendecompose_sym(matrix) -> Spectrum:
    """Eigendecompose (M + M^T) / 2 into an ascending Spectrum."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigurationError("matrix must be square")
    if not np.all(np.isfinite(m)):
        raise EvaluationError("matrix has non-finite entries")
    sym = 0.5 * (m + m.T)
    eigenvalues, eigenvectors = np.linalg.eigh(sym)
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def spectral_coefficients(lam: float, t: float) -> SpectralCoefficients:
    """Evaluate the scalar flow coefficients for eigenvalue ``lam`` at time ``t``.

    Uses the trig branch for ``lam < 0``, the hyperbolic branch for
    ``lam > 0``, and a truncated series in ``u = lam * t**2`` near zero.
    """
    u = lam * t * t
    if abs(u) < SERIES_THRESHOLD:
        c = 1.0 + u * (0.5 + u / 24.0)
        g = t * (1.0 + u * (1.0 / 6.0 + u / 120.0))
    elif lam < 0.0:
        at = math.sqrt(-lam) * t
        c = math.cos(at)
        g = math.sin(at) / math.sqrt(-lam)
    else:
        st = math.sqrt(lam) * t
        c = math.cosh(st)
        g = math.sinh(st) / math.sqrt(lam)

    if lam == 0.0 or g == 0.0:
        mean_coef = math.inf
        var_coef = math.inf
    else:
        mean_coef = -c / (lam * g)
        var_coef = -1.0 / (lam * g * g)
    return SpectralCoefficients(c=c, g=g, mean_coef=mean_coef, var_coef=var_coef)


def _drift_coefficient(lam: float, t: float) -> float:
    """Scalar gradient-to-position gain (c(t) - 1) / lam of the exact flow."""
    u = lam * t * t
    if abs(u) < SERIES_THRESHOLD:
        return 0.5 * t * t * (1.0 + u * (1.0 / 12.0 + u / 360.0))
    return (spectral_coefficients(lam, t).c - 1.0) / lam


def momentum_law(model: QuadraticModel, floors: Floors = Floors()) -> MomentumLaw:
    """Build the momentum-refresh law N(mean, Q) for a quadratic model.

    Per eigenvalue the regularized value ``min(lam, -lam_floor)`` is used,
    so every direction behaves as log-concave; inside the variance the
    factor sin^2(a*t) is floored at ``s2_floor`` to survive resonance.
    The result is a deterministic pure function of (H, gradient, time,
    floors); ``clamped`` reports how many directions hit either floor.
    """
    lam = model.spectrum.eigenvalues
    u = model.spectrum.eigenvectors
    t = model.trajectory_time

    lam_reg = np.minimum(lam, -floors.lam_floor)
    clamped = int(np.count_nonzero(lam > -floors.lam_floor))

    dim = lam.shape[0]
    mean_gain = np.empty(dim)
    cov_eigs = np.empty(dim)
    for i in range(dim):
        coef = spectral_coefficients(float(lam_reg[i]), t)
        mean_gain[i] = coef.mean_coef
        sin_sq = -float(lam_reg[i]) * coef.g * coef.g
        if sin_sq < floors.s2_floor:
            sin_sq = floors.s2_floor
            clamped += 1
        cov_eigs[i] = 1.0 / sin_sq

    mean = u @ (mean_gain * (u.T @ model.grad))
    log_det = float(np.sum(np.log(cov_eigs)))
    return MomentumLaw(
        mean=mean, eigvecs=u, cov_eigs=cov_eigs, log_det_cov=log_det, clamped=clamped
    )


def standard_momentum_law(dim: int) -> MomentumLaw:
    """The plain HMC refresh law N(0, I)."""
    return MomentumLaw(
        mean=np.zeros(dim),
        eigvecs=np.eye(dim),
        cov_eigs=np.ones(dim),
        log_det_cov=0.0,
        clamped=0,
    )


def sample_momentum(law: MomentumLaw, rng: np.random.Generator) -> np.ndarray:
    """Draw one momentum vector from N(mean, Q)."""
    z = rng.standard_normal(law.dim)
    return law.mean + law.eigvecs @ (np.sqrt(law.cov_eigs) * z)


def momentum_log_density(law: MomentumLaw, p) -> float:
    """Log-density of N(mean, Q) at ``p``, evaluated in the eigenbasis."""
    p = np.asarray(p, dtype=float)
    if p.shape != (law.dim,):
        raise ConfigurationError(f"momentum has shape {p.shape}, expected ({law.dim},)")
    y = law.eigvecs.T @ (p - law.mean)
    quad = float(np.sum(y * y / law.cov_eigs))
    return -0.5 * (law.dim * LOG_2PI + law.log_det_cov + quad)


def exact_quadratic_flow(model: QuadraticModel, x0, p0, t: float):
    """Exact solution of dx/dt = p, dp/dt = H x + v at time ``t``.

    Evaluated per eigendirection of H, so no inverse of H is formed and
    zero eigenvalues are handled by the series branch:

        x(t) = C x0 + G p0 + (C - I) H^{-1} v
        p(t) = H G x0 + C p0 + G v
    """
    x0 = np.asarray(x0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    lam = model.spectrum.eigenvalues
    u = model.spectrum.eigenvectors

    xb = u.T @ x0
    pb = u.T @ p0
    vb = u.T @ model.grad

    dim = lam.shape[0]
    x_out = np.empty(dim)
    p_out = np.empty(dim)
    for i in range(dim):
        li = float(lam[i])
        coef = spectral_coefficients(li, t)
        w = _drift_coefficient(li, t)
        x_out[i] = coef.c * xb[i] + coef.g * pb[i] + w * vb[i]
        p_out[i] = li * coef.g * xb[i] + coef.c * pb[i] + coef.g * vb[i]
    return u @ x_out, u @ p_out


def flow_matrix(spectrum: Spectrum, t: float) -> np.ndarray:
    """Assemble the 2d x 2d phase-space propagator [[C, G], [H G, C]]."""
    lam = spectrum.eigenvalues
    u = spectrum.eigenvectors
    dim = lam.shape[0]
    c = np.empty(dim)
    g = np.empty(dim)
    for i in range(dim):
        coef = spectral_coefficients(float(lam[i]), t)
        c[i] = coef.c
        g[i] = coef.g
    cm = (u * c) @ u.T
    gm = (u * g) @ u.T
    hgm = (u * (lam * g)) @ u.T
    top = np.hstack([cm, gm])
    bottom = np.hstack([hgm, cm])
    return np.vstack([top, bottom])


def rk4_moments(a: np.ndarray, b: np.ndarray, init: MomentState, t: float, nsteps: int) -> MomentState:
    """Classical Runge-Kutta for dm/dt = A m + b, dS/dt = A S + S A^T."""
    if nsteps < 1:
        raise ConfigurationError("nsteps must be >= 1")
    h = t / nsteps
    m = init.mean.astype(float).copy()
    s = init.cov.astype(float).copy()

    def fm(mv):
        return a @ mv + b

    def fs(sv):
        asv = a @ sv
        return asv + asv.T

    for _ in range(nsteps):
        k1m, k1s = fm(m), fs(s)
        k2m, k2s = fm(m + 0.5 * h * k1m), fs(s + 0.5 * h * k1s)
        k3m, k3s = fm(m + 0.5 * h * k2m), fs(s + 0.5 * h * k2s)
        k4m, k4s = fm(m + h * k3m), fs(s + h * k3s)
        m = m + (h / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
        s = s + (h / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
    return MomentState(mean=m, cov=s)


def integrate_moment_ode(model: QuadraticModel, init: MomentState, t: float, nsteps: int = 1000) -> MomentState:
    """Integrate the phase-space moment ODEs of the quadratic model.

    The drift is A = [[0, I], [H, 0]] with offset b = (0, v); serves as an
    independent numerical oracle for the closed-form propagator.
    """
    dim = model.spectrum.dim
    h = model.spectrum.reconstruct()
    a = np.zeros((2 * dim, 2 * dim))
    a[:dim, dim:] = np.eye(dim)
    a[dim:, :dim] = h
    b = np.concatenate([np.zeros(dim), model.grad])
    return rk4_moments(a, b, init, t, nsteps)
