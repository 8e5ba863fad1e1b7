"""Chain summary statistics: autocorrelation, effective sample size, moments.

ESS uses the initial-positive-sequence truncation: autocorrelations are
summed in adjacent pairs and the sum stops at the first non-positive
pair, which is parameter-free and robust for reversible chains.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RunSummary:
    """Per-coordinate statistics and bookkeeping for one chain."""

    mean: np.ndarray
    std: np.ndarray
    lag1: np.ndarray
    ess: np.ndarray
    acceptance_rate: float
    clamp_events: int = 0
    seconds: float = 0.0
    grad_evals: int = 0
    hessian_evals: int = 0
    std_ratio: np.ndarray | None = None   # sample std / true marginal std
    degenerate: tuple[int, ...] = ()      # coordinates with zero variance

    def to_dict(self) -> dict:
        """Plain-types view for JSON serialization."""
        out = {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "lag1": self.lag1.tolist(),
            "ess": self.ess.tolist(),
            "acceptance_rate": self.acceptance_rate,
            "clamp_events": self.clamp_events,
            "seconds": self.seconds,
            "grad_evals": self.grad_evals,
            "hessian_evals": self.hessian_evals,
            "degenerate": list(self.degenerate),
        }
        if self.std_ratio is not None:
            out["std_ratio"] = self.std_ratio.tolist()
        return out


def _validated_series(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise ValueError("series must be finite")
    return x


def autocorrelation(x, lag: int) -> float:
    """Biased autocorrelation estimate at the given lag.

    A constant series has no autocorrelation; by convention it returns 0
    for lag >= 1 (with a RuntimeWarning) and 1 at lag 0.
    """
    x = _validated_series(x)
    if lag < 0:
        raise ValueError("lag must be non-negative")
    n = x.shape[0]
    if n <= lag:
        raise ValueError("series must be longer than the lag")
    d = x - x.mean()
    denom = float(d @ d)
    if denom == 0.0:
        warnings.warn("autocorrelation of a constant series", RuntimeWarning)
        return 0.0 if lag >= 1 else 1.0
    if lag == 0:
        return 1.0
    return float(d[:-lag] @ d[lag:]) / denom


def _autocorrelations(d: np.ndarray) -> np.ndarray:
    """All biased autocorrelations of a demeaned series via FFT."""
    n = d.shape[0]
    size = 1
    while size < 2 * n:
        size *= 2
    f = np.fft.rfft(d, size)
    acov = np.fft.irfft(f * np.conj(f), size)[:n]
    return acov / acov[0]


def ess(x) -> float:
    """Effective sample size n / (1 + 2 sum of autocorrelations).

    The sum is truncated at the first adjacent pair of autocorrelations
    with a non-positive sum.  A constant series returns n (degenerate,
    with a RuntimeWarning).
    """
    x = _validated_series(x)
    n = x.shape[0]
    if n < 10:
        raise ValueError("series must have at least 10 values")
    d = x - x.mean()
    if float(d @ d) == 0.0:
        warnings.warn("ess of a constant series", RuntimeWarning)
        return float(n)

    rho = _autocorrelations(d)
    pair_total = 0.0
    m = 0
    while 2 * m + 1 < n:
        pair = rho[2 * m] + rho[2 * m + 1]
        if pair <= 0.0:
            break
        pair_total += pair
        m += 1
    tau = max(2.0 * pair_total - 1.0, 1.0 / n)
    return n / tau


def summarize(
    samples,
    accepts,
    truth=None,
    *,
    clamp_events: int = 0,
    seconds: float = 0.0,
    grad_evals: int = 0,
    hessian_evals: int = 0,
) -> RunSummary:
    """Per-coordinate summary of a chain sample matrix.

    ``truth``, when given, must expose ``marginal_std`` (per-coordinate
    true standard deviations) and enables the std-vs-truth ratio.  ESS is
    clipped to the number of rows.  Coordinates with zero variance are
    reported as degenerate with lag1 = 0 and ess = n.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise ValueError("samples must be a matrix with at least 2 rows")
    accepts = np.asarray(accepts, dtype=bool)
    n, dim = samples.shape

    mean = samples.mean(axis=0)
    std = samples.std(axis=0, ddof=1)
    lag1 = np.zeros(dim)
    ess_vals = np.full(dim, float(n))
    degenerate = []
    for j in range(dim):
        if std[j] == 0.0:
            degenerate.append(j)
            continue
        lag1[j] = autocorrelation(samples[:, j], 1)
        if n >= 10:  # below the estimator's minimum length, keep ess = n
            ess_vals[j] = min(ess(samples[:, j]), float(n))

    std_ratio = None
    if truth is not None:
        std_ratio = std / np.asarray(truth.marginal_std, dtype=float)

    return RunSummary(
        mean=mean,
        std=std,
        lag1=lag1,
        ess=ess_vals,
        acceptance_rate=float(accepts.mean()),
        clamp_events=clamp_events,
        seconds=seconds,
        grad_evals=grad_evals,
        hessian_evals=hessian_evals,
        std_ratio=std_ratio,
        degenerate=tuple(degenerate),
    )
