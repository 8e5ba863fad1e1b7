"""HMC sampling with a Hessian-derived momentum-refresh law.

The public surface: target models (`GaussianTarget`, `build_neal_target`,
`check_derivatives`), the spectral momentum-law machinery, the leapfrog
integrator, the `hmc`/`hhmc` transition kernels with `run_chain`, chain
diagnostics, and a CLI (`hhmc run | benchmark-neal | check`).
"""

from .diagnostics import RunSummary, autocorrelation, ess, summarize
from .errors import ConfigurationError, EvaluationError
from .integrator import LeapfrogConfig, LeapfrogResult, hamiltonian, leapfrog
from .model import (
    DerivativeReport,
    GaussianTarget,
    TargetModel,
    build_neal_target,
    check_derivatives,
    gaussian_target_from_json,
)
from .samplers import (
    ChainRun,
    ChainState,
    SamplerConfig,
    hhmc_log_accept_ratio,
    hhmc_step,
    hmc_step,
    init_state,
    run_chain,
)
from .spectral import (
    Floors,
    MomentState,
    MomentumLaw,
    QuadraticModel,
    SpectralCoefficients,
    Spectrum,
    eigendecompose_sym,
    exact_quadratic_flow,
    flow_matrix,
    integrate_moment_ode,
    momentum_law,
    momentum_log_density,
    rk4_moments,
    sample_momentum,
    spectral_coefficients,
    standard_momentum_law,
)

__all__ = [
    "ChainRun",
    "ChainState",
    "ConfigurationError",
    "DerivativeReport",
    "EvaluationError",
    "Floors",
    "GaussianTarget",
    "LeapfrogConfig",
    "LeapfrogResult",
    "MomentState",
    "MomentumLaw",
    "QuadraticModel",
    "RunSummary",
    "SamplerConfig",
    "SpectralCoefficients",
    "Spectrum",
    "TargetModel",
    "autocorrelation",
    "build_neal_target",
    "check_derivatives",
    "eigendecompose_sym",
    "ess",
    "exact_quadratic_flow",
    "flow_matrix",
    "gaussian_target_from_json",
    "hamiltonian",
    "hhmc_log_accept_ratio",
    "hhmc_step",
    "hmc_step",
    "init_state",
    "integrate_moment_ode",
    "leapfrog",
    "momentum_law",
    "momentum_log_density",
    "rk4_moments",
    "run_chain",
    "sample_momentum",
    "spectral_coefficients",
    "standard_momentum_law",
    "summarize",
]

__version__ = "0.1.0"
