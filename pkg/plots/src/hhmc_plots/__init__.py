"""Figure generation for hhmc chain outputs (CSV + comparison JSON)."""

from .figures import (
    ChainData,
    FigureSpec,
    build_density_figure,
    build_trace_figure,
    empirical_density,
    load_chain,
    load_truth_std,
    plot_densities,
    plot_traces,
)

__all__ = [
    "ChainData",
    "FigureSpec",
    "build_density_figure",
    "build_trace_figure",
    "empirical_density",
    "load_chain",
    "load_truth_std",
    "plot_densities",
    "plot_traces",
]
