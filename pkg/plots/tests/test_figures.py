"""Unit tests for chain loading, density estimation and figure building."""

import json
import math

import numpy as np
import pytest

from hhmc_plots import (
    FigureSpec,
    build_trace_figure,
    empirical_density,
    load_chain,
    load_truth_std,
    plot_densities,
    plot_traces,
)


def write_chain_csv(path, thetas, iters=None):
    """Emit a CSV in the sampler's documented schema."""
    n, dim = thetas.shape
    if iters is None:
        iters = np.arange(n)
    header = "iter,accepted,log_density," + ",".join(f"theta_{j}" for j in range(dim))
    lines = [header]
    for i in range(n):
        row = [str(int(iters[i])), "1", "0"]
        row.extend(format(v, ".17g") for v in thetas[i])
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def write_summary(path, truth_std):
    path.write_text(json.dumps({"target": "test", "truth_std": list(truth_std)}))


def test_load_chain_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    thetas = rng.standard_normal((50, 3))
    csv = tmp_path / "chain.csv"
    write_chain_csv(csv, thetas)
    chain = load_chain(csv)
    assert chain.dim == 3
    np.testing.assert_array_equal(chain.thetas, thetas)
    np.testing.assert_array_equal(chain.iters, np.arange(50))


def test_load_chain_rejects_empty_csv(tmp_path):
    csv = tmp_path / "empty.csv"
    csv.write_text("")
    with pytest.raises(ValueError, match="empty CSV"):
        load_chain(csv)
    header_only = tmp_path / "header.csv"
    header_only.write_text("iter,accepted,log_density,theta_0\n")
    with pytest.raises(ValueError, match="empty CSV"):
        load_chain(header_only)


def test_load_chain_names_missing_column(tmp_path):
    csv = tmp_path / "bad.csv"
    csv.write_text("iter,log_density,theta_0\n0,0,1.0\n")
    with pytest.raises(ValueError, match="'accepted'"):
        load_chain(csv)


def test_coords_outside_dimension_named(tmp_path):
    rng = np.random.default_rng(1)
    csv = tmp_path / "chain.csv"
    write_chain_csv(csv, rng.standard_normal((30, 2)))
    summary = tmp_path / "comparison.json"
    write_summary(summary, [1.0, 2.0])
    spec = FigureSpec(
        csv_path=csv,
        summary_path=summary,
        density_path=tmp_path / "d.png",
        trace_path=tmp_path / "t.png",
        coords=(0, 29),
    )
    with pytest.raises(ValueError, match="theta_29"):
        plot_densities(spec)
    assert not (tmp_path / "d.png").exists()


def test_load_truth_std(tmp_path):
    summary = tmp_path / "comparison.json"
    write_summary(summary, [1.0, 4.0])
    np.testing.assert_array_equal(load_truth_std(summary), [1.0, 4.0])
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    with pytest.raises(ValueError, match="truth_std"):
        load_truth_std(bad)


def test_empirical_density_integrates_to_one():
    rng = np.random.default_rng(5)
    x = rng.standard_normal(5000)
    centers, density = empirical_density(x, smooth=False)
    width = centers[1] - centers[0]
    assert np.sum(density) * width == pytest.approx(1.0, rel=1e-6)


def test_empirical_density_close_to_truth_for_large_sample():
    rng = np.random.default_rng(8)
    for sigma in (1.0, 110.0):
        x = rng.standard_normal(100_000) * sigma
        centers, density = empirical_density(x)
        width = centers[1] - centers[0]
        truth = np.exp(-0.5 * (centers / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
        iae = np.sum(np.abs(density - truth)) * width
        assert iae < 0.05


def test_plot_operations_write_files(tmp_path):
    rng = np.random.default_rng(3)
    thetas = rng.standard_normal((1000, 4)) * [110.0, 100.0, 12.0, 1.0]
    csv = tmp_path / "hhmc_samples.csv"
    write_chain_csv(csv, thetas)
    summary = tmp_path / "comparison.json"
    write_summary(summary, [110.0, 100.0, 12.0, 1.0])
    out = tmp_path / "figs" / "nested"  # created on demand
    spec = FigureSpec(
        csv_path=csv,
        summary_path=summary,
        density_path=out / "densities.png",
        trace_path=out / "traces.png",
        coords=(0, 1, 2, 3),
        label="hhmc",
    )
    density_file = plot_densities(spec)
    trace_file = plot_traces(spec)
    assert density_file.stat().st_size > 0
    assert trace_file.stat().st_size > 0


def test_trace_axis_spans_iteration_range(tmp_path):
    rng = np.random.default_rng(4)
    thetas = rng.standard_normal((1000, 2))
    csv = tmp_path / "chain.csv"
    write_chain_csv(csv, thetas)
    chain = load_chain(csv)
    fig = build_trace_figure(chain, coords=(0, 1))
    line = fig.axes[0].lines[0]
    xdata = line.get_xdata()
    assert xdata.min() == 0
    assert xdata.max() == 999


def test_constant_column_renders_flat_line(tmp_path):
    thetas = np.column_stack([np.full(100, 2.5), np.arange(100, dtype=float)])
    csv = tmp_path / "chain.csv"
    write_chain_csv(csv, thetas)
    summary = tmp_path / "comparison.json"
    write_summary(summary, [1.0, 1.0])
    spec = FigureSpec(
        csv_path=csv,
        summary_path=summary,
        density_path=tmp_path / "d.png",
        trace_path=tmp_path / "t.png",
        coords=(0, 1),
    )
    assert plot_traces(spec).stat().st_size > 0
