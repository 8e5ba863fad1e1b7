"""Command-line interface: run experiments, benchmark, self-check.

Subcommands:
  run             one chain from a JSON config or flags; writes
                  samples.csv + summary.json
  benchmark-neal  both samplers on the 30-D heterogeneous-scale Gaussian;
                  writes hmc_samples.csv, hhmc_samples.csv, comparison.json
  check           derivative and spectral self-tests for a target

Exit codes: 0 success, 2 configuration error, 3 runtime/I-O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagnostics import RunSummary
from .errors import ConfigurationError, EvaluationError
from .integrator import LeapfrogConfig
from .model import (
    GaussianTarget,
    build_neal_target,
    check_derivatives,
    gaussian_target_from_json,
)
from .samplers import ChainRun, SamplerConfig, run_chain
from .spectral import (
    Floors,
    QuadraticModel,
    eigendecompose_sym,
    exact_quadratic_flow,
    flow_matrix,
    momentum_law,
)

CSV_FLOAT_FORMAT = ".17g"

_REQUIRED_FIELDS = ("target", "sampler", "epsilon", "steps", "iterations", "seed", "out")
_OPTIONAL_DEFAULTS = {"burnin": 0, "lambda_floor": 1e-6, "s2_floor": 1e-12}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved description of one sampling run."""

    target: str          # "neal" or path to a Gaussian JSON file
    sampler: str         # "hmc" or "hhmc"
    epsilon: float
    steps: int
    iterations: int
    seed: int
    out: str
    burnin: int = 0
    lambda_floor: float = 1e-6
    s2_floor: float = 1e-12

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _validate_config(cfg: RunConfig) -> RunConfig:
    if cfg.sampler not in ("hmc", "hhmc"):
        raise ConfigurationError(f"unknown sampler {cfg.sampler!r}")
    if not (isinstance(cfg.epsilon, (int, float)) and cfg.epsilon > 0):
        raise ConfigurationError("epsilon must be positive")
    if not (isinstance(cfg.steps, int) and cfg.steps >= 1):
        raise ConfigurationError("steps must be an integer >= 1")
    if not (isinstance(cfg.iterations, int) and cfg.iterations >= 1):
        raise ConfigurationError("iterations must be an integer >= 1")
    if not isinstance(cfg.seed, int):
        raise ConfigurationError("seed must be an integer")
    if not (isinstance(cfg.burnin, int) and 0 <= cfg.burnin < cfg.iterations):
        raise ConfigurationError("burnin must be an integer in [0, iterations)")
    if not (isinstance(cfg.lambda_floor, (int, float)) and cfg.lambda_floor > 0):
        raise ConfigurationError("lambda_floor must be positive")
    if not (isinstance(cfg.s2_floor, (int, float)) and cfg.s2_floor > 0):
        raise ConfigurationError("s2_floor must be positive")
    if not isinstance(cfg.target, str) or not cfg.target:
        raise ConfigurationError("target must be a non-empty string")
    if not isinstance(cfg.out, str) or not cfg.out:
        raise ConfigurationError("out must be a non-empty string")
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration; unknown keys are rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigurationError("config must be a JSON object")

    known = set(_REQUIRED_FIELDS) | set(_OPTIONAL_DEFAULTS)
    for key in doc:
        if key not in known:
            raise ConfigurationError(f"unknown config key {key!r}")
    for key in _REQUIRED_FIELDS:
        if key not in doc:
            raise ConfigurationError(f"missing required config field {key!r}")

    merged = dict(_OPTIONAL_DEFAULTS)
    merged.update(doc)
    if isinstance(merged["epsilon"], int):
        merged["epsilon"] = float(merged["epsilon"])
    return _validate_config(RunConfig(**merged))


def resolve_target(spec: str) -> GaussianTarget:
    """Map a target spec ("neal" or a JSON file path) to a target."""
    if spec == "neal":
        return build_neal_target()
    path = Path(spec)
    if not path.exists():
        raise ConfigurationError(f"target {spec!r} is neither 'neal' nor an existing file")
    return gaussian_target_from_json(path.read_text())


def _fmt(x: float) -> str:
    return format(x, CSV_FLOAT_FORMAT)


def write_samples_csv(path: Path, run: ChainRun, burnin: int = 0) -> None:
    """Write the chain to CSV: iter,accepted,log_density,theta_0,...

    One row per iteration after burn-in; floats carry 17 significant
    digits so they round-trip exactly.
    """
    dim = run.samples.shape[1]
    header = "iter,accepted,log_density," + ",".join(f"theta_{j}" for j in range(dim))
    lines = [header]
    for i in range(burnin, run.samples.shape[0]):
        row = [str(i), str(int(run.accepted[i])), _fmt(run.log_densities[i])]
        row.extend(_fmt(x) for x in run.samples[i])
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _sampler_config(cfg: RunConfig) -> SamplerConfig:
    return SamplerConfig(
        kind=cfg.sampler,
        leapfrog=LeapfrogConfig(step_size=cfg.epsilon, n_steps=cfg.steps),
        iterations=cfg.iterations,
        seed=cfg.seed,
        floors=Floors(lam_floor=cfg.lambda_floor, s2_floor=cfg.s2_floor),
    )


def cmd_run(cfg: RunConfig) -> int:
    """Run one chain per the config; write samples.csv and summary.json."""
    cfg = _validate_config(cfg)
    target = resolve_target(cfg.target)
    run = run_chain(target, _sampler_config(cfg), np.zeros(target.dim))

    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_samples_csv(out_dir / "samples.csv", run, burnin=cfg.burnin)
    summary_doc = {"config": cfg.to_dict(), "summary": run.summary.to_dict()}
    (out_dir / "summary.json").write_text(json.dumps(summary_doc, indent=2) + "\n")
    print(
        f"{cfg.sampler}: {cfg.iterations} iterations, acceptance "
        f"{run.summary.acceptance_rate:.3f}, wrote {out_dir}/samples.csv"
    )
    return 0


def _comparison_entry(summary: RunSummary, epsilon: float) -> dict:
    entry = summary.to_dict()
    entry["epsilon"] = epsilon
    return entry


def cmd_benchmark_neal(
    eps_hmc: float = 0.2,
    eps_hhmc: float = 0.2,
    steps: int = 10,
    iterations: int = 1000,
    seed: int = 1,
    out: str = "neal_benchmark",
    burnin: int = 0,
    floors: Floors = Floors(),
) -> int:
    """Run both samplers on the heterogeneous-scale benchmark target."""
    target = build_neal_target()
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)

    runs: dict[str, ChainRun] = {}
    for kind, eps in (("hmc", eps_hmc), ("hhmc", eps_hhmc)):
        cfg = SamplerConfig(
            kind=kind,
            leapfrog=LeapfrogConfig(step_size=eps, n_steps=steps),
            iterations=iterations,
            seed=seed,
            floors=floors,
        )
        run = run_chain(target, cfg, np.zeros(target.dim))
        runs[kind] = run
        write_samples_csv(out_dir / f"{kind}_samples.csv", run, burnin=burnin)
        print(f"{kind}: acceptance {run.summary.acceptance_rate:.3f}")

    comparison = {
        "target": "neal",
        "dim": target.dim,
        "truth_std": target.marginal_std.tolist(),
        "settings": {
            "eps_hmc": eps_hmc,
            "eps_hhmc": eps_hhmc,
            "steps": steps,
            "iterations": iterations,
            "seed": seed,
            "burnin": burnin,
            "lambda_floor": floors.lam_floor,
            "s2_floor": floors.s2_floor,
        },
        "hmc": _comparison_entry(runs["hmc"].summary, eps_hmc),
        "hhmc": _comparison_entry(runs["hhmc"].summary, eps_hhmc),
    }
    (out_dir / "comparison.json").write_text(json.dumps(comparison, indent=2) + "\n")
    print(f"wrote {out_dir}/comparison.json")
    return 0


def cmd_check(targetspec: str, seed: int = 0) -> int:
    """Derivative checks plus spectral self-tests for a target; prints a report."""
    target = resolve_target(targetspec)
    rng = np.random.default_rng(seed)
    scale = target.marginal_std

    grad_ok = True
    hess_ok = True
    worst_grad = 0.0
    worst_hess = 0.0
    for _ in range(5):
        theta = rng.uniform(-3.0, 3.0, target.dim) * scale
        report = check_derivatives(target, theta)
        worst_grad = max(worst_grad, report.gradient_error)
        worst_hess = max(worst_hess, report.hessian_error)
        grad_ok = grad_ok and report.gradient_ok
        hess_ok = hess_ok and report.hessian_ok
    ok = grad_ok and hess_ok
    _print_check("gradient vs finite differences", grad_ok, f"max rel err {worst_grad:.3e}")
    _print_check("hessian vs finite differences", hess_ok, f"max rel err {worst_hess:.3e}")

    theta = rng.uniform(-1.0, 1.0, target.dim) * scale
    spectrum = eigendecompose_sym(target.hessian(theta))
    u = spectrum.eigenvectors
    ortho_err = float(np.abs(u.T @ u - np.eye(target.dim)).max())
    sym = 0.5 * (target.hessian(theta) + target.hessian(theta).T)
    recon_err = float(
        np.linalg.norm(spectrum.reconstruct() - sym) / max(np.linalg.norm(sym), 1e-300)
    )
    spec_ok = ortho_err <= 1e-10 and recon_err <= 1e-8
    ok = ok and spec_ok
    _print_check(
        "hessian eigendecomposition", spec_ok,
        f"orthonormality {ortho_err:.3e}, reconstruction {recon_err:.3e}",
    )

    delta = 2.0
    model = QuadraticModel(
        spectrum=spectrum, grad=target.gradient(theta), trajectory_time=delta
    )
    law = momentum_law(model)
    law_ok = bool(np.all(law.cov_eigs > 0.0)) and abs(
        law.log_det_cov - float(np.sum(np.log(law.cov_eigs)))
    ) <= 1e-12 * max(1.0, abs(law.log_det_cov))
    ok = ok and law_ok
    _print_check(
        "momentum law validity", law_ok,
        f"min cov eigenvalue {law.cov_eigs.min():.3e}, clamped {law.clamped}",
    )

    # Push the refresh law through the exact flow (in displacement
    # coordinates from theta): for a Gaussian target the proposal marginal
    # must reproduce the target mean and covariance.
    phi = flow_matrix(spectrum, delta)
    dim = target.dim
    cov0 = np.zeros((2 * dim, 2 * dim))
    cov0[dim:, dim:] = (law.eigvecs * law.cov_eigs) @ law.eigvecs.T
    x_mean, _ = exact_quadratic_flow(model, np.zeros(dim), law.mean, delta)
    cov_t = phi @ cov0 @ phi.T
    mean_err = float(np.abs(theta + x_mean - target.mean).max() / max(scale.max(), 1.0))
    cov_err = float(
        np.linalg.norm(cov_t[:dim, :dim] - target.cov) / np.linalg.norm(target.cov)
    )
    match_ok = mean_err <= 1e-6 and cov_err <= 1e-6
    ok = ok and match_ok
    _print_check(
        "proposal marginal matches target", match_ok,
        f"mean err {mean_err:.3e}, cov err {cov_err:.3e}",
    )

    print("PASS" if ok else "FAIL")
    return 0 if ok else 3


def _print_check(name: str, ok: bool, detail: str) -> None:
    print(f"  [{'ok' if ok else 'FAIL'}] {name}: {detail}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hhmc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one chain; write samples.csv + summary.json")
    run_p.add_argument("config_path", nargs="?", help="JSON config file")
    run_p.add_argument("--config", dest="config_flag", help="JSON config file")
    run_p.add_argument("--target", help="'neal' or path to Gaussian JSON")
    run_p.add_argument("--sampler", help="hmc or hhmc")
    run_p.add_argument("--epsilon", type=float, help="leapfrog step size")
    run_p.add_argument("--steps", type=int, help="leapfrog steps per trajectory")
    run_p.add_argument("--iterations", type=int, help="chain length")
    run_p.add_argument("--seed", type=int, help="random seed")
    run_p.add_argument("--burnin", type=int, help="iterations dropped from the CSV")
    run_p.add_argument("--lambda-floor", type=float, dest="lambda_floor")
    run_p.add_argument("--s2-floor", type=float, dest="s2_floor")
    run_p.add_argument("--out", help="output directory")

    bench_p = sub.add_parser("benchmark-neal", help="run both samplers on the 30-D benchmark")
    bench_p.add_argument("--eps-hmc", type=float, default=0.2)
    bench_p.add_argument("--eps-hhmc", type=float, default=0.2)
    bench_p.add_argument("--steps", type=int, default=10)
    bench_p.add_argument("--iterations", type=int, default=1000)
    bench_p.add_argument("--seed", type=int, default=1)
    bench_p.add_argument("--burnin", type=int, default=0)
    bench_p.add_argument("--out", default="neal_benchmark")

    check_p = sub.add_parser("check", help="derivative and spectral self-tests")
    check_p.add_argument("targetspec", help="'neal' or path to Gaussian JSON")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    path = args.config_flag or args.config_path
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file: {exc}") from None
        base = dataclasses.asdict(parse_config(text))
    else:
        base = dict(_OPTIONAL_DEFAULTS)

    for field in _REQUIRED_FIELDS + tuple(_OPTIONAL_DEFAULTS):
        value = getattr(args, field, None)
        if value is not None:
            base[field] = value
    missing = [f for f in _REQUIRED_FIELDS if f not in base or base[f] is None]
    if missing:
        raise ConfigurationError(f"missing required config field {missing[0]!r}")
    return _validate_config(RunConfig(**base))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(_config_from_args(args))
        if args.command == "benchmark-neal":
            return cmd_benchmark_neal(
                eps_hmc=args.eps_hmc,
                eps_hhmc=args.eps_hhmc,
                steps=args.steps,
                iterations=args.iterations,
                seed=args.seed,
                burnin=args.burnin,
                out=args.out,
            )
        if args.command == "check":
            return cmd_check(args.targetspec)
        raise ConfigurationError(f"unknown command {args.command!r}")
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (EvaluationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
