"""Command-line interface: ``loovar estimate | analytic | simulate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from .dgp import TrueMoments, true_products
from .harness import SimulationConfig, emit_report, load_config, run_experiment
from .moments import estimate_moment_products, raw_moments
from .normal_model import ModelConfig, as_dataset, coefficients, loo_pointwise_elpd
from .variance import expected_naive, fold_moments, naive_variance, total_variance, unbiased_variance


def read_dataset(path) -> np.ndarray:
    """One value per line; a single CSV column with an optional header also works."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            field = line.strip().split(",")[0].strip()
            if not field or field.startswith("#"):
                continue
            try:
                values.append(float(field))
            except ValueError:
                if values or lineno > 1:
                    raise ValueError(f"{path}:{lineno}: not a number: {field!r}") from None
    return as_dataset(values)


def _model(args) -> ModelConfig:
    return ModelConfig(sigma_m_sq=args.sigma_m_sq, sigma_0_sq=args.sigma_0_sq)


def cmd_estimate(args) -> dict:
    y = read_dataset(args.data)
    if args.moments:
        rm = raw_moments(y)
        mp = estimate_moment_products(rm)
        record = {k: v for k, v in asdict(rm).items()}
        record.update(
            mu2_sigma2=mp.mu2_sigma2, sigma4=mp.sigma4, mu_mu3=mp.mu_mu3, mu4_central=mp.mu4_central
        )
        return {k: float(v) if k != "n" else int(v) for k, v in record.items()}
    model = _model(args)
    pe = loo_pointwise_elpd(model, y)
    uv = unbiased_variance(model, y)
    return {
        "elpd_hat": float(pe.sum),
        "naive_var": float(naive_variance(pe).value),
        "unbiased_var": float(uv.value),
        "negative_flag": bool(uv.negative_flag),
    }


def cmd_analytic(args) -> dict:
    tm = TrueMoments(mu=args.mu, sigma_sq=args.sigma_sq, mu3=args.mu3, mu4=args.mu4)
    mp = true_products(tm)
    coef = coefficients(_model(args), args.n - 1)
    fm = fold_moments(coef, mp, args.n)
    return {
        "total_var": float(total_variance(coef, mp, args.n).value),
        "var_i": float(fm.var_i),
        "cov_ij": float(fm.cov_ij),
        "expected_naive": float(expected_naive(coef, mp, args.n)),
    }


def cmd_simulate(args) -> dict:
    if args.paper_defaults:
        cfg = SimulationConfig.reference_defaults()
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise ValueError("simulate needs --config or --paper-defaults")
    overrides = {}
    if args.reps is not None:
        overrides["replications"] = args.reps
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.bb_draws is not None:
        overrides["bb_draws"] = args.bb_draws
    if overrides:
        cfg = replace(cfg, **overrides)
    out = Path(args.out) if args.out else (cfg.output_path or Path("results"))
    t0 = time.perf_counter()
    report = run_experiment(cfg, workers=args.workers)
    paths = emit_report(report, out, args.format)
    logging.getLogger(__name__).info("done in %.1f s", time.perf_counter() - t0)
    return {k: str(v) for k, v in paths.items()}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loovar", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(p, required=True):
        p.add_argument("--sigma-m-sq", type=float, required=required, help="model data variance")
        p.add_argument("--sigma-0-sq", type=float, required=required, help="prior variance")

    p = sub.add_parser("estimate", help="LOO elpd and both variance estimates for a dataset")
    p.add_argument("data", help="file with one value per line")
    p.add_argument("--moments", action="store_true", help="emit raw moments and moment-product estimates")
    model_flags(p, required=False)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("analytic", help="analytic variance from true moments")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sigma-sq", type=float, required=True)
    p.add_argument("--mu3", type=float, required=True)
    p.add_argument("--mu4", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    model_flags(p)
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="Monte Carlo calibration experiment")
    p.add_argument("--config", help="TOML experiment file")
    p.add_argument("--paper-defaults", action="store_true", help="use the reference settings instead of --config")
    p.add_argument("--reps", type=int, help="replications per DGP")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--bb-draws", type=int, help="Bayesian bootstrap draws")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "estimate" and not args.moments and (args.sigma_m_sq is None or args.sigma_0_sq is None):
        parser.error("estimate needs --sigma-m-sq and --sigma-0-sq (unless --moments)")
    try:
        result = args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"loovar: error: {exc}", file=sys.stderr)
        return 1
    json.dump(result, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
