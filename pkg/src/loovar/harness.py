"""Monte Carlo calibration of the naive and unbiased variance estimators.

Each replication draws one dataset from a DGP and records the LOO-elpd sum,
the naive variance estimate and the unbiased variance estimate.  Expectations
of the two estimator columns are summarised with the Bayesian bootstrap and
set against the analytic target variance and the analytic expectation of the
naive estimator.

Randomness: replication ``r`` of DGP ``j`` draws from its own stream, seeded by
``SeedSequence(seed, spawn_key=(j, 0, r))``; bootstrap column ``c`` of DGP
``j`` uses ``spawn_key=(j, 1, c)``.  Replications are processed in fixed
blocks of `BLOCK` rows, so results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dgp import DgpSpec, reference_dgps, sample, true_moments, true_products
from .normal_model import ModelConfig, coefficients, loo_pointwise_elpd
from .variance import expected_naive, naive_variance, total_variance, unbiased_variance

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

BLOCK = 1024
REFERENCE_MODEL = ModelConfig(sigma_m_sq=1.2**2, sigma_0_sq=2.0**2)
DEFAULT_SEED = 2020

SUMMARY_FIELDS = [
    "dgp",
    "seed",
    "n",
    "replications",
    "analytic_var",
    "analytic_expected_naive",
    "naive_bb_mean",
    "naive_bb_lo",
    "naive_bb_hi",
    "unbiased_bb_mean",
    "unbiased_bb_lo",
    "unbiased_bb_hi",
    "n_negative_unbiased",
    "sqrt_ratio_analytic_var",
    "sqrt_ratio_analytic_expected_naive",
    "sqrt_ratio_naive_bb_mean",
    "sqrt_ratio_naive_bb_lo",
    "sqrt_ratio_naive_bb_hi",
    "sqrt_ratio_unbiased_bb_mean",
    "sqrt_ratio_unbiased_bb_lo",
    "sqrt_ratio_unbiased_bb_hi",
]
RAW_FIELDS = ["dgp", "rep", "elpd_hat", "naive_var", "unbiased_var", "negative_flag"]


class SimulationError(RuntimeError):
    pass


@dataclass
class SimulationConfig:
    dgps: list[DgpSpec] = field(default_factory=reference_dgps)
    n: int = 16
    replications: int = 20_000
    bb_draws: int = 4_000
    bb_alpha: float = 1.0
    model: ModelConfig = REFERENCE_MODEL
    seed: int = DEFAULT_SEED
    output_path: Path | None = None

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"n must be >= 4, got {self.n}")
        if self.replications < 2:
            raise ValueError(f"replications must be >= 2, got {self.replications}")
        if self.bb_draws < 2:
            raise ValueError(f"bb_draws must be >= 2, got {self.bb_draws}")
        if not (math.isfinite(self.bb_alpha) and self.bb_alpha > 0):
            raise ValueError(f"bb_alpha must be positive, got {self.bb_alpha}")
        if self.output_path is not None:
            self.output_path = Path(self.output_path)

    @classmethod
    def reference_defaults(cls, **overrides) -> "SimulationConfig":
        return cls(**overrides)


@dataclass(frozen=True)
class BootstrapSummary:
    mean: float
    ci_low: float
    ci_high: float
    draws_used: int


@dataclass
class DgpResult:
    spec: DgpSpec
    analytic_total_var: float
    analytic_expected_naive: float
    naive_bb: BootstrapSummary
    unbiased_bb: BootstrapSummary
    elpd_hat: np.ndarray
    naive_var: np.ndarray
    unbiased_var: np.ndarray

    @property
    def negative_flag(self) -> np.ndarray:
        return self.unbiased_var < 0

    def sqrt_ratio(self, x: float) -> float:
        """``sqrt(x / analytic_total_var)``, NaN when undefined (negative x)."""
        if x < 0 or not self.analytic_total_var > 0:
            return math.nan
        return math.sqrt(x / self.analytic_total_var)


@dataclass
class SimulationReport:
    config: SimulationConfig
    results: list[DgpResult]


def bayesian_bootstrap(
    values, draws: int, alpha: float, rng: np.random.Generator, chunk: int = 256
) -> BootstrapSummary:
    """Bayesian bootstrap of the mean of `values`.

    Each draw weights the values by ``w ~ Dirichlet(alpha, ..., alpha)``
    (normalised Gamma(alpha, 1) variates) and records ``sum(w * v)``.  The
    interval is the equal-tailed 2.5/97.5 percentile range of the draws.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need a 1-d sequence of at least 2 values")
    if draws < 2:
        raise ValueError(f"need at least 2 draws, got {draws}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    out = np.empty(draws)
    for start in range(0, draws, chunk):
        stop = min(start + chunk, draws)
        g = rng.standard_gamma(alpha, size=(stop - start, v.size))
        out[start:stop] = (g @ v) / g.sum(axis=1)
    lo, hi = np.quantile(out, [0.025, 0.975])
    mean = float(np.mean(out))
    # guard against rounding placing the mean a hair outside a degenerate interval
    return BootstrapSummary(
        mean=mean, ci_low=float(min(lo, mean)), ci_high=float(max(hi, mean)), draws_used=draws
    )


def replication_rng(seed: int, dgp_index: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(dgp_index, 0, rep))))


def bootstrap_rng(seed: int, dgp_index: int, column: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(dgp_index, 1, column))))


def _simulate_block(args):
    spec, model, n, seed, dgp_index, start, stop = args
    y = np.empty((stop - start, n))
    for row, rep in enumerate(range(start, stop)):
        y[row] = sample(spec, n, replication_rng(seed, dgp_index, rep))
    pe = loo_pointwise_elpd(model, y)
    naive = naive_variance(pe).value
    unbiased = unbiased_variance(model, y).value
    cols = np.stack([np.atleast_1d(pe.sum), np.atleast_1d(naive), np.atleast_1d(unbiased)])
    bad = ~np.all(np.isfinite(cols), axis=0)
    if bad.any():
        raise SimulationError(
            f"non-finite estimate in DGP {spec.label!r} at replication {start + int(np.argmax(bad))}"
        )
    return cols


def simulate_columns(cfg: SimulationConfig, dgp_index: int, workers: int = 1) -> np.ndarray:
    """Replication-level ``(elpd_hat, naive_var, unbiased_var)`` as a (3, reps) array."""
    spec = cfg.dgps[dgp_index]
    seed = cfg.seed if spec.seed is None else spec.seed
    tasks = [
        (spec, cfg.model, cfg.n, seed, dgp_index, start, min(start + BLOCK, cfg.replications))
        for start in range(0, cfg.replications, BLOCK)
    ]
    if workers <= 1 or len(tasks) == 1:
        blocks = [_simulate_block(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_simulate_block, tasks))
    return np.concatenate(blocks, axis=1)


def run_experiment(cfg: SimulationConfig, workers: int = 1) -> SimulationReport:
    coef = coefficients(cfg.model, cfg.n - 1)
    results = []
    for j, spec in enumerate(cfg.dgps):
        log.info("simulating %s: %d replications of n=%d", spec.label, cfg.replications, cfg.n)
        elpd_hat, naive, unbiased = simulate_columns(cfg, j, workers)
        seed = cfg.seed if spec.seed is None else spec.seed
        mp = true_products(true_moments(spec))
        results.append(
            DgpResult(
                spec=spec,
                analytic_total_var=float(total_variance(coef, mp, cfg.n).value),
                analytic_expected_naive=float(expected_naive(coef, mp, cfg.n)),
                naive_bb=bayesian_bootstrap(naive, cfg.bb_draws, cfg.bb_alpha, bootstrap_rng(seed, j, 0)),
                unbiased_bb=bayesian_bootstrap(
                    unbiased, cfg.bb_draws, cfg.bb_alpha, bootstrap_rng(seed, j, 1)
                ),
                elpd_hat=elpd_hat,
                naive_var=naive,
                unbiased_var=unbiased,
            )
        )
    return SimulationReport(config=cfg, results=results)


def summary_rows(report: SimulationReport) -> list[dict]:
    rows = []
    for r in report.results:
        row = {
            "dgp": r.spec.label,
            "seed": report.config.seed if r.spec.seed is None else r.spec.seed,
            "n": report.config.n,
            "replications": int(r.elpd_hat.size),
            "analytic_var": r.analytic_total_var,
            "analytic_expected_naive": r.analytic_expected_naive,
            "naive_bb_mean": r.naive_bb.mean,
            "naive_bb_lo": r.naive_bb.ci_low,
            "naive_bb_hi": r.naive_bb.ci_high,
            "unbiased_bb_mean": r.unbiased_bb.mean,
            "unbiased_bb_lo": r.unbiased_bb.ci_low,
            "unbiased_bb_hi": r.unbiased_bb.ci_high,
            "n_negative_unbiased": int(np.sum(r.negative_flag)),
            "sqrt_ratio_analytic_var": r.sqrt_ratio(r.analytic_total_var),
            "sqrt_ratio_analytic_expected_naive": r.sqrt_ratio(r.analytic_expected_naive),
        }
        for est in ("naive", "unbiased"):
            for stat in ("mean", "lo", "hi"):
                row[f"sqrt_ratio_{est}_bb_{stat}"] = r.sqrt_ratio(row[f"{est}_bb_{stat}"])
        rows.append(row)
    return rows


def raw_rows(report: SimulationReport):
    for r in report.results:
        flags = r.negative_flag
        for rep in range(r.elpd_hat.size):
            yield {
                "dgp": r.spec.label,
                "rep": rep,
                "elpd_hat": float(r.elpd_hat[rep]),
                "naive_var": float(r.naive_var[rep]),
                "unbiased_var": float(r.unbiased_var[rep]),
                "negative_flag": int(flags[rep]),
            }


def _fmt(value):
    # repr gives the shortest string that round-trips
    if isinstance(value, float):
        return repr(value)
    return value


def _write_csv(path: Path, fields, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _write_json(path: Path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([{k: _json_safe(v) for k, v in row.items()} for row in rows], fh, indent=1)
        fh.write("\n")


def config_record(cfg: SimulationConfig) -> dict:
    return {
        "n": cfg.n,
        "replications": cfg.replications,
        "bb_draws": cfg.bb_draws,
        "bb_alpha": cfg.bb_alpha,
        "seed": cfg.seed,
        "model": asdict(cfg.model),
        "dgps": [{"kind": d.kind, "params": list(d.params), "seed": d.seed, "label": d.label} for d in cfg.dgps],
    }


def emit_report(report: SimulationReport, out_dir, fmt: str = "csv") -> dict[str, Path]:
    """Write ``summary.<fmt>``, ``raw.<fmt>`` and ``run.json`` into `out_dir`."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    out_dir = Path(out_dir)
    paths = {
        "summary": out_dir / f"summary.{fmt}",
        "raw": out_dir / f"raw.{fmt}",
        "run": out_dir / "run.json",
    }
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            _write_csv(paths["summary"], SUMMARY_FIELDS, summary_rows(report))
            _write_csv(paths["raw"], RAW_FIELDS, raw_rows(report))
        else:
            _write_json(paths["summary"], summary_rows(report))
            _write_json(paths["raw"], list(raw_rows(report)))
        with open(paths["run"], "w", encoding="utf-8") as fh:
            json.dump(config_record(report.config), fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed writing report to {out_dir}: {exc}") from exc
    return paths


def _dgp_from_table(t: dict) -> DgpSpec:
    kind = t.get("kind")
    seed = t.get("seed")
    label = t.get("label", "")
    if kind == "normal":
        spread_is = t.get("spread_is", "sd")
        spread = t["variance"] if "variance" in t else t["sd"]
        if "variance" in t:
            spread_is = "variance"
        return DgpSpec.normal(t["mean"], spread, spread_is=spread_is, seed=seed, label=label)
    if kind == "skew_normal":
        return DgpSpec.skew_normal(t["location"], t["scale"], t["shape"], seed=seed, label=label)
    raise ValueError(f"unknown DGP kind {kind!r}")


def load_config(path) -> SimulationConfig:
    """Read a TOML experiment description (see ``configs/reference.toml``)."""
    path = Path(path)
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    known = {"n", "replications", "bb_draws", "bb_alpha", "seed", "output", "model", "dgp"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    kw = {k: doc[k] for k in ("n", "replications", "bb_draws", "bb_alpha", "seed") if k in doc}
    if "model" in doc:
        kw["model"] = ModelConfig(**doc["model"])
    if "dgp" in doc:
        kw["dgps"] = [_dgp_from_table(t) for t in doc["dgp"]]
    if "output" in doc:
        kw["output_path"] = path.parent / doc["output"]
    return SimulationConfig(**kw)
