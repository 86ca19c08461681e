"""Multi-seed experiment drivers with reproducible seeding and summaries.

Trial i of an experiment uses the derived seed mix64((base_seed ^ salt) +
i * golden), so per-trial results are independent of execution order and
worker count; aggregation is an ordered fold by trial index.  Trials are
embarrassingly parallel and share nothing mutable beyond the result sink
(per-trial series are transient: only sign-change logs, extremes, and scalar
statistics are retained).

Statistical thresholds (minimum sign-change count, pass rates, majority
fractions) are configuration defaults calibrated by a pilot run, not
constants of any theorem; they are recorded in every manifest and reports
never fail on them unless the caller asks for assert mode.  The
completely-multiplicative model at alpha = 1/2 is always reporting-only:
whether those sums keep changing sign is open, and the tool must not claim
a pass or a fail there.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, dirichlet, mellin
from .errors import DomainError
from .output import atomic_write, fmt_float, sha256_text
from .primes import SpfTable, build_spf_sieve, primes_up_to
from .series import (
    Model,
    WeightedSumSeries,
    compute_series,
    detect_sign_changes,
    growth_statistic,
)
from .signs import SignAssignment, SignMode, prime_sign_table, trial_seed

EXPERIMENTS = ("sign-changes", "positivity", "harper", "divergence", "growth")

DEFAULT_HARPER_GRID = (0.58, 0.55, 0.52, 0.51)
DEFAULT_DIVERGENCE_GRID = (0.56, 0.54, 0.52)
GROWTH_THETAS = (0.0, 0.25, 0.5)
GROWTH_CHECKPOINTS = (10**4, 10**5, 10**6)

CSV_COLUMNS = {
    "sign-changes": ("trial", "seed", "count", "last_position"),
    "positivity": ("trial", "seed", "all_positive", "min_value"),
    "harper": (
        "trial",
        "seed",
        "sigma",
        "t_star",
        "sup_value",
        "centered_value",
        "grid_step",
        "prime_limit",
    ),
    "divergence": (
        "trial",
        "seed",
        "sigma",
        "signed",
        "absolute",
        "harper_witness",
        "N",
        "prime_limit",
    ),
    "growth": ("trial", "seed", "theta", "N", "value"),
}


def resolve_threads(threads: int | None) -> int:
    """Worker count: explicit value, else RMF_LAB_THREADS, else cpu count."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("RMF_LAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class ExperimentConfig:
    """Everything needed to bit-reproduce one experiment run."""

    experiment: str
    model: Model = Model.F
    alpha: float = 0.0
    limit: int = 10**6
    trials: int = 100
    base_seed: int = 42
    sign_mode: SignMode = SignMode.IID_RADEMACHER
    sigma_grid: tuple[float, ...] | None = None
    prime_limit: int | None = None
    grid_step: float | None = None
    threads: int | None = None
    output_path: str | None = None
    # Statistical acceptance defaults, calibrated by pilot (see README).
    min_sign_changes: int = 5
    pass_rate: float = 0.95
    positivity_rate: float = 0.99

    def __post_init__(self):
        self.model = Model(self.model)
        self.sign_mode = SignMode(self.sign_mode)
        if self.sigma_grid is not None:
            self.sigma_grid = tuple(float(x) for x in self.sigma_grid)
        if self.experiment == "harper" and self.sigma_grid is None:
            self.sigma_grid = DEFAULT_HARPER_GRID
        if self.experiment == "divergence" and self.sigma_grid is None:
            self.sigma_grid = DEFAULT_DIVERGENCE_GRID
        if self.experiment in ("harper", "divergence") and self.prime_limit is None:
            self.prime_limit = 10**6

    @property
    def reporting_only(self) -> bool:
        """No pass/fail is ever attached: the open alpha = 1/2 fstar probe
        and the growth envelope report distributions only."""
        if self.experiment == "growth":
            return True
        return (
            self.experiment == "sign-changes"
            and self.model is Model.F_STAR
            and self.alpha == 0.5
        )

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.limit < 1:
            raise DomainError(f"limit must be >= 1, got {self.limit}")
        if self.experiment == "sign-changes":
            if self.model is Model.F and not 0.0 <= self.alpha <= 0.5:
                raise DomainError(f"model f sign changes need alpha in [0, 1/2], got {self.alpha}")
            if self.model is Model.F_STAR and not 0.0 <= self.alpha <= 0.5:
                raise DomainError(
                    f"model fstar sign changes need alpha in [0, 1/2], got {self.alpha}"
                )
        elif self.experiment == "positivity":
            if self.model is not Model.F_STAR or self.alpha != 1.0:
                raise DomainError("positivity experiment requires model fstar and alpha = 1")
        elif self.experiment == "growth":
            if self.model is not Model.F or self.alpha != 0.0:
                raise DomainError("growth experiment requires model f and alpha = 0")
            if self.limit < 16:
                raise DomainError("growth experiment requires limit >= 16")
        if self.experiment in ("harper", "divergence"):
            if not self.sigma_grid:
                raise DomainError("sigma_grid is required")
            if any(b >= a for a, b in zip(self.sigma_grid, self.sigma_grid[1:])):
                raise DomainError("sigma_grid must be sorted strictly decreasing")
            low = 0.5 if self.experiment == "harper" else max(self.alpha, 0.5)
            for sig in self.sigma_grid:
                if not low < sig <= 0.6:
                    raise DomainError(f"sigma_grid entries must lie in ({low}, 0.6], got {sig}")
            if self.prime_limit is None or self.prime_limit < 2:
                raise DomainError("prime_limit >= 2 is required")
        if self.experiment == "divergence":
            if self.model is Model.F and not 0.0 <= self.alpha <= 0.5:
                raise DomainError(f"model f divergence needs alpha in [0, 1/2], got {self.alpha}")
            if self.model is Model.F_STAR and not 0.0 <= self.alpha < 0.5:
                raise DomainError(
                    f"model fstar divergence needs alpha in [0, 1/2), got {self.alpha}"
                )

    def assignment_for_trial(self, index: int) -> tuple[int, SignAssignment]:
        seed = trial_seed(self.base_seed, index)
        if self.sign_mode is SignMode.ALL_MINUS_ONE:
            return seed, SignAssignment.all_minus_one()
        return seed, SignAssignment.iid(seed)


@dataclass
class AggregateStats:
    """Ordered per-trial records plus a summary recomputable from them."""

    config: ExperimentConfig
    per_trial: list[dict] = field(repr=False)
    summary: dict

    @property
    def columns(self) -> tuple[str, ...]:
        return CSV_COLUMNS[self.config.experiment]


def _quantile_summary(values, prefix: str) -> dict:
    arr = np.asarray(values, dtype=np.float64)
    return {
        f"mean_{prefix}": float(np.mean(arr)),
        f"median_{prefix}": float(np.quantile(arr, 0.5)),
        f"q05_{prefix}": float(np.quantile(arr, 0.05)),
        f"q95_{prefix}": float(np.quantile(arr, 0.95)),
    }


def _map_trials(config: ExperimentConfig, worker) -> list:
    """Run worker(i) for each trial, results ordered by trial index."""
    n = config.trials
    threads = resolve_threads(config.threads)
    if threads <= 1 or n == 1:
        return [worker(i) for i in range(n)]
    results = [None] * n
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(worker, i): i for i in range(n)}
        for fut, i in futures.items():
            results[i] = fut.result()
    return results


def _shared_table(config: ExperimentConfig, table: SpfTable | None) -> SpfTable:
    need = max(config.limit, config.prime_limit or 2, 2)
    if table is not None:
        if table.limit < need:
            raise DomainError(f"provided sieve covers {table.limit} < required {need}")
        return table
    return build_spf_sieve(need)


# ---------------------------------------------------------------------------
# Individual experiments
# ---------------------------------------------------------------------------


def run_sign_change_experiment(
    config: ExperimentConfig, table: SpfTable | None = None
) -> AggregateStats:
    """Sign-change census of M_alpha over independent realizations.

    Per trial: crossing count and last crossing position.  The summary holds
    count quantiles and, except in the reporting-only regime, the fraction
    of trials with at least min_sign_changes crossings.
    """
    config.validate()
    if config.experiment != "sign-changes":
        raise DomainError("config.experiment must be 'sign-changes'")
    tab = _shared_table(config, table)

    def worker(i: int) -> dict:
        seed, assignment = config.assignment_for_trial(i)
        series = compute_series(assignment, config.model, config.alpha, config.limit, tab)
        log = detect_sign_changes(series)
        return {
            "trial": i,
            "seed": seed,
            "count": log.count,
            "last_position": int(log.positions[-1]) if log.count else 0,
        }

    records = _map_trials(config, worker)
    counts = [r["count"] for r in records]
    summary = _quantile_summary(counts, "count")
    summary["reporting_only"] = config.reporting_only
    if not config.reporting_only:
        summary["pass_fraction"] = float(
            np.mean([c >= config.min_sign_changes for c in counts])
        )
        summary["min_sign_changes"] = config.min_sign_changes
    return AggregateStats(config=config, per_trial=records, summary=summary)


def run_positivity_experiment(
    config: ExperimentConfig, table: SpfTable | None = None
) -> AggregateStats:
    """Probability that the harmonic fstar sums stay strictly positive.

    Per trial: the minimum of M_1(x) over 1 <= x <= N and the indicator that
    it is positive (equivalently that M_1(x) > 0 for all 2 <= x <= N, since
    M_1(1) = 1).
    """
    config.validate()
    if config.experiment != "positivity":
        raise DomainError("config.experiment must be 'positivity'")
    tab = _shared_table(config, table)

    def worker(i: int) -> dict:
        seed, assignment = config.assignment_for_trial(i)
        series = compute_series(assignment, Model.F_STAR, 1.0, config.limit, tab)
        min_value = float(np.min(series.values[1:]))
        return {
            "trial": i,
            "seed": seed,
            "all_positive": int(min_value > 0.0),
            "min_value": min_value,
        }

    records = _map_trials(config, worker)
    summary = _quantile_summary([r["min_value"] for r in records], "min_value")
    summary["pass_fraction"] = float(np.mean([r["all_positive"] for r in records]))
    return AggregateStats(config=config, per_trial=records, summary=summary)


def _sign_matrix(config: ExperimentConfig, primes: np.ndarray) -> np.ndarray:
    """Per-trial signs at the primes, one int8 row per trial."""
    out = np.empty((config.trials, len(primes)), dtype=np.int8)
    for i in range(config.trials):
        _, assignment = config.assignment_for_trial(i)
        out[i] = prime_sign_table(assignment, primes)
    return out


def run_harper_scan(config: ExperimentConfig, table: SpfTable | None = None) -> AggregateStats:
    """Sup-scan statistics per trial and sigma, with the trend summary.

    All trials of one sigma are scanned against shared cosine blocks (the
    grid depends only on sigma), which keeps the acceptance-scale run inside
    its time budget.  The summary reports the median centered value per
    sigma and whether the medians increase at every step of the
    (decreasing-sigma) grid.
    """
    config.validate()
    if config.experiment != "harper":
        raise DomainError("config.experiment must be 'harper'")
    tab = _shared_table(config, table)
    primes = primes_up_to(tab)
    primes = primes[primes <= config.prime_limit]
    logp = np.log(primes.astype(np.float64))
    signs = _sign_matrix(config, primes)
    seeds = [config.assignment_for_trial(i)[0] for i in range(config.trials)]

    by_trial: list[list[dict]] = [[] for _ in range(config.trials)]
    medians: dict[str, float] = {}
    for sigma in config.sigma_grid:
        step = config.grid_step if config.grid_step is not None else dirichlet.default_grid_step(sigma)
        t_end = dirichlet.harper_window(sigma)
        n_points = int(math.floor((t_end - 1.0) / step)) + 1
        weights = signs.astype(np.float64) * primes.astype(np.float64) ** (-sigma)
        sup_vals, t_stars = dirichlet.scan_grid_max(weights, logp, 1.0, step, n_points)
        centering = 2.0 * math.log(math.log(1.0 / (sigma - 0.5)))
        centered = sup_vals - centering
        for i in range(config.trials):
            by_trial[i].append(
                {
                    "trial": i,
                    "seed": seeds[i],
                    "sigma": float(sigma),
                    "t_star": float(t_stars[i]),
                    "sup_value": float(sup_vals[i]),
                    "centered_value": float(centered[i]),
                    "grid_step": float(step),
                    "prime_limit": config.prime_limit,
                }
            )
        medians[repr(float(sigma))] = float(np.quantile(centered, 0.5))
    records = [row for rows in by_trial for row in rows]
    med_list = [medians[repr(float(sig))] for sig in config.sigma_grid]
    trend_steps = sum(1 for a, b in zip(med_list, med_list[1:]) if b > a)
    summary = {
        "median_centered": medians,
        "trend_steps_increasing": trend_steps,
        "trend_steps_total": max(len(med_list) - 1, 0),
        "trend_increasing": trend_steps == max(len(med_list) - 1, 0),
    }
    return AggregateStats(config=config, per_trial=records, summary=summary)


def run_divergence_comparison(
    config: ExperimentConfig, table: SpfTable | None = None
) -> AggregateStats:
    """Signed vs absolute Mellin integrals with sup-scan witnesses, per trial.

    One assignment per trial is shared across the whole sigma grid.  The
    summary reports the fraction of trials whose absolute/|signed| ratio
    increases monotonically toward sigma = 1/2 and whether the triangle
    inequality absolute >= |signed| held everywhere (it must).
    """
    config.validate()
    if config.experiment != "divergence":
        raise DomainError("config.experiment must be 'divergence'")
    tab = _shared_table(config, table)

    def series_worker(i: int):
        seed, assignment = config.assignment_for_trial(i)
        series = compute_series(assignment, config.model, config.alpha, config.limit, tab)
        signed = []
        absolute = []
        for sigma in config.sigma_grid:
            sgn, absv = mellin.signed_and_absolute_integrals(series, sigma)
            signed.append(sgn)
            absolute.append(absv)
        return seed, assignment, signed, absolute

    base = _map_trials(config, series_worker)

    primes = primes_up_to(tab)
    primes = primes[primes <= config.prime_limit]
    logp = np.log(primes.astype(np.float64))
    signs = _sign_matrix(config, primes)
    product = (
        dirichlet.euler_product_F if config.model is Model.F else dirichlet.euler_product_F_star
    )

    witness = np.empty((config.trials, len(config.sigma_grid)))
    for k, sigma in enumerate(config.sigma_grid):
        step = config.grid_step if config.grid_step is not None else dirichlet.default_grid_step(sigma)
        n_points = int(math.floor((dirichlet.harper_window(sigma) - 1.0) / step)) + 1
        weights = signs.astype(np.float64) * primes.astype(np.float64) ** (-sigma)
        _, t_stars = dirichlet.scan_grid_max(weights, logp, 1.0, step, n_points)
        for i in range(config.trials):
            value = product(base[i][1], complex(sigma, t_stars[i]), config.prime_limit, tab)
            witness[i, k] = abs(value.value) / t_stars[i]

    records = []
    monotone_flags = []
    triangle_ok = True
    for i in range(config.trials):
        seed, _, signed, absolute = base[i]
        ratios = []
        for k, sigma in enumerate(config.sigma_grid):
            if absolute[k] < abs(signed[k]):
                triangle_ok = False
            ratios.append(absolute[k] / abs(signed[k]) if signed[k] != 0.0 else math.inf)
            records.append(
                {
                    "trial": i,
                    "seed": seed,
                    "sigma": float(sigma),
                    "signed": signed[k],
                    "absolute": absolute[k],
                    "harper_witness": float(witness[i, k]),
                    "N": config.limit,
                    "prime_limit": config.prime_limit,
                }
            )
        monotone_flags.append(all(b > a for a, b in zip(ratios, ratios[1:])))
    summary = {
        "fraction_ratio_monotone": float(np.mean(monotone_flags)),
        "triangle_inequality_ok": triangle_ok,
        "median_ratio": {
            repr(float(sigma)): float(
                np.quantile(
                    [
                        r["absolute"] / abs(r["signed"])
                        for r in records
                        if r["sigma"] == sigma and r["signed"] != 0.0
                    ],
                    0.5,
                )
            )
            for sigma in config.sigma_grid
        },
    }
    return AggregateStats(config=config, per_trial=records, summary=summary)


def run_growth_experiment(config: ExperimentConfig, table: SpfTable | None = None) -> AggregateStats:
    """Growth-envelope statistics max |M_0(x)| / (sqrt(x) (log log x)^theta).

    Reporting-only: quantiles per (theta, checkpoint N); asymptotic claims
    admit no finite-N pass/fail.
    """
    config.validate()
    if config.experiment != "growth":
        raise DomainError("config.experiment must be 'growth'")
    tab = _shared_table(config, table)
    checkpoints = [n for n in GROWTH_CHECKPOINTS if n <= config.limit] or [config.limit]

    def worker(i: int) -> list[dict]:
        seed, assignment = config.assignment_for_trial(i)
        series = compute_series(assignment, Model.F, 0.0, config.limit, tab)
        rows = []
        for n in checkpoints:
            prefix = series.values[1 : n + 1]
            sub = WeightedSumSeries.from_values(prefix, model=Model.F, alpha=0.0)
            for theta in GROWTH_THETAS:
                rows.append(
                    {
                        "trial": i,
                        "seed": seed,
                        "theta": float(theta),
                        "N": n,
                        "value": growth_statistic(sub, theta),
                    }
                )
        return rows

    nested = _map_trials(config, worker)
    records = [row for rows in nested for row in rows]
    cells = []
    for n in checkpoints:
        for theta in GROWTH_THETAS:
            vals = [r["value"] for r in records if r["N"] == n and r["theta"] == theta]
            cells.append(
                {
                    "theta": float(theta),
                    "N": n,
                    "median": float(np.quantile(vals, 0.5)),
                    "q95": float(np.quantile(vals, 0.95)),
                }
            )
    summary = {"cells": cells, "reporting_only": True}
    return AggregateStats(config=config, per_trial=records, summary=summary)


_RUNNERS = {
    "sign-changes": run_sign_change_experiment,
    "positivity": run_positivity_experiment,
    "harper": run_harper_scan,
    "divergence": run_divergence_comparison,
    "growth": run_growth_experiment,
}


def run_experiment(config: ExperimentConfig, table: SpfTable | None = None) -> AggregateStats:
    config.validate()
    return _RUNNERS[config.experiment](config, table)


# ---------------------------------------------------------------------------
# Serialization: per-trial CSV, manifest, replay
# ---------------------------------------------------------------------------


def trials_csv(stats: AggregateStats) -> str:
    """Per-trial CSV with the experiment's column schema, one row per record."""
    columns = stats.columns
    lines = [",".join(columns)]
    for record in stats.per_trial:
        cells = []
        for col in columns:
            v = record[col]
            cells.append(fmt_float(v) if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def manifest_dict(
    stats: AggregateStats,
    csv_sha256: str | None = None,
    wall_time: float | None = None,
) -> dict:
    cfg = stats.config
    return {
        "experiment": cfg.experiment,
        "model": cfg.model.value,
        "alpha": cfg.alpha,
        "N": cfg.limit,
        "trials": cfg.trials,
        "base_seed": cfg.base_seed,
        "sign_mode": cfg.sign_mode.value,
        "sigma_grid": list(cfg.sigma_grid) if cfg.sigma_grid else None,
        "prime_limit": cfg.prime_limit,
        "grid_step": cfg.grid_step,
        "thresholds": {
            "min_sign_changes": cfg.min_sign_changes,
            "pass_rate": cfg.pass_rate,
            "positivity_rate": cfg.positivity_rate,
        },
        "reporting_only": cfg.reporting_only,
        "columns": list(stats.columns),
        "tool_version": __version__,
        "wall_time": wall_time,
        "csv_sha256": csv_sha256,
        "summary": stats.summary,
    }


def config_from_manifest(manifest: dict) -> ExperimentConfig:
    thresholds = manifest.get("thresholds", {})
    return ExperimentConfig(
        experiment=manifest["experiment"],
        model=Model(manifest["model"]),
        alpha=float(manifest["alpha"]),
        limit=int(manifest["N"]),
        trials=int(manifest["trials"]),
        base_seed=int(manifest["base_seed"]),
        sign_mode=SignMode(manifest.get("sign_mode", "iid")),
        sigma_grid=tuple(manifest["sigma_grid"]) if manifest.get("sigma_grid") else None,
        prime_limit=manifest.get("prime_limit"),
        grid_step=manifest.get("grid_step"),
        min_sign_changes=int(thresholds.get("min_sign_changes", 5)),
        pass_rate=float(thresholds.get("pass_rate", 0.95)),
        positivity_rate=float(thresholds.get("positivity_rate", 0.99)),
    )


def write_experiment(stats: AggregateStats, outdir=None, wall_time: float | None = None):
    """Write manifest.json then trials.csv, finalizing the manifest with the
    CSV digest; all writes are temp-file + rename.

    outdir defaults to the config's output_path.
    """
    if outdir is None:
        outdir = stats.config.output_path
    if not outdir:
        raise DomainError("no output directory: pass outdir or set config.output_path")
    outdir = os.path.abspath(outdir)
    manifest_path = os.path.join(outdir, "manifest.json")
    csv_path = os.path.join(outdir, "trials.csv")
    atomic_write(manifest_path, json.dumps(manifest_dict(stats), indent=2) + "\n")
    csv_text = trials_csv(stats)
    atomic_write(csv_path, csv_text)
    final = manifest_dict(stats, csv_sha256=sha256_text(csv_text), wall_time=wall_time)
    atomic_write(manifest_path, json.dumps(final, indent=2) + "\n")
    return manifest_path, csv_path


def replay_experiment(manifest_path) -> tuple[bool, str, str]:
    """Re-run the manifest's config and compare CSV digests.

    Returns (match, recorded_sha, recomputed_sha).
    """
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    recorded = manifest.get("csv_sha256") or ""
    config = config_from_manifest(manifest)
    stats = run_experiment(config)
    recomputed = sha256_text(trials_csv(stats))
    return recomputed == recorded, recorded, recomputed


def assert_outcome(stats: AggregateStats) -> tuple[bool, str]:
    """Evaluate the experiment's statistical expectation for assert mode.

    Reporting-only configurations always pass (there is nothing to assert).
    """
    cfg = stats.config
    s = stats.summary
    if cfg.reporting_only:
        return True, "reporting-only: no statistical assertion attached"
    if cfg.experiment == "sign-changes":
        ok = s["pass_fraction"] >= cfg.pass_rate
        return ok, (
            f"fraction of trials with >= {cfg.min_sign_changes} sign changes: "
            f"{s['pass_fraction']:.4f} (needs >= {cfg.pass_rate})"
        )
    if cfg.experiment == "positivity":
        ok = s["pass_fraction"] >= cfg.positivity_rate
        return ok, f"all-positive fraction: {s['pass_fraction']:.4f} (needs >= {cfg.positivity_rate})"
    if cfg.experiment == "harper":
        ok = s["trend_increasing"]
        return ok, (
            f"median centered sup increased on {s['trend_steps_increasing']} of "
            f"{s['trend_steps_total']} grid steps (needs all)"
        )
    if cfg.experiment == "divergence":
        ok = s["triangle_inequality_ok"] and s["fraction_ratio_monotone"] > 0.5
        return ok, (
            f"triangle inequality ok: {s['triangle_inequality_ok']}, "
            f"monotone ratio fraction: {s['fraction_ratio_monotone']:.4f} (needs > 0.5)"
        )
    return True, "no assertion defined"
