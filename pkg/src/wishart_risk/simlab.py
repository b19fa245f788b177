"""Monte Carlo experiment runner for the risk-ratio protocol.

One experiment draws a single true covariance (held fixed over trials),
then per trial samples a fresh T x n return matrix, estimates the
covariance with the configured weighting, and records the predicted/true
risk ratio before and after scaling by the square root of the correction
factor.  Trials whose estimate is not positive definite are excluded and
counted rather than retried, which keeps the ensemble unbiased.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._kernels import get_kernels
from .correction import asymptotic_limit_for_weight, bias_factor
from .errors import DataError, ParameterError, RegimeError
from .estimators import WeightMatrix, build_weight_matrix
from .mc import chunk_size_for, gaussian_chunk, iter_chunks
from .sampling import SIGMA_DOMAIN, CovarianceModel, random_spd, rng_stream

SCALING_MODES = ("finite_sample", "asymptotic")
WORKERS_ENV = "WISHART_RISK_WORKERS"


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one simulated risk-ratio experiment."""

    n: int
    t: int
    b_kind: str
    trials: int
    master_seed: int
    b_params: dict = field(default_factory=dict)
    sigma_scheme: str = "wishart-like"
    scaling: str = "finite_sample"
    redraw_sigma: bool = False
    workers: int | None = None
    require_variance: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError(f"trial count must be >= 1, got {self.trials}")
        if self.t <= self.n + 1:
            raise RegimeError(
                f"need T > n + 1 for the correction factor (T = {self.t}, n = {self.n})"
            )
        if self.require_variance and self.t <= self.n + 3:
            raise RegimeError(
                f"variance reporting needs T > n + 3 (T = {self.t}, n = {self.n})"
            )
        if self.scaling not in SCALING_MODES:
            raise ParameterError(
                f"scaling must be one of {SCALING_MODES}, got {self.scaling!r}"
            )


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of a single successful trial."""

    trial_index: int
    true_risk: float
    predicted_risk: float
    ratio_before: float
    ratio_after: float
    q: float


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    records: tuple[TrialRecord, ...]
    failures: int
    scale_factor: float
    weight: WeightMatrix


@dataclass(frozen=True)
class Summary:
    mean_before: float
    mean_after: float
    sd_before: float
    sd_after: float
    mean_q: float
    var_q_empirical: float
    failures: int
    trials: int

    def as_dict(self) -> dict:
        return {
            "mean_before": self.mean_before,
            "mean_after": self.mean_after,
            "sd_before": self.sd_before,
            "sd_after": self.sd_after,
            "mean_q": self.mean_q,
            "var_q_empirical": self.var_q_empirical,
            "failures": self.failures,
            "trials": self.trials,
        }


def resolve_workers(requested: int | None) -> int:
    if requested is not None and requested >= 1:
        return requested
    env = os.environ.get(WORKERS_ENV, "").strip()
    if env.isdigit() and int(env) >= 1:
        return int(env)
    return os.cpu_count() or 1


def scale_factor_for(config: ExperimentConfig, weight: WeightMatrix) -> float:
    if config.scaling == "finite_sample":
        return bias_factor(weight, config.n, config.t)
    limit = asymptotic_limit_for_weight(weight, config.n, config.t)
    if limit is None:
        raise RegimeError(
            f"no asymptotic scaling available for weighting kind {weight.kind!r}"
        )
    return limit


def run_experiment(config: ExperimentConfig,
                   model: CovarianceModel | None = None,
                   backend: str | None = None) -> ExperimentResult:
    """Run all trials of one experiment; deterministic in the master seed."""
    weight = build_weight_matrix(config.b_kind, config.t, **config.b_params)
    factor = scale_factor_for(config, weight)
    sqrt_factor = math.sqrt(factor)
    kernels = get_kernels(backend)

    if model is None:
        model = random_spd(
            config.n, rng_stream(config.master_seed, SIGMA_DOMAIN), config.sigma_scheme
        )
    base_true_grand = float(model.sigma_inv.sum())
    base_true_risk = 1.0 / math.sqrt(base_true_grand)

    per_trial_models = None
    if config.redraw_sigma:
        per_trial_models = [
            random_spd(config.n, rng_stream(config.master_seed, SIGMA_DOMAIN, t),
                       config.sigma_scheme)
            for t in range(config.trials)
        ]

    s_hat = np.full(config.trials, np.nan)
    true_grand = np.full(config.trials, base_true_grand)
    ok = np.zeros(config.trials, dtype=bool)

    def run_chunk(start: int, count: int):
        x = gaussian_chunk(config.master_seed, start, count, config.t, config.n)
        if per_trial_models is None:
            y = x @ model.sigma_root
        else:
            y = np.empty_like(x)
            for offset in range(count):
                y[offset] = x[offset] @ per_trial_models[start + offset].sigma_root
        inv, good = kernels.inv_gram_batch(y, weight.matrix)
        sl = slice(start, start + count)
        # estimator = Y^T B Y / Tr(B), so its inverse carries a Tr(B) factor
        s_hat[sl] = weight.tr_b * inv.sum(axis=(1, 2))
        ok[sl] = good
        if per_trial_models is not None:
            true_grand[sl] = [
                float(per_trial_models[start + offset].sigma_inv.sum())
                for offset in range(count)
            ]

    chunk = chunk_size_for(config.t, config.n)
    chunks = list(iter_chunks(config.trials, chunk))
    workers = resolve_workers(config.workers)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda args: run_chunk(*args), chunks))
    else:
        for start, count in chunks:
            run_chunk(start, count)

    records = []
    for t in range(config.trials):
        if not ok[t] or not np.isfinite(s_hat[t]) or s_hat[t] <= 0.0:
            continue
        true_risk = 1.0 / math.sqrt(true_grand[t])
        predicted = 1.0 / math.sqrt(s_hat[t])
        ratio_before = predicted / true_risk
        records.append(
            TrialRecord(
                trial_index=t,
                true_risk=true_risk,
                predicted_risk=predicted,
                ratio_before=ratio_before,
                ratio_after=ratio_before * sqrt_factor,
                q=s_hat[t] / true_grand[t],
            )
        )
    return ExperimentResult(
        config=config,
        records=tuple(records),
        failures=config.trials - len(records),
        scale_factor=factor,
        weight=weight,
    )


def summarize(records, failures: int | None = None) -> Summary:
    """Unbiased sample statistics over the successful trials."""
    if isinstance(records, ExperimentResult):
        failures = records.failures if failures is None else failures
        records = records.records
    records = list(records)
    if len(records) < 2:
        raise DataError(f"need at least 2 successful trials, got {len(records)}")
    before = np.array([r.ratio_before for r in records])
    after = np.array([r.ratio_after for r in records])
    q = np.array([r.q for r in records])
    return Summary(
        mean_before=float(before.mean()),
        mean_after=float(after.mean()),
        sd_before=float(before.std(ddof=1)),
        sd_after=float(after.std(ddof=1)),
        mean_q=float(q.mean()),
        var_q_empirical=float(q.var(ddof=1)),
        failures=int(failures or 0),
        trials=len(records),
    )


HISTOGRAM_FIELDS = ("ratio_before", "ratio_after", "q", "predicted_risk", "true_risk")


def export_histogram(records, field_name: str, bins: int, path) -> Path:
    """Write a bin_left,bin_right,count CSV with a trailing mean/sd comment."""
    if isinstance(records, ExperimentResult):
        records = records.records
    if field_name not in HISTOGRAM_FIELDS:
        raise ParameterError(
            f"unknown histogram field {field_name!r}; choose from {HISTOGRAM_FIELDS}"
        )
    if bins < 1:
        raise ParameterError(f"bin count must be >= 1, got {bins}")
    values = np.array([getattr(r, field_name) for r in records])
    if values.size == 0:
        raise DataError("no records to histogram")
    counts, edges = np.histogram(values, bins=bins)
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8") as handle:
            handle.write("bin_left,bin_right,count\n")
            for left, right, count in zip(edges[:-1], edges[1:], counts):
                handle.write(f"{left:.17g},{right:.17g},{int(count)}\n")
            sd = values.std(ddof=1) if values.size > 1 else 0.0
            handle.write(f"# mean={values.mean():.17g},sd={sd:.17g}\n")
    except OSError as exc:
        raise OSError(f"cannot write histogram to {path}: {exc}") from exc
    return path


def export_summary_json(summary: Summary, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(summary.as_dict(), indent=2, sort_keys=True) + "\n")
    return path
