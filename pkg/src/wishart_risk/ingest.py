"""Return-panel ingestion and the long/short-window risk study.

CSV layout: first row is a header of asset labels; every following row is
one observation of per-period fractional returns, most recent observation
FIRST.  Row order matters because exponential weights hit row j with
lambda**(j-1): weight one belongs to the newest return.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .correction import bias_factor
from .errors import DataError, ParseError, RegimeError
from .estimators import WeightMatrix, build_weight_matrix, estimate_covariance
from .portfolio import spd_inverse
from .sampling import rng_stream
from .simlab import Summary, TrialRecord, summarize


@dataclass(frozen=True)
class ReturnPanel:
    """n named assets with T_total observations of centered-or-raw returns."""

    assets: tuple[str, ...]
    observations: np.ndarray
    centered: bool = False

    @property
    def n(self) -> int:
        return len(self.assets)

    @property
    def t_total(self) -> int:
        return self.observations.shape[0]

    def center(self) -> "ReturnPanel":
        """Subtract column means; idempotent."""
        if self.centered:
            return self
        centered = self.observations - self.observations.mean(axis=0, keepdims=True)
        return ReturnPanel(assets=self.assets, observations=centered, centered=True)


def read_returns_csv(path) -> ReturnPanel:
    """Parse a return panel; rejects ragged rows, gaps and duplicate labels."""
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            rows = list(reader)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ParseError(f"{path} is empty")
    header = [cell.strip() for cell in rows[0]]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise ParseError(f"duplicate asset labels {dupes}", row=1)
    if len(rows) == 1:
        raise DataError(f"{path} has a header but zero observations")
    n = len(header)
    data = np.empty((len(rows) - 1, n))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != n:
            raise ParseError(
                f"expected {n} cells, found {len(row)}", row=r
            )
        for c, cell in enumerate(row, start=1):
            text = cell.strip()
            if not text:
                raise ParseError("missing value", row=r, column=c)
            try:
                data[r - 2, c - 1] = float(text)
            except ValueError:
                raise ParseError(f"non-numeric cell {text!r}", row=r, column=c) from None
    return ReturnPanel(assets=tuple(header), observations=data, centered=False)


def write_returns_csv(panel: ReturnPanel, path):
    """Write a panel back out; floats use repr-precision for exact round trips."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(panel.assets)
        for row in panel.observations:
            writer.writerow([f"{v:.17g}" for v in row])
    return path


def draw_window_indices(rng, t_total: int, t_sub: int, contiguous: bool) -> np.ndarray:
    """Row indices for one repeat, ascending so recency order is preserved."""
    if contiguous:
        start = int(rng.integers(0, t_total - t_sub + 1))
        return np.arange(start, start + t_sub)
    return np.sort(rng.choice(t_total, size=t_sub, replace=False))


@dataclass(frozen=True)
class StudyResult:
    records: tuple[TrialRecord, ...]
    failures: int
    summary: Summary
    true_risk: float
    n: int
    t_sub: int
    weight: WeightMatrix


def real_data_risk_study(panel: ReturnPanel, t_sub: int, b_kind: str,
                         b_params: dict | None = None, repeats: int = 100,
                         seed: int = 0, contiguous: bool = False) -> StudyResult:
    """Long-window true risk versus short-window predicted risk.

    The true risk comes from the full panel's covariance (centered returns,
    divide-by-T normalization).  Each repeat draws t_sub rows -- uniformly
    without replacement by default, or one contiguous window -- builds the
    chosen estimator on them, computes the predicted risk and rescales it
    by the square root of the correction factor at (n, t_sub).  Per-row
    recency order is preserved inside each subsample so exponential weights
    stay meaningful.
    """
    n = panel.n
    if t_sub <= n + 3:
        raise RegimeError(f"need T_sub > n + 3 (T_sub = {t_sub}, n = {n})")
    if panel.t_total < t_sub:
        raise DataError(
            f"panel has {panel.t_total} rows, need at least {t_sub}"
        )
    if repeats < 1:
        raise DataError(f"repeat count must be >= 1, got {repeats}")
    centered = panel.center()
    full_cov = centered.observations.T @ centered.observations / panel.t_total
    true_grand = float(spd_inverse(full_cov).sum())
    true_risk = 1.0 / math.sqrt(true_grand)

    weight = build_weight_matrix(b_kind, t_sub, **(b_params or {}))
    factor = bias_factor(weight, n, t_sub)
    sqrt_factor = math.sqrt(factor)

    records = []
    failures = 0
    for r in range(repeats):
        rng = rng_stream(seed, 3, r)
        idx = draw_window_indices(rng, panel.t_total, t_sub, contiguous)
        window = centered.observations[idx]
        estimate = estimate_covariance(window, weight)
        try:
            est_grand = float(spd_inverse(estimate).sum())
        except Exception:
            failures += 1
            continue
        if est_grand <= 0.0:
            failures += 1
            continue
        predicted = 1.0 / math.sqrt(est_grand)
        ratio_before = predicted / true_risk
        records.append(
            TrialRecord(
                trial_index=r,
                true_risk=true_risk,
                predicted_risk=predicted,
                ratio_before=ratio_before,
                ratio_after=ratio_before * sqrt_factor,
                q=est_grand / true_grand,
            )
        )
    if not records:
        raise DataError("all study repeats failed (singular estimates)")
    if len(records) >= 2:
        summary = summarize(records, failures=failures)
    else:
        only = records[0]
        summary = Summary(
            mean_before=only.ratio_before, mean_after=only.ratio_after,
            sd_before=0.0, sd_after=0.0, mean_q=only.q, var_q_empirical=0.0,
            failures=failures, trials=1,
        )
    return StudyResult(
        records=tuple(records), failures=failures, summary=summary,
        true_risk=true_risk, n=n, t_sub=t_sub, weight=weight,
    )
