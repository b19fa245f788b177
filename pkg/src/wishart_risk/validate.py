"""Self-validation checks wired to the `validate` CLI subcommand.

Each check exercises one analytic backbone against an independent route
(algebraic identity or Monte Carlo).  Monte Carlo thresholds use 4.5
standard errors: the checks compare hundreds of statistics at once, so a
3-sigma cut would false-alarm on perfectly healthy runs.  Closed forms
that are only asymptotic for general weighting matrices are checked in
the identity-weighting regime where they are exact.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import correction
from .combinat import partitions_of
from .estimators import WeightMatrix, build_weight_matrix
from .invmoments import haar_moment, inv_wishart_mean, inv_wishart_second_moment
from .mc import haar_block_moment_sums, sample_inverse_compound, sample_q_and_white_trace
from .sampling import random_spd, rng_stream
from .weingarten import coset_power_function, sharp_convolve, wg_single

_MC_SIGMA = 4.5


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _relation_deviation(k: int, z: float) -> float:
    zk = coset_power_function(k, z)
    wg = wg_single(k, z).as_biinvariant()
    lhs1 = sharp_convolve(sharp_convolve(zk, wg), zk)
    lhs2 = sharp_convolve(sharp_convolve(wg, zk), wg)
    dev = 0.0
    for p in partitions_of(k):
        dev = max(dev, abs(lhs1.values[p] - zk.values[p]))
        dev = max(dev, abs(lhs2.values[p] - wg.values[p]))
    return dev


def check_weingarten_relations(level: str, seed: int) -> CheckResult:
    start = time.perf_counter()
    worst = 0.0
    for k in (1, 2, 3):
        for z in (7.0, 10.0, 13.5):
            worst = max(worst, _relation_deviation(k, z))
    passed = worst < 1e-9
    return CheckResult(
        "weingarten_defining_relations", passed,
        f"max deviation {worst:.3e} (tolerance 1e-9)",
        time.perf_counter() - start,
    )


def check_haar_moments(level: str, seed: int) -> CheckResult:
    start = time.perf_counter()
    n, block = 4, 2
    samples = 1_000_000 if level == "full" else 200_000
    sums = haar_block_moment_sums(n, block, samples, seed)
    worst = 0.0
    # order-2 moments over the block
    mean2 = sums["sum2"] / samples
    var2 = np.maximum(sums["sumsq2"] / samples - mean2**2, 0.0)
    se2 = np.sqrt(var2 / samples)
    for a in range(block * block):
        for b in range(block * block):
            i = (a // block + 1, b // block + 1)
            j = (a % block + 1, b % block + 1)
            exact = haar_moment(i, j, n, 1)
            z = abs(mean2[a, b] - exact) / max(se2[a, b], 1e-300)
            worst = max(worst, z)
    # order-4 moments
    d2 = block * block
    mean4 = sums["sum4"] / samples
    var4 = np.maximum(sums["sumsq4"] / samples - mean4**2, 0.0)
    se4 = np.sqrt(var4 / samples)
    for a in range(d2):
        for b in range(d2):
            for c in range(d2):
                for e in range(d2):
                    i = (a // block + 1, b // block + 1, c // block + 1, e // block + 1)
                    j = (a % block + 1, b % block + 1, c % block + 1, e % block + 1)
                    exact = haar_moment(i, j, n, 2)
                    z = abs(mean4[a, b, c, e] - exact) / max(se4[a, b, c, e], 1e-300)
                    worst = max(worst, z)
    passed = worst < _MC_SIGMA
    return CheckResult(
        "haar_moment_formula_vs_mc", passed,
        f"max |z| {worst:.2f} over all block moments ({samples} samples)",
        time.perf_counter() - start,
    )


def check_inverse_moments_identity_weighting(level: str, seed: int) -> CheckResult:
    """First and second inverse moments in the regime where they are exact."""
    start = time.perf_counter()
    n, t = 10, 60
    trials = 20_000 if level == "full" else 5_000
    model = random_spd(n, rng_stream(seed, 10))
    weight = build_weight_matrix("mle", t)
    inverses, ok = sample_inverse_compound(model, weight, trials, seed)
    good = inverses[ok]
    mean = good.mean(axis=0)
    se = good.std(axis=0, ddof=1) / np.sqrt(good.shape[0])
    worst = 0.0
    for i in range(n):
        for j in range(i, n):
            exact = inv_wishart_mean(i + 1, j + 1, model, weight)
            worst = max(worst, abs(mean[i, j] - exact) / max(se[i, j], 1e-300))
    sq = good[:, 0, 0] ** 2
    exact2 = inv_wishart_second_moment(1, 1, 1, 1, model, weight)
    z2 = abs(sq.mean() - exact2) / max(sq.std(ddof=1) / np.sqrt(sq.size), 1e-300)
    worst = max(worst, z2)
    passed = worst < _MC_SIGMA
    return CheckResult(
        "inverse_moments_identity_weighting", passed,
        f"max |z| {worst:.2f} over entry means + one second moment ({trials} trials)",
        time.perf_counter() - start,
    )


def check_trace_ratio_identity(level: str, seed: int) -> CheckResult:
    """Expected trace / expected grand sum of the inverse matches the truth.

    Tested as the paired difference D = Tr(W^-1) * S_true - grand(W^-1) *
    Tr(Sigma^-1), which has mean zero for any weighting matrix.
    """
    start = time.perf_counter()
    n, t = 8, 40
    trials = 20_000 if level == "full" else 5_000
    model = random_spd(n, rng_stream(seed, 20))
    rng = rng_stream(seed, 21)
    g = rng.standard_normal((t, 2 * t))
    weight = WeightMatrix.from_dense(g @ g.T / (2 * t) + 0.05 * np.eye(t))
    inverses, ok = sample_inverse_compound(model, weight, trials, seed + 1)
    good = inverses[ok]
    tr_true = float(np.trace(model.sigma_inv))
    s_true = float(model.sigma_inv.sum())
    diffs = np.trace(good, axis1=1, axis2=2) * s_true - good.sum(axis=(1, 2)) * tr_true
    z = abs(diffs.mean()) / max(diffs.std(ddof=1) / np.sqrt(diffs.size), 1e-300)
    passed = z < _MC_SIGMA
    return CheckResult(
        "inverse_trace_ratio_identity", passed,
        f"|z| {z:.2f} for the paired difference ({trials} trials)",
        time.perf_counter() - start,
    )


def check_variance_formula(level: str, seed: int) -> CheckResult:
    start = time.perf_counter()
    n, t = 10, 40
    trials = 30_000 if level == "full" else 10_000
    model = random_spd(n, rng_stream(seed, 30))
    weight = build_weight_matrix("mle", t)
    q_vals, _, ok = sample_q_and_white_trace(model, weight, trials, seed + 2)
    var_mc = float(q_vals[ok].var(ddof=1))
    var_formula = correction.variance_of_q(weight, n, t)
    rel = abs(var_mc / var_formula - 1.0)
    passed = rel < 0.10
    return CheckResult(
        "q_variance_formula_identity_weighting", passed,
        f"empirical/formula - 1 = {rel:+.3%} ({trials} trials)",
        time.perf_counter() - start,
    )


ALL_CHECKS = (
    check_weingarten_relations,
    check_haar_moments,
    check_inverse_moments_identity_weighting,
    check_trace_ratio_identity,
    check_variance_formula,
)


def run_checks(level: str = "fast", seed: int = 2024):
    """Run all checks at the given level; returns the list of results."""
    return [check(level, seed) for check in ALL_CHECKS]
