"""Shared Monte Carlo drivers used by the simulation lab, the validation
suite and the test oracles.

Every driver draws trial t from the stream (master_seed, TRIAL_DOMAIN, t)
and hands pre-drawn Gaussians to the active kernel backend, so results are
identical across backends, chunk sizes and worker counts.
"""

from __future__ import annotations

import numpy as np

from ._kernels import get_kernels
from .estimators import WeightMatrix
from .sampling import TRIAL_DOMAIN, CovarianceModel, rng_stream

DEFAULT_CHUNK_BUDGET = 4_000_000  # doubles per chunk of stacked X draws


def chunk_size_for(t: int, n: int, budget: int = DEFAULT_CHUNK_BUDGET) -> int:
    return max(1, budget // max(1, t * n))


def iter_chunks(total: int, chunk: int):
    start = 0
    while start < total:
        count = min(chunk, total - start)
        yield start, count
        start += count


def gaussian_chunk(master_seed: int, start: int, count: int, t: int, n: int) -> np.ndarray:
    """Stack of per-trial standard normal draws for trials start..start+count-1."""
    out = np.empty((count, t, n))
    for offset in range(count):
        rng = rng_stream(master_seed, TRIAL_DOMAIN, start + offset)
        out[offset] = rng.standard_normal((t, n))
    return out


def sample_inverse_compound(model: CovarianceModel, weight: WeightMatrix,
                            trials: int, master_seed: int,
                            backend: str | None = None):
    """Stack of inverted compound Wishart draws (Sigma^(1/2) X^T B X Sigma^(1/2))^(-1).

    Returns (inverses, ok): failed (non-PD) trials carry NaN and ok=False.
    """
    kernels = get_kernels(backend)
    n, t = model.n, weight.t
    out = np.empty((trials, n, n))
    ok = np.empty(trials, dtype=bool)
    for start, count in iter_chunks(trials, chunk_size_for(t, n)):
        x = gaussian_chunk(master_seed, start, count, t, n)
        y = x @ model.sigma_root
        inv, good = kernels.inv_gram_batch(y, weight.matrix)
        out[start : start + count] = inv
        ok[start : start + count] = good
    return out, ok


def sample_q_and_white_trace(model: CovarianceModel, weight: WeightMatrix,
                             trials: int, master_seed: int,
                             backend: str | None = None):
    """Per trial, from the same X draw: the risk-squared ratio Q and the
    trace of (X^T B X)^(-1).

    Pairing the two statistics on one draw gives a low-variance check of
    the identity E(Q) = Tr(B) * E[Tr((X^T B X)^(-1))] / n.
    """
    kernels = get_kernels(backend)
    n, t = model.n, weight.t
    true_grand = float(model.sigma_inv.sum())
    q_vals = np.empty(trials)
    traces = np.empty(trials)
    ok = np.empty(trials, dtype=bool)
    for start, count in iter_chunks(trials, chunk_size_for(t, n) // 2 + 1):
        x = gaussian_chunk(master_seed, start, count, t, n)
        inv_sigma, good_s = kernels.inv_gram_batch(x @ model.sigma_root, weight.matrix)
        inv_white, good_w = kernels.inv_gram_batch(x, weight.matrix)
        sl = slice(start, start + count)
        # grand sum of estimator inverse = Tr(B) * grand sum of (Y^T B Y)^(-1)
        q_vals[sl] = weight.tr_b * inv_sigma.sum(axis=(1, 2)) / true_grand
        traces[sl] = np.trace(inv_white, axis1=1, axis2=2)
        ok[sl] = good_s & good_w
    return q_vals, traces, ok


def haar_sample_batch(n: int, samples: int, master_seed: int,
                      backend: str | None = None) -> np.ndarray:
    """Stack of Haar orthogonal matrices, one stream per sample index."""
    kernels = get_kernels(backend)
    out = np.empty((samples, n, n))
    for start, count in iter_chunks(samples, chunk_size_for(n, n)):
        gauss = gaussian_chunk(master_seed, start, count, n, n)
        out[start : start + count] = kernels.haar_batch(gauss)
    return out


def haar_block_moment_sums(n: int, block: int, samples: int, master_seed: int,
                           backend: str | None = None):
    """Accumulated outer products of the flattened top-left block of Haar
    orthogonal samples.

    With v = O[:block, :block] flattened (d = block**2 entries), returns
    the sums over samples of v (x) v, v^2 (x) v^2, v (x) v (x) v (x) v and
    the elementwise squares of the order-4 products -- everything needed
    for mean and standard-error estimates of all order-2 and order-4 entry
    moments with indices inside the block.
    """
    kernels = get_kernels(backend)
    d = block * block
    sum2 = np.zeros((d, d))
    sumsq2 = np.zeros((d, d))
    sum4 = np.zeros((d * d, d * d))
    sumsq4 = np.zeros((d * d, d * d))
    for start, count in iter_chunks(samples, chunk_size_for(n, n)):
        gauss = gaussian_chunk(master_seed, start, count, n, n)
        ortho = kernels.haar_batch(gauss)
        v = ortho[:, :block, :block].reshape(count, d)
        sum2 += v.T @ v
        vsq = v * v
        sumsq2 += vsq.T @ vsq
        pairs = (v[:, :, None] * v[:, None, :]).reshape(count, d * d)
        sum4 += pairs.T @ pairs
        pairs_sq = pairs * pairs
        sumsq4 += pairs_sq.T @ pairs_sq
    shape4 = (d, d, d, d)
    return {
        "samples": samples,
        "block": block,
        "sum2": sum2,
        "sumsq2": sumsq2,
        "sum4": sum4.reshape(shape4),
        "sumsq4": sumsq4.reshape(shape4),
    }
