"""Numba kernel backend: jitted per-trial loops over the same inputs."""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True, nogil=True)
def _cholesky_ok(a):
    # In-place lower-triangular factorization; reports positive definiteness
    # without raising, which keeps the trial loop exception-free.  Pivots
    # below a relative floor count as failures: exactly rank-deficient
    # inputs can leave positive roundoff (~1e-16 * scale) where LAPACK
    # would reject.
    n = a.shape[0]
    scale = 0.0
    for j in range(n):
        if abs(a[j, j]) > scale:
            scale = abs(a[j, j])
    floor = scale * 1e-13
    if scale == 0.0:
        return False
    for j in range(n):
        s = a[j, j]
        for p in range(j):
            s -= a[j, p] * a[j, p]
        if not np.isfinite(s) or s <= floor:
            return False
        d = np.sqrt(s)
        a[j, j] = d
        for i in range(j + 1, n):
            acc = a[i, j]
            for p in range(j):
                acc -= a[i, p] * a[j, p]
            a[i, j] = acc / d
    return True


@njit(cache=True, nogil=True)
def _haar_batch(gauss):
    m = gauss.shape[0]
    n = gauss.shape[1]
    out = np.empty_like(gauss)
    for t in range(m):
        q, r = np.linalg.qr(gauss[t])
        for j in range(n):
            if r[j, j] < 0.0:
                for i in range(n):
                    q[i, j] = -q[i, j]
        out[t] = q
    return out


@njit(cache=True, nogil=True)
def _inv_gram_batch(y, b):
    m = y.shape[0]
    n = y.shape[2]
    out = np.empty((m, n, n))
    ok = np.ones(m, dtype=np.bool_)
    for t in range(m):
        yt = np.ascontiguousarray(y[t])
        gram = yt.T @ (b @ yt)
        gram = 0.5 * (gram + gram.T)
        if _cholesky_ok(gram.copy()):
            out[t] = np.linalg.inv(gram)
        else:
            ok[t] = False
            out[t, :, :] = np.nan
    return out, ok


def haar_batch(gauss):
    """Orthogonalize a (m, n, n) Gaussian stack into Haar orthogonal matrices."""
    return _haar_batch(np.ascontiguousarray(gauss, dtype=np.float64))


def inv_gram_batch(y, b):
    """Invert M_t = Y_t^T B Y_t per trial; NaN + ok=False on non-PD trials."""
    return _inv_gram_batch(
        np.ascontiguousarray(y, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
    )
