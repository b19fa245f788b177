"""Pure-numpy kernel backend: stacked linear algebra over trial batches."""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def haar_batch(gauss):
    """Orthogonalize a (m, n, n) Gaussian stack into Haar orthogonal matrices.

    Plain QR is not Haar; rescaling each column by the sign of the matching
    diagonal entry of R removes the sign convention of the factorization.
    """
    q, r = np.linalg.qr(gauss)
    signs = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    signs = np.where(signs == 0.0, 1.0, signs)
    return q * signs[:, np.newaxis, :]


def _inv_gram_single(m):
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return None
    return np.linalg.inv(m)


def inv_gram_batch(y, b):
    """Invert M_t = Y_t^T B Y_t for a (m, T, n) stack of Y draws.

    Returns (inverses, ok): failed trials (M not positive definite) carry
    NaN entries and ok=False.
    """
    y = np.asarray(y, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    grams = np.matmul(np.swapaxes(y, -2, -1), np.matmul(b, y))
    grams = 0.5 * (grams + np.swapaxes(grams, -2, -1))
    m = grams.shape[0]
    ok = np.ones(m, dtype=bool)
    try:
        np.linalg.cholesky(grams)
        return np.linalg.inv(grams), ok
    except np.linalg.LinAlgError:
        pass
    # at least one trial is not PD: redo trial by trial
    out = np.empty_like(grams)
    for t in range(m):
        inv = _inv_gram_single(grams[t])
        if inv is None:
            ok[t] = False
            out[t] = np.nan
        else:
            out[t] = inv
    return out, ok
