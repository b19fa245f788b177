"""Random matrix generation and the deterministic helpers it needs.

RNG policy: every sampler is a pure function of (parameters, seed).  Seed
streams derive from a master seed through ``SeedSequence`` spawn keys, so
trial t of an experiment reads from an independent stream determined by
(master_seed, t) alone -- reproducible under any execution order or
parallel schedule.  Normal variates come from numpy's PCG64 generator
(ziggurat method), fixed for golden-file stability.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

_SYM_ATOL = 1e-12

# spawn-key domains keeping the independent stream families apart
SIGMA_DOMAIN = 0
TRIAL_DOMAIN = 1
GENERIC_DOMAIN = 2


def rng_stream(master_seed: int, *path: int) -> np.random.Generator:
    """Independent generator addressed by (master_seed, *path)."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=path))


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class CovarianceModel:
    """True covariance with cached inverse and symmetric square root."""

    sigma: np.ndarray
    sigma_inv: np.ndarray
    sigma_root: np.ndarray

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    @classmethod
    def from_sigma(cls, sigma) -> "CovarianceModel":
        sigma = np.asarray(sigma, dtype=np.float64)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise DomainError(f"covariance must be square, got shape {sigma.shape}")
        scale = max(1.0, float(np.max(np.abs(sigma))))
        if np.max(np.abs(sigma - sigma.T)) > _SYM_ATOL * scale:
            raise DomainError("covariance must be symmetric")
        eigvals, eigvecs = np.linalg.eigh(0.5 * (sigma + sigma.T))
        if eigvals[0] <= 1e-12 * max(eigvals[-1], 1.0):
            raise DomainError(
                f"covariance must be positive definite (min eigenvalue {eigvals[0]:.3e})"
            )
        root = (eigvecs * np.sqrt(eigvals)) @ eigvecs.T
        inv = (eigvecs * (1.0 / eigvals)) @ eigvecs.T
        return cls(sigma=sigma, sigma_inv=0.5 * (inv + inv.T), sigma_root=0.5 * (root + root.T))

    def scaled(self, c: float) -> "CovarianceModel":
        """Model for c * sigma (c > 0)."""
        if c <= 0:
            raise DomainError("scale factor must be positive")
        return CovarianceModel(
            sigma=c * self.sigma,
            sigma_inv=self.sigma_inv / c,
            sigma_root=np.sqrt(c) * self.sigma_root,
        )


@dataclass(frozen=True)
class GaussianSample:
    """T x n matrix of i.i.d. standard normal entries plus its seed."""

    x: np.ndarray
    seed: object


def draw_gaussian(t: int, n: int, seed) -> GaussianSample:
    rng = _as_generator(seed)
    return GaussianSample(x=rng.standard_normal((t, n)), seed=seed)


SPD_SCHEMES = ("wishart-like", "diag-plus-lowrank")


def random_spd(n: int, seed, scheme: str = "wishart-like") -> CovarianceModel:
    """Well-conditioned random SPD covariance.

    wishart-like: G G^T / m + 0.01 I with G an n x m standard Gaussian and
    m = 2n.  diag-plus-lowrank: uniform(0.5, 1.5) diagonal plus a rank-one
    bump v v^T / (2n).
    """
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got {n}")
    rng = _as_generator(seed)
    if scheme == "wishart-like":
        m = 2 * n
        g = rng.standard_normal((n, m))
        sigma = g @ g.T / m + 0.01 * np.eye(n)
    elif scheme == "diag-plus-lowrank":
        diag = rng.uniform(0.5, 1.5, size=n)
        v = rng.standard_normal(n)
        sigma = np.diag(diag) + np.outer(v, v) / (2 * n)
    else:
        raise ParameterError(f"unknown SPD scheme {scheme!r}; choose from {SPD_SCHEMES}")
    return CovarianceModel.from_sigma(0.5 * (sigma + sigma.T))


def symmetric_root(sigma) -> np.ndarray:
    """Symmetric positive definite square root via eigendecomposition."""
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DomainError(f"symmetric root needs a square input, got shape {sigma.shape}")
    eigvals, eigvecs = np.linalg.eigh(0.5 * (sigma + sigma.T))
    if eigvals[0] <= 1e-12 * max(abs(eigvals[-1]), 1.0):
        raise DomainError(
            f"symmetric root needs a positive definite input (min eigenvalue {eigvals[0]:.3e})"
        )
    root = (eigvecs * np.sqrt(eigvals)) @ eigvecs.T
    return 0.5 * (root + root.T)


def sample_compound_wishart(model: CovarianceModel, weight, seed) -> np.ndarray:
    """One draw of W = Sigma^(1/2) X^T B X Sigma^(1/2); symmetric by construction.

    ``weight`` is a WeightMatrix (its .matrix and .rank are used) or a plain
    T x T array.  A rank below n triggers a warning: W is then singular and
    inverse-based workflows will fail downstream.
    """
    b = getattr(weight, "matrix", weight)
    b = np.asarray(b, dtype=np.float64)
    t = b.shape[0]
    rank = getattr(weight, "rank", None)
    if rank is None:
        rank = int(np.linalg.matrix_rank(b))
    if rank < model.n:
        warnings.warn(
            f"weighting matrix rank {rank} < dimension {model.n}: sample is singular",
            stacklevel=2,
        )
    x = _as_generator(seed).standard_normal((t, model.n))
    y = x @ model.sigma_root
    w = y.T @ b @ y
    return 0.5 * (w + w.T)


def sample_haar_orthogonal(n: int, seed) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR with sign correction)."""
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got {n}")
    g = _as_generator(seed).standard_normal((n, n))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs


def pseudo_inverse(a) -> np.ndarray:
    """Moore-Penrose pseudo-inverse (SVD, relative cutoff 1e-12)."""
    return np.linalg.pinv(np.asarray(a, dtype=np.float64), rcond=1e-12)
