"""Weighting matrices B and the covariance estimator Y^T B Y / Tr(B).

Supported weighting kinds:

- ``mle``: B = I_T, the maximum likelihood estimator.
- ``sample_cov``: B = I_T - (1/T) e e^T, the centering projector of rank
  T-1, which turns the estimator into the sample covariance.
- ``ewma``: diagonal B with entries lambda**(j-1); row 1 of the data is
  the most recent observation, so it receives weight 1.
- ``idempotent``: diagonal projector with a prescribed rank.
- ``custom_diagonal``: arbitrary diagonal entries.
- ``custom``: arbitrary dense matrix (library use; not in the CLI grammar).

Diagonal and projector kinds carry a structure tag so traces of B, of its
pseudo-inverse and of the squared pseudo-inverse cost O(T); exact zeros on
a diagonal are dropped by the pseudo-inverse instead of applying a
relative-tolerance rank cut.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateWeightingError,
    DimensionError,
    ParameterError,
    ParseError,
)
from .sampling import pseudo_inverse

_IDEMPOTENT_ATOL = 1e-10

WEIGHT_KINDS = ("mle", "sample_cov", "ewma", "idempotent", "custom_diagonal", "custom")


@dataclass(frozen=True)
class WeightMatrix:
    """T x T weighting matrix with cached trace data.

    ``tr_b``, ``tr_b_pinv`` and ``tr_b_pinv_sq`` are the unnormalized
    traces of B, B^- and (B^-)^2; the ``ntr_*`` properties divide by T.
    """

    kind: str
    t: int
    matrix: np.ndarray
    pinv: np.ndarray
    tr_b: float
    tr_b_pinv: float
    tr_b_pinv_sq: float
    rank: int
    params: dict = field(default_factory=dict)

    @property
    def ntr_b(self) -> float:
        return self.tr_b / self.t

    @property
    def ntr_b_pinv(self) -> float:
        return self.tr_b_pinv / self.t

    @property
    def ntr_b_pinv_sq(self) -> float:
        return self.tr_b_pinv_sq / self.t

    @property
    def diagonal_entries(self):
        """Diagonal of B for diagonal-structured kinds, else None."""
        if self.kind in ("mle", "ewma", "idempotent", "custom_diagonal"):
            return np.diag(self.matrix)
        return None

    @classmethod
    def from_dense(cls, matrix, kind: str = "custom", params=None) -> "WeightMatrix":
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"weight matrix must be square, got {matrix.shape}")
        pinv = pseudo_inverse(matrix)
        return cls(
            kind=kind,
            t=matrix.shape[0],
            matrix=matrix,
            pinv=pinv,
            tr_b=float(np.trace(matrix)),
            tr_b_pinv=float(np.trace(pinv)),
            tr_b_pinv_sq=float(np.trace(pinv @ pinv)),
            rank=int(np.linalg.matrix_rank(matrix)),
            params=dict(params or {}),
        )

    @classmethod
    def from_diagonal(cls, entries, kind: str = "custom_diagonal", params=None) -> "WeightMatrix":
        entries = np.asarray(entries, dtype=np.float64)
        if entries.ndim != 1:
            raise DimensionError("diagonal entries must be one-dimensional")
        nonzero = entries != 0.0
        with np.errstate(divide="ignore", over="ignore"):
            recip = np.where(nonzero, 1.0 / np.where(nonzero, entries, 1.0), 0.0)
            tr_pinv = float(recip.sum())
            tr_pinv_sq = float((recip * recip).sum())
        return cls(
            kind=kind,
            t=entries.size,
            matrix=np.diag(entries),
            pinv=np.diag(recip),
            tr_b=float(entries.sum()),
            tr_b_pinv=tr_pinv,
            tr_b_pinv_sq=tr_pinv_sq,
            rank=int(nonzero.sum()),
            params=dict(params or {}),
        )


def build_weight_matrix(kind: str, t: int, *, lam: float | None = None,
                        rank: int | None = None, entries=None) -> WeightMatrix:
    """Construct the weighting matrix for one of the named kinds."""
    if t < 2:
        raise ParameterError(f"observation count T must be >= 2, got {t}")
    if kind == "mle":
        return WeightMatrix.from_diagonal(np.ones(t), kind="mle")
    if kind == "sample_cov":
        b = np.eye(t) - np.full((t, t), 1.0 / t)
        # centering projector: pseudo-inverse is the matrix itself, rank T-1
        return WeightMatrix(
            kind="sample_cov", t=t, matrix=b, pinv=b,
            tr_b=float(t - 1), tr_b_pinv=float(t - 1), tr_b_pinv_sq=float(t - 1),
            rank=t - 1, params={},
        )
    if kind == "ewma":
        if lam is None or not 0.0 < lam < 1.0:
            raise ParameterError(f"EWMA decay factor must satisfy 0 < lambda < 1, got {lam}")
        return WeightMatrix.from_diagonal(lam ** np.arange(t), kind="ewma", params={"lam": lam})
    if kind == "idempotent":
        if rank is None or not 1 <= rank <= t:
            raise ParameterError(f"projector rank must satisfy 1 <= m <= T, got {rank}")
        entries_ = np.concatenate([np.ones(rank), np.zeros(t - rank)])
        return WeightMatrix.from_diagonal(entries_, kind="idempotent", params={"rank": rank})
    if kind == "custom_diagonal":
        if entries is None:
            raise ParameterError("custom_diagonal needs explicit diagonal entries")
        entries = np.asarray(entries, dtype=np.float64)
        if entries.size != t:
            raise DimensionError(f"expected {t} diagonal entries, got {entries.size}")
        return WeightMatrix.from_diagonal(entries)
    raise ParameterError(f"unknown weighting kind {kind!r}; choose from {WEIGHT_KINDS[:-1]}")


def is_idempotent(weight: WeightMatrix, atol: float = _IDEMPOTENT_ATOL) -> bool:
    b = weight.matrix
    return bool(np.max(np.abs(b @ b - b)) < atol)


def estimate_covariance(y, weight: WeightMatrix) -> np.ndarray:
    """General covariance estimator Y^T B Y / Tr(B), symmetrized."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2:
        raise DimensionError(f"returns matrix must be 2-D, got shape {y.shape}")
    if y.shape[0] != weight.t:
        raise DimensionError(
            f"returns have {y.shape[0]} rows but weighting expects {weight.t}"
        )
    if weight.tr_b == 0.0:
        raise DegenerateWeightingError("weighting matrix has zero trace")
    diag = weight.diagonal_entries
    if diag is not None:
        m = (y * diag[:, None]).T @ y
    else:
        m = y.T @ weight.matrix @ y
    return 0.5 * (m + m.T) / weight.tr_b


@dataclass(frozen=True)
class ConditionReport:
    """Diagnostics for the normalized-trace growth condition.

    ``value`` is (tr(B)/T)^2 * tr(B^-2)/T at each requested T; the
    asymptotic requirement is value = o(T).  Being asymptotic it cannot be
    decided at one T, so ``satisfied_hint`` reports the heuristic `value/T
    decreasing along the sweep`.
    """

    values: dict
    ratios: dict
    satisfied_hint: bool | None


DEFAULT_CONDITION_SWEEP = (50, 100, 200, 400, 800)


def _condition_value(weight: WeightMatrix) -> float:
    return (weight.ntr_b ** 2) * weight.ntr_b_pinv_sq


def check_noise_condition(weight_or_builder, sweep=DEFAULT_CONDITION_SWEEP) -> ConditionReport:
    """Evaluate the growth condition for one matrix or a family of them.

    Pass a WeightMatrix for a single-T diagnostic (no hint), or a callable
    T -> WeightMatrix to sweep T over ``sweep`` and report whether value/T
    is decreasing toward zero.
    """
    if isinstance(weight_or_builder, WeightMatrix):
        w = weight_or_builder
        value = _condition_value(w)
        return ConditionReport(
            values={w.t: value}, ratios={w.t: value / w.t}, satisfied_hint=None
        )
    values = {}
    ratios = {}
    with np.errstate(over="ignore"):
        for t in sweep:
            w = weight_or_builder(t)
            value = _condition_value(w)
            values[t] = value
            ratios[t] = value / t
    ordered = [ratios[t] for t in sorted(ratios)]
    decreasing = all(b < a for a, b in zip(ordered, ordered[1:]))
    return ConditionReport(values=values, ratios=ratios, satisfied_hint=decreasing)


def parse_b_spec(spec: str, t: int) -> WeightMatrix:
    """CLI grammar: mle | sample | ewma:LAMBDA | idem:RANK | diag:FILE."""
    spec = spec.strip()
    if spec == "mle":
        return build_weight_matrix("mle", t)
    if spec == "sample":
        return build_weight_matrix("sample_cov", t)
    if spec.startswith("ewma:"):
        try:
            lam = float(spec.split(":", 1)[1])
        except ValueError:
            raise ParameterError(f"bad EWMA decay factor in {spec!r}") from None
        return build_weight_matrix("ewma", t, lam=lam)
    if spec.startswith("idem:"):
        try:
            rank = int(spec.split(":", 1)[1])
        except ValueError:
            raise ParameterError(f"bad projector rank in {spec!r}") from None
        return build_weight_matrix("idempotent", t, rank=rank)
    if spec.startswith("diag:"):
        path = Path(spec.split(":", 1)[1])
        try:
            lines = path.read_text().split()
        except OSError as exc:
            raise ParseError(f"cannot read diagonal file {path}: {exc}") from exc
        try:
            entries = [float(v) for v in lines]
        except ValueError as exc:
            raise ParseError(f"non-numeric entry in diagonal file {path}: {exc}") from exc
        return build_weight_matrix("custom_diagonal", t, entries=entries)
    raise ParameterError(
        f"cannot parse weighting spec {spec!r}; "
        "use mle | sample | ewma:LAMBDA | idem:RANK | diag:FILE"
    )


def spec_kind_params(spec: str) -> tuple[str, dict]:
    """Kind and parameters of a CLI weighting spec, without building it."""
    spec = spec.strip()
    if spec == "mle":
        return "mle", {}
    if spec == "sample":
        return "sample_cov", {}
    if spec.startswith("ewma:"):
        return "ewma", {"lam": float(spec.split(":", 1)[1])}
    if spec.startswith("idem:"):
        return "idempotent", {"rank": int(spec.split(":", 1)[1])}
    if spec.startswith("diag:"):
        return "custom_diagonal", {"path": spec.split(":", 1)[1]}
    raise ParameterError(f"cannot parse weighting spec {spec!r}")
