"""Backend dispatch for the Monte Carlo hot loops.

Two interchangeable kernel sets cover the per-trial inner loops: a
numba-jitted implementation and a pure-numpy vectorized fallback.  The
active backend is chosen by the ``WISHART_RISK_BACKEND`` environment
variable ("numba" or "numpy"); the default prefers numba when it imports,
falling back to numpy otherwise.  Random variates are always drawn outside
the kernels, so both backends consume identical inputs and produce results
that agree to floating-point roundoff.

Kernel surface (identical in both modules):

- ``haar_batch(gauss)``: QR-orthogonalize a stack of square Gaussian
  matrices with the sign correction that makes the output Haar.
- ``inv_gram_batch(y, b)``: per trial, invert M = Y^T B Y; returns the
  inverse stack and a success flag per trial (False when M is not
  positive definite).
"""

from __future__ import annotations

import os

from ..errors import UsageError

BACKEND_ENV = "WISHART_RISK_BACKEND"
_cache = {}


def available_backends():
    backends = ["numpy"]
    try:
        import numba  # noqa: F401

        backends.insert(0, "numba")
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass
    return backends


def default_backend():
    return available_backends()[0]


def get_kernels(name: str | None = None):
    """Return the kernel module for ``name`` (or the configured default)."""
    if name is None:
        name = os.environ.get(BACKEND_ENV, "").strip().lower() or default_backend()
    if name not in ("numba", "numpy"):
        raise UsageError(f"unknown kernel backend {name!r}; use 'numba' or 'numpy'")
    if name not in _cache:
        if name == "numba":
            try:
                from . import _numba_impl as module
            except ImportError as exc:
                raise UsageError(f"numba backend unavailable: {exc}") from exc
        else:
            from . import _numpy_impl as module
        _cache[name] = module
    return _cache[name]
