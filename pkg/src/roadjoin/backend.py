"""Selection of the shortest-path kernel backend.

Two interchangeable implementations of the hot inner loop exist:

* ``numba`` -- JIT-compiled, releases the GIL (default when importable);
* ``python`` -- pure-Python fallback, bit-identical results.

The ``ROADJOIN_BACKEND`` environment variable picks one at import time
(``numba``, ``python``, or ``auto``); :func:`set_backend` overrides it at
runtime, which the backend benchmark uses to compare the two.
"""
from __future__ import annotations

import os

from . import _kernels_py
from .errors import DomainError

_BACKENDS = {"python": _kernels_py}

try:
    from . import _kernels_numba

    _BACKENDS["numba"] = _kernels_numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    pass


def available_backends():
    return sorted(_BACKENDS)


def _resolve(name):
    if name == "auto":
        return "numba" if "numba" in _BACKENDS else "python"
    if name not in _BACKENDS:
        raise DomainError(
            f"unknown backend {name!r}; expected one of {available_backends()} or 'auto'"
        )
    return name


_active = _resolve(os.environ.get("ROADJOIN_BACKEND", "auto").strip().lower() or "auto")


def get_backend() -> str:
    return _active


def set_backend(name: str) -> str:
    """Switch the kernel backend; returns the previously active name."""
    global _active
    previous = _active
    _active = _resolve(name)
    return previous


def dijkstra_csr(indptr, nbrs, wts, source, radius, init_cost, heap_keys, heap_vals):
    return _BACKENDS[_active].dijkstra_csr(
        indptr, nbrs, wts, source, radius, init_cost, heap_keys, heap_vals
    )
