"""Replay-kernel backend selection.

The compiled Cython kernel is used when it imported cleanly; otherwise the
pure-Python twin takes over.  ``URNDIST_BACKEND=python|cython`` forces a
backend (the benchmark and the cross-backend tests use this).  Both kernels
produce bit-identical output.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _kernel_cy
except ImportError:
    _kernel_cy = None

_BACKENDS = {"python": _kernel_py}
if _kernel_cy is not None:
    _BACKENDS["cython"] = _kernel_cy

METRIC_HELLINGER = _kernel_py.METRIC_HELLINGER
METRIC_KL = _kernel_py.METRIC_KL


def get_kernel(name: str | None = None):
    """Return the kernel module for ``name`` (default: best available)."""
    if name is None:
        name = os.environ.get("URNDIST_BACKEND")
    if name is None:
        return _BACKENDS.get("cython", _kernel_py)
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {sorted(_BACKENDS)}"
        ) from None


def active_backend() -> str:
    return get_kernel().BACKEND


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))
