"""Kernel backend selected at import.

The compiled ``_core`` extension is used when it was built; otherwise the
numpy implementation in ``_kernels_py``. Set ``NLWITNESS_BACKEND=python``
to force the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

NSTAT = _kernels_py.NSTAT

_core = None
if os.environ.get("NLWITNESS_BACKEND", "").lower() != "python":
    try:
        from . import _core  # type: ignore[no-redef]
    except ImportError:
        _core = None

BACKEND = "compiled" if _core is not None else "python"


def _impl(backend: str | None):
    name = backend or BACKEND
    if name == "compiled":
        if _core is None:
            raise RuntimeError("compiled kernels are not available in this build")
        return _core
    if name == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


def min_eigvalsh(mats: np.ndarray, backend: str | None = None) -> np.ndarray:
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    if mats.shape[0] == 0:
        return np.empty(0)
    return _impl(backend).min_eigvalsh(mats)


def pt_stats(rhos: np.ndarray, dA: int, dB: int, phi: np.ndarray, psis: np.ndarray,
             backend: str | None = None) -> np.ndarray:
    rhos = np.ascontiguousarray(rhos, dtype=np.complex128)
    phi = np.ascontiguousarray(phi, dtype=np.complex128)
    psis = np.ascontiguousarray(np.reshape(psis, (-1, dA * dB)), dtype=np.complex128)
    if rhos.shape[0] == 0:
        return np.empty((0, NSTAT + psis.shape[0]))
    return _impl(backend).pt_stats(rhos, dA, dB, phi, psis)


def stream_keys(seed: int, stream: int, ordinals: np.ndarray, backend: str | None = None) -> np.ndarray:
    ordinals = np.ascontiguousarray(ordinals, dtype=np.uint64)
    return np.asarray(_impl(backend).stream_keys(seed, stream, ordinals), dtype=np.uint64)


def sample_ball_batch(center: np.ndarray, radius: float, method: int, seed: int, stream: int,
                      ordinals: np.ndarray, max_tries: int,
                      backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    center = np.ascontiguousarray(center, dtype=np.complex128)
    ordinals = np.ascontiguousarray(ordinals, dtype=np.uint64)
    return _impl(backend).sample_ball_batch(center, float(radius), int(method), int(seed),
                                            int(stream), ordinals, int(max_tries))
