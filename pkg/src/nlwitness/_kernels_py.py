"""Batched numpy kernels; reference implementation of the compiled core."""
from __future__ import annotations

import numpy as np

NSTAT = 4


def min_eigvalsh(mats: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of each Hermitian matrix in an ``(N, d, d)`` stack."""
    mats = np.asarray(mats, dtype=np.complex128)
    H = (mats + np.conj(np.swapaxes(mats, 1, 2))) / 2
    return np.linalg.eigvalsh(H)[:, 0]


def pt_stats(rhos: np.ndarray, dA: int, dB: int, phi: np.ndarray, psis: np.ndarray) -> np.ndarray:
    """Per-state quantities behind every detection criterion.

    Columns: min eigenvalue of ``rho^{T_B}``, ``<phi|rho^{T_B}|phi>``,
    ``||eta||^2``, (sum of Schmidt coefficients of ``eta``)^2, then
    ``|<psi_k|eta>|^2`` for each row of ``psis``; ``eta = rho^{T_B} phi``.
    """
    rhos = np.asarray(rhos, dtype=np.complex128)
    n, d = rhos.shape[0], dA * dB
    R = rhos.reshape(n, dA, dB, dA, dB).transpose(0, 1, 4, 3, 2).reshape(n, d, d)
    out = np.empty((n, NSTAT + len(psis)))
    out[:, 0] = min_eigvalsh(R)
    eta = R @ phi
    out[:, 1] = np.real(eta @ np.conj(phi))
    out[:, 2] = np.real(np.sum(np.conj(eta) * eta, axis=1))
    sv = np.linalg.svd(eta.reshape(n, dA, dB), compute_uv=False)
    out[:, 3] = np.sum(sv, axis=1) ** 2
    if len(psis):
        out[:, NSTAT:] = np.abs(eta @ np.conj(np.asarray(psis)).T) ** 2
    return out


# ---------------------------------------------------------------------------
# Counter-based per-sample random streams (SplitMix64) and ball sampling

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_PI = 6.283185307179586


def _fmix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def stream_keys(seed: int, stream: int, ordinals: np.ndarray) -> np.ndarray:
    """Initial generator state of each sample stream ``(seed, stream, ordinal)``."""
    with np.errstate(over="ignore"):
        k = _fmix(np.array([seed], dtype=np.uint64) + _GOLDEN)
        k = _fmix(k + np.uint64(stream) + _GOLDEN)
        return _fmix(k + np.asarray(ordinals, dtype=np.uint64) + _GOLDEN)


def _uniform(state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    state = state + _GOLDEN
    z = _fmix(state)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0), state


def _normals(state: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    out = np.empty((state.shape[0], k + (k & 1)))
    for p in range(0, k, 2):
        u1, state = _uniform(state)
        u2, state = _uniform(state)
        r = np.sqrt(-2.0 * np.log(1.0 - u1))
        out[:, p] = r * np.cos(_TWO_PI * u2)
        out[:, p + 1] = r * np.sin(_TWO_PI * u2)
    return out[:, :k], state


def _directions(z: np.ndarray, d: int) -> np.ndarray:
    n = z.shape[0]
    H = np.zeros((n, d, d), dtype=np.complex128)
    di = np.arange(d)
    H[:, di, di] = z[:, :d]
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    off = (z[:, d:d + m] + 1j * z[:, d + m:d + 2 * m]) / np.sqrt(2)
    H[:, iu[0], iu[1]] = off
    H[:, iu[1], iu[0]] = np.conj(off)
    tr = np.sum(z[:, :d], axis=1) / d
    H[:, di, di] -= tr[:, None]
    nrm = np.sqrt(np.sum(np.abs(H) ** 2, axis=(1, 2)))
    return H / nrm[:, None, None]


def sample_ball_batch(center: np.ndarray, radius: float, method: int, seed: int, stream: int,
                      ordinals: np.ndarray, max_tries: int) -> tuple[np.ndarray, np.ndarray]:
    """Rejection-sample one state per ordinal from the HS ball around ``center``.

    ``method`` 0: flat traceless perturbation, rejected unless PSD.
    ``method`` 1: Hilbert-Schmidt random state, rejected unless inside the ball.
    Returns ``(states, tries)``; ``tries == -1`` marks an exhausted stream.
    """
    center = np.asarray(center, dtype=np.complex128)
    d = center.shape[0]
    n = len(ordinals)
    out = np.zeros((n, d, d), dtype=np.complex128)
    tries = np.full(n, -1, dtype=np.int64)
    state = stream_keys(seed, stream, ordinals)
    pending = np.arange(n)
    expo = 1.0 / (d * d - 1)
    with np.errstate(over="ignore"):
        for attempt in range(1, max_tries + 1):
            if pending.size == 0:
                break
            st = state[pending]
            if method == 0:
                z, st = _normals(st, d * d)
                u, st = _uniform(st)
                cand = center + (radius * u ** expo)[:, None, None] * _directions(z, d)
                ok = min_eigvalsh(cand) >= 0.0
            else:
                z, st = _normals(st, 2 * d * d)
                G = (z[:, 0::2] + 1j * z[:, 1::2]).reshape(-1, d, d)
                M = G @ np.conj(np.swapaxes(G, 1, 2))
                cand = M / np.real(np.trace(M, axis1=1, axis2=2))[:, None, None]
                ok = np.sqrt(np.sum(np.abs(cand - center) ** 2, axis=(1, 2))) <= radius
            state[pending] = st
            acc = pending[ok]
            out[acc] = cand[ok]
            tries[acc] = attempt
            pending = pending[~ok]
    return out, tries
