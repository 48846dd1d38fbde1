"""Dense complex-matrix primitives for bipartite systems.

All routines act on plain ``numpy`` arrays together with a pair of local
dimensions ``(dA, dB)``. Composite indices follow the usual Kronecker
convention: basis vector ``|i k>`` sits at position ``i * dB + k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, NotHermitianError, NotPSDError

HERMITIAN_TOL = 1e-10
PSD_CLAMP = 1e-10
MAX_DIM = 64


def check_dims(dims: Sequence[int], size: int | None = None) -> tuple[int, int]:
    """Validate a bipartite dimension pair, optionally against a total size."""
    if len(dims) != 2:
        raise DimensionError(f"expected two local dimensions, got {tuple(dims)}")
    dA, dB = int(dims[0]), int(dims[1])
    if dA < 2 or dB < 2:
        raise DimensionError(f"local dimensions must be >= 2, got ({dA}, {dB})")
    if dA * dB > MAX_DIM:
        raise DimensionError(f"total dimension {dA * dB} exceeds cap {MAX_DIM}")
    if size is not None and dA * dB != size:
        raise DimensionError(
            f"dims ({dA}, {dB}) expect size {dA * dB}, got {size}"
        )
    return dA, dB


def _square(M: np.ndarray, dims: Sequence[int] | None = None) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if dims is not None:
        check_dims(dims, M.shape[0])
    return M


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conjugate(np.swapaxes(M, -1, -2))


def hermitize(M: np.ndarray) -> np.ndarray:
    """Return the Hermitian part ``(M + M^dagger) / 2``."""
    return (M + dagger(M)) / 2


def partial_transpose(M: np.ndarray, dims: Sequence[int], subsystem: str = "B") -> np.ndarray:
    """Transpose one tensor factor of a bipartite operator.

    For ``subsystem="B"`` the entries map as ``M[ij, kl] -> M[il, kj]``
    (``i, k`` label A, ``j, l`` label B).

    >>> import numpy as np
    >>> np.allclose(partial_transpose(np.eye(4), (2, 2)), np.eye(4))
    True
    """
    M = _square(M, dims)
    dA, dB = int(dims[0]), int(dims[1])
    T = M.reshape(dA, dB, dA, dB)
    if subsystem == "B":
        T = T.transpose(0, 3, 2, 1)
    elif subsystem == "A":
        T = T.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return np.ascontiguousarray(T.reshape(dA * dB, dA * dB))


def partial_trace(M: np.ndarray, dims: Sequence[int], traced: str = "B") -> np.ndarray:
    """Trace out subsystem ``traced`` and return the operator on the other one."""
    M = _square(M, dims)
    dA, dB = int(dims[0]), int(dims[1])
    T = M.reshape(dA, dB, dA, dB)
    if traced == "B":
        return np.einsum("ijkj->ik", T)
    if traced == "A":
        return np.einsum("ijil->jl", T)
    raise ValueError(f"traced must be 'A' or 'B', got {traced!r}")


def hermitian_eig(M: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    The input is symmetrized before solving. Eigenvalues come back in
    ascending order with orthonormal eigenvectors as columns.

    Raises
    ------
    NotHermitianError
        If ``M`` deviates from its adjoint by more than ``tol`` entrywise.
    """
    M = _square(M)
    dev = np.max(np.abs(M - dagger(M))) if M.size else 0.0
    if dev > tol:
        raise NotHermitianError(f"matrix not Hermitian (max deviation {dev:.3e} > {tol:.0e})")
    return np.linalg.eigh(hermitize(M))


@dataclass(frozen=True)
class SchmidtData:
    """Schmidt decomposition ``v = sum_i c_i |a_i>|b_i>``.

    ``basisA`` holds the ``a_i`` as columns (a full ``dA x dA`` unitary) and
    ``basisB`` holds the ``b_i`` as columns (``dB x dB``). Only the first
    ``min(dA, dB)`` columns pair with a coefficient.
    """

    coefficients: np.ndarray
    basisA: np.ndarray
    basisB: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.coefficients > 1e-14 * max(1.0, self.coefficients[0])))

    def reconstruct(self) -> np.ndarray:
        k = len(self.coefficients)
        return np.einsum("i,ai,bi->ab", self.coefficients, self.basisA[:, :k], self.basisB[:, :k]).ravel()


def schmidt(v: np.ndarray, dims: Sequence[int]) -> SchmidtData:
    """Schmidt decomposition via an SVD of the ``dA x dB`` reshaping.

    The vector need not be normalized; coefficients scale with its norm.
    """
    v = np.asarray(v, dtype=complex).ravel()
    dA, dB = check_dims(dims, v.size)
    if not np.any(v):
        raise ValueError("Schmidt decomposition of the zero vector")
    U, sv, Vh = np.linalg.svd(v.reshape(dA, dB))
    return SchmidtData(coefficients=sv, basisA=U, basisB=Vh.T)


def max_schmidt_sq(v: np.ndarray, dims: Sequence[int]) -> float:
    """Square of the largest Schmidt coefficient of a normalized vector."""
    v = np.asarray(v, dtype=complex).ravel()
    dA, dB = check_dims(dims, v.size)
    if not np.any(v):
        raise ValueError("Schmidt decomposition of the zero vector")
    return float(np.linalg.norm(v.reshape(dA, dB), 2) ** 2)


def nuclear_norm_vec(v: np.ndarray, dims: Sequence[int]) -> float:
    """Sum of the Schmidt coefficients of ``v`` (zero for the zero vector)."""
    v = np.asarray(v, dtype=complex).ravel()
    dA, dB = check_dims(dims, v.size)
    return float(np.sum(np.linalg.svd(v.reshape(dA, dB), compute_uv=False)))


def matrix_sqrt_psd(M: np.ndarray, clamp: float = PSD_CLAMP) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-clamp, 0)`` are treated as zero; anything more
    negative raises :class:`NotPSDError`.
    """
    w, V = hermitian_eig(M)
    if w.size and w[0] < -clamp:
        raise NotPSDError(f"matrix not PSD (min eigenvalue {w[0]:.3e})")
    w = np.sqrt(np.clip(w, 0.0, None))
    return hermitize((V * w) @ dagger(V))


def hs_inner(M: np.ndarray, N: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``Tr(M^dagger N)``."""
    M = np.asarray(M, dtype=complex)
    N = np.asarray(N, dtype=complex)
    if M.shape != N.shape:
        raise DimensionError(f"shape mismatch {M.shape} vs {N.shape}")
    return complex(np.vdot(M, N))


def hs_norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(M, dtype=complex)))


def hermitian_split(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``X = H + iA`` with ``H`` and ``A`` Hermitian."""
    X = _square(X)
    Xd = dagger(X)
    return (X + Xd) / 2, (X - Xd) / 2j


def ket(*digits: int, dims: Sequence[int] | None = None) -> np.ndarray:
    """Computational basis vector, e.g. ``ket(0, 1)`` is ``|01>`` for qubits."""
    if dims is None:
        dims = (2,) * len(digits)
    out = np.array([1.0 + 0j])
    for d, k in zip(dims, digits):
        e = np.zeros(d, dtype=complex)
        e[k] = 1
        out = np.kron(out, e)
    return out


def proj(v: np.ndarray) -> np.ndarray:
    """Rank-one operator ``|v><v|``."""
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())
