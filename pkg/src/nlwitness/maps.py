"""Linear maps through the Jamiolkowski isomorphism and map-based witnesses.

A map ``eps: B(H_in) -> B(H_out)`` is stored as its operator

    E = sum_ij |i><j| (x) eps(|i><j|)   on H_in (x) H_out,

and acts as ``eps(X) = Tr_in(E (X^T (x) 1_out))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg as la
from .errors import DimensionError, MapCertificationError
from .states import PureVector, as_matrix, as_vector, dims_of, random_pure
from .witness import (
    CERTIFY_TOL,
    CorrectionTerm,
    LinearWitness,
    check_P_positivity,
)

MAP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LinearMap:
    E: np.ndarray
    in_dim: int
    out_dim: int

    def __post_init__(self):
        n = self.in_dim * self.out_dim
        if self.E.shape != (n, n):
            raise DimensionError(f"operator shape {self.E.shape} does not fit {self.in_dim}x{self.out_dim}")

    @property
    def blocks(self) -> np.ndarray:
        """``blocks[i, :, j, :] = eps(|i><j|)``."""
        return self.E.reshape(self.in_dim, self.out_dim, self.in_dim, self.out_dim)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return apply_map(self, X)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], in_dim: int, out_dim: int) -> "LinearMap":
        E = np.zeros((in_dim * out_dim, in_dim * out_dim), dtype=complex)
        for i in range(in_dim):
            for j in range(in_dim):
                Eij = np.zeros((in_dim, in_dim), dtype=complex)
                Eij[i, j] = 1
                E += np.kron(Eij, np.asarray(fn(Eij), dtype=complex))
        return cls(E, in_dim, out_dim)


def map_from_operator(E: np.ndarray, dims: Sequence[int]) -> LinearMap:
    E = np.asarray(E, dtype=complex)
    dB, dC = int(dims[0]), int(dims[1])
    if E.shape != (dB * dC, dB * dC):
        raise DimensionError(f"operator shape {E.shape} does not match dims ({dB}, {dC})")
    return LinearMap(E.copy(), dB, dC)


def apply_map(m: LinearMap, X: np.ndarray) -> np.ndarray:
    """``Tr_in(E (X^T (x) 1_out))``."""
    X = np.asarray(X, dtype=complex)
    if X.shape != (m.in_dim, m.in_dim):
        raise DimensionError(f"input shape {X.shape}, map expects ({m.in_dim}, {m.in_dim})")
    prod = m.E @ np.kron(X.T, np.eye(m.out_dim))
    return la.partial_trace(prod, (m.in_dim, m.out_dim), traced="A")


def operator_from_map(m: LinearMap) -> np.ndarray:
    """``(I (x) eps)(|phi+><phi+|)`` with the unnormalized ``|phi+> = sum_i |ii>``."""
    d = m.in_dim
    phi_plus = np.eye(d, dtype=complex).ravel()
    return _apply_to_B_matrix(m, la.proj(phi_plus), d)


def _apply_to_B_matrix(m: LinearMap, M: np.ndarray, dA: int) -> np.ndarray:
    """``(I_A (x) eps)(M)`` column block by column block."""
    dB = m.in_dim
    if M.shape != (dA * dB, dA * dB):
        raise DimensionError(f"operator shape {M.shape} does not fit ({dA}, {dB})")
    T = M.reshape(dA, dB, dA, dB)
    out = np.einsum("aibj,icjd->acbd", T, m.blocks)
    return out.reshape(dA * m.out_dim, dA * m.out_dim)


def apply_to_B(m: LinearMap, rho, dA: int | None = None) -> np.ndarray:
    """``(I_A (x) Lambda)(rho)``."""
    M = as_matrix(rho)
    if dA is None:
        dims = getattr(rho, "dims", None)
        if dims is not None:
            if dims[1] != m.in_dim:
                raise DimensionError(f"state B-dimension {dims[1]} vs map input {m.in_dim}")
            dA = dims[0]
        else:
            dA = M.shape[0] // m.in_dim
    return _apply_to_B_matrix(m, M, dA)


def adjoint_map(m: LinearMap) -> LinearMap:
    """Adjoint w.r.t. ``Tr(X^dagger Y)``: ``adj(X)_ij = Tr(eps(|i><j|)^dagger X)``."""
    E = m.blocks  # E[b, c, b', c']
    Ead = np.conj(E).transpose(1, 0, 3, 2)
    n = m.in_dim * m.out_dim
    return LinearMap(np.ascontiguousarray(Ead.reshape(n, n)), m.out_dim, m.in_dim)


# ---------------------------------------------------------------------------
# Standard maps


def transposition_map(d: int) -> LinearMap:
    return LinearMap.from_function(lambda X: X.T, d, d)


def identity_map(d: int) -> LinearMap:
    return LinearMap.from_function(lambda X: X, d, d)


def reduction_map(d: int) -> LinearMap:
    """``X -> Tr(X) 1 - X``; positive but not completely positive."""
    return LinearMap.from_function(lambda X: np.trace(X) * np.eye(d) - X, d, d)


# ---------------------------------------------------------------------------
# Certification


def _block_min(E: np.ndarray, dB: int, dC: int, restarts: int, seed: int, iters: int = 500) -> float:
    """Minimize ``<a (x) b|E|a (x) b>`` over unit local vectors (projected gradient)."""
    E4 = E.reshape(dB, dC, dB, dC)
    g = np.random.default_rng(seed)
    A = g.standard_normal((restarts, dB)) + 1j * g.standard_normal((restarts, dB))
    B = g.standard_normal((restarts, dC)) + 1j * g.standard_normal((restarts, dC))
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    B /= np.linalg.norm(B, axis=1, keepdims=True)

    def q_and_grad(A, B):
        EA = np.einsum("jkil,ri,rl->rjk", E4, A, B)
        q = np.einsum("rj,rk,rjk->r", A.conj(), B.conj(), EA).real
        ga = np.einsum("rk,rjk->rj", B.conj(), EA)
        gb = np.einsum("rj,rjk->rk", A.conj(), EA)
        return q, 2 * ga, 2 * gb

    q, ga, gb = q_and_grad(A, B)
    step = np.full(restarts, 0.1)
    for _ in range(iters):
        ta = ga - A * np.real(np.sum(A.conj() * ga, axis=1))[:, None]
        tb = gb - B * np.real(np.sum(B.conj() * gb, axis=1))[:, None]
        A2 = A - step[:, None] * ta
        B2 = B - step[:, None] * tb
        A2 /= np.linalg.norm(A2, axis=1, keepdims=True)
        B2 /= np.linalg.norm(B2, axis=1, keepdims=True)
        q2, ga2, gb2 = q_and_grad(A2, B2)
        acc = q2 <= q
        A[acc], B[acc], ga[acc], gb[acc], q[acc] = A2[acc], B2[acc], ga2[acc], gb2[acc], q2[acc]
        step = np.where(acc, np.minimum(step * 1.5, 10.0), step * 0.5)
    return float(q.min())


def certify_map(m: LinearMap, samples: int = 200, restarts: int = 64, seed: int = 0,
                trace_decreasing: bool = True) -> dict:
    """Numerically check that ``m`` is positive (and trace non-increasing).

    Returns the diagnostics; raises :class:`MapCertificationError` on failure.
    """
    g = np.random.default_rng(seed)
    herm_dev = 0.0
    min_out = np.inf
    trace_excess = -np.inf
    for _ in range(samples):
        v = random_pure(m.in_dim, g)
        X = np.outer(v, v.conj())
        Y = apply_map(m, X)
        herm_dev = max(herm_dev, float(np.max(np.abs(Y - la.dagger(Y)))))
        min_out = min(min_out, float(np.linalg.eigvalsh(la.hermitize(Y))[0]))
        trace_excess = max(trace_excess, float(np.trace(Y).real) - 1.0)
    min_out = min(min_out, _block_min(m.E, m.in_dim, m.out_dim, restarts, seed))
    top = float(np.linalg.eigvalsh(la.hermitize(apply_map(adjoint_map(m), np.eye(m.out_dim))))[-1])
    report = {"hermiticity": herm_dev, "min_output_eig": min_out,
              "trace_excess": max(trace_excess, top - 1.0)}
    if herm_dev > MAP_TOL:
        raise MapCertificationError(f"map does not preserve Hermiticity (deviation {herm_dev:.3e})")
    if min_out < -MAP_TOL:
        raise MapCertificationError(f"map is not positive: output eigenvalue {min_out:.3e} on a pure input")
    if trace_decreasing and report["trace_excess"] > MAP_TOL:
        raise MapCertificationError(
            f"map increases trace: largest eigenvalue of adjoint(1) is {top:.6g} > 1"
        )
    return report


# ---------------------------------------------------------------------------
# Witnesses from maps


def witness_from_map(m: LinearMap, phi, dA: int | None = None) -> LinearWitness:
    """``W = (I_A (x) Lambda)^+ (|phi><phi|)``; ``phi`` lives on ``A (x) out``."""
    v = as_vector(phi)
    if dA is None:
        dA = v.size // m.out_dim
    adj = adjoint_map(m)
    W = la.hermitize(_apply_to_B_matrix(adj, la.proj(v), dA))
    return LinearWitness(W, PureVector(v, (dA, m.out_dim)), (dA, m.in_dim))


@dataclass(frozen=True, eq=False)
class MapWitness:
    """Nonlinear witness routed through a certified positive map."""

    map: LinearMap
    base: LinearWitness
    ops: tuple[np.ndarray, ...]
    ops_dag: tuple[np.ndarray, ...]
    alphas: tuple[float, ...]
    orders: tuple[int, ...]

    def linear(self, rho) -> float:
        return float(np.real(np.sum(self.base.W.T * as_matrix(rho))))

    def evaluate(self, rho) -> float:
        M = as_matrix(rho)
        val = self.linear(M)
        for Op, Opd, a, k in zip(self.ops, self.ops_dag, self.alphas, self.orders):
            t = np.sum(Op.T * M)
            td = np.sum(Opd.T * M)
            val -= a * (np.real(t * td)) ** (k // 2)
        return float(val)


def build_map_witness(m: LinearMap, phi, psis: Sequence = (), alphas: Sequence[float] = (),
                      orders: Sequence[int] | None = None, dA: int | None = None,
                      restarts: int = 200, seed: int = 0, certify: bool = True) -> MapWitness:
    """Certify ``m`` and the correction terms, then precompute ``(I (x) Lambda)^+(X_i)``."""
    v = as_vector(phi)
    if dA is None:
        dA = v.size // m.out_dim
    psis = [as_vector(p) for p in psis]
    alphas = [float(a) for a in alphas]
    orders = list(orders) if orders is not None else [2] * len(psis)
    if not (len(psis) == len(alphas) == len(orders)):
        raise ValueError("psis, alphas and orders must have equal length")
    if certify:
        certify_map(m, seed=seed)
        if psis:
            terms = [CorrectionTerm(PureVector(p, (dA, m.out_dim)), a, k)
                     for p, a, k in zip(psis, alphas, orders)]
            res = check_P_positivity(PureVector(v, (dA, m.out_dim)), terms, restarts=restarts, seed=seed)
            if res.min_value < -CERTIFY_TOL:
                raise MapCertificationError(f"correction polynomial negative ({res.min_value:.3e})")
    base = witness_from_map(m, v, dA)
    adj = adjoint_map(m)
    ops = tuple(_apply_to_B_matrix(adj, np.outer(v, p.conj()), dA) for p in psis)
    ops_dag = tuple(_apply_to_B_matrix(adj, np.outer(p, v.conj()), dA) for p in psis)
    return MapWitness(m, base, ops, ops_dag, tuple(alphas), tuple(orders))


def improve_via_map(m: LinearMap, phi, psis: Sequence, alphas: Sequence[float], rho, **kw) -> float:
    """One-shot evaluation of a map-routed nonlinear witness on ``rho``."""
    return build_map_witness(m, phi, psis, alphas, **kw).evaluate(rho)


def improve_witness_operator(E: np.ndarray, dims: Sequence[int], psis: Sequence | None = None,
                             alphas: Sequence[float] | None = None, **kw) -> MapWitness:
    """Nonlinear improvement of an arbitrary witness operator ``E`` on ``X (x) Y``.

    ``E`` defines ``eps: B(X) -> B(Y)``; the witness is regenerated as
    ``(I (x) eps)(|phi+><phi+|)`` with ``Lambda = eps^+``, after rescaling so
    that ``Lambda`` is trace non-increasing. Without explicit ``psis`` the
    computational basis of ``X' (x) X`` is used with unit coefficients.
    """
    dX, dY = int(dims[0]), int(dims[1])
    E = la.hermitize(np.asarray(E, dtype=complex))
    eps = map_from_operator(E, (dX, dY))
    top = float(np.linalg.eigvalsh(la.partial_trace(E, (dX, dY), traced="A"))[-1])
    if top > 1:
        eps = LinearMap(eps.E / top, dX, dY)
    lam = adjoint_map(eps)
    phi = np.eye(dX, dtype=complex).ravel() / np.sqrt(dX)
    if psis is None:
        psis = list(np.eye(dX * dX, dtype=complex))
        alphas = [1.0] * len(psis)
    return build_map_witness(lam, phi, psis, alphas, dA=dX, **kw)
