"""Linear witnesses from NPT eigenvectors and their nonlinear improvements.

A linear witness ``W = |phi><phi|^{T_B}`` is improved by subtracting
nonnegative terms ``alpha_i |<X_i^{T_B}>|^2`` with ``X_i = |phi><psi_i|``
(quadratic) or ``alpha_i |<X_i^{T_B}>|^4`` (quartic). The result stays
nonnegative on separable states whenever the polynomial

    P(chi) = 1 - sum_i alpha_i |<chi|phi>|^(order_i - 2) |<chi|psi_i>|^order_i

is nonnegative on all product vectors ``chi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg as la
from .errors import DimensionError, InvariantViolation, UncertifiedWitnessError
from .states import (
    DensityMatrix,
    PureVector,
    as_matrix,
    as_vector,
    dims_of,
    npt_eigenpair,
)

DETECT_TOL = 1e-12
ETA_TINY = 1e-12
ORTHO_TOL = 1e-10
CERTIFY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LinearWitness:
    """Hermitian operator ``W`` with generator ``phi`` (``W = |phi><phi|^{T_B}`` by default)."""

    W: np.ndarray
    phi: PureVector
    dims: tuple[int, int]

    @classmethod
    def from_vector(cls, phi, dims: Sequence[int] | None = None) -> "LinearWitness":
        dims = dims_of(phi, default=dims)
        v = as_vector(phi)
        la.check_dims(dims, v.size)
        W = la.partial_transpose(la.proj(v), dims)
        return cls(W, PureVector(v, tuple(dims)), tuple(dims))


@dataclass(frozen=True, eq=False)
class CorrectionTerm:
    """``alpha * |<(|phi><psi|)^{T_B}>|^order`` with ``order`` 2 (quadratic) or 4 (quartic)."""

    psi: PureVector
    alpha: float
    order: int = 2

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"correction coefficient must be positive, got {self.alpha}")
        if self.order not in (2, 4):
            raise ValueError(f"order must be 2 or 4, got {self.order}")


@dataclass(frozen=True, eq=False)
class NonlinearWitness:
    base: LinearWitness
    terms: tuple[CorrectionTerm, ...] = ()
    certified: bool = False
    certificate: float | None = field(default=None)

    @classmethod
    def f1(cls, phi, psi, dims=None) -> "NonlinearWitness":
        base = LinearWitness.from_vector(phi, dims)
        psi = _pv(psi, base.dims)
        return cls(base, (CorrectionTerm(psi, 1.0 / psi.max_schmidt_sq()),), certified=True)

    @classmethod
    def f2(cls, phi, basis, dims=None) -> "NonlinearWitness":
        base = LinearWitness.from_vector(phi, dims)
        basis = [_pv(b, base.dims) for b in basis]
        check_orthonormal([b.vec for b in basis])
        return cls(base, tuple(CorrectionTerm(b, 1.0) for b in basis), certified=True)

    @classmethod
    def f3(cls, phi, psi1, psi2, s_phi: float, dims=None, quartic: str = "psi2") -> "NonlinearWitness":
        base = LinearWitness.from_vector(phi, dims)
        psi1, psi2 = _pv(psi1, base.dims), _pv(psi2, base.dims)
        _check_f3(base.phi, psi1, psi2, s_phi)
        if quartic == "psi1":
            psi1, psi2 = psi2, psi1
        elif quartic != "psi2":
            raise ValueError(f"quartic must be 'psi1' or 'psi2', got {quartic!r}")
        quad, quart = f3_coefficients(s_phi)
        terms = (CorrectionTerm(psi1, quad, 2), CorrectionTerm(psi2, quart, 4))
        return cls(base, terms, certified=True)

    @classmethod
    def certify(cls, base: LinearWitness, terms: Sequence[CorrectionTerm],
                restarts: int = 1000, seed: int = 0) -> "NonlinearWitness":
        """Certify an arbitrary term set by minimizing ``P`` over product vectors.

        Raises :class:`UncertifiedWitnessError` if a negative minimum is found.
        """
        terms = tuple(terms)
        if not terms:
            return cls(base, (), certified=True, certificate=1.0)
        res = check_P_positivity(base.phi, terms, restarts=restarts, seed=seed)
        if res.min_value < -CERTIFY_TOL:
            raise UncertifiedWitnessError(
                f"P(chi) reaches {res.min_value:.3e} < 0 on a product vector; term set rejected"
            )
        return cls(base, terms, certified=True, certificate=res.min_value)


def _pv(v, dims) -> PureVector:
    if isinstance(v, PureVector):
        if tuple(v.dims) != tuple(dims):
            raise DimensionError(f"vector dims {v.dims} do not match {tuple(dims)}")
        return v
    return PureVector.from_array(v, dims)


def check_orthonormal(vectors: Sequence[np.ndarray], tol: float = ORTHO_TOL) -> None:
    V = np.array([np.asarray(v, dtype=complex).ravel() for v in vectors])
    gram = V.conj() @ V.T
    dev = float(np.max(np.abs(gram - np.eye(len(V))))) if len(V) else 0.0
    if dev > tol:
        raise ValueError(f"vectors not orthonormal (max Gram deviation {dev:.3e})")


def f3_coefficients(s_phi: float) -> tuple[float, float]:
    """Quadratic and quartic coefficients of the fourth-order witness."""
    return 2.0 - 2.0 / (27.0 * s_phi), 2.0 / s_phi


def _check_f3(phi: PureVector, psi1: PureVector, psi2: PureVector, s_phi: float) -> None:
    try:
        check_orthonormal([phi.vec, psi1.vec, psi2.vec])
    except ValueError as exc:
        raise ValueError(f"phi, psi1, psi2 must be orthonormal: {exc}") from None
    for name, p in (("psi1", psi1), ("psi2", psi2)):
        s = p.max_schmidt_sq()
        if abs(s - 0.5) > 1e-10:
            raise ValueError(f"{name} must have largest squared Schmidt coefficient 1/2, got {s:.12g}")
    if s_phi < 0.5:
        raise ValueError(f"s_phi must be >= 1/2, got {s_phi}")
    s = phi.max_schmidt_sq()
    if s_phi < s - 1e-10:
        raise ValueError(f"s_phi={s_phi} is below the largest squared Schmidt coefficient {s:.12g} of phi")


# ---------------------------------------------------------------------------
# Evaluation


def witness_from_npt(rho0) -> tuple[LinearWitness, float]:
    """Witness built from the negative eigenvector of ``rho0^{T_B}``."""
    lam, phi = npt_eigenpair(rho0)
    return LinearWitness.from_vector(phi), lam


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-10 * max(1.0, abs(z.real)):
        raise InvariantViolation(f"{what} has imaginary part {z.imag:.3e}")
    return float(z.real)


def _check_pair(w: LinearWitness, rho) -> np.ndarray:
    M = as_matrix(rho)
    if M.shape != w.W.shape:
        raise DimensionError(f"witness shape {w.W.shape} vs state shape {M.shape}")
    d = getattr(rho, "dims", None)
    if d is not None and tuple(d) != tuple(w.dims):
        raise DimensionError(f"witness dims {w.dims} vs state dims {tuple(d)}")
    return M


def eval_linear(w: LinearWitness, rho) -> float:
    """``Tr(W rho)``; negative values certify entanglement."""
    M = _check_pair(w, rho)
    return _real(complex(np.sum(w.W.T * M)), "Tr(W rho)")


def correction_expectation(phi, psi, rho, dims=None) -> complex:
    """``<(|phi><psi|)^{T_B}>_rho`` computed through the operator."""
    M = as_matrix(rho)
    dims = dims_of(rho, phi, psi, default=dims)
    X = np.outer(as_vector(phi), as_vector(psi).conj())
    XT = la.partial_transpose(X, dims)
    if XT.shape != M.shape:
        raise DimensionError(f"operator shape {XT.shape} vs state shape {M.shape}")
    return complex(np.sum(XT.T * M))


def nonlinear_term(phi, psi, rho, dims=None) -> float:
    """``<X^{T_B}> <(X^{T_B})^dagger>`` for ``X = |phi><psi|``."""
    return abs(correction_expectation(phi, psi, rho, dims)) ** 2


def eval_F1(phi, psi, rho) -> float:
    """Linear value minus the single correction weighted by ``1/s(psi)``."""
    return eval_F_general(NonlinearWitness.f1(phi, psi, dims_of(phi, rho)), rho)


def eval_F2(phi, basis, rho) -> float:
    """Linear value minus the corrections for every vector of an orthonormal set."""
    return eval_F_general(NonlinearWitness.f2(phi, basis, dims_of(phi, rho)), rho)


def eval_F3(phi, psi1, psi2, s_phi: float, rho, quartic: str = "psi2") -> float:
    """Fourth-order witness: quadratic term on ``psi1``, quartic term on ``psi2``."""
    return eval_F_general(NonlinearWitness.f3(phi, psi1, psi2, s_phi, dims_of(phi, rho), quartic), rho)


def eval_F_general(nw: NonlinearWitness, rho) -> float:
    if not nw.certified:
        raise UncertifiedWitnessError("term set has no positivity certificate; use NonlinearWitness.certify")
    value = eval_linear(nw.base, rho)
    for t in nw.terms:
        value -= t.alpha * nonlinear_term(nw.base.phi, t.psi, rho, nw.base.dims) ** (t.order // 2)
    return value


# ---------------------------------------------------------------------------
# Exact detection criteria


class Detection(NamedTuple):
    detected: bool
    lhs: float
    rhs: float
    rhs_alt: float = float("nan")


def _eta(phi, rho) -> tuple[np.ndarray, tuple[int, int], np.ndarray]:
    dims = dims_of(rho, phi)
    R = la.partial_transpose(as_matrix(rho), dims)
    return R @ as_vector(phi), dims, R


def f1_rhs_sqrt(phi, rho) -> float:
    """``[Tr_B sqrt(Tr_A(rho^{T_B}|phi><phi|rho^{T_B}))]^2``."""
    eta, dims, _ = _eta(phi, rho)
    red = la.partial_trace(la.proj(eta), dims, traced="A")
    return float(np.trace(la.matrix_sqrt_psd(red)).real) ** 2


def f1_rhs_schmidt(phi, rho) -> float:
    """Squared sum of the Schmidt coefficients of ``eta = rho^{T_B}|phi>``."""
    eta, dims, _ = _eta(phi, rho)
    return la.nuclear_norm_vec(eta, dims) ** 2


def detect_F1_iff(phi, rho) -> Detection:
    """Whether some witness of the single-correction type detects ``rho``.

    ``rhs`` comes from the Schmidt coefficients of ``eta``; ``rhs_alt`` from
    the partial-trace/matrix-square-root route.
    """
    eta, dims, R = _eta(phi, rho)
    v = as_vector(phi)
    lhs = float(np.vdot(v, eta).real)
    if np.linalg.norm(eta) < ETA_TINY:
        return Detection(False, lhs, 0.0, 0.0)
    rhs = la.nuclear_norm_vec(eta, dims) ** 2
    red = la.partial_trace(la.proj(eta), dims, traced="A")
    rhs_alt = float(np.trace(la.matrix_sqrt_psd(red)).real) ** 2
    return Detection(bool(lhs < rhs - DETECT_TOL), lhs, rhs, rhs_alt)


def detect_F2_iff(phi, rho) -> Detection:
    """``<phi|rho^{T_B}|phi> < <phi|(rho^{T_B})^2|phi>``."""
    eta, _, _ = _eta(phi, rho)
    lhs = float(np.vdot(as_vector(phi), eta).real)
    rhs = float(np.vdot(eta, eta).real)
    return Detection(bool(lhs < rhs - DETECT_TOL), lhs, rhs)


def optimal_psi(phi, rho) -> PureVector:
    """Maximally entangled vector aligned with the Schmidt bases of ``rho^{T_B}|phi>``.

    It maximizes the single-correction term divided by ``s(psi)``.
    """
    eta, dims, _ = _eta(phi, rho)
    if np.linalg.norm(eta) < ETA_TINY:
        raise ValueError("rho^{T_B}|phi> vanishes; no optimal psi")
    sd = la.schmidt(eta, dims)
    k = min(dims)
    psi = np.einsum("ai,bi->ab", sd.basisA[:, :k], sd.basisB[:, :k]).ravel() / np.sqrt(k)
    return PureVector(psi, tuple(dims))


# ---------------------------------------------------------------------------
# Positivity of P(chi) on product vectors


class PositivityResult(NamedTuple):
    min_value: float
    argmin: np.ndarray
    a: np.ndarray
    b: np.ndarray


def _overlaps(V: np.ndarray, A: np.ndarray, B: np.ndarray):
    """``o = <a (x) b|v>`` and its conjugate-gradients w.r.t. ``a`` and ``b``."""
    w = np.conj(B) @ V.T           # w[r, j] = sum_k V[j, k] conj(b[r, k])
    u = np.conj(A) @ V             # u[r, k] = sum_j conj(a[r, j]) V[j, k]
    o = np.sum(np.conj(A) * w, axis=1)
    return o, w, u


def _P_and_grad(phiM, psiMs, alphas, orders, A, B):
    of, wf, uf = _overlaps(phiM, A, B)
    f = np.abs(of) ** 2
    dfa = np.conj(of)[:, None] * wf
    dfb = np.conj(of)[:, None] * uf
    P = np.ones(A.shape[0])
    ga = np.zeros_like(A)
    gb = np.zeros_like(B)
    for V, alpha, k in zip(psiMs, alphas, orders):
        o, w, u = _overlaps(V, A, B)
        p = np.abs(o) ** 2
        dpa = np.conj(o)[:, None] * w
        dpb = np.conj(o)[:, None] * u
        if k == 1:
            P -= alpha * p
            ga -= alpha * dpa
            gb -= alpha * dpb
        else:
            P -= alpha * f * p ** 2
            ga -= alpha * (p[:, None] ** 2 * dfa + 2 * (f * p)[:, None] * dpa)
            gb -= alpha * (p[:, None] ** 2 * dfb + 2 * (f * p)[:, None] * dpb)
    return P, 2 * ga, 2 * gb


def _normalize_rows(X):
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _tangent(X, G):
    return G - X * np.real(np.sum(np.conj(X) * G, axis=1))[:, None]


def check_P_positivity(phi, terms: Sequence[CorrectionTerm], restarts: int = 1000,
                       seed: int = 0, max_iter: int = 4000, tol: float = 1e-10,
                       dims=None) -> PositivityResult:
    """Multi-start projected gradient descent of ``P(chi)`` over product vectors.

    Each restart walks on the product of the two local unit spheres with its
    own adaptive step size. Returns the smallest value found.
    """
    dims = dims_of(phi, *(t.psi for t in terms), default=dims)
    dA, dB = dims
    phiM = as_vector(phi).reshape(dA, dB)
    psiMs = [as_vector(t.psi).reshape(dA, dB) for t in terms]
    alphas = [float(t.alpha) for t in terms]
    orders = [t.order // 2 for t in terms]

    g = np.random.default_rng(seed)
    A = _normalize_rows(g.standard_normal((restarts, dA)) + 1j * g.standard_normal((restarts, dA)))
    B = _normalize_rows(g.standard_normal((restarts, dB)) + 1j * g.standard_normal((restarts, dB)))
    step = np.full(restarts, 0.1)
    P, ga, gb = _P_and_grad(phiM, psiMs, alphas, orders, A, B)
    active = np.ones(restarts, dtype=bool)
    for _ in range(max_iter):
        ta, tb = _tangent(A, ga), _tangent(B, gb)
        A2 = _normalize_rows(A - step[:, None] * ta)
        B2 = _normalize_rows(B - step[:, None] * tb)
        P2, ga2, gb2 = _P_and_grad(phiM, psiMs, alphas, orders, A2, B2)
        accept = (P2 <= P) & active
        done = accept & (P - P2 < tol)
        A[accept], B[accept] = A2[accept], B2[accept]
        ga[accept], gb[accept] = ga2[accept], gb2[accept]
        P[accept] = P2[accept]
        step = np.where(accept, np.minimum(step * 1.5, 10.0), step * 0.5)
        active &= ~done & (step > 1e-14)
        if not active.any():
            break
    i = int(np.argmin(P))
    return PositivityResult(float(P[i]), np.kron(A[i], B[i]), A[i], B[i])


def P_value(phi, terms: Sequence[CorrectionTerm], chi_a: np.ndarray, chi_b: np.ndarray) -> float:
    """Direct evaluation of ``P`` at the product vector ``chi_a (x) chi_b``."""
    chi = np.kron(chi_a / np.linalg.norm(chi_a), chi_b / np.linalg.norm(chi_b))
    f = abs(np.vdot(chi, as_vector(phi))) ** 2
    val = 1.0
    for t in terms:
        p = abs(np.vdot(chi, as_vector(t.psi))) ** 2
        val -= t.alpha * (p if t.order == 2 else f * p ** 2)
    return float(val)
