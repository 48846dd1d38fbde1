"""Bipartite states: construction, validation, PPT classification and sampling."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import linalg as la
from .errors import InvalidStateError, NotNPTError, SamplerExhausted

STATE_TOL = 1e-10
NPT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A bipartite mixed state ``mat`` on ``C^dA (x) C^dB``.

    Use :meth:`from_array` to build one from untrusted input; the plain
    constructor does no validation.
    """

    mat: np.ndarray
    dims: tuple[int, int]

    @classmethod
    def from_array(cls, mat, dims: Sequence[int], tol: float = STATE_TOL) -> "DensityMatrix":
        mat = np.asarray(mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got shape {mat.shape}")
        dims = la.check_dims(dims, mat.shape[0])
        if not np.all(np.isfinite(mat)):
            raise InvalidStateError("density matrix has non-finite entries")
        herm = float(np.max(np.abs(mat - la.dagger(mat))))
        if herm > tol:
            raise InvalidStateError(f"not Hermitian: max |rho - rho^dagger| = {herm:.3e} > {tol:.0e}")
        tr = complex(np.trace(mat))
        if abs(tr - 1) > tol:
            raise InvalidStateError(f"trace {tr.real:.12g} differs from 1 by {abs(tr - 1):.3e}")
        lmin = float(np.linalg.eigvalsh(la.hermitize(mat))[0])
        if lmin < -tol:
            raise InvalidStateError(f"not positive semidefinite: min eigenvalue {lmin:.3e}")
        return cls(la.hermitize(mat), dims)

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def pt(self) -> np.ndarray:
        """Partial transpose on B."""
        return la.partial_transpose(self.mat, self.dims, "B")

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)


@dataclass(frozen=True, eq=False)
class PureVector:
    """A state vector over a bipartite cut. ``normalized=False`` skips the norm check."""

    vec: np.ndarray
    dims: tuple[int, int]

    @classmethod
    def from_array(cls, vec, dims: Sequence[int], normalized: bool = True) -> "PureVector":
        vec = np.asarray(vec, dtype=complex).ravel()
        dims = la.check_dims(dims, vec.size)
        if normalized and abs(np.linalg.norm(vec) - 1) > 1e-12:
            raise ValueError(f"vector not normalized (norm {np.linalg.norm(vec):.15g})")
        return cls(vec, dims)

    def projector(self) -> np.ndarray:
        return la.proj(self.vec)

    def schmidt(self) -> la.SchmidtData:
        return la.schmidt(self.vec, self.dims)

    def max_schmidt_sq(self) -> float:
        return la.max_schmidt_sq(self.vec, self.dims)

    def __array__(self, dtype=None, copy=None):
        return self.vec if dtype is None else self.vec.astype(dtype)


StateLike = Union[DensityMatrix, np.ndarray]
VectorLike = Union[PureVector, np.ndarray]


def as_matrix(rho: StateLike) -> np.ndarray:
    return rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def as_vector(v: VectorLike) -> np.ndarray:
    return v.vec if isinstance(v, PureVector) else np.asarray(v, dtype=complex).ravel()


def dims_of(*objs, default: Sequence[int] | None = None) -> tuple[int, int]:
    """First ``dims`` attribute found among ``objs``; else ``default`` or a two-qubit guess."""
    for o in objs:
        d = getattr(o, "dims", None)
        if d is not None:
            return tuple(d)
    if default is not None:
        return tuple(default)
    for o in objs:
        n = np.asarray(getattr(o, "mat", o)).shape[0]
        return _factor(n)
    raise ValueError("cannot infer dimensions")


def _factor(n: int) -> tuple[int, int]:
    for p in range(2, n):
        if n % p == 0 and n // p >= 2:
            return (p, n // p)
    raise ValueError(f"size {n} is not a bipartite dimension")


# ---------------------------------------------------------------------------
# Random streams


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream keyed by a master seed and a stream index.

    ``index`` may be an int or a tuple of ints (hierarchical sub-streams).
    """

    seed: int
    index: Union[int, tuple] = 0

    def generator(self) -> np.random.Generator:
        key = self.index if isinstance(self.index, tuple) else (self.index,)
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key)))

    def child(self, i: int) -> "RngStream":
        key = self.index if isinstance(self.index, tuple) else (self.index,)
        return RngStream(self.seed, key + (int(i),))


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


# ---------------------------------------------------------------------------
# Fixed states


def phi_alpha(alpha: float) -> PureVector:
    """``cos(alpha)|00> + sin(alpha)|11>``."""
    v = np.zeros(4, dtype=complex)
    v[0] = np.cos(alpha)
    v[3] = np.sin(alpha)
    return PureVector(v, (2, 2))


def bell_basis() -> list[PureVector]:
    """``(|00> + |11>)/sqrt2, (|00> - |11>)/sqrt2, (|01> + |10>)/sqrt2, (|01> - |10>)/sqrt2``."""
    r = 1 / np.sqrt(2)
    vecs = [[r, 0, 0, r], [r, 0, 0, -r], [0, r, r, 0], [0, r, -r, 0]]
    return [PureVector(np.array(v, dtype=complex), (2, 2)) for v in vecs]


def singlet() -> DensityMatrix:
    return DensityMatrix(bell_basis()[3].projector(), (2, 2))


def boundary_state(alpha: float) -> DensityMatrix:
    """``(1 - |phi(alpha)><phi(alpha)|^{T_B}) / 3``, a separable state with zero witness value."""
    W = la.partial_transpose(phi_alpha(alpha).projector(), (2, 2))
    return DensityMatrix(la.hermitize((np.eye(4) - W) / 3), (2, 2))


def werner(p: float) -> DensityMatrix:
    """``p |psi-><psi-| + (1 - p) 1/4``; NPT exactly when ``p > 1/3``."""
    if not 0 <= p <= 1:
        raise ValueError(f"Werner parameter must lie in [0, 1], got {p}")
    return DensityMatrix(p * singlet().mat + (1 - p) * np.eye(4) / 4, (2, 2))


def maximally_mixed(dims: Sequence[int] = (2, 2)) -> DensityMatrix:
    dA, dB = la.check_dims(dims)
    return DensityMatrix(np.eye(dA * dB, dtype=complex) / (dA * dB), (dA, dB))


def separable_mixture(products: Iterable[tuple]) -> DensityMatrix:
    """Convex mixture ``sum_i w_i rho_A^i (x) rho_B^i``.

    Each entry is ``(a, b, weight)`` where ``a`` and ``b`` are local pure
    vectors (normalized here) or local density matrices.
    """
    products = list(products)
    if not products:
        raise ValueError("empty product list")
    weights = np.array([float(w) for _, _, w in products])
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-10:
        raise ValueError(f"weights must be nonnegative and sum to 1, got sum {weights.sum():.12g}")
    total = None
    dims = None
    for a, b, w in products:
        ra, rb = _local_operator(a), _local_operator(b)
        term = w * np.kron(ra, rb)
        dims = (ra.shape[0], rb.shape[0])
        total = term if total is None else total + term
    return DensityMatrix(la.hermitize(total), la.check_dims(dims))


def _local_operator(x) -> np.ndarray:
    x = np.asarray(getattr(x, "vec", x), dtype=complex)
    if x.ndim == 1:
        x = x / np.linalg.norm(x)
        return np.outer(x, x.conj())
    return x / np.trace(x)


def random_pure(d: int, rng) -> np.ndarray:
    """Haar-random unit vector in ``C^d``."""
    g = _gen(rng)
    z = g.standard_normal(d) + 1j * g.standard_normal(d)
    return z / np.linalg.norm(z)


def random_separable(dims: Sequence[int], rng, terms: int | None = None) -> DensityMatrix:
    """Random finite mixture of Haar-random product pure states with Dirichlet weights."""
    g = _gen(rng)
    dA, dB = la.check_dims(dims)
    n = int(terms) if terms is not None else int(g.integers(1, 7))
    w = g.dirichlet(np.ones(n))
    w = w / w.sum()
    return separable_mixture((random_pure(dA, g), random_pure(dB, g), wi) for wi in w)


# ---------------------------------------------------------------------------
# Classification


def pt_min_eig(rho: StateLike, dims: Sequence[int] | None = None) -> float:
    dims = dims_of(rho, default=dims)
    return float(np.linalg.eigvalsh(la.hermitize(la.partial_transpose(as_matrix(rho), dims)))[0])


def is_ppt(rho: StateLike, tol: float = NPT_TOL, dims: Sequence[int] | None = None) -> bool:
    """True iff the partial transpose has no eigenvalue below ``-tol``."""
    return pt_min_eig(rho, dims) >= -tol


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive."""
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def npt_eigenpair(rho: StateLike, dims: Sequence[int] | None = None) -> tuple[float, PureVector]:
    """Most negative eigenvalue of ``rho^{T_B}`` and its eigenvector.

    Raises
    ------
    NotNPTError
        If the minimal eigenvalue is not below ``-1e-10``.
    """
    dims = dims_of(rho, default=dims)
    w, V = la.hermitian_eig(la.partial_transpose(as_matrix(rho), dims))
    if w[0] >= -NPT_TOL:
        raise NotNPTError(f"state not NPT (min partial-transpose eigenvalue {w[0]:.3e})")
    return float(w[0]), PureVector(fix_phase(V[:, 0]), tuple(dims))


# ---------------------------------------------------------------------------
# Sampling


def sample_ginibre_state(dims: Union[int, Sequence[int]], rng) -> DensityMatrix:
    """Hilbert-Schmidt random state ``G G^dagger / Tr(G G^dagger)``."""
    dims = _factor(dims) if isinstance(dims, (int, np.integer)) else la.check_dims(dims)
    d = dims[0] * dims[1]
    g = _gen(rng)
    G = g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))
    M = G @ la.dagger(G)
    return DensityMatrix(la.hermitize(M / np.trace(M).real), dims)


def ginibre_batch(n: int, d: int, gen: np.random.Generator) -> np.ndarray:
    """``n`` Hilbert-Schmidt random ``d x d`` density matrices as one array."""
    G = gen.standard_normal((n, d, d)) + 1j * gen.standard_normal((n, d, d))
    M = G @ la.dagger(G)
    tr = np.trace(M, axis1=1, axis2=2).real
    return la.hermitize(M / tr[:, None, None])


def traceless_direction(z: np.ndarray, d: int) -> np.ndarray:
    """Map ``d*d`` i.i.d. normals to a unit-HS-norm traceless Hermitian matrix.

    The coordinates are taken in an orthonormal basis of Hermitian matrices,
    so the result is uniform on the unit sphere of the traceless subspace.
    """
    H = np.zeros((d, d), dtype=complex)
    H[np.diag_indices(d)] = z[:d]
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    off = (z[d:d + m] + 1j * z[d + m:d + 2 * m]) / np.sqrt(2)
    H[iu] = off
    H[(iu[1], iu[0])] = off.conj()
    H[np.diag_indices(d)] -= H.trace().real / d
    return H / np.linalg.norm(H)


def ball_candidate(center: np.ndarray, radius: float, gen: np.random.Generator) -> np.ndarray:
    """One flat-measure draw from the HS ball of traceless perturbations around ``center``."""
    d = center.shape[0]
    z = gen.standard_normal(d * d)
    u = gen.random()
    r = radius * u ** (1.0 / (d * d - 1))
    return center + r * traceless_direction(z, d)


def draw_ball(center: np.ndarray, radius: float, gen: np.random.Generator,
              max_tries: int = 10_000, method: str = "perturbation") -> tuple[np.ndarray, int]:
    """Rejection-sample a density matrix inside the HS ball; returns ``(matrix, tries)``."""
    d = center.shape[0]
    for tries in range(1, max_tries + 1):
        if method == "perturbation":
            cand = ball_candidate(center, radius, gen)
            if np.linalg.eigvalsh(cand)[0] >= 0:
                return cand, tries
        elif method == "ginibre":
            cand = ginibre_batch(1, d, gen)[0]
            if la.hs_norm(cand - center) <= radius:
                return cand, tries
        else:
            raise ValueError(f"unknown sampler {method!r}")
    raise SamplerExhausted(
        f"{method} sampler accepted nothing in {max_tries} tries (radius {radius})",
        acceptance_rate=0.0,
    )


def sample_ball(center: DensityMatrix, radius: float, rng, max_tries: int = 10_000,
                method: str = "perturbation") -> DensityMatrix:
    """Random state with ``hs_norm(center - rho) <= radius``.

    ``method="perturbation"`` draws a flat traceless perturbation and rejects
    non-PSD results; ``method="ginibre"`` draws Hilbert-Schmidt random states
    and rejects those outside the ball.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    mat, _ = draw_ball(as_matrix(center), radius, _gen(rng), max_tries, method)
    return DensityMatrix(la.hermitize(mat), tuple(center.dims))
