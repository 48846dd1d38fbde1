"""Two-qubit witness ``W(alpha)`` and its correction terms in Pauli expectation values.

Notation: ``x1 = <sx (x) 1>``, ``z2 = <1 (x) sz>``, ``x1y2 = <sx (x) sy>`` etc.
The correction terms are built from linear combinations of these
expectations ("brackets"), squared and summed; the bracket coefficients are
exposed so the measured observables can be listed per term.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DimensionError
from .states import as_matrix

PAULI = {
    "1": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_AXES = "xyz"


@dataclass(frozen=True)
class AlphaTrig:
    alpha: float
    s: float
    c: float
    s2: float
    c2: float

    @classmethod
    def of(cls, alpha: float) -> "AlphaTrig":
        return cls(alpha, np.sin(alpha), np.cos(alpha), np.sin(2 * alpha), np.cos(2 * alpha))


@dataclass(frozen=True)
class PauliExpectations:
    """Local Bloch vectors and the 3x3 correlation table ``T[i, j] = <s_i (x) s_j>``."""

    local1: np.ndarray
    local2: np.ndarray
    corr: np.ndarray

    def get(self, name: str) -> float:
        """Value of an observable label such as ``"1"``, ``"z1"``, ``"x1y2"``."""
        if name == "1":
            return 1.0
        if len(name) == 2:
            axis, party = _AXES.index(name[0]), name[1]
            return float((self.local1 if party == "1" else self.local2)[axis])
        return float(self.corr[_AXES.index(name[0]), _AXES.index(name[2])])


def pauli_expectations(rho) -> PauliExpectations:
    M = as_matrix(rho)
    dims = getattr(rho, "dims", (2, 2))
    if M.shape != (4, 4) or tuple(dims) != (2, 2):
        raise DimensionError(f"two-qubit state required, got shape {M.shape}")

    def ev(a, b):
        return float(np.real(np.sum(np.kron(PAULI[a], PAULI[b]).T * M)))

    local1 = np.array([ev(a, "1") for a in _AXES])
    local2 = np.array([ev("1", a) for a in _AXES])
    corr = np.array([[ev(a, b) for b in _AXES] for a in _AXES])
    return PauliExpectations(local1, local2, corr)


def witness_pauli(t: AlphaTrig, e: PauliExpectations) -> float:
    """``(1 + z1z2 + s2 (x1x2 + y1y2) + c2 (z1 + z2)) / 4``."""
    return 0.25 * (1 + e.get("z1z2") + t.s2 * (e.get("x1x2") + e.get("y1y2"))
                   + t.c2 * (e.get("z1") + e.get("z2")))


def brackets(t: AlphaTrig) -> list[tuple[dict[str, float], dict[str, float]]]:
    """Linear forms ``(B1, B2)`` with ``X_i = (B1^2 + B2^2) / 32``, for ``i = 1..4``.

    Terms 1/2 and 3/4 take the upper/lower sign respectively.
    """
    c, s = t.c, t.s
    out = []
    for sg in (1, -1):
        p, m = c + sg * s, c - sg * s
        b1 = _lin((p, "1"), (sg * p, "x1x2"), (sg * p, "y1y2"), (p, "z1z2"), (m, "z1"), (m, "z2"))
        b2 = _lin((m, "x1y2"), (-m, "y1x2"))
        out.append((b1, b2))
    for sg in (1, -1):
        p, m = c + sg * s, c - sg * s
        # the z-x cross term carries the sign of the term index
        b1 = _lin((p, "x1"), (sg * p, "x2"), (sg * m, "z1x2"), (m, "x1z2"))
        b2 = _lin((m, "y1"), (-sg * m, "y2"), (p, "y1z2"), (-sg * p, "z1y2"))
        out.append((b1, b2))
    return out


def _lin(*pairs: tuple[float, str]) -> dict[str, float]:
    d: dict[str, float] = {}
    for coef, name in pairs:
        d[name] = d.get(name, 0.0) + coef
    return d


def _eval_lin(lin: dict[str, float], e: PauliExpectations) -> float:
    return sum(coef * e.get(name) for name, coef in lin.items())


def correction_terms_pauli(t: AlphaTrig, e: PauliExpectations) -> tuple[float, float, float, float]:
    """The four correction terms for ``psi_1..psi_4`` of the Bell basis."""
    vals = []
    for b1, b2 in brackets(t):
        vals.append((_eval_lin(b1, e) ** 2 + _eval_lin(b2, e) ** 2) / 32)
    return tuple(vals)


def expand_term(t: AlphaTrig, i: int, tol: float = 1e-12) -> dict[tuple[str, str], float]:
    """Monomial expansion of term ``i`` (1-based): ``{(obs_a, obs_b): coefficient}``.

    Each key is an unordered product of two expectation values.
    """
    b1, b2 = brackets(t)[i - 1]
    out: dict[tuple[str, str], float] = {}
    for lin in (b1, b2):
        for (na, ca), (nb, cb) in product(lin.items(), repeat=2):
            key = tuple(sorted((na, nb)))
            out[key] = out.get(key, 0.0) + ca * cb / 32
    return {k: v for k, v in out.items() if abs(v) > tol}


def observables_needed(t: AlphaTrig, i: int) -> set[str]:
    """Expectation values that term ``i`` depends on at this angle."""
    return {name for key in expand_term(t, i) for name in key}


WITNESS_OBSERVABLES = frozenset({"1", "x1x2", "y1y2", "z1z2", "z1", "z2"})
