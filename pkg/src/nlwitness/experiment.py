"""Monte Carlo detection-probability sweep around the two-qubit boundary states.

For every angle ``alpha`` the sweep samples states from a Hilbert-Schmidt
ball around ``boundary_state(alpha)``, keeps the NPT ones and counts how
many each criterion detects:

* ``W``       linear witness ``|phi(alpha)><phi(alpha)|^{T_B}``
* ``F1psi2``  single correction along ``psi_2`` with coefficient 2
* ``F2``      corrections along the whole Bell basis
* ``NL5``     exact condition for the best single-correction witness
* ``F3``      fourth-order witness on ``psi_3`` (quadratic) and ``psi_4`` (quartic)
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from . import twoqubit as tq
from .errors import InvariantViolation, NotNPTError, SamplerExhausted
from .states import NPT_TOL, bell_basis, boundary_state, is_ppt, phi_alpha
from .witness import (
    DETECT_TOL,
    ETA_TINY,
    LinearWitness,
    detect_F1_iff,
    eval_F2,
    eval_F3,
    eval_linear,
    f3_coefficients,
)

log = logging.getLogger(__name__)

CRITERIA = ("W", "F1psi2", "F2", "NL5", "F3")
SAMPLERS = {"perturbation": 0, "ginibre": 1}
CSV_HEADER = ("alpha,n_sampled,n_entangled,acc_rate,det_W,det_F1psi2,det_F2,det_NL5,det_F3,"
              "frac_W,frac_F1psi2,frac_F2,frac_NL5,frac_F3")
CHUNK = 1024


def default_alphas(n: int = 41) -> list[float]:
    return list(np.linspace(0.0, np.pi / 2, n))


@dataclass
class SweepConfig:
    alpha_grid: list[float] = field(default_factory=default_alphas)
    samples_per_alpha: int = 10_000
    radius: float = 0.2
    seed: int = 20060101
    sampler: str = "perturbation"
    criteria: tuple[str, ...] = CRITERIA
    max_tries: int = 1_000_000
    threads: int = 1
    backend: str | None = None
    csv_path: str | None = None
    plot_path: str | None = None
    svg_path: str | None = None

    def validate(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.samples_per_alpha < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples_per_alpha}")
        if not self.alpha_grid:
            raise ValueError("empty alpha grid")
        for a in self.alpha_grid:
            if not (-1e-12 <= a <= np.pi / 2 + 1e-12):
                raise ValueError(f"alpha {a} outside [0, pi/2]")
        if self.sampler not in SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}; choose from {sorted(SAMPLERS)}")
        bad = set(self.criteria) - set(CRITERIA)
        if bad or not self.criteria:
            raise ValueError(f"unknown criteria {sorted(bad)}; choose from {list(CRITERIA)}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.max_tries < 1:
            raise ValueError("max_tries must be >= 1")


@dataclass
class SweepRow:
    alpha: float
    n_sampled: int
    n_entangled: int
    acc_rate: float
    detected: dict[str, int]
    criteria: tuple[str, ...] = CRITERIA

    def fraction(self, name: str) -> float:
        return self.detected[name] / self.n_entangled if self.n_entangled else 0.0


# ---------------------------------------------------------------------------
# Single-state reference path


def f3_s_phi(alpha: float) -> float:
    """Largest squared Schmidt coefficient of ``phi(alpha)``; ``cos^2`` for ``alpha <= pi/4``."""
    return max(np.cos(alpha) ** 2, np.sin(alpha) ** 2)


def classify_sample(alpha: float, rho, force: bool = False) -> dict[str, bool]:
    """Detection verdict of each criterion on one two-qubit state.

    Uses the operator-level routines of :mod:`nlwitness.witness` (and the
    Pauli form for the single ``psi_2`` correction). PPT input raises
    :class:`NotNPTError` unless ``force`` is set.
    """
    if not force and is_ppt(rho):
        raise NotNPTError("classify_sample expects an NPT state")
    phi = phi_alpha(alpha)
    basis = bell_basis()
    trig = tq.AlphaTrig.of(alpha)
    e = tq.pauli_expectations(rho)
    w_val = eval_linear(LinearWitness.from_vector(phi), rho)
    f1 = tq.witness_pauli(trig, e) - 2 * tq.correction_terms_pauli(trig, e)[1]
    return {
        "W": w_val < -DETECT_TOL,
        "F1psi2": f1 < -DETECT_TOL,
        "F2": eval_F2(phi, basis, rho) < -DETECT_TOL,
        "NL5": detect_F1_iff(phi, rho).detected,
        "F3": eval_F3(phi, basis[2], basis[3], f3_s_phi(alpha), rho) < -DETECT_TOL,
    }


# ---------------------------------------------------------------------------
# Batched path used by the sweep


def classify_stats(stats: np.ndarray, alpha: float) -> dict[str, np.ndarray]:
    """Vectorized verdicts from :func:`kernels.pt_stats` columns (Bell basis as ``psis``)."""
    lhs, n2, nuc2 = stats[:, 1], stats[:, 2], stats[:, 3]
    t = stats[:, kernels.NSTAT:kernels.NSTAT + 4]
    k_quad, k_quart = f3_coefficients(f3_s_phi(alpha))
    return {
        "W": lhs < -DETECT_TOL,
        "F1psi2": lhs - 2.0 * t[:, 1] < -DETECT_TOL,
        "F2": lhs - t.sum(axis=1) < -DETECT_TOL,
        "NL5": (n2 >= ETA_TINY ** 2) & (lhs < nuc2 - DETECT_TOL),
        "F3": lhs - k_quad * t[:, 2] - k_quart * t[:, 3] ** 2 < -DETECT_TOL,
    }


def check_relations(det: dict[str, np.ndarray], npt: np.ndarray, alpha: float) -> None:
    """Per-sample implications that must hold exactly; violations are bugs."""
    rules = [("W", "F2"), ("W", "F1psi2"), ("W", "F3"), ("F2", "NL5"), ("F1psi2", "NL5")]
    for a, b in rules:
        bad = np.flatnonzero(det[a] & ~det[b])
        if bad.size:
            raise InvariantViolation(f"alpha={alpha:.6f}: {bad.size} samples detected by {a} but not {b}")
    for name, d in det.items():
        fp = np.flatnonzero(d & ~npt)
        if fp.size:
            raise InvariantViolation(f"alpha={alpha:.6f}: {fp.size} PPT samples flagged by {name}")


def _chunk(center, alpha, stream, lo, hi, cfg: SweepConfig, phi, psis):
    ordinals = np.arange(lo, hi, dtype=np.uint64)
    rhos, tries = kernels.sample_ball_batch(center, cfg.radius, SAMPLERS[cfg.sampler], cfg.seed,
                                            stream, ordinals, cfg.max_tries, backend=cfg.backend)
    if np.any(tries < 0):
        n_bad = int(np.sum(tries < 0))
        done = tries[tries > 0]
        rate = done.size / (done.sum() + n_bad * cfg.max_tries)
        raise SamplerExhausted(
            f"alpha={alpha:.6f}: {n_bad} sample streams exhausted {cfg.max_tries} tries "
            f"(acceptance rate {rate:.3e}, sampler {cfg.sampler})", acceptance_rate=rate)
    stats = kernels.pt_stats(rhos, 2, 2, phi, psis, backend=cfg.backend)
    npt = stats[:, 0] < -NPT_TOL
    det = classify_stats(stats, alpha)
    check_relations(det, npt, alpha)
    return int(tries.sum()), int(npt.sum()), {k: int(np.sum(v & npt)) for k, v in det.items()}


def run_alpha(alpha: float, stream: int, cfg: SweepConfig, pool: ThreadPoolExecutor | None = None) -> SweepRow:
    center = boundary_state(alpha).mat
    phi = phi_alpha(alpha).vec
    psis = np.array([b.vec for b in bell_basis()])
    n = cfg.samples_per_alpha
    bounds = [(lo, min(lo + CHUNK, n)) for lo in range(0, n, CHUNK)]
    args = [(center, alpha, stream, lo, hi, cfg, phi, psis) for lo, hi in bounds]
    if pool is None:
        parts = [_chunk(*a) for a in args]
    else:
        parts = list(pool.map(lambda a: _chunk(*a), args))
    total_tries = sum(p[0] for p in parts)
    n_ent = sum(p[1] for p in parts)
    detected = {k: sum(p[2][k] for p in parts) for k in CRITERIA}
    return SweepRow(float(alpha), n, n_ent, n / total_tries, detected, tuple(cfg.criteria))


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """Run the full grid; each sample's randomness depends only on ``(seed, alpha index, ordinal)``."""
    cfg.validate()
    rows = []
    pool = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    try:
        for idx, alpha in enumerate(cfg.alpha_grid):
            row = run_alpha(alpha, idx, cfg, pool)
            log.info("alpha=%.4f entangled=%d W=%d F2=%d NL5=%d", alpha, row.n_entangled,
                     row.detected["W"], row.detected["F2"], row.detected["NL5"])
            rows.append(row)
    finally:
        if pool is not None:
            pool.shutdown()
    if cfg.csv_path:
        emit_csv(rows, cfg.csv_path)
    if cfg.plot_path:
        emit_plotdata(rows, cfg.plot_path)
    if cfg.svg_path:
        emit_svg(rows, cfg.svg_path)
    return rows


# ---------------------------------------------------------------------------
# Output


def format_csv(rows: Sequence[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        det = [str(r.detected[c]) if c in r.criteria else "" for c in CRITERIA]
        frac = [f"{r.fraction(c):.6f}" if c in r.criteria else "" for c in CRITERIA]
        lines.append(",".join([f"{r.alpha:.6f}", str(r.n_sampled), str(r.n_entangled),
                               f"{r.acc_rate:.6f}", *det, *frac]))
    return "\n".join(lines) + "\n"


def _write(path, text: str) -> None:
    path = Path(path)
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_csv(rows: Sequence[SweepRow], path) -> None:
    if not rows:
        raise ValueError("no rows to write")
    _write(path, format_csv(rows))


def format_plotdata(rows: Sequence[SweepRow]) -> str:
    crit = [c for c in CRITERIA if c in rows[0].criteria]
    lines = ["# alpha " + " ".join(crit)]
    for r in rows:
        lines.append(" ".join([f"{r.alpha:.6f}"] + [f"{r.fraction(c):.6f}" for c in crit]))
    return "\n".join(lines) + "\n"


def emit_plotdata(rows: Sequence[SweepRow], path) -> None:
    if not rows:
        raise ValueError("no rows to write")
    _write(path, format_plotdata(rows))


_COLORS = {"W": "#000000", "F1psi2": "#1f77b4", "F2": "#d62728", "NL5": "#2ca02c", "F3": "#9467bd"}


def format_svg(rows: Sequence[SweepRow], width: int = 640, height: int = 420) -> str:
    """Self-contained line chart of detection fraction against alpha."""
    crit = [c for c in CRITERIA if c in rows[0].criteria]
    ml, mr, mt, mb = 60, 120, 20, 50
    pw, ph = width - ml - mr, height - mt - mb

    def xy(a, f):
        return ml + pw * a / (np.pi / 2), mt + ph * (1 - f)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>']
    for k in range(6):
        f = k / 5
        _, y = xy(0, f)
        out.append(f'<line x1="{ml - 4}" y1="{y:.2f}" x2="{ml}" y2="{y:.2f}" stroke="#444"/>')
        out.append(f'<text x="{ml - 8}" y="{y + 4:.2f}" text-anchor="end">{f:.1f}</text>')
    for k, lab in enumerate(["0", "π/8", "π/4", "3π/8", "π/2"]):
        x, _ = xy(k * np.pi / 8, 0)
        out.append(f'<line x1="{x:.2f}" y1="{mt + ph}" x2="{x:.2f}" y2="{mt + ph + 4}" stroke="#444"/>')
        out.append(f'<text x="{x:.2f}" y="{mt + ph + 18}" text-anchor="middle">{lab}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" text-anchor="middle">α</text>')
    out.append(f'<text x="14" y="{mt + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {mt + ph / 2:.1f})">detection probability</text>')
    for i, c in enumerate(crit):
        pts = " ".join("%.2f,%.2f" % xy(r.alpha, r.fraction(c)) for r in rows)
        out.append(f'<polyline fill="none" stroke="{_COLORS[c]}" stroke-width="1.5" points="{pts}"/>')
        ly = mt + 14 + 18 * i
        out.append(f'<line x1="{ml + pw + 10}" y1="{ly}" x2="{ml + pw + 30}" y2="{ly}" '
                   f'stroke="{_COLORS[c]}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw + 36}" y="{ly + 4}">{c}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(rows: Sequence[SweepRow], path) -> None:
    if not rows:
        raise ValueError("no rows to write")
    _write(path, format_svg(rows))
