"""Command line interface: ``nlwitness sweep`` and ``nlwitness eval``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import experiment as ex
from .errors import InvalidStateError, InvariantViolation, NotNPTError, SamplerExhausted
from .states import bell_basis, npt_eigenpair, phi_alpha
from .statefile import read_state
from .witness import (
    LinearWitness,
    detect_F1_iff,
    eval_F1,
    eval_F2,
    eval_F3,
    eval_linear,
    optimal_psi,
)

EXIT_OK, EXIT_CONFIG, EXIT_SAMPLER, EXIT_IO, EXIT_INVARIANT = 0, 2, 3, 4, 5


def _alphas(text: str) -> list[float]:
    if "," not in text:
        try:
            n = int(text)
        except ValueError:
            pass
        else:
            if n < 1:
                raise argparse.ArgumentTypeError("need at least one alpha")
            return [0.0] if n == 1 else ex.default_alphas(n)
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a count or comma-separated radians, got {text!r}") from None


def _criteria(text: str) -> tuple[str, ...]:
    names = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [n for n in names if n not in ex.CRITERIA]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown criteria {bad}; choose from {','.join(ex.CRITERIA)}")
    return names


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlwitness", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="detection-probability sweep around the boundary states")
    s.add_argument("--alphas", type=_alphas, default=ex.default_alphas(), help="grid size or comma list (radians)")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--radius", type=float, default=0.2)
    s.add_argument("--seed", type=_seed, default=ex.SweepConfig.seed)
    s.add_argument("--sampler", choices=sorted(ex.SAMPLERS), default="perturbation")
    s.add_argument("--criteria", type=_criteria, default=ex.CRITERIA)
    s.add_argument("--csv", required=True)
    s.add_argument("--plot")
    s.add_argument("--svg")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--max-tries", type=int, default=1_000_000)
    s.add_argument("--backend", choices=["compiled", "python"], default=None)

    e = sub.add_parser("eval", help="evaluate criteria on a state file")
    e.add_argument("state")
    e.add_argument("--criterion", choices=["W", "F1", "F2", "NL5", "F3", "all"], default="all")
    e.add_argument("--alpha", type=float, default=None,
                   help="use phi(alpha) as generator (two qubits); default: NPT eigenvector")
    return p


def _cmd_sweep(args) -> int:
    cfg = ex.SweepConfig(
        alpha_grid=args.alphas, samples_per_alpha=args.samples, radius=args.radius,
        seed=args.seed, sampler=args.sampler, criteria=args.criteria, max_tries=args.max_tries,
        threads=args.threads, backend=args.backend, csv_path=args.csv,
        plot_path=args.plot, svg_path=args.svg,
    )
    cfg.validate()
    ex.run_sweep(cfg)
    return EXIT_OK


def _cmd_eval(args) -> int:
    rho = read_state(args.state)
    two_qubit = tuple(rho.dims) == (2, 2)
    if args.alpha is not None:
        if not two_qubit:
            raise ValueError("--alpha needs a two-qubit state")
        phi = phi_alpha(args.alpha)
    else:
        _, phi = npt_eigenpair(rho)
    wanted = ["W", "F1", "F2", "NL5", "F3"] if args.criterion == "all" else [args.criterion]
    d = rho.dims[0] * rho.dims[1]
    for name in wanted:
        if name == "W":
            value = eval_linear(LinearWitness.from_vector(phi), rho)
        elif name == "F1":
            try:
                psi = optimal_psi(phi, rho)
            except ValueError:
                psi = None
            value = eval_linear(LinearWitness.from_vector(phi), rho) if psi is None else eval_F1(phi, psi, rho)
        elif name == "F2":
            basis = [b.vec for b in bell_basis()] if two_qubit else list(np.eye(d, dtype=complex))
            value = eval_F2(phi, basis, rho)
        elif name == "NL5":
            det = detect_F1_iff(phi, rho)
            value = det.lhs - det.rhs
        else:
            if args.alpha is None:
                if args.criterion == "F3":
                    raise ValueError("F3 is defined for the two-qubit family; pass --alpha")
                continue
            b = bell_basis()
            value = eval_F3(phi, b[2], b[3], ex.f3_s_phi(args.alpha), rho)
        print(f"{name} {value:.12g} {'detected' if value < -1e-12 else 'not-detected'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_eval(args)
    except SamplerExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SAMPLER
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InvalidStateError, NotNPTError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
