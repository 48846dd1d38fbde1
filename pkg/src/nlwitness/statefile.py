"""Plain-text state files.

Format::

    dims 2 2
    0.5+0j 0+0j 0+0j 0.5+0j
    ...

one row of ``dA*dB`` whitespace-separated complex entries per matrix row.
Blank lines and lines starting with ``#`` are ignored.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InvalidStateError
from .states import DensityMatrix


class StateFileError(InvalidStateError):
    pass


def parse_state(text: str, source: str = "<string>") -> DensityMatrix:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(n, ln) for n, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise StateFileError(f"{source}: empty state file")
    n0, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "dims":
        raise StateFileError(f"{source}:{n0}: expected 'dims dA dB', got {head!r}")
    try:
        dA, dB = int(parts[1]), int(parts[2])
    except ValueError:
        raise StateFileError(f"{source}:{n0}: dimensions must be integers, got {head!r}") from None
    if dA < 2 or dB < 2:
        raise StateFileError(f"{source}:{n0}: dimensions must be >= 2, got ({dA}, {dB})")
    d = dA * dB
    rows = lines[1:]
    if len(rows) != d:
        raise StateFileError(f"{source}: expected {d} matrix rows for dims ({dA}, {dB}), found {len(rows)}")
    mat = np.empty((d, d), dtype=complex)
    for i, (n, ln) in enumerate(rows):
        toks = ln.split()
        if len(toks) != d:
            raise StateFileError(f"{source}:{n}: expected {d} entries, found {len(toks)}")
        for j, tok in enumerate(toks):
            try:
                mat[i, j] = complex(tok)
            except ValueError:
                raise StateFileError(f"{source}:{n}: entry {j + 1} {tok!r} is not a complex number") from None
    try:
        return DensityMatrix.from_array(mat, (dA, dB))
    except InvalidStateError as exc:
        raise StateFileError(f"{source}: {exc}") from None


def read_state(path) -> DensityMatrix:
    path = Path(path)
    return parse_state(path.read_text(encoding="utf-8"), str(path))


def format_state(rho: DensityMatrix) -> str:
    lines = [f"dims {rho.dims[0]} {rho.dims[1]}"]
    for row in rho.mat:
        lines.append(" ".join(f"{float(z.real)!r}{float(z.imag):+.17g}j" for z in row))
    return "\n".join(lines) + "\n"


def write_state(path, rho: DensityMatrix) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(format_state(rho))
