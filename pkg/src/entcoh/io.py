"""Plain-text state files.

Layout::

    density 2x2
    0.5 0
    0 0
    ...

First line ``kind dims`` with kind one of pure, density, basis; then one
``re im`` pair per line, row-major. Bases list their elements one after
another. Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from math import prod
from pathlib import Path

import numpy as np

from .entropy import OrthonormalBasis
from .qmat import DensityMatrix, PureState

KINDS = ("pure", "density", "basis")


class StateFileError(ValueError):
    pass


def _fmt(x: float) -> str:
    # shortest string that round-trips exactly
    return repr(float(x)).replace(".0e", "e").removesuffix(".0")


def dumps_state(obj) -> str:
    if isinstance(obj, PureState):
        kind, dims, data = "pure", obj.dims, obj.vec
    elif isinstance(obj, DensityMatrix):
        kind, dims, data = "density", obj.dims, obj.mat.reshape(-1)
    elif isinstance(obj, OrthonormalBasis):
        kind, dims, data = "basis", obj.dims, obj.vectors.T.reshape(-1)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    lines = [f"{kind} {'x'.join(map(str, dims))}"]
    lines += [f"{_fmt(z.real)} {_fmt(z.imag)}" for z in np.asarray(data, complex)]
    return "\n".join(lines) + "\n"


def write_state_file(path, obj) -> None:
    Path(path).write_text(dumps_state(obj))


def loads_state(text: str, source: str = "<string>"):
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line)
    if not rows:
        raise StateFileError(f"{source}: empty state file")
    head = rows[0].split()
    if len(head) != 2 or head[0] not in KINDS:
        raise StateFileError(f"{source}: header must be '<{'|'.join(KINDS)}> <dims>', got {rows[0]!r}")
    kind = head[0]
    try:
        dims = tuple(int(x) for x in head[1].lower().split("x"))
    except ValueError:
        raise StateFileError(f"{source}: bad dims {head[1]!r}") from None
    if not dims or any(d < 2 for d in dims):
        raise StateFileError(f"{source}: every subsystem dimension must be >= 2, got {head[1]!r}")
    d = prod(dims)
    expected = d if kind == "pure" else d * d
    entries = []
    for n, line in enumerate(rows[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise StateFileError(f"{source}: entry line {n} must hold 're im', got {line!r}")
        try:
            entries.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise StateFileError(f"{source}: entry line {n} is not numeric: {line!r}") from None
    if len(entries) != expected:
        raise StateFileError(f"{source}: {kind} with dims {head[1]} needs {expected} entries, found {len(entries)}")
    data = np.array(entries)
    try:
        if kind == "pure":
            return PureState(data, dims)
        if kind == "density":
            return DensityMatrix(data.reshape(d, d), dims)
        return OrthonormalBasis(data.reshape(d, d).T, dims)
    except ValueError as exc:
        raise StateFileError(f"{source}: {kind} invariant violated: {exc}") from None


def read_state_file(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise StateFileError(f"{path}: cannot read ({exc.strerror})") from None
    return loads_state(text, str(path))
