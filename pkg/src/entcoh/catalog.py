"""Named states and bases used throughout the checks."""

from __future__ import annotations

import re

import numpy as np

from .entropy import OrthonormalBasis
from .locc import domino_basis
from .qmat import DensityMatrix, PureState, check_dims

_R = 1 / np.sqrt(2)

BELL = {
    "bell_phi+": np.array([1, 0, 0, 1]) * _R,
    "bell_phi-": np.array([1, 0, 0, -1]) * _R,
    "bell_psi+": np.array([0, 1, 1, 0]) * _R,
    "bell_psi-": np.array([0, 1, -1, 0]) * _R,
}


def bell(name: str) -> PureState:
    return PureState(BELL[name], (2, 2))


def bell_basis() -> OrthonormalBasis:
    return OrthonormalBasis.from_elements(list(BELL.values()), (2, 2))


def rho2(p: float) -> DensityMatrix:
    """p |psi+><psi+| + (1 - p) |psi-><psi-|."""
    if not 0 <= p <= 1:
        raise ValueError(f"rho2 needs p in [0, 1], got {p}")
    plus, minus = BELL["bell_psi+"], BELL["bell_psi-"]
    return DensityMatrix(p * np.outer(plus, plus) + (1 - p) * np.outer(minus, minus), (2, 2))


def ghz(m: int) -> PureState:
    if m < 2:
        raise ValueError("ghz needs m >= 2")
    v = np.zeros(2**m)
    v[0] = v[-1] = _R
    return PureState(v, (2,) * m)


def w_state(m: int) -> PureState:
    if m < 2:
        raise ValueError("w needs m >= 2")
    v = np.zeros(2**m)
    for k in range(m):
        v[1 << k] = 1.0
    return PureState(v / np.sqrt(m), (2,) * m)


def computational(dims) -> OrthonormalBasis:
    return OrthonormalBasis.computational(dims)


def parse_dims(text: str) -> tuple[int, ...]:
    try:
        return check_dims(int(x) for x in text.lower().split("x"))
    except ValueError as exc:
        raise ValueError(f"bad dims {text!r}: expected e.g. 2x3 ({exc})") from None


_CALL = re.compile(r"^\s*([a-z0-9_+\-]+)\s*(?:\((.*)\))?\s*$")


def catalog(name: str, p: float | None = None, m: int | None = None, dims=None):
    """Look up a named object.

    Names: bell_phi+, bell_phi-, bell_psi+, bell_psi-, bell_basis, rho2(p), ghz(m),
    w(m), domino_basis, computational(dims). Arguments may be given inline,
    e.g. ``"rho2(0.75)"`` or ``"computational(2x3)"``, or as keywords.
    """
    match = _CALL.match(name.lower())
    if not match:
        raise ValueError(f"unknown catalog name {name!r}")
    key, arg = match.group(1), match.group(2)
    if key in BELL:
        return bell(key)
    if key == "bell_basis":
        return bell_basis()
    if key == "rho2":
        p = float(arg) if arg else p
        if p is None:
            raise ValueError("rho2 needs a mixing parameter p")
        return rho2(p)
    if key in ("ghz", "w"):
        m = int(arg) if arg else (m or 3)
        return ghz(m) if key == "ghz" else w_state(m)
    if key in ("domino", "domino_basis"):
        return domino_basis()
    if key == "computational":
        dims = parse_dims(arg) if arg else dims
        if dims is None:
            raise ValueError("computational basis needs dims")
        return computational(dims)
    raise ValueError(f"unknown catalog name {name!r}")


def catalog_names() -> list[str]:
    return [*BELL, "bell_basis", "rho2(p)", "ghz(m)", "w(m)", "domino_basis", "computational(dims)"]
