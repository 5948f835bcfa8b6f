"""Dense linear algebra on small tensor-product Hilbert spaces.

Subsystem ordering is fixed throughout the package: for dims ``(d_1, ..., d_m)``
the flat index of ``|i_1 ... i_m>`` is ``sum_k i_k * prod_{j>k} d_j``, i.e. the
first party is the most significant digit. This is numpy's C-order reshape,
so ``vec.reshape(dims)`` exposes one axis per party.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

TOL_NORM = 1e-9
TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9


def check_dims(dims: Iterable[int], total: int | None = None) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if len(dims) < 1:
        raise ValueError("dims must list at least one subsystem")
    if any(d < 2 for d in dims):
        raise ValueError(f"every subsystem dimension must be >= 2, got {dims}")
    if total is not None and prod(dims) != total:
        raise ValueError(f"dims {dims} have product {prod(dims)}, expected {total}")
    return dims


def check_finite(m: np.ndarray, what: str = "matrix") -> None:
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{what} has non-finite entries")


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector with declared subsystem dimensions."""

    vec: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=complex).reshape(-1)
        check_finite(vec, "amplitude vector")
        dims = check_dims(self.dims, vec.size)
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > TOL_NORM:
            raise ValueError(f"pure state is not normalized (norm = {norm:.12g})")
        vec.setflags(write=False)
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, vec, dims) -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        return cls(vec / np.linalg.norm(vec), dims)

    @property
    def dim(self) -> int:
        return self.vec.size

    def projector(self) -> np.ndarray:
        return np.outer(self.vec, self.vec.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector(), self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Trace-one positive semidefinite Hermitian operator with subsystem dims.

    Hermiticity defects below ``TOL_HERM`` are repaired by symmetrizing.
    """

    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        check_finite(m, "density matrix")
        dims = check_dims(self.dims, m.shape[0])
        asym = np.max(np.abs(m - m.conj().T))
        if asym > TOL_HERM:
            raise ValueError(f"density matrix is not Hermitian (max |M - M^dag| = {asym:.3g})")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1.0) > TOL_TRACE:
            raise ValueError(f"density matrix trace is {tr:.12g}, expected 1")
        lam_min = np.linalg.eigvalsh(m)[0]
        if lam_min < -TOL_PSD:
            raise ValueError(f"density matrix is not positive semidefinite (min eigenvalue {lam_min:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)


def as_density(state: PureState | DensityMatrix) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


def bipartition(dims: Sequence[int], party_set_a: Iterable[int]) -> tuple[int, ...]:
    """Validate a bipartition given as the parties on side A; returns them sorted."""
    m = len(dims)
    a = tuple(sorted(set(int(k) for k in party_set_a)))
    if not a or len(a) == m:
        raise ValueError(f"bipartition side A must be a nonempty proper subset of 0..{m - 1}, got {a}")
    if a[0] < 0 or a[-1] >= m:
        raise ValueError(f"party index out of range for {m} parties: {a}")
    return a


def complement(m: int, parties: Iterable[int]) -> tuple[int, ...]:
    s = set(parties)
    return tuple(k for k in range(m) if k not in s)


def all_bipartitions(m: int) -> list[tuple[int, ...]]:
    """The 2**(m-1) - 1 distinct cuts, each listed by the side containing party 0."""
    cuts = []
    for mask in range(1, 2 ** m - 1):
        if mask & 1:
            cuts.append(tuple(k for k in range(m) if mask >> k & 1))
    return cuts


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def permute_parties(vec_or_mat: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder subsystems so that new party ``k`` is old party ``order[k]``."""
    dims = tuple(dims)
    order = tuple(order)
    m = len(dims)
    x = np.asarray(vec_or_mat)
    if x.ndim == 1:
        return x.reshape(dims).transpose(order).reshape(-1)
    t = x.reshape(dims + dims).transpose(order + tuple(m + k for k in order))
    n = x.shape[0]
    return t.reshape(n, n)


def group_bipartite(vec: np.ndarray, dims: Sequence[int], split: Sequence[int]) -> np.ndarray:
    """Reshape an amplitude vector into the (d_A, d_B) matrix for a cut."""
    dims = tuple(dims)
    a = bipartition(dims, split)
    b = complement(len(dims), a)
    d_a = prod(dims[k] for k in a)
    return permute_parties(vec, dims, a + b).reshape(d_a, -1)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    dims = rho.dims
    m = len(dims)
    keep = tuple(sorted(set(int(k) for k in keep)))
    if not keep:
        raise ValueError("partial_trace needs a nonempty set of subsystems to keep")
    if keep[0] < 0 or keep[-1] >= m:
        raise ValueError(f"subsystem index out of range for {m} parties: {keep}")
    drop = complement(m, keep)
    t = rho.mat.reshape(dims + dims)
    # bring kept row axes, dropped row axes, kept col axes, dropped col axes
    t = t.transpose(keep + drop + tuple(m + k for k in keep) + tuple(m + k for k in drop))
    dk = prod(dims[k] for k in keep)
    dd = prod(dims[k] for k in drop) if drop else 1
    red = np.einsum("ajbj->ab", t.reshape(dk, dd, dk, dd))
    return DensityMatrix(red, tuple(dims[k] for k in keep))


def partial_transpose(rho: DensityMatrix, split: Iterable[int]) -> np.ndarray:
    """Transpose the subsystems on side A of the cut; returns a plain matrix."""
    dims = rho.dims
    m = len(dims)
    a = set(bipartition(dims, split))
    axes = [m + k if k in a else k for k in range(m)] + [k if k in a else m + k for k in range(m)]
    n = rho.dim
    return rho.mat.reshape(dims + dims).transpose(axes).reshape(n, n)


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian matrix.

    Asymmetry up to ``TOL_HERM`` (relative to the largest entry, floor 1) is
    silently repaired; larger asymmetry is rejected.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"hermitian_eig needs a square matrix, got shape {m.shape}")
    check_finite(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > TOL_HERM * scale:
        raise ValueError("hermitian_eig input is not Hermitian within tolerance")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return w, v


def ket(index: int | Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Computational basis vector; ``index`` is flat or one digit per party."""
    dims = tuple(dims)
    v = np.zeros(prod(dims), dtype=complex)
    if not isinstance(index, (int, np.integer)):
        index = int(np.ravel_multi_index(tuple(index), dims))
    v[index] = 1.0
    return v


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def is_unitary(u: np.ndarray, tol: float = 1e-8) -> bool:
    u = np.asarray(u)
    return u.shape[0] == u.shape[1] and np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=tol)
