"""Entropic functionals in bits: von Neumann, Shannon, relative entropy, dephasing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .qmat import DensityMatrix, PureState, check_dims, hermitian_eig

EIG_CLIP = 1e-12
SUPPORT_EIG = 1e-10
SUPPORT_OVERLAP = 1e-10

INF = math.inf  # sentinel for support mismatch in relative_entropy


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Complete orthonormal basis; element ``i`` is column ``i`` of ``vectors``."""

    vectors: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"basis needs exactly prod(dims) elements, got array of shape {v.shape}")
        dims = check_dims(self.dims, v.shape[0])
        if not np.all(np.isfinite(v)):
            raise ValueError("basis has non-finite entries")
        gram = v.conj().T @ v
        err = np.max(np.abs(gram - np.eye(v.shape[0])))
        if err > 1e-8:
            raise ValueError(f"basis is not orthonormal (max Gram deviation {err:.3g})")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_elements(cls, elements: Sequence[np.ndarray], dims) -> "OrthonormalBasis":
        return cls(np.column_stack([np.asarray(e, dtype=complex).reshape(-1) for e in elements]), dims)

    @classmethod
    def computational(cls, dims) -> "OrthonormalBasis":
        dims = check_dims(dims)
        return cls(np.eye(prod(dims), dtype=complex), dims)

    def __len__(self) -> int:
        return self.vectors.shape[1]

    def element(self, i: int) -> PureState:
        return PureState(self.vectors[:, i], self.dims)

    def elements(self) -> list[np.ndarray]:
        return [self.vectors[:, i] for i in range(len(self))]


@dataclass(frozen=True)
class BasisMixture:
    basis: OrthonormalBasis
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.basis),) or np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
            raise ValueError("basis mixture weights must be a probability vector over the basis")

    def density(self) -> DensityMatrix:
        v = self.basis.vectors
        return DensityMatrix((v * self.weights) @ v.conj().T, self.basis.dims)


def _xlog2x(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    mask = p > EIG_CLIP
    out[mask] = p[mask] * np.log2(p[mask])
    return out


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size == 0:
        raise ValueError("empty probability vector")
    if np.min(p) < -1e-6 or abs(p.sum() - 1.0) > 1e-6:
        raise ValueError(f"not a probability vector (sum {p.sum():.12g}, min {np.min(p):.3g})")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    return max(0.0, float(-_xlog2x(p).sum()))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    lam = hermitian_eig(rho.mat)[0]
    return max(0.0, float(-_xlog2x(lam).sum()))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho || sigma) in bits; ``INF`` when supp(rho) is not inside supp(sigma)."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    lr, vr = hermitian_eig(rho.mat)
    ls, vs = hermitian_eig(sigma.mat)
    null = vs[:, ls <= EIG_CLIP]
    if null.shape[1]:
        live = vr[:, lr > SUPPORT_EIG]
        if np.any(np.abs(null.conj().T @ live) ** 2 > SUPPORT_OVERLAP):
            return INF
    # tr(rho log rho) - tr(rho log sigma), evaluated in sigma's eigenbasis on its support
    keep = ls > EIG_CLIP
    diag = np.real(np.einsum("ij,jk,ki->i", vs.conj().T, rho.mat, vs))
    cross = float(np.sum(diag[keep] * np.log2(ls[keep])))
    val = float(_xlog2x(lr).sum()) - cross
    return max(val, 0.0)


def dephase(rho: DensityMatrix, basis: OrthonormalBasis) -> DensityMatrix:
    if rho.dim != basis.vectors.shape[0]:
        raise ValueError(f"dimension mismatch: state {rho.dim}, basis {basis.vectors.shape[0]}")
    v = basis.vectors
    q = basis_populations(rho, basis)
    return DensityMatrix((v * q) @ v.conj().T, rho.dims)


def basis_populations(rho: DensityMatrix, basis: OrthonormalBasis) -> np.ndarray:
    v = basis.vectors
    q = np.real(np.einsum("ji,jk,ki->i", v.conj(), rho.mat, v))
    q = np.clip(q, 0.0, None)
    return q / q.sum()


def relative_entropy_to_mixtures_numeric(
    rho: DensityMatrix, basis: OrthonormalBasis, iters: int = 500, tol: float = 1e-7
) -> tuple[float, np.ndarray]:
    """Minimize S(rho || sum_i w_i |b_i><b_i|) directly over the weight simplex.

    Projected gradient with Barzilai-Borwein steps. Objective values come from
    the generic ``relative_entropy``; kept independent of the closed form
    S(dephase(rho)) - S(rho) so the two can be compared.
    """
    v = basis.vectors
    n = v.shape[1]
    proj = [np.outer(v[:, i], v[:, i].conj()) for i in range(n)]
    q_raw = np.real(np.array([np.trace(rho.mat @ p) for p in proj]))

    def objective(w):
        sigma = sum(wi * p for wi, p in zip(w, proj))
        return relative_entropy(rho, DensityMatrix(sigma, rho.dims))

    def grad(w):
        return -q_raw / (w * np.log(2))

    floor = 1e-15
    w = np.full(n, 1.0 / n)
    f = objective(w)
    g = grad(w)
    step = 0.1
    for _ in range(iters):
        while True:
            w_new = np.maximum(_project_simplex(w - step * g), floor)
            w_new /= w_new.sum()
            f_new = objective(w_new)
            if f_new <= f or step < 1e-14:
                break
            step *= 0.5
        g_new = grad(w_new)
        s, y = w_new - w, g_new - g
        done = abs(f - f_new) < tol * 1e-3 and np.max(np.abs(s)) < tol
        w, f, g = w_new, f_new, g_new
        if done:
            break
        sy = float(s @ y)
        step = float(s @ s) / sy if sy > 0 else step * 2
    return f, w


def _project_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, x.size + 1)
    k = idx[u - css / idx > 0][-1]
    return np.maximum(x - css[k - 1] / k, 0.0)
