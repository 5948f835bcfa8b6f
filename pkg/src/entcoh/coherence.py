"""Coherence of states with respect to a basis and over locally distinguishable bases.

The minimum over bases is searched within conditional product bases across a
cut. For a fixed local basis of whichever side measures first, the best
conditional basis of the other side on outcome ``i`` is the eigenbasis of the
conditional operator ``tau_i = <a_i| rho |a_i>`` (its diagonal in any other
basis is majorized by its spectrum), so only the first side's unitary is
searched numerically; the coherence of that candidate is
``-sum_i tr(tau_i log tau_i) - S(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable

import numpy as np

from .bases import ConditionalProductBasis, cut_groups
from .entanglement import PureDecomposition, eof_convex_roof
from .entropy import (
    OrthonormalBasis,
    dephase,
    shannon_entropy,
    von_neumann_entropy,
)
from .optimize import OptimizerConfig, minimize_isometry
from .qmat import DensityMatrix, PureState, as_density, permute_parties

LN2 = np.log(2.0)


@dataclass
class CoherenceResult:
    value: float
    achieving_basis: ConditionalProductBasis | None = None
    achieving_decomposition: PureDecomposition | None = None
    converged: bool = True
    runs: list[float] = field(default_factory=list)
    element_bases: list[ConditionalProductBasis] | None = None


def _check_dims(n: int, basis: OrthonormalBasis) -> None:
    if n != basis.vectors.shape[0]:
        raise ValueError(f"dimension mismatch: state {n}, basis {basis.vectors.shape[0]}")


def coherence_pure(psi: PureState, basis: OrthonormalBasis) -> float:
    """Relative entropy of coherence of a pure state: Shannon entropy of its basis overlaps."""
    _check_dims(psi.dim, basis)
    p = np.abs(basis.vectors.conj().T @ psi.vec) ** 2
    return shannon_entropy(p / p.sum())


def relative_coherence(rho: DensityMatrix, basis: OrthonormalBasis) -> float:
    _check_dims(rho.dim, basis)
    val = von_neumann_entropy(dephase(rho, basis)) - von_neumann_entropy(rho)
    return max(0.0, val)


def _first_party_objective(rho4: np.ndarray):
    """sum_i -tr(tau_i ln tau_i)/ln2 with tau_i = (u_i^dag x I) rho (u_i x I), and its gradient in U.

    ``rho4`` is rho reshaped to (d1, d2, d1, d2) with the measuring party first.
    """

    def fun_grad(U):
        tau = np.einsum("xi,xbyc,yi->ibc", U.conj(), rho4, U)
        tau = (tau + tau.conj().transpose(0, 2, 1)) / 2
        mu, W = np.linalg.eigh(tau)
        mu = np.maximum(mu, 1e-300)
        ln_mu = np.log(mu)
        f = -float(np.sum(mu * ln_mu)) / LN2
        G = -np.einsum("ibk,ik,ick->ibc", W, ln_mu + 1.0, W.conj()) / LN2
        grad = np.einsum("icb,xbyc,yi->xi", G, rho4, U)
        return f, grad

    return fun_grad


def _candidate_basis(
    rho4: np.ndarray, U: np.ndarray, dims, groups, order
) -> ConditionalProductBasis:
    tau = np.einsum("xi,xbyc,yi->ibc", U.conj(), rho4, U)
    cond = {}
    for i in range(U.shape[1]):
        t = (tau[i] + tau[i].conj().T) / 2
        mu, W = np.linalg.eigh(t)
        cond[(i,)] = W[:, ::-1]
    return ConditionalProductBasis(dims, order, U, cond, groups)


def _search_cut(rho: DensityMatrix, split: Iterable[int], cfg: OptimizerConfig, score) -> CoherenceResult:
    """Minimize ``score(basis)`` over conditional product bases across the cut.

    Even restarts let side A measure first, odd restarts side B.
    """
    a, b = cut_groups(rho.dims, split)
    groups = (a, b)
    dims = rho.dims
    best = None
    runs = []
    for i in range(cfg.restarts):
        order = (0, 1) if i % 2 == 0 else (1, 0)
        first, second = groups[order[0]], groups[order[1]]
        d1 = prod(dims[k] for k in first)
        d2 = rho.dim // d1
        mat = permute_parties(rho.mat, dims, first + second)
        rho4 = mat.reshape(d1, d2, d1, d2)
        run = minimize_isometry(_first_party_objective(rho4), d1, d1, cfg.restart_rng(i), cfg.max_iters, cfg.tol)
        cpb = _candidate_basis(rho4, run.V, dims, groups, order)
        value = score(cpb.expand())
        runs.append(value)
        if best is None or value < best[0]:
            best = (value, cpb, run.converged)
    value, cpb, converged = best
    return CoherenceResult(value, achieving_basis=cpb, converged=converged, runs=runs)


def min_coherence_pure(
    psi: PureState, split: Iterable[int] = (0,), cfg: OptimizerConfig | None = None
) -> CoherenceResult:
    """Smallest coherence of ``psi`` over conditional product bases across the cut."""
    cfg = cfg or OptimizerConfig()
    return _search_cut(psi.density(), split, cfg, lambda basis: coherence_pure(psi, basis))


def min_relative_coherence(
    rho: DensityMatrix | PureState, split: Iterable[int] = (0,), cfg: OptimizerConfig | None = None
) -> CoherenceResult:
    """Smallest relative entropy of coherence over conditional product bases; an upper bound
    on the minimum over all locally distinguishable bases."""
    cfg = cfg or OptimizerConfig()
    rho = as_density(rho)
    return _search_cut(rho, split, cfg, lambda basis: relative_coherence(rho, basis))


def convex_roof_coherence(
    rho: DensityMatrix | PureState,
    split: Iterable[int] = (0,),
    cfg: OptimizerConfig | None = None,
    nested: bool = False,
) -> CoherenceResult:
    """Convex-roof coherence over locally distinguishable bases.

    The inner basis minimum for each pure element equals its local entropy, so
    the outer search is the entanglement-of-formation search. With ``nested``
    the inner minima are instead re-derived numerically with
    ``min_coherence_pure`` on the optimal decomposition.
    """
    cfg = cfg or OptimizerConfig()
    rho = as_density(rho)
    roof = eof_convex_roof(rho, split, cfg)
    result = CoherenceResult(
        roof.value, achieving_decomposition=roof.decomposition, converged=roof.converged, runs=roof.runs
    )
    if nested and roof.decomposition is not None:
        dec = roof.decomposition
        total, bases = 0.0, []
        for w, s in zip(dec.weights, dec.states):
            inner = min_coherence_pure(PureState.normalized(s, dec.dims), split, cfg)
            total += w * inner.value
            bases.append(inner.achieving_basis)
            result.converged = result.converged and inner.converged
        result.value = float(total)
        result.element_bases = bases
    return result

