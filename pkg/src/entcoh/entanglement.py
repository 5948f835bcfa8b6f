"""Entanglement detection and quantification.

Schmidt decomposition, PPT test, the two-qubit concurrence / entanglement of
formation closed forms, a convex-roof optimizer for the entanglement of
formation in any dimension, and an optimizer for the relative entropy of
entanglement. Optimizer outputs are upper bounds with convergence flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .entropy import DensityMatrix, relative_entropy, shannon_entropy
from .optimize import OptimizerConfig, best_of_restarts
from .qmat import (
    PureState,
    all_bipartitions,
    bipartition,
    check_dims,
    complement,
    group_bipartite,
    hermitian_eig,
    partial_transpose,
    permute_parties,
)

SCHMIDT_CUTOFF = 1e-10
ENTANGLED_CUTOFF = 1e-8
PPT_TOL = 1e-9
RANK_CUTOFF = 1e-12
LN2 = np.log(2.0)


@dataclass(frozen=True)
class SchmidtForm:
    coefficients: np.ndarray  # descending, all > SCHMIDT_CUTOFF
    left: np.ndarray  # d_A x n, orthonormal columns
    right: np.ndarray  # d_B x n

    def reconstruct(self) -> np.ndarray:
        """Amplitude matrix (d_A, d_B) of sum_i alpha_i |l_i>|r_i>."""
        return (self.left * self.coefficients) @ self.right.T


@dataclass(frozen=True, eq=False)
class PureDecomposition:
    weights: np.ndarray
    states: np.ndarray  # (k, D) rows are normalized pure states
    dims: tuple[int, ...]

    def density(self) -> np.ndarray:
        return np.einsum("i,ij,ik->jk", self.weights, self.states, self.states.conj())


@dataclass(frozen=True, eq=False)
class SeparableAnsatz:
    weights: np.ndarray
    product_states: np.ndarray  # (n, D) rows, product across the cut, canonical party order
    dims: tuple[int, ...]
    split: tuple[int, ...]

    def density(self) -> DensityMatrix:
        rho = np.einsum("i,ij,ik->jk", self.weights, self.product_states, self.product_states.conj())
        return DensityMatrix(rho / np.trace(rho).real, self.dims)


@dataclass
class RoofResult:
    value: float
    decomposition: PureDecomposition | None
    converged: bool
    ansatz_size: int
    runs: list[float] = field(default_factory=list)


@dataclass
class REEResult:
    value: float
    sigma: SeparableAnsatz | None
    converged: bool
    history: list[float] = field(default_factory=list)
    runs: list[float] = field(default_factory=list)


def _require_multipartite(dims: Sequence[int]) -> None:
    if len(dims) < 2:
        raise ValueError("operation needs at least two subsystems")


def schmidt_decompose(psi: PureState, split: Iterable[int] = (0,)) -> SchmidtForm:
    _require_multipartite(psi.dims)
    M = group_bipartite(psi.vec, psi.dims, split)
    u, s, vh = np.linalg.svd(M)
    n = int(np.sum(s > SCHMIDT_CUTOFF))
    return SchmidtForm(s[:n], u[:, :n], vh[:n].T)


def schmidt_coefficients(psi: PureState, split: Iterable[int] = (0,)) -> np.ndarray:
    """All singular values of the cut's amplitude matrix, untruncated."""
    _require_multipartite(psi.dims)
    return np.linalg.svd(group_bipartite(psi.vec, psi.dims, split), compute_uv=False)


def is_entangled_pure(psi: PureState, split: Iterable[int] = (0,)) -> bool:
    s = schmidt_coefficients(psi, split)
    return bool(s.size > 1 and s[1] > ENTANGLED_CUTOFF)


def is_gme_pure(psi: PureState) -> bool:
    _require_multipartite(psi.dims)
    return all(is_entangled_pure(psi, cut) for cut in all_bipartitions(len(psi.dims)))


def entanglement_entropy(psi: PureState, split: Iterable[int] = (0,)) -> float:
    s = schmidt_coefficients(psi, split)
    p = s**2
    return shannon_entropy(p / p.sum())


def is_ppt(rho: DensityMatrix, split: Iterable[int] = (0,)) -> tuple[bool, float]:
    lam_min = float(hermitian_eig(partial_transpose(rho, split))[0][0])
    return lam_min >= -PPT_TOL, lam_min


_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def _require_two_qubit(rho: DensityMatrix) -> None:
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"two-qubit closed form needs dims (2, 2), got {rho.dims}")


def concurrence_2q(rho: DensityMatrix) -> float:
    _require_two_qubit(rho)
    R = rho.mat @ _YY @ rho.mat.conj() @ _YY
    # R is similar to a PSD matrix; clip round-off before the square root
    ev = np.sort(np.sqrt(np.clip(np.real(np.linalg.eigvals(R)), 0.0, None)))[::-1]
    return float(min(1.0, max(0.0, ev[0] - ev[1] - ev[2] - ev[3])))


def eof_2q(rho: DensityMatrix) -> float:
    c = concurrence_2q(rho)
    x = (1 + np.sqrt(max(0.0, 1 - c * c))) / 2
    return shannon_entropy([x, 1 - x])


def _bipartite_view(rho: DensityMatrix, split) -> tuple[np.ndarray, int, int, tuple[int, ...]]:
    """Density matrix reordered to (A, B) party order, with d_A, d_B and the order."""
    _require_multipartite(rho.dims)
    a = bipartition(rho.dims, split)
    order = a + complement(len(rho.dims), a)
    d_a = prod(rho.dims[k] for k in a)
    return permute_parties(rho.mat, rho.dims, order), d_a, rho.dim // d_a, order


def _inverse(order: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(order)
    for new, old in enumerate(order):
        inv[old] = new
    return tuple(inv)


def _roof_objective(Phi: np.ndarray, d_a: int, d_b: int):
    """Average local entropy of the decomposition V @ Phi, with Wirtinger gradient in V.

    Row i of ``Psi = V @ Phi`` is sqrt(p_i) |psi_i>; the term for it is
    p_i S(tr_B psi_i) = -tr s ln s + t ln t with s = M M^dag, t = tr s.
    """

    def fun_grad(V):
        Psi = V @ Phi
        M = Psi.reshape(-1, d_a, d_b)
        u, s, vh = np.linalg.svd(M, full_matrices=False)
        s2 = s**2
        t = s2.sum(axis=1)
        pos = s2 > 1e-300
        ln_s2 = np.where(pos, np.log(np.where(pos, s2, 1.0)), 0.0)
        ln_t = np.log(np.where(t > 1e-300, t, 1.0))
        f = float(np.sum(-s2 * ln_s2) + np.sum(t * ln_t)) / LN2
        c = s * (-ln_s2 + ln_t[:, None]) / LN2
        GM = np.einsum("kij,kj,kjl->kil", u, c, vh)
        G = GM.reshape(V.shape[0], -1) @ Phi.conj().T
        return f, G

    return fun_grad


def decomposition_size(rank: int, total_dim: int) -> int:
    return max(rank, min(rank * rank, 2 * total_dim))


def eof_convex_roof(
    rho: DensityMatrix, split: Iterable[int] = (0,), cfg: OptimizerConfig | None = None
) -> RoofResult:
    """Entanglement of formation by direct search over pure-state decompositions.

    Every decomposition with k terms is ``psi_i = sum_j V_ij sqrt(lam_j) |e_j>``
    for a k x r isometry V on the r spectral vectors of rho; V is optimized with
    random restarts. The value is an upper bound on the true minimum.
    """
    cfg = cfg or OptimizerConfig()
    mat, d_a, d_b, order = _bipartite_view(rho, split)
    lam, vec = hermitian_eig(mat)
    keep = lam > RANK_CUTOFF
    lam, vec = lam[keep], vec[:, keep]
    r = lam.size
    Phi = np.sqrt(lam)[:, None] * vec.T
    back = _inverse(order)
    if r == 1:
        psi = vec[:, 0]
        value = shannon_entropy(_normalized_sq_svals(psi, d_a, d_b))
        states = permute_parties(psi, tuple(rho.dims[k] for k in order), back)[None, :]
        return RoofResult(value, PureDecomposition(np.ones(1), states, rho.dims), True, 1, [value])

    k = decomposition_size(r, rho.dim)
    best, runs = best_of_restarts(_roof_objective(Phi, d_a, d_b), k, r, cfg)
    Psi = best.V @ Phi
    weights = np.sum(np.abs(Psi) ** 2, axis=1)
    live = weights > 1e-15
    states = Psi[live] / np.sqrt(weights[live])[:, None]
    ordered_dims = tuple(rho.dims[kk] for kk in order)
    states = np.array([permute_parties(s, ordered_dims, back) for s in states])
    weights = weights[live] / weights[live].sum()
    dec = PureDecomposition(weights, states, rho.dims)
    # recompute from the decomposition itself, independent of the optimizer's objective
    value = decomposition_average_entropy(dec, split)
    return RoofResult(
        value,
        dec,
        best.converged,
        k,
        [run.value for run in runs],
    )


def _normalized_sq_svals(vec: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    s2 = np.linalg.svd(vec.reshape(d_a, d_b), compute_uv=False) ** 2
    return s2 / s2.sum()


def decomposition_average_entropy(dec: PureDecomposition, split: Iterable[int] = (0,)) -> float:
    """sum_i p_i E(psi_i) for an explicit decomposition."""
    return float(
        sum(w * entanglement_entropy(PureState.normalized(s, dec.dims), split) for w, s in zip(dec.weights, dec.states))
    )


def _matrix_log_derivative_adjoint(sigma: np.ndarray, rho: np.ndarray, floor: float = 1e-14):
    """Eigenpairs of sigma and the gradient of -tr(rho ln sigma) with respect to sigma."""
    mu, U = np.linalg.eigh(sigma)
    mu = np.maximum(mu, floor)
    ln_mu = np.log(mu)
    dmu = mu[:, None] - mu[None, :]
    dln = ln_mu[:, None] - ln_mu[None, :]
    close = np.abs(dmu) <= 1e-12 * np.maximum(mu[:, None], mu[None, :])
    gamma = np.where(close, 1.0 / np.maximum(mu[:, None], mu[None, :]), dln / np.where(close, 1.0, dmu))
    rho_u = U.conj().T @ rho @ U
    G = -U @ (gamma * rho_u) @ U.conj().T
    cross = -float(np.real(np.sum(np.diag(rho_u) * ln_mu)))
    return cross, G


def _ree_objective(rho_ab: np.ndarray, n: int, d_a: int, d_b: int):
    """-tr(rho ln sigma) / ln2 for sigma = sum_k w_k |a_k b_k><a_k b_k|, with real-vector gradient.

    Parameters: n softmax logits, then n complex a-vectors and n complex b-vectors
    (real and imaginary parts interleaved by block).
    """
    na, nb = 2 * n * d_a, 2 * n * d_b

    def unpack(x):
        t = x[:n]
        ua = x[n : n + na].reshape(2, n, d_a)
        ub = x[n + na :].reshape(2, n, d_b)
        return t, ua[0] + 1j * ua[1], ub[0] + 1j * ub[1]

    def build(x):
        t, ua, ub = unpack(x)
        w = np.exp(t - t.max())
        w /= w.sum()
        a = ua / np.linalg.norm(ua, axis=1, keepdims=True)
        b = ub / np.linalg.norm(ub, axis=1, keepdims=True)
        X = np.einsum("ki,kj->kij", a, b).reshape(n, -1)
        return w, a, b, X, ua, ub

    def fun_grad(x):
        w, a, b, X, ua, ub = build(x)
        sigma = (X.T * w) @ X.conj()
        cross, G = _matrix_log_derivative_adjoint(sigma, rho_ab)
        f = cross / LN2
        G = G / LN2
        GX = X @ G.T  # row k: G x_k   (G is Hermitian: (G x)^T = x^T G^T)
        gw = np.real(np.einsum("ki,ki->k", X.conj(), GX))
        gt = w * (gw - np.dot(w, gw))
        gx = (w[:, None] * GX).reshape(n, d_a, d_b)
        ha = np.einsum("kij,kj->ki", gx, b.conj())
        hb = np.einsum("kij,ki->kj", gx, a.conj())

        def pull(h, u, v):
            nrm = np.linalg.norm(u, axis=1, keepdims=True)
            c = (h - v * np.real(np.sum(v.conj() * h, axis=1, keepdims=True))) / nrm
            return np.concatenate([2 * c.real, 2 * c.imag]).reshape(-1)

        g = np.concatenate([gt, pull(ha, ua, a), pull(hb, ub, b)])
        return f, g

    return build, fun_grad


def relative_entropy_of_entanglement(
    rho: DensityMatrix, split: Iterable[int] = (0,), cfg: OptimizerConfig | None = None
) -> REEResult:
    """Upper bound on the relative entropy of entanglement across a cut.

    Minimizes S(rho || sigma) over separable sigma written as a mixture of
    ``cfg.ansatz_size`` product states (default (prod dims)**2), jointly in the
    mixing weights and the local vectors, from ``cfg.restarts`` random starts.
    """
    cfg = cfg or OptimizerConfig()
    mat, d_a, d_b, order = _bipartite_view(rho, split)
    n = cfg.ansatz_size or rho.dim**2
    build, fun_grad = _ree_objective(mat, n, d_a, d_b)
    lam = hermitian_eig(mat)[0]
    neg_s = float(np.sum(lam[lam > RANK_CUTOFF] * np.log2(lam[lam > RANK_CUTOFF])))
    ordered_dims = tuple(rho.dims[k] for k in order)
    back = _inverse(order)
    a_parties = bipartition(rho.dims, split)

    best = None
    run_values = []
    for i in range(cfg.restarts):
        rng = cfg.restart_rng(i)
        x0 = np.concatenate([rng.standard_normal(n) * 0.1, rng.standard_normal(2 * n * (d_a + d_b))])
        history: list[float] = []
        res = minimize(
            fun_grad,
            x0,
            jac=True,
            method="L-BFGS-B",
            callback=lambda intermediate_result: history.append(neg_s + float(intermediate_result.fun)),
            options={"maxiter": cfg.max_iters, "ftol": 1e-15, "gtol": cfg.tol * 1e-2, "maxcor": 30},
        )
        w, _, _, X, _, _ = build(res.x)
        states = np.array([permute_parties(x, ordered_dims, back) for x in X])
        ansatz = SeparableAnsatz(w, states, rho.dims, a_parties)
        value = relative_entropy(rho, ansatz.density())
        converged = bool(res.success) or float(np.max(np.abs(res.jac))) < np.sqrt(cfg.tol)
        run_values.append(value)
        if best is None or value < best[0]:
            best = (value, ansatz, converged, history)
    value, ansatz, converged, history = best
    return REEResult(value, ansatz, converged, history, run_values)


def random_pure(dims: Sequence[int], seed: int | np.random.Generator) -> PureState:
    """Haar-random pure state: normalized standard complex Gaussian vector."""
    dims = check_dims(dims)
    rng = np.random.default_rng(seed)
    d = prod(dims)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(z / np.linalg.norm(z), dims)


def random_density(dims: Sequence[int], rank: int, seed: int | np.random.Generator) -> DensityMatrix:
    """Reduction of a Haar-random pure state on C^D (x) C^rank."""
    dims = check_dims(dims)
    d = prod(dims)
    if not 1 <= rank <= d:
        raise ValueError(f"rank must be in 1..{d}, got {rank}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = z @ z.conj().T
    return DensityMatrix(rho / np.trace(rho).real, dims)


def random_product_pure(dims: Sequence[int], seed: int | np.random.Generator) -> PureState:
    dims = check_dims(dims)
    rng = np.random.default_rng(seed)
    vec = np.ones(1, complex)
    for d in dims:
        vec = np.kron(vec, _haar_vector(d, rng))
    return PureState(vec / np.linalg.norm(vec), dims)


def _haar_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_separable(
    dims: Sequence[int], n_terms: int, seed: int | np.random.Generator
) -> DensityMatrix:
    """Mixture of ``n_terms`` random product states (product across every party)."""
    dims = check_dims(dims)
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(n_terms))
    rho = sum(wi * random_product_pure(dims, rng).projector() for wi in w)
    return DensityMatrix(rho, dims)
