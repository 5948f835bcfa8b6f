"""Optimizer configuration and minimization over isometries.

Isometries V (k x r, V^dag V = I) are parameterized as the first r columns of
``W0 @ expm(X)`` with ``W0`` a random unitary (the restart) and ``X`` an
anti-Hermitian generator restricted to the directions that move those
columns. Gradients of the objective with respect to V are pulled back to the
real generator coordinates through the adjoint of the Frechet derivative of
the matrix exponential, and the problem is handed to L-BFGS.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm, expm_frechet
from scipy.optimize import minimize

from .qmat import haar_unitary

GradFn = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 2000
    tol: float = 1e-7
    seed: int = 0
    ansatz_size: int | None = None  # None: (prod dims)**2 for separable ansatz

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.ansatz_size is not None and self.ansatz_size < 1:
            raise ValueError("ansatz_size must be >= 1")

    def restart_rng(self, restart: int) -> np.random.Generator:
        # seed xor restart index: result independent of execution order
        return np.random.default_rng((int(self.seed) ^ int(restart)) & (2**64 - 1))


@dataclass
class IsometryRun:
    value: float
    V: np.ndarray
    converged: bool
    nit: int
    history: list[float] = field(default_factory=list)


def generator_basis(k: int, r: int) -> np.ndarray:
    """Real basis of anti-Hermitian k x k generators that act on the first r columns.

    Shape ``(P, k, k)`` with ``P = r**2 + 2 r (k - r)``.
    """
    gens = []
    for j in range(r):
        t = np.zeros((k, k), complex)
        t[j, j] = 1j
        gens.append(t)
    for j in range(r):
        for l in range(j + 1, k):
            t = np.zeros((k, k), complex)
            t[j, l], t[l, j] = 1.0, -1.0
            gens.append(t)
            t = np.zeros((k, k), complex)
            t[j, l], t[l, j] = 1j, 1j
            gens.append(t)
    return np.array(gens)


def minimize_isometry(
    fun_grad: GradFn,
    k: int,
    r: int,
    rng: np.random.Generator,
    max_iters: int = 2000,
    tol: float = 1e-7,
    W0: np.ndarray | None = None,
) -> IsometryRun:
    """Minimize ``f(V)`` over k x r isometries from one random start.

    ``fun_grad(V)`` returns ``(f, dF/dconj(V))``, the Wirtinger gradient, so that
    ``df = 2 Re tr(G^dag dV)``.
    """
    basis = generator_basis(k, r)
    W0 = haar_unitary(k, rng) if W0 is None else W0
    W0h = W0.conj().T
    history: list[float] = []

    def obj(theta):
        X = np.tensordot(theta, basis, axes=1)
        W = W0 @ expm(X)
        f, G = fun_grad(W[:, :r])
        Gw = np.zeros((k, k), complex)
        Gw[:, :r] = G
        # adjoint of the Frechet derivative at X is the derivative at X^dag = -X
        K = expm_frechet(-X, W0h @ Gw, compute_expm=False)
        g = 2.0 * np.real(np.tensordot(basis, K.conj(), axes=([1, 2], [0, 1])))
        return f, g

    theta0 = np.zeros(basis.shape[0])
    res = minimize(
        obj,
        theta0,
        jac=True,
        method="L-BFGS-B",
        callback=lambda intermediate_result: history.append(float(intermediate_result.fun)),
        options={"maxiter": max_iters, "ftol": 1e-15, "gtol": tol * 1e-2, "maxcor": 30},
    )
    X = np.tensordot(res.x, basis, axes=1)
    W = W0 @ expm(X)
    converged = bool(res.success) or float(np.max(np.abs(res.jac))) < np.sqrt(tol)
    return IsometryRun(float(res.fun), W[:, :r], converged, int(res.nit), history)


def best_of_restarts(
    fun_grad: GradFn, k: int, r: int, cfg: OptimizerConfig, offset: int = 0
) -> tuple[IsometryRun, list[IsometryRun]]:
    runs = [
        minimize_isometry(fun_grad, k, r, cfg.restart_rng(offset + i), cfg.max_iters, cfg.tol)
        for i in range(cfg.restarts)
    ]
    best = min(runs, key=lambda run: run.value)
    return best, runs
