import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entcoh.bases import random_cpb
from entcoh.catalog import rho2
from entcoh.entanglement import random_density, random_pure
from entcoh.entropy import (
    INF,
    BasisMixture,
    OrthonormalBasis,
    basis_populations,
    dephase,
    relative_entropy,
    relative_entropy_to_mixtures_numeric,
    shannon_entropy,
    von_neumann_entropy,
)
from entcoh.qmat import DensityMatrix, PureState, haar_unitary

from conftest import h2


def test_vn_entropy_examples():
    assert von_neumann_entropy(random_pure((2, 3), 1).density()) < 1e-12
    for d in (2, 3, 4, 6):
        rho = DensityMatrix(np.eye(d) / d, (d,))
        assert abs(von_neumann_entropy(rho) - math.log2(d)) < 1e-12
    rho = DensityMatrix(np.diag([0.75, 0.25]), (2,))
    assert abs(von_neumann_entropy(rho) - 0.8112781244591328) < 1e-12


def test_shannon_examples():
    assert shannon_entropy([1, 0]) == 0
    assert abs(shannon_entropy([0.5, 0.5]) - 1) < 1e-15
    assert abs(shannon_entropy([0.75, 0.25]) - h2(0.75)) < 1e-15
    # small negative entries are clipped
    assert abs(shannon_entropy([1 + 1e-13, -1e-13]) - 0) < 1e-12


def test_shannon_rejects_non_distribution():
    with pytest.raises(ValueError):
        shannon_entropy([0.5, 0.4])
    with pytest.raises(ValueError):
        shannon_entropy([1.5, -0.5])


def test_relative_entropy_examples():
    rho = random_density((2, 2), 3, 5)
    assert abs(relative_entropy(rho, rho)) < 1e-10
    zero = DensityMatrix(np.diag([1.0, 0.0]), (2,))
    one = DensityMatrix(np.diag([0.0, 1.0]), (2,))
    assert relative_entropy(zero, one) == INF
    assert math.isinf(INF)


def test_relative_entropy_schmidt_state():
    alpha = np.array([0.8, 0.5, np.sqrt(1 - 0.64 - 0.25)])
    v = np.zeros(9, complex)
    for i, a in enumerate(alpha):
        v[i * 3 + i] = a
    psi = PureState(v, (3, 3))
    sigma = np.zeros((9, 9))
    for i, a in enumerate(alpha):
        sigma[i * 3 + i, i * 3 + i] = a**2
    val = relative_entropy(psi.density(), DensityMatrix(sigma, (3, 3)))
    assert abs(val - shannon_entropy(alpha**2)) < 1e-10


def test_relative_entropy_dimension_mismatch():
    with pytest.raises(ValueError):
        relative_entropy(random_density((2, 2), 2, 0), random_density((2, 3), 2, 0))


def test_relative_entropy_random_pairs():
    # nonnegativity over 1000 random pairs; equality only for equal states
    r = np.random.default_rng(99)
    for _ in range(1000):
        dims = [(2,), (3,), (2, 2)][int(r.integers(3))]
        d = int(np.prod(dims))
        rho = random_density(dims, int(r.integers(1, d + 1)), r)
        sigma = random_density(dims, d, r)
        val = relative_entropy(rho, sigma)
        assert val >= 0
        if val < 1e-8:
            assert np.max(np.abs(rho.mat - sigma.mat)) <= 1e-6


def test_dephase_examples():
    comp = OrthonormalBasis.computational((2, 2))
    mix = BasisMixture(comp, np.array([0.1, 0.2, 0.3, 0.4])).density()
    assert np.allclose(dephase(mix, comp).mat, mix.mat, atol=1e-15)
    plus = PureState(np.array([1, 1]) / np.sqrt(2), (2,))
    assert np.allclose(dephase(plus.density(), OrthonormalBasis.computational((2,))).mat, np.eye(2) / 2)
    assert np.allclose(dephase(rho2(0.75), comp).mat, np.diag([0, 0.5, 0.5, 0]), atol=1e-15)


def test_dephase_commutes_with_projectors(rng):
    rho = random_density((2, 3), 4, rng)
    basis = OrthonormalBasis(haar_unitary(6, rng), (2, 3))
    out = dephase(rho, basis)
    assert abs(np.trace(out.mat) - 1) < 1e-12
    for v in basis.elements():
        p = np.outer(v, v.conj())
        assert np.max(np.abs(p @ out.mat - out.mat @ p)) < 1e-12


def test_dephase_dimension_mismatch():
    with pytest.raises(ValueError):
        dephase(random_density((2, 2), 2, 0), OrthonormalBasis.computational((2, 3)))


def test_basis_validation():
    with pytest.raises(ValueError, match="orthonormal"):
        OrthonormalBasis(np.array([[1, 1], [0, 1]], dtype=complex), (2,))
    with pytest.raises(ValueError):
        OrthonormalBasis(np.eye(3)[:, :2], (3,))
    with pytest.raises(ValueError):
        BasisMixture(OrthonormalBasis.computational((2,)), np.array([0.7, 0.4]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dims=st.sampled_from([(2,), (2, 2), (2, 3), (3, 3)]))
def test_dephasing_entropy_and_pinching(seed, dims):
    r = np.random.default_rng(seed)
    d = int(np.prod(dims))
    rho = random_density(dims, int(r.integers(1, d + 1)), r)
    basis = OrthonormalBasis(haar_unitary(d, r), dims)
    deph = dephase(rho, basis)
    s_rho, s_deph = von_neumann_entropy(rho), von_neumann_entropy(deph)
    assert s_deph >= s_rho - 1e-8
    assert abs(relative_entropy(rho, deph) - (s_deph - s_rho)) < 1e-8
    lam = np.linalg.eigvalsh(rho.mat)
    assert abs(shannon_entropy(np.clip(lam, 0, None) / lam.clip(0).sum()) - s_rho) < 1e-8
    pops = basis_populations(rho, basis)
    assert abs(shannon_entropy(pops) - s_deph) < 1e-8


def test_closed_form_matches_simplex_minimization():
    r = np.random.default_rng(2024)
    worst = 0.0
    for t in range(50):
        dims = [(2, 2), (2, 3), (3,)][t % 3]
        d = int(np.prod(dims))
        rho = random_density(dims, int(r.integers(1, d + 1)), r)
        basis = random_cpb(dims, r).expand() if len(dims) > 1 else OrthonormalBasis(haar_unitary(d, r), dims)
        closed = von_neumann_entropy(dephase(rho, basis)) - von_neumann_entropy(rho)
        numeric, w = relative_entropy_to_mixtures_numeric(rho, basis)
        worst = max(worst, abs(numeric - closed))
        assert np.allclose(w, basis_populations(rho, basis), atol=1e-4)
    assert worst <= 1e-6
