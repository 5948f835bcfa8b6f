from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entcoh.catalog import bell, ghz, rho2
from entcoh.entanglement import random_density, random_product_pure, random_pure
from entcoh.qmat import (
    DensityMatrix,
    PureState,
    all_bipartitions,
    bipartition,
    check_dims,
    hermitian_eig,
    ket,
    partial_trace,
    partial_transpose,
    permute_parties,
    tensor_product,
)

dims_strategy = st.lists(st.integers(2, 3), min_size=2, max_size=3).map(tuple)


def test_tensor_identity():
    assert np.allclose(tensor_product(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_projectors():
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    out = tensor_product(p0, p1)
    expected = np.zeros((4, 4))
    expected[1, 1] = 1
    assert np.array_equal(out, expected)


def test_tensor_entries(rng):
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    out = tensor_product(a, b)
    for i, j, k, l in np.ndindex(2, 2, 3, 3):
        assert abs(out[i * 3 + k, j * 3 + l] - a[i, j] * b[k, l]) < 1e-14


def test_pure_state_norm_enforced():
    with pytest.raises(ValueError, match="normalized"):
        PureState(np.array([1.0, 1.0]), (2,))
    PureState(np.array([1.0, 1e-10]), (2,))


def test_dims_must_match():
    with pytest.raises(ValueError):
        PureState(np.ones(4) / 2, (2, 3))
    with pytest.raises(ValueError):
        check_dims([1, 2])
    with pytest.raises(ValueError):
        check_dims([])


def test_density_invariants():
    with pytest.raises(ValueError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]), (2,))
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(np.eye(2), (2,))
    with pytest.raises(ValueError, match="semidefinite|PSD|negative"):
        DensityMatrix(np.array([[1.5, 0], [0, -0.5]]), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[np.nan, 0], [0, 1]]), (2,))
    # tiny asymmetry is repaired silently
    m = np.array([[0.5, 1e-11], [0.0, 0.5]])
    rho = DensityMatrix(m, (2,))
    assert np.allclose(rho.mat, rho.mat.conj().T, atol=0)


def test_bipartition_validation():
    assert bipartition((2, 2, 2), [2, 0]) == (0, 2)
    for bad in ([], [0, 1, 2], [5]):
        with pytest.raises(ValueError):
            bipartition((2, 2, 2), bad)
    assert len(all_bipartitions(3)) == 3
    assert len(all_bipartitions(4)) == 7


def test_partial_trace_bell():
    red = partial_trace(bell("bell_psi+").density(), [0])
    assert np.allclose(red.mat, np.eye(2) / 2)
    assert red.dims == (2,)


def test_partial_trace_product(rng):
    ra = random_density((2,), 2, rng)
    rb = random_density((3,), 2, rng)
    rho = DensityMatrix(np.kron(ra.mat, rb.mat), (2, 3))
    assert np.allclose(partial_trace(rho, [0]).mat, ra.mat, atol=1e-12)
    assert np.allclose(partial_trace(rho, [1]).mat, rb.mat, atol=1e-12)
    # reconstruct from reductions
    rebuilt = tensor_product(partial_trace(rho, [0]).mat, partial_trace(rho, [1]).mat)
    assert np.max(np.abs(rebuilt - rho.mat)) < 1e-9


def test_partial_trace_ghz():
    rho = ghz(3).density()
    for k in range(3):
        assert np.allclose(partial_trace(rho, [k]).mat, np.diag([0.5, 0.5]))


def test_partial_trace_empty_keep():
    with pytest.raises(ValueError):
        partial_trace(bell("bell_psi+").density(), [])


def test_partial_trace_order_of_kept(rng):
    rho = random_density((2, 3, 2), 3, rng)
    r02 = partial_trace(rho, [0, 2])
    assert r02.dims == (2, 2)
    assert abs(np.trace(r02.mat) - 1) < 1e-12


def test_partial_transpose_examples():
    prod_state = random_product_pure((2, 3), 4).density()
    assert np.linalg.eigvalsh(partial_transpose(prod_state, [0])).min() > -1e-12
    pt = partial_transpose(bell("bell_psi+").density(), [0])
    assert abs(np.linalg.eigvalsh(pt).min() + 0.5) < 1e-12
    assert np.linalg.eigvalsh(partial_transpose(rho2(0.5), [0])).min() > -1e-12


@settings(max_examples=25, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 2**32 - 1))
def test_partial_transpose_involution(dims, seed):
    rho = random_density(dims, 2, seed)
    once = partial_transpose(rho, [0])
    assert abs(np.trace(once) - 1) < 1e-12
    assert np.allclose(once, once.conj().T)
    # the partial transpose need not be a state, so wrap it without validation
    view = SimpleNamespace(mat=once, dims=rho.dims, dim=rho.dim)
    assert np.allclose(partial_transpose(view, [0]), rho.mat, atol=0)


@settings(max_examples=25, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 2**32 - 1))
def test_trace_chain(dims, seed):
    rho = random_density(dims, 3, seed)
    a = partial_trace(rho, [0])
    assert abs(np.trace(a.mat) - 1) < 1e-12
    rest = partial_trace(rho, list(range(1, len(dims))))
    assert abs(np.trace(rest.mat) - 1) < 1e-12


def test_hermitian_eig_examples():
    lam, _ = hermitian_eig(np.diag([0.7, 0.3]))
    assert np.allclose(lam, [0.3, 0.7])
    lam, vec = hermitian_eig(np.array([[0, 1], [1, 0]]))
    assert np.allclose(lam, [-1, 1])
    minus = np.array([1, -1]) / np.sqrt(2)
    plus = np.array([1, 1]) / np.sqrt(2)
    assert abs(abs(vec[:, 0] @ minus) - 1) < 1e-12
    assert abs(abs(vec[:, 1] @ plus) - 1) < 1e-12


def test_hermitian_eig_errors():
    with pytest.raises(ValueError):
        hermitian_eig(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
def test_spectral_roundtrip(n, seed):
    r = np.random.default_rng(seed)
    a = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    h = (a + a.conj().T) / 2
    lam, v = hermitian_eig(h)
    scale = max(1.0, np.linalg.norm(h))
    assert np.all(np.diff(lam) >= 0)
    assert np.max(np.abs(h @ v - v * lam)) < 1e-8 * scale
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) < 1e-8
    assert np.max(np.abs((v * lam) @ v.conj().T - h)) < 1e-8 * scale


@settings(max_examples=20, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 2**32 - 1))
def test_density_spectrum_is_distribution(dims, seed):
    rho = random_density(dims, 2, seed)
    lam, _ = hermitian_eig(rho.mat)
    assert abs(lam.sum() - 1) < 1e-8
    assert lam.min() >= -1e-8


def test_ordering_convention():
    # first party is most significant
    v = ket([1, 0, 2], (2, 2, 3))
    assert np.argmax(np.abs(v)) == 1 * 6 + 0 * 3 + 2


def test_permute_parties_roundtrip(rng):
    psi = random_pure((2, 3, 2), rng)
    moved = permute_parties(psi.vec, (2, 3, 2), (2, 0, 1))
    assert np.allclose(moved, np.einsum("abc->cab", psi.vec.reshape(2, 3, 2)).reshape(-1))
    back = permute_parties(moved, (2, 2, 3), (1, 2, 0))
    assert np.allclose(back, psi.vec)
