import itertools
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entcoh.bases import computational_cpb, product_cpb, random_cpb
from entcoh.catalog import bell_basis
from entcoh.coherence import coherence_pure
from entcoh.entanglement import random_product_pure, random_pure
from entcoh.entropy import OrthonormalBasis
from entcoh.locc import (
    Verdict,
    catalog_match,
    complete_product_extension,
    conditional_product_basis_to_basis,
    domino_basis,
    is_product_basis,
    local_factors,
    locc_distinguishable,
    product_extension_cpb,
    regroup,
    replay_protocol,
)
from entcoh.qmat import PureState, haar_unitary

HAD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def assert_distinguishable(basis):
    res = locc_distinguishable(basis)
    assert res.verdict == Verdict.DISTINGUISHABLE
    assert replay_protocol(res.certificate["protocol"], basis)


def apply_local(basis, unitaries):
    u = unitaries[0]
    for w in unitaries[1:]:
        u = np.kron(u, w)
    return OrthonormalBasis(u @ basis.vectors, basis.dims)


def test_is_product_basis():
    assert is_product_basis(OrthonormalBasis.computational((2, 3)))
    assert not is_product_basis(bell_basis())
    assert is_product_basis(domino_basis())


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (3, 3), (2, 2, 2), (2, 3, 2)])
def test_computational_distinguishable(dims):
    assert_distinguishable(OrthonormalBasis.computational(dims))


def test_bell_indistinguishable():
    res = locc_distinguishable(bell_basis())
    assert res.verdict == Verdict.INDISTINGUISHABLE
    assert res.certificate["reason"] == "entangled_element"
    assert res.certificate["index"] == 0


def test_single_entangled_element_never_unknown(rng):
    # computational basis with two elements rotated into a Bell pair
    v = np.eye(9, dtype=complex)
    v[:, [0, 4]] = v[:, [0, 4]] @ HAD
    res = locc_distinguishable(OrthonormalBasis(v, (3, 3)))
    assert res.verdict == Verdict.INDISTINGUISHABLE


def test_domino_not_distinguishable():
    res = locc_distinguishable(domino_basis())
    assert res.verdict != Verdict.DISTINGUISHABLE
    assert res.verdict == Verdict.INDISTINGUISHABLE
    assert res.certificate["name"] == "domino"
    assert sorted(res.certificate["no_partition_at"]) == list(range(9))


def test_domino_equivalents_matched(rng):
    base = domino_basis()
    for _ in range(5):
        perm = rng.permutation(9)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 9))
        moved = apply_local(base, [haar_unitary(3, rng), haar_unitary(3, rng)])
        shuffled = OrthonormalBasis(moved.vectors[:, perm] * phases, (3, 3))
        assert catalog_match(shuffled) == "domino"
        assert locc_distinguishable(shuffled).verdict == Verdict.INDISTINGUISHABLE
    swapped = OrthonormalBasis(
        np.column_stack([v.reshape(3, 3).T.reshape(-1) for v in base.elements()]), (3, 3)
    )
    assert catalog_match(swapped) == "domino"


def test_catalog_does_not_match_distinguishable():
    assert catalog_match(OrthonormalBasis.computational((3, 3))) is None


def test_random_cpbs_distinguishable_and_replayed():
    r = np.random.default_rng(100)
    t0 = time.perf_counter()
    for dims in [(2, 2), (2, 3), (3, 3), (2, 2, 2)]:
        for _ in range(100):
            assert_distinguishable(conditional_product_basis_to_basis(random_cpb(dims, r)))
    assert time.perf_counter() - t0 < 60


def test_verdict_invariant_under_relabeling_and_local_unitaries(rng):
    for dims in [(2, 3), (2, 2, 2)]:
        basis = random_cpb(dims, rng).expand()
        perm = rng.permutation(basis.vectors.shape[1])
        relabeled = OrthonormalBasis(basis.vectors[:, perm], dims)
        rotated = apply_local(basis, [haar_unitary(d, rng) for d in dims])
        for b in (relabeled, rotated):
            assert_distinguishable(b)
    for b in (bell_basis(), domino_basis()):
        rotated = apply_local(b, [haar_unitary(d, rng) for d in b.dims])
        assert locc_distinguishable(rotated).verdict == locc_distinguishable(b).verdict


def test_replay_rejects_wrong_protocol():
    basis = OrthonormalBasis.computational((2, 2))
    tree = locc_distinguishable(basis).certificate["protocol"]
    # the same tree cannot identify a basis rotated on the measured party
    rotated = apply_local(basis, [HAD, np.eye(2)] if tree["party"] == 0 else [np.eye(2), HAD])
    assert not replay_protocol(tree, rotated)


def test_cpb_to_basis_examples():
    assert np.allclose(conditional_product_basis_to_basis(computational_cpb((2, 2))).vectors, np.eye(4))
    hb = conditional_product_basis_to_basis(product_cpb((2, 2), [HAD, np.eye(2)]))
    expected = np.column_stack([np.kron(HAD[:, i], np.eye(2)[:, j]) for i in range(2) for j in range(2)])
    assert np.allclose(hb.vectors, expected)


def test_local_factors_roundtrip(rng):
    psi = random_product_pure((2, 3, 2), rng)
    f = local_factors(psi.vec, (2, 3, 2))
    assert np.allclose(np.kron(np.kron(f[0], f[1]), f[2]), psi.vec)
    with pytest.raises(ValueError):
        local_factors(random_pure((2, 2), rng).vec, (2, 2))


def test_product_extension_examples():
    e = np.eye(2)
    assert np.allclose(complete_product_extension(PureState(np.kron(e[0], e[0]), (2, 2))).vectors, np.eye(4))
    basis = complete_product_extension(PureState(np.kron(HAD[:, 0], e[0]), (2, 2)))
    expected = np.column_stack([np.kron(HAD[:, i], e[:, j]) for i in range(2) for j in range(2)])
    # same elements up to order and phase
    overlaps = np.abs(expected.conj().T @ basis.vectors)
    assert np.allclose(np.sort(overlaps, axis=0)[-1], 1)
    assert np.allclose(overlaps.sum(axis=0), 1)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dims=st.sampled_from([(3, 3), (2, 3), (2, 2, 2), (3, 2, 2)]))
def test_product_extension_properties(seed, dims):
    psi = random_product_pure(dims, seed)
    basis = complete_product_extension(psi)
    d = int(np.prod(dims))
    assert np.max(np.abs(basis.vectors[:, 0] - psi.vec)) < 1e-12
    assert np.max(np.abs(basis.vectors.conj().T @ basis.vectors - np.eye(d))) < 1e-8
    assert coherence_pure(psi, basis) < 1e-9
    assert_distinguishable(basis)


def test_product_extension_rejects_entangled(rng):
    with pytest.raises(ValueError):
        complete_product_extension(random_pure((2, 2), rng))


def test_extension_across_cut(rng):
    a = random_pure((2, 2), rng).vec
    b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    psi = PureState.normalized(np.kron(a, b), (2, 2, 2))
    cut = (0, 1)
    basis = complete_product_extension(psi, cut)
    assert np.allclose(basis.vectors[:, 0], psi.vec)
    assert coherence_pure(psi, basis) < 1e-9
    # entangled inside side A, so fully local analysis sees entanglement
    assert locc_distinguishable(basis).verdict == Verdict.INDISTINGUISHABLE
    res = locc_distinguishable(basis, cut)
    assert res.verdict == Verdict.DISTINGUISHABLE
    assert replay_protocol(res.certificate["protocol"], regroup(basis, cut))
    with pytest.raises(ValueError):
        complete_product_extension(psi, (0,))


def test_single_party_rejected():
    with pytest.raises(ValueError):
        locc_distinguishable(OrthonormalBasis.computational((4,)))


def test_nonadaptive_product_basis_with_two_rounds():
    # |0>|+>, |0>|->, |1>|0>, |1>|1>: B's basis depends on A's outcome
    e = np.eye(2)
    elems = [np.kron(e[0], HAD[:, 0]), np.kron(e[0], HAD[:, 1]), np.kron(e[1], e[0]), np.kron(e[1], e[1])]
    basis = OrthonormalBasis.from_elements(elems, (2, 2))
    res = locc_distinguishable(basis)
    assert res.verdict == Verdict.DISTINGUISHABLE
    assert res.certificate["protocol"]["party"] == 0
    for perm in itertools.permutations(range(4)):
        b = OrthonormalBasis.from_elements([elems[i] for i in perm], (2, 2))
        assert_distinguishable(b)
