"""Conditional product bases.

Parties measure one after another in ``order``; the first uses a fixed local
basis, each later party a basis that may depend on the outcomes announced so
far. Expanding every outcome chain gives a complete orthonormal product basis
that the parties can identify by one-way LOCC.

A "party" here may be a group of subsystems (e.g. side A of a cut), given by
``groups``; by default every subsystem is its own party.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .entropy import OrthonormalBasis
from .qmat import bipartition, check_dims, complement, haar_unitary, is_unitary, permute_parties


@dataclass(frozen=True, eq=False)
class ConditionalProductBasis:
    dims: tuple[int, ...]
    order: tuple[int, ...]
    first_local_basis: np.ndarray
    conditional_bases: dict[tuple[int, ...], np.ndarray] = field(default_factory=dict)
    groups: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        dims = check_dims(self.dims)
        groups = self.groups or tuple((k,) for k in range(len(dims)))
        groups = tuple(tuple(g) for g in groups)
        if sorted(k for g in groups for k in g) != list(range(len(dims))):
            raise ValueError(f"groups {groups} do not partition the {len(dims)} subsystems")
        if sorted(self.order) != list(range(len(groups))):
            raise ValueError(f"order {self.order} is not a permutation of the {len(groups)} parties")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "order", tuple(self.order))
        pd = self.ordered_party_dims
        if self.first_local_basis.shape != (pd[0], pd[0]) or not is_unitary(self.first_local_basis):
            raise ValueError("first local basis must be a unitary on the first party's space")
        for chain in itertools.product(*[range(d) for d in pd[:-1]]):
            for j in range(1, len(pd)):
                u = self.conditional_bases.get(chain[:j])
                if u is None or u.shape != (pd[j], pd[j]) or not is_unitary(u):
                    raise ValueError(f"missing or non-unitary conditional basis for outcome chain {chain[:j]}")

    @property
    def party_dims(self) -> tuple[int, ...]:
        return tuple(prod(self.dims[k] for k in g) for g in self.groups)

    @property
    def ordered_party_dims(self) -> tuple[int, ...]:
        pd = self.party_dims
        return tuple(pd[p] for p in self.order)

    def local_basis(self, chain: tuple[int, ...]) -> np.ndarray:
        return self.first_local_basis if not chain else self.conditional_bases[tuple(chain)]

    def chains(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*[range(d) for d in self.ordered_party_dims]))

    def expand(self) -> OrthonormalBasis:
        """Elements in lexicographic order of the outcome chain."""
        # subsystem layout when parties are concatenated in measurement order
        layout = tuple(k for p in self.order for k in self.groups[p])
        layout_dims = tuple(self.dims[k] for k in layout)
        back = tuple(layout.index(k) for k in range(len(self.dims)))
        cols = []
        for chain in self.chains():
            v = np.ones(1, complex)
            for j, i in enumerate(chain):
                v = np.kron(v, self.local_basis(chain[:j])[:, i])
            cols.append(permute_parties(v, layout_dims, back))
        return OrthonormalBasis(np.column_stack(cols), self.dims)


def cut_groups(dims: Sequence[int], split: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    a = bipartition(dims, split)
    return a, complement(len(dims), a)


def product_cpb(dims: Sequence[int], locals_: Sequence[np.ndarray], groups=None) -> ConditionalProductBasis:
    """Plain product basis: every party uses the same local basis on every branch."""
    dims = check_dims(dims)
    groups = groups or tuple((k,) for k in range(len(dims)))
    pd = [prod(dims[k] for k in g) for g in groups]
    cond = {}
    for j in range(1, len(pd)):
        for chain in itertools.product(*[range(d) for d in pd[:j]]):
            cond[chain] = np.asarray(locals_[j], complex)
    return ConditionalProductBasis(dims, tuple(range(len(pd))), np.asarray(locals_[0], complex), cond, groups)


def computational_cpb(dims: Sequence[int]) -> ConditionalProductBasis:
    dims = check_dims(dims)
    return product_cpb(dims, [np.eye(d, dtype=complex) for d in dims])


def random_cpb(
    dims: Sequence[int],
    rng: np.random.Generator,
    groups=None,
    order: Sequence[int] | None = None,
) -> ConditionalProductBasis:
    """Haar-random local unitaries on every branch; random measurement order unless given."""
    dims = check_dims(dims)
    groups = tuple(tuple(g) for g in (groups or tuple((k,) for k in range(len(dims)))))
    pd = [prod(dims[k] for k in g) for g in groups]
    order = tuple(rng.permutation(len(groups))) if order is None else tuple(order)
    opd = [pd[p] for p in order]
    first = haar_unitary(opd[0], rng)
    cond = {}
    for j in range(1, len(opd)):
        for chain in itertools.product(*[range(d) for d in opd[:j]]):
            cond[chain] = haar_unitary(opd[j], rng)
    return ConditionalProductBasis(dims, tuple(int(p) for p in order), first, cond, groups)
