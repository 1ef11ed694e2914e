# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Subgroups in canonical form.

A subgroup H of Z_{d_1} x ... x Z_{d_r} is stored as the Hermite normal form
of the lattice spanned by its generators together with the relation rows
d_j * e_j. That lattice has full rank, so the form is an r x r upper
triangular matrix B with b_jj | d_j, and two generating sets give the same B
exactly when they span the same subgroup. |H| = prod(d_j / b_jj).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from charlab.errors import InvalidArgument
from charlab.group.abelian import Element, FiniteAbelianGroup, check_same_group
from charlab.group.lattice import hermite_normal_form, upper_triangular_inverse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteAbelianGroup
    basis: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return math.prod(d // self.basis[j][j] for j, d in enumerate(self.parent.moduli))

    @property
    def generators(self) -> list[Element]:
        """Non-zero basis rows reduced into the parent group."""
        gens = [self.parent.reduce(row) for row in self.basis]
        return [g for g in gens if any(g)]

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_full(self) -> bool:
        return self.order == self.parent.order

    def contains(self, x: Sequence[int]) -> bool:
        rest = list(self.parent.reduce(x))
        for j, row in enumerate(self.basis):
            if rest[j] % row[j]:
                return False
            c = rest[j] // row[j]
            if c:
                rest = [u - c * v for u, v in zip(rest, row)]
        return True

    @cached_property
    def element_array(self) -> np.ndarray:
        """All elements as an (order, rank) array, lexicographically sorted."""
        moduli = np.asarray(self.parent.moduli, dtype=np.int64)
        ranges = [d // self.basis[j][j] for j, d in enumerate(self.parent.moduli)]
        coeffs = np.indices(ranges, dtype=np.int64).reshape(len(ranges), -1).T
        B = np.asarray(self.basis, dtype=np.int64) % moduli
        elems = (coeffs @ B) % moduli
        order = np.lexsort(elems.T[::-1])
        arr = elems[order]
        arr.setflags(write=False)
        return arr

    def elements(self) -> list[Element]:
        return [tuple(int(v) for v in row) for row in self.element_array]

    def smallest_nonzero(self) -> Optional[Element]:
        """Lexicographically smallest non-zero element, None when trivial."""
        if self.is_trivial():
            return None
        return tuple(int(v) for v in self.element_array[1])

    def random_element(self, rng: np.random.Generator) -> Element:
        ranges = [d // self.basis[j][j] for j, d in enumerate(self.parent.moduli)]
        coeffs = [int(rng.integers(0, n)) for n in ranges]
        total = [0] * self.parent.rank
        for c, row in zip(coeffs, self.basis):
            total = [u + c * v for u, v in zip(total, row)]
        return self.parent.reduce(total)

    def to_json(self) -> dict:
        return {
            "parent": self.parent.to_json(),
            "order": self.order,
            "generators": [list(g) for g in self.generators],
        }


def _canonical(parent: FiniteAbelianGroup, rows: Iterable[Sequence[int]]) -> Subgroup:
    r = parent.rank
    relations = [[d if i == j else 0 for i in range(r)] for j, d in enumerate(parent.moduli)]
    basis = hermite_normal_form(list(rows) + relations, r)
    return Subgroup(parent, tuple(tuple(row) for row in basis))


def subgroup_from_generators(X: FiniteAbelianGroup, gens: Iterable[Sequence[int]]) -> Subgroup:
    rows = []
    for g in gens:
        g = tuple(int(v) for v in g)
        if not X.contains(g):
            raise InvalidArgument(f"generator {g} is not an element of {X.literal()}")
        rows.append(g)
    return _canonical(X, rows)


def span(X: FiniteAbelianGroup, vectors: Iterable[Sequence[int]]) -> Subgroup:
    """Like subgroup_from_generators but reduces arbitrary integer vectors first."""
    return _canonical(X, [X.reduce(v) for v in vectors])


def trivial_subgroup(X: FiniteAbelianGroup) -> Subgroup:
    return _canonical(X, [])


def full_subgroup(X: FiniteAbelianGroup) -> Subgroup:
    return _canonical(X, [[int(i == j) for i in range(X.rank)] for j in range(X.rank)])


def subgroup_sum(G: Subgroup, H: Subgroup) -> Subgroup:
    check_same_group(G.parent, H.parent, "subgroup parents")
    return _canonical(G.parent, list(G.basis) + list(H.basis))


def annihilator(X: FiniteAbelianGroup, H: Subgroup) -> Subgroup:
    """A(X, H) = {x in X : (x, y) = 1 for every y in H}.

    With B the canonical basis of H, the annihilator lattice is spanned by the
    columns of diag(d) * B^-1; it is integral because H contains every
    relation row d_j * e_j.
    """
    check_same_group(X, H.parent, "annihilator moduli")
    inv = upper_triangular_inverse(H.basis)
    r = X.rank
    cols = []
    for c in range(r):
        col = []
        for i in range(r):
            v = X.moduli[i] * inv[i][c]
            if v.denominator != 1:
                raise AssertionError(f"non-integral annihilator generator at ({i}, {c})")
            col.append(int(v))
        cols.append(col)
    return _canonical(X, cols)


def subgroup_intersect(G: Subgroup, H: Subgroup) -> Subgroup:
    """G ∩ H = A(A(G) + A(H)), all exact."""
    check_same_group(G.parent, H.parent, "subgroup parents")
    X = G.parent
    return annihilator(X, subgroup_sum(annihilator(X, G), annihilator(X, H)))
