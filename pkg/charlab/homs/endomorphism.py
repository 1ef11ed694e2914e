# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Homomorphisms between finite abelian groups as integer matrices.

A map Z_{d_1} x ... x Z_{d_r} -> Z_{e_1} x ... x Z_{e_s} is an s x r matrix A
with A[j][i] reduced mod e_j. It is well defined iff d_i * A[j][i] = 0 mod e_j,
i.e. A[j][i] = 0 mod e_j / gcd(d_i, e_j). Kernels, images and inverses are
solved over the integers; enumeration only appears in tests.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from charlab.errors import IllDefinedHomomorphism, InvalidArgument, NotInvertible
from charlab.group.abelian import Element, FiniteAbelianGroup, check_same_group
from charlab.group.lattice import integer_kernel, solve_integer
from charlab.group.subgroup import Subgroup, span

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Endomorphism:
    """A homomorphism domain -> codomain (an endomorphism when they agree)."""

    domain: FiniteAbelianGroup
    codomain: FiniteAbelianGroup
    matrix: tuple[tuple[int, ...], ...]

    def __repr__(self) -> str:
        return (f"Endomorphism({self.domain.literal()} -> {self.codomain.literal()}, "
                f"{[list(r) for r in self.matrix]})")

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.asarray(self.matrix, dtype=np.int64).reshape(self.codomain.rank, self.domain.rank)
        arr.setflags(write=False)
        return arr

    @property
    def is_endomorphism(self) -> bool:
        return self.domain == self.codomain

    def __call__(self, x: Sequence[int]) -> Element:
        return apply(self, x)

    def apply_array(self, xs: np.ndarray) -> np.ndarray:
        """Apply to an (..., domain.rank) array of reduced coordinates."""
        moduli = np.asarray(self.codomain.moduli, dtype=np.int64)
        return (np.asarray(xs, dtype=np.int64) @ self.array.T) % moduli

    @cached_property
    def index_map(self) -> np.ndarray:
        """index_map[k] = flat index of f(element k of the domain)."""
        table = self.codomain.flat_index(self.apply_array(self.domain.element_array))
        table.setflags(write=False)
        return table

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]


def make_hom(domain: FiniteAbelianGroup, codomain: FiniteAbelianGroup,
             matrix: Sequence[Sequence[int]]) -> Endomorphism:
    rows = [list(r) for r in matrix]
    if len(rows) != codomain.rank or any(len(r) != domain.rank for r in rows):
        raise InvalidArgument(
            f"matrix must be {codomain.rank}x{domain.rank} for "
            f"{domain.literal()} -> {codomain.literal()}, got {[len(r) for r in rows]}"
        )
    reduced = []
    for j, (row, e) in enumerate(zip(rows, codomain.moduli)):
        out = []
        for i, (a, d) in enumerate(zip(row, domain.moduli)):
            a = int(a) % e
            step = e // math.gcd(d, e)
            if a % step:
                raise IllDefinedHomomorphism(
                    j + 1, i + 1,
                    f"entry ({j + 1},{i + 1})={a} violates '≡0 mod {step}' "
                    f"(Z{d} -> Z{e} needs multiples of {step})",
                )
            out.append(a)
        reduced.append(tuple(out))
    return Endomorphism(domain, codomain, tuple(reduced))


def endomorphism(X: FiniteAbelianGroup, matrix: Sequence[Sequence[int]]) -> Endomorphism:
    return make_hom(X, X, matrix)


def identity(X: FiniteAbelianGroup) -> Endomorphism:
    return scalar(X, 1)


def scalar(X: FiniteAbelianGroup, k: int) -> Endomorphism:
    """Multiplication by the integer k, always well defined."""
    return make_hom(X, X, [[k if i == j else 0 for i in range(X.rank)] for j in range(X.rank)])


def zero_hom(domain: FiniteAbelianGroup, codomain: FiniteAbelianGroup) -> Endomorphism:
    return make_hom(domain, codomain, [[0] * domain.rank for _ in range(codomain.rank)])


def apply(f: Endomorphism, x: Sequence[int]) -> Element:
    x = f.domain.element(x)
    return tuple(
        sum(a * v for a, v in zip(row, x)) % e
        for row, e in zip(f.matrix, f.codomain.moduli)
    )


def adjoint(f: Endomorphism) -> Endomorphism:
    """The dual map with (f x, y) = (x, f~ y).

    Ã[i][j] = d_i * A[j][i] / e_j mod d_i, integral by the validity congruence.
    """
    d = f.domain.moduli
    e = f.codomain.moduli
    rows = []
    for i in range(f.domain.rank):
        row = []
        for j in range(f.codomain.rank):
            num = d[i] * f.matrix[j][i]
            if num % e[j]:
                raise AssertionError(f"adjoint entry ({i},{j}) not integral")
            row.append((num // e[j]) % d[i])
        rows.append(row)
    return make_hom(f.codomain, f.domain, rows)


def compose(f: Endomorphism, g: Endomorphism) -> Endomorphism:
    """f ∘ g."""
    check_same_group(g.codomain, f.domain, "composition groups")
    rows = [
        [sum(f.matrix[j][k] * g.matrix[k][i] for k in range(f.domain.rank))
         for i in range(g.domain.rank)]
        for j in range(f.codomain.rank)
    ]
    return make_hom(g.domain, f.codomain, rows)


def add(f: Endomorphism, g: Endomorphism) -> Endomorphism:
    check_same_group(f.domain, g.domain, "domains")
    check_same_group(f.codomain, g.codomain, "codomains")
    return make_hom(f.domain, f.codomain,
                    [[a + b for a, b in zip(r, s)] for r, s in zip(f.matrix, g.matrix)])


def subtract(f: Endomorphism, g: Endomorphism) -> Endomorphism:
    check_same_group(f.domain, g.domain, "domains")
    check_same_group(f.codomain, g.codomain, "codomains")
    return make_hom(f.domain, f.codomain,
                    [[a - b for a, b in zip(r, s)] for r, s in zip(f.matrix, g.matrix)])


def hstack(maps: Sequence[Endomorphism]) -> Endomorphism:
    """(x_1, ..., x_k) -> f_1 x_1 + ... + f_k x_k from domain^k."""
    first = maps[0]
    for f in maps[1:]:
        check_same_group(f.domain, first.domain, "stacked domains")
        check_same_group(f.codomain, first.codomain, "stacked codomains")
    rows = [sum((list(f.matrix[j]) for f in maps), []) for j in range(first.codomain.rank)]
    return make_hom(first.domain.power(len(maps)), first.codomain, rows)


def vstack(maps: Sequence[Endomorphism]) -> Endomorphism:
    """x -> (f_1 x, ..., f_k x) into codomain^k."""
    first = maps[0]
    for f in maps[1:]:
        check_same_group(f.domain, first.domain, "stacked domains")
        check_same_group(f.codomain, first.codomain, "stacked codomains")
    rows = [list(row) for f in maps for row in f.matrix]
    return make_hom(first.domain, first.codomain.power(len(maps)), rows)


def kernel(f: Endomorphism) -> Subgroup:
    """Solve A x + diag(e) w = 0 over Z and keep the x part."""
    r = f.domain.rank
    s = f.codomain.rank
    M = [list(f.matrix[j]) + [f.codomain.moduli[j] if k == j else 0 for k in range(s)]
         for j in range(s)]
    basis = integer_kernel(M, r + s)
    return span(f.domain, [v[:r] for v in basis])


def image(f: Endomorphism) -> Subgroup:
    cols = [[f.matrix[j][i] for j in range(f.codomain.rank)] for i in range(f.domain.rank)]
    return span(f.codomain, cols)


def preimage(f: Endomorphism, z: Sequence[int]) -> Optional[Element]:
    """Some x with f(x) = z, or None when z is outside the image."""
    z = f.codomain.element(z)
    r = f.domain.rank
    s = f.codomain.rank
    M = [list(f.matrix[j]) + [f.codomain.moduli[j] if k == j else 0 for k in range(s)]
         for j in range(s)]
    sol = solve_integer(M, list(z))
    if sol is None:
        return None
    return f.domain.reduce(sol[:r])


@dataclass(frozen=True)
class Classification:
    is_mono: bool
    is_epi: bool
    is_auto: bool
    inverse: Optional[Endomorphism] = None

    def to_json(self) -> dict:
        payload = {"is_mono": self.is_mono, "is_epi": self.is_epi, "is_auto": self.is_auto}
        if self.inverse is not None:
            payload["inverse"] = self.inverse.to_json()
        return payload


def inverse(f: Endomorphism) -> Endomorphism:
    if f.domain.order != f.codomain.order or not kernel(f).is_trivial():
        raise NotInvertible(f"{f!r} is not an automorphism")
    cols = []
    for j in range(f.codomain.rank):
        unit = tuple(int(k == j) % e for k, e in enumerate(f.codomain.moduli))
        x = preimage(f, unit)
        if x is None:
            raise NotInvertible(f"{f!r} misses {unit}")
        cols.append(x)
    g = make_hom(f.codomain, f.domain,
                 [[cols[j][i] for j in range(f.codomain.rank)] for i in range(f.domain.rank)])
    if compose(f, g).matrix != identity(f.codomain).matrix:
        raise AssertionError(f"inverse of {f!r} failed verification")
    return g


def classify(f: Endomorphism) -> Classification:
    is_mono = kernel(f).is_trivial()
    is_epi = image(f).is_full()
    is_auto = is_mono and is_epi
    inv = inverse(f) if is_auto else None
    return Classification(is_mono=is_mono, is_epi=is_epi, is_auto=is_auto, inverse=inv)
