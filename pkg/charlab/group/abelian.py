# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Finite abelian groups Z_{d_1} x ... x Z_{d_r} in user coordinates.

A group is its moduli tuple. The character group uses the same moduli
(self-dual coordinates), so X and Y are the same Python object type and the
pairing is (x, y) = exp(2*pi*i * sum_j x_j y_j / d_j).

Element tables are numpy arrays whose shape is the moduli tuple; flat indices
follow C order, which is lexicographic order on coordinate tuples.
"""

from __future__ import annotations

import cmath
import itertools
import logging
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterator, Sequence

import numpy as np
from sympy import divisors

from charlab.errors import InvalidArgument
from charlab.group.lattice import diagonal_invariants

logger = logging.getLogger(__name__)

Element = tuple[int, ...]

_LITERAL_RE = re.compile(r"^z(\d+)(?:x(?:z)?(\d+))*$")


@dataclass(frozen=True)
class FiniteAbelianGroup:
    moduli: tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(self.moduli)
        if not moduli:
            raise InvalidArgument("a group needs at least one modulus (use [1] for the trivial group)")
        for d in moduli:
            if isinstance(d, bool) or int(d) != d or int(d) < 1:
                raise InvalidArgument(f"moduli must be positive integers, got {d!r}")
        object.__setattr__(self, "moduli", tuple(int(d) for d in moduli))

    def __repr__(self) -> str:
        return f"FiniteAbelianGroup({self.literal()})"

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.moduli

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.moduli)

    def zero(self) -> Element:
        return (0,) * self.rank

    def literal(self) -> str:
        return "x".join(f"Z{d}" for d in self.moduli)

    def to_json(self) -> dict[str, Any]:
        return {"moduli": list(self.moduli)}

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.rank and all(0 <= int(v) < d for v, d in zip(x, self.moduli))

    def element(self, x: Sequence[int]) -> Element:
        """Validate an already-reduced element."""
        if not self.contains(x):
            raise InvalidArgument(f"{tuple(x)} is not an element of {self.literal()}")
        return tuple(int(v) for v in x)

    def reduce(self, x: Sequence[int]) -> Element:
        if len(x) != self.rank:
            raise InvalidArgument(
                f"element {tuple(x)} has {len(x)} coordinates, {self.literal()} has {self.rank}"
            )
        return tuple(int(v) % d for v, d in zip(x, self.moduli))

    def add(self, x: Sequence[int], y: Sequence[int]) -> Element:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.moduli))

    def neg(self, x: Sequence[int]) -> Element:
        return tuple((-a) % d for a, d in zip(x, self.moduli))

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.moduli))

    def index(self, x: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(int(v) for v in x), self.shape))

    def from_index(self, i: int) -> Element:
        return tuple(int(v) for v in np.unravel_index(int(i), self.shape))

    @cached_property
    def element_array(self) -> np.ndarray:
        """All elements as an (order, rank) int64 array in lexicographic order."""
        grids = np.indices(self.shape, dtype=np.int64)
        arr = grids.reshape(self.rank, -1).T.copy()
        arr.setflags(write=False)
        return arr

    def flat_index(self, coords: np.ndarray) -> np.ndarray:
        """Flat indices of an (..., rank) array of reduced coordinates."""
        coords = np.asarray(coords, dtype=np.int64)
        return np.ravel_multi_index(tuple(np.moveaxis(coords, -1, 0)), self.shape)

    @cached_property
    def add_table(self) -> np.ndarray:
        """add_table[a, b] = flat index of element a + element b."""
        els = self.element_array
        moduli = np.asarray(self.moduli, dtype=np.int64)
        summed = (els[:, None, :] + els[None, :, :]) % moduli
        table = self.flat_index(summed)
        table.setflags(write=False)
        return table

    @cached_property
    def neg_index(self) -> np.ndarray:
        moduli = np.asarray(self.moduli, dtype=np.int64)
        table = self.flat_index((-self.element_array) % moduli)
        table.setflags(write=False)
        return table

    def power(self, k: int) -> "FiniteAbelianGroup":
        """The product group (self)^k, coordinates concatenated block by block."""
        if k < 1:
            raise InvalidArgument(f"power must be >= 1, got {k}")
        return FiniteAbelianGroup(self.moduli * k)

    def split(self, x: Sequence[int], k: int) -> list[Element]:
        """Split an element of self^k back into its k blocks."""
        r = self.rank
        return [tuple(x[b * r:(b + 1) * r]) for b in range(k)]

    def invariant_factors(self) -> list[int]:
        return invariant_factors(self)


def make_group(moduli: Sequence[int]) -> FiniteAbelianGroup:
    return FiniteAbelianGroup(tuple(moduli))


def parse_group(literal: str) -> FiniteAbelianGroup:
    """Parse "Z2xZ4" (case-insensitive) into a group."""
    text = re.sub(r"\s+", "", str(literal)).lower()
    if not _LITERAL_RE.match(text):
        raise InvalidArgument(f"cannot parse group literal {literal!r}; expected e.g. 'Z2xZ4'")
    moduli = [int(part.lstrip("z")) for part in text.split("x")]
    return make_group(moduli)


def group_from_json(obj: Any) -> FiniteAbelianGroup:
    if isinstance(obj, str):
        return parse_group(obj)
    if isinstance(obj, dict) and "moduli" in obj:
        return make_group(obj["moduli"])
    if isinstance(obj, (list, tuple)):
        return make_group(obj)
    raise InvalidArgument(f"cannot read a group from {obj!r}")


def check_same_group(a: FiniteAbelianGroup, b: FiniteAbelianGroup, what: str = "groups") -> None:
    if a.moduli != b.moduli:
        raise InvalidArgument(f"{what} differ: {a.literal()} vs {b.literal()}")


def pairing(X: FiniteAbelianGroup, x: Sequence[int], y: Sequence[int]) -> complex:
    """Value of the character y at x; both must be reduced elements of X."""
    x = X.element(x)
    y = X.element(y)
    L = X.exponent
    phase = sum(a * b * (L // d) for a, b, d in zip(x, y, X.moduli)) % L
    return cmath.exp(2j * cmath.pi * phase / L)


def pairing_phases(X: FiniteAbelianGroup, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Integer phases p with (x, y) = exp(2*pi*i * p / exponent), broadcast over rows."""
    L = X.exponent
    weights = np.asarray([L // d for d in X.moduli], dtype=np.int64)
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    return np.sum((xs * ys % np.asarray(X.moduli)) * weights, axis=-1) % L


def invariant_factors(X: FiniteAbelianGroup) -> list[int]:
    """Invariant factors d_1 | d_2 | ... of X; [] for the trivial group."""
    return diagonal_invariants(list(X.moduli))


def is_isomorphic(X: FiniteAbelianGroup, Z: FiniteAbelianGroup) -> bool:
    return invariant_factors(X) == invariant_factors(Z)


def _chains(n: int, prev: int) -> Iterator[list[int]]:
    if n == 1:
        yield []
        return
    for d in divisors(n):
        if d > 1 and d % prev == 0:
            for tail in _chains(n // d, d):
                if not tail or tail[0] % d == 0:
                    yield [d] + tail


def catalog(max_order: int) -> list[list[int]]:
    """Every abelian group of order <= max_order, once per isomorphism class.

    Groups are given as invariant-factor moduli lists, ordered by order and
    then lexicographically; the trivial group is [1].
    """
    if max_order < 1:
        raise InvalidArgument(f"max order must be >= 1, got {max_order}")
    out: list[list[int]] = [[1]]
    for n in range(2, max_order + 1):
        out.extend(sorted(_chains(n, 1)))
    logger.debug("catalog up to order %d: %d groups", max_order, len(out))
    return out
