# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Finite differences and polynomial degree on finite groups.

Delta_h psi(y) = psi(y + h) - psi(y). psi is a polynomial of degree n when
Delta_h^{n+1} psi = 0 for every h, n minimal; the zero function has degree 0.
The multiplicative variant works on a nonvanishing f through its logarithm and
compares exp(...) with 1, so the branch of the logarithm never matters.

A periodic function is a logarithm read modulo 2*pi*i: its differences have
their imaginary parts reduced to [-pi, pi), so the principal log of a
character has degree 1.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from charlab.errors import InvalidArgument, VanishingCharacteristicFunction
from charlab.group.abelian import FiniteAbelianGroup, check_same_group, pairing_phases

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
EXHAUSTIVE_SHIFT_ORDER = 256


def wrap_phase(values: np.ndarray) -> np.ndarray:
    """Reduce imaginary parts to [-pi, pi)."""
    values = np.asarray(values, dtype=complex)
    return values.real + 1j * (np.remainder(values.imag + np.pi, 2 * np.pi) - np.pi)


@dataclass(frozen=True, eq=False)
class GroupFunction:
    group: FiniteAbelianGroup
    values: np.ndarray
    periodic: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.size != self.group.order:
            raise InvalidArgument(f"{values.size} values for a group of order {self.group.order}")
        if not np.all(np.isfinite(values)):
            raise InvalidArgument("group functions must take finite values")
        values = values.reshape(self.group.shape)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __add__(self, other: "GroupFunction") -> "GroupFunction":
        check_same_group(self.group, other.group)
        return GroupFunction(self.group, self.values + other.values, self.periodic or other.periodic)

    def __sub__(self, other: "GroupFunction") -> "GroupFunction":
        check_same_group(self.group, other.group)
        return GroupFunction(self.group, self.values - other.values, self.periodic or other.periodic)

    def scale(self, c: complex) -> "GroupFunction":
        return GroupFunction(self.group, c * self.values, self.periodic)

    def compose_index(self, index_map: np.ndarray, group: FiniteAbelianGroup) -> "GroupFunction":
        """psi ∘ g for a map g given by its flat index table on ``group``."""
        return GroupFunction(group, self.flat()[index_map], self.periodic)


def constant(group: FiniteAbelianGroup, c: complex) -> GroupFunction:
    return GroupFunction(group, np.full(group.shape, c, dtype=complex))


def character_function(group: FiniteAbelianGroup, x: Sequence[int]) -> GroupFunction:
    """y -> (x, y) as a function on the dual group."""
    x = np.asarray(group.element(x), dtype=np.int64)
    phases = pairing_phases(group, group.element_array, x[None, :])
    return GroupFunction(group, np.exp(2j * np.pi * phases / group.exponent))


def log_modulus(values: np.ndarray, group: FiniteAbelianGroup) -> GroupFunction:
    """psi(y) = log |f(y)| of a nonvanishing table."""
    modulus = np.abs(np.asarray(values).reshape(-1))
    if modulus.min() <= 0:
        raise VanishingCharacteristicFunction("log-modulus of a vanishing function", float(modulus.min()))
    return GroupFunction(group, np.log(modulus))


def complex_log(values: np.ndarray) -> np.ndarray:
    """Principal logarithm log|f| + i arg f, elementwise."""
    values = np.asarray(values, dtype=complex)
    return np.log(np.abs(values)) + 1j * np.angle(values)


def phase_log(values: np.ndarray, group: FiniteAbelianGroup) -> GroupFunction:
    """psi = log f of a nonvanishing table, periodic in its imaginary part."""
    values = np.asarray(values, dtype=complex).reshape(-1)
    lowest = float(np.min(np.abs(values)))
    if lowest <= 0:
        raise VanishingCharacteristicFunction("logarithm of a vanishing function", lowest)
    return GroupFunction(group, complex_log(values), periodic=True)


def difference(psi: GroupFunction, h: Sequence[int]) -> GroupFunction:
    Y = psi.group
    h = Y.element(h)
    shifted = psi.values
    for axis, step in enumerate(h):
        if step:
            shifted = np.roll(shifted, -step, axis=axis)
    out = shifted - psi.values
    return GroupFunction(Y, wrap_phase(out) if psi.periodic else out, psi.periodic)


def shift_family(group: FiniteAbelianGroup, exhaustive: Optional[bool] = None) -> np.ndarray:
    """Flat indices of the shifts used by degree searches.

    The unit vectors plus their pairwise sums; every element when the group is
    small enough (or when asked).
    """
    if exhaustive is None:
        exhaustive = group.order <= EXHAUSTIVE_SHIFT_ORDER
    if exhaustive:
        return np.arange(1, group.order)
    r = group.rank
    units = [tuple(int(i == j) for i in range(r)) for j in range(r)]
    shifts = set()
    for u in units:
        shifts.add(group.reduce(u))
    for u, v in itertools.combinations_with_replacement(units, 2):
        shifts.add(group.add(group.reduce(u), group.reduce(v)))
    shifts.discard(group.zero())
    return np.asarray(sorted(group.index(s) for s in shifts), dtype=np.int64)


def _shift_tables(group: FiniteAbelianGroup, shifts: np.ndarray) -> np.ndarray:
    """tables[k, y] = flat index of y + shift_k."""
    if group.order <= 4096:
        return group.add_table[shifts]
    moduli = np.asarray(group.moduli, dtype=np.int64)
    els = group.element_array
    steps = group.element_array[shifts]
    return group.flat_index((els[None, :, :] + steps[:, None, :]) % moduli)


def _degree_search(group: FiniteAbelianGroup, values: np.ndarray, tol: float,
                   multiplicative: bool, exhaustive: Optional[bool],
                   periodic: bool = False) -> tuple[Optional[int], float]:
    """Smallest n with Delta_h^{n+1} small for every shift; (None, last residual) otherwise."""
    shifts = shift_family(group, exhaustive)
    if shifts.size == 0:
        return 0, 0.0
    tables = _shift_tables(group, shifts)
    rows = np.arange(shifts.size)[:, None]
    current = np.broadcast_to(np.asarray(values, dtype=complex).reshape(-1), tables.shape).copy()
    residual = float("inf")
    with np.errstate(all="ignore"):
        for n in range(group.order + 1):
            current = current[rows, tables] - current
            if not np.all(np.isfinite(current)):
                return None, float("inf")
            if periodic:
                current = wrap_phase(current)
            if multiplicative:
                residual = float(np.max(np.abs(np.exp(current) - 1.0)))
            else:
                residual = float(np.max(np.abs(current)))
            if residual <= tol:
                return n, residual
    return None, residual


def polynomial_degree(psi: GroupFunction, tol: float = DEFAULT_TOL,
                      exhaustive: Optional[bool] = None) -> Optional[int]:
    degree, _ = _degree_search(psi.group, psi.values, tol, False, exhaustive, psi.periodic)
    return degree


def multiplicative_degree(group: FiniteAbelianGroup, values: np.ndarray, tol: float = DEFAULT_TOL,
                          exhaustive: Optional[bool] = None) -> tuple[Optional[int], float]:
    """Smallest n with every (n+1)-fold multiplicative difference of f equal to 1."""
    values = np.asarray(values, dtype=complex).reshape(-1)
    lowest = float(np.min(np.abs(values)))
    if lowest <= tol:
        raise VanishingCharacteristicFunction(
            f"multiplicative differences need a nonvanishing function (min |f| = {lowest:.3g})", lowest
        )
    return _degree_search(group, complex_log(values), tol, True, exhaustive)
