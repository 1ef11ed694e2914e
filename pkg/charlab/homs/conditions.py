# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Coefficient systems of linear forms and the conditions placed on them.

The forms are L_j = alpha_j1 xi_1 + ... + alpha_jn xi_n, j = 1..m, with every
alpha an endomorphism of one group X. For column i the diagonal-image subgroup
G_i = {(alpha_1i x, ..., alpha_mi x)} lives in X^m. The "pairwise trivial
intersection" condition asks G_i ∩ G_l = {0} for i != l; for automorphism
coefficients it is equivalent to a kernel-intersection condition on the
differences alpha_ki^-1 alpha_kl - alpha_pi^-1 alpha_pl.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence, Union

from charlab.errors import InvalidArgument, PreconditionViolated
from charlab.group.abelian import Element, FiniteAbelianGroup, group_from_json
from charlab.group.subgroup import Subgroup, full_subgroup, subgroup_intersect
from charlab.homs.endomorphism import (
    Endomorphism,
    adjoint,
    classify,
    compose,
    endomorphism,
    hstack,
    image,
    inverse,
    kernel,
    make_hom,
    scalar,
    subtract,
    vstack,
)

logger = logging.getLogger(__name__)

AlphaSpec = Union[int, Sequence[Sequence[int]]]


@dataclass(frozen=True)
class CoefficientSystem:
    group: FiniteAbelianGroup
    alphas: tuple[tuple[Endomorphism, ...], ...]

    def __post_init__(self):
        if not self.alphas or not self.alphas[0]:
            raise InvalidArgument("a coefficient system needs m >= 1 forms and n >= 1 variables")
        n = len(self.alphas[0])
        for j, row in enumerate(self.alphas):
            if len(row) != n:
                raise InvalidArgument(f"form {j + 1} has {len(row)} coefficients, expected {n}")
            for f in row:
                if f.domain != self.group or f.codomain != self.group:
                    raise InvalidArgument(
                        f"coefficient {f!r} is not an endomorphism of {self.group.literal()}"
                    )

    @property
    def m(self) -> int:
        return len(self.alphas)

    @property
    def n(self) -> int:
        return len(self.alphas[0])

    def column(self, i: int) -> list[Endomorphism]:
        return [self.alphas[j][i] for j in range(self.m)]

    def column_embedding(self, i: int) -> Endomorphism:
        """x -> (alpha_1i x, ..., alpha_mi x), X -> X^m; its image is G_i."""
        return vstack(self.column(i))

    def column_form(self, i: int) -> Endomorphism:
        """(y_1, ..., y_m) -> alpha_1i y_1 + ... + alpha_mi y_m, X^m -> X."""
        return hstack(self.column(i))

    def forms_map(self) -> Endomorphism:
        """(xi_1, ..., xi_n) -> (L_1, ..., L_m), X^n -> X^m."""
        X = self.group
        rows = []
        for j in range(self.m):
            for k in range(X.rank):
                rows.append([v for f in self.alphas[j] for v in f.matrix[k]])
        return make_hom(X.power(self.n), X.power(self.m), rows)

    def adjoint_system(self) -> "CoefficientSystem":
        """Same grid with every entry replaced by its adjoint a_ji."""
        return CoefficientSystem(self.group, tuple(tuple(adjoint(f) for f in row) for row in self.alphas))

    def select_columns(self, columns: Sequence[int]) -> "CoefficientSystem":
        return CoefficientSystem(self.group, tuple(tuple(row[i] for i in columns) for row in self.alphas))

    def to_json(self) -> dict[str, Any]:
        return {
            "group": self.group.to_json(),
            "m": self.m,
            "n": self.n,
            "alphas": [[f.to_json() for f in row] for row in self.alphas],
        }


def _alpha(X: FiniteAbelianGroup, coeff: Any) -> Endomorphism:
    if isinstance(coeff, Endomorphism):
        return coeff
    if isinstance(coeff, bool):
        raise InvalidArgument(f"coefficient {coeff!r} is neither an integer nor a matrix")
    if isinstance(coeff, int):
        return scalar(X, coeff)
    if isinstance(coeff, (list, tuple)) and coeff and all(isinstance(r, (list, tuple)) for r in coeff):
        return endomorphism(X, coeff)
    raise InvalidArgument(f"coefficient {coeff!r} is neither an integer nor a matrix")


def make_system(X: FiniteAbelianGroup, alphas: Sequence[Sequence[AlphaSpec]]) -> CoefficientSystem:
    """Build a system from an m x n grid of integers (scalar maps) or matrices."""
    if not isinstance(alphas, (list, tuple)) or not alphas:
        raise InvalidArgument("alphas must be a non-empty m x n grid")
    grid = []
    for row in alphas:
        if not isinstance(row, (list, tuple)):
            raise InvalidArgument(f"alphas row {row!r} is not a list")
        grid.append(tuple(_alpha(X, coeff) for coeff in row))
    return CoefficientSystem(X, tuple(grid))


def from_integers(X: FiniteAbelianGroup, grid: Sequence[Sequence[int]]) -> CoefficientSystem:
    """Integer coefficients k_ji acting as multiplication maps."""
    for row in grid:
        for k in row:
            if isinstance(k, bool) or not isinstance(k, int):
                raise InvalidArgument(f"integer coefficient expected, got {k!r}")
    return make_system(X, grid)


def system_from_json(obj: dict[str, Any]) -> CoefficientSystem:
    X = group_from_json(obj["group"])
    cs = make_system(X, obj["alphas"])
    if "m" in obj and obj["m"] != cs.m:
        raise InvalidArgument(f"m={obj['m']} disagrees with {cs.m} rows of alphas")
    if "n" in obj and obj["n"] != cs.n:
        raise InvalidArgument(f"n={obj['n']} disagrees with {cs.n} columns of alphas")
    return cs


def scalar_coprime(k: int, X: FiniteAbelianGroup) -> bool:
    return all(math.gcd(k, d) == 1 for d in X.moduli)


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    witness: Optional[Element] = None
    pair: Optional[tuple[int, int]] = None

    def to_json(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"holds": self.holds}
        if self.witness is not None:
            payload["witness"] = list(self.witness)
            payload["pair"] = [self.pair[0] + 1, self.pair[1] + 1]
        return payload


def _require_monomorphisms(cs: CoefficientSystem) -> None:
    for j, row in enumerate(cs.alphas):
        for i, f in enumerate(row):
            if not kernel(f).is_trivial():
                raise PreconditionViolated(
                    f"alpha_{j + 1}{i + 1} = {f.to_json()} is not a monomorphism of {cs.group.literal()}"
                )


def _require_automorphisms(cs: CoefficientSystem) -> list[list[Endomorphism]]:
    inverses = []
    for j, row in enumerate(cs.alphas):
        inv_row = []
        for i, f in enumerate(row):
            c = classify(f)
            if not c.is_auto:
                raise PreconditionViolated(
                    f"alpha_{j + 1}{i + 1} = {f.to_json()} is not an automorphism of {cs.group.literal()}"
                )
            inv_row.append(c.inverse)
        inverses.append(inv_row)
    return inverses


def diagonal_subgroups(cs: CoefficientSystem) -> list[Subgroup]:
    return [image(cs.column_embedding(i)) for i in range(cs.n)]


def check_condition_11(cs: CoefficientSystem) -> ConditionReport:
    """G_i ∩ G_l = {0} for all i != l, first failing pair short-circuits."""
    _require_monomorphisms(cs)
    subgroups = diagonal_subgroups(cs)
    for i, l in itertools.combinations(range(cs.n), 2):
        meet = subgroup_intersect(subgroups[i], subgroups[l])
        if not meet.is_trivial():
            witness = meet.smallest_nonzero()
            logger.debug("G_%d ∩ G_%d has order %d, witness %s", i + 1, l + 1, meet.order, witness)
            return ConditionReport(False, witness, (i, l))
    return ConditionReport(True)


def pair_kernel(cs: CoefficientSystem, i: int, l: int,
                inverses: Optional[list[list[Endomorphism]]] = None) -> Subgroup:
    """∩_{k,p} Ker(alpha_ki^-1 alpha_kl - alpha_pi^-1 alpha_pl)."""
    if inverses is None:
        inverses = [[inverse(f) for f in row] for row in cs.alphas]
    ratios = [compose(inverses[k][i], cs.alphas[k][l]) for k in range(cs.m)]
    meet = full_subgroup(cs.group)
    for k, p in itertools.combinations(range(cs.m), 2):
        meet = subgroup_intersect(meet, kernel(subtract(ratios[k], ratios[p])))
        if meet.is_trivial():
            break
    return meet


def check_condition_12(cs: CoefficientSystem) -> ConditionReport:
    inverses = _require_automorphisms(cs)
    for i, l in itertools.combinations(range(cs.n), 2):
        meet = pair_kernel(cs, i, l, inverses)
        if not meet.is_trivial():
            return ConditionReport(False, meet.smallest_nonzero(), (i, l))
    return ConditionReport(True)


def two_form_system(X: FiniteAbelianGroup, alphas: Sequence[AlphaSpec]) -> CoefficientSystem:
    """L_1 = xi_1 + ... + xi_n, L_2 = alpha_1 xi_1 + ... + alpha_n xi_n."""
    return make_system(X, [[1] * len(alphas), list(alphas)])


def check_condition_12_two_forms(X: FiniteAbelianGroup, alphas: Sequence[AlphaSpec]) -> ConditionReport:
    """Two-form case: Ker(alpha_i - alpha_l) = {0} for every i != l."""
    cs = two_form_system(X, alphas)
    _require_automorphisms(cs)
    row = cs.alphas[1]
    for i, l in itertools.combinations(range(cs.n), 2):
        ker = kernel(subtract(row[i], row[l]))
        if not ker.is_trivial():
            return ConditionReport(False, ker.smallest_nonzero(), (i, l))
    return ConditionReport(True)


@dataclass(frozen=True)
class CollinearityReduction:
    classes: list[list[int]]
    scalars: list[Fraction]
    reduced_vectors: list[tuple[Fraction, ...]]
    representatives: list[int] = field(default_factory=list)

    def class_of(self, i: int) -> int:
        return next(c for c, members in enumerate(self.classes) if i in members)

    def to_json(self) -> dict[str, Any]:
        return {
            "classes": [[i + 1 for i in members] for members in self.classes],
            "scalars": [str(c) for c in self.scalars],
            "reduced_vectors": [[str(v) for v in vec] for vec in self.reduced_vectors],
        }


def _as_fractions(v: Sequence[Any]) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in v)


def collinearity_reduction(vectors: Sequence[Sequence[Any]]) -> CollinearityReduction:
    """Group rational vectors into maximal collinear classes.

    The first member of each class is its representative; scalars[i] is the
    exact c with vectors[i] = c * representative.
    """
    vecs = [_as_fractions(v) for v in vectors]
    for idx, v in enumerate(vecs):
        if not any(v):
            raise InvalidArgument(f"vector {idx + 1} is zero")
        if len(v) != len(vecs[0]):
            raise InvalidArgument("vectors must share one length")

    classes: list[list[int]] = []
    scalars: list[Fraction] = [Fraction(0)] * len(vecs)
    for idx, v in enumerate(vecs):
        for members in classes:
            rep = vecs[members[0]]
            if all(a * d == b * c for (a, b), (c, d) in itertools.combinations(zip(v, rep), 2)):
                k = next(t for t, b in enumerate(rep) if b)
                scalars[idx] = v[k] / rep[k]
                members.append(idx)
                break
        else:
            classes.append([idx])
            scalars[idx] = Fraction(1)
    reps = [members[0] for members in classes]
    return CollinearityReduction(
        classes=classes,
        scalars=scalars,
        reduced_vectors=[vecs[r] for r in reps],
        representatives=reps,
    )
