# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Membership in D_{m,k}.

A joint characteristic function f on Y^m is in D_{m,k} when it factors into
functions each depending on at most k of the m dual variables. For a
nonvanishing f that is equivalent to: every multiplicative mixed difference
taken in k+1 of the variables equals 1. The test is run on the principal
logarithm and compared through exp(.) - 1, so branch cuts cancel.

Factor tables are reported from an averaging (ANOVA) decomposition of the
principal logarithm; when the dropped high-order part does not exponentiate
to 1 the factors are withheld with reason "log-holonomy".
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

import numpy as np

from charlab import config as runtime_config
from charlab.dist.distribution import JointCharFunction
from charlab.errors import InvalidArgument, VanishingCharacteristicFunction
from charlab.feq.differences import complex_log, wrap_phase
from charlab.group.abelian import FiniteAbelianGroup

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
LOG_HOLONOMY = "log-holonomy"

Subset = tuple[int, ...]


def _placed(arr: np.ndarray, positions: tuple[int, ...], ndim: int) -> np.ndarray:
    """View ``arr`` with its axes sitting at ``positions`` of an ndim grid."""
    shape = [1] * ndim
    for p, size in zip(positions, arr.shape):
        shape[p] = size
    return arr.reshape(shape)


class MixedDifferencePlan:
    """Gather indices for the (k+1)-variable mixed differences on Y^m.

    Built once per (group, m, k) and reused across evaluations, which is what
    the residual search does thousands of times.
    """

    def __init__(self, group: FiniteAbelianGroup, m: int, k: int, max_table: Optional[int] = None):
        if not 1 <= k <= m:
            raise InvalidArgument(f"k must lie in [1, m] = [1, {m}], got {k}")
        self.group = group
        self.m = m
        self.k = k
        self.N = group.order
        self.max_table = max_table or runtime_config.load().max_table
        self.subsets: list[Subset] = list(itertools.combinations(range(m), k + 1)) if k < m else []
        self._add = group.add_table
        s = k + 1
        # fix leading y-variables until one gather fits in max_table
        self.fixed = 0
        while self.fixed < m and self.N ** (m - self.fixed + s) > self.max_table:
            self.fixed += 1
        self._cached = None
        if self.fixed == 0:
            self._cached = {S: list(self._terms(S, ())) for S in self.subsets}

    def _terms(self, S: Subset, prefix: tuple[int, ...]) -> Iterator[tuple[int, tuple]]:
        m, N, c = self.m, self.N, len(prefix)
        s = len(S)
        ndim = (m - c) + s
        arange = np.arange(N)
        for eps in itertools.product((0, 1), repeat=s):
            sign = -1 if (s - sum(eps)) % 2 else 1
            idx = []
            for b in range(m):
                shifted = b in S and eps[S.index(b)]
                h_pos = (m - c) + S.index(b) if b in S else None
                if b < c:
                    if shifted:
                        idx.append(_placed(self._add[prefix[b]], (h_pos,), ndim))
                    else:
                        idx.append(prefix[b])
                else:
                    if shifted:
                        idx.append(_placed(self._add, (b - c, h_pos), ndim))
                    else:
                        idx.append(_placed(arange, (b - c,), ndim))
            yield sign, tuple(idx)

    def _subset_residual(self, logs: np.ndarray, S: Subset) -> float:
        worst = 0.0
        if self._cached is not None:
            prefixes: Any = [()]
        else:
            prefixes = itertools.product(range(self.N), repeat=self.fixed)
        for prefix in prefixes:
            terms = self._cached[S] if self._cached is not None else self._terms(S, prefix)
            total = None
            for sign, idx in terms:
                part = logs[idx]
                if total is None:
                    total = part if sign > 0 else -part
                else:
                    total = total + part if sign > 0 else total - part
            worst = max(worst, float(np.max(np.abs(np.exp(total) - 1.0))))
        return worst

    def residual(self, logs: np.ndarray) -> float:
        """Max |exp(mixed difference of logs) - 1| over all (k+1)-subsets."""
        logs = np.asarray(logs).reshape((self.N,) * self.m)
        worst = 0.0
        with np.errstate(all="ignore"):
            for S in self.subsets:
                worst = max(worst, self._subset_residual(logs, S))
        return worst

    def batch_residual(self, logs: np.ndarray) -> np.ndarray:
        """Row-wise ``residual`` of a (B, N^m) stack; each row's value ignores the others."""
        logs = np.asarray(logs).reshape((-1,) + (self.N,) * self.m)
        out = np.zeros(logs.shape[0])
        if not self.subsets:
            return out
        if self._cached is None:
            return np.array([self.residual(row) for row in logs])
        s = self.k + 1
        rows = max(1, self.max_table // self.N ** (self.m + s))
        with np.errstate(all="ignore"):
            for start in range(0, logs.shape[0], rows):
                block = logs[start:start + rows]
                worst = np.zeros(block.shape[0])
                for S in self.subsets:
                    total = None
                    for sign, idx in self._cached[S]:
                        part = block[(slice(None),) + idx]
                        if total is None:
                            total = part if sign > 0 else -part
                        else:
                            total = total + part if sign > 0 else total - part
                    gap = np.abs(np.exp(total) - 1.0).reshape(block.shape[0], -1).max(axis=1)
                    worst = np.maximum(worst, gap)
                out[start:start + rows] = worst
        return out


@dataclass(frozen=True, eq=False)
class DmkReport:
    member: bool
    residual: float
    k: int
    factors: Optional[dict[Subset, np.ndarray]] = None
    reason: Optional[str] = None
    reconstruction_error: Optional[float] = field(default=None)

    def to_json(self, include_tables: bool = False) -> dict[str, Any]:
        payload: dict[str, Any] = {"member": self.member, "residual": self.residual, "k": self.k}
        if self.factors is not None:
            payload["factors"] = [
                {
                    "coords": [b + 1 for b in S],
                    **({"values": [[float(v.real), float(v.imag)] for v in table.reshape(-1)]}
                       if include_tables else {"size": int(table.size)}),
                }
                for S, table in self.factors.items()
            ]
        if self.reason is not None:
            payload["reason"] = self.reason
        return payload


def _check_nonvanishing(values: np.ndarray, tol: float) -> None:
    lowest = float(np.min(np.abs(values)))
    if lowest <= tol:
        raise VanishingCharacteristicFunction(
            f"joint characteristic function vanishes (min |f| = {lowest:.3g})", lowest
        )


def _anova_components(logs: np.ndarray, m: int) -> dict[Subset, np.ndarray]:
    """c_T for every T, each broadcastable against the (N,)*m grid."""
    means: dict[Subset, np.ndarray] = {}
    for size in range(m + 1):
        for U in itertools.combinations(range(m), size):
            rest = tuple(b for b in range(m) if b not in U)
            means[U] = logs.mean(axis=rest, keepdims=True) if rest else logs
    components = {}
    for size in range(m + 1):
        for T in itertools.combinations(range(m), size):
            acc = 0
            for usize in range(size + 1):
                for U in itertools.combinations(T, usize):
                    sign = -1 if (size - usize) % 2 else 1
                    acc = acc + sign * means[U]
            components[T] = np.asarray(acc)
    return components


def _factor_tables(f: JointCharFunction, k: int, tol: float) -> tuple[Optional[dict], Optional[float]]:
    m, N = f.m, f.group.order
    blocked = f.blocked()
    logs = complex_log(blocked)
    components = _anova_components(logs, m)
    targets = list(itertools.combinations(range(m), k))
    grouped: dict[Subset, np.ndarray] = {S: np.zeros((1,) * m, dtype=complex) for S in targets}
    for T, comp in components.items():
        if len(T) > k:
            continue
        S = next(S for S in targets if set(T) <= set(S))
        grouped[S] = grouped[S] + comp

    factors: dict[Subset, np.ndarray] = {}
    product = np.ones(blocked.shape, dtype=complex)
    for S, acc in grouped.items():
        full = np.broadcast_to(acc, tuple(N if b in S else 1 for b in range(m)))
        table = np.exp(full - full.reshape(-1)[0])
        product = product * table
        factors[S] = table.reshape((N,) * k).copy()
    error = float(np.max(np.abs(product - blocked)))
    if error > 10 * tol + 1e-12:
        return None, error
    return factors, error


def is_in_Dmk(f: JointCharFunction, k: int, tol: float = DEFAULT_TOL,
              plan: Optional[MixedDifferencePlan] = None) -> DmkReport:
    m = f.m
    if not 1 <= k <= m:
        raise InvalidArgument(f"k must lie in [1, m] = [1, {m}], got {k}")
    values = f.blocked()
    _check_nonvanishing(values, tol)
    if k == m:
        return DmkReport(member=True, residual=0.0, k=k)
    plan = plan or MixedDifferencePlan(f.group, m, k)
    residual = plan.residual(complex_log(values))
    member = residual <= tol
    factors, reason, error = None, None, None
    if member:
        factors, error = _factor_tables(f, k, tol)
        if factors is None:
            reason = LOG_HOLONOMY
    logger.debug("D_{%d,%d} test on %s: residual=%.3g member=%s", m, k, f.group.literal(), residual, member)
    return DmkReport(member=member, residual=residual, k=k, factors=factors, reason=reason,
                     reconstruction_error=error)


def anchored_interactions(f: JointCharFunction) -> dict[Subset, np.ndarray]:
    """Multiplicative Möbius decomposition anchored at 0.

    I_T(y_T) = prod_{U ⊆ T} f(y_U, 0)^{(-1)^{|T|-|U|}}, so f = prod_T I_T.
    Tables are indexed by the variables of T in increasing order.
    """
    m, N = f.m, f.group.order
    logs = complex_log(f.blocked())
    out = {}
    for size in range(1, m + 1):
        for T in itertools.combinations(range(m), size):
            acc = np.zeros((N,) * size, dtype=complex)
            for usize in range(size + 1):
                for U in itertools.combinations(T, usize):
                    index = tuple(slice(None) if b in U else 0 for b in range(m))
                    restricted = np.asarray(logs[index])
                    shape = tuple(N if b in U else 1 for b in T)
                    sign = -1 if (size - usize) % 2 else 1
                    acc = acc + sign * restricted.reshape(shape)
            out[T] = np.exp(acc)
    return out


def interaction_residual(f: JointCharFunction, k: int) -> float:
    """max |I_T - 1| over |T| > k; zero exactly on D_{m,k}."""
    worst = 0.0
    for T, table in anchored_interactions(f).items():
        if len(T) > k:
            worst = max(worst, float(np.max(np.abs(table - 1.0))))
    return worst


def averaged_mixed_difference(values: np.ndarray, group: FiniteAbelianGroup, m: int,
                              periodic: bool = False) -> np.ndarray:
    """Mean over h in Y^m of Delta_{h_1 e_1} ... Delta_{h_m e_m} of a table on (N,)*m.

    Zero exactly when the table is a sum of functions each missing a variable.
    Averaging Delta_{h e_j} over h is "mean along axis j minus identity", so
    plain tables need no loop over h. Periodic tables (logarithms read modulo
    2*pi*i) reduce every mixed difference before it enters the mean.
    """
    N = group.order
    table = np.asarray(values, dtype=complex).reshape((N,) * m)
    if not periodic:
        out = table
        for axis in range(m):
            out = out.mean(axis=axis, keepdims=True) - out
        return out
    add = group.add_table
    total = np.zeros(table.shape, dtype=complex)
    for h in itertools.product(range(N), repeat=m):
        mixed = table
        for axis, step in enumerate(h):
            mixed = np.take(mixed, add[:, step], axis=axis) - mixed
        total += wrap_phase(mixed)
    return total / N ** m


def bump(group: FiniteAbelianGroup, m: int, theta: float, at: Optional[tuple[int, ...]] = None) -> np.ndarray:
    """exp(i theta) at one point of Y^m whose blocks are all non-zero, 1 elsewhere."""
    N = group.order
    if N < 2:
        raise InvalidArgument("a bump needs a non-trivial group")
    point = at if at is not None else (1,) * m
    table = np.ones((N,) * m, dtype=complex)
    table[point] = np.exp(1j * theta)
    return table


def constructed_member(group: FiniteAbelianGroup, m: int, k: int, rng: np.random.Generator,
                       spread: float = 0.5) -> JointCharFunction:
    """prod over k-subsets S of R_S(y_S), random nonvanishing R_S with R_S(0) = 1."""
    N = group.order
    values = np.ones((N,) * m, dtype=complex)
    for S in itertools.combinations(range(m), k):
        logs = spread * (rng.standard_normal((N,) * k) + 1j * rng.standard_normal((N,) * k))
        logs = logs - logs.reshape(-1)[0]
        table = np.exp(logs)
        values = values * table.reshape(tuple(N if b in S else 1 for b in range(m)))
    return JointCharFunction(group, m, values)
