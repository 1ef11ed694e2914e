# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Local search for near-members of D_{m,m-1} over products of simplexes.

Projected coordinate descent: one marginal at a time, a random direction,
accept on strict decrease (trying both signs), shrink the step otherwise.
The objective is the membership residual alone; distance to degeneracy is
measured on the result, never penalised. Many restarts are searched in
lockstep, one row per restart.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from charlab.dist.distribution import Distribution
from charlab.dist.gaussian import distance_to_degeneracy
from charlab.errors import InvalidArgument
from charlab.feq.differences import complex_log
from charlab.feq.dmk import MixedDifferencePlan
from charlab.group.abelian import pairing_phases
from charlab.homs.conditions import CoefficientSystem

logger = logging.getLogger(__name__)

DIRECTION_BLOCK = 64  # iterations of directions drawn per generator call


@dataclass(frozen=True)
class SearchSettings:
    max_iterations: int = 2000
    initial_step: float = 0.1
    decay: float = 0.5
    min_step: float = 1e-12
    min_modulus: float = 1e-6


@dataclass(frozen=True, eq=False)
class SearchResult:
    solution: list[Distribution]
    residual: float
    distances: list[float]
    iterations: int
    initial_residual: float


def project_simplex_rows(x: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean projection onto {p >= 0, sum p = 1} (sort-based)."""
    x = np.asarray(x, dtype=float)
    rows, n = x.shape
    if n == 1:
        return np.ones((rows, 1))
    u = np.sort(x, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1) - 1.0
    feasible = u - css / np.arange(1, n + 1) > 0
    rho = n - 1 - np.argmax(feasible[:, ::-1], axis=1)
    theta = css[np.arange(rows), rho] / (rho + 1)
    return np.fmax(x - theta[:, None], 0.0)


def project_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {p >= 0, sum p = 1} (sort-based)."""
    return project_simplex_rows(np.asarray(x, dtype=float).reshape(1, -1))[0]


class MembershipObjective:
    """Membership residual of the joint law of the forms, as a function of the marginals.

    Batches are (B, n, |X|) probability stacks; each row is evaluated with
    row-local arithmetic only, so a row's value does not depend on its batch.
    """

    def __init__(self, cs: CoefficientSystem, min_modulus: float = 1e-6):
        if cs.m < 2:
            raise InvalidArgument("the D_{m,m-1} objective needs m >= 2")
        self.cs = cs
        self.min_modulus = min_modulus
        self.plan = MixedDifferencePlan(cs.group, cs.m, cs.m - 1)
        X = cs.group
        els = X.element_array
        phases = pairing_phases(X, els[:, None, :], els[None, :, :])
        self.kernel = np.exp(2j * np.pi * phases / X.exponent)
        adj = cs.adjoint_system()
        self.index_maps = [adj.column_form(i).index_map for i in range(cs.n)]

    def chars(self, points: np.ndarray) -> np.ndarray:
        """Characteristic tables of the last axis of ``points``."""
        return (np.asarray(points, dtype=float)[..., None, :] * self.kernel).sum(axis=-1)

    def from_chars(self, chars: np.ndarray) -> np.ndarray:
        chars = np.asarray(chars)
        values = np.ones((chars.shape[0], self.cs.group.order ** self.cs.m), dtype=complex)
        for i, index_map in enumerate(self.index_maps):
            values = values * chars[:, i][:, index_map]
        lowest = np.abs(values).min(axis=1)
        out = np.full(values.shape[0], np.inf)
        ok = lowest >= self.min_modulus
        if ok.any():
            out[ok] = self.plan.batch_residual(complex_log(values[ok]))
        return out

    def batch(self, points: np.ndarray) -> np.ndarray:
        return self.from_chars(self.chars(points))

    def __call__(self, points: Sequence[np.ndarray]) -> float:
        return float(self.batch(np.stack([np.asarray(p, dtype=float) for p in points])[None])[0])


def minimize_residuals(cs: CoefficientSystem, initials: Sequence[Sequence[Distribution]],
                       settings: Optional[SearchSettings] = None,
                       rngs: Optional[Sequence[np.random.Generator]] = None,
                       objective: Optional[MembershipObjective] = None) -> list[SearchResult]:
    """Run one search per row of ``initials`` in lockstep.

    Row b draws its directions from rngs[b] only, and every acceptance test is
    row-wise, so each result equals the one the row gets when searched alone.
    """
    settings = settings or SearchSettings()
    objective = objective or MembershipObjective(cs, settings.min_modulus)
    B = len(initials)
    if rngs is None:
        rngs = [np.random.default_rng(0) for _ in range(B)]
    if len(rngs) != B:
        raise InvalidArgument(f"{len(rngs)} generators for {B} searches")
    if B == 0:
        return []
    X = cs.group
    N = X.order
    points = np.array([[mu.flat() for mu in row] for row in initials], dtype=float)
    n = points.shape[1]
    chars = objective.chars(points)
    best = objective.from_chars(chars)
    start = best.copy()
    step = np.full(B, settings.initial_step)
    iterations = np.full(B, settings.max_iterations)
    active = np.ones(B, dtype=bool)
    directions = np.zeros((B, DIRECTION_BLOCK, N))

    for t in range(1, settings.max_iterations + 1):
        stopping = active & ((best == 0.0) | (step < settings.min_step))
        iterations[stopping] = t - 1
        active &= ~stopping
        if not active.any():
            break
        slot = (t - 1) % DIRECTION_BLOCK
        if slot == 0:
            size = min(DIRECTION_BLOCK, settings.max_iterations - t + 1)
            for b in np.flatnonzero(active):
                directions[b, :size] = rngs[b].standard_normal((size, N))
        i = (t - 1) % n
        pending = np.flatnonzero(active)
        for sign in (1.0, -1.0):
            if not pending.size:
                break
            candidate = project_simplex_rows(points[pending, i] + sign * step[pending, None] * directions[pending, slot])
            candidate = candidate / candidate.sum(axis=1, keepdims=True)
            trial = chars[pending].copy()
            trial[:, i] = objective.chars(candidate)
            values = objective.from_chars(trial)
            better = values < best[pending]
            accepted = pending[better]
            points[accepted, i] = candidate[better]
            chars[accepted] = trial[better]
            best[accepted] = values[better]
            pending = pending[~better]
        step[pending] *= settings.decay

    results = []
    for b in range(B):
        solution = [Distribution(X, p) for p in points[b]]
        distances = [distance_to_degeneracy(mu) for mu in solution]
        results.append(SearchResult(solution, float(best[b]), distances, int(iterations[b]), float(start[b])))
    logger.debug("search batch of %d: median residual %.3g -> %.3g", B, float(np.median(start)), float(np.median(best)))
    return results


def minimize_residual(cs: CoefficientSystem, initial: Sequence[Distribution],
                      settings: Optional[SearchSettings] = None,
                      rng: Optional[np.random.Generator] = None,
                      objective: Optional[MembershipObjective] = None) -> SearchResult:
    rng = rng if rng is not None else np.random.default_rng(0)
    return minimize_residuals(cs, [initial], settings, [rng], objective)[0]
