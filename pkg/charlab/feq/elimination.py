# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Finite-difference elimination for sums of functions of linear forms.

Given adjoint coefficients a_ji on Y and functions psi_1..psi_n with

    sum_i psi_i(a_1i y_1 + ... + a_mi y_m) = sum_j s_j(y without y_j),

each psi_i is a polynomial. The engine replays the argument on a concrete
instance: for a target t it differences the left-hand side along shifts
eta_i in Ker g_i (g_i the i-th column form Y^m -> Y), which removes every
psi_i with i != t and leaves (Delta_h^{n-1} psi_t) ∘ g_t, then shows the
single-function equation forces a polynomial. Every shift used is written to
the certificate so it can be replayed.

The equation itself is checked through mixed differences: the m-fold mixed
difference of the left-hand side, averaged over all steps, must vanish.
Periodic psi (logarithms read modulo 2*pi*i) are compared modulo 2*pi*i
throughout.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from charlab.errors import (
    Condition11Violated,
    EngineInconsistency,
    Equation3Violated,
    InvalidArgument,
    PreconditionViolated,
)
from charlab.feq.differences import DEFAULT_TOL, GroupFunction, difference, polynomial_degree, wrap_phase
from charlab.feq.dmk import averaged_mixed_difference
from charlab.group.abelian import Element, FiniteAbelianGroup, check_same_group
from charlab.homs.conditions import CoefficientSystem, check_condition_11
from charlab.homs.endomorphism import Endomorphism, apply, image, kernel, make_hom, preimage

logger = logging.getLogger(__name__)

EXHAUSTIVE_ORDER = 64
EXHAUSTIVE_POINTS = 10 ** 7
SAMPLE_POINTS = 10 ** 4
KERNEL_ENUMERATION_LIMIT = 10 ** 4


@dataclass(frozen=True)
class Lemma1Report:
    is_polynomial: bool
    residual: float
    degree: Optional[int]
    degree_bound_ok: Optional[bool]
    exhaustive: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "is_polynomial": self.is_polynomial,
            "residual": self.residual,
            "degree": self.degree,
            "degree_bound_ok": self.degree_bound_ok,
            "exhaustive": self.exhaustive,
        }


@dataclass(frozen=True)
class ShiftRecord:
    i: int
    h: Element

    def to_json(self) -> dict[str, Any]:
        return {"i": self.i + 1, "h": list(self.h)}


@dataclass(frozen=True)
class EliminationCertificate:
    target: int
    shifts: tuple[ShiftRecord, ...]
    degree: int
    residual: float
    equation3_residual: float = 0.0
    m: int = field(default=0)
    n: int = field(default=0)

    def to_json(self) -> dict[str, Any]:
        return {
            "target": self.target + 1,
            "shifts": [s.to_json() for s in self.shifts],
            "degree": self.degree,
            "residual": self.residual,
        }


def _mixed_difference_max(values: np.ndarray, Y: FiniteAbelianGroup, s_idx: np.ndarray,
                          u_idx: Sequence[np.ndarray], periodic: bool = False) -> float:
    """max |sum_eps (-1)^{m-|eps|} psi(s + sum eps_j u_j)| over a broadcast grid."""
    add = Y.add_table
    m = len(u_idx)
    total = None
    for mask in range(1 << m):
        pos = s_idx
        picked = 0
        for j in range(m):
            if mask >> j & 1:
                pos = add[pos, u_idx[j]]
                picked += 1
        term = values[pos]
        if (m - picked) % 2:
            term = -term
        total = term if total is None else total + term
    if periodic:
        total = wrap_phase(total)
    return float(np.max(np.abs(total)))


def eliminate_lemma1(adjoints: Sequence[Endomorphism], psi: GroupFunction, tol: float = DEFAULT_TOL,
                     seed: int = 0) -> Lemma1Report:
    """Check Delta_{a_1 h_1} ... Delta_{a_m h_m} psi(a_1 y_1 + ... + a_m y_m) = 0."""
    Y = psi.group
    m = len(adjoints)
    if m < 1:
        raise InvalidArgument("need at least one adjoint map")
    for j, a in enumerate(adjoints):
        check_same_group(a.domain, Y, "adjoint domain")
        check_same_group(a.codomain, Y, "adjoint codomain")
        if not image(a).is_full():
            raise PreconditionViolated(f"a_{j + 1} = {a.to_json()} is not surjective on {Y.literal()}")

    N = Y.order
    values = psi.flat()
    exhaustive = N <= EXHAUSTIVE_ORDER and N ** (m + 1) <= EXHAUSTIVE_POINTS
    residual = 0.0
    if exhaustive:
        images = [np.unique(a.index_map) for a in adjoints]
        grid = [img.reshape((1,) * j + (-1,) + (1,) * (m - j - 1)) for j, img in enumerate(images)]
        for s in range(N):
            residual = max(residual, _mixed_difference_max(values, Y, np.asarray(s), grid, psi.periodic))
    else:
        rng = np.random.default_rng(seed)
        add = Y.add_table
        ys = rng.integers(0, N, size=(m, SAMPLE_POINTS))
        hs = rng.integers(0, N, size=(m, SAMPLE_POINTS))
        s_idx = np.zeros(SAMPLE_POINTS, dtype=np.int64)
        for j, a in enumerate(adjoints):
            s_idx = add[s_idx, a.index_map[ys[j]]]
        u_idx = [a.index_map[hs[j]] for j, a in enumerate(adjoints)]
        residual = _mixed_difference_max(values, Y, s_idx, u_idx, psi.periodic)

    is_polynomial = residual <= tol
    degree, bound_ok = None, None
    if is_polynomial:
        degree = polynomial_degree(psi, tol)
        bound_ok = degree is not None and degree <= m - 1
        if not bound_ok:
            raise EngineInconsistency(
                f"mixed differences vanish (residual {residual:.3g}) but polynomial degree is {degree}"
            )
    return Lemma1Report(is_polynomial, residual, degree, bound_ok, exhaustive)


def _shift_index(G: FiniteAbelianGroup, eta: Sequence[int]) -> np.ndarray:
    moduli = np.asarray(G.moduli, dtype=np.int64)
    return G.flat_index((G.element_array + np.asarray(eta, dtype=np.int64)) % moduli)


def _kernel_shifts(g_i: Endomorphism, g_t: Endomorphism) -> dict[int, Element]:
    """For each h in Y (flat index), an eta in Ker g_i with g_t(eta) = h."""
    Y = g_t.codomain
    H = kernel(g_i)
    chosen: dict[int, Element] = {}
    if H.order <= KERNEL_ENUMERATION_LIMIT:
        elems = H.element_array
        targets = Y.flat_index(g_t.apply_array(elems))
        _, first = np.unique(targets, return_index=True)
        for pos in first:
            chosen[int(targets[pos])] = tuple(int(v) for v in elems[pos])
    else:
        joint = make_hom(g_i.domain, Y.power(2), [list(r) for r in g_i.matrix] + [list(r) for r in g_t.matrix])
        for h_index in range(Y.order):
            eta = preimage(joint, Y.zero() + Y.from_index(h_index))
            if eta is not None:
                chosen[h_index] = eta
    return chosen


def _periodic(psis: Sequence[GroupFunction]) -> bool:
    return any(psi.periodic for psi in psis)


def _gap(values: np.ndarray, periodic: bool) -> float:
    return float(np.max(np.abs(wrap_phase(values) if periodic else values)))


def equation3_residual(adjoint_system: CoefficientSystem, psis: Sequence[GroupFunction]) -> float:
    """sup over y of the averaged m-fold mixed difference of sum_i psi_i ∘ g_i.

    Zero exactly when the sum splits into functions each missing a variable.
    Adding eps * chi to psi_t moves the residual by exactly eps whenever
    chi ∘ a_jt is a non-trivial character for every j.
    """
    Y, m = adjoint_system.group, adjoint_system.m
    phi = _lhs(adjoint_system, psis)
    return float(np.max(np.abs(averaged_mixed_difference(phi, Y, m, _periodic(psis)))))


def _lhs(adjoint_system: CoefficientSystem, psis: Sequence[GroupFunction]) -> np.ndarray:
    if len(psis) != adjoint_system.n:
        raise InvalidArgument(f"{len(psis)} functions for n={adjoint_system.n}")
    Y = adjoint_system.group
    total = np.zeros(Y.order ** adjoint_system.m, dtype=complex)
    for i, psi in enumerate(psis):
        check_same_group(psi.group, Y, "function group")
        total = total + psi.flat()[adjoint_system.column_form(i).index_map]
    return total


def _telescope(phi: np.ndarray, Ym: FiniteAbelianGroup, etas: Sequence[Element],
               periodic: bool = False) -> np.ndarray:
    out = phi
    for eta in etas:
        out = out[_shift_index(Ym, eta)] - out
        if periodic:
            out = wrap_phase(out)
    return out


def _iterated_difference(psi: GroupFunction, h: Element, times: int) -> GroupFunction:
    out = psi
    for _ in range(times):
        out = difference(out, h)
    return out


def _eliminate_target(adjoint_system: CoefficientSystem, psis: Sequence[GroupFunction], phi: np.ndarray,
                      t: int, tol: float, eq3: float) -> EliminationCertificate:
    Y, m, n = adjoint_system.group, adjoint_system.m, adjoint_system.n
    Ym = Y.power(m)
    periodic = _periodic(psis)
    forms = [adjoint_system.column_form(i) for i in range(n)]
    column = adjoint_system.column(t)
    others = [i for i in range(n) if i != t]
    choices = {i: _kernel_shifts(forms[i], forms[t]) for i in others}
    for i, chosen in choices.items():
        if len(chosen) != Y.order:
            raise EngineInconsistency(
                f"g_{t + 1} maps Ker g_{i + 1} onto only {len(chosen)} of {Y.order} elements"
            )

    shifts: list[ShiftRecord] = []
    worst = 0.0
    scale = 1.0 + float(np.max(np.abs(phi)))
    h_range = range(Y.order) if others else [0]
    for h_index in h_range:
        h = Y.from_index(h_index)
        etas = [choices[i][h_index] for i in others]
        shifts.extend(ShiftRecord(i, eta) for i, eta in zip(others, etas))
        reduced = _iterated_difference(psis[t], h, len(others))
        telescoped = _telescope(phi, Ym, etas, periodic)
        expected = reduced.flat()[forms[t].index_map]
        drift = _gap(telescoped - expected, periodic)
        if drift > tol * scale * 2 ** len(others) + 1e-12:
            raise EngineInconsistency(f"telescoping identity off by {drift:.3g} for target {t + 1}, h={h}")
        report = eliminate_lemma1(column, reduced, tol)
        if not report.is_polynomial:
            raise EngineInconsistency(
                f"eliminated equation for target {t + 1}, h={h} has residual {report.residual:.3g}"
            )
        worst = max(worst, report.residual)

    degree = polynomial_degree(psis[t], tol)
    if degree is None or degree > m + n - 2:
        raise EngineInconsistency(f"psi_{t + 1} has degree {degree}, above the bound {m + n - 2}")
    return EliminationCertificate(
        target=t, shifts=tuple(shifts), degree=degree, residual=worst,
        equation3_residual=eq3, m=m, n=n,
    )


def eliminate_lemma2(adjoint_system: CoefficientSystem, psis: Sequence[GroupFunction],
                     tol: float = DEFAULT_TOL) -> list[EliminationCertificate]:
    """One certificate per psi_i; the system holds adjoints a_ji, not alphas."""
    alphas = adjoint_system.adjoint_system()
    cond = check_condition_11(alphas)
    if not cond.holds:
        raise Condition11Violated(
            f"G_{cond.pair[0] + 1} ∩ G_{cond.pair[1] + 1} contains {cond.witness}", cond.witness
        )
    phi = _lhs(adjoint_system, psis)
    eq3 = equation3_residual(adjoint_system, psis)
    if eq3 > tol:
        raise Equation3Violated(
            f"averaged mixed differences of the left-hand side reach {eq3:.3g}; "
            "it is not a sum of (m-1)-variable functions", eq3,
        )
    certs = [_eliminate_target(adjoint_system, psis, phi, t, tol, eq3) for t in range(adjoint_system.n)]
    logger.debug("elimination on %s issued %d certificates", adjoint_system.group.literal(), len(certs))
    return certs


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    problems: tuple[str, ...] = ()


def replay_certificate(cert: EliminationCertificate, adjoint_system: CoefficientSystem,
                       psis: Sequence[GroupFunction], tol: float = DEFAULT_TOL) -> ReplayReport:
    """Re-validate a certificate without trusting anything it was built from."""
    Y, m, n = adjoint_system.group, adjoint_system.m, adjoint_system.n
    Ym = Y.power(m)
    periodic = _periodic(psis)
    problems: list[str] = []
    forms = [adjoint_system.column_form(i) for i in range(n)]
    t = cert.target
    for rec in cert.shifts:
        if any(apply(forms[rec.i], rec.h)):
            problems.append(f"shift {rec.h} is not in Ker g_{rec.i + 1}")

    per_h = n - 1
    phi = _lhs(adjoint_system, psis)
    if per_h and not problems:
        if len(cert.shifts) % per_h:
            problems.append("shift list does not split into groups of n-1")
        else:
            for start in range(0, len(cert.shifts), per_h):
                group = cert.shifts[start:start + per_h]
                images = {apply(forms[t], rec.h) for rec in group}
                if len(images) != 1:
                    problems.append(f"shifts {start}..{start + per_h - 1} map to different h under g_{t + 1}")
                    continue
                h = images.pop()
                reduced = _iterated_difference(psis[t], h, per_h)
                telescoped = _telescope(phi, Ym, [rec.h for rec in group], periodic)
                drift = _gap(telescoped - reduced.flat()[forms[t].index_map], periodic)
                if drift > tol * (1.0 + float(np.max(np.abs(phi)))) * 2 ** per_h + 1e-12:
                    problems.append(f"telescoping off by {drift:.3g} at h={h}")
                if not eliminate_lemma1(adjoint_system.column(t), reduced, tol).is_polynomial:
                    problems.append(f"reduced equation fails at h={h}")

    degree = polynomial_degree(psis[t], tol)
    if degree != cert.degree:
        problems.append(f"recomputed degree {degree} != certified {cert.degree}")
    if degree is not None and degree > m + n - 2:
        problems.append(f"degree {degree} exceeds {m + n - 2}")
    return ReplayReport(not problems, tuple(problems))


def certificate_from_json(obj: dict[str, Any], m: int = 0, n: int = 0) -> EliminationCertificate:
    return EliminationCertificate(
        target=int(obj.get("target", 1)) - 1,
        shifts=tuple(ShiftRecord(int(s["i"]) - 1, tuple(int(v) for v in s["h"])) for s in obj["shifts"]),
        degree=int(obj["degree"]),
        residual=float(obj["residual"]),
        m=m,
        n=n,
    )
