# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Characterization checks that close the elimination pipeline.

Three finite-group instances of classical facts:

- a characteristic function of the form exp(polynomial) belongs to a Gaussian
  (here: degenerate) law;
- the factors of a Gaussian law are Gaussian;
- Q-independent variables have E = joint / prod(marginals) = exp(q) with q a
  polynomial, q(0) = 0, which on a finite group forces E = 1.

Each check reports its numbers and raises EngineInconsistency when a
consequence that must hold on finite groups fails.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from charlab.dist.distribution import CharFunction, Distribution, JointCharFunction, convolve, inverse_char
from charlab.dist.gaussian import is_gaussian
from charlab.errors import EngineInconsistency, InvalidArgument, VanishingCharacteristicFunction
from charlab.feq.differences import DEFAULT_TOL, multiplicative_degree
from charlab.group.abelian import Element, check_same_group

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MarcinkiewiczReport:
    gaussian: bool
    degree: Optional[int]
    residual: float
    shift: Optional[Element] = None

    def to_json(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"gaussian": self.gaussian, "degree": self.degree, "residual": self.residual}
        if self.shift is not None:
            payload["shift"] = list(self.shift)
        return payload


def marcinkiewicz_check(f: CharFunction, tol: float = DEFAULT_TOL) -> MarcinkiewiczReport:
    """Is f = exp(polynomial) in the multiplicative sense, and is its law then Gaussian?"""
    degree, residual = multiplicative_degree(f.group, f.values, tol)
    if degree is None:
        return MarcinkiewiczReport(False, None, residual)
    report = is_gaussian(inverse_char(f), tol)
    if not report.gaussian:
        raise EngineInconsistency(
            f"f has multiplicative degree {degree} but its law is not Gaussian (margin {report.margin:.3g})"
        )
    return MarcinkiewiczReport(True, degree, residual, report.shift)


@dataclass(frozen=True)
class CramerReport:
    consistent: bool
    gaussian: bool
    factors_gaussian: tuple[bool, bool]
    convolution_error: float

    def to_json(self) -> dict[str, Any]:
        return {
            "consistent": self.consistent,
            "gaussian": self.gaussian,
            "factors_gaussian": list(self.factors_gaussian),
            "convolution_error": self.convolution_error,
        }


def _gaussian_or_false(mu: Distribution, tol: float) -> bool:
    # a vanishing characteristic function rules out a Gaussian law
    try:
        return is_gaussian(mu, tol).gaussian
    except VanishingCharacteristicFunction:
        return False


def cramer_factor_check(gamma: Distribution, gamma1: Distribution, gamma2: Distribution,
                        tol: float = DEFAULT_TOL) -> CramerReport:
    check_same_group(gamma1.group, gamma.group, "factor group")
    check_same_group(gamma2.group, gamma.group, "factor group")
    error = float(np.max(np.abs(convolve(gamma1, gamma2).probs - gamma.probs)))
    if error > tol:
        raise InvalidArgument(f"gamma1 * gamma2 differs from gamma by {error:.3g}")
    gaussian = _gaussian_or_false(gamma, tol)
    factors = (_gaussian_or_false(gamma1, tol), _gaussian_or_false(gamma2, tol))
    consistent = not gaussian or all(factors)
    if not consistent:
        logger.warning("Gaussian law with a non-Gaussian factor on %s", gamma.group.literal())
    return CramerReport(consistent, gaussian, factors, error)


@dataclass(frozen=True)
class QIndependenceReport:
    q_ok: bool
    degree: Optional[int]
    residual: float

    def to_json(self) -> dict[str, Any]:
        return {"q_ok": self.q_ok, "degree": self.degree, "residual": self.residual}


def _require_nonvanishing(values: np.ndarray, what: str, tol: float) -> None:
    lowest = float(np.min(np.abs(values)))
    if lowest <= tol:
        raise VanishingCharacteristicFunction(f"{what} vanishes (min |f| = {lowest:.3g})", lowest)


def q_independence_residual(joint: JointCharFunction, marginals: Sequence[CharFunction],
                            tol: float = DEFAULT_TOL) -> QIndependenceReport:
    """E = joint / prod_j marginal_j; Q-independent exactly when E = exp(q), q(0) = 0.

    residual is max |E - 1|. q_ok requires multiplicative degree 0 with E(0) = 1;
    a degree-1 E (a character) is not exp of a polynomial.
    """
    n = joint.m
    if len(marginals) != n:
        raise InvalidArgument(f"{len(marginals)} marginals for a joint law of {n} variables")
    Y = joint.group
    blocked = joint.blocked()
    _require_nonvanishing(blocked, "joint characteristic function", tol)
    product = np.ones(blocked.shape, dtype=complex)
    for j, f in enumerate(marginals):
        check_same_group(f.group, Y, "marginal group")
        _require_nonvanishing(f.values, f"marginal {j + 1}", tol)
        product = product * f.flat().reshape(tuple(Y.order if b == j else 1 for b in range(n)))
    E = (blocked / product).reshape(-1)

    degree, _ = multiplicative_degree(joint.joint_group, E, tol)
    residual = float(np.max(np.abs(E - 1.0)))
    q_ok = degree == 0 and abs(E[0] - 1.0) <= tol
    if q_ok and residual > tol * (1 + joint.joint_group.order):
        raise EngineInconsistency(f"E is exp of a constant vanishing at 0 yet max |E - 1| = {residual:.3g}")
    logger.debug("Q-independence on %s^%d: degree=%s residual=%.3g", Y.literal(), n, degree, residual)
    return QIndependenceReport(q_ok, degree, residual)
