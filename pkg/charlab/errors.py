# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Error kinds raised across charlab.

Everything derives from ValueError so callers that only care about "bad input"
can keep catching that. The CLI maps each kind onto an exit code via
``exit_code_for``.
"""

from __future__ import annotations

from typing import Any, Optional

EXIT_OK = 0
EXIT_ASSERTION = 2
EXIT_PRECONDITION = 3
EXIT_USAGE = 64
EXIT_CONFIG = 65


class CharLabError(ValueError):
    """Base class for all charlab errors."""

    kind = "error"

    def to_json(self) -> dict[str, Any]:
        return {"error": self.kind, "message": str(self)}


class InvalidArgument(CharLabError):
    kind = "invalid-argument"


class IllDefinedHomomorphism(CharLabError):
    kind = "ill-defined-homomorphism"

    def __init__(self, row: int, col: int, message: str):
        # 1-based (j, i) of the offending matrix entry
        self.entry = (row, col)
        super().__init__(message)

    def to_json(self) -> dict[str, Any]:
        payload = super().to_json()
        payload["entry"] = list(self.entry)
        return payload


class NotInvertible(CharLabError):
    kind = "not-invertible"


class PreconditionViolated(CharLabError):
    kind = "precondition-violated"


class NotPositiveDefinite(CharLabError):
    kind = "not-positive-definite"


class VanishingCharacteristicFunction(CharLabError):
    kind = "vanishing-char"

    def __init__(self, message: str, min_modulus: float = 0.0):
        self.min_modulus = min_modulus
        super().__init__(message)


class Condition11Violated(CharLabError):
    kind = "condition-11-violated"

    def __init__(self, message: str, witness: Optional[tuple[int, ...]] = None,
                 report: Optional[dict[str, Any]] = None):
        self.witness = witness
        self.report = report
        super().__init__(message)

    def to_json(self) -> dict[str, Any]:
        payload = super().to_json()
        if self.witness is not None:
            payload["witness"] = list(self.witness)
        if self.report is not None:
            payload["report"] = self.report
        return payload


class Condition11Holds(CharLabError):
    kind = "condition-11-holds"


class Equation3Violated(CharLabError):
    kind = "equation-3-violated"

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(message)

    def to_json(self) -> dict[str, Any]:
        payload = super().to_json()
        payload["residual"] = self.residual
        return payload


class EngineInconsistency(CharLabError):
    """A consequence that must hold on finite groups failed numerically."""

    kind = "engine-inconsistency"


class ConfigError(CharLabError):
    kind = "config-error"

    def __init__(self, errors: list[tuple[str, str]]):
        # (json pointer, message) pairs, first error first
        self.errors = errors
        pointer, message = errors[0]
        super().__init__(f"{pointer or '/'}: {message}")

    @property
    def pointer(self) -> str:
        return self.errors[0][0]

    def to_json(self) -> dict[str, Any]:
        return {
            "error": self.kind,
            "errors": [{"path": p or "/", "message": m} for p, m in self.errors],
        }


_PRECONDITION_KINDS = (
    PreconditionViolated,
    Condition11Violated,
    Condition11Holds,
    NotInvertible,
    IllDefinedHomomorphism,
    VanishingCharacteristicFunction,
    Equation3Violated,
    NotPositiveDefinite,
)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, EngineInconsistency):
        return EXIT_ASSERTION
    if isinstance(exc, _PRECONDITION_KINDS):
        return EXIT_PRECONDITION
    if isinstance(exc, InvalidArgument):
        return EXIT_USAGE
    return EXIT_ASSERTION
