# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

import json
from pathlib import Path
from typing import Any, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from charlab.errors import CharLabError, ConfigError
from charlab.group.abelian import make_group
from charlab.homs.conditions import CoefficientSystem, make_system

MODES = ("theorem1", "theorem4", "explore-remark2", "theorem3", "theorem5")

Coefficient = Union[int, List[List[int]]]


class GroupSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    moduli: List[int] = Field(..., min_length=1, description="Cyclic factor orders d_1, ..., d_r.")


class SeedSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    master: int = Field(0, ge=0, description="Master seed; restart i uses SeedSequence([master, i]).")
    restarts: int = Field(10_000, ge=0, description="Number of independent restarts.")


class ToleranceSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    membership: float = Field(1e-9, gt=0, description="D_{m,m-1} membership tolerance.")
    degeneracy: float = Field(1e-3, gt=0, description="Largest distance to a point mass counted as degenerate.")
    gaussian: float = Field(1e-9, gt=0, description="Tolerance of the Gaussian tests on sampled marginals.")


class SearchSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_iterations: int = Field(2000, ge=0, description="Per-restart iteration cap.")
    initial_step: float = Field(0.1, gt=0, description="Initial coordinate step.")
    decay: float = Field(0.5, gt=0, lt=1, description="Step multiplier after a rejected move.")
    min_step: float = Field(1e-12, gt=0, description="Search stops once the step falls below this.")
    min_modulus: float = Field(1e-6, gt=0, description="Points whose joint char function drops below this are rejected.")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    group: GroupSpec = Field(..., description="The finite abelian group X.")
    m: Optional[int] = Field(None, ge=1, description="Number of linear forms; inferred from alphas.")
    n: Optional[int] = Field(None, ge=1, description="Number of variables; inferred from alphas.")
    alphas: List[List[Coefficient]] = Field(
        ..., min_length=1,
        description="m x n grid; an integer k means k*I, a matrix is a row-major endomorphism of X.",
    )
    mode: Literal["theorem1", "theorem4", "explore-remark2", "theorem3", "theorem5"] = Field(
        "theorem1", description="Experiment to run."
    )
    seeds: SeedSpec = Field(default_factory=SeedSpec)
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)
    floor: float = Field(0.6, gt=0.5, lt=1.0, description="Point-mass weight lambda of sampled marginals.")
    search: SearchSpec = Field(default_factory=SearchSpec)

    def system(self) -> CoefficientSystem:
        return make_system(make_group(self.group.moduli), self.alphas)


def _semantic_errors(cfg: ExperimentConfig) -> list[tuple[str, str]]:
    errors = []
    widths = {len(row) for row in cfg.alphas}
    if len(widths) != 1 or 0 in widths:
        errors.append(("/alphas", "every row of alphas needs the same non-zero length"))
    else:
        n = widths.pop()
        if cfg.m is not None and cfg.m != len(cfg.alphas):
            errors.append(("/m", f"m={cfg.m} disagrees with {len(cfg.alphas)} rows of alphas"))
        if cfg.n is not None and cfg.n != n:
            errors.append(("/n", f"n={cfg.n} disagrees with {n} columns of alphas"))
    if len(cfg.alphas) < 2:
        errors.append(("/alphas", "at least two linear forms are needed (m >= 2)"))
    if cfg.seeds.restarts < 1 and cfg.mode != "explore-remark2":
        errors.append(("/seeds/restarts", "must be >= 1 outside explore-remark2"))
    if not errors:
        try:
            X = make_group(cfg.group.moduli)
        except CharLabError as exc:
            return errors + [("/group/moduli", str(exc))]
        try:
            make_system(X, cfg.alphas)
        except CharLabError as exc:
            errors.append(("/alphas", str(exc)))
    return errors


class _Pairs(dict):
    """A JSON object that remembers keys seen more than once."""

    duplicates: list


def _pairs_hook(pairs):
    obj = _Pairs()
    obj.duplicates = []
    for key, value in pairs:
        if key in obj:
            obj.duplicates.append(key)
        obj[key] = value
    return obj


def _escape(key: str) -> str:
    return key.replace("~", "~0").replace("/", "~1")


def _first_duplicate(obj: Any, pointer: str = "") -> Optional[str]:
    if isinstance(obj, _Pairs) and obj.duplicates:
        return f"{pointer}/{_escape(obj.duplicates[0])}"
    if isinstance(obj, dict):
        children = obj.items()
    elif isinstance(obj, list):
        children = enumerate(obj)
    else:
        return None
    for key, value in children:
        found = _first_duplicate(value, f"{pointer}/{_escape(str(key))}")
        if found:
            return found
    return None


def parse_config_text(text: str) -> dict:
    try:
        raw = json.loads(text, object_pairs_hook=_pairs_hook)
    except json.JSONDecodeError as exc:
        raise ConfigError([("", f"line {exc.lineno} column {exc.colno}: {exc.msg}")]) from exc
    duplicate = _first_duplicate(raw)
    if duplicate:
        raise ConfigError([(duplicate, "duplicate key")])
    if not isinstance(raw, dict):
        raise ConfigError([("", "config must be a JSON object")])
    return json.loads(json.dumps(raw))


def read_config_file(path: Union[str, Path]) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([("", f"cannot read {path}: {exc.strerror}")]) from exc
    return parse_config_text(text)


def config_from_dict(data: dict) -> ExperimentConfig:
    try:
        cfg = ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        errors = [
            ("".join(f"/{_escape(str(p))}" for p in err["loc"]), err["msg"])
            for err in exc.errors()
        ]
        raise ConfigError(errors) from exc
    errors = _semantic_errors(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg.model_copy(update={"m": len(cfg.alphas), "n": len(cfg.alphas[0])})


def validate_config(source: Union[str, Path, dict]) -> dict:
    """Schema-checked config with defaults filled; a fixed point of itself."""
    data = source if isinstance(source, dict) else read_config_file(source)
    return config_from_dict(data).model_dump(mode="json")
