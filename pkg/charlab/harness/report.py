# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Experiment reports.

A PASS means no counterexample was found in the restarts that were run; the
summary line says exactly that and nothing stronger.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Any, Optional

from charlab.utils import FLOAT_FORMAT, render_json

logger = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"
EXPLORED = "EXPLORED"

NO_COUNTEREXAMPLE = "no counterexample found"


@dataclass
class RestartRecord:
    index: int
    seed: list[int]
    sampled_residual: float
    sampled_member: bool
    search_residual: float
    distances: list[float]
    iterations: int
    certificates: list[dict[str, Any]] = field(default_factory=list)
    q_residual: Optional[float] = None
    dependent_rejected: Optional[bool] = None
    candidate: bool = False
    failures: list[str] = field(default_factory=list)

    @property
    def min_distance(self) -> float:
        return min(self.distances) if self.distances else 0.0

    def to_json(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "index": self.index,
            "seed": self.seed,
            "sampled_residual": self.sampled_residual,
            "sampled_member": self.sampled_member,
            "search_residual": self.search_residual,
            "distances": self.distances,
            "iterations": self.iterations,
        }
        if self.certificates:
            payload["certificates"] = self.certificates
        if self.q_residual is not None:
            payload["q_residual"] = self.q_residual
        if self.dependent_rejected is not None:
            payload["dependent_rejected"] = self.dependent_rejected
        if self.candidate:
            payload["candidate"] = True
        if self.failures:
            payload["failures"] = self.failures
        return payload


@dataclass
class Report:
    mode: str
    group: str
    m: int
    n: int
    master_seed: int
    condition11: dict[str, Any]
    condition12: Optional[dict[str, Any]]
    records: list[RestartRecord]
    notes: list[str] = field(default_factory=list)
    reduction: Optional[dict[str, Any]] = None
    wall_clock: float = 0.0

    @property
    def failures(self) -> list[tuple[int, str]]:
        return [(r.index, f) for r in self.records for f in r.failures]

    @property
    def candidates(self) -> list[RestartRecord]:
        return [r for r in self.records if r.candidate]

    @property
    def verdict(self) -> str:
        if self.mode == "explore-remark2":
            return EXPLORED
        return FAIL if self.failures else PASS

    @property
    def summary(self) -> str:
        if self.verdict == PASS:
            return NO_COUNTEREXAMPLE
        if self.verdict == EXPLORED:
            return f"{len(self.candidates)} candidate phenomena for inspection; the question stays open"
        return f"{len(self.failures)} assertion failures"

    def to_json(self, include_wall_clock: bool = True) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "mode": self.mode,
            "group": self.group,
            "m": self.m,
            "n": self.n,
            "master_seed": self.master_seed,
            "condition11": self.condition11,
            "condition12": self.condition12,
            "verdict": self.verdict,
            "summary": self.summary,
            "restarts": len(self.records),
            "notes": self.notes,
        }
        if self.reduction is not None:
            payload["reduction"] = self.reduction
        if self.mode == "explore-remark2":
            payload["candidates"] = [r.index for r in self.candidates]
        payload["records"] = [r.to_json() for r in self.records]
        if include_wall_clock:
            payload["wall_clock"] = self.wall_clock
        return payload

    def render(self, include_wall_clock: bool = True) -> str:
        return render_json(self.to_json(include_wall_clock))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["restart", "residual", "min_distance"])
        for r in self.records:
            writer.writerow([r.index, format(r.search_residual, FLOAT_FORMAT), format(r.min_distance, FLOAT_FORMAT)])
        return buf.getvalue()
