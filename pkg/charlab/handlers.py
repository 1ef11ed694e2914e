# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Command handlers. Each takes a validated payload dict and returns a CommandResult."""

import csv
import io
import logging
from dataclasses import dataclass
from typing import Any, Optional

from charlab import config as runtime_config
from charlab.api_schema.config import config_from_dict
from charlab.dist.distribution import make_distribution
from charlab.dist.forms import joint_of_linear_forms
from charlab.errors import EXIT_ASSERTION, EXIT_OK, InvalidArgument, PreconditionViolated
from charlab.feq.dmk import is_in_Dmk
from charlab.group.abelian import catalog as group_catalog
from charlab.group.abelian import make_group
from charlab.harness.experiments import run_experiment as run_harness
from charlab.harness.report import FAIL
from charlab.harness.sampling import sample_marginals
from charlab.homs.conditions import check_condition_11, check_condition_12, make_system
from charlab.utils import render_json

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    payload: dict[str, Any]
    exit_code: int = EXIT_OK
    csv: Optional[str] = None

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            if self.csv is None:
                raise InvalidArgument("this command has no CSV form")
            return self.csv
        return render_json(self.payload)


def _rows_csv(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def check_conditions(payload: dict) -> CommandResult:
    X = make_group(payload["moduli"])
    cs = make_system(X, payload["alphas"])
    cond11 = check_condition_11(cs)
    try:
        cond12 = check_condition_12(cs)
    except PreconditionViolated:
        cond12 = None
    result: dict[str, Any] = {
        "condition11": cond11.holds,
        "condition12": cond12.holds if cond12 is not None else None,
    }
    details = {}
    if not cond11.holds:
        details["condition11"] = cond11.to_json()
    if cond12 is not None and not cond12.holds:
        details["condition12"] = cond12.to_json()
    if details:
        result["details"] = details
    rows = [["condition11", cond11.holds], ["condition12", result["condition12"]]]
    return CommandResult(result, csv=_rows_csv(["condition", "holds"], rows))


def dmk_membership(payload: dict) -> CommandResult:
    X = make_group(payload["moduli"])
    cs = make_system(X, payload["alphas"])
    if payload.get("marginals") is not None:
        marginals = [make_distribution(X, p) for p in payload["marginals"]]
    else:
        marginals = sample_marginals(X, cs.n, payload.get("seed", 0), payload.get("floor", 0.6))
    joint = joint_of_linear_forms(cs, marginals)
    k = payload.get("k") or cs.m - 1
    report = is_in_Dmk(joint, k, payload.get("tol") or runtime_config.load().default_tol)
    return CommandResult(report.to_json(include_tables=payload.get("include_tables", False)), csv=joint.to_csv())


def run_experiment(payload: dict) -> CommandResult:
    cfg = config_from_dict(payload["config"])
    report = run_harness(cfg)
    code = EXIT_ASSERTION if report.verdict == FAIL else EXIT_OK
    return CommandResult(report.to_json(), exit_code=code, csv=report.to_csv())


def explore(payload: dict) -> CommandResult:
    config = dict(payload["config"])
    config["mode"] = "explore-remark2"
    return run_experiment({**payload, "config": config})


def catalog(payload: dict) -> CommandResult:
    groups = []
    for moduli in group_catalog(payload.get("max_order", 16)):
        X = make_group(moduli)
        groups.append({"order": X.order, "moduli": moduli, "literal": X.literal()})
    rows = [[g["order"], g["literal"]] for g in groups]
    return CommandResult({"groups": groups}, csv=_rows_csv(["order", "group"], rows))
