# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

import logging

from pydantic import ValidationError

import charlab.api_schema as api_schema
import charlab.utils as util
from charlab import handlers
from charlab.errors import InvalidArgument

logger = logging.getLogger(__name__)

AVAILABLE_COMMANDS = [
    util.make_command_config(
        name="check-conditions",
        description="""Checks the pairwise-trivial-intersection condition on the diagonal images G_i, and its
kernel form for automorphism coefficients. Prints {"condition11": bool, "condition12": bool} with the
first witness for each failing condition.""",
        model=api_schema.commands.CheckConditionsPayload,
        handler=handlers.check_conditions,
    ),
    util.make_command_config(
        name="test-dmk",
        description="""Builds the joint characteristic function of the linear forms for given (or seeded) marginals
and tests membership in D_{m,k}, k = m-1 unless given. Prints {member, residual, factors?}.""",
        model=api_schema.commands.DmkTestPayload,
        handler=handlers.dmk_membership,
    ),
    util.make_command_config(
        name="verify",
        description="Runs the seeded experiment selected by the config mode and prints the report.",
        model=api_schema.commands.RunExperimentPayload,
        handler=handlers.run_experiment,
    ),
    util.make_command_config(
        name="explore",
        description="""Searches for near-members with non-degenerate marginals when the intersection condition
fails. Candidates are listed for inspection; the open question is never marked answered.""",
        model=api_schema.commands.RunExperimentPayload,
        handler=handlers.explore,
    ),
    util.make_command_config(
        name="catalog",
        description="Lists every finite abelian group up to the given order by invariant factors.",
        model=api_schema.commands.CatalogPayload,
        handler=handlers.catalog,
    ),
]


def _entry(name: str) -> dict:
    entry = next((c for c in AVAILABLE_COMMANDS if c["name"] == name), None)
    if not entry:
        raise InvalidArgument(f"Unknown command: {name}")
    return entry


def command_description(name: str) -> str:
    return _entry(name)["description"]


def handle_command(name: str, arguments: dict) -> handlers.CommandResult:
    logger.info("Running command: %s", name)
    entry = _entry(name)

    required = entry["schema"].get("required", [])
    missing = [key for key in required if arguments.get(key) is None]
    if missing:
        raise InvalidArgument(f"Missing required fields for {name}: {missing}")

    try:
        payload = entry["model"](**{k: v for k, v in arguments.items() if v is not None})
    except ValidationError as e:
        raise InvalidArgument(f"Validation error: {e}") from e
    return entry["handler"](payload.model_dump(exclude_none=True))
