# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import dotenv

dotenv.load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
# Largest broadcast gather (entries) built in one piece before chunking.
DEFAULT_MAX_TABLE = 1 << 21


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", name, raw)
        return default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning("Ignoring non-numeric %s=%r", name, raw)
        return default


@dataclass(frozen=True)
class RuntimeConfig:
    threads: int
    log_level: str
    default_tol: float
    max_table: int


def load() -> RuntimeConfig:
    return RuntimeConfig(
        threads=max(1, _env_int("LCA_CHARLAB_THREADS", 1)),
        log_level=(os.getenv("LCA_CHARLAB_LOG_LEVEL") or "INFO").strip().upper(),
        default_tol=_env_float("LCA_CHARLAB_DEFAULT_TOL", DEFAULT_TOL),
        max_table=max(1024, _env_int("LCA_CHARLAB_MAX_TABLE", DEFAULT_MAX_TABLE)),
    )
