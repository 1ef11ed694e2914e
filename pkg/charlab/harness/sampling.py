# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Seeded sampling of marginals with nonvanishing characteristic functions."""

from __future__ import annotations

import logging
from typing import Union

import numpy as np

from charlab.dist.distribution import Distribution
from charlab.errors import InvalidArgument
from charlab.group.abelian import FiniteAbelianGroup

logger = logging.getLogger(__name__)

DEFAULT_FLOOR = 0.6

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def restart_seed(master: int, index: int) -> np.random.SeedSequence:
    """Per-restart entropy; independent of worker count and completion order."""
    return np.random.SeedSequence([int(master), int(index)])


def restart_rng(master: int, index: int) -> np.random.Generator:
    return np.random.default_rng(restart_seed(master, index))


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_distribution(group: FiniteAbelianGroup, seed: SeedLike, floor: float = DEFAULT_FLOOR) -> Distribution:
    """floor * delta_0 + (1 - floor) * (uniform random simplex point).

    |mu^(y)| >= floor - (1 - floor) = 2 floor - 1 > 0 for every y.
    """
    if not 0.5 < floor < 1.0:
        raise InvalidArgument(f"floor must lie in (0.5, 1), got {floor}")
    rng = _rng(seed)
    probs = (1.0 - floor) * rng.dirichlet(np.ones(group.order))
    probs[0] += floor
    return Distribution(group, probs / probs.sum())


def sample_marginals(group: FiniteAbelianGroup, count: int, seed: SeedLike,
                     floor: float = DEFAULT_FLOOR) -> list[Distribution]:
    rng = _rng(seed)
    return [sample_distribution(group, rng, floor) for _ in range(count)]
